// Copyright 2026 The tivc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tivc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tivc {

using nlohmann::json;

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string SpeedClassName(SpeedClass c) {
  switch (c) {
    case SpeedClass::kAligned:
      return "aligned";
    case SpeedClass::kFast:
      return "fast";
    case SpeedClass::kSlow:
      return "slow";
  }
  throw ArgumentError("unknown speed class");
}

SpeedClass SpeedClassFromName(const std::string& name) {
  if (name == "aligned") return SpeedClass::kAligned;
  if (name == "fast") return SpeedClass::kFast;
  if (name == "slow") return SpeedClass::kSlow;
  throw ArgumentError("unknown speed class: " + name);
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteDemosJsonl(const std::string& path,
                     std::span<const Demonstration> demos) {
  std::ostringstream out;
  for (const Demonstration& demo : demos) {
    out << "{\"seed\":" << demo.seed
        << ",\"dt\":" << FormatDouble(demo.trajectory.dt) << ",\"goal\":["
        << FormatDouble(demo.goal.x) << ',' << FormatDouble(demo.goal.y) << ','
        << FormatDouble(demo.goal.z) << "],\"speed_class\":\""
        << SpeedClassName(demo.speed_class) << "\",\"states\":[";
    for (size_t t = 0; t < demo.trajectory.states.size(); ++t) {
      const State& s = demo.trajectory.states[t];
      if (t > 0) out << ',';
      out << '[' << FormatDouble(s.position.x) << ',' << FormatDouble(s.position.y)
          << ',' << FormatDouble(s.position.z) << ',' << FormatDouble(s.velocity.x)
          << ',' << FormatDouble(s.velocity.y) << ',' << FormatDouble(s.velocity.z)
          << ']';
    }
    out << "]}\n";
  }
  WriteTextFile(path, out.str());
}

std::vector<Demonstration> ReadDemosJsonl(const std::string& path) {
  std::istringstream in(ReadTextFile(path));
  std::vector<Demonstration> demos;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ArgumentError(path + ":" + std::to_string(line_no) + ": " +
                          e.what());
    }
    Demonstration demo;
    demo.seed = record.at("seed").get<uint64_t>();
    demo.trajectory.dt = record.at("dt").get<double>();
    const auto& goal = record.at("goal");
    demo.goal = Vec3{goal.at(0).get<double>(), goal.at(1).get<double>(),
                     goal.at(2).get<double>()};
    demo.speed_class =
        SpeedClassFromName(record.at("speed_class").get<std::string>());
    for (const auto& entry : record.at("states")) {
      State s;
      s.position = Vec3{entry.at(0).get<double>(), entry.at(1).get<double>(),
                        entry.at(2).get<double>()};
      s.velocity = Vec3{entry.at(3).get<double>(), entry.at(4).get<double>(),
                        entry.at(5).get<double>()};
      demo.trajectory.states.push_back(s);
    }
    if (demo.trajectory.states.size() < 2) {
      throw ArgumentError(path + ":" + std::to_string(line_no) +
                          ": trajectory needs at least two states");
    }
    const Vec3 last = demo.trajectory.final_position();
    if (last.x != demo.goal.x || last.y != demo.goal.y ||
        last.z != demo.goal.z) {
      throw ArgumentError(path + ":" + std::to_string(line_no) +
                          ": goal does not equal the final state");
    }
    demos.push_back(std::move(demo));
  }
  return demos;
}

void WriteCheckpoint(const std::string& path, const CostParams& params) {
  json record;
  record["kind"] = CostKindName(params.kind);
  record["K"] = params.centers;
  record["base_duration"] = params.base_duration_s;
  record["bandwidth"] = params.bandwidth;
  record["flat_params"] = params.flat;
  record["seed"] = params.seed;
  record["epoch"] = params.epoch;
  WriteTextFile(path, record.dump() + "\n");
}

CostParams ReadCheckpoint(const std::string& path) {
  json record;
  try {
    record = json::parse(ReadTextFile(path));
  } catch (const json::exception& e) {
    throw ArgumentError(path + ": " + e.what());
  }
  CostParams params;
  params.kind = CostKindFromName(record.at("kind").get<std::string>());
  params.centers = record.at("K").get<int>();
  params.base_duration_s = record.at("base_duration").get<double>();
  params.bandwidth = record.at("bandwidth").get<double>();
  params.flat = record.at("flat_params").get<std::vector<double>>();
  params.seed = record.at("seed").get<uint64_t>();
  params.epoch = record.at("epoch").get<int>();
  if (params.flat.size() != params.param_count()) {
    throw ArgumentError(path + ": parameter count does not match the kind");
  }
  return params;
}

void WriteHistoryCsv(const std::string& path, const TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,demo_index,irl_loss,speed_error,seconds_elapsed\n";
  for (const TrainRecord& r : history.records) {
    out << r.epoch << ',' << r.demo_index << ',' << FormatDouble(r.irl_loss)
        << ',' << FormatDouble(r.speed_error) << ',' << FormatDouble(r.seconds)
        << '\n';
  }
  WriteTextFile(path, out.str());
}

std::string FileDigest(const std::string& path) {
  const std::string bytes = ReadTextFile(path);
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace tivc
