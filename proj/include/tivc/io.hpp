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

#ifndef TIVC_IO_HPP_
#define TIVC_IO_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tivc/costs.hpp"
#include "tivc/env.hpp"
#include "tivc/trainer.hpp"

namespace tivc {

// 17 significant digits; round-trips every finite double exactly
std::string FormatDouble(double v);

std::string SpeedClassName(SpeedClass c);
SpeedClass SpeedClassFromName(const std::string& name);

// Demonstrations as line-delimited JSON, one record per demo:
//   {"seed":..,"dt":..,"goal":[..],"speed_class":"..","states":[[x,y,z,vx,vy,vz],..]}
void WriteDemosJsonl(const std::string& path,
                     std::span<const Demonstration> demos);
std::vector<Demonstration> ReadDemosJsonl(const std::string& path);

// cost checkpoint: {kind, K, base_duration, bandwidth, flat_params, seed, epoch}
void WriteCheckpoint(const std::string& path, const CostParams& params);
CostParams ReadCheckpoint(const std::string& path);

// per-update training log: epoch, demo_index, irl_loss, speed_error, seconds_elapsed
void WriteHistoryCsv(const std::string& path, const TrainHistory& history);

void WriteTextFile(const std::string& path, const std::string& content);
std::string ReadTextFile(const std::string& path);

// fnv-1a over the file bytes, as 16 hex digits
std::string FileDigest(const std::string& path);

}  // namespace tivc

#endif  // TIVC_IO_HPP_
