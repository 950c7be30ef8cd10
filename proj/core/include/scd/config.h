// Copyright 2026 The scdmetric Authors.
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

#ifndef SCD_CONFIG_H_
#define SCD_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scd/itml.h"
#include "scd/keyvalue.h"
#include "scd/metric.h"

namespace scd {

// Settings shared by the CLI subcommands. Keys in config files and long
// flag names coincide ("max-sweeps", "gamma-grid", ...).
struct PipelineConfig {
  // Paths.
  std::string store;
  std::string constraints;
  std::string dev;
  std::string test;
  std::string targets;
  std::string gold;
  std::string metric;
  std::string scores;
  std::string out;
  std::string confusion_out;

  // Metric learning.
  ItmlConfig itml;
  // Empty: no search, fit itml.gamma. "default": the 11-point log grid.
  // Otherwise a comma-separated list.
  std::string gamma_grid;
  BoundPercentiles percentiles;

  // Scoring and evaluation.
  MetricMode metric_mode = MetricMode::kFull;
  bool baseline_cosine = false;
  double margin = 0.5;
  std::uint64_t max_pairs = 0;
  std::size_t workers = 1;
  std::uint64_t seed = 0;

  // Overlays recognised keys; unknown keys throw ParseError.
  void Apply(const KeyValues& values);
  // Every key Apply understands.
  static const std::vector<std::string>& Keys();
};

// defaults < config file < flags.
PipelineConfig ResolveConfig(const KeyValues& file_values,
                             const KeyValues& flag_values);

std::vector<double> ParseGammaGrid(std::string_view text);

}  // namespace scd

#endif  // SCD_CONFIG_H_
