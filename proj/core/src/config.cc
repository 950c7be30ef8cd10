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

#include "scd/config.h"

#include <fmt/core.h>

#include <algorithm>

#include "scd/errors.h"
#include "scd/keyvalue.h"

namespace scd {

const std::vector<std::string>& PipelineConfig::Keys() {
  static const std::vector<std::string> keys = {
      "store", "constraints", "dev", "test", "targets", "gold", "metric",
      "scores", "out", "confusion-out", "gamma", "gamma-grid", "max-sweeps",
      "tol", "shuffle", "slack-rule", "percentile-similar",
      "percentile-dissimilar", "metric-mode", "baseline", "margin",
      "max-pairs", "workers", "seed"};
  return keys;
}

void PipelineConfig::Apply(const KeyValues& values) {
  for (const auto& [key, value] : values) {
    if (key == "store") store = value;
    else if (key == "constraints") constraints = value;
    else if (key == "dev") dev = value;
    else if (key == "test") test = value;
    else if (key == "targets") targets = value;
    else if (key == "gold") gold = value;
    else if (key == "metric") metric = value;
    else if (key == "scores") scores = value;
    else if (key == "out") out = value;
    else if (key == "confusion-out") confusion_out = value;
    else if (key == "gamma") itml.gamma = ParseDouble(value, key);
    else if (key == "gamma-grid") gamma_grid = value;
    else if (key == "max-sweeps") itml.max_sweeps = static_cast<int>(ParseInt(value, key));
    else if (key == "tol") itml.convergence_tol = ParseDouble(value, key);
    else if (key == "shuffle") itml.shuffle = ParseBool(value, key);
    else if (key == "slack-rule") {
      if (value == "algorithm") itml.slack_rule = SlackRule::kAlgorithm;
      else if (value == "exact") itml.slack_rule = SlackRule::kExactProjection;
      else throw ParseError(fmt::format("slack-rule: expected algorithm|exact, got '{}'", value));
    } else if (key == "percentile-similar") percentiles.similar = ParseDouble(value, key);
    else if (key == "percentile-dissimilar") percentiles.dissimilar = ParseDouble(value, key);
    else if (key == "metric-mode") {
      if (value == "full") metric_mode = MetricMode::kFull;
      else if (value == "diagonal") metric_mode = MetricMode::kDiagonal;
      else throw ParseError(fmt::format("metric-mode: expected full|diagonal, got '{}'", value));
    } else if (key == "baseline") {
      if (value == "cosine") baseline_cosine = true;
      else if (value == "none") baseline_cosine = false;
      else throw ParseError(fmt::format("baseline: expected cosine|none, got '{}'", value));
    } else if (key == "margin") margin = ParseDouble(value, key);
    else if (key == "max-pairs") {
      const long long v = ParseInt(value, key);
      if (v < 0) throw ParseError("max-pairs must be non-negative");
      max_pairs = static_cast<std::uint64_t>(v);
    } else if (key == "workers") {
      const long long v = ParseInt(value, key);
      if (v < 1) throw ValidationError(fmt::format("workers must be >= 1, got {}", v));
      workers = static_cast<std::size_t>(v);
    } else if (key == "seed") {
      const long long v = ParseInt(value, key);
      seed = static_cast<std::uint64_t>(v);
      itml.seed = seed;
    } else {
      throw ParseError(fmt::format("unknown configuration key '{}'", key));
    }
  }
}

PipelineConfig ResolveConfig(const KeyValues& file_values,
                             const KeyValues& flag_values) {
  PipelineConfig config;
  config.Apply(file_values);
  config.Apply(flag_values);
  return config;
}

std::vector<double> ParseGammaGrid(std::string_view text) {
  if (text == "default") return DefaultGammaGrid();
  std::vector<double> grid;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = Trim(text.substr(0, comma));
    const double g = ParseDouble(item, "gamma-grid");
    if (!(g > 0.0)) throw ValidationError(fmt::format("gamma {} must be positive", g));
    grid.push_back(g);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (grid.empty()) throw ValidationError("gamma grid is empty");
  return grid;
}

}  // namespace scd
