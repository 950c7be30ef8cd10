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

#include <gtest/gtest.h>

#include <algorithm>

#include "scd/errors.h"
#include "scd/fileio.h"
#include "scd/keyvalue.h"
#include "test_support.h"

namespace scd {
namespace {

TEST(ParseKeyValues, CommentsBlankLinesAndWhitespace) {
  const KeyValues kv = ParseKeyValues("# comment\n\n gamma = 0.1 \nseed=3\n", "cfg");
  EXPECT_EQ(kv.at("gamma"), "0.1");
  EXPECT_EQ(kv.at("seed"), "3");
  EXPECT_EQ(kv.size(), 2u);
  EXPECT_THROW(ParseKeyValues("gamma\n", "cfg"), ParseError);
  EXPECT_THROW(ParseKeyValues("=1\n", "cfg"), ParseError);
}

TEST(ParseScalars, RejectGarbage) {
  EXPECT_EQ(ParseDouble("1e-3", "x"), 1e-3);
  EXPECT_THROW(ParseDouble("1e-3x", "x"), ParseError);
  EXPECT_EQ(ParseInt("-4", "x"), -4);
  EXPECT_THROW(ParseInt("4.5", "x"), ParseError);
  EXPECT_TRUE(ParseBool("true", "x"));
  EXPECT_FALSE(ParseBool("0", "x"));
  EXPECT_THROW(ParseBool("maybe", "x"), ParseError);
}

TEST(KeyValueFile, RoundTrip) {
  testing::TempDir dir;
  const KeyValues kv{{"a", "1"}, {"b", "two words"}};
  WriteKeyValueFile(kv, dir.Path("kv"));
  EXPECT_EQ(ReadKeyValueFile(dir.Path("kv")), kv);
}

TEST(PipelineConfig, ApplyRecognisedKeys) {
  PipelineConfig cfg;
  cfg.Apply({{"gamma", "0.01"},
             {"gamma-grid", "default"},
             {"max-sweeps", "7"},
             {"tol", "1e-5"},
             {"shuffle", "true"},
             {"slack-rule", "exact"},
             {"percentile-similar", "90"},
             {"percentile-dissimilar", "10"},
             {"metric-mode", "diagonal"},
             {"baseline", "cosine"},
             {"margin", "0.3"},
             {"max-pairs", "1000"},
             {"workers", "4"},
             {"seed", "99"},
             {"store", "s.scde"},
             {"out", "o"}});
  EXPECT_EQ(cfg.itml.gamma, 0.01);
  EXPECT_EQ(cfg.gamma_grid, "default");
  EXPECT_EQ(cfg.itml.max_sweeps, 7);
  EXPECT_EQ(cfg.itml.convergence_tol, 1e-5);
  EXPECT_TRUE(cfg.itml.shuffle);
  EXPECT_EQ(cfg.itml.slack_rule, SlackRule::kExactProjection);
  EXPECT_EQ(cfg.percentiles.similar, 90.0);
  EXPECT_EQ(cfg.percentiles.dissimilar, 10.0);
  EXPECT_EQ(cfg.metric_mode, MetricMode::kDiagonal);
  EXPECT_TRUE(cfg.baseline_cosine);
  EXPECT_EQ(cfg.margin, 0.3);
  EXPECT_EQ(cfg.max_pairs, 1000u);
  EXPECT_EQ(cfg.workers, 4u);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.itml.seed, 99u);
  EXPECT_EQ(cfg.store, "s.scde");
  EXPECT_EQ(cfg.out, "o");
}

TEST(PipelineConfig, RejectsUnknownAndInvalid) {
  PipelineConfig cfg;
  EXPECT_THROW(cfg.Apply({{"gama", "1"}}), ParseError);
  EXPECT_THROW(cfg.Apply({{"workers", "0"}}), ValidationError);
  EXPECT_THROW(cfg.Apply({{"slack-rule", "fast"}}), ParseError);
  EXPECT_THROW(cfg.Apply({{"metric-mode", "sparse"}}), ParseError);
  EXPECT_THROW(cfg.Apply({{"max-pairs", "-1"}}), ParseError);
}

TEST(PipelineConfig, KeysListIsComplete) {
  const auto& keys = PipelineConfig::Keys();
  for (const char* k : {"gamma", "gamma-grid", "workers", "seed", "store", "metric"}) {
    EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
  }
}

TEST(ResolveConfig, FlagBeatsFileBeatsDefault) {
  const PipelineConfig defaults;
  const KeyValues file{{"gamma", "0.1"}, {"workers", "3"}};
  const KeyValues flags{{"gamma", "10"}};
  const PipelineConfig cfg = ResolveConfig(file, flags);
  EXPECT_EQ(cfg.itml.gamma, 10.0);
  EXPECT_EQ(cfg.workers, 3u);
  EXPECT_EQ(cfg.margin, defaults.margin);
  EXPECT_EQ(cfg.itml.max_sweeps, defaults.itml.max_sweeps);
}

TEST(ParseGammaGrid, DefaultAndList) {
  EXPECT_EQ(ParseGammaGrid("default"), DefaultGammaGrid());
  EXPECT_EQ(ParseGammaGrid("0.1, 1,10"), (std::vector<double>{0.1, 1, 10}));
  EXPECT_THROW(ParseGammaGrid("1,-1"), ValidationError);
  EXPECT_THROW(ParseGammaGrid("1,x"), ParseError);
  EXPECT_THROW(ParseGammaGrid(""), ValidationError);
}

}  // namespace
}  // namespace scd
