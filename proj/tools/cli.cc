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

#include "cli.h"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "scd/config.h"
#include "scd/constraints.h"
#include "scd/dimension.h"
#include "scd/errors.h"
#include "scd/eval.h"
#include "scd/fileio.h"
#include "scd/itml.h"
#include "scd/keyvalue.h"
#include "scd/matrix_io.h"
#include "scd/scorer.h"
#include "scd/store.h"

namespace scd {
namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
};

void AddFlag(Subcommand& sub, const std::string& name, const std::string& help) {
  sub.options[name] = sub.app->add_option("--" + name, sub.flags[name], help);
}

KeyValues GivenFlags(const Subcommand& sub) {
  KeyValues given;
  for (const auto& [name, opt] : sub.options) {
    if (opt->count() > 0) given[name] = sub.flags.at(name);
  }
  return given;
}

class UsageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

const std::string& Require(const std::string& value, const char* flag,
                           bool must_exist = true) {
  if (value.empty()) throw UsageError(fmt::format("missing required --{}", flag));
  if (must_exist && !std::filesystem::exists(value)) {
    throw UsageError(fmt::format("--{}: '{}' does not exist", flag, value));
  }
  return value;
}

void PrintWarnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int LearnMetric(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  const EmbeddingStore store = ReadStore(Require(cfg.store, "store"));
  const ConstraintSet train = ReadConstraints(Require(cfg.constraints, "constraints"), store);
  Require(cfg.out, "out", false);
  out << fmt::format("constraints: {} similar, {} dissimilar\n", train.similar_count(),
                     train.dissimilar_count());

  const MahalanobisMatrix a0 = MahalanobisMatrix::Identity(store.dim());
  const BoundPair bounds = EstimateBounds(store, train, a0, cfg.percentiles);
  PrintWarnings(bounds.warnings, err);
  out << fmt::format("bounds: upper={} lower={}\n", bounds.upper, bounds.lower);

  ItmlState state;
  double gamma = cfg.itml.gamma;
  if (!cfg.gamma_grid.empty() && !cfg.dev.empty()) {
    const ConstraintSet dev = ReadConstraints(Require(cfg.dev, "dev"), store);
    const std::vector<double> grid = ParseGammaGrid(cfg.gamma_grid);
    SlackSearchResult search =
        SlackSearch(train, dev, store, grid, bounds, cfg.itml, a0, cfg.workers);
    std::string table;
    for (const auto& c : search.candidates) {
      const std::string line =
          c.failed ? fmt::format("{}\tfailed\t{}\n", c.gamma, c.error)
                   : fmt::format("{}\t{}\t{}\t{}\n", c.gamma, c.dev_accuracy, c.sweeps,
                                 c.converged ? "converged" : "max-sweeps");
      out << "gamma " << line;
      table += line;
    }
    WriteFileAtomically(cfg.out + ".grid.tsv", table);
    gamma = search.best_gamma;
    state = std::move(search.best_state);
  } else {
    if (!cfg.gamma_grid.empty()) {
      err << fmt::format("warning: no --dev set; skipping gamma search, using gamma={}\n",
                         gamma);
    }
    state = ItmlFit(store, train, bounds, cfg.itml, a0);
  }
  PrintWarnings(state.warnings, err);

  const MahalanobisMatrix learned =
      cfg.metric_mode == MetricMode::kDiagonal ? ExtractDiagonal(state) : state.a;
  WriteMetric(learned, cfg.out);
  WriteMetricMetadata({gamma, bounds.upper, bounds.lower, state.sweep_count, state.converged},
                      MetadataPathFor(cfg.out));
  out << fmt::format("gamma={} sweeps={} converged={} mode={}\n", gamma, state.sweep_count,
                     state.converged, MetricModeName(learned.mode()));
  return 0;
}

MahalanobisMatrix LoadMetricForScoring(const PipelineConfig& cfg) {
  MahalanobisMatrix a = ReadMetric(Require(cfg.metric, "metric"));
  if (cfg.metric_mode == MetricMode::kDiagonal && !a.is_diagonal()) {
    a = ExtractDiagonal(a);
  }
  return a;
}

int Score(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  const EmbeddingStore store = ReadStore(Require(cfg.store, "store"));
  const std::vector<TargetSpec> specs = ReadTargetSpecs(Require(cfg.targets, "targets"));
  Require(cfg.out, "out", false);
  const std::vector<TargetPair> targets = BuildTargets(store, specs);

  std::vector<ChangeScore> scores;
  std::size_t failures = 0;
  if (cfg.baseline_cosine) {
    for (const auto& t : targets) {
      try {
        scores.push_back(ApdCosineBaseline(t.first, t.second, store));
      } catch (const std::exception& e) {
        ++failures;
        err << fmt::format("error: '{}': {}\n", t.first.word, e.what());
      }
    }
  } else {
    const MahalanobisMatrix a = LoadMetricForScoring(cfg);
    ScoreOptions options;
    options.max_pairs = cfg.max_pairs;
    options.seed = cfg.seed;
    for (auto& entry : ScoreBatch(a, targets, store, cfg.workers, options)) {
      if (entry.score) {
        scores.push_back(std::move(*entry.score));
      } else {
        ++failures;
        err << fmt::format("error: '{}': {}\n", entry.word, entry.error);
      }
    }
  }
  WriteScores(scores, cfg.out);
  out << fmt::format("scored {} of {} targets\n", scores.size(), targets.size());
  return failures == 0 ? 0 : 1;
}

int AnalyzeDims(const PipelineConfig& cfg, std::ostream& out, std::ostream&) {
  const EmbeddingStore store = ReadStore(Require(cfg.store, "store"));
  const std::vector<TargetSpec> specs = ReadTargetSpecs(Require(cfg.targets, "targets"));
  const GoldRatings gold = ReadGoldRatings(Require(cfg.gold, "gold"));
  Require(cfg.out, "out", false);
  const std::vector<TargetPair> targets = BuildTargets(store, specs);

  std::optional<MahalanobisMatrix> metric;
  if (!cfg.metric.empty()) metric = ReadMetric(Require(cfg.metric, "metric"));
  const DimensionAnalysisReport report =
      AnalyzeDimensions(store, targets, gold, metric ? &*metric : nullptr);

  WriteFileAtomically(cfg.out, FormatDimensionTable(report));
  if (report.confusion) {
    const std::string path = cfg.confusion_out.empty() ? cfg.out + ".confusion" : cfg.confusion_out;
    WriteFileAtomically(path, FormatConfusion(*report.confusion));
  }
  out << "top dimensions by |correlation|:";
  for (std::size_t k = 0; k < std::min<std::size_t>(10, report.ranking.order.size()); ++k) {
    const std::size_t dim = report.ranking.order[k];
    out << fmt::format(" {}({:.3f})", dim,
                       report.ranking.correlations(static_cast<Eigen::Index>(dim)));
  }
  out << '\n';
  return 0;
}

int EvalWicCommand(const PipelineConfig& cfg, std::ostream& out, std::ostream&) {
  const EmbeddingStore store = ReadStore(Require(cfg.store, "store"));
  const ConstraintSet test = ReadConstraints(Require(cfg.test, "test"), store);
  WicEvalResult result;
  if (cfg.baseline_cosine) {
    result = EvalWicMarginBaseline(test, store, cfg.margin);
  } else {
    const MahalanobisMatrix a = LoadMetricForScoring(cfg);
    const MetricMetadata meta = ReadMetricMetadata(MetadataPathFor(cfg.metric));
    BoundPair bounds;
    bounds.upper = meta.upper_bound;
    bounds.lower = meta.lower_bound;
    result = EvalWic(a, bounds, test, store);
  }
  const std::string summary = FormatWicSummary(result);
  out << summary;
  if (!cfg.out.empty()) {
    WriteFileAtomically(cfg.out, summary);
    WriteFileAtomically(cfg.out + ".detail.tsv", FormatWicDetail(result));
  }
  return 0;
}

int EvalScdCommand(const PipelineConfig& cfg, std::ostream& out, std::ostream&) {
  const std::vector<ChangeScore> scores = ReadScores(Require(cfg.scores, "scores"));
  const GoldRatings gold = ReadGoldRatings(Require(cfg.gold, "gold"));
  const ScdEvalResult result = EvalScd(scores, gold);
  const std::string summary = FormatScdSummary(result);
  out << summary;
  if (!cfg.out.empty()) {
    WriteFileAtomically(cfg.out, summary);
    WriteFileAtomically(cfg.out + ".detail.tsv", FormatScdDetail(result));
  }
  return 0;
}

int Inspect(const PipelineConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.store.empty() && cfg.metric.empty()) {
    throw UsageError("inspect needs --store or --metric");
  }
  if (!cfg.store.empty()) {
    const EmbeddingStore store = ReadStore(Require(cfg.store, "store"));
    out << fmt::format("store: {}\ndim={}\ncount={}\n", cfg.store, store.dim(), store.size());
    std::map<std::string, std::size_t> words;
    for (const auto& e : store.manifest()) ++words[e.word + "\t" + e.corpus_id];
    for (const auto& [key, n] : words) out << key << '\t' << n << '\n';
  }
  if (!cfg.metric.empty()) {
    const MahalanobisMatrix a = ReadMetric(Require(cfg.metric, "metric"));
    const PdCheck pd = CheckPositiveDefinite(a);
    out << fmt::format("metric: {}\nmode={}\ndim={}\npositive_definite={}\nsmallest_pivot={}\n",
                       cfg.metric, MetricModeName(a.mode()), a.dim(), pd.positive_definite,
                       pd.smallest_pivot);
    const std::string meta_path = MetadataPathFor(cfg.metric);
    if (std::filesystem::exists(meta_path)) out << ReadFile(meta_path);
  }
  return 0;
}

}  // namespace

int CliMain(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sense-aware metric learning and semantic change scoring"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  using Handler = int (*)(const PipelineConfig&, std::ostream&, std::ostream&);
  struct FlagSet {
    const char* name;
    const char* help;
    std::vector<std::pair<const char*, const char*>> flags;
    Handler handler;
  };
  const std::vector<FlagSet> specs = {
      {"learn-metric", "Fit a Mahalanobis metric to WiC constraints with ITML",
       {{"store", "embedding store"},
        {"constraints", "training constraints (id1<TAB>id2<TAB>label)"},
        {"dev", "dev constraints used to pick gamma"},
        {"out", "output metric path"},
        {"gamma", "slack parameter when not searching (default 1)"},
        {"gamma-grid", "'default' or comma-separated gamma values"},
        {"max-sweeps", "sweep cap (default 1000)"},
        {"tol", "convergence tolerance on dual change (default 1e-3)"},
        {"shuffle", "shuffle constraint order per sweep (true|false)"},
        {"slack-rule", "algorithm|exact"},
        {"percentile-similar", "upper-bound percentile (default 95)"},
        {"percentile-dissimilar", "lower-bound percentile (default 5)"},
        {"metric-mode", "full|diagonal"},
        {"workers", "threads for the gamma search"},
        {"seed", "random seed"}},
       &LearnMetric},
      {"score", "Average pairwise learned distance per target word",
       {{"store", "embedding store"},
        {"metric", "metric file"},
        {"targets", "word<TAB>corpus1<TAB>corpus2 per line"},
        {"out", "output scores path"},
        {"workers", "worker threads"},
        {"metric-mode", "full|diagonal (diagonal extracts from a full metric)"},
        {"baseline", "cosine|none"},
        {"max-pairs", "cap on sampled pairs per target (0 = all)"},
        {"seed", "random seed for pair sampling"}},
       &Score},
      {"analyze-dims", "Per-dimension change scores ranked against gold ratings",
       {{"store", "embedding store"},
        {"targets", "targets file (word, corpus 1, corpus 2)"},
        {"gold", "word<TAB>rating per line"},
        {"metric", "metric file for row importance (optional)"},
        {"out", "dimension table path"},
        {"confusion-out", "quartile confusion path (default <out>.confusion)"}},
       &AnalyzeDims},
      {"eval-wic", "WiC accuracy from learned bounds or the cosine margin baseline",
       {{"store", "embedding store"},
        {"metric", "metric file (bounds read from <metric>.meta)"},
        {"test", "test constraints"},
        {"out", "report path"},
        {"metric-mode", "full|diagonal"},
        {"baseline", "cosine|none"},
        {"margin", "cosine margin for the baseline (default 0.5)"}},
       &EvalWicCommand},
      {"eval-scd", "Spearman correlation of change scores with gold ratings",
       {{"scores", "scores file"}, {"gold", "gold ratings"}, {"out", "report path"}},
       &EvalScdCommand},
      {"inspect", "Summarise a store and/or metric",
       {{"store", "embedding store"}, {"metric", "metric file"}},
       &Inspect},
  };

  std::vector<Subcommand> subs(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    subs[i].app = app.add_subcommand(specs[i].name, specs[i].help);
    subs[i].app->add_option("--config", subs[i].config_path,
                            "key=value file; flags override it");
    for (const auto& [name, help] : specs[i].flags) AddFlag(subs[i], name, help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!subs[i].app->parsed()) continue;
    try {
      const KeyValues file_values =
          subs[i].config_path.empty() ? KeyValues{} : ReadKeyValueFile(subs[i].config_path);
      const PipelineConfig cfg = ResolveConfig(file_values, GivenFlags(subs[i]));
      return specs[i].handler(cfg, out, err);
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n\n" << subs[i].app->help();
      return 1;
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 1;
}

}  // namespace scd
