// Copyright 2026 The popaudit Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "popaudit/dataset.hpp"
#include "popaudit/metrics.hpp"
#include "popaudit/popularity.hpp"
#include "popaudit/recommenders.hpp"
#include "popaudit/types.hpp"

namespace popaudit {

inline constexpr const char* kPopauditVersion = "0.1.0";

struct MetricOptions {
  Real epsilon = 1e-10;           // KL smoothing
  bool history_full_profile = true;  // false: H and |T_hist| use the fold-in input only
};

// Everything a run needs; render_config() writes the canonical key-value file
// with every key present, and parse_experiment_config() reads the same format
// back (unknown sections or keys are fatal).
struct ExperimentConfig {
  std::filesystem::path interactions_path;
  std::filesystem::path users_path;
  std::filesystem::path output_dir;  // empty: keep results in memory only
  std::uint64_t seed = 1;
  std::int32_t sample_size = 0;  // 0: keep the full item catalog
  Real input_fraction = 0.8;
  bool exclude_input_items = true;  // mask fold-in items out of every list
  FilterConfig filters;
  MetricOptions metrics;
  Hyperparameters params;
  std::vector<Variant> roster{kAllVariants.begin(), kAllVariants.end()};
};

std::string render_config(const ExperimentConfig& config);
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// One per-user evaluation that could not produce a record; the fold goes on.
struct UserFailure {
  std::string algorithm;
  std::string user;
  std::int32_t fold = 0;
  std::string reason;
};

struct FoldOutcome {
  std::vector<PerUserBiasRecord> records;
  std::vector<UserFailure> failures;
  std::int32_t n_test_users = 0;
};

// Trains the roster on the fold's train users and evaluates every test user:
// fold-in on the input share, recommendation list of length max(10, |T_hist|)
// with input items excluded, NDCG@10 against the holdout, bias metrics from
// the history/recommendation popularity distributions.
FoldOutcome run_fold(int fold, const Dataset& dataset, const SplitPlan& plan,
                     const PopularityIndex& popularity, const DecileBins& bins,
                     const ExperimentConfig& config);

struct ExperimentResult {
  FilterReport filter_report;
  StageCounts final_counts;
  BiasReport report;
  std::vector<PerUserBiasRecord> records;
  std::vector<UserFailure> failures;
  std::string provenance_json;
};

// Full pipeline: parse, filter, optionally sample, build the popularity index
// and decile bins, run the five folds, pool the per-user records and aggregate
// the report. A fold in which more than 5% of the test users fail for some
// algorithm invalidates the run. With output_dir set, writes report.tsv,
// report.json, per_user.tsv and provenance.json.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::vector<Interaction>& interactions,
                                const std::vector<UserRecord>& users);

// Mean validation NDCG@10 over all folds for one hyperparameter setting of
// one algorithm; the test users stay untouched.
Real evaluate_on_validation(const Dataset& dataset, const SplitPlan& plan, Variant variant,
                            const Hyperparameters& params, const ExperimentConfig& config);

// Index of the grid point with the highest validation NDCG (ties: first).
std::size_t grid_search(const Dataset& dataset, const SplitPlan& plan, Variant variant,
                        std::span<const Hyperparameters> grid, const ExperimentConfig& config);

}  // namespace popaudit
