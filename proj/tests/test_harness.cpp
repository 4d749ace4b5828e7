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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "popaudit/harness.hpp"
#include "popaudit/synth.hpp"

using namespace popaudit;

namespace {

// A small corpus every harness test shares: permissive filters so the whole
// catalog survives, shrunk factor models so five folds stay fast.
ExperimentConfig small_config() {
  ExperimentConfig config;
  config.seed = 12;
  config.filters.min_play_count = 1;
  config.filters.min_users_per_item = 1;
  config.filters.min_items_per_user = 1;
  config.params.als.factors = 12;
  config.params.als.iterations = 4;
  config.params.bpr.factors = 12;
  config.params.bpr.epochs = 6;
  return config;
}

SyntheticData small_corpus(std::uint64_t seed = 3000) {
  SyntheticSpec spec;
  spec.n_users = 100;
  spec.n_items = 150;
  spec.mean_history = 12;
  spec.seed = seed;
  return generate_synthetic(spec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("config renders and parses losslessly") {
  ExperimentConfig config;
  config.interactions_path = "/data/listens.tsv";
  config.users_path = "/data/users.tsv";
  config.output_dir = "/tmp/out";
  config.seed = 777;
  config.sample_size = 1234;
  config.input_fraction = 0.7;
  config.exclude_input_items = false;
  config.metrics.epsilon = 1e-8;
  config.metrics.history_full_profile = false;
  config.filters.min_play_count = 3;
  config.filters.min_users_per_item = 7;
  config.filters.min_items_per_user = 6;
  config.filters.window_start = -100;
  config.filters.window_end = 900;
  config.filters.core_fixpoint = true;
  config.params.itemknn.neighbors = 55;
  config.params.itemknn.shrinkage = 2.5;
  config.params.slim.l1 = 0.01;
  config.params.slim.l2 = 0.02;
  config.params.slim.max_sweeps = 9;
  config.params.slim.tolerance = 1e-6;
  config.params.als.factors = 17;
  config.params.als.regularization = 0.3;
  config.params.als.alpha = 11;
  config.params.als.iterations = 3;
  config.params.bpr.factors = 19;
  config.params.bpr.learning_rate = 0.01;
  config.params.bpr.regularization = 0.005;
  config.params.bpr.epochs = 4;
  config.roster = {Variant::Pop, Variant::Als};

  const std::string text = render_config(config);
  std::istringstream in(text);
  const ExperimentConfig parsed = parse_experiment_config(in);
  CHECK(render_config(parsed) == text);
  CHECK(parsed.interactions_path == config.interactions_path);
  CHECK(parsed.seed == 777);
  CHECK(parsed.filters.window_start == -100);
  CHECK(parsed.filters.core_fixpoint);
  CHECK(parsed.roster == config.roster);
  CHECK(parsed.metrics.epsilon == 1e-8);
  CHECK_FALSE(parsed.metrics.history_full_profile);
  CHECK(parsed.params.slim.tolerance == 1e-6);
}

TEST_CASE("config parser rejects unknown keys, sections and bad values") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_experiment_config(in);
  };
  CHECK_THROWS_AS(parse("seed = 5\nturbo = on\n"), ConfigError);
  CHECK_THROWS_AS(parse("[warp]\nfactor = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("seed = minus_one\n"), ConfigError);
  CHECK_THROWS_AS(parse("input_fraction = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("algorithms = rand,rand\n"), ConfigError);
  CHECK_THROWS_AS(parse("algorithms = \n"), ConfigError);
  CHECK_THROWS_AS(parse("algorithms = rand,mf\n"), ConfigError);
  CHECK_THROWS_AS(parse("epsilon = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("history_side = sideways\n"), ConfigError);
  const ExperimentConfig ok = parse("seed = 9\nalgorithms = bpr,pop\n# comment\n");
  CHECK(ok.seed == 9);
  CHECK(ok.roster == std::vector<Variant>{Variant::Bpr, Variant::Pop});
}

TEST_CASE("experiment pools every user exactly once per algorithm") {
  const SyntheticData data = small_corpus();
  const ExperimentConfig config = small_config();
  const ExperimentResult result = run_experiment(config, data.interactions, data.users);

  CHECK(result.failures.empty());
  CHECK(result.final_counts.users == 100);
  std::map<std::string, std::map<std::string, int>> seen;
  for (const auto& rec : result.records) {
    ++seen[rec.algorithm][rec.user];
    CHECK(rec.fold >= 0);
    CHECK(rec.fold < 5);
    CHECK(rec.ndcg >= 0.0);
    CHECK(rec.ndcg <= 1.0);
  }
  REQUIRE(seen.size() == 6);
  for (const auto& [algorithm, users] : seen) {
    CAPTURE(algorithm);
    CHECK(users.size() == 100);
    for (const auto& [user, count] : users) CHECK(count == 1);
  }

  REQUIRE(result.report.algorithms.size() == 6);
  CHECK(result.report.algorithms.front().algorithm == "rand");
  for (const auto& alg : result.report.algorithms) {
    CHECK(alg.all.n_users == 100);
    CHECK(alg.female.n_users + alg.male.n_users == 100);
    for (std::size_t m = 0; m < 7; ++m) {
      if (alg.all.bias[m] && alg.female.bias[m]) {
        CHECK(*alg.all.bias[m] + *alg.delta_female_bias[m] == *alg.female.bias[m]);
      }
    }
    CHECK(alg.all.ndcg + alg.delta_female_ndcg == alg.female.ndcg);
    CHECK(alg.all.ndcg + alg.delta_male_ndcg == alg.male.ndcg);
  }
}

TEST_CASE("experiment reruns are identical") {
  const SyntheticData data = small_corpus();
  ExperimentConfig config = small_config();
  config.roster = {Variant::Rand, Variant::Pop, Variant::ItemKnn, Variant::Bpr};
  const ExperimentResult a = run_experiment(config, data.interactions, data.users);
  const ExperimentResult b = run_experiment(config, data.interactions, data.users);
  CHECK(render_report_tsv(a.report) == render_report_tsv(b.report));
  std::ostringstream pa, pb;
  write_per_user_tsv(a.records, pa);
  write_per_user_tsv(b.records, pb);
  CHECK(pa.str() == pb.str());

  config.seed = 13;
  const ExperimentResult c = run_experiment(config, data.interactions, data.users);
  CHECK(render_report_tsv(a.report) != render_report_tsv(c.report));
}

TEST_CASE("history side switch changes the comparison baseline") {
  const SyntheticData data = small_corpus();
  ExperimentConfig config = small_config();
  config.roster = {Variant::Pop};
  const ExperimentResult full = run_experiment(config, data.interactions, data.users);
  config.metrics.history_full_profile = false;
  const ExperimentResult input_only = run_experiment(config, data.interactions, data.users);
  CHECK(render_report_tsv(full.report) != render_report_tsv(input_only.report));
}

TEST_CASE("a user with unshared items fails fold-in and is reported") {
  SyntheticData data = small_corpus(3500);
  for (int i = 0; i < 6; ++i) {
    Interaction rec;
    rec.user = "zz_lonely";
    rec.item = "zz_item_" + std::to_string(i);
    rec.play_count = 3;
    data.interactions.push_back(rec);
  }
  data.users.push_back(UserRecord{"zz_lonely", Gender::Female});

  const ExperimentConfig config = small_config();
  const ExperimentResult result = run_experiment(config, data.interactions, data.users);
  // The lonely user is a test user in exactly one fold; every algorithm
  // fails to fold them in because none of their items was trained on.
  CHECK(result.failures.size() == 6);
  std::set<std::string> failing_algorithms;
  for (const UserFailure& f : result.failures) {
    CHECK(f.user == "zz_lonely");
    failing_algorithms.insert(f.algorithm);
    CHECK_FALSE(f.reason.empty());
  }
  CHECK(failing_algorithms.size() == 6);
  for (const auto& alg : result.report.algorithms) CHECK(alg.all.n_users == 100);
}

TEST_CASE("experiment writes its four artifacts when an output dir is set") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "popaudit_harness_out";
  std::filesystem::remove_all(dir);
  const SyntheticData data = small_corpus();
  ExperimentConfig config = small_config();
  config.roster = {Variant::Rand, Variant::Pop};
  config.output_dir = dir;
  const ExperimentResult result = run_experiment(config, data.interactions, data.users);

  const std::string report_tsv = read_file(dir / "report.tsv");
  CHECK(report_tsv == render_report_tsv(result.report));
  CHECK(read_file(dir / "report.json") == render_report_json(result.report));

  // The per-user dump regenerates the exact same report.
  std::ifstream per_user_in(dir / "per_user.tsv");
  const auto records = parse_per_user_tsv(per_user_in);
  CHECK(render_report_tsv(build_report(records)) == report_tsv);

  const auto provenance = nlohmann::ordered_json::parse(read_file(dir / "provenance.json"));
  CHECK(provenance.at("tool") == "popaudit");
  CHECK(provenance.at("version") == kPopauditVersion);
  CHECK(provenance.at("folds") == 5);
  CHECK(provenance.at("config_hash").get<std::string>().size() == 16);
  CHECK(provenance.at("dataset").at("users") == 100);
  CHECK(provenance.at("config").get<std::string>() == render_config(config));
  std::filesystem::remove_all(dir);
}

TEST_CASE("file-based entry point reports missing inputs") {
  ExperimentConfig config = small_config();
  config.interactions_path = "/nonexistent/listens.tsv";
  config.users_path = "/nonexistent/users.tsv";
  CHECK_THROWS_AS(run_experiment(config), DataError);
}

TEST_CASE("invalid rosters and fractions are rejected before any work") {
  const SyntheticData data = small_corpus();
  ExperimentConfig config = small_config();
  config.roster.clear();
  CHECK_THROWS_AS(run_experiment(config, data.interactions, data.users), ConfigError);
  config = small_config();
  config.roster = {Variant::Pop, Variant::Pop};
  CHECK_THROWS_AS(run_experiment(config, data.interactions, data.users), ConfigError);
  config = small_config();
  config.input_fraction = 1.0;
  CHECK_THROWS_AS(run_experiment(config, data.interactions, data.users), ConfigError);
  config = small_config();
  config.metrics.epsilon = 0.0;
  CHECK_THROWS_AS(run_experiment(config, data.interactions, data.users), ConfigError);
}

TEST_CASE("validation sweep scores settings deterministically and grid search picks the best") {
  const SyntheticData data = small_corpus();
  const ExperimentConfig config = small_config();
  const Dataset ds = apply_filters(data.interactions, data.users, config.filters);
  const SplitPlan plan = make_split_plan(ds, config.seed, config.input_fraction);

  Hyperparameters narrow;
  narrow.itemknn.neighbors = 2;
  Hyperparameters wide;
  wide.itemknn.neighbors = 100;
  const Real score_narrow =
      evaluate_on_validation(ds, plan, Variant::ItemKnn, narrow, config);
  const Real score_wide = evaluate_on_validation(ds, plan, Variant::ItemKnn, wide, config);
  CHECK(score_narrow >= 0.0);
  CHECK(score_narrow <= 1.0);
  CHECK(score_wide >= 0.0);
  CHECK(score_wide <= 1.0);
  CHECK(evaluate_on_validation(ds, plan, Variant::ItemKnn, wide, config) == score_wide);

  const std::vector<Hyperparameters> grid = {narrow, wide, narrow, wide};
  const std::size_t best = grid_search(ds, plan, Variant::ItemKnn, grid, config);
  // Duplicates mean the winner must be one of the first two entries.
  CHECK(best < 2);
  const Real best_score =
      evaluate_on_validation(ds, plan, Variant::ItemKnn, grid[best], config);
  CHECK(best_score == std::max(score_narrow, score_wide));
}

TEST_CASE("fold outcomes expose the test population size") {
  const SyntheticData data = small_corpus();
  ExperimentConfig config = small_config();
  config.roster = {Variant::Pop};
  const Dataset ds = apply_filters(data.interactions, data.users, config.filters);
  const SplitPlan plan = make_split_plan(ds, config.seed, config.input_fraction);
  const PopularityIndex popularity = compute_popularity(ds);
  const DecileBins bins = build_decile_bins(popularity);

  int total_tests = 0;
  for (int fold = 0; fold < SplitPlan::kFolds; ++fold) {
    const FoldOutcome outcome = run_fold(fold, ds, plan, popularity, bins, config);
    int expected = 0;
    for (UserIndex u = 0; u < ds.n_users(); ++u) {
      expected += plan.role(fold, u) == Role::Test ? 1 : 0;
    }
    CHECK(outcome.n_test_users == expected);
    CHECK(static_cast<int>(outcome.records.size()) == expected);
    total_tests += expected;
  }
  CHECK(total_tests == ds.n_users());
}
