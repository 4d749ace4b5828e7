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

#include "popaudit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "popaudit/rng.hpp"
#include "popaudit/text.hpp"

namespace popaudit {

namespace {

std::string join_names(std::span<const Variant> roster) {
  std::string out;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (i > 0) out += ',';
    out += variant_name(roster[i]);
  }
  return out;
}

std::string bool_token(bool value) { return value ? "true" : "false"; }

bool parse_bool(std::string_view token, const std::string& key) {
  if (token == "true" || token == "1") return true;
  if (token == "false" || token == "0") return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" + std::string(token) +
                    "'");
}

Real parse_real_or_throw(std::string_view token, const std::string& key) {
  const auto value = text::parse_real(token);
  if (!value) throw ConfigError("config: key '" + key + "' expects a real, got '" +
                                std::string(token) + "'");
  return *value;
}

template <typename Int>
Int parse_int_or_throw(std::string_view token, const std::string& key) {
  const auto value = text::parse_int(token);
  if (!value || *value < std::numeric_limits<Int>::min() ||
      *value > std::numeric_limits<Int>::max()) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + std::string(token) +
                      "'");
  }
  return static_cast<Int>(*value);
}

std::uint64_t parse_uint_or_throw(std::string_view token, const std::string& key) {
  const auto value = text::parse_uint(token);
  if (!value) throw ConfigError("config: key '" + key + "' expects a non-negative integer, got '" +
                                std::string(token) + "'");
  return *value;
}

void validate_config(const ExperimentConfig& config) {
  if (config.roster.empty()) throw ConfigError("config: empty algorithm roster");
  std::set<Variant> seen;
  for (Variant v : config.roster) {
    if (!seen.insert(v).second) {
      throw ConfigError(std::string("config: duplicate algorithm '") + variant_name(v) +
                        "' in roster");
    }
  }
  if (!(config.input_fraction > 0 && config.input_fraction < 1)) {
    throw ConfigError("config: input_fraction must lie in (0, 1)");
  }
  if (!(config.metrics.epsilon > 0)) throw ConfigError("config: epsilon must be positive");
  if (config.sample_size < 0) throw ConfigError("config: sample_size must be non-negative");
}

}  // namespace

std::string render_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "# popaudit experiment configuration (all keys, current values)\n";
  out << "interactions = " << config.interactions_path.string() << "\n";
  out << "users = " << config.users_path.string() << "\n";
  out << "output_dir = " << config.output_dir.string() << "\n";
  out << "seed = " << config.seed << "\n";
  out << "sample_size = " << config.sample_size << "\n";
  out << "input_fraction = " << text::format_real(config.input_fraction) << "\n";
  out << "exclude_input_items = " << bool_token(config.exclude_input_items) << "\n";
  out << "epsilon = " << text::format_real(config.metrics.epsilon) << "\n";
  out << "history_side = "
      << (config.metrics.history_full_profile ? "full_profile" : "fold_in_input") << "\n";
  out << "algorithms = " << join_names(config.roster) << "\n";
  out << "\n[filters]\n";
  out << "min_play_count = " << config.filters.min_play_count << "\n";
  out << "min_users_per_item = " << config.filters.min_users_per_item << "\n";
  out << "min_items_per_user = " << config.filters.min_items_per_user << "\n";
  out << "window_start = "
      << (config.filters.window_start ? std::to_string(*config.filters.window_start) : "")
      << "\n";
  out << "window_end = "
      << (config.filters.window_end ? std::to_string(*config.filters.window_end) : "") << "\n";
  out << "core_fixpoint = " << bool_token(config.filters.core_fixpoint) << "\n";
  out << "\n[itemknn]\n";
  out << "neighbors = " << config.params.itemknn.neighbors << "\n";
  out << "shrinkage = " << text::format_real(config.params.itemknn.shrinkage) << "\n";
  out << "\n[slim]\n";
  out << "l1 = " << text::format_real(config.params.slim.l1) << "\n";
  out << "l2 = " << text::format_real(config.params.slim.l2) << "\n";
  out << "max_sweeps = " << config.params.slim.max_sweeps << "\n";
  out << "tolerance = " << text::format_real(config.params.slim.tolerance) << "\n";
  out << "\n[als]\n";
  out << "factors = " << config.params.als.factors << "\n";
  out << "regularization = " << text::format_real(config.params.als.regularization) << "\n";
  out << "alpha = " << text::format_real(config.params.als.alpha) << "\n";
  out << "iterations = " << config.params.als.iterations << "\n";
  out << "\n[bpr]\n";
  out << "factors = " << config.params.bpr.factors << "\n";
  out << "learning_rate = " << text::format_real(config.params.bpr.learning_rate) << "\n";
  out << "regularization = " << text::format_real(config.params.bpr.regularization) << "\n";
  out << "epochs = " << config.params.bpr.epochs << "\n";
  return std::move(out).str();
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig config;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = text::trim(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = text::trim(body.substr(0, hash));
    }
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = std::string(text::trim(body.substr(1, body.size() - 2)));
      if (section != "filters" && section != "itemknn" && section != "slim" &&
          section != "als" && section != "bpr") {
        throw ConfigError("config: unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string_view value = text::trim(body.substr(eq + 1));
    const std::string qualified = section.empty() ? key : section + "." + key;

    if (section.empty()) {
      if (key == "interactions") {
        config.interactions_path = std::string(value);
      } else if (key == "users") {
        config.users_path = std::string(value);
      } else if (key == "output_dir") {
        config.output_dir = std::string(value);
      } else if (key == "seed") {
        config.seed = parse_uint_or_throw(value, qualified);
      } else if (key == "sample_size") {
        config.sample_size = parse_int_or_throw<std::int32_t>(value, qualified);
      } else if (key == "input_fraction") {
        config.input_fraction = parse_real_or_throw(value, qualified);
      } else if (key == "exclude_input_items") {
        config.exclude_input_items = parse_bool(value, qualified);
      } else if (key == "epsilon") {
        config.metrics.epsilon = parse_real_or_throw(value, qualified);
      } else if (key == "history_side") {
        if (value == "full_profile") {
          config.metrics.history_full_profile = true;
        } else if (value == "fold_in_input") {
          config.metrics.history_full_profile = false;
        } else {
          throw ConfigError("config: history_side must be full_profile or fold_in_input");
        }
      } else if (key == "algorithms") {
        config.roster.clear();
        for (std::string_view name : text::split(value, ',')) {
          config.roster.push_back(variant_from_name(text::trim(name)));
        }
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    } else if (section == "filters") {
      if (key == "min_play_count") {
        config.filters.min_play_count = parse_uint_or_throw(value, qualified);
      } else if (key == "min_users_per_item") {
        config.filters.min_users_per_item =
            static_cast<std::size_t>(parse_uint_or_throw(value, qualified));
      } else if (key == "min_items_per_user") {
        config.filters.min_items_per_user =
            static_cast<std::size_t>(parse_uint_or_throw(value, qualified));
      } else if (key == "window_start") {
        config.filters.window_start =
            value.empty() ? std::nullopt
                          : std::optional(parse_int_or_throw<std::int64_t>(value, qualified));
      } else if (key == "window_end") {
        config.filters.window_end =
            value.empty() ? std::nullopt
                          : std::optional(parse_int_or_throw<std::int64_t>(value, qualified));
      } else if (key == "core_fixpoint") {
        config.filters.core_fixpoint = parse_bool(value, qualified);
      } else {
        throw ConfigError("config: unknown key '" + qualified + "'");
      }
    } else if (section == "itemknn") {
      if (key == "neighbors") {
        config.params.itemknn.neighbors = parse_int_or_throw<std::int32_t>(value, qualified);
      } else if (key == "shrinkage") {
        config.params.itemknn.shrinkage = parse_real_or_throw(value, qualified);
      } else {
        throw ConfigError("config: unknown key '" + qualified + "'");
      }
    } else if (section == "slim") {
      if (key == "l1") {
        config.params.slim.l1 = parse_real_or_throw(value, qualified);
      } else if (key == "l2") {
        config.params.slim.l2 = parse_real_or_throw(value, qualified);
      } else if (key == "max_sweeps") {
        config.params.slim.max_sweeps = parse_int_or_throw<std::int32_t>(value, qualified);
      } else if (key == "tolerance") {
        config.params.slim.tolerance = parse_real_or_throw(value, qualified);
      } else {
        throw ConfigError("config: unknown key '" + qualified + "'");
      }
    } else if (section == "als") {
      if (key == "factors") {
        config.params.als.factors = parse_int_or_throw<std::int32_t>(value, qualified);
      } else if (key == "regularization") {
        config.params.als.regularization = parse_real_or_throw(value, qualified);
      } else if (key == "alpha") {
        config.params.als.alpha = parse_real_or_throw(value, qualified);
      } else if (key == "iterations") {
        config.params.als.iterations = parse_int_or_throw<std::int32_t>(value, qualified);
      } else {
        throw ConfigError("config: unknown key '" + qualified + "'");
      }
    } else {  // bpr
      if (key == "factors") {
        config.params.bpr.factors = parse_int_or_throw<std::int32_t>(value, qualified);
      } else if (key == "learning_rate") {
        config.params.bpr.learning_rate = parse_real_or_throw(value, qualified);
      } else if (key == "regularization") {
        config.params.bpr.regularization = parse_real_or_throw(value, qualified);
      } else if (key == "epochs") {
        config.params.bpr.epochs = parse_int_or_throw<std::int32_t>(value, qualified);
      } else {
        throw ConfigError("config: unknown key '" + qualified + "'");
      }
    }
  }
  validate_config(config);
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_experiment_config(in);
}

FoldOutcome run_fold(int fold, const Dataset& dataset, const SplitPlan& plan,
                     const PopularityIndex& popularity, const DecileBins& bins,
                     const ExperimentConfig& config) {
  if (fold < 0 || fold >= SplitPlan::kFolds) throw ConfigError("run_fold: fold out of range");
  validate_config(config);

  std::vector<UserIndex> train_users;
  std::vector<UserIndex> test_users;
  for (UserIndex u = 0; u < dataset.n_users(); ++u) {
    switch (plan.role(fold, u)) {
      case Role::Train: train_users.push_back(u); break;
      case Role::Test: test_users.push_back(u); break;
      case Role::Validation: break;
    }
  }
  const TrainMatrix matrix = make_train_matrix(dataset, train_users);

  std::vector<Model> models;
  models.reserve(config.roster.size());
  for (Variant variant : config.roster) {
    const std::uint64_t model_seed =
        rng::mix(config.seed, 0x7121a100u, static_cast<std::uint64_t>(fold),
                 static_cast<std::uint64_t>(variant));
    models.push_back(train(variant, matrix, config.params, model_seed));
  }

  FoldOutcome outcome;
  outcome.n_test_users = static_cast<std::int32_t>(test_users.size());

  const std::size_t n_items = static_cast<std::size_t>(dataset.n_items());
  std::vector<std::uint8_t> mask(n_items, 0);

  for (UserIndex u : test_users) {
    const std::span<const ItemIndex> holdout = plan.holdout_of(fold, u);
    std::vector<ItemIndex> input;
    {
      const auto owned = dataset.items_of(u);
      input.reserve(owned.size() - holdout.size());
      std::size_t h = 0;
      for (const ItemPlay& ip : owned) {
        if (h < holdout.size() && holdout[h] == ip.item) {
          ++h;
        } else {
          input.push_back(ip.item);
        }
      }
    }

    std::vector<ItemIndex> hist_items;
    if (config.metrics.history_full_profile) {
      for (const ItemPlay& ip : dataset.items_of(u)) hist_items.push_back(ip.item);
    } else {
      hist_items = input;
    }

    const PopularityDistribution h_dist = distribution_from_items(hist_items, popularity);
    const BinnedCounts h_binned = bin_distribution(h_dist, bins);
    const MomentSummary<Real> h_moments =
        moment_summary(std::span<const Real>(h_dist.values));
    const std::int32_t n =
        std::max<std::int32_t>(10, static_cast<std::int32_t>(hist_items.size()));

    std::int64_t available = static_cast<std::int64_t>(n_items);
    if (config.exclude_input_items) {
      for (ItemIndex i : input) mask[static_cast<std::size_t>(i)] = 1;
      available -= static_cast<std::int64_t>(input.size());
    }

    for (std::size_t v = 0; v < config.roster.size(); ++v) {
      const Model& model = models[v];
      try {
        if (n > available) throw DataError("no recommendable items");
        const UserEmbedding emb = fold_in(model, input);
        const std::vector<ItemIndex> rec = recommend(model, emb, n, mask);
        for (ItemIndex i : rec) {
          if (mask[static_cast<std::size_t>(i)]) {
            throw ExperimentError("excluded item in recommendation list");
          }
        }

        PerUserBiasRecord record;
        record.user = dataset.user_id(u);
        record.gender = dataset.gender(u);
        record.algorithm = variant_name(config.roster[v]);
        record.fold = fold;

        const PopularityDistribution r_dist =
            recommendation_distribution(rec, hist_items.size(), popularity);
        const MomentSummary<Real> r_moments =
            moment_summary(std::span<const Real>(r_dist.values));
        record.bias[kMetricPctMean] = percent_delta(h_moments.mean, r_moments.mean);
        record.bias[kMetricPctMedian] = percent_delta(h_moments.median, r_moments.median);
        record.bias[kMetricPctVariance] = percent_delta(h_moments.variance, r_moments.variance);
        record.bias[kMetricPctSkew] = percent_delta(h_moments.skewness, r_moments.skewness);
        record.bias[kMetricPctKurtosis] = percent_delta(h_moments.kurtosis, r_moments.kurtosis);

        const BinnedCounts r_binned = bin_distribution(r_dist, bins);
        record.bias[kMetricKl] =
            kl_divergence(h_binned.counts, r_binned.counts, config.metrics.epsilon);
        record.bias[kMetricKendallTau] = kendall_tau_binned(h_binned.counts, r_binned.counts);
        record.ndcg = ndcg_at_k(rec, holdout, 10);
        outcome.records.push_back(std::move(record));
      } catch (const std::exception& error) {
        outcome.failures.push_back(UserFailure{variant_name(config.roster[v]),
                                               dataset.user_id(u), fold, error.what()});
      }
    }

    if (config.exclude_input_items) {
      for (ItemIndex i : input) mask[static_cast<std::size_t>(i)] = 0;
    }
  }
  return outcome;
}

namespace {

std::string config_hash_hex(const std::string& canonical) {
  const std::uint64_t h = rng::fnv1a64(std::string_view(canonical));
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[static_cast<std::size_t>(15 - i)] = digits[(h >> (4 * i)) & 0xf];
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::vector<Interaction>& interactions,
                                const std::vector<UserRecord>& users) {
  const auto start = std::chrono::steady_clock::now();
  validate_config(config);

  ExperimentResult result;
  Dataset dataset = apply_filters(interactions, users, config.filters, &result.filter_report);
  if (config.sample_size > 0) {
    dataset = sample_items(dataset, config.sample_size, config.seed);
    result.filter_report.emplace_back(
        "item_sample",
        StageCounts{static_cast<std::size_t>(dataset.n_users()),
                    static_cast<std::size_t>(dataset.n_items()), dataset.n_interactions()});
  }
  result.final_counts =
      StageCounts{static_cast<std::size_t>(dataset.n_users()),
                  static_cast<std::size_t>(dataset.n_items()), dataset.n_interactions()};

  const PopularityIndex popularity = compute_popularity(dataset);
  const DecileBins bins = build_decile_bins(popularity);
  const SplitPlan plan = make_split_plan(dataset, config.seed, config.input_fraction);

  std::vector<std::string> invalid_folds;
  for (int fold = 0; fold < SplitPlan::kFolds; ++fold) {
    FoldOutcome outcome = run_fold(fold, dataset, plan, popularity, bins, config);
    for (Variant variant : config.roster) {
      const char* name = variant_name(variant);
      const auto failed = std::count_if(
          outcome.failures.begin(), outcome.failures.end(),
          [&](const UserFailure& f) { return f.algorithm == name; });
      if (failed * 20 > outcome.n_test_users) {
        invalid_folds.push_back("fold " + std::to_string(fold) + ", " + name + ": " +
                                std::to_string(failed) + " of " +
                                std::to_string(outcome.n_test_users) + " test users failed");
      }
    }
    result.records.insert(result.records.end(),
                          std::make_move_iterator(outcome.records.begin()),
                          std::make_move_iterator(outcome.records.end()));
    result.failures.insert(result.failures.end(),
                           std::make_move_iterator(outcome.failures.begin()),
                           std::make_move_iterator(outcome.failures.end()));
  }
  if (!invalid_folds.empty()) {
    std::string message = "experiment invalid, per-user failure rate above 5%:";
    for (const std::string& entry : invalid_folds) message += "\n  " + entry;
    throw ExperimentError(message);
  }

  result.report = build_report(result.records);

  const std::string canonical = render_config(config);
  nlohmann::ordered_json provenance;
  provenance["tool"] = "popaudit";
  provenance["version"] = kPopauditVersion;
  provenance["config_hash"] = config_hash_hex(canonical);
  provenance["config"] = canonical;
  provenance["seed"] = config.seed;
  provenance["folds"] = SplitPlan::kFolds;
  provenance["aggregation"] = "pooled per-user records, one global median (mean for NDCG)";
  provenance["history_side"] =
      config.metrics.history_full_profile ? "full_profile" : "fold_in_input";
  provenance["filter_report"] = nlohmann::ordered_json::parse(
      filter_report_json(result.filter_report));
  provenance["dataset"] = {{"users", result.final_counts.users},
                           {"items", result.final_counts.items},
                           {"interactions", result.final_counts.interactions}};
  nlohmann::ordered_json failure_list = nlohmann::ordered_json::array();
  for (const UserFailure& f : result.failures) {
    failure_list.push_back({{"algorithm", f.algorithm},
                            {"user", f.user},
                            {"fold", f.fold},
                            {"reason", f.reason}});
  }
  provenance["failures"] = failure_list;
  provenance["environment"] = {{"compiler", __VERSION__},
                               {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                             std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                             std::to_string(EIGEN_MINOR_VERSION)}};
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
  provenance["wall_clock_seconds"] = elapsed.count();
  result.provenance_json = provenance.dump(2) + "\n";

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    write_text_file(config.output_dir / "report.tsv", render_report_tsv(result.report));
    write_text_file(config.output_dir / "report.json", render_report_json(result.report));
    std::ostringstream per_user;
    write_per_user_tsv(result.records, per_user);
    write_text_file(config.output_dir / "per_user.tsv", std::move(per_user).str());
    write_text_file(config.output_dir / "provenance.json", result.provenance_json);
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  std::ifstream interactions_in(config.interactions_path);
  if (!interactions_in) {
    throw DataError("cannot open interactions file " + config.interactions_path.string());
  }
  std::ifstream users_in(config.users_path);
  if (!users_in) throw DataError("cannot open users file " + config.users_path.string());
  ParseStats interaction_stats, user_stats;
  const auto interactions = parse_interactions(interactions_in, interaction_stats);
  const auto users = parse_users(users_in, user_stats);
  return run_experiment(config, interactions, users);
}

Real evaluate_on_validation(const Dataset& dataset, const SplitPlan& plan, Variant variant,
                            const Hyperparameters& params, const ExperimentConfig& config) {
  Real sum = 0;
  std::int64_t count = 0;
  const std::size_t n_items = static_cast<std::size_t>(dataset.n_items());
  std::vector<std::uint8_t> mask(n_items, 0);

  for (int fold = 0; fold < SplitPlan::kFolds; ++fold) {
    std::vector<UserIndex> train_users;
    std::vector<UserIndex> validation_users;
    for (UserIndex u = 0; u < dataset.n_users(); ++u) {
      switch (plan.role(fold, u)) {
        case Role::Train: train_users.push_back(u); break;
        case Role::Validation: validation_users.push_back(u); break;
        case Role::Test: break;
      }
    }
    const TrainMatrix matrix = make_train_matrix(dataset, train_users);
    const std::uint64_t model_seed =
        rng::mix(config.seed, 0x7121a100u, static_cast<std::uint64_t>(fold),
                 static_cast<std::uint64_t>(variant));
    const Model model = train(variant, matrix, params, model_seed);

    for (UserIndex u : validation_users) {
      const std::span<const ItemIndex> holdout = plan.holdout_of(fold, u);
      std::vector<ItemIndex> input;
      {
        const auto owned = dataset.items_of(u);
        std::size_t h = 0;
        for (const ItemPlay& ip : owned) {
          if (h < holdout.size() && holdout[h] == ip.item) {
            ++h;
          } else {
            input.push_back(ip.item);
          }
        }
      }
      std::int64_t available = static_cast<std::int64_t>(n_items);
      if (config.exclude_input_items) {
        for (ItemIndex i : input) mask[static_cast<std::size_t>(i)] = 1;
        available -= static_cast<std::int64_t>(input.size());
      }
      try {
        if (available < 10) throw DataError("no recommendable items");
        const UserEmbedding emb = fold_in(model, input);
        const std::vector<ItemIndex> rec = recommend(model, emb, 10, mask);
        sum += ndcg_at_k(rec, holdout, 10);
        ++count;
      } catch (const std::exception&) {
        // skipped user; the sweep only compares settings on scorable users
      }
      if (config.exclude_input_items) {
        for (ItemIndex i : input) mask[static_cast<std::size_t>(i)] = 0;
      }
    }
  }
  if (count == 0) throw ExperimentError("validation sweep: no user produced a score");
  return sum / static_cast<Real>(count);
}

std::size_t grid_search(const Dataset& dataset, const SplitPlan& plan, Variant variant,
                        std::span<const Hyperparameters> grid, const ExperimentConfig& config) {
  if (grid.empty()) throw ConfigError("grid_search: empty grid");
  std::size_t best = 0;
  Real best_score = -1;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Real score = evaluate_on_validation(dataset, plan, variant, grid[g], config);
    if (score > best_score) {
      best_score = score;
      best = g;
    }
  }
  return best;
}

}  // namespace popaudit
