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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "popaudit/dataset.hpp"
#include "popaudit/harness.hpp"
#include "popaudit/metrics.hpp"
#include "popaudit/synth.hpp"
#include "popaudit/text.hpp"
#include "popaudit/types.hpp"

namespace {

using namespace popaudit;

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

void run_synth(const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
  const SyntheticData data = generate_synthetic(spec);
  std::filesystem::create_directories(out_dir);
  {
    std::ostringstream out;
    write_raw_interactions_tsv(data.interactions, out);
    write_file(out_dir / "interactions.tsv", std::move(out).str());
  }
  {
    std::ostringstream out;
    write_raw_users_tsv(data.users, out);
    write_file(out_dir / "users.tsv", std::move(out).str());
  }
  std::cout << "wrote " << data.interactions.size() << " interactions for " << data.users.size()
            << " users to " << out_dir.string() << "\n";
}

struct IngestArgs {
  std::filesystem::path interactions;
  std::filesystem::path users;
  std::filesystem::path output;
  FilterConfig filters;
};

void run_ingest(const IngestArgs& args) {
  std::ifstream interactions_in(args.interactions);
  if (!interactions_in) {
    throw DataError("cannot open interactions file " + args.interactions.string());
  }
  std::ifstream users_in(args.users);
  if (!users_in) throw DataError("cannot open users file " + args.users.string());

  ParseStats interaction_stats, user_stats;
  const auto interactions = parse_interactions(interactions_in, interaction_stats);
  const auto users = parse_users(users_in, user_stats);

  FilterReport report;
  const Dataset dataset = apply_filters(interactions, users, args.filters, &report);

  std::filesystem::create_directories(args.output);
  {
    std::ostringstream out;
    write_interactions_tsv(dataset, out);
    write_file(args.output / "interactions.tsv", std::move(out).str());
  }
  {
    std::ostringstream out;
    write_users_tsv(dataset, out);
    write_file(args.output / "users.tsv", std::move(out).str());
  }
  write_file(args.output / "filter_report.json", filter_report_json(report));

  for (const auto& [stage, counts] : report) {
    std::cout << stage << ": " << counts.users << " users, " << counts.items << " items, "
              << counts.interactions << " interactions\n";
  }
}

struct AuditArgs {
  std::string config_path;
  std::string interactions;
  std::string users;
  std::string output;
  std::uint64_t seed = 0;
  std::int32_t sample_size = 0;
  std::string algorithms;
  bool dump_config = false;
};

void run_audit(const AuditArgs& args, const CLI::App* cmd) {
  ExperimentConfig config;
  if (!args.config_path.empty()) config = load_experiment_config(args.config_path);
  if (cmd->count("--interactions") > 0) config.interactions_path = args.interactions;
  if (cmd->count("--users") > 0) config.users_path = args.users;
  if (cmd->count("--output") > 0) config.output_dir = args.output;
  if (cmd->count("--seed") > 0) config.seed = args.seed;
  if (cmd->count("--sample-size") > 0) config.sample_size = args.sample_size;
  if (cmd->count("--algorithms") > 0) {
    config.roster.clear();
    for (std::string_view name : text::split(args.algorithms, ',')) {
      config.roster.push_back(variant_from_name(text::trim(name)));
    }
  }
  if (args.dump_config) {
    std::cout << render_config(config);
    return;
  }
  if (config.interactions_path.empty() || config.users_path.empty()) {
    throw ConfigError("audit needs --interactions and --users (or a config file)");
  }
  if (config.output_dir.empty()) throw ConfigError("audit needs --output (or a config file)");

  const ExperimentResult result = run_experiment(config);
  std::cout << "audited " << result.final_counts.users << " users, " << result.final_counts.items
            << " items over " << result.report.algorithms.size() << " algorithms; "
            << result.failures.size() << " per-user failures\n";
  std::cout << "outputs in " << config.output_dir.string() << "\n";
}

struct ReportArgs {
  std::filesystem::path per_user;
  std::filesystem::path output;
  std::string format = "tsv";
};

void run_report(const ReportArgs& args) {
  std::ifstream in(args.per_user);
  if (!in) throw DataError("cannot open per-user dump " + args.per_user.string());
  const auto records = parse_per_user_tsv(in);
  const BiasReport report = build_report(records);
  std::filesystem::create_directories(args.output);
  if (args.format == "tsv") {
    write_file(args.output / "report.tsv", render_report_tsv(report));
  } else {
    write_file(args.output / "report.json", render_report_json(report));
  }
  std::cout << "report." << args.format << " rebuilt from " << records.size()
            << " per-user records\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"popularity-bias audit toolkit for implicit-feedback recommenders"};
  app.require_subcommand(1);

  SyntheticSpec spec;
  std::string synth_output;
  CLI::App* synth = app.add_subcommand("synth", "generate a long-tail synthetic dataset");
  synth->add_option("--output", synth_output, "output directory")->required();
  synth->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
  synth->add_option("--users", spec.n_users, "number of users (>= 10)")->capture_default_str();
  synth->add_option("--items", spec.n_items, "number of items (>= 10)")->capture_default_str();
  synth->add_option("--exponent", spec.exponent, "popularity power-law exponent (>= 0)")
      ->capture_default_str();
  synth->add_option("--mean-history", spec.mean_history, "mean history length (>= 5)")
      ->capture_default_str();
  synth->add_option("--spread", spec.spread, "mainstreaminess spread in [0,1]")
      ->capture_default_str();
  synth->add_option("--gender-ratio", spec.gender_ratio, "fraction of users assigned f")
      ->capture_default_str();
  synth->add_option("--play-p", spec.play_p, "success probability of the play-count geometric")
      ->capture_default_str();
  synth->add_flag("--genres,!--no-genres", spec.genre_affinity,
                  "restrict popularity draws to per-user preferred genres")
      ->capture_default_str();
  synth->add_option("--n-genres", spec.n_genres, "number of genres (rank mod n_genres)")
      ->capture_default_str();
  synth->add_option("--genres-per-user", spec.genres_per_user, "preferred genres per user")
      ->capture_default_str();

  IngestArgs ingest_args;
  CLI::App* ingest = app.add_subcommand("ingest", "filter a raw dataset and report the cascade");
  ingest->add_option("--interactions", ingest_args.interactions, "raw interactions TSV")
      ->required();
  ingest->add_option("--users", ingest_args.users, "raw users TSV")->required();
  ingest->add_option("--output", ingest_args.output, "output directory")->required();
  ingest->add_option("--min-play-count", ingest_args.filters.min_play_count,
                     "keep records with play_count >= this")
      ->capture_default_str();
  ingest->add_option("--min-users-per-item", ingest_args.filters.min_users_per_item,
                     "item-core threshold")
      ->capture_default_str();
  ingest->add_option("--min-items-per-user", ingest_args.filters.min_items_per_user,
                     "user-core threshold")
      ->capture_default_str();
  std::int64_t window_start = 0, window_end = 0;
  ingest->add_option("--window-start", window_start, "keep timestamps >= this");
  ingest->add_option("--window-end", window_end, "keep timestamps <= this");
  ingest->add_flag("--core-fixpoint", ingest_args.filters.core_fixpoint,
                   "repeat the core filters until stable")
      ->capture_default_str();

  AuditArgs audit_args;
  CLI::App* audit = app.add_subcommand("audit", "run the full popularity-bias experiment");
  audit->add_option("--config", audit_args.config_path, "experiment config file");
  audit->add_option("--interactions", audit_args.interactions, "raw interactions TSV");
  audit->add_option("--users", audit_args.users, "raw users TSV");
  audit->add_option("--output", audit_args.output, "output directory");
  audit->add_option("--seed", audit_args.seed, "master seed")->capture_default_str();
  audit->add_option("--sample-size", audit_args.sample_size, "item sample size (0 = all)")
      ->capture_default_str();
  audit->add_option("--algorithms", audit_args.algorithms,
                    "comma list from rand,pop,itemknn,slim,als,bpr");
  audit->add_flag("--dump-config", audit_args.dump_config,
                  "print the effective configuration and exit");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "re-render a report from a per-user dump");
  report->add_option("--per-user", report_args.per_user, "per_user.tsv from an audit run")
      ->required();
  report->add_option("--output", report_args.output, "output directory")->required();
  report->add_option("--format", report_args.format, "report format")
      ->check(CLI::IsMember({"tsv", "json"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (ingest->count("--window-start") > 0) ingest_args.filters.window_start = window_start;
    if (ingest->count("--window-end") > 0) ingest_args.filters.window_end = window_end;

    if (synth->parsed()) {
      run_synth(spec, synth_output);
    } else if (ingest->parsed()) {
      run_ingest(ingest_args);
    } else if (audit->parsed()) {
      run_audit(audit_args, audit);
    } else if (report->parsed()) {
      run_report(report_args);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const ExperimentError& e) {
    std::cerr << "experiment error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
