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

#include "popaudit/metrics.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "popaudit/text.hpp"

namespace popaudit {

std::vector<Real> normalize_counts(std::span<const std::int32_t> counts, Real epsilon) {
  if (counts.empty()) throw DataError("normalize_counts: empty count vector");
  if (epsilon < 0) throw DataError("normalize_counts: negative epsilon");
  std::int64_t total = 0;
  for (std::int32_t c : counts) {
    if (c < 0) throw DataError("normalize_counts: negative count");
    total += c;
  }
  const Real denom = static_cast<Real>(total) + epsilon * static_cast<Real>(counts.size());
  if (denom <= 0) throw DataError("normalize_counts: zero mass and zero epsilon");
  std::vector<Real> out(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    out[j] = (static_cast<Real>(counts[j]) + epsilon) / denom;
  }
  return out;
}

Real kl_divergence(std::span<const std::int32_t> history_counts,
                   std::span<const std::int32_t> rec_counts, Real epsilon) {
  if (history_counts.size() != rec_counts.size()) {
    throw DataError("kl_divergence: bin count mismatch");
  }
  const std::vector<Real> h = normalize_counts(history_counts, epsilon);
  const std::vector<Real> r = normalize_counts(rec_counts, epsilon);
  Real sum = 0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j] == 0) continue;
    if (r[j] == 0) return std::numeric_limits<Real>::infinity();
    sum += h[j] * std::log(h[j] / r[j]);
  }
  return sum;
}

std::optional<Real> kendall_tau_binned(std::span<const std::int32_t> history_counts,
                                       std::span<const std::int32_t> rec_counts) {
  if (history_counts.size() != rec_counts.size()) {
    throw DataError("kendall_tau_binned: bin count mismatch");
  }
  std::int64_t concordant = 0, discordant = 0;
  for (std::size_t j = 0; j + 1 < history_counts.size(); ++j) {
    for (std::size_t k = j + 1; k < history_counts.size(); ++k) {
      const std::int64_t dh = history_counts[j] - history_counts[k];
      const std::int64_t dr = rec_counts[j] - rec_counts[k];
      if (dh == 0 || dr == 0) continue;
      if ((dh > 0) == (dr > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  if (concordant + discordant == 0) return std::nullopt;
  return static_cast<Real>(concordant - discordant) / static_cast<Real>(concordant + discordant);
}

Real ndcg_at_k(std::span<const ItemIndex> ranked, std::span<const ItemIndex> holdout_sorted,
               int k) {
  if (holdout_sorted.empty()) throw DataError("ndcg_at_k: empty holdout");
  if (k <= 0) throw DataError("ndcg_at_k: non-positive cutoff");
  const std::size_t depth = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
  Real dcg = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (std::binary_search(holdout_sorted.begin(), holdout_sorted.end(), ranked[i])) {
      dcg += Real(1) / std::log2(static_cast<Real>(i) + 2);
    }
  }
  const std::size_t ideal =
      std::min<std::size_t>(holdout_sorted.size(), static_cast<std::size_t>(k));
  Real idcg = 0;
  for (std::size_t i = 0; i < ideal; ++i) {
    idcg += Real(1) / std::log2(static_cast<Real>(i) + 2);
  }
  return dcg / idcg;
}

Real snap_aggregate(Real value) {
  if (!std::isfinite(value) || std::abs(value) > 0x1.0p32) {
    throw ExperimentError("aggregate value " + text::format_real(value) +
                          " outside the reportable range");
  }
  const Real snapped = std::nearbyint(value / kAggregateGrid) * kAggregateGrid;
  return snapped == 0 ? Real(0) : snapped;
}

AggregateRow aggregate(std::span<const PerUserBiasRecord> records) {
  if (records.empty()) throw DataError("aggregate: empty user group");
  AggregateRow row;
  row.n_users = static_cast<std::int32_t>(records.size());
  for (int m = 0; m < 7; ++m) {
    std::vector<Real> defined;
    defined.reserve(records.size());
    for (const auto& rec : records) {
      if (rec.bias[static_cast<std::size_t>(m)]) {
        defined.push_back(*rec.bias[static_cast<std::size_t>(m)]);
      }
    }
    row.excluded[static_cast<std::size_t>(m)] =
        static_cast<std::int32_t>(records.size() - defined.size());
    if (!defined.empty()) {
      row.bias[static_cast<std::size_t>(m)] = snap_aggregate(median_of(std::move(defined)));
    }
  }
  Real sum = 0;
  for (const auto& rec : records) sum += rec.ndcg;
  row.ndcg = snap_aggregate(sum / static_cast<Real>(records.size()));
  return row;
}

Real exact_delta(Real all_value, Real group_value) {
  Real d = group_value - all_value;
  for (int step = 0; step < 64; ++step) {
    const Real sum = all_value + d;
    if (sum == group_value) return d;
    d = std::nextafter(d, sum < group_value ? std::numeric_limits<Real>::infinity()
                                            : -std::numeric_limits<Real>::infinity());
  }
  throw ExperimentError("exact_delta: no representable delta from " +
                        text::format_real(all_value) + " to " + text::format_real(group_value));
}

namespace {

std::array<std::optional<Real>, 7> delta_bias(const AggregateRow& all, const AggregateRow& group) {
  std::array<std::optional<Real>, 7> out;
  for (std::size_t m = 0; m < 7; ++m) {
    if (all.bias[m] && group.bias[m]) out[m] = exact_delta(*all.bias[m], *group.bias[m]);
  }
  return out;
}

constexpr const char* kPerUserHeader =
    "user_id\tgender\talgorithm\tfold\tpct_mean\tpct_median\tpct_variance\tpct_skew\t"
    "pct_kurtosis\tkl\tkendall_tau\tndcg_at_10\tundefined";

void append_row_values(std::string& out, const std::array<std::optional<Real>, 7>& bias,
                       Real ndcg) {
  for (const auto& v : bias) {
    out += '\t';
    out += v ? text::format_real(*v) : "nan";
  }
  out += '\t';
  out += text::format_real(ndcg);
}

}  // namespace

BiasReport build_report(std::vector<PerUserBiasRecord> records) {
  if (records.empty()) throw DataError("build_report: no per-user records");
  std::vector<std::string> roster;
  std::map<std::string, std::size_t> rank;
  for (const auto& rec : records) {
    if (rank.emplace(rec.algorithm, roster.size()).second) roster.push_back(rec.algorithm);
  }
  std::stable_sort(records.begin(), records.end(),
                   [&](const PerUserBiasRecord& a, const PerUserBiasRecord& b) {
                     const std::size_t ra = rank.at(a.algorithm), rb = rank.at(b.algorithm);
                     if (ra != rb) return ra < rb;
                     return a.user < b.user;
                   });
  BiasReport report;
  std::size_t begin = 0;
  while (begin < records.size()) {
    std::size_t end = begin;
    while (end < records.size() && records[end].algorithm == records[begin].algorithm) ++end;
    std::span<const PerUserBiasRecord> block(records.data() + begin, end - begin);
    std::vector<PerUserBiasRecord> female, male;
    for (const auto& rec : block) {
      if (rec.gender == Gender::Female) female.push_back(rec);
      if (rec.gender == Gender::Male) male.push_back(rec);
    }
    if (female.empty() || male.empty()) {
      throw DataError("build_report: empty gender group for algorithm " +
                      records[begin].algorithm);
    }
    AlgorithmReport alg;
    alg.algorithm = records[begin].algorithm;
    alg.all = aggregate(block);
    alg.female = aggregate(female);
    alg.male = aggregate(male);
    alg.delta_female_bias = delta_bias(alg.all, alg.female);
    alg.delta_male_bias = delta_bias(alg.all, alg.male);
    alg.delta_female_ndcg = exact_delta(alg.all.ndcg, alg.female.ndcg);
    alg.delta_male_ndcg = exact_delta(alg.all.ndcg, alg.male.ndcg);
    report.algorithms.push_back(std::move(alg));
    begin = end;
  }
  return report;
}

void write_per_user_tsv(std::span<const PerUserBiasRecord> records, std::ostream& out) {
  std::string buf(kPerUserHeader);
  buf += '\n';
  for (const auto& rec : records) {
    buf += rec.user;
    buf += '\t';
    buf += gender_token(rec.gender);
    buf += '\t';
    buf += rec.algorithm;
    buf += '\t';
    buf += std::to_string(rec.fold);
    append_row_values(buf, rec.bias, rec.ndcg);
    buf += '\t';
    for (const auto& v : rec.bias) buf += v ? '0' : '1';
    buf += '\n';
  }
  out << buf;
}

std::vector<PerUserBiasRecord> parse_per_user_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != kPerUserHeader) {
    throw DataError("per-user dump: missing or unexpected header line");
  }
  std::vector<PerUserBiasRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = text::split(text::trim(line), '\t');
    if (fields.size() != 13) {
      throw DataError("per-user dump: bad column count at line " + std::to_string(line_no));
    }
    PerUserBiasRecord rec;
    rec.user = std::string(fields[0]);
    if (fields[1] == "f") {
      rec.gender = Gender::Female;
    } else if (fields[1] == "m") {
      rec.gender = Gender::Male;
    } else if (fields[1] == "u") {
      rec.gender = Gender::Unknown;
    } else {
      throw DataError("per-user dump: bad gender at line " + std::to_string(line_no));
    }
    rec.algorithm = std::string(fields[2]);
    const auto fold = text::parse_int(fields[3]);
    const auto flags = fields[12];
    if (!fold || flags.size() != 7) {
      throw DataError("per-user dump: bad fold or flags at line " + std::to_string(line_no));
    }
    rec.fold = static_cast<std::int32_t>(*fold);
    for (std::size_t m = 0; m < 7; ++m) {
      if (flags[m] == '0') {
        const auto v = text::parse_real(fields[4 + m]);
        if (!v) throw DataError("per-user dump: bad value at line " + std::to_string(line_no));
        rec.bias[m] = *v;
      } else if (flags[m] != '1') {
        throw DataError("per-user dump: bad flag at line " + std::to_string(line_no));
      }
    }
    const auto ndcg = text::parse_real(fields[11]);
    if (!ndcg) throw DataError("per-user dump: bad ndcg at line " + std::to_string(line_no));
    rec.ndcg = *ndcg;
    records.push_back(std::move(rec));
  }
  return records;
}

std::string render_report_tsv(const BiasReport& report) {
  std::string out =
      "algorithm\tgroup\tpct_mean\tpct_median\tpct_variance\tpct_skew\tpct_kurtosis\tkl\t"
      "kendall_tau\tndcg_at_10\tn_users\texcl_pct_mean\texcl_pct_median\texcl_pct_variance\t"
      "excl_pct_skew\texcl_pct_kurtosis\texcl_kl\texcl_kendall_tau\n";
  auto append = [&out](const std::string& alg, const char* group,
                       const std::array<std::optional<Real>, 7>& bias, Real ndcg,
                       const AggregateRow& counts) {
    out += alg;
    out += '\t';
    out += group;
    append_row_values(out, bias, ndcg);
    out += '\t';
    out += std::to_string(counts.n_users);
    for (std::int32_t c : counts.excluded) {
      out += '\t';
      out += std::to_string(c);
    }
    out += '\n';
  };
  for (const auto& alg : report.algorithms) {
    append(alg.algorithm, "all", alg.all.bias, alg.all.ndcg, alg.all);
    append(alg.algorithm, "delta_female", alg.delta_female_bias, alg.delta_female_ndcg,
           alg.female);
    append(alg.algorithm, "delta_male", alg.delta_male_bias, alg.delta_male_ndcg, alg.male);
  }
  return out;
}

std::string render_report_json(const BiasReport& report) {
  using json = nlohmann::ordered_json;
  auto row_json = [](const std::array<std::optional<Real>, 7>& bias, Real ndcg,
                     const AggregateRow& counts) {
    json row;
    for (std::size_t m = 0; m < 7; ++m) {
      if (bias[m]) {
        row[kBiasMetricNames[m]] = *bias[m];
      } else {
        row[kBiasMetricNames[m]] = nullptr;
      }
    }
    row["ndcg_at_10"] = ndcg;
    row["n_users"] = counts.n_users;
    json excluded;
    for (std::size_t m = 0; m < 7; ++m) {
      excluded[kBiasMetricNames[m]] = counts.excluded[m];
    }
    row["excluded"] = std::move(excluded);
    return row;
  };
  json doc;
  doc["algorithms"] = json::array();
  for (const auto& alg : report.algorithms) {
    json block;
    block["name"] = alg.algorithm;
    block["all"] = row_json(alg.all.bias, alg.all.ndcg, alg.all);
    block["delta_female"] = row_json(alg.delta_female_bias, alg.delta_female_ndcg, alg.female);
    block["delta_male"] = row_json(alg.delta_male_bias, alg.delta_male_ndcg, alg.male);
    doc["algorithms"].push_back(std::move(block));
  }
  return doc.dump(2) + "\n";
}

}  // namespace popaudit
