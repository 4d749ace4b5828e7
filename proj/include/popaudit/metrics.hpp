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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "popaudit/types.hpp"

namespace popaudit {

// Population (biased) moments of a value multiset. Skewness is m3 / m2^1.5,
// kurtosis is excess kurtosis m4 / m2^2 - 3; both are undefined for a
// degenerate distribution (m2 == 0).
template <typename Scalar>
struct MomentSummary {
  Scalar mean{};
  Scalar median{};
  Scalar variance{};
  std::optional<Scalar> skewness;
  std::optional<Scalar> kurtosis;
};

template <typename Scalar>
Scalar median_of(std::vector<Scalar> values) {
  if (values.empty()) throw DataError("median of empty value set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / Scalar(2);
}

template <typename Scalar>
MomentSummary<Scalar> moment_summary(std::span<const Scalar> values) {
  if (values.empty()) throw DataError("moment summary of empty distribution");
  const Scalar n = static_cast<Scalar>(values.size());
  Scalar sum = 0;
  for (Scalar v : values) sum += v;
  const Scalar mean = sum / n;
  Scalar m2 = 0, m3 = 0, m4 = 0;
  for (Scalar v : values) {
    const Scalar d = v - mean;
    const Scalar d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  MomentSummary<Scalar> out;
  out.mean = mean;
  out.median = median_of(std::vector<Scalar>(values.begin(), values.end()));
  out.variance = m2;
  if (m2 > Scalar(0)) {
    out.skewness = m3 / (m2 * std::sqrt(m2));
    out.kurtosis = m4 / (m2 * m2) - Scalar(3);
  }
  return out;
}

// Relative change of a recommendation-side metric against the history-side
// metric, in percent. Undefined when the history value is zero.
template <typename Scalar>
std::optional<Scalar> percent_delta(Scalar history_value, Scalar rec_value) {
  if (history_value == Scalar(0)) return std::nullopt;
  return (rec_value - history_value) / history_value * Scalar(100);
}

template <typename Scalar>
std::optional<Scalar> percent_delta(std::optional<Scalar> history_value,
                                    std::optional<Scalar> rec_value) {
  if (!history_value || !rec_value) return std::nullopt;
  return percent_delta(*history_value, *rec_value);
}

// Canonical metric order used by records, aggregates, dumps and reports.
inline constexpr std::array<const char*, 7> kBiasMetricNames = {
    "pct_mean", "pct_median", "pct_variance", "pct_skew",
    "pct_kurtosis", "kl", "kendall_tau"};
inline constexpr int kMetricPctMean = 0;
inline constexpr int kMetricPctMedian = 1;
inline constexpr int kMetricPctVariance = 2;
inline constexpr int kMetricPctSkew = 3;
inline constexpr int kMetricPctKurtosis = 4;
inline constexpr int kMetricKl = 5;
inline constexpr int kMetricKendallTau = 6;

// Additive smoothing used before the KL sum: (count + eps) / (total + bins*eps).
std::vector<Real> normalize_counts(std::span<const std::int32_t> counts, Real epsilon);

// KL(H || R) over equal-length binned counts, natural log.
Real kl_divergence(std::span<const std::int32_t> history_counts,
                   std::span<const std::int32_t> rec_counts, Real epsilon);

// Kendall rank correlation over all unordered bin pairs of the raw counts.
// Pairs tied in either vector are excluded from both the concordant and the
// discordant tally; with no decisive pair the statistic is undefined.
std::optional<Real> kendall_tau_binned(std::span<const std::int32_t> history_counts,
                                       std::span<const std::int32_t> rec_counts);

// Binary-relevance NDCG at k; `holdout_sorted` must be ascending. The ideal
// DCG places min(k, |holdout|) hits at the top of the list.
Real ndcg_at_k(std::span<const ItemIndex> ranked, std::span<const ItemIndex> holdout_sorted,
               int k);

// One pooled evaluation outcome: the fold where the user was a test user.
struct PerUserBiasRecord {
  std::string user;
  Gender gender = Gender::Unknown;
  std::string algorithm;
  std::int32_t fold = 0;
  std::array<std::optional<Real>, 7> bias;
  Real ndcg = 0;
};

// Aggregates are snapped to this absolute grid. Two on-grid values within
// +-2^32 add and subtract exactly in double arithmetic, which is what makes
// the `all + delta == group` report identity hold bit-for-bit in every cell;
// the per-user records themselves stay at full precision.
inline constexpr Real kAggregateGrid = 0x1.0p-20;

Real snap_aggregate(Real value);

// Median aggregate of the bias metrics and mean aggregate of NDCG over one
// user group (both on the aggregate grid), with per-metric counts of skipped
// (undefined) values.
struct AggregateRow {
  std::array<std::optional<Real>, 7> bias;
  Real ndcg = 0;
  std::array<std::int32_t, 7> excluded{};
  std::int32_t n_users = 0;
};

AggregateRow aggregate(std::span<const PerUserBiasRecord> records);

// Delta `d` with the property all + d == group, bitwise. The plain difference
// is nudged by ulps when rounding breaks the identity.
Real exact_delta(Real all_value, Real group_value);

struct AlgorithmReport {
  std::string algorithm;
  AggregateRow all;
  AggregateRow female;
  AggregateRow male;
  std::array<std::optional<Real>, 7> delta_female_bias;
  std::array<std::optional<Real>, 7> delta_male_bias;
  Real delta_female_ndcg = 0;
  Real delta_male_ndcg = 0;
};

struct BiasReport {
  std::vector<AlgorithmReport> algorithms;
};

// Builds the report in first-appearance algorithm order. Within an algorithm
// the records are pooled as a multiset, so reordering records never changes
// any aggregate; it can only reorder the report rows.
BiasReport build_report(std::vector<PerUserBiasRecord> records);

void write_per_user_tsv(std::span<const PerUserBiasRecord> records, std::ostream& out);
std::vector<PerUserBiasRecord> parse_per_user_tsv(std::istream& in);

std::string render_report_tsv(const BiasReport& report);
std::string render_report_json(const BiasReport& report);

}  // namespace popaudit
