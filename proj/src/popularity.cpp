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

#include "popaudit/popularity.hpp"

#include <algorithm>
#include <ostream>

#include "popaudit/text.hpp"

namespace popaudit {

PopularityIndex compute_popularity(const Dataset& dataset) {
  PopularityIndex index;
  index.popularity.assign(static_cast<std::size_t>(dataset.n_items()), 0);
  for (UserIndex u = 0; u < dataset.n_users(); ++u) {
    for (const ItemPlay& ip : dataset.items_of(u)) {
      index.popularity[static_cast<std::size_t>(ip.item)] += ip.plays;
      index.total_mass += ip.plays;
    }
  }
  return index;
}

DecileBins build_decile_bins(const PopularityIndex& index) {
  const std::int32_t n = static_cast<std::int32_t>(index.popularity.size());
  if (n < DecileBins::kBins) {
    throw DataError("build_decile_bins: need at least 10 items, got " + std::to_string(n));
  }
  if (index.total_mass == 0) throw DataError("build_decile_bins: zero total popularity");

  std::vector<ItemIndex> order(static_cast<std::size_t>(n));
  for (ItemIndex i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](ItemIndex a, ItemIndex b) {
    const PlayCount pa = index.popularity[static_cast<std::size_t>(a)];
    const PlayCount pb = index.popularity[static_cast<std::size_t>(b)];
    if (pa != pb) return pa < pb;
    return a < b;
  });

  DecileBins bins;
  bins.bin_of_item.assign(static_cast<std::size_t>(n), 0);
  const PlayCount total = index.total_mass;
  std::size_t pos = 0;
  PlayCount cumulative = 0;
  for (int j = 1; j <= DecileBins::kBins; ++j) {
    auto& bin = bins.bins[static_cast<std::size_t>(j - 1)];
    PlayCount bin_mass = 0;
    while (true) {
      const ItemIndex item = order[pos];
      const PlayCount p = index.popularity[static_cast<std::size_t>(item)];
      bins.bin_of_item[static_cast<std::size_t>(item)] = static_cast<std::int8_t>(j - 1);
      if (bin.item_count == 0) bin.min_popularity = p;
      bin.max_popularity = p;
      ++bin.item_count;
      bin_mass += p;
      cumulative += p;
      ++pos;
      const std::size_t remaining = static_cast<std::size_t>(n) - pos;
      const bool mass_reached = cumulative * 10 >= static_cast<PlayCount>(j) * total;
      const bool forced = remaining == static_cast<std::size_t>(DecileBins::kBins - j);
      if (mass_reached || forced) break;
    }
    bin.mass_share = static_cast<Real>(bin_mass) / static_cast<Real>(total);
  }
  return bins;
}

void write_bin_summary_tsv(const DecileBins& bins, std::ostream& out) {
  std::string buf = "bin_index\tmin_popularity\tmax_popularity\titem_count\tmass_share\n";
  for (int j = 0; j < DecileBins::kBins; ++j) {
    const auto& bin = bins.bins[static_cast<std::size_t>(j)];
    buf += std::to_string(j);
    buf += '\t';
    buf += std::to_string(bin.min_popularity);
    buf += '\t';
    buf += std::to_string(bin.max_popularity);
    buf += '\t';
    buf += std::to_string(bin.item_count);
    buf += '\t';
    buf += text::format_real(bin.mass_share);
    buf += '\n';
  }
  out << buf;
}

PopularityDistribution distribution_from_items(std::span<const ItemIndex> items,
                                               const PopularityIndex& index) {
  PopularityDistribution dist;
  dist.items.assign(items.begin(), items.end());
  dist.values.reserve(items.size());
  for (ItemIndex i : items) {
    if (i < 0 || static_cast<std::size_t>(i) >= index.popularity.size()) {
      throw DataError("distribution_from_items: item index out of range");
    }
    dist.values.push_back(index.value(i));
  }
  return dist;
}

PopularityDistribution history_distribution(const Dataset& dataset, UserIndex user,
                                            const PopularityIndex& index) {
  if (user < 0 || user >= dataset.n_users()) {
    throw DataError("history_distribution: unknown user index " + std::to_string(user));
  }
  const auto items = dataset.items_of(user);
  std::vector<ItemIndex> ids;
  ids.reserve(items.size());
  for (const ItemPlay& ip : items) ids.push_back(ip.item);
  return distribution_from_items(ids, index);
}

PopularityDistribution recommendation_distribution(std::span<const ItemIndex> rec_list,
                                                   std::size_t k, const PopularityIndex& index) {
  if (rec_list.size() < k) {
    throw DataError("recommendation_distribution: list of length " +
                    std::to_string(rec_list.size()) + " shorter than k=" + std::to_string(k));
  }
  return distribution_from_items(rec_list.subspan(0, k), index);
}

BinnedCounts bin_distribution(const PopularityDistribution& dist, const DecileBins& bins) {
  BinnedCounts counts;
  for (ItemIndex i : dist.items) {
    if (i < 0 || static_cast<std::size_t>(i) >= bins.bin_of_item.size()) {
      throw DataError("bin_distribution: item index out of range");
    }
    ++counts.counts[static_cast<std::size_t>(bins.bin_of_item[static_cast<std::size_t>(i)])];
  }
  return counts;
}

}  // namespace popaudit
