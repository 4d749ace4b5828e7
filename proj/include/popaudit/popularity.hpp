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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "popaudit/dataset.hpp"
#include "popaudit/types.hpp"

namespace popaudit {

// Item popularity: total play count summed over every user of the dataset.
struct PopularityIndex {
  std::vector<PlayCount> popularity;
  PlayCount total_mass = 0;

  Real value(ItemIndex i) const {
    return static_cast<Real>(popularity[static_cast<std::size_t>(i)]);
  }
};

PopularityIndex compute_popularity(const Dataset& dataset);

// Ten popularity bins of roughly equal mass. Items are swept in ascending
// (popularity, item index) order; bin j closes at the first item that lifts
// the cumulative mass to at least j/10 of the total, or early when exactly one
// item per remaining bin is left, so every bin is populated. The top bin holds
// the most popular items and the fewest of them on long-tailed catalogs.
struct DecileBins {
  static constexpr int kBins = 10;

  struct Bin {
    PlayCount min_popularity = 0;
    PlayCount max_popularity = 0;
    std::int32_t item_count = 0;
    Real mass_share = 0;
  };

  std::vector<std::int8_t> bin_of_item;
  std::array<Bin, kBins> bins{};
};

DecileBins build_decile_bins(const PopularityIndex& index);

void write_bin_summary_tsv(const DecileBins& bins, std::ostream& out);

// A multiset of popularity values with the items that produced them, so the
// values can also be assigned to bins.
struct PopularityDistribution {
  std::vector<ItemIndex> items;
  std::vector<Real> values;
};

PopularityDistribution distribution_from_items(std::span<const ItemIndex> items,
                                               const PopularityIndex& index);

// The user's consumed items (the history side of every comparison).
PopularityDistribution history_distribution(const Dataset& dataset, UserIndex user,
                                            const PopularityIndex& index);

// The first k recommended items (the recommendation side, length-matched to
// the history by the caller).
PopularityDistribution recommendation_distribution(std::span<const ItemIndex> rec_list,
                                                   std::size_t k, const PopularityIndex& index);

struct BinnedCounts {
  std::array<std::int32_t, DecileBins::kBins> counts{};
};

BinnedCounts bin_distribution(const PopularityDistribution& dist, const DecileBins& bins);

}  // namespace popaudit
