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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "popaudit/types.hpp"

namespace popaudit {

struct ParseStats {
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::size_t merged_duplicates = 0;
};

// Reads tab-separated listening events (user, item, play_count[, timestamp]),
// sums duplicate (user, item) pairs and keeps the latest timestamp seen for a
// pair. Output is sorted by (user, item). More malformed than valid lines is
// treated as a wrong-format file and is fatal.
std::vector<Interaction> parse_interactions(std::istream& in, ParseStats& stats);

// Reads tab-separated (user, gender) records, gender one of f, m, other or
// empty (the latter two map to Unknown). A repeated user keeps the last entry.
std::vector<UserRecord> parse_users(std::istream& in, ParseStats& stats);

struct FilterConfig {
  PlayCount min_play_count = 2;  // keep records with play_count >= this (and >= 1)
  std::size_t min_users_per_item = 5;
  std::size_t min_items_per_user = 5;
  std::optional<std::int64_t> window_start;  // applied to timestamped records only
  std::optional<std::int64_t> window_end;
  bool core_fixpoint = false;  // repeat the two core stages until stable
};

struct StageCounts {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
  bool operator==(const StageCounts&) const = default;
};

// Entity counts remaining after each stage, in execution order, starting with
// the raw input. Fixpoint passes append item_core_pass2, user_core_pass2, ...
using FilterReport = std::vector<std::pair<std::string, StageCounts>>;

std::string filter_report_json(const FilterReport& report);

struct ItemPlay {
  ItemIndex item = 0;
  PlayCount plays = 0;
  bool operator==(const ItemPlay&) const = default;
};

// Immutable canonical view of a filtered interaction set: users and items are
// sorted by id and addressed by dense indices, each user's items are sorted by
// item index. Users without interactions do not appear.
class Dataset {
 public:
  Dataset() = default;

  static Dataset build(const std::vector<Interaction>& interactions,
                       const std::vector<UserRecord>& users);

  std::int32_t n_users() const { return static_cast<std::int32_t>(user_ids_.size()); }
  std::int32_t n_items() const { return static_cast<std::int32_t>(item_ids_.size()); }
  std::size_t n_interactions() const { return n_interactions_; }

  const std::string& user_id(UserIndex u) const { return user_ids_[static_cast<std::size_t>(u)]; }
  const std::string& item_id(ItemIndex i) const { return item_ids_[static_cast<std::size_t>(i)]; }
  Gender gender(UserIndex u) const { return genders_[static_cast<std::size_t>(u)]; }
  std::span<const ItemPlay> items_of(UserIndex u) const {
    return user_items_[static_cast<std::size_t>(u)];
  }

  std::optional<UserIndex> find_user(std::string_view id) const;
  std::optional<ItemIndex> find_item(std::string_view id) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::vector<Gender> genders_;
  std::vector<std::vector<ItemPlay>> user_items_;
  std::size_t n_interactions_ = 0;
};

// Filter cascade in fixed order: time window, play-count threshold, item core,
// user core. Each stage runs once unless core_fixpoint repeats the two core
// stages. An empty survivor set is fatal.
Dataset apply_filters(const std::vector<Interaction>& interactions,
                      const std::vector<UserRecord>& users, const FilterConfig& config,
                      FilterReport* report = nullptr);

// Keeps a uniform seeded sample of n items (without replacement) and drops
// interactions of removed items; users left without interactions disappear.
Dataset sample_items(const Dataset& dataset, std::int32_t n, std::uint64_t seed);

enum class Role : std::uint8_t { Train, Validation, Test };

// Five-fold round-robin user split (60/20/20) plus, for every non-train user
// of every fold, a seeded input/holdout partition of the user's items.
struct SplitPlan {
  static constexpr int kFolds = 5;
  // roles[fold][user]
  std::vector<std::vector<Role>> roles;
  // holdout[fold][user]: sorted held-out item indices; empty for train users
  std::vector<std::vector<std::vector<ItemIndex>>> holdout;

  Role role(int fold, UserIndex u) const {
    return roles[static_cast<std::size_t>(fold)][static_cast<std::size_t>(u)];
  }
  std::span<const ItemIndex> holdout_of(int fold, UserIndex u) const {
    return holdout[static_cast<std::size_t>(fold)][static_cast<std::size_t>(u)];
  }
};

// input_fraction is the share of a non-train user's items revealed at fold-in;
// the held-out share is 1 - input_fraction with at least one held-out item.
SplitPlan make_split_plan(const Dataset& dataset, std::uint64_t seed,
                          Real input_fraction = 0.8);

void write_interactions_tsv(const Dataset& dataset, std::ostream& out);
void write_users_tsv(const Dataset& dataset, std::ostream& out);

}  // namespace popaudit
