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

#include "popaudit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "popaudit/rng.hpp"
#include "popaudit/text.hpp"

namespace popaudit {

namespace {

bool valid_id(std::string_view s) { return !s.empty(); }

}  // namespace

std::vector<Interaction> parse_interactions(std::istream& in, ParseStats& stats) {
  std::map<std::pair<std::string, std::string>, Interaction> merged;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::string_view body = text::trim(line);
    if (body.empty()) continue;
    if (first) {
      first = false;
      if (body.starts_with("user_id\t")) continue;  // optional header row
    }
    ++stats.lines;
    const auto fields = text::split(body, '\t');
    if (fields.size() != 3 && fields.size() != 4) {
      ++stats.malformed;
      continue;
    }
    const std::string_view user = fields[0];
    const std::string_view item = fields[1];
    const auto plays = text::parse_uint(fields[2]);
    std::optional<std::int64_t> ts;
    bool ok = valid_id(user) && valid_id(item) && plays.has_value();
    if (ok && fields.size() == 4) {
      ts = text::parse_int(fields[3]);
      ok = ts.has_value();
    }
    if (!ok) {
      ++stats.malformed;
      continue;
    }
    auto [it, inserted] =
        merged.try_emplace({std::string(user), std::string(item)},
                           Interaction{std::string(user), std::string(item), *plays, ts});
    if (!inserted) {
      ++stats.merged_duplicates;
      it->second.play_count += *plays;
      if (ts && (!it->second.timestamp || *ts > *it->second.timestamp)) {
        it->second.timestamp = ts;
      }
    }
  }
  if (stats.lines > 0 && stats.malformed * 2 > stats.lines) {
    throw DataError("interaction file looks malformed: " + std::to_string(stats.malformed) +
                    " of " + std::to_string(stats.lines) + " lines unparseable");
  }
  std::vector<Interaction> out;
  out.reserve(merged.size());
  for (auto& [key, value] : merged) out.push_back(std::move(value));
  return out;
}

std::vector<UserRecord> parse_users(std::istream& in, ParseStats& stats) {
  std::map<std::string, Gender> merged;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::string_view body = line;
    while (!body.empty() && body.back() == '\r') body.remove_suffix(1);
    if (text::trim(body).empty()) continue;
    if (first) {
      first = false;
      if (text::trim(body).starts_with("user_id\t")) continue;  // optional header row
    }
    ++stats.lines;
    const auto fields = text::split(body, '\t');
    if ((fields.size() != 1 && fields.size() != 2) || !valid_id(text::trim(fields[0]))) {
      ++stats.malformed;
      continue;
    }
    const std::string token =
        fields.size() == 2 ? text::lower(text::trim(fields[1])) : std::string();
    Gender gender;
    if (token == "f") {
      gender = Gender::Female;
    } else if (token == "m") {
      gender = Gender::Male;
    } else if (token.empty() || token == "other") {
      gender = Gender::Unknown;
    } else {
      ++stats.malformed;
      continue;
    }
    auto [it, inserted] = merged.insert_or_assign(std::string(text::trim(fields[0])), gender);
    if (!inserted) ++stats.merged_duplicates;
    (void)it;
  }
  if (stats.lines > 0 && stats.malformed * 2 > stats.lines) {
    throw DataError("user file looks malformed: " + std::to_string(stats.malformed) + " of " +
                    std::to_string(stats.lines) + " lines unparseable");
  }
  std::vector<UserRecord> out;
  out.reserve(merged.size());
  for (auto& [user, gender] : merged) out.push_back(UserRecord{user, gender});
  return out;
}

std::string filter_report_json(const FilterReport& report) {
  nlohmann::ordered_json doc;
  for (const auto& [stage, counts] : report) {
    doc[stage] = {{"users", counts.users}, {"items", counts.items},
                  {"interactions", counts.interactions}};
  }
  return doc.dump(2) + "\n";
}

Dataset Dataset::build(const std::vector<Interaction>& interactions,
                       const std::vector<UserRecord>& users) {
  Dataset ds;
  {
    std::vector<std::string> u, t;
    u.reserve(interactions.size());
    t.reserve(interactions.size());
    for (const auto& rec : interactions) {
      u.push_back(rec.user);
      t.push_back(rec.item);
    }
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    ds.user_ids_ = std::move(u);
    ds.item_ids_ = std::move(t);
  }
  std::unordered_map<std::string_view, UserIndex> user_index;
  user_index.reserve(ds.user_ids_.size());
  for (std::size_t i = 0; i < ds.user_ids_.size(); ++i) {
    user_index.emplace(ds.user_ids_[i], static_cast<UserIndex>(i));
  }
  std::unordered_map<std::string_view, ItemIndex> item_index;
  item_index.reserve(ds.item_ids_.size());
  for (std::size_t i = 0; i < ds.item_ids_.size(); ++i) {
    item_index.emplace(ds.item_ids_[i], static_cast<ItemIndex>(i));
  }
  ds.genders_.assign(ds.user_ids_.size(), Gender::Unknown);
  for (const auto& rec : users) {
    auto it = user_index.find(rec.user);
    if (it != user_index.end()) ds.genders_[static_cast<std::size_t>(it->second)] = rec.gender;
  }
  ds.user_items_.assign(ds.user_ids_.size(), {});
  for (const auto& rec : interactions) {
    const UserIndex u = user_index.at(rec.user);
    const ItemIndex t = item_index.at(rec.item);
    auto& list = ds.user_items_[static_cast<std::size_t>(u)];
    if (!list.empty() && list.back().item == t) {
      throw DataError("duplicate aggregated interaction for user " + rec.user);
    }
    list.push_back(ItemPlay{t, rec.play_count});
  }
  for (auto& list : ds.user_items_) {
    std::sort(list.begin(), list.end(),
              [](const ItemPlay& a, const ItemPlay& b) { return a.item < b.item; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i].item == list[i - 1].item) throw DataError("duplicate interaction in dataset");
    }
    ds.n_interactions_ += list.size();
  }
  return ds;
}

std::optional<UserIndex> Dataset::find_user(std::string_view id) const {
  auto it = std::lower_bound(user_ids_.begin(), user_ids_.end(), id);
  if (it == user_ids_.end() || *it != id) return std::nullopt;
  return static_cast<UserIndex>(it - user_ids_.begin());
}

std::optional<ItemIndex> Dataset::find_item(std::string_view id) const {
  auto it = std::lower_bound(item_ids_.begin(), item_ids_.end(), id);
  if (it == item_ids_.end() || *it != id) return std::nullopt;
  return static_cast<ItemIndex>(it - item_ids_.begin());
}

namespace {

StageCounts count_entities(const std::vector<Interaction>& records) {
  std::unordered_set<std::string_view> users, items;
  for (const auto& rec : records) {
    users.insert(rec.user);
    items.insert(rec.item);
  }
  return StageCounts{users.size(), items.size(), records.size()};
}

// The keep decisions are made before compaction: moving records around would
// invalidate the string_views keying the tally maps.
void compact(std::vector<Interaction>& records, const std::vector<char>& keep) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!keep[i]) continue;
    if (w != i) records[w] = std::move(records[i]);
    ++w;
  }
  records.resize(w);
}

void drop_items_below(std::vector<Interaction>& records, std::size_t min_users) {
  std::unordered_map<std::string_view, std::unordered_set<std::string_view>> users_per_item;
  for (const auto& rec : records) users_per_item[rec.item].insert(rec.user);
  std::vector<char> keep(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    keep[i] = users_per_item.at(records[i].item).size() >= min_users;
  }
  compact(records, keep);
}

void drop_users_below(std::vector<Interaction>& records, std::size_t min_items) {
  std::unordered_map<std::string_view, std::size_t> items_per_user;
  for (const auto& rec : records) ++items_per_user[rec.user];
  std::vector<char> keep(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    keep[i] = items_per_user.at(records[i].user) >= min_items;
  }
  compact(records, keep);
}

}  // namespace

Dataset apply_filters(const std::vector<Interaction>& interactions,
                      const std::vector<UserRecord>& users, const FilterConfig& config,
                      FilterReport* report) {
  FilterReport local;
  FilterReport& rep = report ? *report : local;
  rep.clear();
  std::vector<Interaction> working = interactions;
  rep.emplace_back("input", count_entities(working));

  if (config.window_start || config.window_end) {
    std::erase_if(working, [&](const Interaction& rec) {
      if (!rec.timestamp) return false;
      if (config.window_start && *rec.timestamp < *config.window_start) return true;
      if (config.window_end && *rec.timestamp > *config.window_end) return true;
      return false;
    });
  }
  rep.emplace_back("time_window", count_entities(working));

  const PlayCount floor = std::max<PlayCount>(config.min_play_count, 1);
  std::erase_if(working, [&](const Interaction& rec) { return rec.play_count < floor; });
  rep.emplace_back("play_count", count_entities(working));

  int pass = 1;
  while (true) {
    const std::size_t before = working.size();
    drop_items_below(working, config.min_users_per_item);
    rep.emplace_back(pass == 1 ? "item_core" : "item_core_pass" + std::to_string(pass),
                     count_entities(working));
    drop_users_below(working, config.min_items_per_user);
    rep.emplace_back(pass == 1 ? "user_core" : "user_core_pass" + std::to_string(pass),
                     count_entities(working));
    if (!config.core_fixpoint || working.size() == before) break;
    ++pass;
  }

  if (working.empty()) {
    std::string detail = "all interactions removed by filtering;";
    for (const auto& [stage, counts] : rep) {
      detail += " " + stage + "=" + std::to_string(counts.interactions);
    }
    throw DataError(detail);
  }
  return Dataset::build(working, users);
}

Dataset sample_items(const Dataset& dataset, std::int32_t n, std::uint64_t seed) {
  if (n <= 0) throw DataError("sample_items: sample size must be positive");
  if (n > dataset.n_items()) {
    throw DataError("sample_items: sample size " + std::to_string(n) + " exceeds catalog size " +
                    std::to_string(dataset.n_items()));
  }
  auto eng = rng::make_engine(rng::mix(seed, 0x5a3b9e01u));
  const std::vector<ItemIndex> picked = rng::sample_indices(eng, dataset.n_items(), n);
  std::vector<bool> keep(static_cast<std::size_t>(dataset.n_items()), false);
  for (ItemIndex i : picked) keep[static_cast<std::size_t>(i)] = true;

  std::vector<Interaction> records;
  std::vector<UserRecord> users;
  for (UserIndex u = 0; u < dataset.n_users(); ++u) {
    users.push_back(UserRecord{dataset.user_id(u), dataset.gender(u)});
    for (const ItemPlay& ip : dataset.items_of(u)) {
      if (keep[static_cast<std::size_t>(ip.item)]) {
        records.push_back(
            Interaction{dataset.user_id(u), dataset.item_id(ip.item), ip.plays, std::nullopt});
      }
    }
  }
  if (records.empty()) throw DataError("sample_items: sample removed every interaction");
  return Dataset::build(records, users);
}

SplitPlan make_split_plan(const Dataset& dataset, std::uint64_t seed, Real input_fraction) {
  const std::int32_t m = dataset.n_users();
  if (m < SplitPlan::kFolds) {
    throw DataError("make_split_plan: need at least 5 users, got " + std::to_string(m));
  }
  if (!(input_fraction > 0 && input_fraction < 1)) {
    throw DataError("make_split_plan: input fraction must lie in (0, 1)");
  }
  std::vector<UserIndex> order(static_cast<std::size_t>(m));
  for (UserIndex u = 0; u < m; ++u) order[static_cast<std::size_t>(u)] = u;
  auto shuffle_eng = rng::make_engine(rng::mix(seed, 0x517beefu));
  rng::shuffle(shuffle_eng, order);

  // block(u) in [0, 5): near-equal contiguous blocks of the shuffled order
  std::vector<int> block(static_cast<std::size_t>(m));
  for (std::int32_t pos = 0; pos < m; ++pos) {
    const int b = static_cast<int>((static_cast<std::int64_t>(pos) * SplitPlan::kFolds) / m);
    block[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = b;
  }

  SplitPlan plan;
  plan.roles.assign(SplitPlan::kFolds, std::vector<Role>(static_cast<std::size_t>(m)));
  plan.holdout.assign(SplitPlan::kFolds,
                      std::vector<std::vector<ItemIndex>>(static_cast<std::size_t>(m)));
  for (int fold = 0; fold < SplitPlan::kFolds; ++fold) {
    const std::uint64_t fold_seed = rng::mix(seed, 0xf01d0000u + static_cast<std::uint64_t>(fold));
    for (UserIndex u = 0; u < m; ++u) {
      const int b = block[static_cast<std::size_t>(u)];
      Role role = Role::Train;
      if (b == fold) {
        role = Role::Test;
      } else if (b == (fold + 1) % SplitPlan::kFolds) {
        role = Role::Validation;
      }
      plan.roles[static_cast<std::size_t>(fold)][static_cast<std::size_t>(u)] = role;
      if (role == Role::Train) continue;

      const auto items = dataset.items_of(u);
      const std::int32_t n_items_u = static_cast<std::int32_t>(items.size());
      const std::int32_t held = std::max<std::int32_t>(
          1, static_cast<std::int32_t>(
                 std::llround((1.0 - input_fraction) * static_cast<double>(n_items_u))));
      auto eng = rng::make_engine(rng::mix(fold_seed, static_cast<std::uint64_t>(u)));
      std::vector<ItemIndex> positions = rng::sample_indices(eng, n_items_u, held);
      std::vector<ItemIndex>& holdout =
          plan.holdout[static_cast<std::size_t>(fold)][static_cast<std::size_t>(u)];
      holdout.reserve(positions.size());
      for (ItemIndex pos : positions) holdout.push_back(items[static_cast<std::size_t>(pos)].item);
      std::sort(holdout.begin(), holdout.end());
    }
  }
  return plan;
}

void write_interactions_tsv(const Dataset& dataset, std::ostream& out) {
  std::string buf;
  for (UserIndex u = 0; u < dataset.n_users(); ++u) {
    for (const ItemPlay& ip : dataset.items_of(u)) {
      buf += dataset.user_id(u);
      buf += '\t';
      buf += dataset.item_id(ip.item);
      buf += '\t';
      buf += std::to_string(ip.plays);
      buf += '\n';
    }
  }
  out << buf;
}

void write_users_tsv(const Dataset& dataset, std::ostream& out) {
  std::string buf;
  for (UserIndex u = 0; u < dataset.n_users(); ++u) {
    buf += dataset.user_id(u);
    buf += '\t';
    const Gender g = dataset.gender(u);
    buf += g == Gender::Female ? "f" : (g == Gender::Male ? "m" : "other");
    buf += '\n';
  }
  out << buf;
}

}  // namespace popaudit
