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
#include <span>
#include <vector>

#include "popaudit/types.hpp"

namespace popaudit {

// Long-tail listening data generator. Items carry a discrete power-law
// popularity weight (rank + 1)^-exponent; each user samples a history from a
// personal mixture of popularity-proportional and uniform item draws. Item
// ids are zero-padded in rank order, so after ingestion item index equals
// popularity rank.
//
// With genre_affinity enabled, items get a genre (rank mod n_genres) and each
// user's popularity-proportional draws are restricted to a small preferred
// genre set, renormalized; uniform draws stay unrestricted. Aggregated item
// frequencies are unchanged by genre symmetry, but user histories become
// correlated, which gives the item-based and factor models a signal that a
// popularity ranking cannot express.
struct SyntheticSpec {
  std::int32_t n_users = 2000;
  std::int32_t n_items = 5000;
  Real exponent = 1.0;            // popularity weight (rank+1)^-exponent, >= 0
  std::int32_t mean_history = 40; // mean of the geometric history length, floor 5
  Real spread = 0.5;              // per-user mainstreaminess drawn from [1-spread, 1]
  Real gender_ratio = 0.5;        // fraction of users assigned f
  Real play_p = 0.5;              // play count = 2 + geometric(play_p)
  bool genre_affinity = true;
  std::int32_t n_genres = 20;
  std::int32_t genres_per_user = 3;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  std::vector<Interaction> interactions;
  std::vector<UserRecord> users;
};

// Deterministic in spec (per-user seeded streams). Users whose history
// collapses below 5 distinct items are redrawn in full.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Raw-record writers matching what parse_interactions / parse_users read.
void write_raw_interactions_tsv(std::span<const Interaction> interactions, std::ostream& out);
void write_raw_users_tsv(std::span<const UserRecord> users, std::ostream& out);

}  // namespace popaudit
