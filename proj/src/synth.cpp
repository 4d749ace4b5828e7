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

#include "popaudit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "popaudit/rng.hpp"

namespace popaudit {

namespace {

void validate(const SyntheticSpec& spec) {
  if (spec.n_users < 10 || spec.n_items < 10) {
    throw ConfigError("synth: need at least 10 users and 10 items");
  }
  if (!(spec.exponent >= 0) || !std::isfinite(spec.exponent)) {
    throw ConfigError("synth: exponent must be a finite non-negative real");
  }
  if (spec.mean_history < 5) throw ConfigError("synth: mean_history must be at least 5");
  if (spec.mean_history > spec.n_items) {
    throw ConfigError("synth: mean_history exceeds the item catalog");
  }
  if (spec.spread < 0 || spec.spread > 1) throw ConfigError("synth: spread must be in [0, 1]");
  if (spec.gender_ratio < 0 || spec.gender_ratio > 1) {
    throw ConfigError("synth: gender_ratio must be in [0, 1]");
  }
  if (!(spec.play_p > 0) || spec.play_p > 1) throw ConfigError("synth: play_p must be in (0, 1]");
  if (spec.genre_affinity) {
    if (spec.n_genres < 1 || spec.n_genres > spec.n_items) {
      throw ConfigError("synth: n_genres must be in [1, n_items]");
    }
    if (spec.genres_per_user < 1 || spec.genres_per_user > spec.n_genres) {
      throw ConfigError("synth: genres_per_user must be in [1, n_genres]");
    }
  }
}

std::string padded_id(char prefix, std::int32_t value, int width) {
  std::string digits = std::to_string(value);
  std::string out(1, prefix);
  out.append(static_cast<std::size_t>(width) - digits.size(), '0');
  out += digits;
  return out;
}

int width_for(std::int32_t n) {
  return static_cast<int>(std::to_string(n - 1).size());
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  const std::int32_t n = spec.n_items;
  const int item_width = width_for(n);
  const int user_width = width_for(spec.n_users);

  std::vector<double> weight(static_cast<std::size_t>(n));
  for (std::int32_t r = 0; r < n; ++r) {
    weight[static_cast<std::size_t>(r)] = std::pow(static_cast<double>(r) + 1.0, -spec.exponent);
  }
  std::vector<double> global_cdf(weight.size());
  double running = 0;
  for (std::size_t r = 0; r < weight.size(); ++r) {
    running += weight[r];
    global_cdf[r] = running;
  }

  // Per-genre rank lists and CDFs; only needed when affinity is on.
  std::vector<std::vector<std::int32_t>> genre_ranks;
  std::vector<std::vector<double>> genre_cdf;
  std::vector<double> genre_mass;
  if (spec.genre_affinity) {
    const std::size_t g = static_cast<std::size_t>(spec.n_genres);
    genre_ranks.resize(g);
    genre_cdf.resize(g);
    genre_mass.resize(g);
    for (std::int32_t r = 0; r < n; ++r) {
      genre_ranks[static_cast<std::size_t>(r % spec.n_genres)].push_back(r);
    }
    for (std::size_t gi = 0; gi < g; ++gi) {
      double sum = 0;
      genre_cdf[gi].reserve(genre_ranks[gi].size());
      for (std::int32_t r : genre_ranks[gi]) {
        sum += weight[static_cast<std::size_t>(r)];
        genre_cdf[gi].push_back(sum);
      }
      genre_mass[gi] = sum;
    }
  }

  const double p_length = 1.0 / static_cast<double>(spec.mean_history);
  SyntheticData data;
  data.users.reserve(static_cast<std::size_t>(spec.n_users));

  for (std::int32_t u = 0; u < spec.n_users; ++u) {
    auto eng = rng::make_engine(rng::mix(spec.seed, 0x5e11u, static_cast<std::uint64_t>(u)));
    UserRecord record;
    record.user = padded_id('u', u, user_width);
    record.gender =
        rng::uniform_real(eng) < spec.gender_ratio ? Gender::Female : Gender::Male;
    data.users.push_back(record);

    const double mainstream = 1.0 - spec.spread * rng::uniform_real(eng);

    std::vector<double> preferred_cdf;
    std::vector<std::int32_t> preferred;
    if (spec.genre_affinity) {
      preferred = rng::sample_indices(eng, spec.n_genres, spec.genres_per_user);
      preferred_cdf.reserve(preferred.size());
      double sum = 0;
      for (std::int32_t gi : preferred) {
        sum += genre_mass[static_cast<std::size_t>(gi)];
        preferred_cdf.push_back(sum);
      }
    }

    auto draw_item = [&]() -> std::int32_t {
      if (rng::uniform_real(eng) < mainstream) {
        if (spec.genre_affinity) {
          const std::size_t pick = rng::discrete_from_cdf(eng, preferred_cdf);
          const std::int32_t gi = preferred[pick];
          const std::size_t within =
              rng::discrete_from_cdf(eng, genre_cdf[static_cast<std::size_t>(gi)]);
          return genre_ranks[static_cast<std::size_t>(gi)][within];
        }
        return static_cast<std::int32_t>(rng::discrete_from_cdf(eng, global_cdf));
      }
      return static_cast<std::int32_t>(rng::uniform_below(eng, static_cast<std::uint64_t>(n)));
    };

    std::vector<std::int32_t> history;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::int64_t length =
          1 + static_cast<std::int64_t>(rng::geometric(eng, p_length));
      length = std::max<std::int64_t>(5, std::min<std::int64_t>(length, n));
      history.clear();
      for (std::int64_t d = 0; d < length; ++d) history.push_back(draw_item());
      std::sort(history.begin(), history.end());
      history.erase(std::unique(history.begin(), history.end()), history.end());
      if (history.size() >= 5) break;
      history.clear();
    }
    if (history.size() < 5) {
      throw ExperimentError("synth: could not draw 5 distinct items for a user; "
                            "the spec concentrates nearly all mass on fewer than 5 items");
    }

    for (std::int32_t r : history) {
      Interaction ix;
      ix.user = record.user;
      ix.item = padded_id('t', r, item_width);
      ix.play_count = 2 + rng::geometric(eng, spec.play_p);
      data.interactions.push_back(std::move(ix));
    }
  }
  return data;
}

void write_raw_interactions_tsv(std::span<const Interaction> interactions, std::ostream& out) {
  out << "user_id\titem_id\tplay_count\ttimestamp\n";
  for (const Interaction& ix : interactions) {
    out << ix.user << '\t' << ix.item << '\t' << ix.play_count;
    if (ix.timestamp) out << '\t' << *ix.timestamp;
    out << '\n';
  }
}

void write_raw_users_tsv(std::span<const UserRecord> users, std::ostream& out) {
  out << "user_id\tgender\n";
  for (const UserRecord& r : users) {
    out << r.user << '\t' << (r.gender == Gender::Unknown ? "other" : gender_token(r.gender))
        << '\n';
  }
}

}  // namespace popaudit
