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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include <json.hpp>

#include "popaudit/recommenders.hpp"
#include "popaudit/rng.hpp"

using namespace popaudit;

namespace {

// Two disjoint taste clusters: items {0,1} belong to one, {2,3} to the other.
TrainMatrix two_block_matrix() {
  TrainMatrix m;
  m.n_items = 4;
  m.user_items = {{0, 1}, {0, 1}, {2, 3}, {2, 3}};
  return m;
}

TrainMatrix random_matrix(std::uint64_t seed, std::int32_t n_users, ItemIndex n_items,
                          int max_basket) {
  auto eng = rng::make_engine(seed);
  TrainMatrix m;
  m.n_items = n_items;
  for (std::int32_t u = 0; u < n_users; ++u) {
    const std::int32_t basket =
        2 + static_cast<std::int32_t>(rng::uniform_below(eng, max_basket - 1));
    auto items = rng::sample_indices(eng, n_items, std::min(basket, n_items));
    std::sort(items.begin(), items.end());
    m.user_items.push_back(std::move(items));
  }
  return m;
}

std::vector<std::uint8_t> mask_of(ItemIndex n_items, std::initializer_list<ItemIndex> excluded) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n_items), 0);
  for (ItemIndex i : excluded) mask[static_cast<std::size_t>(i)] = 1;
  return mask;
}

std::optional<Real> lookup_weight(const Model& model, ItemIndex source, ItemIndex target) {
  for (const auto& [t, w] : model.weights.columns[static_cast<std::size_t>(source)]) {
    if (t == target) return w;
  }
  return std::nullopt;
}

Hyperparameters small_factor_params() {
  Hyperparameters params;
  params.als.factors = 6;
  params.als.iterations = 8;
  params.bpr.factors = 6;
  params.bpr.epochs = 20;
  return params;
}

}  // namespace

TEST_CASE("variant names round trip") {
  for (Variant v : kAllVariants) {
    CHECK(variant_from_name(variant_name(v)) == v);
  }
  CHECK_THROWS_AS(variant_from_name("svdpp"), ConfigError);
}

TEST_CASE("train rejects malformed matrices") {
  TrainMatrix empty;
  empty.n_items = 0;
  CHECK_THROWS_AS(train(Variant::Pop, empty, {}, 1), DataError);
  TrainMatrix no_users;
  no_users.n_items = 4;
  CHECK_THROWS_AS(train(Variant::Pop, no_users, {}, 1), DataError);
  TrainMatrix bad_index;
  bad_index.n_items = 4;
  bad_index.user_items = {{0, 9}};
  CHECK_THROWS_AS(train(Variant::Pop, bad_index, {}, 1), DataError);
}

TEST_CASE("personalized variants recover the two-block structure") {
  const TrainMatrix matrix = two_block_matrix();
  const Hyperparameters params = small_factor_params();
  // The partner item of each input inside its block.
  const ItemIndex partner[4] = {1, 0, 3, 2};
  for (Variant v : {Variant::ItemKnn, Variant::Slim, Variant::Als, Variant::Bpr}) {
    const Model model = train(v, matrix, params, 7);
    for (ItemIndex input = 0; input < 4; ++input) {
      const UserEmbedding emb = fold_in(model, std::vector<ItemIndex>{input});
      const auto top = recommend(model, emb, 1, mask_of(4, {input}));
      CAPTURE(variant_name(v));
      CAPTURE(input);
      REQUIRE(top.size() == 1);
      CHECK(top[0] == partner[input]);
    }
  }
}

TEST_CASE("popularity scores cannot separate the blocks") {
  // Every item has the same two supporters, so POP ties everywhere and its
  // index tie-break points at item 0, not at the in-block partner of item 2.
  const TrainMatrix matrix = two_block_matrix();
  const Model model = train(Variant::Pop, matrix, {}, 7);
  CHECK(model.pop_scores == Vec::Constant(4, 2.0));
  const UserEmbedding emb = fold_in(model, std::vector<ItemIndex>{2});
  const auto top = recommend(model, emb, 3, mask_of(4, {2}));
  CHECK(top == std::vector<ItemIndex>{0, 1, 3});
}

TEST_CASE("pop ranks by train support with index tie-break") {
  TrainMatrix m;
  m.n_items = 5;
  // Supports: item 0 -> 3 users, item 1 -> 2, item 2 -> 2, item 3 -> 1, item 4 -> 0.
  m.user_items = {{0, 1, 2}, {0, 1}, {0, 2, 3}};
  const Model model = train(Variant::Pop, m, {}, 1);
  const UserEmbedding emb = fold_in(model, std::vector<ItemIndex>{3});
  CHECK(recommend(model, emb, 5, mask_of(5, {})) == std::vector<ItemIndex>{0, 1, 2, 3, 4});
  CHECK(model.item_known == std::vector<std::uint8_t>{1, 1, 1, 1, 0});
}

TEST_CASE("itemknn computes binary cosine similarities") {
  TrainMatrix m;
  m.n_items = 3;
  m.user_items = {{0, 1}, {0, 1}, {0, 2}};
  Hyperparameters params;
  const Model model = train(Variant::ItemKnn, m, params, 1);

  // supports: |0|=3, |1|=2, |2|=1; co-occurrences: (0,1)=2, (0,2)=1, (1,2)=0.
  const Real cos01 = 2.0 / (std::sqrt(3.0) * std::sqrt(2.0));
  const Real cos02 = 1.0 / (std::sqrt(3.0) * std::sqrt(1.0));
  CHECK(lookup_weight(model, 0, 1) == cos01);
  CHECK(lookup_weight(model, 1, 0) == cos01);
  CHECK(lookup_weight(model, 0, 2) == cos02);
  CHECK(lookup_weight(model, 2, 0) == cos02);
  CHECK_FALSE(lookup_weight(model, 1, 2).has_value());
  CHECK_FALSE(lookup_weight(model, 0, 0).has_value());

  params.itemknn.shrinkage = 1.0;
  const Model shrunk = train(Variant::ItemKnn, m, params, 1);
  CHECK(lookup_weight(shrunk, 0, 1) == 2.0 / (std::sqrt(3.0) * std::sqrt(2.0) + 1.0));

  params.itemknn.shrinkage = 0.0;
  params.itemknn.neighbors = 1;
  const Model capped = train(Variant::ItemKnn, m, params, 1);
  CHECK(capped.weights.columns[0].size() == 1);
  CHECK(lookup_weight(capped, 0, 1) == cos01);
  CHECK_FALSE(lookup_weight(capped, 0, 2).has_value());
}

TEST_CASE("identical consumption columns have cosine exactly one") {
  TrainMatrix m;
  m.n_items = 3;
  m.user_items = {{0, 1}, {0, 1, 2}, {0, 1}};
  const Model model = train(Variant::ItemKnn, m, {}, 1);
  REQUIRE(lookup_weight(model, 0, 1).has_value());
  REQUIRE(lookup_weight(model, 1, 0).has_value());
  CHECK(*lookup_weight(model, 0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*lookup_weight(model, 1, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("slim solves a single-candidate column in closed form") {
  TrainMatrix m;
  m.n_items = 2;
  m.user_items = {{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}};
  Hyperparameters params;
  const Model model = train(Variant::Slim, m, params, 1);
  const Real expected = (5.0 - params.slim.l1) / (5.0 + params.slim.l2);
  CHECK(lookup_weight(model, 0, 1) == expected);
  CHECK(lookup_weight(model, 1, 0) == expected);
  CHECK(model.slim_capped_columns == 0);
}

TEST_CASE("slim weights satisfy the non-negative elastic net optimality conditions") {
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const TrainMatrix m = random_matrix(rng::mix(3131, trial), 15, 12, 6);
    Hyperparameters params;
    params.slim.l1 = 0.05;
    params.slim.l2 = 0.05;
    params.slim.max_sweeps = 2000;
    params.slim.tolerance = 1e-12;
    const Model model = train(Variant::Slim, m, params, 1);
    REQUIRE(model.slim_capped_columns == 0);

    const Mat x = m.dense();
    const Mat gram = x.transpose() * x;
    // Reassemble the coefficient vector of every target column j.
    for (ItemIndex j = 0; j < m.n_items; ++j) {
      if (gram(j, j) == 0) continue;
      Vec w = Vec::Zero(m.n_items);
      for (ItemIndex k = 0; k < m.n_items; ++k) {
        if (const auto entry = lookup_weight(model, k, j)) {
          CHECK(k != j);
          CHECK(*entry > 0);
          CHECK(gram(k, j) > 0);
          w[k] = *entry;
        }
      }
      const Vec gw = gram * w;
      for (ItemIndex k = 0; k < m.n_items; ++k) {
        if (k == j || gram(k, j) == 0) continue;
        CAPTURE(trial);
        CAPTURE(j);
        CAPTURE(k);
        const Real gradient = gw[k] - gram(k, j) + params.slim.l2 * w[k];
        if (w[k] > 0) {
          // Active coordinate: gradient + l1 vanishes at the optimum.
          CHECK(std::abs(gradient + params.slim.l1) <= 1e-6);
        } else {
          // Inactive coordinate: pushing it positive must not pay.
          CHECK(gradient + params.slim.l1 >= -1e-6);
        }
      }
    }
  }
}

TEST_CASE("slim reports columns that hit the sweep cap") {
  const TrainMatrix m = random_matrix(515, 20, 10, 6);
  Hyperparameters params;
  params.slim.max_sweeps = 1;
  params.slim.tolerance = 0.0;
  const Model capped = train(Variant::Slim, m, params, 1);
  CHECK(capped.slim_capped_columns > 0);
  params.slim.max_sweeps = 5000;
  params.slim.tolerance = 1e-10;
  const Model converged = train(Variant::Slim, m, params, 1);
  CHECK(converged.slim_capped_columns == 0);
}

TEST_CASE("als objective matches a direct confidence-weighted reconstruction") {
  const TrainMatrix m = random_matrix(909, 6, 8, 5);
  Hyperparameters params;
  params.als.factors = 3;
  params.als.alpha = 2.0;
  params.als.regularization = 0.1;
  params.als.iterations = 1;
  const std::uint64_t seed = 33;
  const Model model = train(Variant::Als, m, params, seed);
  REQUIRE(model.als_objective.size() == 3);

  const Eigen::Index f = params.als.factors;
  const auto n_users = static_cast<Eigen::Index>(m.user_items.size());

  // Replay the seeded init stream, then redo the two half-sweeps with a
  // different linear solver; the recorded objective values must agree.
  auto eng = rng::make_engine(rng::mix(seed, 0xa15u));
  Mat y(f, m.n_items), x(f, n_users);
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    for (Eigen::Index k = 0; k < f; ++k) y(k, i) = 0.01 * rng::normal(eng);
  }
  for (Eigen::Index u = 0; u < x.cols(); ++u) {
    for (Eigen::Index k = 0; k < f; ++k) x(k, u) = 0.01 * rng::normal(eng);
  }

  const Mat r = m.dense();
  auto objective = [&](const Mat& xs, const Mat& ys) {
    Real total = 0;
    for (Eigen::Index u = 0; u < n_users; ++u) {
      for (ItemIndex i = 0; i < m.n_items; ++i) {
        const Real s = xs.col(u).dot(ys.col(i));
        const Real confidence = 1.0 + params.als.alpha * r(u, i);
        total += confidence * (r(u, i) - s) * (r(u, i) - s);
      }
    }
    return total + params.als.regularization * (xs.squaredNorm() + ys.squaredNorm());
  };

  CHECK(model.als_objective[0] ==
        doctest::Approx(objective(x, y)).epsilon(1e-10));

  auto solve_side = [&](Mat& target, const Mat& fixed, const Mat& observed) {
    const Mat gram = fixed * fixed.transpose();
    for (Eigen::Index c = 0; c < target.cols(); ++c) {
      Mat a = gram + params.als.regularization * Mat::Identity(f, f);
      Vec b = Vec::Zero(f);
      for (Eigen::Index other = 0; other < observed.cols(); ++other) {
        if (observed(c, other) == 0) continue;
        a += params.als.alpha * fixed.col(other) * fixed.col(other).transpose();
        b += (1.0 + params.als.alpha) * fixed.col(other);
      }
      target.col(c) = a.colPivHouseholderQr().solve(b);
    }
  };
  solve_side(x, y, r);
  CHECK(model.als_objective[1] == doctest::Approx(objective(x, y)).epsilon(1e-8));
  solve_side(y, x, r.transpose());
  CHECK(model.als_objective[2] == doctest::Approx(objective(x, y)).epsilon(1e-8));

  CHECK(model.item_factors.rows() == m.n_items);
  CHECK((model.item_factors.transpose() - y).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((model.factor_gram - model.item_factors.transpose() * model.item_factors)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("als objective decreases monotonically over every half-sweep") {
  const TrainMatrix m = random_matrix(2020, 25, 18, 8);
  Hyperparameters params;
  params.als.factors = 6;
  params.als.iterations = 10;
  const Model model = train(Variant::Als, m, params, 5);
  REQUIRE(model.als_objective.size() == 21);
  for (std::size_t s = 1; s < model.als_objective.size(); ++s) {
    CHECK(model.als_objective[s] <= model.als_objective[s - 1] * (1 + 1e-12));
  }
  CHECK(model.als_objective.back() < model.als_objective.front());
}

TEST_CASE("bpr validation loss falls while training on learnable structure") {
  TrainMatrix m;
  m.n_items = 20;
  for (int u = 0; u < 30; ++u) {
    std::vector<ItemIndex> items;
    for (ItemIndex i = 0; i < 10; ++i) items.push_back(u % 2 == 0 ? i : i + 10);
    m.user_items.push_back(std::move(items));
  }
  Hyperparameters params;
  params.bpr.factors = 6;
  params.bpr.epochs = 20;
  const Model model = train(Variant::Bpr, m, params, 11);
  REQUIRE(model.bpr_validation_loss.size() == 21);
  for (Real loss : model.bpr_validation_loss) CHECK(std::isfinite(loss));
  CHECK(model.bpr_validation_loss.back() < 0.5 * model.bpr_validation_loss.front());
}

TEST_CASE("training is deterministic in the seed") {
  const TrainMatrix m = random_matrix(4444, 20, 15, 6);
  const Hyperparameters params = small_factor_params();
  for (Variant v : kAllVariants) {
    const Model a = train(v, m, params, 97);
    const Model b = train(v, m, params, 97);
    const UserEmbedding ea = fold_in(a, std::vector<ItemIndex>{1, 5});
    const UserEmbedding eb = fold_in(b, std::vector<ItemIndex>{1, 5});
    CAPTURE(variant_name(v));
    CHECK(score_items(a, ea) == score_items(b, eb));
  }
  for (Variant v : {Variant::Rand, Variant::Als, Variant::Bpr}) {
    const Model a = train(v, m, params, 97);
    const Model c = train(v, m, params, 98);
    const UserEmbedding ea = fold_in(a, std::vector<ItemIndex>{1, 5});
    const UserEmbedding ec = fold_in(c, std::vector<ItemIndex>{1, 5});
    CAPTURE(variant_name(v));
    CHECK(score_items(a, ea) != score_items(c, ec));
  }
}

TEST_CASE("rand scores depend on the input set, not its order or duplicates") {
  const TrainMatrix m = random_matrix(5555, 10, 12, 5);
  const Model model = train(Variant::Rand, m, {}, 3);
  const Vec a = score_items(model, fold_in(model, std::vector<ItemIndex>{3, 1, 7}));
  const Vec b = score_items(model, fold_in(model, std::vector<ItemIndex>{7, 1, 3, 1}));
  const Vec c = score_items(model, fold_in(model, std::vector<ItemIndex>{3, 1}));
  CHECK(a == b);
  CHECK(a != c);
  for (ItemIndex i = 0; i < model.n_items; ++i) {
    CHECK(a[i] >= 0.0);
    CHECK(a[i] < 1.0);
  }
}

TEST_CASE("rand top picks are uniform across inputs") {
  TrainMatrix m;
  m.n_items = 20;
  m.user_items = {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19}};
  const Model model = train(Variant::Rand, m, {}, 12);
  std::vector<int> top_counts(20, 0);
  const int draws = 4000;
  for (int t = 0; t < draws; ++t) {
    // Distinct input sets from the bit pattern of t+1; each set hashes to an
    // independent score stream.
    std::vector<ItemIndex> input;
    for (ItemIndex i = 0; i < 20; ++i) {
      if (((t + 1) >> i) & 1) input.push_back(i);
    }
    const UserEmbedding emb = fold_in(model, input);
    const auto top = recommend(model, emb, 1, mask_of(20, {}));
    ++top_counts[static_cast<std::size_t>(top[0])];
  }
  // Binomial(4000, 1/20): mean 200, sigma ~ 13.8; allow five sigma.
  for (int i = 0; i < 20; ++i) {
    CAPTURE(i);
    CHECK(top_counts[static_cast<std::size_t>(i)] > 200 - 70);
    CHECK(top_counts[static_cast<std::size_t>(i)] < 200 + 70);
  }
}

TEST_CASE("fold_in validates its input") {
  const Model model = train(Variant::ItemKnn, two_block_matrix(), {}, 1);
  CHECK_THROWS_AS(fold_in(model, std::vector<ItemIndex>{}), DataError);
  CHECK_THROWS_AS(fold_in(model, std::vector<ItemIndex>{9}), DataError);
  CHECK_THROWS_AS(fold_in(model, std::vector<ItemIndex>{-1}), DataError);

  TrainMatrix m;
  m.n_items = 4;
  m.user_items = {{0, 1}, {0, 1}};  // items 2 and 3 exist but are never seen
  const Model partial = train(Variant::ItemKnn, m, {}, 1);
  CHECK_THROWS_AS(fold_in(partial, std::vector<ItemIndex>{2, 3}), DataError);
  // A mixed input works off its known part.
  const UserEmbedding emb = fold_in(partial, std::vector<ItemIndex>{2, 0});
  const auto top = recommend(partial, emb, 1, mask_of(4, {0, 2}));
  CHECK(top == std::vector<ItemIndex>{1});
}

TEST_CASE("recommend honors the exclusion mask and list length") {
  const Model model = train(Variant::Pop, two_block_matrix(), {}, 1);
  const UserEmbedding emb = fold_in(model, std::vector<ItemIndex>{0});
  CHECK(recommend(model, emb, 4, mask_of(4, {})).size() == 4);
  const auto rest = recommend(model, emb, 3, mask_of(4, {1}));
  CHECK(std::find(rest.begin(), rest.end(), 1) == rest.end());
  CHECK_THROWS_AS(recommend(model, emb, 4, mask_of(4, {1})), DataError);
  CHECK_THROWS_AS(recommend(model, emb, 0, mask_of(4, {})), DataError);
  CHECK_THROWS_AS(recommend(model, emb, 1, std::vector<std::uint8_t>(3, 0)), DataError);
}

TEST_CASE("models survive a save/load round trip") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "popaudit_model_roundtrip";
  std::filesystem::create_directories(dir);
  const TrainMatrix m = random_matrix(606, 18, 14, 6);
  const Hyperparameters params = small_factor_params();
  for (Variant v : kAllVariants) {
    const Model original = train(v, m, params, 21);
    const std::filesystem::path path = dir / (std::string(variant_name(v)) + ".model");
    save_model(original, path);
    const Model loaded = load_model(path);

    CHECK(loaded.variant == original.variant);
    CHECK(loaded.seed == original.seed);
    CHECK(loaded.n_items == original.n_items);
    CHECK(loaded.item_known == original.item_known);
    for (const std::vector<ItemIndex>& input :
         {std::vector<ItemIndex>{2}, std::vector<ItemIndex>{1, 4, 9}}) {
      const Vec a = score_items(original, fold_in(original, input));
      const Vec b = score_items(loaded, fold_in(loaded, input));
      CAPTURE(variant_name(v));
      CHECK(a == b);
    }

    std::ifstream sidecar(path.string() + ".json");
    REQUIRE(sidecar.good());
    const auto meta = nlohmann::json::parse(sidecar);
    CHECK(meta.at("variant") == variant_name(v));
    CHECK(meta.at("n_items") == original.n_items);
  }
  CHECK_THROWS_AS(load_model(dir / "missing.model"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("make_train_matrix keeps the catalog width and binarizes") {
  std::vector<Interaction> raw;
  raw.push_back({"u1", "a", 9, std::nullopt});
  raw.push_back({"u1", "c", 1, std::nullopt});
  raw.push_back({"u2", "b", 4, std::nullopt});
  const Dataset ds = Dataset::build(raw, {});
  const std::vector<UserIndex> train_users = {1, 0};
  const TrainMatrix m = make_train_matrix(ds, train_users);
  CHECK(m.n_items == 3);
  REQUIRE(m.user_items.size() == 2);
  CHECK(m.user_items[0] == std::vector<ItemIndex>{1});
  CHECK(m.user_items[1] == std::vector<ItemIndex>{0, 2});
  const Mat dense = m.dense();
  CHECK(dense.rows() == 2);
  CHECK(dense.sum() == 3.0);
  CHECK(dense.maxCoeff() == 1.0);
}
