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
#include <filesystem>
#include <utility>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "popaudit/dataset.hpp"
#include "popaudit/types.hpp"

namespace popaudit {

enum class Variant : std::uint8_t { Rand, Pop, ItemKnn, Slim, Als, Bpr };

inline constexpr std::array<Variant, 6> kAllVariants = {
    Variant::Rand, Variant::Pop, Variant::ItemKnn, Variant::Slim, Variant::Als, Variant::Bpr};

const char* variant_name(Variant v);
Variant variant_from_name(std::string_view name);

struct ItemKnnParams {
  std::int32_t neighbors = 100;
  Real shrinkage = 0;
};

struct SlimParams {
  Real l1 = 1e-3;
  Real l2 = 1e-3;
  std::int32_t max_sweeps = 50;
  Real tolerance = 1e-4;
};

struct AlsParams {
  std::int32_t factors = 64;
  Real regularization = 0.01;
  Real alpha = 40;
  std::int32_t iterations = 15;
};

struct BprParams {
  std::int32_t factors = 64;
  Real learning_rate = 0.05;
  Real regularization = 0.0025;
  std::int32_t epochs = 30;
};

struct Hyperparameters {
  ItemKnnParams itemknn;
  SlimParams slim;
  AlsParams als;
  BprParams bpr;
};

// Binary train matrix in user-major sparse form; item indices refer to the
// shared catalog, rows are the train users only.
struct TrainMatrix {
  ItemIndex n_items = 0;
  std::vector<std::vector<ItemIndex>> user_items;

  Mat dense() const;
};

TrainMatrix make_train_matrix(const Dataset& dataset, std::span<const UserIndex> users);

// Sparse item-to-item weights stored by source item: columns[j] lists
// (target item, weight) pairs, so scoring accumulates one source at a time.
struct SparseColumns {
  std::vector<std::vector<std::pair<ItemIndex, Real>>> columns;
};

// A trained recommender. Immutable after train(); which members carry data
// depends on the variant.
struct Model {
  Variant variant = Variant::Rand;
  std::uint64_t seed = 0;
  Hyperparameters params;
  ItemIndex n_items = 0;
  std::vector<std::uint8_t> item_known;  // item had at least one train interaction

  Vec pop_scores;        // pop: distinct train users per item
  SparseColumns weights;  // itemknn / slim
  Mat item_factors;      // als / bpr, n_items x factors
  Mat factor_gram;       // als: item_factors' * item_factors, cached for fold-in

  // Training diagnostics. ALS: full objective after init and after every
  // half-sweep. BPR: mean -ln sigmoid(margin) on a fixed seeded triplet
  // sample, before training and after each epoch.
  std::vector<Real> als_objective;
  std::vector<Real> bpr_validation_loss;
  std::int32_t slim_capped_columns = 0;
};

Model train(Variant variant, const TrainMatrix& matrix, const Hyperparameters& params,
            std::uint64_t seed);

// Per-user state needed for scoring: the fold-in input items plus, for the
// factor models, a user factor from a single regularized least-squares solve
// against the trained item factors.
struct UserEmbedding {
  std::vector<ItemIndex> input;  // sorted
  Vec factor;
  std::uint64_t rand_stream = 0;
};

UserEmbedding fold_in(const Model& model, std::span<const ItemIndex> input);

// Scores for every catalog item; identical (model, embedding) pairs yield
// identical vectors. RAND scores are seeded per-item hashes, which makes its
// top-n selection a uniform draw without replacement.
Vec score_items(const Model& model, const UserEmbedding& embedding);

// Top-n items by (score descending, item index ascending) over items not in
// the exclusion mask.
std::vector<ItemIndex> recommend(const Model& model, const UserEmbedding& embedding,
                                 std::int32_t n, const std::vector<std::uint8_t>& exclude);

// Versioned little-endian binary container plus a JSON metadata sidecar at
// path + ".json".
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace popaudit
