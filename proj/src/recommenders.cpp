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

#include "popaudit/recommenders.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "popaudit/rng.hpp"

namespace popaudit {

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Rand: return "rand";
    case Variant::Pop: return "pop";
    case Variant::ItemKnn: return "itemknn";
    case Variant::Slim: return "slim";
    case Variant::Als: return "als";
    case Variant::Bpr: return "bpr";
  }
  throw ConfigError("variant_name: bad variant tag");
}

Variant variant_from_name(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (name == variant_name(v)) return v;
  }
  throw ConfigError("unknown algorithm name: " + std::string(name));
}

Mat TrainMatrix::dense() const {
  Mat x = Mat::Zero(static_cast<Eigen::Index>(user_items.size()), n_items);
  for (std::size_t u = 0; u < user_items.size(); ++u) {
    for (ItemIndex i : user_items[u]) x(static_cast<Eigen::Index>(u), i) = Real(1);
  }
  return x;
}

TrainMatrix make_train_matrix(const Dataset& dataset, std::span<const UserIndex> users) {
  TrainMatrix matrix;
  matrix.n_items = dataset.n_items();
  matrix.user_items.reserve(users.size());
  for (UserIndex u : users) {
    std::vector<ItemIndex> items;
    items.reserve(dataset.items_of(u).size());
    for (const ItemPlay& ip : dataset.items_of(u)) items.push_back(ip.item);
    matrix.user_items.push_back(std::move(items));
  }
  return matrix;
}

namespace {

void validate(const TrainMatrix& matrix) {
  if (matrix.n_items <= 0) throw DataError("train: empty item catalog");
  if (matrix.user_items.empty()) throw DataError("train: no train users");
  for (const auto& items : matrix.user_items) {
    for (ItemIndex i : items) {
      if (i < 0 || i >= matrix.n_items) throw DataError("train: item index out of range");
    }
  }
}

std::vector<std::uint8_t> known_items(const TrainMatrix& matrix) {
  std::vector<std::uint8_t> known(static_cast<std::size_t>(matrix.n_items), 0);
  for (const auto& items : matrix.user_items) {
    for (ItemIndex i : items) known[static_cast<std::size_t>(i)] = 1;
  }
  return known;
}

// X'X over the binary matrix, accumulated pair-wise per user. Costs the sum
// of squared history lengths, far below the dense product on sparse data.
Mat cooccurrence_gram(const TrainMatrix& matrix) {
  Mat gram = Mat::Zero(matrix.n_items, matrix.n_items);
  for (const auto& items : matrix.user_items) {
    for (ItemIndex a : items) {
      Real* col = gram.data() + static_cast<std::ptrdiff_t>(a) * matrix.n_items;
      for (ItemIndex b : items) col[b] += Real(1);
    }
  }
  return gram;
}

void train_pop(Model& model, const TrainMatrix& matrix) {
  model.pop_scores = Vec::Zero(matrix.n_items);
  for (const auto& items : matrix.user_items) {
    for (ItemIndex i : items) model.pop_scores[i] += Real(1);
  }
}

// Keeps, for every source item, its `neighbors` most similar co-occurring
// items by cosine over binary columns (ties broken by item index).
void train_itemknn(Model& model, const TrainMatrix& matrix) {
  const ItemKnnParams& p = model.params.itemknn;
  if (p.neighbors <= 0) throw ConfigError("itemknn: neighbors must be positive");
  if (p.shrinkage < 0) throw ConfigError("itemknn: shrinkage must be non-negative");
  const Mat gram = cooccurrence_gram(matrix);
  const ItemIndex n = matrix.n_items;
  Vec norms(n);
  for (ItemIndex i = 0; i < n; ++i) norms[i] = std::sqrt(gram(i, i));
  model.weights.columns.assign(static_cast<std::size_t>(n), {});
  std::vector<std::pair<ItemIndex, Real>> candidates;
  for (ItemIndex j = 0; j < n; ++j) {
    if (gram(j, j) == 0) continue;
    candidates.clear();
    for (ItemIndex i = 0; i < n; ++i) {
      if (i == j || gram(i, j) == 0) continue;
      const Real denom = norms[i] * norms[j] + p.shrinkage;
      if (denom > 0) candidates.emplace_back(i, gram(i, j) / denom);
    }
    const std::size_t keep = std::min<std::size_t>(candidates.size(),
                                                   static_cast<std::size_t>(p.neighbors));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [](const auto& a, const auto& b) {
                        if (a.second != b.second) return a.second > b.second;
                        return a.first < b.first;
                      });
    candidates.resize(keep);
    std::sort(candidates.begin(), candidates.end());
    model.weights.columns[static_cast<std::size_t>(j)] = candidates;
  }
}

// Elastic-net regression of every item column on the remaining columns with
// non-negative weights and a zero diagonal, solved by cyclic coordinate
// descent over the gram matrix. Because the data is binary and weights are
// non-negative, coordinates whose co-occurrence with the target is zero stay
// at zero, so each column only sweeps its co-occurring candidates.
void train_slim(Model& model, const TrainMatrix& matrix) {
  const SlimParams& p = model.params.slim;
  if (p.l1 < 0 || p.l2 < 0) throw ConfigError("slim: penalties must be non-negative");
  if (p.max_sweeps <= 0) throw ConfigError("slim: max_sweeps must be positive");
  const Mat gram = cooccurrence_gram(matrix);
  const ItemIndex n = matrix.n_items;
  model.weights.columns.assign(static_cast<std::size_t>(n), {});
  model.slim_capped_columns = 0;

  std::vector<ItemIndex> support;
  std::vector<Real> w, gw;
  std::vector<std::vector<std::pair<ItemIndex, Real>>> by_source(static_cast<std::size_t>(n));
  for (ItemIndex j = 0; j < n; ++j) {
    if (gram(j, j) == 0) continue;
    support.clear();
    for (ItemIndex k = 0; k < n; ++k) {
      if (k != j && gram(k, j) > 0) support.push_back(k);
    }
    if (support.empty()) continue;
    const std::size_t s = support.size();
    w.assign(s, 0);
    gw.assign(s, 0);  // gw[a] = (gram * w)(support[a])
    bool converged = false;
    for (std::int32_t sweep = 0; sweep < p.max_sweeps && !converged; ++sweep) {
      Real max_change = 0;
      for (std::size_t a = 0; a < s; ++a) {
        const ItemIndex k = support[a];
        const Real gkk = gram(k, k);
        const Real numerator = gram(k, j) - (gw[a] - gkk * w[a]) - p.l1;
        const Real updated = std::max(Real(0), numerator / (gkk + p.l2));
        const Real change = updated - w[a];
        if (change != 0) {
          w[a] = updated;
          const Real* col = gram.data() + static_cast<std::ptrdiff_t>(k) * n;
          for (std::size_t b = 0; b < s; ++b) gw[b] += change * col[support[b]];
          max_change = std::max(max_change, std::abs(change));
        }
      }
      converged = max_change <= p.tolerance;
    }
    if (!converged) ++model.slim_capped_columns;
    for (std::size_t a = 0; a < s; ++a) {
      if (w[a] > 0) by_source[static_cast<std::size_t>(support[a])].emplace_back(j, w[a]);
    }
  }
  for (ItemIndex k = 0; k < n; ++k) {
    auto& col = by_source[static_cast<std::size_t>(k)];
    std::sort(col.begin(), col.end());
    model.weights.columns[static_cast<std::size_t>(k)] = std::move(col);
  }
}

// Factors are held factor-major during training (one contiguous column per
// user or item); the public Model stores the item factors transposed back to
// n_items x factors.
Real als_objective_value(const Mat& x, const Mat& y, const TrainMatrix& matrix, Real alpha,
                         Real reg) {
  const Mat gx = x * x.transpose();
  const Mat gy = y * y.transpose();
  Real objective = gx.cwiseProduct(gy).sum();
  for (std::size_t u = 0; u < matrix.user_items.size(); ++u) {
    const auto xu = x.col(static_cast<Eigen::Index>(u));
    for (ItemIndex i : matrix.user_items[u]) {
      const Real s = xu.dot(y.col(i));
      objective += -s * s + (Real(1) + alpha) * (Real(1) - s) * (Real(1) - s);
    }
  }
  objective += reg * (x.squaredNorm() + y.squaredNorm());
  return objective;
}

// Implicit-feedback alternating least squares with confidence 1 + alpha * r.
void train_als(Model& model, const TrainMatrix& matrix) {
  const AlsParams& p = model.params.als;
  if (p.factors <= 0 || p.iterations <= 0) throw ConfigError("als: bad factor/iteration count");
  const std::size_t m = matrix.user_items.size();
  const ItemIndex n = matrix.n_items;
  const Eigen::Index f = p.factors;

  auto eng = rng::make_engine(rng::mix(model.seed, 0xa15u));
  Mat x(f, static_cast<Eigen::Index>(m)), y(f, n);
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    for (Eigen::Index k = 0; k < f; ++k) y(k, i) = Real(0.01) * rng::normal(eng);
  }
  for (Eigen::Index u = 0; u < x.cols(); ++u) {
    for (Eigen::Index k = 0; k < f; ++k) x(k, u) = Real(0.01) * rng::normal(eng);
  }

  // items_of_user is given; build users_of_item once for the item solves
  std::vector<std::vector<std::int32_t>> users_of_item(static_cast<std::size_t>(n));
  for (std::size_t u = 0; u < m; ++u) {
    for (ItemIndex i : matrix.user_items[u]) {
      users_of_item[static_cast<std::size_t>(i)].push_back(static_cast<std::int32_t>(u));
    }
  }

  model.als_objective.clear();
  model.als_objective.push_back(als_objective_value(x, y, matrix, p.alpha, p.regularization));

  const Mat eye = Mat::Identity(f, f);
  Mat gathered;
  for (std::int32_t iter = 0; iter < p.iterations; ++iter) {
    const Mat gy = y * y.transpose();
    for (std::size_t u = 0; u < m; ++u) {
      const auto& items = matrix.user_items[u];
      Mat a = gy + p.regularization * eye;
      Vec b = Vec::Zero(f);
      if (!items.empty()) {
        gathered.resize(f, static_cast<Eigen::Index>(items.size()));
        for (std::size_t r = 0; r < items.size(); ++r) {
          gathered.col(static_cast<Eigen::Index>(r)) = y.col(items[r]);
        }
        a.noalias() += p.alpha * (gathered * gathered.transpose());
        b = (Real(1) + p.alpha) * gathered.rowwise().sum();
      }
      x.col(static_cast<Eigen::Index>(u)) = a.ldlt().solve(b);
    }
    model.als_objective.push_back(als_objective_value(x, y, matrix, p.alpha, p.regularization));

    const Mat gx = x * x.transpose();
    for (ItemIndex i = 0; i < n; ++i) {
      const auto& users = users_of_item[static_cast<std::size_t>(i)];
      Mat a = gx + p.regularization * eye;
      Vec b = Vec::Zero(f);
      if (!users.empty()) {
        gathered.resize(f, static_cast<Eigen::Index>(users.size()));
        for (std::size_t r = 0; r < users.size(); ++r) {
          gathered.col(static_cast<Eigen::Index>(r)) = x.col(users[r]);
        }
        a.noalias() += p.alpha * (gathered * gathered.transpose());
        b = (Real(1) + p.alpha) * gathered.rowwise().sum();
      }
      y.col(i) = a.ldlt().solve(b);
    }
    model.als_objective.push_back(als_objective_value(x, y, matrix, p.alpha, p.regularization));
  }
  model.item_factors = y.transpose();
  model.factor_gram = y * y.transpose();
}

// Bayesian personalized ranking with one uniformly sampled negative per
// positive per epoch; single-threaded SGD keeps the update order, and with it
// the result, deterministic.
void train_bpr(Model& model, const TrainMatrix& matrix) {
  const BprParams& p = model.params.bpr;
  if (p.factors <= 0 || p.epochs <= 0) throw ConfigError("bpr: bad factor/epoch count");
  const std::size_t m = matrix.user_items.size();
  const ItemIndex n = matrix.n_items;
  const Eigen::Index f = p.factors;

  auto eng = rng::make_engine(rng::mix(model.seed, 0xb42u));
  Mat x(f, static_cast<Eigen::Index>(m)), y(f, n);
  for (Eigen::Index u = 0; u < x.cols(); ++u) {
    for (Eigen::Index k = 0; k < f; ++k) x(k, u) = Real(0.1) * rng::normal(eng);
  }
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    for (Eigen::Index k = 0; k < f; ++k) y(k, i) = Real(0.1) * rng::normal(eng);
  }

  std::vector<std::pair<std::int32_t, ItemIndex>> positives;
  for (std::size_t u = 0; u < m; ++u) {
    for (ItemIndex i : matrix.user_items[u]) {
      positives.emplace_back(static_cast<std::int32_t>(u), i);
    }
  }
  if (positives.empty()) throw DataError("bpr: no train interactions");

  auto sample_negative = [&](rng::Engine& e, std::int32_t u) -> ItemIndex {
    const auto& items = matrix.user_items[static_cast<std::size_t>(u)];
    if (items.size() >= static_cast<std::size_t>(n)) return -1;
    while (true) {
      const ItemIndex j =
          static_cast<ItemIndex>(rng::uniform_below(e, static_cast<std::uint64_t>(n)));
      if (!std::binary_search(items.begin(), items.end(), j)) return j;
    }
  };

  // Fixed validation triplets for the learning-signal diagnostic.
  auto val_eng = rng::make_engine(rng::mix(model.seed, 0xb42a71u));
  const std::size_t n_val = std::min<std::size_t>(positives.size(), 2000);
  std::vector<std::array<std::int32_t, 3>> validation;
  validation.reserve(n_val);
  for (std::size_t t = 0; t < n_val; ++t) {
    const auto& [u, i] = positives[static_cast<std::size_t>(
        rng::uniform_below(val_eng, positives.size()))];
    const ItemIndex j = sample_negative(val_eng, u);
    if (j >= 0) validation.push_back(std::array<std::int32_t, 3>{u, i, j});
  }
  auto validation_loss = [&]() {
    if (validation.empty()) return Real(0);
    Real loss = 0;
    for (const auto& [u, i, j] : validation) {
      const Real margin = x.col(u).dot(y.col(i) - y.col(j));
      loss += std::log1p(std::exp(-margin));
    }
    return loss / static_cast<Real>(validation.size());
  };

  model.bpr_validation_loss.clear();
  model.bpr_validation_loss.push_back(validation_loss());

  Vec xu(f), diff(f);
  for (std::int32_t epoch = 0; epoch < p.epochs; ++epoch) {
    rng::shuffle(eng, positives);
    for (const auto& [u, i] : positives) {
      const ItemIndex j = sample_negative(eng, u);
      if (j < 0) continue;
      xu = x.col(u);
      diff = y.col(i) - y.col(j);
      const Real margin = xu.dot(diff);
      const Real g = Real(1) / (Real(1) + std::exp(margin));
      x.col(u) += p.learning_rate * (g * diff - p.regularization * xu);
      y.col(i) += p.learning_rate * (g * xu - p.regularization * y.col(i));
      y.col(j) += p.learning_rate * (-g * xu - p.regularization * y.col(j));
    }
    model.bpr_validation_loss.push_back(validation_loss());
  }
  model.item_factors = y.transpose();
}

}  // namespace

Model train(Variant variant, const TrainMatrix& matrix, const Hyperparameters& params,
            std::uint64_t seed) {
  validate(matrix);
  Model model;
  model.variant = variant;
  model.seed = seed;
  model.params = params;
  model.n_items = matrix.n_items;
  model.item_known = known_items(matrix);
  switch (variant) {
    case Variant::Rand: break;
    case Variant::Pop: train_pop(model, matrix); break;
    case Variant::ItemKnn: train_itemknn(model, matrix); break;
    case Variant::Slim: train_slim(model, matrix); break;
    case Variant::Als: train_als(model, matrix); break;
    case Variant::Bpr: train_bpr(model, matrix); break;
  }
  return model;
}

UserEmbedding fold_in(const Model& model, std::span<const ItemIndex> input) {
  UserEmbedding emb;
  emb.input.assign(input.begin(), input.end());
  std::sort(emb.input.begin(), emb.input.end());
  emb.input.erase(std::unique(emb.input.begin(), emb.input.end()), emb.input.end());
  if (emb.input.empty()) throw DataError("fold_in: empty input item set");
  bool any_known = false;
  for (ItemIndex i : emb.input) {
    if (i < 0 || i >= model.n_items) throw DataError("fold_in: item index out of range");
    any_known = any_known || model.item_known[static_cast<std::size_t>(i)] != 0;
  }
  if (!any_known) throw DataError("fold_in: no input item known to the model");

  switch (model.variant) {
    case Variant::Rand:
      emb.rand_stream = rng::mix(model.seed, rng::fnv1a64(emb.input));
      break;
    case Variant::Pop:
    case Variant::ItemKnn:
    case Variant::Slim:
      break;
    case Variant::Als: {
      const Eigen::Index f = model.item_factors.cols();
      Mat a = model.factor_gram +
              model.params.als.regularization * Mat::Identity(f, f);
      Vec b = Vec::Zero(f);
      Mat gathered(static_cast<Eigen::Index>(emb.input.size()), f);
      for (std::size_t r = 0; r < emb.input.size(); ++r) {
        gathered.row(static_cast<Eigen::Index>(r)) = model.item_factors.row(emb.input[r]);
      }
      a.noalias() += model.params.als.alpha * (gathered.transpose() * gathered);
      b = (Real(1) + model.params.als.alpha) * gathered.colwise().sum().transpose();
      emb.factor = a.ldlt().solve(b);
      break;
    }
    case Variant::Bpr: {
      const Eigen::Index f = model.item_factors.cols();
      Mat gathered(static_cast<Eigen::Index>(emb.input.size()), f);
      for (std::size_t r = 0; r < emb.input.size(); ++r) {
        gathered.row(static_cast<Eigen::Index>(r)) = model.item_factors.row(emb.input[r]);
      }
      const Mat a = gathered.transpose() * gathered +
                    model.params.bpr.regularization * Mat::Identity(f, f);
      const Vec b = gathered.colwise().sum().transpose();
      emb.factor = a.ldlt().solve(b);
      break;
    }
  }
  return emb;
}

Vec score_items(const Model& model, const UserEmbedding& embedding) {
  switch (model.variant) {
    case Variant::Rand: {
      Vec scores(model.n_items);
      for (ItemIndex i = 0; i < model.n_items; ++i) {
        const std::uint64_t h = rng::mix(embedding.rand_stream, static_cast<std::uint64_t>(i));
        scores[i] = static_cast<Real>(h >> 11) * 0x1.0p-53;
      }
      return scores;
    }
    case Variant::Pop:
      return model.pop_scores;
    case Variant::ItemKnn:
    case Variant::Slim: {
      Vec scores = Vec::Zero(model.n_items);
      for (ItemIndex j : embedding.input) {
        for (const auto& [target, weight] : model.weights.columns[static_cast<std::size_t>(j)]) {
          scores[target] += weight;
        }
      }
      return scores;
    }
    case Variant::Als:
    case Variant::Bpr:
      return model.item_factors * embedding.factor;
  }
  throw ExperimentError("score_items: bad variant tag");
}

std::vector<ItemIndex> recommend(const Model& model, const UserEmbedding& embedding,
                                 std::int32_t n, const std::vector<std::uint8_t>& exclude) {
  if (exclude.size() != static_cast<std::size_t>(model.n_items)) {
    throw DataError("recommend: exclusion mask size mismatch");
  }
  if (n <= 0) throw DataError("recommend: non-positive list length");
  std::vector<ItemIndex> allowed;
  allowed.reserve(static_cast<std::size_t>(model.n_items));
  for (ItemIndex i = 0; i < model.n_items; ++i) {
    if (!exclude[static_cast<std::size_t>(i)]) allowed.push_back(i);
  }
  if (static_cast<std::size_t>(n) > allowed.size()) {
    throw DataError("recommend: requested " + std::to_string(n) + " items but only " +
                    std::to_string(allowed.size()) + " are available");
  }
  const Vec scores = score_items(model, embedding);
  std::partial_sort(allowed.begin(), allowed.begin() + n, allowed.end(),
                    [&](ItemIndex a, ItemIndex b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  allowed.resize(static_cast<std::size_t>(n));
  return allowed;
}

namespace {

constexpr std::uint32_t kModelMagic = 0x4d414250;  // "PBAM"
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("model file truncated");
  return value;
}

void put_matrix(std::ostream& out, const Mat& m) {
  put<std::int64_t>(out, m.rows());
  put<std::int64_t>(out, m.cols());
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(Real) * static_cast<std::size_t>(m.size())));
}

Mat get_matrix(std::istream& in) {
  const auto rows = get<std::int64_t>(in);
  const auto cols = get<std::int64_t>(in);
  if (rows < 0 || cols < 0 || rows * cols > (std::int64_t(1) << 32)) {
    throw DataError("model file: implausible matrix dimensions");
  }
  Mat m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(Real) * static_cast<std::size_t>(m.size())));
  if (!in) throw DataError("model file truncated");
  return m;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("save_model: cannot open " + path.string());
  put(out, kModelMagic);
  put(out, kModelVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(model.variant));
  put<std::uint64_t>(out, model.seed);
  put<std::int32_t>(out, model.params.itemknn.neighbors);
  put<Real>(out, model.params.itemknn.shrinkage);
  put<Real>(out, model.params.slim.l1);
  put<Real>(out, model.params.slim.l2);
  put<std::int32_t>(out, model.params.slim.max_sweeps);
  put<Real>(out, model.params.slim.tolerance);
  put<std::int32_t>(out, model.params.als.factors);
  put<Real>(out, model.params.als.regularization);
  put<Real>(out, model.params.als.alpha);
  put<std::int32_t>(out, model.params.als.iterations);
  put<std::int32_t>(out, model.params.bpr.factors);
  put<Real>(out, model.params.bpr.learning_rate);
  put<Real>(out, model.params.bpr.regularization);
  put<std::int32_t>(out, model.params.bpr.epochs);
  put<std::int32_t>(out, model.n_items);
  out.write(reinterpret_cast<const char*>(model.item_known.data()),
            static_cast<std::streamsize>(model.item_known.size()));

  switch (model.variant) {
    case Variant::Rand: break;
    case Variant::Pop: {
      Mat scores = model.pop_scores;
      put_matrix(out, scores);
      break;
    }
    case Variant::ItemKnn:
    case Variant::Slim: {
      for (const auto& col : model.weights.columns) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(col.size()));
        for (const auto& [target, weight] : col) {
          put<std::int32_t>(out, target);
          put<Real>(out, weight);
        }
      }
      break;
    }
    case Variant::Als:
    case Variant::Bpr:
      put_matrix(out, model.item_factors);
      break;
  }
  if (!out) throw DataError("save_model: write failed for " + path.string());
  out.close();

  nlohmann::ordered_json meta;
  meta["format"] = "popaudit-model";
  meta["version"] = kModelVersion;
  meta["variant"] = variant_name(model.variant);
  meta["seed"] = model.seed;
  meta["n_items"] = model.n_items;
  meta["params"] = {
      {"itemknn",
       {{"neighbors", model.params.itemknn.neighbors},
        {"shrinkage", model.params.itemknn.shrinkage}}},
      {"slim",
       {{"l1", model.params.slim.l1},
        {"l2", model.params.slim.l2},
        {"max_sweeps", model.params.slim.max_sweeps},
        {"tolerance", model.params.slim.tolerance}}},
      {"als",
       {{"factors", model.params.als.factors},
        {"regularization", model.params.als.regularization},
        {"alpha", model.params.als.alpha},
        {"iterations", model.params.als.iterations}}},
      {"bpr",
       {{"factors", model.params.bpr.factors},
        {"learning_rate", model.params.bpr.learning_rate},
        {"regularization", model.params.bpr.regularization},
        {"epochs", model.params.bpr.epochs}}}};
  if (!model.als_objective.empty()) meta["als_objective"] = model.als_objective;
  if (!model.bpr_validation_loss.empty()) {
    meta["bpr_validation_loss"] = model.bpr_validation_loss;
  }
  if (model.variant == Variant::Slim) meta["slim_capped_columns"] = model.slim_capped_columns;
  std::ofstream side(path.string() + ".json");
  if (!side) throw DataError("save_model: cannot open sidecar for " + path.string());
  side << meta.dump(2) << "\n";
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_model: cannot open " + path.string());
  if (get<std::uint32_t>(in) != kModelMagic) throw DataError("load_model: bad magic");
  if (get<std::uint32_t>(in) != kModelVersion) throw DataError("load_model: bad version");
  Model model;
  model.variant = static_cast<Variant>(get<std::uint8_t>(in));
  model.seed = get<std::uint64_t>(in);
  model.params.itemknn.neighbors = get<std::int32_t>(in);
  model.params.itemknn.shrinkage = get<Real>(in);
  model.params.slim.l1 = get<Real>(in);
  model.params.slim.l2 = get<Real>(in);
  model.params.slim.max_sweeps = get<std::int32_t>(in);
  model.params.slim.tolerance = get<Real>(in);
  model.params.als.factors = get<std::int32_t>(in);
  model.params.als.regularization = get<Real>(in);
  model.params.als.alpha = get<Real>(in);
  model.params.als.iterations = get<std::int32_t>(in);
  model.params.bpr.factors = get<std::int32_t>(in);
  model.params.bpr.learning_rate = get<Real>(in);
  model.params.bpr.regularization = get<Real>(in);
  model.params.bpr.epochs = get<std::int32_t>(in);
  model.n_items = get<std::int32_t>(in);
  if (model.n_items < 0) throw DataError("load_model: bad item count");
  model.item_known.resize(static_cast<std::size_t>(model.n_items));
  in.read(reinterpret_cast<char*>(model.item_known.data()),
          static_cast<std::streamsize>(model.item_known.size()));
  if (!in) throw DataError("model file truncated");

  switch (model.variant) {
    case Variant::Rand: break;
    case Variant::Pop:
      model.pop_scores = get_matrix(in);
      break;
    case Variant::ItemKnn:
    case Variant::Slim: {
      model.weights.columns.assign(static_cast<std::size_t>(model.n_items), {});
      for (auto& col : model.weights.columns) {
        const auto nnz = get<std::uint32_t>(in);
        col.reserve(nnz);
        for (std::uint32_t e = 0; e < nnz; ++e) {
          const auto target = get<std::int32_t>(in);
          const auto weight = get<Real>(in);
          col.emplace_back(target, weight);
        }
      }
      break;
    }
    case Variant::Als:
    case Variant::Bpr:
      model.item_factors = get_matrix(in);
      if (model.variant == Variant::Als) {
        model.factor_gram = model.item_factors.transpose() * model.item_factors;
      }
      break;
    default:
      throw DataError("load_model: bad variant tag");
  }
  return model;
}

}  // namespace popaudit
