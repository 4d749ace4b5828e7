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

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace popaudit {

// Dense Eigen types, templated on scalar. Everything numeric in the library
// funnels through these aliases so the working precision is a one-line change.
template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using ArrayX = Eigen::Array<T, Eigen::Dynamic, 1>;

using Real = double;
using Mat = MatrixX<Real>;
using Vec = VectorX<Real>;

using ItemIndex = std::int32_t;
using UserIndex = std::int32_t;
using PlayCount = std::uint64_t;

enum class Gender : std::uint8_t { Female, Male, Unknown };

inline const char* gender_token(Gender g) {
  switch (g) {
    case Gender::Female: return "f";
    case Gender::Male: return "m";
    default: return "u";
  }
}

// An aggregated (user, item) listening record. Duplicate raw events are summed
// during parsing; the timestamp kept is the latest one seen for the pair and
// only feeds the optional time-window filter.
struct Interaction {
  std::string user;
  std::string item;
  PlayCount play_count = 0;
  std::optional<std::int64_t> timestamp;
};

struct UserRecord {
  std::string user;
  Gender gender = Gender::Unknown;
};

// Error taxonomy. The CLI maps these onto exit codes: ConfigError -> 1,
// DataError -> 2, ExperimentError -> 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace popaudit
