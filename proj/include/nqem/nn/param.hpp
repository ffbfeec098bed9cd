// Copyright 2026 The nqem Authors
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

#include <Eigen/Dense>
#include <cstring>
#include <string>
#include <vector>

#include "nqem/common.hpp"
#include "nqem/rng.hpp"

namespace nqem {

/// Named trainable array with its gradient buffer. Vectors are stored as
/// n x 1 matrices.
struct ParamArray {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  ParamArray() = default;
  ParamArray(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)),
        value(Eigen::MatrixXd::Zero(rows, cols)),
        grad(Eigen::MatrixXd::Zero(rows, cols)) {}

  Eigen::Index size() const { return value.size(); }
};

using ParamRefs = std::vector<ParamArray*>;

inline void zero_grads(const ParamRefs& params) {
  for (ParamArray* p : params) p->grad.setZero();
}

/// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], filled in a fixed
/// (row, column) order so a fixed seed reproduces parameters exactly.
inline void init_uniform(ParamArray& p, int fan_in, Rng& rng) {
  require(fan_in >= 1, "fan_in must be >= 1");
  const double bound = 1.0 / std::sqrt(double(fan_in));
  for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
      p.value(r, c) = rng.uniform(-bound, bound);
    }
  }
}

inline void check_finite(const ParamRefs& params) {
  for (const ParamArray* p : params) {
    require(p->value.allFinite(), "parameter '" + p->name + "' not finite");
  }
}

/// Order-sensitive digest of parameter names, shapes, and exact value bytes.
/// Used to prove a network was not touched by a later training stage.
inline uint64_t params_checksum(const ParamRefs& params) {
  uint64_t h = 1469598103934665603ull;
  auto mix_bytes = [&h](const void* data, size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  for (const ParamArray* p : params) {
    mix_bytes(p->name.data(), p->name.size());
    const int64_t rows = p->value.rows();
    const int64_t cols = p->value.cols();
    mix_bytes(&rows, sizeof(rows));
    mix_bytes(&cols, sizeof(cols));
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        const double v = p->value(r, c);
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        mix_bytes(&bits, sizeof(bits));
      }
    }
  }
  return h;
}

}  // namespace nqem
