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

#include <string>
#include <vector>

#include "nqem/circuit.hpp"

namespace nqem {

enum class EnsembleKind { rotated_zero, rotated_ghz, rotated_plus };

inline EnsembleKind parse_ensemble_kind(const std::string& s) {
  if (s == "rotated_zero") return EnsembleKind::rotated_zero;
  if (s == "rotated_ghz") return EnsembleKind::rotated_ghz;
  if (s == "rotated_plus") return EnsembleKind::rotated_plus;
  throw_argument("unknown ensemble kind '" + s + "'");
}

inline std::string ensemble_kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::rotated_zero: return "rotated_zero";
    case EnsembleKind::rotated_ghz: return "rotated_ghz";
    case EnsembleKind::rotated_plus: return "rotated_plus";
  }
  throw_argument("invalid ensemble kind");
}

/// One independent (theta_x, theta_y, theta_z) per qubit, each uniform in
/// [0, angle_bound). Draw order is fixed (per qubit: x, y, z) so fixed seeds
/// reproduce states bit for bit.
inline std::vector<RotationAngles> sample_rotation_angles(int num_qubits,
                                                          double angle_bound,
                                                          Rng& rng) {
  require(angle_bound > 0.0, "angle_bound must be > 0");
  std::vector<RotationAngles> angles(num_qubits);
  for (auto& a : angles) {
    a.x = rng.uniform(0.0, angle_bound);
    a.y = rng.uniform(0.0, angle_bound);
    a.z = rng.uniform(0.0, angle_bound);
  }
  return angles;
}

inline QubitState base_state(EnsembleKind kind, int num_qubits) {
  switch (kind) {
    case EnsembleKind::rotated_zero: return make_zero_state(num_qubits);
    case EnsembleKind::rotated_ghz: return make_ghz_state(num_qubits);
    case EnsembleKind::rotated_plus: return make_plus_state(num_qubits);
  }
  throw_argument("invalid ensemble kind");
}

inline QubitState prepare_input_state(EnsembleKind kind, int num_qubits,
                                      double angle_bound, Rng& rng) {
  const auto angles = sample_rotation_angles(num_qubits, angle_bound, rng);
  return apply_single_qubit_rotations(base_state(kind, num_qubits), angles);
}

inline bool ensemble_is_product(EnsembleKind kind) {
  return kind != EnsembleKind::rotated_ghz;
}

/// Per-site factors of a rotated product ensemble, usable directly as a
/// bond-dimension-1 tensor-network input. Consumes the same number of RNG
/// draws as prepare_input_state with the same seed.
inline std::vector<Eigen::Vector2cd> prepare_product_factors(
    EnsembleKind kind, int num_qubits, double angle_bound, Rng& rng) {
  require(ensemble_is_product(kind),
          "ensemble is not a product of single-site states");
  const auto angles = sample_rotation_angles(num_qubits, angle_bound, rng);
  Eigen::Vector2cd base;
  if (kind == EnsembleKind::rotated_zero) {
    base << 1.0, 0.0;
  } else {
    base << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  }
  std::vector<Eigen::Vector2cd> factors(num_qubits);
  for (int q = 0; q < num_qubits; ++q) {
    factors[q] = rotation_matrix(angles[q]) * base;
  }
  return factors;
}

}  // namespace nqem
