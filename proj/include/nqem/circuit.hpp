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

#include <vector>

#include "nqem/pauli.hpp"
#include "nqem/qubit_state.hpp"
#include "nqem/rng.hpp"

namespace nqem {

struct RotationAngles {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// exp(-i theta P) for a Pauli P, full angle convention:
/// cos(theta) I - i sin(theta) P.
inline Eigen::Matrix2cd axis_rotation(PauliAxis axis, double theta) {
  return std::cos(theta) * Eigen::Matrix2cd::Identity() -
         cdouble(0, 1) * std::sin(theta) * pauli_matrix(axis);
}

/// exp(-i theta_z Z) exp(-i theta_y Y) exp(-i theta_x X).
inline Eigen::Matrix2cd rotation_matrix(const RotationAngles& a) {
  return axis_rotation(PauliAxis::Z, a.z) * axis_rotation(PauliAxis::Y, a.y) *
         axis_rotation(PauliAxis::X, a.x);
}

/// Layered random circuit: each layer is one independent rotation per qubit
/// followed by the nearest-neighbour CNOT chain. noise_rate 0 means unitary.
struct CircuitSpec {
  int num_qubits = 0;
  std::vector<std::vector<RotationAngles>> angles;  // [layer][qubit]
  double noise_rate = 0.0;

  int depth() const { return static_cast<int>(angles.size()); }
};

inline void check_circuit_spec(const CircuitSpec& spec) {
  require(spec.num_qubits >= 1, "circuit needs at least one qubit");
  require(spec.noise_rate >= 0.0 && spec.noise_rate <= 1.0,
          "noise_rate must lie in [0,1]");
  for (const auto& layer : spec.angles) {
    require(static_cast<int>(layer.size()) == spec.num_qubits,
            "rotation layer length does not match num_qubits");
    for (const auto& a : layer) {
      require(std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z),
              "rotation angle is not finite");
    }
  }
}

inline QubitState apply_single_qubit_rotations(
    const QubitState& state, const std::vector<RotationAngles>& angles) {
  require(static_cast<int>(angles.size()) == state.num_qubits,
          "angle list length does not match num_qubits");
  QubitState out = state;
  for (int q = 0; q < state.num_qubits; ++q) {
    apply_single_qubit_gate(out.amplitudes, out.num_qubits, q,
                            rotation_matrix(angles[q]));
  }
  return out;
}

/// CNOTs in fixed ascending order: control i, target i+1, i = 0..L-2.
inline QubitState apply_cnot_chain(const QubitState& state) {
  require(state.num_qubits >= 2, "cnot chain needs at least two qubits");
  QubitState out = state;
  for (int q = 0; q + 1 < state.num_qubits; ++q) {
    apply_cnot(out.amplitudes, out.num_qubits, q, q + 1);
  }
  return out;
}

/// (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z) on one qubit.
inline DensityOperator apply_depolarizing(const DensityOperator& rho,
                                          int qubit, double p) {
  require(p >= 0.0 && p <= 1.0, "depolarizing rate must lie in [0,1]");
  require(qubit >= 0 && qubit < rho.num_qubits, "qubit index out of range");
  if (p == 0.0) return rho;
  DensityOperator out{rho.num_qubits, (1.0 - p) * rho.matrix};
  for (PauliAxis axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
    CMatrix term = rho.matrix;
    conjugate_single_qubit_gate(term, rho.num_qubits, qubit,
                                pauli_matrix(axis));
    out.matrix += (p / 3.0) * term;
  }
  return out;
}

/// Statevector route; valid only for unitary circuits.
inline QubitState run_circuit_pure(const CircuitSpec& spec,
                                   const QubitState& input) {
  check_circuit_spec(spec);
  require(spec.noise_rate == 0.0,
          "run_circuit_pure requires a unitary circuit");
  require(spec.num_qubits == input.num_qubits,
          "circuit and state dimensions disagree");
  QubitState state = input;
  for (const auto& layer : spec.angles) {
    state = apply_single_qubit_rotations(state, layer);
    if (state.num_qubits >= 2) state = apply_cnot_chain(state);
  }
  return state;
}

/// Density-matrix route, used for all circuit outputs so noisy and noiseless
/// circuits share one code path. Depolarizing noise hits every qubit once
/// after each (rotation + CNOT) layer.
inline DensityOperator run_circuit(const CircuitSpec& spec,
                                   const QubitState& input) {
  check_circuit_spec(spec);
  require(spec.num_qubits == input.num_qubits,
          "circuit and state dimensions disagree");
  DensityOperator rho = density_from_pure(input);
  for (const auto& layer : spec.angles) {
    for (int q = 0; q < spec.num_qubits; ++q) {
      conjugate_single_qubit_gate(rho.matrix, rho.num_qubits, q,
                                  rotation_matrix(layer[q]));
    }
    for (int q = 0; q + 1 < spec.num_qubits; ++q) {
      conjugate_cnot(rho.matrix, rho.num_qubits, q, q + 1);
    }
    if (spec.noise_rate > 0.0) {
      for (int q = 0; q < spec.num_qubits; ++q) {
        rho = apply_depolarizing(rho, q, spec.noise_rate);
      }
    }
  }
  return rho;
}

/// All 3 * depth * num_qubits angles drawn uniformly from [0, 2 pi).
inline CircuitSpec random_circuit_spec(int num_qubits, int depth,
                                       double noise_rate, Rng& rng) {
  require(depth >= 0, "circuit depth must be >= 0");
  CircuitSpec spec;
  spec.num_qubits = num_qubits;
  spec.noise_rate = noise_rate;
  spec.angles.resize(depth);
  for (auto& layer : spec.angles) {
    layer.resize(num_qubits);
    for (auto& a : layer) {
      a.x = rng.uniform(0.0, 2.0 * kPi);
      a.y = rng.uniform(0.0, 2.0 * kPi);
      a.z = rng.uniform(0.0, 2.0 * kPi);
    }
  }
  check_circuit_spec(spec);
  return spec;
}

}  // namespace nqem
