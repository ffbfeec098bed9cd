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

#include "nqem/qubit_state.hpp"

namespace nqem {

enum class PauliAxis { X, Y, Z };

inline char pauli_axis_char(PauliAxis a) {
  switch (a) {
    case PauliAxis::X: return 'X';
    case PauliAxis::Y: return 'Y';
    case PauliAxis::Z: return 'Z';
  }
  throw_argument("invalid Pauli axis");
}

inline PauliAxis parse_pauli_axis(char c) {
  switch (c) {
    case 'X': return PauliAxis::X;
    case 'Y': return PauliAxis::Y;
    case 'Z': return PauliAxis::Z;
    default: throw_argument(std::string("invalid Pauli axis character '") + c + "'");
  }
}

inline std::vector<PauliAxis> parse_pauli_axes(const std::string& s) {
  std::vector<PauliAxis> axes;
  axes.reserve(s.size());
  for (char c : s) axes.push_back(parse_pauli_axis(c));
  return axes;
}

inline Eigen::Matrix2cd pauli_matrix(PauliAxis a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case PauliAxis::X:
      m << 0, 1, 1, 0;
      break;
    case PauliAxis::Y:
      m << 0, cdouble(0, -1), cdouble(0, 1), 0;
      break;
    case PauliAxis::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

/// Unitary V with V |axis,+1> = |0> and V |axis,-1> = |1>, so that a
/// computational-basis readout after V realises the axis measurement with
/// eigenvalue +1 recorded as bit 0.
inline Eigen::Matrix2cd basis_change_matrix(PauliAxis a) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd m;
  switch (a) {
    case PauliAxis::X:
      m << s, s, s, -s;
      break;
    case PauliAxis::Y:
      // H * S^dagger.
      m << s, cdouble(0, -s), s, cdouble(0, s);
      break;
    case PauliAxis::Z:
      m.setIdentity();
      break;
  }
  return m;
}

/// A joint Pauli measurement on a subset of sites. Sites must be strictly
/// ascending; outcomes are indexed site-major over the listed sites with
/// eigenvalue +1 mapping to bit 0.
struct PauliBasisSpec {
  std::vector<int> sites;
  std::vector<PauliAxis> axes;

  int num_sites() const { return static_cast<int>(sites.size()); }
  Eigen::Index num_outcomes() const {
    return Eigen::Index(1) << sites.size();
  }
};

inline PauliBasisSpec full_pauli_basis(const std::vector<PauliAxis>& axes) {
  PauliBasisSpec spec;
  spec.axes = axes;
  spec.sites.resize(axes.size());
  for (int i = 0; i < static_cast<int>(axes.size()); ++i) spec.sites[i] = i;
  return spec;
}

inline void check_basis_spec(const PauliBasisSpec& spec, int num_qubits) {
  require(!spec.sites.empty(), "measurement basis has no sites");
  require(spec.sites.size() == spec.axes.size(),
          "measurement basis sites/axes length mismatch");
  int prev = -1;
  for (int s : spec.sites) {
    require(s > prev, "measurement sites must be strictly ascending");
    require(s >= 0 && s < num_qubits, "measurement site out of range");
    prev = s;
  }
}

namespace detail {

/// Outcome index of basis state `index` under `spec`, after basis rotation.
inline Eigen::Index outcome_of_index(Eigen::Index index, int num_qubits,
                                     const PauliBasisSpec& spec) {
  Eigen::Index out = 0;
  for (int b : spec.sites) {
    out = (out << 1) | bit_of(index, b, num_qubits);
  }
  return out;
}

}  // namespace detail

/// Exact outcome distribution of a joint Pauli measurement on a pure state.
/// Unmeasured sites are traced out.
inline Eigen::VectorXd pauli_statistics(const QubitState& state,
                                        const PauliBasisSpec& spec) {
  check_basis_spec(spec, state.num_qubits);
  CVector amps = state.amplitudes;
  for (int i = 0; i < spec.num_sites(); ++i) {
    if (spec.axes[i] == PauliAxis::Z) continue;
    apply_single_qubit_gate(amps, state.num_qubits, spec.sites[i],
                            basis_change_matrix(spec.axes[i]));
  }
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(spec.num_outcomes());
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    probs(detail::outcome_of_index(i, state.num_qubits, spec)) +=
        std::norm(amps(i));
  }
  return probs;
}

/// Exact outcome distribution of a joint Pauli measurement on a mixed state.
inline Eigen::VectorXd pauli_statistics(const DensityOperator& rho,
                                        const PauliBasisSpec& spec) {
  check_basis_spec(spec, rho.num_qubits);
  CMatrix m = rho.matrix;
  for (int i = 0; i < spec.num_sites(); ++i) {
    if (spec.axes[i] == PauliAxis::Z) continue;
    conjugate_single_qubit_gate(m, rho.num_qubits, spec.sites[i],
                                basis_change_matrix(spec.axes[i]));
  }
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(spec.num_outcomes());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double p = m(i, i).real();
    if (p < 0.0) p = 0.0;  // Clamp float noise on the diagonal.
    probs(detail::outcome_of_index(i, rho.num_qubits, spec)) += p;
  }
  return probs;
}

}  // namespace nqem
