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
#include <cmath>
#include <cstdint>

#include "nqem/common.hpp"

namespace nqem {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Pure multi-qubit state.
///
/// Amplitude indexing is site-major: qubit 0 is the most significant bit of
/// the basis index, so the amplitude vector reads like the |q0 q1 ...>
/// bitstring in site order. All gate kernels in this library assume this
/// convention.
struct QubitState {
  int num_qubits = 0;
  CVector amplitudes;

  Eigen::Index dim() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
};

/// Mixed multi-qubit state as a dense 2^L x 2^L matrix, same index
/// convention as QubitState.
struct DensityOperator {
  int num_qubits = 0;
  CMatrix matrix;

  Eigen::Index dim() const { return matrix.rows(); }
  double trace_real() const { return matrix.trace().real(); }
  double purity() const { return (matrix * matrix).trace().real(); }
};

inline int bit_of(Eigen::Index index, int qubit, int num_qubits) {
  return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1);
}

inline QubitState make_zero_state(int num_qubits) {
  require(num_qubits >= 1, "num_qubits must be >= 1");
  QubitState s{num_qubits, CVector::Zero(Eigen::Index(1) << num_qubits)};
  s.amplitudes(0) = 1.0;
  return s;
}

inline QubitState make_plus_state(int num_qubits) {
  require(num_qubits >= 1, "num_qubits must be >= 1");
  const Eigen::Index dim = Eigen::Index(1) << num_qubits;
  QubitState s{num_qubits, CVector::Constant(dim, 1.0 / std::sqrt(double(dim)))};
  return s;
}

inline QubitState make_ghz_state(int num_qubits) {
  require(num_qubits >= 1, "num_qubits must be >= 1");
  const Eigen::Index dim = Eigen::Index(1) << num_qubits;
  QubitState s{num_qubits, CVector::Zero(dim)};
  const double a = 1.0 / std::sqrt(2.0);
  s.amplitudes(0) = a;
  s.amplitudes(dim - 1) = a;
  return s;
}

inline void check_state(const QubitState& s, double tol = 1e-10) {
  require(s.num_qubits >= 1, "state has no qubits");
  require(s.dim() == (Eigen::Index(1) << s.num_qubits),
          "amplitude length is not 2^num_qubits");
  const double n2 = s.amplitudes.squaredNorm();
  require(std::abs(n2 - 1.0) <= tol, "state norm is not 1");
}

inline DensityOperator density_from_pure(const QubitState& s) {
  return DensityOperator{s.num_qubits, s.amplitudes * s.amplitudes.adjoint()};
}

inline void check_density(const DensityOperator& rho, double tol = 1e-10) {
  require(rho.matrix.rows() == rho.matrix.cols(), "density matrix not square");
  require(rho.dim() == (Eigen::Index(1) << rho.num_qubits),
          "density dimension is not 2^num_qubits");
  require((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff() <= tol,
          "density matrix not Hermitian");
  require(std::abs(rho.trace_real() - 1.0) <= tol, "density trace is not 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix,
                                            Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -tol,
          "density matrix has a significantly negative eigenvalue");
}

/// |<a|b>|^2 for pure states.
inline double quantum_fidelity(const QubitState& a, const QubitState& b) {
  require(a.dim() == b.dim(), "quantum_fidelity: dimension mismatch");
  return std::norm(a.amplitudes.dot(b.amplitudes));
}

// ---------------------------------------------------------------------------
// In-place single-qubit and CNOT kernels on raw amplitude storage.
// ---------------------------------------------------------------------------

inline void apply_single_qubit_gate(CVector& amps, int num_qubits, int qubit,
                                    const Eigen::Matrix2cd& gate) {
  require(qubit >= 0 && qubit < num_qubits, "qubit index out of range");
  const Eigen::Index dim = amps.size();
  const Eigen::Index stride = Eigen::Index(1) << (num_qubits - 1 - qubit);
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index off = 0; off < stride; ++off) {
      const Eigen::Index i0 = base + off;
      const Eigen::Index i1 = i0 + stride;
      const cdouble a0 = amps(i0);
      const cdouble a1 = amps(i1);
      amps(i0) = gate(0, 0) * a0 + gate(0, 1) * a1;
      amps(i1) = gate(1, 0) * a0 + gate(1, 1) * a1;
    }
  }
}

inline void apply_cnot(CVector& amps, int num_qubits, int control,
                       int target) {
  require(control != target, "cnot: control equals target");
  require(control >= 0 && control < num_qubits && target >= 0 &&
              target < num_qubits,
          "cnot: qubit index out of range");
  const Eigen::Index dim = amps.size();
  const Eigen::Index tstride = Eigen::Index(1) << (num_qubits - 1 - target);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (bit_of(i, control, num_qubits) == 1 &&
        bit_of(i, target, num_qubits) == 0) {
      std::swap(amps(i), amps(i + tstride));
    }
  }
}

/// rho -> (G_q) rho (G_q)^dagger for a single-qubit gate G on `qubit`.
inline void conjugate_single_qubit_gate(CMatrix& rho, int num_qubits,
                                        int qubit,
                                        const Eigen::Matrix2cd& gate) {
  const Eigen::Index dim = rho.rows();
  const Eigen::Index stride = Eigen::Index(1) << (num_qubits - 1 - qubit);
  // Left multiply: act on each column.
  for (Eigen::Index col = 0; col < dim; ++col) {
    for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
      for (Eigen::Index off = 0; off < stride; ++off) {
        const Eigen::Index i0 = base + off;
        const Eigen::Index i1 = i0 + stride;
        const cdouble a0 = rho(i0, col);
        const cdouble a1 = rho(i1, col);
        rho(i0, col) = gate(0, 0) * a0 + gate(0, 1) * a1;
        rho(i1, col) = gate(1, 0) * a0 + gate(1, 1) * a1;
      }
    }
  }
  // Right multiply by G^dagger: act on each row with conj(G).
  const Eigen::Matrix2cd gc = gate.conjugate();
  for (Eigen::Index row = 0; row < dim; ++row) {
    for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
      for (Eigen::Index off = 0; off < stride; ++off) {
        const Eigen::Index j0 = base + off;
        const Eigen::Index j1 = j0 + stride;
        const cdouble a0 = rho(row, j0);
        const cdouble a1 = rho(row, j1);
        rho(row, j0) = gc(0, 0) * a0 + gc(0, 1) * a1;
        rho(row, j1) = gc(1, 0) * a0 + gc(1, 1) * a1;
      }
    }
  }
}

/// rho -> P rho P for the CNOT permutation P (self-inverse).
inline void conjugate_cnot(CMatrix& rho, int num_qubits, int control,
                           int target) {
  const Eigen::Index dim = rho.rows();
  const Eigen::Index tstride = Eigen::Index(1) << (num_qubits - 1 - target);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (bit_of(i, control, num_qubits) == 1 &&
        bit_of(i, target, num_qubits) == 0) {
      rho.row(i).swap(rho.row(i + tstride));
    }
  }
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (bit_of(j, control, num_qubits) == 1 &&
        bit_of(j, target, num_qubits) == 0) {
      rho.col(j).swap(rho.col(j + tstride));
    }
  }
}

}  // namespace nqem
