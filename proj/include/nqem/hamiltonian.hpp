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
#include "nqem/rng.hpp"

namespace nqem {

enum class HamiltonianKind { long_range_ising, ising, site_dep_ising };

inline HamiltonianKind parse_hamiltonian_kind(const std::string& s) {
  if (s == "long_range_ising") return HamiltonianKind::long_range_ising;
  if (s == "ising") return HamiltonianKind::ising;
  if (s == "site_dep_ising") return HamiltonianKind::site_dep_ising;
  throw_argument("unknown Hamiltonian kind '" + s + "'");
}

inline std::string hamiltonian_kind_name(HamiltonianKind k) {
  switch (k) {
    case HamiltonianKind::long_range_ising: return "long_range_ising";
    case HamiltonianKind::ising: return "ising";
    case HamiltonianKind::site_dep_ising: return "site_dep_ising";
  }
  throw_argument("invalid Hamiltonian kind");
}

/// Spin-chain Hamiltonians used by the dynamics experiments:
///   long_range_ising: H = -sum_{i<j} J_ij sx_i sx_j - B sum_j sz_j,
///                     J_ij = 1 / |i-j|^alpha
///   ising:            H = J sum_i sz_i sz_{i+1} + g sum_j sx_j
///   site_dep_ising:   H = sum_i J_i sz_i sz_{i+1} + sum_j sx_j
struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::ising;
  int L = 2;
  double alpha = 0.01;  // long_range_ising
  double B = 1.0;       // long_range_ising transverse field
  double J = 0.5;       // ising nearest-neighbour coupling
  double g = 1.0;       // ising transverse field
  std::vector<double> J_site;  // site_dep_ising, length L-1
};

inline void check_hamiltonian_spec(const HamiltonianSpec& spec) {
  require(spec.L >= 2, "Hamiltonian needs L >= 2");
  if (spec.kind == HamiltonianKind::long_range_ising) {
    require(spec.alpha > 0.0, "long-range exponent alpha must be > 0");
  }
  if (spec.kind == HamiltonianKind::site_dep_ising) {
    require(static_cast<int>(spec.J_site.size()) == spec.L - 1,
            "site-dependent couplings must have length L-1");
  }
}

/// Independent draws J_i ~ N(J_mean, 1), one per nearest-neighbour bond.
inline std::vector<double> sample_site_dep_couplings(int L, double J_mean,
                                                     Rng& rng) {
  require(L >= 2, "need L >= 2");
  std::vector<double> J(L - 1);
  for (auto& j : J) j = rng.normal(J_mean, 1.0);
  return J;
}

inline int max_dense_qubits() { return 12; }

/// Dense 2^L x 2^L matrix of the spin chain. Real entries for every
/// supported kind; returned complex for uniformity with the evolution API.
inline CMatrix build_hamiltonian(const HamiltonianSpec& spec) {
  check_hamiltonian_spec(spec);
  if (spec.L > max_dense_qubits()) {
    throw_capability(
        "dense Hamiltonian construction is limited to L <= 12; use the TEBD "
        "evolver for larger chains");
  }
  const int L = spec.L;
  const Eigen::Index dim = Eigen::Index(1) << L;
  CMatrix H = CMatrix::Zero(dim, dim);

  auto z_eig = [&](Eigen::Index idx, int site) {
    return 1.0 - 2.0 * bit_of(idx, site, L);  // |0> has sz eigenvalue +1.
  };
  auto flip = [&](Eigen::Index idx, int site) {
    return idx ^ (Eigen::Index(1) << (L - 1 - site));
  };

  switch (spec.kind) {
    case HamiltonianKind::long_range_ising: {
      for (Eigen::Index idx = 0; idx < dim; ++idx) {
        double diag = 0.0;
        for (int j = 0; j < L; ++j) diag -= spec.B * z_eig(idx, j);
        H(idx, idx) += diag;
        for (int i = 0; i < L; ++i) {
          for (int j = i + 1; j < L; ++j) {
            const double Jij = 1.0 / std::pow(double(j - i), spec.alpha);
            H(flip(flip(idx, i), j), idx) += -Jij;
          }
        }
      }
      break;
    }
    case HamiltonianKind::ising: {
      for (Eigen::Index idx = 0; idx < dim; ++idx) {
        double diag = 0.0;
        for (int i = 0; i + 1 < L; ++i) {
          diag += spec.J * z_eig(idx, i) * z_eig(idx, i + 1);
        }
        H(idx, idx) += diag;
        for (int j = 0; j < L; ++j) H(flip(idx, j), idx) += spec.g;
      }
      break;
    }
    case HamiltonianKind::site_dep_ising: {
      for (Eigen::Index idx = 0; idx < dim; ++idx) {
        double diag = 0.0;
        for (int i = 0; i + 1 < L; ++i) {
          diag += spec.J_site[i] * z_eig(idx, i) * z_eig(idx, i + 1);
        }
        H(idx, idx) += diag;
        for (int j = 0; j < L; ++j) H(flip(idx, j), idx) += 1.0;
      }
      break;
    }
  }
  return H;
}

inline void check_hermitian(const CMatrix& H, double tol = 1e-10) {
  require(H.rows() == H.cols(), "matrix is not square");
  require((H - H.adjoint()).cwiseAbs().maxCoeff() <= tol,
          "matrix is not Hermitian");
}

/// Caches the eigendecomposition of a Hermitian matrix so that repeated
/// evolutions from the same Hamiltonian cost one dense multiply each.
class HamiltonianEvolver {
 public:
  explicit HamiltonianEvolver(const CMatrix& H) {
    check_hermitian(H);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    require(es.info() == Eigen::Success, "eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
  }

  Eigen::Index dim() const { return eigenvalues_.size(); }

  /// exp(-i H t) applied through the eigenbasis.
  QubitState evolve(const QubitState& in, double t) const {
    require(in.dim() == dim(), "state dimension does not match Hamiltonian");
    CVector coeffs = eigenvectors_.adjoint() * in.amplitudes;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
      coeffs(k) *= std::polar(1.0, -eigenvalues_(k) * t);
    }
    return QubitState{in.num_qubits, eigenvectors_ * coeffs};
  }

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const CMatrix& eigenvectors() const { return eigenvectors_; }

 private:
  Eigen::VectorXd eigenvalues_;
  CMatrix eigenvectors_;
};

inline QubitState exact_evolve(const CMatrix& H, const QubitState& state,
                               double t) {
  return HamiltonianEvolver(H).evolve(state, t);
}

/// Eigenvector of the smallest eigenvalue. Phase convention: the first
/// amplitude with magnitude above 1e-12 is made real positive. Degenerate
/// ground spaces resolve to the eigensolver's lowest-index column, which is
/// deterministic for a fixed matrix.
inline QubitState ground_state(const CMatrix& H, int num_qubits) {
  check_hermitian(H);
  require(H.rows() == (Eigen::Index(1) << num_qubits),
          "matrix dimension is not 2^num_qubits");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  require(es.info() == Eigen::Success, "eigendecomposition failed");
  CVector v = es.eigenvectors().col(0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  }
  v.normalize();
  return QubitState{num_qubits, v};
}

}  // namespace nqem
