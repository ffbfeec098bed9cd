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

#include <array>
#include <vector>

#include "nqem/pauli.hpp"
#include "nqem/qubit_state.hpp"

namespace nqem {

/// Matrix product state over a chain of qubits. The rank-3 site tensor is
/// stored as one left-bond x right-bond matrix per physical index. Site
/// order matches QubitState: site 0 owns the most significant bit of a
/// contracted statevector.
///
/// canonical_center == c means sites < c are left-canonical and sites > c
/// are right-canonical; -1 means the gauge is unknown.
struct MatrixProductState {
  int num_sites = 0;
  std::vector<std::array<CMatrix, 2>> tensors;
  int canonical_center = -1;

  int bond_dim(int bond) const {
    require(bond >= 0 && bond <= num_sites, "bond index out of range");
    if (bond == 0) return static_cast<int>(tensors.front()[0].rows());
    return static_cast<int>(tensors[bond - 1][0].cols());
  }

  int max_bond() const {
    int m = 1;
    for (int b = 0; b <= num_sites; ++b) m = std::max(m, bond_dim(b));
    return m;
  }
};

inline void check_mps_shape(const MatrixProductState& psi) {
  require(psi.num_sites >= 1, "empty MPS");
  require(static_cast<int>(psi.tensors.size()) == psi.num_sites,
          "tensor count does not match num_sites");
  require(psi.tensors.front()[0].rows() == 1 &&
              psi.tensors.back()[0].cols() == 1,
          "boundary bonds must have dimension 1");
  for (int s = 0; s < psi.num_sites; ++s) {
    require(psi.tensors[s][0].rows() == psi.tensors[s][1].rows() &&
                psi.tensors[s][0].cols() == psi.tensors[s][1].cols(),
            "physical-index matrices disagree in shape");
    if (s + 1 < psi.num_sites) {
      require(psi.tensors[s][0].cols() == psi.tensors[s + 1][0].rows(),
              "adjacent bond dimensions disagree");
    }
  }
}

/// Bond-dimension-1 state from normalized single-site vectors.
inline MatrixProductState mps_from_product(
    const std::vector<Eigen::Vector2cd>& local_states) {
  require(!local_states.empty(), "empty product state");
  MatrixProductState psi;
  psi.num_sites = static_cast<int>(local_states.size());
  psi.tensors.resize(psi.num_sites);
  for (int s = 0; s < psi.num_sites; ++s) {
    require(std::abs(local_states[s].norm() - 1.0) <= 1e-10,
            "local state is not normalized");
    for (int p = 0; p < 2; ++p) {
      psi.tensors[s][p] = CMatrix::Constant(1, 1, local_states[s](p));
    }
  }
  psi.canonical_center = 0;
  return psi;
}

/// Exact (untruncated up to numerical zeros) MPS of a dense statevector via
/// successive singular value decompositions. Left-canonical with the norm
/// carried on the last site.
inline MatrixProductState mps_from_statevector(const QubitState& state) {
  check_state(state);
  const int L = state.num_qubits;
  MatrixProductState psi;
  psi.num_sites = L;
  psi.tensors.resize(L);

  // rest has shape (chi_left * 2) x 2^{remaining}; peel one site per pass.
  // Site-major indexing puts site 0 in the row split, halves in the columns.
  CMatrix rest(2, state.dim() / 2);
  rest.row(0) = state.amplitudes.head(state.dim() / 2).transpose();
  rest.row(1) = state.amplitudes.tail(state.dim() / 2).transpose();
  Eigen::Index chi_left = 1;
  for (int s = 0; s < L - 1; ++s) {
    Eigen::BDCSVD<CMatrix> svd(rest,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index keep = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) > 1e-14 * sv(0)) ++keep;
    }
    keep = std::max<Eigen::Index>(keep, 1);
    const CMatrix u = svd.matrixU().leftCols(keep);
    psi.tensors[s][0] = u.topRows(chi_left);
    psi.tensors[s][1] = u.bottomRows(chi_left);

    CMatrix carry = sv.head(keep).asDiagonal() *
                    svd.matrixV().leftCols(keep).adjoint();
    // carry: keep x 2^{L-1-s}; push one physical index into the rows.
    const Eigen::Index cols = carry.cols() / 2;
    CMatrix next(2 * keep, cols);
    next.topRows(keep) = carry.leftCols(cols);
    next.bottomRows(keep) = carry.rightCols(cols);
    rest = next;
    chi_left = keep;
  }
  psi.tensors[L - 1][0] = rest.topRows(chi_left);
  psi.tensors[L - 1][1] = rest.bottomRows(chi_left);
  psi.canonical_center = L - 1;
  check_mps_shape(psi);
  return psi;
}

inline QubitState mps_to_statevector(const MatrixProductState& psi) {
  check_mps_shape(psi);
  require(psi.num_sites <= 12,
          "dense contraction is limited to 12 sites");
  // acc: rows enumerate physical configurations of processed sites
  // (site-major), columns the open right bond.
  CMatrix acc = CMatrix::Identity(1, 1);
  for (int s = 0; s < psi.num_sites; ++s) {
    const Eigen::Index rows = acc.rows();
    CMatrix next(rows * 2, psi.tensors[s][0].cols());
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int p = 0; p < 2; ++p) {
        next.row(2 * r + p) = acc.row(r) * psi.tensors[s][p];
      }
    }
    acc = next;
  }
  QubitState out{psi.num_sites, acc.col(0)};
  return out;
}

/// <psi|psi> by transfer-matrix contraction; gauge independent.
inline double mps_norm_squared(const MatrixProductState& psi) {
  CMatrix env = CMatrix::Identity(1, 1);
  for (int s = 0; s < psi.num_sites; ++s) {
    CMatrix next = CMatrix::Zero(psi.tensors[s][0].cols(),
                                 psi.tensors[s][0].cols());
    for (int p = 0; p < 2; ++p) {
      next += psi.tensors[s][p].adjoint() * env * psi.tensors[s][p];
    }
    env = next;
  }
  return env(0, 0).real();
}

namespace detail {

/// One left-canonical QR move: center c -> c+1.
inline void move_center_right(MatrixProductState& psi, int c) {
  const Eigen::Index chi_l = psi.tensors[c][0].rows();
  const Eigen::Index chi_r = psi.tensors[c][0].cols();
  CMatrix m(2 * chi_l, chi_r);
  m.topRows(chi_l) = psi.tensors[c][0];
  m.bottomRows(chi_l) = psi.tensors[c][1];
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<CMatrix> qr(m);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(m.rows(), k);
  const CMatrix r = CMatrix(qr.matrixQR().topRows(k).triangularView<Eigen::Upper>());
  psi.tensors[c][0] = q.topRows(chi_l);
  psi.tensors[c][1] = q.bottomRows(chi_l);
  psi.tensors[c + 1][0] = r * psi.tensors[c + 1][0];
  psi.tensors[c + 1][1] = r * psi.tensors[c + 1][1];
}

/// One right-canonical move: center c -> c-1.
inline void move_center_left(MatrixProductState& psi, int c) {
  const Eigen::Index chi_l = psi.tensors[c][0].rows();
  const Eigen::Index chi_r = psi.tensors[c][0].cols();
  CMatrix m(chi_l, 2 * chi_r);
  m.leftCols(chi_r) = psi.tensors[c][0];
  m.rightCols(chi_r) = psi.tensors[c][1];
  // m = L Q with Q row-orthonormal, from QR of the adjoint.
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<CMatrix> qr(m.adjoint());
  const CMatrix q = qr.householderQ() * CMatrix::Identity(m.cols(), k);
  const CMatrix r = CMatrix(qr.matrixQR().topRows(k).triangularView<Eigen::Upper>());
  const CMatrix qh = q.adjoint();  // k x 2 chi_r, row-orthonormal.
  psi.tensors[c][0] = qh.leftCols(chi_r);
  psi.tensors[c][1] = qh.rightCols(chi_r);
  const CMatrix l = r.adjoint();  // chi_l x k.
  psi.tensors[c - 1][0] = psi.tensors[c - 1][0] * l;
  psi.tensors[c - 1][1] = psi.tensors[c - 1][1] * l;
}

}  // namespace detail

/// Puts the orthogonality center on `site`, establishing the gauge first if
/// it is unknown.
inline void move_canonical_center(MatrixProductState& psi, int site) {
  require(site >= 0 && site < psi.num_sites, "center site out of range");
  if (psi.canonical_center < 0) {
    for (int c = psi.num_sites - 1; c > 0; --c) {
      detail::move_center_left(psi, c);
    }
    psi.canonical_center = 0;
  }
  while (psi.canonical_center < site) {
    detail::move_center_right(psi, psi.canonical_center);
    ++psi.canonical_center;
  }
  while (psi.canonical_center > site) {
    detail::move_center_left(psi, psi.canonical_center);
    --psi.canonical_center;
  }
}

/// Joint Pauli statistics on up to four sites, by contracting the chain with
/// outcome projectors. Normalized by <psi|psi> so slight norm drift from
/// truncation does not leak into the distribution.
inline Eigen::VectorXd local_pauli_statistics(const MatrixProductState& psi,
                                              const PauliBasisSpec& spec) {
  check_mps_shape(psi);
  check_basis_spec(spec, psi.num_sites);
  require(spec.sites.size() <= 4,
          "local statistics support at most four sites");

  const double norm2 = mps_norm_squared(psi);
  require(norm2 > 0.0, "MPS has zero norm");

  Eigen::VectorXd probs(spec.num_outcomes());
  for (Eigen::Index out = 0; out < probs.size(); ++out) {
    CMatrix env = CMatrix::Identity(1, 1);
    for (int s = 0; s < psi.num_sites; ++s) {
      auto it = std::find(spec.sites.begin(), spec.sites.end(), s);
      CMatrix next = CMatrix::Zero(psi.tensors[s][0].cols(),
                                   psi.tensors[s][0].cols());
      if (it == spec.sites.end()) {
        for (int p = 0; p < 2; ++p) {
          next += psi.tensors[s][p].adjoint() * env * psi.tensors[s][p];
        }
      } else {
        const int pos = static_cast<int>(it - spec.sites.begin());
        const int bit =
            static_cast<int>((out >> (spec.sites.size() - 1 - pos)) & 1);
        const double sign = (bit == 0) ? 1.0 : -1.0;
        const Eigen::Matrix2cd proj =
            0.5 * (Eigen::Matrix2cd::Identity() +
                   sign * pauli_matrix(spec.axes[pos]));
        for (int p = 0; p < 2; ++p) {
          for (int q = 0; q < 2; ++q) {
            if (proj(p, q) == cdouble(0.0, 0.0)) continue;
            next += proj(p, q) * psi.tensors[s][p].adjoint() * env *
                    psi.tensors[s][q];
          }
        }
      }
      env = next;
    }
    double p = env(0, 0).real() / norm2;
    if (p < 0.0) p = 0.0;
    probs(out) = p;
  }
  return probs;
}

}  // namespace nqem
