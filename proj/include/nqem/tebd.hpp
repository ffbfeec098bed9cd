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

#include "nqem/mps.hpp"

namespace nqem {

/// Trotterized evolution under H = J sum_i sz_i sz_{i+1} + g sum_j sx_j.
struct TebdParams {
  double J = 0.5;
  double g = 1.0;
  double dt = 0.02;
  double t_total = 0.0;
  int chi_max = 64;
  double svd_cutoff = 1e-10;
};

struct TebdResult {
  MatrixProductState state;
  double truncated_weight = 0.0;  // Cumulative relative weight discarded.
  int steps = 0;
  int max_bond = 1;
};

namespace detail {

inline void apply_single_site(MatrixProductState& psi, int site,
                              const Eigen::Matrix2cd& u) {
  const std::array<CMatrix, 2> old = psi.tensors[site];
  for (int p = 0; p < 2; ++p) {
    psi.tensors[site][p] = u(p, 0) * old[0] + u(p, 1) * old[1];
  }
}

/// Applies a two-site gate at bond (site, site+1) with the orthogonality
/// center on `site`, then splits by SVD keeping at most chi_max singular
/// values above cutoff * largest. Returns the relative weight discarded.
inline double apply_two_site_gate(MatrixProductState& psi, int site,
                                  const Eigen::Matrix4cd& gate, int chi_max,
                                  double svd_cutoff) {
  move_canonical_center(psi, site);
  const Eigen::Index chi_l = psi.tensors[site][0].rows();
  const Eigen::Index chi_r = psi.tensors[site + 1][0].cols();
  if (2 * std::max(chi_l, chi_r) > (Eigen::Index(1) << 13)) {
    throw_capability("bond dimension overflow in two-site gate application");
  }

  // theta block (p,q) = T_site[p] * T_{site+1}[q].
  std::array<std::array<CMatrix, 2>, 2> theta;
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      theta[p][q] = psi.tensors[site][p] * psi.tensors[site + 1][q];
    }
  }
  CMatrix merged(2 * chi_l, 2 * chi_r);
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      CMatrix block = CMatrix::Zero(chi_l, chi_r);
      for (int pp = 0; pp < 2; ++pp) {
        for (int qq = 0; qq < 2; ++qq) {
          const cdouble c = gate(2 * p + q, 2 * pp + qq);
          if (c != cdouble(0.0, 0.0)) block += c * theta[pp][qq];
        }
      }
      merged.block(p * chi_l, q * chi_r, chi_l, chi_r) = block;
    }
  }

  Eigen::BDCSVD<CMatrix> svd(merged,
                             Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::Index keep = 0;
  for (Eigen::Index k = 0; k < sv.size() && k < chi_max; ++k) {
    if (sv(k) >= svd_cutoff * sv(0)) ++keep;
  }
  keep = std::max<Eigen::Index>(keep, 1);

  const double total = sv.squaredNorm();
  const double kept = sv.head(keep).squaredNorm();
  const double discarded = total > 0.0 ? (total - kept) / total : 0.0;

  const CMatrix u = svd.matrixU().leftCols(keep);
  const CMatrix svh = sv.head(keep).asDiagonal() *
                      svd.matrixV().leftCols(keep).adjoint();
  psi.tensors[site][0] = u.topRows(chi_l);
  psi.tensors[site][1] = u.bottomRows(chi_l);
  psi.tensors[site + 1][0] = svh.leftCols(chi_r);
  psi.tensors[site + 1][1] = svh.rightCols(chi_r);
  psi.canonical_center = site + 1;
  return discarded;
}

}  // namespace detail

/// Second-order Trotter evolution. Each step applies, in this fixed order:
/// half-step field on every site, full-step gates on even bonds (0-1, 2-3,
/// ...), full-step gates on odd bonds (1-2, 3-4, ...), half-step field.
/// The ZZ bond gates are diagonal and mutually commuting, so the even/odd
/// split inside one full step is exact. The state is renormalized after
/// every step and the discarded singular-value weight is accumulated.
inline TebdResult tebd_evolve(const MatrixProductState& input,
                              const TebdParams& params) {
  check_mps_shape(input);
  require(input.num_sites >= 2, "TEBD needs at least two sites");
  require(params.dt > 0.0, "Trotter step must be > 0");
  require(params.chi_max >= 1, "chi_max must be >= 1");
  require(params.svd_cutoff >= 0.0, "svd_cutoff must be >= 0");
  require(params.t_total >= 0.0, "t_total must be >= 0");

  const double raw_steps = params.t_total / params.dt;
  const int steps = static_cast<int>(std::llround(raw_steps));
  require(std::abs(raw_steps - steps) <= 1e-9 * std::max(1.0, raw_steps),
          "t_total must be an integer multiple of dt");

  TebdResult result;
  result.state = input;
  result.steps = steps;
  result.max_bond = input.max_bond();
  if (steps == 0) return result;

  MatrixProductState& psi = result.state;
  const int L = psi.num_sites;

  // exp(-i g (dt/2) sx) for the half-steps.
  const double a = params.g * params.dt / 2.0;
  Eigen::Matrix2cd field_half;
  field_half << std::cos(a), cdouble(0.0, -std::sin(a)),
      cdouble(0.0, -std::sin(a)), std::cos(a);

  // exp(-i J dt sz sz): diagonal with phase per joint parity.
  Eigen::Matrix4cd bond_gate = Eigen::Matrix4cd::Zero();
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      const double zz = (p == q) ? 1.0 : -1.0;
      bond_gate(2 * p + q, 2 * p + q) =
          std::polar(1.0, -params.J * params.dt * zz);
    }
  }

  for (int step = 0; step < steps; ++step) {
    for (int s = 0; s < L; ++s) detail::apply_single_site(psi, s, field_half);
    for (int b = 0; b + 1 < L; b += 2) {
      result.truncated_weight += detail::apply_two_site_gate(
          psi, b, bond_gate, params.chi_max, params.svd_cutoff);
    }
    for (int b = 1; b + 1 < L; b += 2) {
      result.truncated_weight += detail::apply_two_site_gate(
          psi, b, bond_gate, params.chi_max, params.svd_cutoff);
    }
    for (int s = 0; s < L; ++s) detail::apply_single_site(psi, s, field_half);

    const double norm = std::sqrt(mps_norm_squared(psi));
    require(norm > 0.0, "state norm collapsed during evolution");
    const int c = std::max(psi.canonical_center, 0);
    for (int p = 0; p < 2; ++p) psi.tensors[c][p] /= norm;
    result.max_bond = std::max(result.max_bond, psi.max_bond());
  }
  return result;
}

}  // namespace nqem
