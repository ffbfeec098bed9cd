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
#include <array>
#include <cmath>

#include "nqem/common.hpp"

namespace nqem {

/// Single-mode state in a photon-number basis truncated at `cutoff` levels.
/// Truncation loses a tail of the true state, so the norm may fall slightly
/// below 1; check_fock bounds how much.
struct FockState {
  int cutoff = 0;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

inline void check_fock(const FockState& s, double truncation_tol = 1e-6) {
  require(s.cutoff >= 2, "Fock cutoff must be >= 2");
  require(s.amplitudes.size() == s.cutoff,
          "amplitude length does not match cutoff");
  const double n = s.norm();
  require(n <= 1.0 + 1e-12 && n >= 1.0 - truncation_tol,
          "Fock state norm outside the truncation tolerance");
}

/// c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built by the stable ratio
/// recurrence. If the truncation is too tight for the amplitude
/// (|alpha|^2 > cutoff/2), *truncated is set so the caller can warn.
inline FockState coherent_state(cdouble alpha, int cutoff,
                                bool* truncated = nullptr) {
  require(cutoff >= 2, "Fock cutoff must be >= 2");
  if (truncated != nullptr) {
    *truncated = std::norm(alpha) > cutoff / 2.0;
  }
  FockState s{cutoff, Eigen::VectorXcd(cutoff)};
  s.amplitudes(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < cutoff; ++n) {
    s.amplitudes(n) = s.amplitudes(n - 1) * alpha / std::sqrt(double(n));
  }
  return s;
}

/// exp(-i K t) with K = a^dag a^dag a a: level n picks up phase
/// e^{-i t n (n-1)}. Diagonal, so |c_n|^2 is untouched.
inline FockState kerr_evolve(const FockState& s, double t) {
  FockState out = s;
  for (int n = 0; n < s.cutoff; ++n) {
    out.amplitudes(n) *= std::polar(1.0, -t * double(n) * double(n - 1));
  }
  return out;
}

/// exp(-i theta n): c_n -> c_n e^{-i n theta}. Conjugating the x quadrature
/// by this rotation yields the rotated quadrature x_theta.
inline FockState phase_rotate(const FockState& s, double theta) {
  FockState out = s;
  for (int n = 0; n < s.cutoff; ++n) {
    out.amplitudes(n) *= std::polar(1.0, -theta * double(n));
  }
  return out;
}

inline double mean_photon_number(const FockState& s) {
  double mean = 0.0;
  for (int n = 0; n < s.cutoff; ++n) {
    mean += double(n) * std::norm(s.amplitudes(n));
  }
  return mean;
}

/// |<a|b>|^2 in the truncated basis.
inline double fock_fidelity(const FockState& a, const FockState& b) {
  require(a.cutoff == b.cutoff, "fock_fidelity: cutoff mismatch");
  return std::norm(a.amplitudes.dot(b.amplitudes));
}

/// Uniform binning of the quadrature axis.
struct QuadratureGrid {
  double x_min = -6.0;
  double x_max = 6.0;
  int num_bins = 120;

  double bin_width() const { return (x_max - x_min) / num_bins; }
  double bin_center(int k) const {
    return x_min + (k + 0.5) * bin_width();
  }
};

inline void check_grid(const QuadratureGrid& g) {
  require(g.x_min < g.x_max, "quadrature grid needs x_min < x_max");
  require(g.num_bins >= 2, "quadrature grid needs at least two bins");
}

namespace detail {

/// Position wavefunctions for the quadrature x = (a + a^dag)/2, whose vacuum
/// variance is 1/4. These are scaled Hermite functions: psi_n(x) =
/// 2^{1/4} u_n(sqrt(2) x) with u_n the standard normalized Hermite function,
/// evaluated by the stable normalized recurrence.
inline void quadrature_wavefunctions(double x, int cutoff,
                                     Eigen::VectorXd& out) {
  out.resize(cutoff);
  const double y = std::sqrt(2.0) * x;
  const double scale = std::pow(2.0, 0.25);
  double u_prev = 0.0;
  double u = std::pow(kPi, -0.25) * std::exp(-0.5 * y * y);
  out(0) = scale * u;
  for (int n = 1; n < cutoff; ++n) {
    const double u_next =
        y * std::sqrt(2.0 / n) * u - std::sqrt(double(n - 1) / n) * u_prev;
    u_prev = u;
    u = u_next;
    out(n) = scale * u;
  }
}

inline constexpr std::array<double, 5> kGaussNodes = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
    0.9061798459386640};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
    0.4786286704993665, 0.2369268850561891};

}  // namespace detail

struct HomodyneResult {
  Eigen::VectorXd probs;  // One entry per bin, renormalized to sum 1.
  double leaked_mass = 0.0;  // Probability mass outside the grid.
};

/// Binned outcome distribution of the quadrature
/// x_theta = (e^{i theta} a^dag + e^{-i theta} a)/2. Bin masses are
/// five-point Gauss-Legendre integrals of |<x|psi_rotated>|^2; the grid must
/// capture at least 99% of the mass.
inline HomodyneResult homodyne_distribution(const FockState& state,
                                            double theta,
                                            const QuadratureGrid& grid) {
  check_grid(grid);
  require(theta >= 0.0 && theta < kPi, "homodyne phase must lie in [0, pi)");
  const FockState rotated = phase_rotate(state, theta);

  HomodyneResult result;
  result.probs.resize(grid.num_bins);
  Eigen::VectorXd basis;
  const double half = 0.5 * grid.bin_width();
  for (int k = 0; k < grid.num_bins; ++k) {
    const double center = grid.bin_center(k);
    double mass = 0.0;
    for (int q = 0; q < 5; ++q) {
      const double x = center + half * detail::kGaussNodes[q];
      detail::quadrature_wavefunctions(x, state.cutoff, basis);
      const cdouble amp = rotated.amplitudes.conjugate().dot(
          basis.cast<cdouble>());
      mass += detail::kGaussWeights[q] * std::norm(amp);
    }
    result.probs(k) = half * mass;
  }

  const double captured = result.probs.sum();
  const double total = state.amplitudes.squaredNorm();
  if (captured < 0.99 * total) {
    throw_range(
        "quadrature grid captures less than 99% of the distribution; widen "
        "the grid");
  }
  result.leaked_mass = total - captured;
  result.probs /= captured;
  return result;
}

/// Mean of a binned distribution, bins represented by their centers.
inline double distribution_mean(const Eigen::VectorXd& probs,
                                const QuadratureGrid& grid) {
  require(probs.size() == grid.num_bins,
          "probability vector does not match grid");
  double mean = 0.0;
  for (int k = 0; k < grid.num_bins; ++k) {
    mean += probs(k) * grid.bin_center(k);
  }
  return mean;
}

/// <x_theta> from ladder-operator matrix elements:
/// Re(e^{-i theta} <a>) with <a> = sum_n sqrt(n) conj(c_{n-1}) c_n.
/// Independent of the wavefunction route; used to cross-check it.
inline double quadrature_mean_ladder(const FockState& s, double theta) {
  cdouble a_expect = 0.0;
  for (int n = 1; n < s.cutoff; ++n) {
    a_expect += std::sqrt(double(n)) * std::conj(s.amplitudes(n - 1)) *
                s.amplitudes(n);
  }
  return (std::polar(1.0, -theta) * a_expect).real();
}

}  // namespace nqem
