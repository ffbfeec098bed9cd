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

#include "nqem/nn/param.hpp"

namespace nqem {

/// Affine layer y = W x + b on column-major batches (one sample per
/// column). forward caches the input; backward accumulates into the
/// gradient buffers and returns the input gradient.
class DenseLayer {
 public:
  DenseLayer(const std::string& name, int in_dim, int out_dim)
      : W(name + ".W", out_dim, in_dim),
        b(name + ".b", out_dim, 1),
        in_dim_(in_dim),
        out_dim_(out_dim) {}

  void init(Rng& rng) {
    init_uniform(W, in_dim_, rng);
    init_uniform(b, in_dim_, rng);
  }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) {
    require(x.rows() == in_dim_, "dense forward: input dimension mismatch");
    x_cache_ = x;
    Eigen::MatrixXd y = W.value * x;
    y.colwise() += Eigen::VectorXd(b.value.col(0));
    return y;
  }

  Eigen::MatrixXd backward(const Eigen::MatrixXd& dy) {
    require(dy.rows() == out_dim_ && dy.cols() == x_cache_.cols(),
            "dense backward: gradient shape mismatch");
    W.grad += dy * x_cache_.transpose();
    b.grad.col(0) += dy.rowwise().sum();
    return W.value.transpose() * dy;
  }

  void collect_params(ParamRefs& out) {
    out.push_back(&W);
    out.push_back(&b);
  }

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }

  ParamArray W;
  ParamArray b;

 private:
  int in_dim_;
  int out_dim_;
  Eigen::MatrixXd x_cache_;
};

/// Elementwise max(0, x); the subgradient at 0 is taken as 0.
class ReluLayer {
 public:
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) {
    mask_ = (x.array() > 0.0).cast<double>();
    return x.cwiseMax(0.0);
  }

  Eigen::MatrixXd backward(const Eigen::MatrixXd& dy) {
    require(dy.rows() == mask_.rows() && dy.cols() == mask_.cols(),
            "relu backward: gradient shape mismatch");
    return dy.array() * mask_.array();
  }

 private:
  Eigen::ArrayXXd mask_;
};

/// Column-wise softmax with max subtraction.
inline Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd p(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd shifted =
        x.col(j).array() - x.col(j).maxCoeff();
    const Eigen::VectorXd e = shifted.array().exp();
    p.col(j) = e / e.sum();
  }
  return p;
}

/// Column-wise log softmax: x - logsumexp(x), max-subtracted.
inline Eigen::MatrixXd log_softmax_columns(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd lp(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double m = x.col(j).maxCoeff();
    const Eigen::ArrayXd shifted = x.col(j).array() - m;
    const double lse = std::log(shifted.exp().sum());
    lp.col(j) = shifted - lse;
  }
  return lp;
}

struct XentResult {
  double loss_sum = 0.0;       // Summed over columns, not averaged.
  Eigen::MatrixXd dlogits;     // Gradient of loss_sum w.r.t. the logits.
};

/// Cross-entropy of softmax(logits) columns against target distributions,
/// with predicted probabilities floored at eps inside the log. The gradient
/// accounts for the floor exactly: floored entries contribute a constant,
/// so their direct term drops out.
inline XentResult softmax_xent(const Eigen::MatrixXd& logits,
                               const Eigen::MatrixXd& targets,
                               double eps = 1e-12) {
  require(logits.rows() == targets.rows() && logits.cols() == targets.cols(),
          "cross-entropy: shape mismatch");
  const Eigen::MatrixXd p = softmax_columns(logits);
  XentResult result;
  result.dlogits.resize(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    double loss = 0.0;
    double live_target_mass = 0.0;
    for (Eigen::Index k = 0; k < logits.rows(); ++k) {
      const double t = targets(k, j);
      const double pk = p(k, j);
      loss -= t * std::log(std::max(pk, eps));
      if (pk >= eps) live_target_mass += t;
    }
    result.loss_sum += loss;
    for (Eigen::Index k = 0; k < logits.rows(); ++k) {
      const double live = (p(k, j) >= eps) ? targets(k, j) : 0.0;
      result.dlogits(k, j) = live_target_mass * p(k, j) - live;
    }
  }
  return result;
}

}  // namespace nqem
