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

/// Bias-corrected Adam over a fixed parameter list. Moment buffers are
/// keyed by list position, so the list must not change between steps.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(ParamRefs params, double beta1 = 0.9,
                         double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const ParamArray* p : params_) {
      m_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
    }
  }

  /// One update from the gradients currently in the parameter buffers.
  void step(double lr) {
    ++t_;
    const double corr1 = 1.0 - std::pow(beta1_, double(t_));
    const double corr2 = 1.0 - std::pow(beta2_, double(t_));
    for (size_t k = 0; k < params_.size(); ++k) {
      const Eigen::MatrixXd& g = params_[k]->grad;
      m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * g;
      v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * g.cwiseProduct(g);
      const Eigen::ArrayXXd m_hat = m_[k].array() / corr1;
      const Eigen::ArrayXXd v_hat = v_[k].array() / corr2;
      params_[k]->value.array() -= lr * m_hat / (v_hat.sqrt() + eps_);
    }
  }

  int64_t step_count() const { return t_; }

 private:
  ParamRefs params_;
  double beta1_;
  double beta2_;
  double eps_;
  std::vector<Eigen::MatrixXd> m_;
  std::vector<Eigen::MatrixXd> v_;
  int64_t t_ = 0;
};

/// lr(epoch) = base * decay^epoch; default schedule 0.01 * 0.95^epoch.
inline double decayed_lr(double base, double decay, int epoch) {
  return base * std::pow(decay, double(epoch));
}

}  // namespace nqem
