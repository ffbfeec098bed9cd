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

#include <sstream>
#include <string>
#include <vector>

#include "nqem/gqnq.hpp"
#include "nqem/nn/adam.hpp"
#include "nqem/nn/layers.hpp"

namespace nqem {

struct EmulatorConfig {
  int dim = 32;                     // Representation dimension d.
  std::vector<int> hidden = {128, 128, 128};
};

inline void check_emulator_config(const EmulatorConfig& cfg) {
  require(cfg.dim >= 1, "dim must be >= 1");
  for (int w : cfg.hidden) require(w >= 1, "hidden width must be >= 1");
}

/// Dense map h_lambda on representation space: ReLU after every hidden
/// layer, no activation after the output layer.
class EmulatorNet {
 public:
  explicit EmulatorNet(const EmulatorConfig& cfg) : cfg_(cfg) {
    check_emulator_config(cfg);
    int in_dim = cfg.dim;
    for (size_t k = 0; k < cfg.hidden.size(); ++k) {
      layers_.emplace_back("emu." + std::to_string(k), in_dim, cfg.hidden[k]);
      in_dim = cfg.hidden[k];
    }
    layers_.emplace_back("emu.out", in_dim, cfg.dim);
    relus_.resize(cfg.hidden.size());
  }

  const EmulatorConfig& config() const { return cfg_; }

  void init(Rng& rng) {
    for (auto& layer : layers_) layer.init(rng);
  }

  ParamRefs params() {
    ParamRefs refs;
    for (auto& layer : layers_) layer.collect_params(refs);
    return refs;
  }

  std::string architecture_fingerprint() const {
    std::ostringstream os;
    os << "emulator(d=" << cfg_.dim << ",hidden=";
    for (size_t k = 0; k < cfg_.hidden.size(); ++k) {
      os << (k ? "," : "") << cfg_.hidden[k];
    }
    os << ")";
    return os.str();
  }

  Eigen::MatrixXd emulate_batch(const Eigen::MatrixXd& R) {
    require(R.rows() == cfg_.dim, "representation has the wrong length");
    Eigen::MatrixXd h = R;
    for (size_t k = 0; k < relus_.size(); ++k) {
      h = relus_[k].forward(layers_[k].forward(h));
    }
    return layers_.back().forward(h);
  }

  Eigen::VectorXd emulate(const Eigen::VectorXd& r) {
    return emulate_batch(r);
  }

  /// Accumulates gradients of (||h(r_in) - r_out||^2 * grad_scale) and
  /// returns the unscaled squared error.
  double train_pair(const Eigen::VectorXd& r_in, const Eigen::VectorXd& r_out,
                    double grad_scale) {
    require(r_out.size() == cfg_.dim, "target representation has the wrong length");
    const Eigen::VectorXd diff = emulate(r_in) - r_out;
    Eigen::MatrixXd d = 2.0 * grad_scale * diff;
    d = layers_.back().backward(d);
    for (size_t k = relus_.size(); k-- > 0;) {
      d = layers_[k].backward(relus_[k].backward(d));
    }
    return diff.squaredNorm();
  }

 private:
  EmulatorConfig cfg_;
  std::vector<DenseLayer> layers_;
  std::vector<ReluLayer> relus_;
};

// ---------------------------------------------------------------------------
// Loss and training.
// ---------------------------------------------------------------------------

/// Input/output representation pair for one fiducial state.
struct RepresentationPair {
  Eigen::VectorXd r_in;
  Eigen::VectorXd r_out;
};

/// Summed squared error over all pairs (no averaging).
inline double emulator_loss(EmulatorNet& net,
                            const std::vector<RepresentationPair>& pairs) {
  double total = 0.0;
  for (const auto& pair : pairs) {
    total += (net.emulate(pair.r_in) - pair.r_out).squaredNorm();
  }
  return total;
}

struct EmulatorTrainConfig {
  int epochs = 100;
  int batch_size = 5;
  double lr_base = 0.01;
  double lr_decay = 0.95;
};

/// Trains the emulator on fixed representation pairs. Per epoch the pairs
/// are visited in order; every batch_size accumulated pairs trigger one
/// Adam step on gradients divided by batch_size, and a partial window left
/// at the end of an epoch is dropped. When there are fewer pairs than
/// batch_size, each epoch takes a single step on the full set (divided by
/// the pair count) so training still makes progress. The trace holds the
/// summed loss over all pairs after each epoch.
inline std::vector<double> train_emulator(
    EmulatorNet& net, const std::vector<RepresentationPair>& pairs,
    const EmulatorTrainConfig& tc) {
  require(!pairs.empty(), "no training pairs");
  require(tc.epochs >= 0, "epochs must be >= 0");
  require(tc.batch_size >= 1, "batch_size must be >= 1");
  const size_t n = pairs.size();
  const bool small_set = n < static_cast<size_t>(tc.batch_size);
  const double scale = 1.0 / double(small_set ? n : size_t(tc.batch_size));

  AdamOptimizer opt(net.params());
  std::vector<double> trace;
  trace.reserve(tc.epochs);
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    const double lr = decayed_lr(tc.lr_base, tc.lr_decay, epoch);
    zero_grads(net.params());
    int window = 0;
    for (size_t i = 0; i < n; ++i) {
      net.train_pair(pairs[i].r_in, pairs[i].r_out, scale);
      if (++window == tc.batch_size) {
        opt.step(lr);
        zero_grads(net.params());
        window = 0;
      }
    }
    if (small_set) opt.step(lr);
    trace.push_back(emulator_loss(net, pairs));
  }
  return trace;
}

// ---------------------------------------------------------------------------
// End-to-end prediction.
// ---------------------------------------------------------------------------

/// Predicted output statistics for the given queries: encode the input
/// state from its records, push the representation through the emulator,
/// and decode with the generation network. The GQNQ model is read-only.
inline Eigen::MatrixXd predict_output_statistics(GqnqModel& gqnq,
                                                 EmulatorNet& emu,
                                                 const StateRecords& records,
                                                 const Eigen::MatrixXd& queries) {
  require(emu.config().dim == gqnq.config().rep_dim,
          "emulator and model representation dimensions differ");
  const Eigen::VectorXd r_in = gqnq.represent(records);
  return gqnq.generate_batch(emu.emulate(r_in), queries);
}

inline Eigen::VectorXd predict_output_statistics(GqnqModel& gqnq,
                                                 EmulatorNet& emu,
                                                 const StateRecords& records,
                                                 const Eigen::VectorXd& query) {
  return predict_output_statistics(gqnq, emu, records,
                                   Eigen::MatrixXd(query));
}

}  // namespace nqem
