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

#include "nqem/nn/adam.hpp"
#include "nqem/nn/layers.hpp"
#include "nqem/nn/lstm.hpp"
#include "nqem/pauli.hpp"

namespace nqem {

// ---------------------------------------------------------------------------
// Measurement encodings fed to the networks.
// ---------------------------------------------------------------------------

enum class EncodingScheme { pauli_full, pauli_klocal, homodyne };

inline EncodingScheme parse_encoding_scheme(const std::string& s) {
  if (s == "pauli_full") return EncodingScheme::pauli_full;
  if (s == "pauli_klocal") return EncodingScheme::pauli_klocal;
  if (s == "homodyne") return EncodingScheme::homodyne;
  throw_argument("unknown encoding scheme '" + s + "'");
}

inline std::string encoding_scheme_name(EncodingScheme s) {
  switch (s) {
    case EncodingScheme::pauli_full: return "pauli_full";
    case EncodingScheme::pauli_klocal: return "pauli_klocal";
    case EncodingScheme::homodyne: return "homodyne";
  }
  throw_argument("invalid encoding scheme");
}

/// pauli_full: one 3-slot one-hot (X, Y, Z order) per qubit, length 3L.
inline Eigen::VectorXd encode_pauli_full(const std::vector<PauliAxis>& axes) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * axes.size());
  for (size_t q = 0; q < axes.size(); ++q) {
    v(3 * q + static_cast<int>(axes[q])) = 1.0;
  }
  return v;
}

/// pauli_klocal: per measured site, a site one-hot of length L followed by
/// the axis one-hot of length 3; total k (L + 3).
inline Eigen::VectorXd encode_pauli_klocal(const PauliBasisSpec& spec,
                                           int num_qubits) {
  check_basis_spec(spec, num_qubits);
  const int k = spec.num_sites();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(k * (num_qubits + 3));
  for (int i = 0; i < k; ++i) {
    const int base = i * (num_qubits + 3);
    v(base + spec.sites[i]) = 1.0;
    v(base + num_qubits + static_cast<int>(spec.axes[i])) = 1.0;
  }
  return v;
}

/// homodyne: (cos theta, sin theta).
inline Eigen::VectorXd encode_homodyne(double theta) {
  Eigen::VectorXd v(2);
  v << std::cos(theta), std::sin(theta);
  return v;
}

inline int encoding_dim(EncodingScheme scheme, int num_qubits, int k_local) {
  switch (scheme) {
    case EncodingScheme::pauli_full: return 3 * num_qubits;
    case EncodingScheme::pauli_klocal: return k_local * (num_qubits + 3);
    case EncodingScheme::homodyne: return 2;
  }
  throw_argument("invalid encoding scheme");
}

/// One measurement on one state: the encoded setting and the outcome
/// distribution observed under it.
struct MeasurementRecord {
  Eigen::VectorXd encoding;
  Eigen::VectorXd probs;
};

using StateRecords = std::vector<MeasurementRecord>;

// ---------------------------------------------------------------------------
// Model.
// ---------------------------------------------------------------------------

struct GqnqConfig {
  int encoding_dim = 0;             // Length of each measurement encoding.
  int num_outcomes = 0;             // Width of every outcome distribution.
  int rep_dim = 32;                 // State representation dimension d.
  std::vector<int> rep_hidden = {128, 128, 128};
  int lstm_hidden = 128;            // Encoder output = LSTM hidden size.
  int lstm_steps = 4;               // Refinement steps on a constant token.
};

inline void check_gqnq_config(const GqnqConfig& cfg) {
  require(cfg.encoding_dim >= 1, "encoding_dim must be >= 1");
  require(cfg.num_outcomes >= 2, "num_outcomes must be >= 2");
  require(cfg.rep_dim >= 1, "rep_dim must be >= 1");
  require(!cfg.rep_hidden.empty(), "rep_hidden must not be empty");
  for (int w : cfg.rep_hidden) require(w >= 1, "rep_hidden width must be >= 1");
  require(cfg.lstm_hidden >= 1, "lstm_hidden must be >= 1");
  require(cfg.lstm_steps >= 1, "lstm_steps must be >= 1");
}

/// Representation network (dense ReLU stack ending in a linear map to d)
/// plus generation network (dense encoder of [r || query] seeding an LSTM
/// hidden state, a fixed number of LSTM steps driven by a constant unit
/// token, and a dense softmax head over outcomes).
class GqnqModel {
 public:
  explicit GqnqModel(const GqnqConfig& cfg)
      : cfg_(cfg),
        gen_encoder_("gen.encoder", cfg.rep_dim + cfg.encoding_dim,
                     cfg.lstm_hidden),
        lstm_("gen.lstm", 1, cfg.lstm_hidden),
        head_("gen.head", cfg.lstm_hidden, cfg.num_outcomes) {
    check_gqnq_config(cfg);
    int in_dim = cfg.encoding_dim + cfg.num_outcomes;
    for (size_t k = 0; k < cfg.rep_hidden.size(); ++k) {
      rep_layers_.emplace_back("rep." + std::to_string(k), in_dim,
                               cfg.rep_hidden[k]);
      in_dim = cfg.rep_hidden[k];
    }
    rep_layers_.emplace_back("rep.out", in_dim, cfg.rep_dim);
    rep_relus_.resize(cfg.rep_hidden.size());
  }

  const GqnqConfig& config() const { return cfg_; }

  void init(Rng& rng) {
    for (auto& layer : rep_layers_) layer.init(rng);
    gen_encoder_.init(rng);
    lstm_.init(rng);
    head_.init(rng);
  }

  ParamRefs params() {
    ParamRefs refs;
    for (auto& layer : rep_layers_) layer.collect_params(refs);
    gen_encoder_.collect_params(refs);
    lstm_.collect_params(refs);
    head_.collect_params(refs);
    return refs;
  }

  /// Architecture descriptor used to link dependent checkpoints.
  std::string architecture_fingerprint() const {
    std::ostringstream os;
    os << "gqnq(enc=" << cfg_.encoding_dim << ",m=" << cfg_.num_outcomes
       << ",d=" << cfg_.rep_dim << ",rep=";
    for (size_t k = 0; k < cfg_.rep_hidden.size(); ++k) {
      os << (k ? "," : "") << cfg_.rep_hidden[k];
    }
    os << ",lstm=" << cfg_.lstm_hidden << "x" << cfg_.lstm_steps << ")";
    return os.str();
  }

  /// Mean over records of f_xi(encoding || probs); order independent.
  Eigen::VectorXd represent(const StateRecords& records) {
    const Eigen::MatrixXd R = rep_forward(records_matrix(records));
    return R.rowwise().mean();
  }

  /// Outcome distributions for a batch of queries (one per column).
  Eigen::MatrixXd generate_batch(const Eigen::VectorXd& r,
                                 const Eigen::MatrixXd& queries) {
    const Eigen::MatrixXd probs = softmax_columns(gen_forward(r, queries));
    lstm_.clear_cache();
    return probs;
  }

  Eigen::VectorXd generate(const Eigen::VectorXd& r,
                           const Eigen::VectorXd& query) {
    return generate_batch(r, query);
  }

  /// Joint forward/backward for one training state: represent from its
  /// records, generate for the given queries, cross-entropy against the
  /// targets. Gradients of (summed loss * grad_scale) are accumulated.
  /// Returns the summed cross-entropy over the queries.
  double train_state(const StateRecords& records,
                     const Eigen::MatrixXd& queries,
                     const Eigen::MatrixXd& targets, double grad_scale) {
    require(queries.cols() == targets.cols(),
            "queries and targets disagree in count");
    require(targets.rows() == cfg_.num_outcomes,
            "target width does not match the outcome count");
    const Eigen::Index num_records = static_cast<Eigen::Index>(records.size());

    const Eigen::MatrixXd logits =
        gen_forward_from_records(records, queries);
    const XentResult xent = softmax_xent(logits, targets);

    // Backward through the generation network.
    Eigen::MatrixXd dh = head_.backward(xent.dlogits * grad_scale);
    Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(cfg_.lstm_hidden, dh.cols());
    for (int step = 0; step < cfg_.lstm_steps; ++step) {
      Eigen::MatrixXd dx, dh_prev, dc_prev;
      lstm_.backward_step(dh, dc, dx, dh_prev, dc_prev);
      dh = std::move(dh_prev);
      dc = std::move(dc_prev);
    }
    const Eigen::MatrixXd dcat = gen_encoder_.backward(dh);

    // The representation was replicated across query columns, so its
    // gradient is the row sum; the mean aggregation spreads it evenly
    // over the record columns.
    const Eigen::VectorXd dr = dcat.topRows(cfg_.rep_dim).rowwise().sum();
    Eigen::MatrixXd dR(cfg_.rep_dim, num_records);
    dR.colwise() = Eigen::VectorXd(dr / double(num_records));
    rep_backward(dR);
    return xent.loss_sum;
  }

 private:
  Eigen::MatrixXd records_matrix(const StateRecords& records) const {
    require(!records.empty(), "state has no measurement records");
    Eigen::MatrixXd X(cfg_.encoding_dim + cfg_.num_outcomes, records.size());
    for (size_t j = 0; j < records.size(); ++j) {
      require(records[j].encoding.size() == cfg_.encoding_dim,
              "measurement encoding has the wrong length");
      require(records[j].probs.size() == cfg_.num_outcomes,
              "outcome distribution has the wrong width");
      X.col(j) << records[j].encoding, records[j].probs;
    }
    return X;
  }

  Eigen::MatrixXd rep_forward(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd h = X;
    for (size_t k = 0; k < rep_relus_.size(); ++k) {
      h = rep_relus_[k].forward(rep_layers_[k].forward(h));
    }
    return rep_layers_.back().forward(h);
  }

  void rep_backward(const Eigen::MatrixXd& dR) {
    Eigen::MatrixXd d = rep_layers_.back().backward(dR);
    for (size_t k = rep_relus_.size(); k-- > 0;) {
      d = rep_layers_[k].backward(rep_relus_[k].backward(d));
    }
  }

  Eigen::MatrixXd gen_forward(const Eigen::VectorXd& r,
                              const Eigen::MatrixXd& queries) {
    require(r.size() == cfg_.rep_dim, "representation has the wrong length");
    require(queries.rows() == cfg_.encoding_dim,
            "query encoding has the wrong length");
    Eigen::MatrixXd cat(cfg_.rep_dim + cfg_.encoding_dim, queries.cols());
    cat.topRows(cfg_.rep_dim).colwise() = r;
    cat.bottomRows(cfg_.encoding_dim) = queries;

    Eigen::MatrixXd h = gen_encoder_.forward(cat);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(cfg_.lstm_hidden, h.cols());
    const Eigen::MatrixXd token = Eigen::MatrixXd::Ones(1, h.cols());
    for (int step = 0; step < cfg_.lstm_steps; ++step) {
      Eigen::MatrixXd h_next, c_next;
      lstm_.step(token, h, c, h_next, c_next);
      h = std::move(h_next);
      c = std::move(c_next);
    }
    return head_.forward(h);
  }

  Eigen::MatrixXd gen_forward_from_records(const StateRecords& records,
                                           const Eigen::MatrixXd& queries) {
    const Eigen::MatrixXd R = rep_forward(records_matrix(records));
    return gen_forward(R.rowwise().mean(), queries);
  }

  GqnqConfig cfg_;
  std::vector<DenseLayer> rep_layers_;
  std::vector<ReluLayer> rep_relus_;
  DenseLayer gen_encoder_;
  LstmCell lstm_;
  DenseLayer head_;
};

// ---------------------------------------------------------------------------
// Loss and training.
// ---------------------------------------------------------------------------

/// Mean cross-entropy sum_k -t_k log(max(p_k, eps)) over matched columns.
inline double gqnq_loss(const Eigen::MatrixXd& predictions,
                        const Eigen::MatrixXd& targets, double eps = 1e-12) {
  require(predictions.rows() == targets.rows() &&
              predictions.cols() == targets.cols(),
          "predictions and targets disagree in shape");
  require(predictions.cols() > 0, "no distributions to compare");
  double total = 0.0;
  for (Eigen::Index j = 0; j < predictions.cols(); ++j) {
    for (Eigen::Index k = 0; k < predictions.rows(); ++k) {
      total -= targets(k, j) * std::log(std::max(predictions(k, j), eps));
    }
  }
  return total / double(predictions.cols());
}

struct GqnqTrainConfig {
  int epochs = 100;
  int batch_size = 5;
  double lr_base = 0.01;
  double lr_decay = 0.95;
};

/// Joint training of the representation and generation networks. Per epoch:
/// draw batch_size state indices independently and uniformly from the
/// fiducial set, accumulate the mean cross-entropy over each state's full
/// measurement set, then take one Adam step. The returned trace holds the
/// pre-update batch loss per epoch.
inline std::vector<double> train_gqnq(GqnqModel& model,
                                      const std::vector<StateRecords>& states,
                                      const GqnqTrainConfig& tc, Rng& rng) {
  require(!states.empty(), "no training states");
  require(tc.epochs >= 0, "epochs must be >= 0");
  require(tc.batch_size >= 1, "batch_size must be >= 1");
  const size_t num_records = states.front().size();
  require(num_records > 0, "training states carry no records");
  for (const auto& s : states) {
    if (s.size() != num_records) {
      throw_data("every training state must carry the full measurement set");
    }
  }

  // Queries and targets per state are its own measurement set.
  const int enc = model.config().encoding_dim;
  const int m = model.config().num_outcomes;
  std::vector<Eigen::MatrixXd> queries(states.size()), targets(states.size());
  for (size_t i = 0; i < states.size(); ++i) {
    queries[i].resize(enc, num_records);
    targets[i].resize(m, num_records);
    for (size_t j = 0; j < num_records; ++j) {
      queries[i].col(j) = states[i][j].encoding;
      targets[i].col(j) = states[i][j].probs;
    }
  }

  AdamOptimizer opt(model.params());
  std::vector<double> trace;
  trace.reserve(tc.epochs);
  const double scale = 1.0 / (double(tc.batch_size) * double(num_records));
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    zero_grads(model.params());
    double batch_loss = 0.0;
    for (int k = 0; k < tc.batch_size; ++k) {
      const size_t pick = rng.uniform_int(states.size());
      batch_loss +=
          model.train_state(states[pick], queries[pick], targets[pick], scale);
    }
    opt.step(decayed_lr(tc.lr_base, tc.lr_decay, epoch));
    trace.push_back(batch_loss * scale);
  }
  return trace;
}

}  // namespace nqem
