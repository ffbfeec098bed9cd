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

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "nqem/emulator.hpp"
#include "nqem/ensemble.hpp"
#include "nqem/gqnq.hpp"
#include "nqem/pauli.hpp"

namespace {

using nqem::EncodingScheme;
using nqem::GqnqConfig;
using nqem::GqnqModel;
using nqem::GqnqTrainConfig;
using nqem::MeasurementRecord;
using nqem::PauliAxis;
using nqem::Rng;
using nqem::StateRecords;

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4});
}

double bhattacharyya(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  double cf = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    cf += std::sqrt(std::max(p(k), 0.0) * std::max(q(k), 0.0));
  }
  return cf;
}

Eigen::VectorXd random_distribution(int m, Rng& rng) {
  Eigen::VectorXd v(m);
  for (int k = 0; k < m; ++k) v(k) = rng.uniform(0.05, 1.0);
  return v / v.sum();
}

StateRecords random_records(const GqnqConfig& cfg, int count, Rng& rng) {
  StateRecords records(count);
  for (auto& rec : records) {
    rec.encoding.resize(cfg.encoding_dim);
    for (int i = 0; i < cfg.encoding_dim; ++i) {
      rec.encoding(i) = rng.uniform(-1.0, 1.0);
    }
    rec.probs = random_distribution(cfg.num_outcomes, rng);
  }
  return records;
}

/// All 3^L full-length Pauli bases in lexicographic X < Y < Z order.
std::vector<nqem::PauliBasisSpec> all_full_bases(int num_qubits) {
  const std::array<PauliAxis, 3> axes_order = {PauliAxis::X, PauliAxis::Y,
                                               PauliAxis::Z};
  int total = 1;
  for (int q = 0; q < num_qubits; ++q) total *= 3;
  std::vector<nqem::PauliBasisSpec> bases;
  for (int idx = 0; idx < total; ++idx) {
    std::vector<PauliAxis> axes(num_qubits);
    int rem = idx;
    for (int q = num_qubits - 1; q >= 0; --q) {
      axes[q] = axes_order[rem % 3];
      rem /= 3;
    }
    bases.push_back(nqem::full_pauli_basis(axes));
  }
  return bases;
}

StateRecords records_for_state(const nqem::QubitState& state,
                               const std::vector<nqem::PauliBasisSpec>& bases) {
  StateRecords records;
  for (const auto& basis : bases) {
    MeasurementRecord rec;
    rec.encoding = nqem::encode_pauli_full(basis.axes);
    rec.probs = nqem::pauli_statistics(state, basis);
    records.push_back(std::move(rec));
  }
  return records;
}

double mean_training_fidelity(GqnqModel& model,
                              const std::vector<StateRecords>& states) {
  double cf_sum = 0.0;
  int count = 0;
  for (const auto& records : states) {
    const Eigen::VectorXd r = model.represent(records);
    for (const auto& rec : records) {
      cf_sum += bhattacharyya(model.generate(r, rec.encoding), rec.probs);
      ++count;
    }
  }
  return cf_sum / count;
}

}  // namespace

TEST_CASE("measurement encodings lay out one-hot blocks as documented",
          "[gqnq]") {
  const Eigen::VectorXd full = nqem::encode_pauli_full(
      {PauliAxis::X, PauliAxis::Z, PauliAxis::Y});
  REQUIRE(full.size() == 9);
  Eigen::VectorXd expected_full(9);
  expected_full << 1, 0, 0, 0, 0, 1, 0, 1, 0;
  REQUIRE((full - expected_full).lpNorm<Eigen::Infinity>() == 0.0);

  nqem::PauliBasisSpec spec;
  spec.sites = {1, 3};
  spec.axes = {PauliAxis::Y, PauliAxis::X};
  const Eigen::VectorXd klocal = nqem::encode_pauli_klocal(spec, 4);
  REQUIRE(klocal.size() == 14);
  REQUIRE(klocal.sum() == 4.0);
  REQUIRE(klocal(1) == 1.0);        // site 1
  REQUIRE(klocal(4 + 1) == 1.0);    // axis Y
  REQUIRE(klocal(7 + 3) == 1.0);    // site 3
  REQUIRE(klocal(7 + 4 + 0) == 1.0);  // axis X

  const Eigen::VectorXd hom = nqem::encode_homodyne(0.3);
  REQUIRE(hom.size() == 2);
  REQUIRE(hom(0) == std::cos(0.3));
  REQUIRE(hom(1) == std::sin(0.3));

  REQUIRE(nqem::encoding_dim(EncodingScheme::pauli_full, 3, 0) == full.size());
  REQUIRE(nqem::encoding_dim(EncodingScheme::pauli_klocal, 4, 2) ==
          klocal.size());
  REQUIRE(nqem::encoding_dim(EncodingScheme::homodyne, 1, 0) == hom.size());
}

TEST_CASE("representation is invariant to record order and duplication",
          "[gqnq]") {
  GqnqConfig cfg;
  cfg.encoding_dim = 4;
  cfg.num_outcomes = 3;
  cfg.rep_dim = 6;
  cfg.rep_hidden = {10, 10};
  cfg.lstm_hidden = 8;
  GqnqModel model(cfg);
  Rng rng(nqem::derive_seed(11, "gqnq.invariance"));
  model.init(rng);

  const StateRecords records = random_records(cfg, 5, rng);
  const Eigen::VectorXd r = model.represent(records);
  REQUIRE(r.size() == cfg.rep_dim);

  StateRecords reversed(records.rbegin(), records.rend());
  REQUIRE((model.represent(reversed) - r).lpNorm<Eigen::Infinity>() < 1e-12);

  StateRecords doubled = records;
  doubled.insert(doubled.end(), records.begin(), records.end());
  REQUIRE((model.represent(doubled) - r).lpNorm<Eigen::Infinity>() < 1e-12);

  // Bitwise repeatable.
  REQUIRE((model.represent(records) - r).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("generated outcome distributions are valid and batch consistent",
          "[gqnq]") {
  GqnqConfig cfg;
  cfg.encoding_dim = 5;
  cfg.num_outcomes = 4;
  cfg.rep_dim = 6;
  cfg.rep_hidden = {12};
  cfg.lstm_hidden = 9;
  GqnqModel model(cfg);
  Rng rng(nqem::derive_seed(12, "gqnq.generate"));
  model.init(rng);

  const StateRecords records = random_records(cfg, 4, rng);
  const Eigen::VectorXd r = model.represent(records);

  Eigen::MatrixXd queries(cfg.encoding_dim, 3);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < cfg.encoding_dim; ++i) {
      queries(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  const Eigen::MatrixXd probs = model.generate_batch(r, queries);
  REQUIRE(probs.rows() == cfg.num_outcomes);
  REQUIRE(probs.cols() == 3);
  REQUIRE(probs.minCoeff() >= 0.0);
  for (int j = 0; j < 3; ++j) {
    REQUIRE(std::abs(probs.col(j).sum() - 1.0) < 1e-12);
    const Eigen::VectorXd single = model.generate(r, queries.col(j));
    REQUIRE((single - probs.col(j)).lpNorm<Eigen::Infinity>() == 0.0);
  }
  // Repeat call is bitwise identical (no stale recurrent state).
  REQUIRE((model.generate_batch(r, queries) - probs).lpNorm<Eigen::Infinity>() ==
          0.0);
}

TEST_CASE("joint gradients match finite differences through both networks",
          "[gqnq]") {
  GqnqConfig cfg;
  cfg.encoding_dim = 3;
  cfg.num_outcomes = 4;
  cfg.rep_dim = 4;
  cfg.rep_hidden = {5};
  cfg.lstm_hidden = 6;
  cfg.lstm_steps = 2;
  GqnqModel model(cfg);
  Rng rng(nqem::derive_seed(13, "gqnq.gradcheck"));
  model.init(rng);

  const StateRecords records = random_records(cfg, 2, rng);
  Eigen::MatrixXd queries(cfg.encoding_dim, 2);
  Eigen::MatrixXd targets(cfg.num_outcomes, 2);
  for (int j = 0; j < 2; ++j) {
    queries.col(j) = records[j].encoding;
    targets.col(j) = random_distribution(cfg.num_outcomes, rng);
  }

  auto loss_value = [&]() {
    return nqem::gqnq_loss(
        model.generate_batch(model.represent(records), queries), targets);
  };

  nqem::zero_grads(model.params());
  const double loss0 =
      model.train_state(records, queries, targets, 1.0 / 2.0) / 2.0;
  REQUIRE(rel_err(loss0, loss_value()) < 1e-12);

  const double h = 1e-5;
  for (nqem::ParamArray* p : model.params()) {
    for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
        const double saved = p->value(r, c);
        p->value(r, c) = saved + h;
        const double up = loss_value();
        p->value(r, c) = saved - h;
        const double down = loss_value();
        p->value(r, c) = saved;
        const double fd = (up - down) / (2.0 * h);
        INFO(p->name << "(" << r << "," << c << ")");
        REQUIRE(rel_err(fd, p->grad(r, c)) < 1e-5);
      }
    }
  }
}

TEST_CASE("cross-entropy closed forms hold for point and uniform targets",
          "[gqnq]") {
  const int m = 4;
  Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(m, 1, 1.0 / m);
  Eigen::MatrixXd point = Eigen::MatrixXd::Zero(m, 1);
  point(0, 0) = 1.0;

  REQUIRE(rel_err(nqem::gqnq_loss(uniform, point), std::log(double(m))) <
          1e-14);
  REQUIRE(nqem::gqnq_loss(point, point) == 0.0);

  // A zero predicted probability is floored at 1e-12 inside the log.
  Eigen::MatrixXd other = Eigen::MatrixXd::Zero(m, 1);
  other(1, 0) = 1.0;
  REQUIRE(rel_err(nqem::gqnq_loss(point, other), -std::log(1e-12)) < 1e-14);

  // Column losses average.
  Eigen::MatrixXd preds(m, 2), targs(m, 2);
  preds << uniform, uniform;
  targs << point, uniform;
  const double a = nqem::gqnq_loss(uniform, point);
  const double b = nqem::gqnq_loss(uniform, uniform);
  REQUIRE(rel_err(nqem::gqnq_loss(preds, targs), 0.5 * (a + b)) < 1e-14);

  REQUIRE_THROWS_AS(nqem::gqnq_loss(uniform, preds), nqem::Error);
}

TEST_CASE("training is reproducible and zero epochs change nothing", "[gqnq]") {
  GqnqConfig cfg;
  cfg.encoding_dim = 3;
  cfg.num_outcomes = 4;
  cfg.rep_dim = 5;
  cfg.rep_hidden = {8};
  cfg.lstm_hidden = 6;
  cfg.lstm_steps = 2;

  auto build = [&]() {
    auto model = std::make_unique<GqnqModel>(cfg);
    Rng init_rng(nqem::derive_seed(21, "gqnq.repro.init"));
    model->init(init_rng);
    return model;
  };
  Rng data_rng(nqem::derive_seed(21, "gqnq.repro.data"));
  std::vector<StateRecords> states;
  for (int i = 0; i < 3; ++i) states.push_back(random_records(cfg, 4, data_rng));

  GqnqTrainConfig tc;
  tc.epochs = 5;
  tc.batch_size = 2;

  auto model_a = build();
  const uint64_t before = nqem::params_checksum(model_a->params());

  // Zero epochs: no parameter movement, empty trace.
  Rng rng0(7);
  GqnqTrainConfig none = tc;
  none.epochs = 0;
  REQUIRE(nqem::train_gqnq(*model_a, states, none, rng0).empty());
  REQUIRE(nqem::params_checksum(model_a->params()) == before);

  Rng rng_a(nqem::derive_seed(21, "gqnq.repro.train"));
  const auto trace_a = nqem::train_gqnq(*model_a, states, tc, rng_a);
  auto model_b = build();
  Rng rng_b(nqem::derive_seed(21, "gqnq.repro.train"));
  const auto trace_b = nqem::train_gqnq(*model_b, states, tc, rng_b);

  REQUIRE(trace_a.size() == size_t(tc.epochs));
  REQUIRE(trace_a == trace_b);
  for (double v : trace_a) REQUIRE(std::isfinite(v));
  REQUIRE(nqem::params_checksum(model_a->params()) ==
          nqem::params_checksum(model_b->params()));
  REQUIRE(nqem::params_checksum(model_a->params()) != before);

  // Ragged record counts are rejected.
  auto bad = states;
  bad[1].pop_back();
  auto model_c = build();
  Rng rng_c(3);
  REQUIRE_THROWS_AS(nqem::train_gqnq(*model_c, bad, tc, rng_c), nqem::Error);
}

TEST_CASE("training overfits a single two-qubit state", "[gqnq]") {
  Rng state_rng(nqem::derive_seed(31, "gqnq.single.state"));
  const nqem::QubitState state = nqem::prepare_input_state(
      nqem::EnsembleKind::rotated_zero, 2, 2.0 * nqem::kPi, state_rng);
  const std::vector<StateRecords> states = {
      records_for_state(state, all_full_bases(2))};

  GqnqConfig cfg;
  cfg.encoding_dim = 6;
  cfg.num_outcomes = 4;
  cfg.rep_dim = 8;
  cfg.rep_hidden = {32, 32};
  cfg.lstm_hidden = 32;
  GqnqModel model(cfg);
  Rng init_rng(nqem::derive_seed(31, "gqnq.single.init"));
  model.init(init_rng);

  GqnqTrainConfig tc;
  tc.epochs = 250;
  tc.batch_size = 1;
  tc.lr_decay = 0.99;
  Rng train_rng(nqem::derive_seed(31, "gqnq.single.train"));
  const auto trace = nqem::train_gqnq(model, states, tc, train_rng);

  REQUIRE(trace.back() < trace.front());
  REQUIRE(mean_training_fidelity(model, states) >= 0.99);
}

TEST_CASE("training fits ten rotated two-qubit states", "[gqnq]") {
  Rng state_rng(nqem::derive_seed(32, "gqnq.ten.states"));
  const auto bases = all_full_bases(2);
  std::vector<StateRecords> states;
  for (int i = 0; i < 10; ++i) {
    const nqem::QubitState state = nqem::prepare_input_state(
        nqem::EnsembleKind::rotated_zero, 2, 2.0 * nqem::kPi, state_rng);
    states.push_back(records_for_state(state, bases));
  }

  GqnqConfig cfg;
  cfg.encoding_dim = 6;
  cfg.num_outcomes = 4;
  cfg.rep_dim = 16;
  cfg.rep_hidden = {64, 64};
  cfg.lstm_hidden = 64;
  GqnqModel model(cfg);
  Rng init_rng(nqem::derive_seed(32, "gqnq.ten.init"));
  model.init(init_rng);

  GqnqTrainConfig tc;
  tc.epochs = 800;
  tc.batch_size = 10;
  tc.lr_decay = 0.997;
  Rng train_rng(nqem::derive_seed(32, "gqnq.ten.train"));
  const auto trace = nqem::train_gqnq(model, states, tc, train_rng);

  REQUIRE(trace.back() < trace.front());
  REQUIRE(mean_training_fidelity(model, states) >= 0.99);
}

TEST_CASE("architecture fingerprint reflects the configuration", "[gqnq]") {
  GqnqConfig cfg;
  cfg.encoding_dim = 6;
  cfg.num_outcomes = 4;
  cfg.rep_dim = 8;
  cfg.rep_hidden = {16, 16};
  cfg.lstm_hidden = 12;
  cfg.lstm_steps = 4;
  GqnqModel model(cfg);
  REQUIRE(model.architecture_fingerprint() ==
          "gqnq(enc=6,m=4,d=8,rep=16,16,lstm=12x4)");

  GqnqConfig other = cfg;
  other.rep_dim = 9;
  REQUIRE(GqnqModel(other).architecture_fingerprint() !=
          model.architecture_fingerprint());
}
