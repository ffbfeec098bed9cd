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

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nqem/emulator.hpp"
#include "nqem/ensemble.hpp"
#include "nqem/fock.hpp"
#include "nqem/gqnq.hpp"
#include "nqem/hamiltonian.hpp"

namespace nqem {

inline constexpr const char* kConfigSchema = "nqem.config.v1";

enum class ExperimentKind {
  circuit,
  circuit_noisy,
  long_range_dynamics,
  ising_quench,
  kerr_cv,
};

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "circuit") return ExperimentKind::circuit;
  if (s == "circuit_noisy") return ExperimentKind::circuit_noisy;
  if (s == "long_range_dynamics") return ExperimentKind::long_range_dynamics;
  if (s == "ising_quench") return ExperimentKind::ising_quench;
  if (s == "kerr_cv") return ExperimentKind::kerr_cv;
  throw_config("unknown experiment kind '" + s + "'");
}

inline std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::circuit: return "circuit";
    case ExperimentKind::circuit_noisy: return "circuit_noisy";
    case ExperimentKind::long_range_dynamics: return "long_range_dynamics";
    case ExperimentKind::ising_quench: return "ising_quench";
    case ExperimentKind::kerr_cv: return "kerr_cv";
  }
  throw_config("invalid experiment kind");
}

enum class EvolutionMethod { exact, tebd };

inline EvolutionMethod parse_evolution_method(const std::string& s) {
  if (s == "exact") return EvolutionMethod::exact;
  if (s == "tebd") return EvolutionMethod::tebd;
  throw_config("unknown evolution method '" + s + "'");
}

inline std::string evolution_method_name(EvolutionMethod m) {
  return m == EvolutionMethod::exact ? "exact" : "tebd";
}

/// Full description of one experiment: the process, the input ensemble, the
/// measurement set, dataset sizes, and every training hyperparameter. One
/// JSON document; the master seed is mandatory and fans out to named
/// sub-seeds for each random stage.
struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::circuit;
  uint64_t seed = 0;
  std::string run_dir;
  int n_train = 20;
  int n_test = 10;
  int shots = 0;                    // 0: exact statistics.
  bool squared_fidelity = false;

  // Qubit-system parameters.
  int num_qubits = 2;
  int depth = 2;                    // Circuit layers.
  double noise_rate = 0.0;          // circuit_noisy depolarizing rate.
  EnsembleKind ensemble = EnsembleKind::rotated_zero;
  double angle_bound = 0.3 * kPi;
  double alpha = 0.01;              // Long-range interaction decay.
  double field = 1.0;               // Long-range transverse field.
  double evolution_time = 1.0;
  double j_process = 0.5;           // Quench process coupling.
  double g = 1.0;                   // Quench transverse field.
  std::vector<double> j_values;     // Quench ensemble couplings.
  int n_train_per_j = 5;
  int n_test_per_j = 10;
  EvolutionMethod evolution = EvolutionMethod::tebd;
  double dt = 0.02;
  int chi_max = 64;
  double svd_cutoff = 1e-10;

  // Continuous-variable parameters.
  int fock_cutoff = 30;
  double r_max = 2.0;
  int num_theta = 100;
  double kerr_time = 1.0;
  QuadratureGrid grid;

  // Measurement scheme.
  EncodingScheme measurement_scheme = EncodingScheme::pauli_full;
  int k_local = 3;

  // Network sizes.
  int rep_dim = 16;
  std::vector<int> rep_hidden = {64, 64};
  int lstm_hidden = 64;
  int lstm_steps = 4;
  std::vector<int> emulator_hidden = {64, 64};

  GqnqTrainConfig gqnq_train;
  EmulatorTrainConfig emulator_train;

  bool is_qubit_kind() const { return kind != ExperimentKind::kerr_cv; }

  /// Train/test state counts; the quench ensemble derives them from the
  /// coupling sweep.
  int total_train() const {
    if (kind == ExperimentKind::ising_quench) {
      return static_cast<int>(j_values.size()) * n_train_per_j;
    }
    return n_train;
  }
  int total_test() const {
    if (kind == ExperimentKind::ising_quench) {
      return static_cast<int>(j_values.size()) * n_test_per_j;
    }
    return n_test;
  }
};

inline void check_experiment_config(const ExperimentConfig& cfg) {
  auto fail = [&](const std::string& msg) { throw_config(msg); };
  if (cfg.run_dir.empty()) fail("run_dir must not be empty");
  if (cfg.shots < 0) fail("shots must be >= 0");
  if (cfg.total_train() < 1) fail("need at least one training state");
  if (cfg.total_test() < 0) fail("n_test must be >= 0");

  if (cfg.is_qubit_kind()) {
    if (cfg.num_qubits < 1) fail("num_qubits must be >= 1");
    if (cfg.num_qubits > max_dense_qubits()) {
      fail("num_qubits above the dense simulation limit of " +
           std::to_string(max_dense_qubits()));
    }
    if (cfg.measurement_scheme == EncodingScheme::homodyne) {
      fail("homodyne measurements apply only to kerr_cv");
    }
    if (cfg.measurement_scheme == EncodingScheme::pauli_klocal) {
      if (cfg.k_local < 1 || cfg.k_local > 4 || cfg.k_local > cfg.num_qubits) {
        fail("k_local must lie in [1, min(num_qubits, 4)]");
      }
    }
  } else {
    if (cfg.measurement_scheme != EncodingScheme::homodyne) {
      fail("kerr_cv requires homodyne measurements");
    }
    if (cfg.fock_cutoff < 2) fail("fock_cutoff must be >= 2");
    if (cfg.r_max <= 0.0) fail("r_max must be > 0");
    if (cfg.r_max * cfg.r_max > 0.5 * cfg.fock_cutoff) {
      fail("r_max too large for the Fock cutoff; coherent states would "
           "truncate");
    }
    if (cfg.num_theta < 1) fail("num_theta must be >= 1");
    if (cfg.kerr_time < 0.0) fail("kerr_time must be >= 0");
    check_grid(cfg.grid);
  }

  switch (cfg.kind) {
    case ExperimentKind::circuit:
      if (cfg.depth < 0) fail("depth must be >= 0");
      if (cfg.noise_rate != 0.0) fail("circuit kind is unitary; use circuit_noisy for noise");
      break;
    case ExperimentKind::circuit_noisy:
      if (cfg.depth < 0) fail("depth must be >= 0");
      if (cfg.noise_rate <= 0.0 || cfg.noise_rate > 1.0) {
        fail("circuit_noisy needs noise_rate in (0, 1]");
      }
      break;
    case ExperimentKind::long_range_dynamics:
      if (cfg.alpha < 0.0) fail("alpha must be >= 0");
      if (cfg.evolution_time < 0.0) fail("evolution_time must be >= 0");
      break;
    case ExperimentKind::ising_quench: {
      if (cfg.num_qubits < 2) fail("ising_quench needs num_qubits >= 2");
      if (cfg.j_values.empty()) fail("ising_quench needs j_values");
      if (cfg.n_train_per_j < 1) fail("n_train_per_j must be >= 1");
      if (cfg.n_test_per_j < 0) fail("n_test_per_j must be >= 0");
      if (cfg.evolution_time < 0.0) fail("evolution_time must be >= 0");
      if (cfg.evolution == EvolutionMethod::tebd) {
        if (cfg.dt <= 0.0) fail("dt must be > 0");
        if (cfg.chi_max < 1) fail("chi_max must be >= 1");
        if (cfg.svd_cutoff < 0.0) fail("svd_cutoff must be >= 0");
      }
      break;
    }
    case ExperimentKind::kerr_cv:
      break;
  }

  if (cfg.rep_dim < 1) fail("rep_dim must be >= 1");
  if (cfg.rep_hidden.empty()) fail("rep_hidden must not be empty");
  for (int w : cfg.rep_hidden) {
    if (w < 1) fail("rep_hidden widths must be >= 1");
  }
  if (cfg.lstm_hidden < 1) fail("lstm_hidden must be >= 1");
  if (cfg.lstm_steps < 1) fail("lstm_steps must be >= 1");
  for (int w : cfg.emulator_hidden) {
    if (w < 1) fail("emulator_hidden widths must be >= 1");
  }
  if (cfg.gqnq_train.epochs < 0 || cfg.emulator_train.epochs < 0) {
    fail("training epochs must be >= 0");
  }
  if (cfg.gqnq_train.batch_size < 1 || cfg.emulator_train.batch_size < 1) {
    fail("batch sizes must be >= 1");
  }
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<const char*> known,
                                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool found = false;
    for (const char* k : known) {
      if (item.key() == k) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw_config("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void maybe_read(const nlohmann::json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw_config(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

}  // namespace detail

/// Parses a config document; unknown keys are rejected so typos surface
/// instead of silently falling back to defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw_config("config must be a JSON object");
  detail::reject_unknown_keys(
      doc,
      {"schema", "name", "kind", "seed", "run_dir", "n_train", "n_test",
       "shots", "squared_fidelity", "system", "network", "gqnq_train",
       "emulator_train"},
      "config");
  if (!doc.contains("schema") || doc.at("schema") != kConfigSchema) {
    throw_config(std::string("config schema must be '") + kConfigSchema + "'");
  }
  if (!doc.contains("kind")) throw_config("config needs 'kind'");
  if (!doc.contains("seed")) throw_config("config needs 'seed'");

  ExperimentConfig cfg;
  cfg.kind = parse_experiment_kind(doc.at("kind").get<std::string>());
  const auto& seed = doc.at("seed");
  if (!seed.is_number_unsigned() &&
      !(seed.is_number_integer() && seed.get<int64_t>() >= 0)) {
    throw_config("'seed' must be a nonnegative integer");
  }
  cfg.seed = doc.at("seed").get<uint64_t>();
  cfg.name = experiment_kind_name(cfg.kind);
  detail::maybe_read(doc, "name", cfg.name);
  cfg.run_dir = "runs/" + cfg.name;
  detail::maybe_read(doc, "run_dir", cfg.run_dir);
  detail::maybe_read(doc, "n_train", cfg.n_train);
  detail::maybe_read(doc, "n_test", cfg.n_test);
  detail::maybe_read(doc, "shots", cfg.shots);
  detail::maybe_read(doc, "squared_fidelity", cfg.squared_fidelity);

  // Kind-dependent defaults, applied before the overrides below.
  switch (cfg.kind) {
    case ExperimentKind::circuit:
      break;
    case ExperimentKind::circuit_noisy:
      cfg.noise_rate = 0.01;
      cfg.depth = 3;
      break;
    case ExperimentKind::long_range_dynamics:
      cfg.ensemble = EnsembleKind::rotated_plus;
      cfg.angle_bound = kPi / 10.0;
      cfg.num_qubits = 6;
      cfg.evolution_time = 1.0;
      break;
    case ExperimentKind::ising_quench:
      cfg.num_qubits = 6;
      cfg.evolution_time = 10.0;
      cfg.j_values = {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
      cfg.measurement_scheme = EncodingScheme::pauli_klocal;
      break;
    case ExperimentKind::kerr_cv:
      cfg.measurement_scheme = EncodingScheme::homodyne;
      break;
  }

  if (doc.contains("system")) {
    const auto& sys = doc.at("system");
    detail::reject_unknown_keys(
        sys,
        {"num_qubits", "depth", "noise_rate", "ensemble", "angle_bound",
         "alpha", "field", "evolution_time", "j_process", "g", "j_values",
         "n_train_per_j", "n_test_per_j", "evolution", "dt", "chi_max",
         "svd_cutoff", "fock_cutoff", "r_max", "num_theta", "kerr_time",
         "x_min", "x_max", "num_bins", "measurement_scheme", "k_local"},
        "config.system");
    detail::maybe_read(sys, "num_qubits", cfg.num_qubits);
    detail::maybe_read(sys, "depth", cfg.depth);
    detail::maybe_read(sys, "noise_rate", cfg.noise_rate);
    if (sys.contains("ensemble")) {
      cfg.ensemble = parse_ensemble_kind(sys.at("ensemble").get<std::string>());
    }
    detail::maybe_read(sys, "angle_bound", cfg.angle_bound);
    detail::maybe_read(sys, "alpha", cfg.alpha);
    detail::maybe_read(sys, "field", cfg.field);
    detail::maybe_read(sys, "evolution_time", cfg.evolution_time);
    detail::maybe_read(sys, "j_process", cfg.j_process);
    detail::maybe_read(sys, "g", cfg.g);
    detail::maybe_read(sys, "j_values", cfg.j_values);
    detail::maybe_read(sys, "n_train_per_j", cfg.n_train_per_j);
    detail::maybe_read(sys, "n_test_per_j", cfg.n_test_per_j);
    if (sys.contains("evolution")) {
      cfg.evolution =
          parse_evolution_method(sys.at("evolution").get<std::string>());
    }
    detail::maybe_read(sys, "dt", cfg.dt);
    detail::maybe_read(sys, "chi_max", cfg.chi_max);
    detail::maybe_read(sys, "svd_cutoff", cfg.svd_cutoff);
    detail::maybe_read(sys, "fock_cutoff", cfg.fock_cutoff);
    detail::maybe_read(sys, "r_max", cfg.r_max);
    detail::maybe_read(sys, "num_theta", cfg.num_theta);
    detail::maybe_read(sys, "kerr_time", cfg.kerr_time);
    detail::maybe_read(sys, "x_min", cfg.grid.x_min);
    detail::maybe_read(sys, "x_max", cfg.grid.x_max);
    detail::maybe_read(sys, "num_bins", cfg.grid.num_bins);
    if (sys.contains("measurement_scheme")) {
      cfg.measurement_scheme =
          parse_encoding_scheme(sys.at("measurement_scheme").get<std::string>());
    }
    detail::maybe_read(sys, "k_local", cfg.k_local);
  }

  if (doc.contains("network")) {
    const auto& net = doc.at("network");
    detail::reject_unknown_keys(net,
                                {"rep_dim", "rep_hidden", "lstm_hidden",
                                 "lstm_steps", "emulator_hidden"},
                                "config.network");
    detail::maybe_read(net, "rep_dim", cfg.rep_dim);
    detail::maybe_read(net, "rep_hidden", cfg.rep_hidden);
    detail::maybe_read(net, "lstm_hidden", cfg.lstm_hidden);
    detail::maybe_read(net, "lstm_steps", cfg.lstm_steps);
    detail::maybe_read(net, "emulator_hidden", cfg.emulator_hidden);
  }

  auto read_train_block = [&](const char* key, int& epochs, int& batch,
                              double& lr, double& decay) {
    if (!doc.contains(key)) return;
    const auto& blk = doc.at(key);
    detail::reject_unknown_keys(blk, {"epochs", "batch_size", "lr", "lr_decay"},
                                std::string("config.") + key);
    detail::maybe_read(blk, "epochs", epochs);
    detail::maybe_read(blk, "batch_size", batch);
    detail::maybe_read(blk, "lr", lr);
    detail::maybe_read(blk, "lr_decay", decay);
  };
  read_train_block("gqnq_train", cfg.gqnq_train.epochs,
                   cfg.gqnq_train.batch_size, cfg.gqnq_train.lr_base,
                   cfg.gqnq_train.lr_decay);
  read_train_block("emulator_train", cfg.emulator_train.epochs,
                   cfg.emulator_train.batch_size, cfg.emulator_train.lr_base,
                   cfg.emulator_train.lr_decay);

  check_experiment_config(cfg);
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw_config("config parse error in '" + path + "': " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace nqem
