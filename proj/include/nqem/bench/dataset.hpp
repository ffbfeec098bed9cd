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
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nqem/bench/config.hpp"
#include "nqem/mps.hpp"
#include "nqem/tebd.hpp"

namespace nqem {

inline constexpr const char* kDatasetSchema = "nqem.dataset.v1";

/// Simulation-only record of the exact input state, kept alongside the
/// measurement data so the nearest-training-data baseline can rank training
/// states by quantum fidelity.
using StateSidecar = std::variant<QubitState, FockState>;

inline double sidecar_fidelity(const StateSidecar& a, const StateSidecar& b) {
  if (a.index() != b.index()) {
    throw_data("cannot compare qubit and Fock sidecar states");
  }
  if (std::holds_alternative<QubitState>(a)) {
    return quantum_fidelity(std::get<QubitState>(a), std::get<QubitState>(b));
  }
  return fock_fidelity(std::get<FockState>(a), std::get<FockState>(b));
}

/// All data for one sampled state: exact input sidecar plus input/output
/// outcome distributions for every measurement in the shared table.
struct DatasetState {
  int state_id = 0;
  bool is_test = false;
  double j_coupling = 0.0;          // Quench ensembles only.
  StateSidecar sidecar;
  std::vector<Eigen::VectorXd> input_probs;    // Indexed by measurement.
  std::vector<Eigen::VectorXd> output_probs;
};

struct Dataset {
  std::string kind_name;
  std::string encoding_name;
  int encoding_dim = 0;
  int num_outcomes = 0;
  int n_train = 0;
  int n_test = 0;
  uint64_t seed = 0;
  int shots = 0;
  std::vector<Eigen::VectorXd> measurements;   // Encoding table.
  std::vector<DatasetState> states;

  int num_measurements() const {
    return static_cast<int>(measurements.size());
  }
  /// Training slice; states are ordered train first, then test.
  std::vector<DatasetState>::const_iterator train_end() const {
    return states.begin() + n_train;
  }
};

inline void check_dataset(const Dataset& ds) {
  require(!ds.measurements.empty(), "dataset has no measurements");
  require(static_cast<int>(ds.states.size()) == ds.n_train + ds.n_test,
          "dataset state count does not match the train/test split");
  for (const auto& enc : ds.measurements) {
    require(enc.size() == ds.encoding_dim,
            "measurement encoding length mismatch");
  }
  for (const auto& st : ds.states) {
    require(st.input_probs.size() == ds.measurements.size() &&
                st.output_probs.size() == ds.measurements.size(),
            "state is missing measurement records");
    for (const auto* side : {&st.input_probs, &st.output_probs}) {
      for (const auto& p : *side) {
        require(p.size() == ds.num_outcomes, "distribution width mismatch");
        require(p.minCoeff() >= 0.0, "negative probability in dataset");
        require(std::abs(p.sum() - 1.0) < 1e-9,
                "distribution does not sum to 1");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Finite-shot resampling.
// ---------------------------------------------------------------------------

/// Multinomial empirical frequencies from `shots` independent draws.
inline Eigen::VectorXd finite_shot_resample(const Eigen::VectorXd& p,
                                            int64_t shots, Rng& rng) {
  require(shots >= 1, "shots must be >= 1");
  require(p.size() >= 1 && p.minCoeff() >= 0.0, "invalid distribution");
  const double total = p.sum();
  require(total > 0.0, "distribution has no mass");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(p.size());
  for (int64_t s = 0; s < shots; ++s) {
    double u = rng.uniform() * total;
    Eigen::Index k = 0;
    for (; k < p.size() - 1; ++k) {
      u -= p(k);
      if (u < 0.0) break;
    }
    counts(k) += 1.0;
  }
  return counts / double(shots);
}

// ---------------------------------------------------------------------------
// Measurement tables.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<PauliAxis> axes_from_index(int idx, int count) {
  std::vector<PauliAxis> axes(count);
  for (int q = count - 1; q >= 0; --q) {
    axes[q] = static_cast<PauliAxis>(idx % 3);
    idx /= 3;
  }
  return axes;
}

/// All site subsets of size k in ascending lexicographic order.
inline void append_site_subsets(int num_qubits, int k, std::vector<int>& pick,
                                int next,
                                std::vector<std::vector<int>>& out) {
  if (static_cast<int>(pick.size()) == k) {
    out.push_back(pick);
    return;
  }
  for (int s = next; s < num_qubits; ++s) {
    pick.push_back(s);
    append_site_subsets(num_qubits, k, pick, s + 1, out);
    pick.pop_back();
  }
}

}  // namespace detail

/// Pauli basis table for one experiment. pauli_full enumerates all 3^L axis
/// strings; pauli_klocal enumerates every k-site subset with all 3^k axis
/// strings, subsets outer, axes inner, both lexicographic.
inline std::vector<PauliBasisSpec> pauli_measurement_table(
    EncodingScheme scheme, int num_qubits, int k_local) {
  std::vector<PauliBasisSpec> table;
  if (scheme == EncodingScheme::pauli_full) {
    int total = 1;
    for (int q = 0; q < num_qubits; ++q) total *= 3;
    for (int idx = 0; idx < total; ++idx) {
      table.push_back(
          full_pauli_basis(detail::axes_from_index(idx, num_qubits)));
    }
    return table;
  }
  require(scheme == EncodingScheme::pauli_klocal,
          "expected a Pauli measurement scheme");
  std::vector<std::vector<int>> subsets;
  std::vector<int> pick;
  detail::append_site_subsets(num_qubits, k_local, pick, 0, subsets);
  int axis_total = 1;
  for (int q = 0; q < k_local; ++q) axis_total *= 3;
  for (const auto& sites : subsets) {
    for (int idx = 0; idx < axis_total; ++idx) {
      PauliBasisSpec spec;
      spec.sites = sites;
      spec.axes = detail::axes_from_index(idx, k_local);
      table.push_back(std::move(spec));
    }
  }
  return table;
}

inline std::vector<double> homodyne_theta_table(int num_theta) {
  std::vector<double> thetas(num_theta);
  for (int i = 0; i < num_theta; ++i) thetas[i] = kPi * double(i) / num_theta;
  return thetas;
}

// ---------------------------------------------------------------------------
// Generation.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Eigen::VectorXd> stats_for_pure(
    const QubitState& state, const std::vector<PauliBasisSpec>& bases) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(bases.size());
  for (const auto& spec : bases) out.push_back(pauli_statistics(state, spec));
  return out;
}

inline std::vector<Eigen::VectorXd> stats_for_density(
    const DensityOperator& rho, const std::vector<PauliBasisSpec>& bases) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(bases.size());
  for (const auto& spec : bases) out.push_back(pauli_statistics(rho, spec));
  return out;
}

inline std::vector<Eigen::VectorXd> stats_for_mps(
    const MatrixProductState& psi, const std::vector<PauliBasisSpec>& bases) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(bases.size());
  for (const auto& spec : bases) {
    out.push_back(local_pauli_statistics(psi, spec));
  }
  return out;
}

}  // namespace detail

/// Samples all input states, pushes them through the configured process,
/// and records exact statistics for every measurement. Deterministic under
/// the master seed; `shots > 0` replaces exact statistics with multinomial
/// frequencies.
inline Dataset generate_dataset(const ExperimentConfig& cfg) {
  check_experiment_config(cfg);
  Dataset ds;
  ds.kind_name = experiment_kind_name(cfg.kind);
  ds.encoding_name = encoding_scheme_name(cfg.measurement_scheme);
  ds.n_train = cfg.total_train();
  ds.n_test = cfg.total_test();
  ds.seed = cfg.seed;
  ds.shots = cfg.shots;

  Rng process_rng(derive_seed(cfg.seed, "dataset.process"));
  Rng state_rng(derive_seed(cfg.seed, "dataset.states"));
  Rng shot_rng(derive_seed(cfg.seed, "dataset.shots"));

  const int total_states = ds.n_train + ds.n_test;

  if (cfg.is_qubit_kind()) {
    const int L = cfg.num_qubits;
    const auto bases = pauli_measurement_table(cfg.measurement_scheme, L,
                                               cfg.k_local);
    ds.encoding_dim = encoding_dim(cfg.measurement_scheme, L, cfg.k_local);
    ds.num_outcomes =
        cfg.measurement_scheme == EncodingScheme::pauli_full
            ? (1 << L)
            : (1 << cfg.k_local);
    for (const auto& spec : bases) {
      ds.measurements.push_back(
          cfg.measurement_scheme == EncodingScheme::pauli_full
              ? encode_pauli_full(spec.axes)
              : encode_pauli_klocal(spec, L));
    }

    // The unknown process is fixed once per experiment.
    CircuitSpec circuit;
    std::unique_ptr<HamiltonianEvolver> evolver;
    if (cfg.kind == ExperimentKind::circuit ||
        cfg.kind == ExperimentKind::circuit_noisy) {
      circuit = random_circuit_spec(L, cfg.depth, cfg.noise_rate, process_rng);
    } else if (cfg.kind == ExperimentKind::long_range_dynamics) {
      HamiltonianSpec hs;
      hs.kind = HamiltonianKind::long_range_ising;
      hs.L = L;
      hs.alpha = cfg.alpha;
      hs.B = cfg.field;
      evolver = std::make_unique<HamiltonianEvolver>(build_hamiltonian(hs));
    } else {
      HamiltonianSpec hs;
      hs.kind = HamiltonianKind::ising;
      hs.L = L;
      hs.J = cfg.j_process;
      hs.g = cfg.g;
      if (cfg.evolution == EvolutionMethod::exact) {
        evolver = std::make_unique<HamiltonianEvolver>(build_hamiltonian(hs));
      }
    }

    for (int id = 0; id < total_states; ++id) {
      DatasetState st;
      st.state_id = id;
      st.is_test = id >= ds.n_train;

      QubitState input{0, {}};
      if (cfg.kind == ExperimentKind::ising_quench) {
        // Grouped by coupling: per-J train states first, then per-J test
        // states in the same J order.
        const int per = st.is_test ? cfg.n_test_per_j : cfg.n_train_per_j;
        const int offset = st.is_test ? id - ds.n_train : id;
        st.j_coupling = cfg.j_values[offset / per];
        HamiltonianSpec sd;
        sd.kind = HamiltonianKind::site_dep_ising;
        sd.L = L;
        sd.J_site = sample_site_dep_couplings(L, st.j_coupling, state_rng);
        input = ground_state(build_hamiltonian(sd), L);
      } else {
        input = prepare_input_state(cfg.ensemble, L, cfg.angle_bound,
                                    state_rng);
      }
      st.sidecar = input;
      st.input_probs = detail::stats_for_pure(input, bases);

      switch (cfg.kind) {
        case ExperimentKind::circuit:
          st.output_probs =
              detail::stats_for_pure(run_circuit_pure(circuit, input), bases);
          break;
        case ExperimentKind::circuit_noisy:
          st.output_probs =
              detail::stats_for_density(run_circuit(circuit, input), bases);
          break;
        case ExperimentKind::long_range_dynamics:
          st.output_probs = detail::stats_for_pure(
              evolver->evolve(input, cfg.evolution_time), bases);
          break;
        case ExperimentKind::ising_quench: {
          if (cfg.evolution == EvolutionMethod::exact) {
            st.output_probs = detail::stats_for_pure(
                evolver->evolve(input, cfg.evolution_time), bases);
          } else {
            TebdParams tp;
            tp.J = cfg.j_process;
            tp.g = cfg.g;
            tp.dt = cfg.dt;
            tp.t_total = cfg.evolution_time;
            tp.chi_max = cfg.chi_max;
            tp.svd_cutoff = cfg.svd_cutoff;
            const TebdResult evolved =
                tebd_evolve(mps_from_statevector(input), tp);
            st.output_probs = detail::stats_for_mps(evolved.state, bases);
          }
          break;
        }
        case ExperimentKind::kerr_cv:
          break;
      }
      ds.states.push_back(std::move(st));
    }
  } else {
    const auto thetas = homodyne_theta_table(cfg.num_theta);
    ds.encoding_dim = 2;
    ds.num_outcomes = cfg.grid.num_bins;
    for (double theta : thetas) {
      ds.measurements.push_back(encode_homodyne(theta));
    }
    for (int id = 0; id < total_states; ++id) {
      DatasetState st;
      st.state_id = id;
      st.is_test = id >= ds.n_train;
      const double r = state_rng.uniform(0.0, cfg.r_max);
      const double psi = state_rng.uniform(0.0, 2.0 * kPi);
      const FockState input =
          coherent_state(std::polar(r, psi), cfg.fock_cutoff);
      const FockState output = kerr_evolve(input, cfg.kerr_time);
      st.sidecar = input;
      for (double theta : thetas) {
        st.input_probs.push_back(
            homodyne_distribution(input, theta, cfg.grid).probs);
        st.output_probs.push_back(
            homodyne_distribution(output, theta, cfg.grid).probs);
      }
      ds.states.push_back(std::move(st));
    }
  }

  if (cfg.shots > 0) {
    for (auto& st : ds.states) {
      for (auto* side : {&st.input_probs, &st.output_probs}) {
        for (auto& p : *side) p = finite_shot_resample(p, cfg.shots, shot_rng);
      }
    }
  }

  check_dataset(ds);
  return ds;
}

// ---------------------------------------------------------------------------
// JSONL serialization.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
  require(arr.is_array(), "expected a JSON array of numbers");
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v(i) = arr.at(i).get<double>();
  return v;
}

inline nlohmann::json sidecar_to_json(const StateSidecar& sc) {
  nlohmann::json j;
  const Eigen::VectorXcd* amps = nullptr;
  if (std::holds_alternative<QubitState>(sc)) {
    const auto& qs = std::get<QubitState>(sc);
    j["state_kind"] = "qubit";
    j["num_qubits"] = qs.num_qubits;
    amps = &qs.amplitudes;
  } else {
    const auto& fs = std::get<FockState>(sc);
    j["state_kind"] = "fock";
    j["cutoff"] = fs.cutoff;
    amps = &fs.amplitudes;
  }
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < amps->size(); ++i) {
    re.push_back((*amps)(i).real());
    im.push_back((*amps)(i).imag());
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline StateSidecar sidecar_from_json(const nlohmann::json& j) {
  const auto re = j.at("re");
  const auto im = j.at("im");
  require(re.size() == im.size(), "sidecar re/im length mismatch");
  Eigen::VectorXcd amps(re.size());
  for (size_t i = 0; i < re.size(); ++i) {
    amps(i) = cdouble(re.at(i).get<double>(), im.at(i).get<double>());
  }
  const std::string kind = j.at("state_kind").get<std::string>();
  if (kind == "qubit") {
    return QubitState{j.at("num_qubits").get<int>(), amps};
  }
  if (kind == "fock") {
    return FockState{j.at("cutoff").get<int>(), amps};
  }
  throw_data("unknown sidecar state kind '" + kind + "'");
}

}  // namespace detail

/// JSON-lines layout: one header object, then per state (ids ascending) a
/// state line with the sidecar, the input records, and the output records,
/// measurement indices ascending. Key order inside each line is fixed by
/// the serializer, so equal datasets produce byte-identical files.
inline void write_dataset(const std::string& path, const Dataset& ds) {
  check_dataset(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path + "' for writing");

  nlohmann::json header;
  header["type"] = "header";
  header["schema"] = kDatasetSchema;
  header["kind"] = ds.kind_name;
  header["encoding"] = ds.encoding_name;
  header["encoding_dim"] = ds.encoding_dim;
  header["num_outcomes"] = ds.num_outcomes;
  header["n_train"] = ds.n_train;
  header["n_test"] = ds.n_test;
  header["seed"] = ds.seed;
  header["shots"] = ds.shots;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& enc : ds.measurements) {
    table.push_back(detail::vector_to_json(enc));
  }
  header["measurements"] = std::move(table);
  out << header.dump() << "\n";

  for (const auto& st : ds.states) {
    nlohmann::json line;
    line["type"] = "state";
    line["state_id"] = st.state_id;
    line["split"] = st.is_test ? "test" : "train";
    if (ds.kind_name == "ising_quench") line["j"] = st.j_coupling;
    line["sidecar"] = detail::sidecar_to_json(st.sidecar);
    out << line.dump() << "\n";
    for (const char* role : {"input", "output"}) {
      const auto& side =
          role == std::string("input") ? st.input_probs : st.output_probs;
      for (size_t mi = 0; mi < side.size(); ++mi) {
        nlohmann::json rec;
        rec["type"] = "record";
        rec["state_id"] = st.state_id;
        rec["role"] = role;
        rec["mi"] = mi;
        rec["p"] = detail::vector_to_json(side[mi]);
        out << rec.dump() << "\n";
      }
    }
  }
  if (!out) throw_io("failed writing dataset to '" + path + "'");
}

inline Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open dataset file '" + path + "'");
  Dataset ds;
  std::string line_text;
  bool have_header = false;
  DatasetState* current = nullptr;
  while (std::getline(in, line_text)) {
    if (line_text.empty()) continue;
    nlohmann::json line;
    try {
      line = nlohmann::json::parse(line_text);
    } catch (const nlohmann::json::exception& e) {
      throw_data(std::string("dataset parse error: ") + e.what());
    }
    const std::string type = line.at("type").get<std::string>();
    if (type == "header") {
      require(!have_header, "duplicate dataset header");
      require(line.at("schema") == kDatasetSchema,
              "unsupported dataset schema");
      have_header = true;
      ds.kind_name = line.at("kind").get<std::string>();
      ds.encoding_name = line.at("encoding").get<std::string>();
      ds.encoding_dim = line.at("encoding_dim").get<int>();
      ds.num_outcomes = line.at("num_outcomes").get<int>();
      ds.n_train = line.at("n_train").get<int>();
      ds.n_test = line.at("n_test").get<int>();
      ds.seed = line.at("seed").get<uint64_t>();
      ds.shots = line.at("shots").get<int>();
      for (const auto& enc : line.at("measurements")) {
        ds.measurements.push_back(detail::vector_from_json(enc));
      }
    } else if (type == "state") {
      require(have_header, "dataset state line before header");
      DatasetState st;
      st.state_id = line.at("state_id").get<int>();
      st.is_test = line.at("split").get<std::string>() == "test";
      if (line.contains("j")) st.j_coupling = line.at("j").get<double>();
      st.sidecar = detail::sidecar_from_json(line.at("sidecar"));
      require(st.state_id == static_cast<int>(ds.states.size()),
              "dataset state ids must be dense and ascending");
      ds.states.push_back(std::move(st));
      current = &ds.states.back();
    } else if (type == "record") {
      require(current != nullptr, "dataset record before any state line");
      require(line.at("state_id").get<int>() == current->state_id,
              "dataset record does not follow its state line");
      const std::string role = line.at("role").get<std::string>();
      const size_t mi = line.at("mi").get<size_t>();
      auto& side =
          role == "input" ? current->input_probs : current->output_probs;
      require(mi == side.size(), "dataset record indices must be ascending");
      side.push_back(detail::vector_from_json(line.at("p")));
    } else {
      throw_data("unknown dataset line type '" + type + "'");
    }
  }
  require(have_header, "dataset has no header line");
  check_dataset(ds);
  return ds;
}

}  // namespace nqem
