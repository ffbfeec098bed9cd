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

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nqem/bench/experiment.hpp"
#include "nqem/ensemble.hpp"

namespace {

using namespace nqem;

std::string fresh_dir(const std::string& leaf) {
  const auto dir =
      std::filesystem::temp_directory_path() / "nqem_bench" / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Eigen::VectorXd random_distribution(int m, Rng& rng) {
  Eigen::VectorXd p(m);
  for (int i = 0; i < m; ++i) p[i] = rng.uniform(0.05, 1.0);
  return p / p.sum();
}

ExperimentConfig tiny_circuit_config(const std::string& run_dir,
                                     uint64_t seed) {
  ExperimentConfig cfg;
  cfg.name = "tiny";
  cfg.kind = ExperimentKind::circuit;
  cfg.seed = seed;
  cfg.run_dir = run_dir;
  cfg.n_train = 3;
  cfg.n_test = 2;
  cfg.num_qubits = 2;
  cfg.depth = 1;
  cfg.rep_dim = 8;
  cfg.rep_hidden = {16};
  cfg.lstm_hidden = 16;
  cfg.emulator_hidden = {16};
  cfg.gqnq_train.epochs = 25;
  cfg.emulator_train.epochs = 25;
  return cfg;
}

}  // namespace

TEST_CASE("classical fidelity matches hand-computed overlaps", "[bench]") {
  Eigen::Vector2d a(1.0, 0.0), b(0.0, 1.0), u(0.5, 0.5);
  CHECK(classical_fidelity(a, b) == 0.0);
  CHECK(classical_fidelity(a, u) ==
        Catch::Approx(std::sqrt(0.5)).epsilon(1e-15));

  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd p = random_distribution(8, rng);
    const Eigen::VectorXd q = random_distribution(8, rng);
    CHECK(classical_fidelity(p, p) == Catch::Approx(1.0).margin(1e-12));
    const double f = classical_fidelity(p, q);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
    CHECK(classical_fidelity(p, q, true) ==
          Catch::Approx(f * f).epsilon(1e-13));
  }

  Eigen::Vector3d c(0.2, 0.3, 0.5);
  CHECK_THROWS_AS(classical_fidelity(a, c), Error);
  Eigen::Vector2d neg(-0.1, 1.1);
  CHECK_THROWS_AS(classical_fidelity(neg, u), Error);
}

TEST_CASE("box statistics use linear quantile interpolation", "[bench]") {
  const FidelityStats st = summarize_fidelities({4.0, 1.0, 3.0, 2.0});
  CHECK(st.mean == Catch::Approx(2.5));
  CHECK(st.median == Catch::Approx(2.5));
  CHECK(st.q1 == Catch::Approx(1.75));
  CHECK(st.q3 == Catch::Approx(3.25));
  CHECK(st.min == 1.0);
  CHECK(st.max == 4.0);

  const FidelityStats one = summarize_fidelities({5.0});
  CHECK(one.mean == 5.0);
  CHECK(one.median == 5.0);
  CHECK(one.q1 == 5.0);
  CHECK(one.q3 == 5.0);

  const FidelityStats odd = summarize_fidelities({3.0, 1.0, 2.0});
  CHECK(odd.median == Catch::Approx(2.0));
  CHECK(odd.q1 == Catch::Approx(1.5));
  CHECK(odd.q3 == Catch::Approx(2.5));

  CHECK_THROWS_AS(summarize_fidelities({}), Error);
}

TEST_CASE("metrics report aggregates and CSV round trip", "[bench]") {
  MetricsReport report = build_metrics_report({7, 3}, {0.5, 0.9},
                                              {0.6, 0.8}, false);
  CHECK(report.model.mean == Catch::Approx(0.7));
  CHECK(report.baseline.mean == Catch::Approx(0.7));
  CHECK(report.model.min == 0.5);
  CHECK(report.model.max == 0.9);

  const std::string dir = fresh_dir("metrics");
  const std::string path = dir + "/metrics.csv";
  write_metrics_csv(path, report);

  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "state_id,model_fid,baseline_fid");
  int rows = 0;
  std::vector<std::string> first_fields;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string field;
    std::getline(fields, field, ',');
    first_fields.push_back(field);
    std::getline(fields, field, ',');
    // The CSV must reproduce the stored doubles bit for bit.
    if (rows == 0) CHECK(std::strtod(field.c_str(), nullptr) == 0.5);
    if (rows == 1) CHECK(std::strtod(field.c_str(), nullptr) == 0.9);
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(first_fields == std::vector<std::string>{"7", "3", "mean"});

  CHECK_THROWS_AS(build_metrics_report({1}, {1.5}, {0.5}, false), Error);
  CHECK_THROWS_AS(build_metrics_report({1}, {0.5}, {-0.1}, false), Error);
  CHECK_THROWS_AS(build_metrics_report({1, 2}, {0.5}, {0.5}, false), Error);

  const nlohmann::json j = metrics_to_json(report);
  CHECK(j.at("num_test_states") == 2);
  CHECK(j.at("model").at("mean").get<double>() ==
        Catch::Approx(0.7));
  CHECK(j.at("baseline").contains("q1"));
}

TEST_CASE("finite shot resampling is multinomial and reproducible",
          "[bench]") {
  Rng rng(7);

  Eigen::Vector3d point(0.0, 1.0, 0.0);
  CHECK(finite_shot_resample(point, 17, rng) == point);

  const Eigen::VectorXd p = random_distribution(6, rng);
  const Eigen::VectorXd one = finite_shot_resample(p, 1, rng);
  CHECK(one.sum() == 1.0);
  CHECK(one.maxCoeff() == 1.0);

  // Bins with zero probability can never receive counts.
  Eigen::Vector3d gap(0.5, 0.0, 0.5);
  const Eigen::VectorXd g = finite_shot_resample(gap, 1000, rng);
  CHECK(g[1] == 0.0);
  CHECK(g.sum() == Catch::Approx(1.0).margin(1e-12));

  Rng a(99), b(99), c(100);
  const Eigen::VectorXd ra = finite_shot_resample(p, 500, a);
  const Eigen::VectorXd rb = finite_shot_resample(p, 500, b);
  const Eigen::VectorXd rc = finite_shot_resample(p, 500, c);
  CHECK(ra == rb);
  CHECK(ra != rc);

  Rng big(5);
  const Eigen::VectorXd wide = random_distribution(64, big);
  const Eigen::VectorXd freq = finite_shot_resample(wide, 1000000, big);
  CHECK(0.5 * (wide - freq).cwiseAbs().sum() < 0.01);

  CHECK_THROWS_AS(finite_shot_resample(p, 0, rng), Error);
}

TEST_CASE("nearest training state maximizes quantum fidelity", "[bench]") {
  Rng rng(31);
  std::vector<DatasetState> training;
  for (int i = 0; i < 8; ++i) {
    DatasetState st;
    st.state_id = i;
    st.sidecar =
        prepare_input_state(EnsembleKind::rotated_zero, 3, 2 * kPi, rng);
    st.output_probs = {Eigen::VectorXd::Constant(4, 0.25)};
    st.output_probs[0][0] = 0.25 + 1e-6 * i;  // Distinguishable payloads.
    st.output_probs[0][1] = 0.25 - 1e-6 * i;
    training.push_back(st);
  }

  SECTION("exact member of the training set is recovered") {
    for (int i = 0; i < 8; ++i) {
      CHECK(nearest_training_state(training, training[i].sidecar) == i);
      CHECK(nearest_training_data_predict(training, training[i].sidecar, 0) ==
            training[i].output_probs[0]);
    }
  }

  SECTION("random queries agree with a brute-force overlap scan") {
    for (int trial = 0; trial < 5; ++trial) {
      const QubitState probe =
          prepare_input_state(EnsembleKind::rotated_zero, 3, 2 * kPi, rng);
      int oracle = 0;
      double best = -1.0;
      for (int i = 0; i < 8; ++i) {
        const auto& s = std::get<QubitState>(training[i].sidecar);
        const double overlap = std::norm(s.amplitudes.dot(probe.amplitudes));
        if (overlap > best) {
          best = overlap;
          oracle = i;
        }
      }
      CHECK(nearest_training_state(training, probe) == oracle);
    }
  }

  SECTION("ties resolve to the lowest state id") {
    training[5].sidecar = training[2].sidecar;
    CHECK(nearest_training_state(training, training[2].sidecar) == 2);
  }

  SECTION("empty training set is rejected") {
    CHECK_THROWS_AS(nearest_training_state({}, training[0].sidecar), Error);
  }
}

TEST_CASE("baseline never reads held-out outputs", "[bench]") {
  ExperimentConfig cfg = tiny_circuit_config(fresh_dir("hygiene"), 13);
  const Dataset clean = generate_dataset(cfg);
  Dataset poisoned = clean;
  for (size_t i = poisoned.train_end() - poisoned.states.begin();
       i < poisoned.states.size(); ++i) {
    for (auto& v : poisoned.states[i].output_probs) {
      v.setZero();
      v[0] = 1.0;
    }
  }

  const auto clean_train = training_states(clean);
  const auto poisoned_train = training_states(poisoned);
  for (size_t i = clean.train_end() - clean.states.begin();
       i < clean.states.size(); ++i) {
    for (int mi = 0; mi < clean.num_measurements(); ++mi) {
      const Eigen::VectorXd from_clean = nearest_training_data_predict(
          clean_train, clean.states[i].sidecar, mi);
      const Eigen::VectorXd from_poisoned = nearest_training_data_predict(
          poisoned_train, poisoned.states[i].sidecar, mi);
      REQUIRE(from_clean == from_poisoned);
    }
  }
}

TEST_CASE("config parsing applies per-kind defaults", "[bench]") {
  auto base = nlohmann::json{{"schema", kConfigSchema},
                             {"kind", "circuit"},
                             {"seed", 5},
                             {"run_dir", "/tmp/xx"}};

  SECTION("circuit defaults") {
    const ExperimentConfig cfg = config_from_json(base);
    CHECK(cfg.kind == ExperimentKind::circuit);
    CHECK(cfg.n_train == 20);
    CHECK(cfg.n_test == 10);
    CHECK(cfg.num_qubits == 2);
    CHECK(cfg.depth == 2);
    CHECK(cfg.noise_rate == 0.0);
    CHECK(cfg.ensemble == EnsembleKind::rotated_zero);
    CHECK(cfg.angle_bound == Catch::Approx(0.3 * kPi));
    CHECK(cfg.measurement_scheme == EncodingScheme::pauli_full);
  }

  SECTION("noisy circuit defaults") {
    base["kind"] = "circuit_noisy";
    const ExperimentConfig cfg = config_from_json(base);
    CHECK(cfg.depth == 3);
    CHECK(cfg.noise_rate == Catch::Approx(0.01));
  }

  SECTION("long-range dynamics defaults") {
    base["kind"] = "long_range_dynamics";
    const ExperimentConfig cfg = config_from_json(base);
    CHECK(cfg.num_qubits == 6);
    CHECK(cfg.ensemble == EnsembleKind::rotated_plus);
    CHECK(cfg.angle_bound == Catch::Approx(kPi / 10));
    CHECK(cfg.evolution_time == 1.0);
  }

  SECTION("quench defaults derive the split from the coupling grid") {
    base["kind"] = "ising_quench";
    const ExperimentConfig cfg = config_from_json(base);
    CHECK(cfg.j_values.size() == 7);
    CHECK(cfg.j_values.front() == Catch::Approx(-1.5));
    CHECK(cfg.j_values.back() == Catch::Approx(1.5));
    CHECK(cfg.measurement_scheme == EncodingScheme::pauli_klocal);
    CHECK(cfg.total_train() == 7 * cfg.n_train_per_j);
    CHECK(cfg.total_test() == 7 * cfg.n_test_per_j);
  }

  SECTION("continuous-variable defaults") {
    base["kind"] = "kerr_cv";
    const ExperimentConfig cfg = config_from_json(base);
    CHECK(cfg.measurement_scheme == EncodingScheme::homodyne);
    CHECK(cfg.fock_cutoff == 30);
    CHECK(cfg.r_max == 2.0);
    CHECK(cfg.num_theta == 100);
  }

  SECTION("system overrides beat defaults") {
    base["system"] = {{"depth", 5}, {"num_qubits", 3}};
    const ExperimentConfig cfg = config_from_json(base);
    CHECK(cfg.depth == 5);
    CHECK(cfg.num_qubits == 3);
  }

  SECTION("malformed documents are rejected") {
    auto missing_seed = base;
    missing_seed.erase("seed");
    CHECK_THROWS_AS(config_from_json(missing_seed), Error);

    auto missing_kind = base;
    missing_kind.erase("kind");
    CHECK_THROWS_AS(config_from_json(missing_kind), Error);

    auto bad_schema = base;
    bad_schema["schema"] = "nqem.config.v0";
    CHECK_THROWS_AS(config_from_json(bad_schema), Error);

    auto unknown_top = base;
    unknown_top["surprise"] = 1;
    CHECK_THROWS_AS(config_from_json(unknown_top), Error);

    auto unknown_sys = base;
    unknown_sys["system"] = {{"qubits", 2}};
    CHECK_THROWS_AS(config_from_json(unknown_sys), Error);
  }

  SECTION("cross-field validation") {
    ExperimentConfig cfg = config_from_json(base);
    cfg.measurement_scheme = EncodingScheme::homodyne;
    CHECK_THROWS_AS(check_experiment_config(cfg), Error);

    ExperimentConfig noisy = config_from_json(base);
    noisy.noise_rate = 0.1;
    CHECK_THROWS_AS(check_experiment_config(noisy), Error);

    base["kind"] = "kerr_cv";
    ExperimentConfig cv = config_from_json(base);
    cv.r_max = 5.0;  // 25 photons of mean energy against a cutoff of 30.
    CHECK_THROWS_AS(check_experiment_config(cv), Error);

    base["kind"] = "ising_quench";
    ExperimentConfig quench = config_from_json(base);
    quench.j_values.clear();
    CHECK_THROWS_AS(check_experiment_config(quench), Error);
  }
}

TEST_CASE("dataset files follow the line-per-record contract", "[bench]") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kerr_cv;
  cfg.seed = 21;
  cfg.run_dir = fresh_dir("kerrdata");
  cfg.n_train = 2;
  cfg.n_test = 2;
  cfg.fock_cutoff = 20;
  cfg.r_max = 1.5;
  cfg.num_theta = 5;
  cfg.measurement_scheme = EncodingScheme::homodyne;
  check_experiment_config(cfg);

  const Dataset ds = generate_dataset(cfg);
  const std::string path = cfg.run_dir + "/dataset.jsonl";
  write_dataset(path, ds);

  // 1 header + 4 states, each with one state line and 2 roles x 5 records.
  std::ifstream in(path);
  std::string line;
  int headers = 0, states = 0, records = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const std::string type = j.at("type");
    if (type == "header") {
      ++headers;
      CHECK(j.at("schema") == kDatasetSchema);
      CHECK(j.at("measurements").size() == 5);
    } else if (type == "state") {
      ++states;
    } else {
      REQUIRE(type == "record");
      ++records;
    }
  }
  CHECK(headers == 1);
  CHECK(states == 4);
  CHECK(records == 4 * 2 * 5);

  SECTION("same seed reproduces the same bytes") {
    const Dataset again = generate_dataset(cfg);
    write_dataset(cfg.run_dir + "/again.jsonl", again);
    CHECK(slurp(path) == slurp(cfg.run_dir + "/again.jsonl"));

    ExperimentConfig other = cfg;
    other.seed = 22;
    write_dataset(cfg.run_dir + "/other.jsonl", generate_dataset(other));
    CHECK(slurp(path) != slurp(cfg.run_dir + "/other.jsonl"));
  }

  SECTION("reading back recovers every number bit for bit") {
    const Dataset rt = read_dataset(path);
    REQUIRE(rt.states.size() == ds.states.size());
    CHECK(rt.num_outcomes == ds.num_outcomes);
    CHECK(rt.encoding_name == ds.encoding_name);
    for (size_t i = 0; i < ds.states.size(); ++i) {
      CHECK(rt.states[i].state_id == ds.states[i].state_id);
      CHECK(rt.states[i].is_test == ds.states[i].is_test);
      for (size_t mi = 0; mi < ds.states[i].output_probs.size(); ++mi) {
        CHECK(rt.states[i].input_probs[mi] == ds.states[i].input_probs[mi]);
        CHECK(rt.states[i].output_probs[mi] == ds.states[i].output_probs[mi]);
      }
      CHECK(sidecar_fidelity(rt.states[i].sidecar, ds.states[i].sidecar) ==
            Catch::Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("depth-zero circuits leave statistics unchanged", "[bench]") {
  ExperimentConfig cfg = tiny_circuit_config(fresh_dir("identity"), 17);
  cfg.depth = 0;
  check_experiment_config(cfg);
  const Dataset ds = generate_dataset(cfg);
  for (const auto& st : ds.states) {
    for (size_t mi = 0; mi < st.input_probs.size(); ++mi) {
      REQUIRE(st.input_probs[mi] == st.output_probs[mi]);
    }
  }
}

TEST_CASE("finite shots quantize recorded frequencies", "[bench]") {
  ExperimentConfig cfg = tiny_circuit_config(fresh_dir("shots"), 19);
  cfg.shots = 64;
  check_experiment_config(cfg);
  const Dataset ds = generate_dataset(cfg);
  CHECK(ds.shots == 64);
  for (const auto& st : ds.states) {
    for (const auto& v : st.output_probs) {
      for (int k = 0; k < v.size(); ++k) {
        const double scaled = v[k] * 64.0;
        CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
      }
    }
  }
}

TEST_CASE("experiment pipeline writes a consistent run directory",
          "[bench]") {
  const ExperimentConfig cfg = tiny_circuit_config(fresh_dir("pipeline"), 23);
  const MetricsReport first = run_experiment(cfg);

  for (const std::string leaf :
       {"dataset.jsonl", "gqnq.json", "gqnq.bin", "emulator.json",
        "emulator.bin", "gqnq_trace.json", "emulator_trace.json",
        "metrics.csv", "summary.json"}) {
    CHECK(std::filesystem::exists(cfg.run_dir + "/" + leaf));
  }
  for (double f : first.model_fid) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }

  const std::string metrics_before = slurp(metrics_csv_path(cfg));
  const std::string summary_before = slurp(summary_json_path(cfg));
  run_experiment(cfg);
  CHECK(slurp(metrics_csv_path(cfg)) == metrics_before);
  CHECK(slurp(summary_json_path(cfg)) == summary_before);

  SECTION("reloaded checkpoints reproduce the evaluation") {
    const Dataset ds = read_dataset(dataset_path(cfg));
    GqnqModel gqnq = load_gqnq_stage(cfg, ds);
    EmulatorNet emu = load_emulator_stage(cfg, gqnq);
    const MetricsReport redo = evaluate_stage(cfg, ds, gqnq, emu);
    CHECK(redo.model_fid == first.model_fid);
    CHECK(redo.baseline_fid == first.baseline_fid);

    const Eigen::VectorXd probs = predict_stage(ds, gqnq, emu, 3, 0);
    CHECK(probs.sum() == Catch::Approx(1.0).margin(1e-12));
    CHECK(probs.minCoeff() >= 0.0);
  }

  SECTION("checkpoint pairing is enforced") {
    const Dataset ds = read_dataset(dataset_path(cfg));
    GqnqModel gqnq = load_gqnq_stage(cfg, ds);
    gqnq.params()[0]->value(0, 0) += 1e-3;
    CHECK_THROWS_AS(load_emulator_stage(cfg, gqnq), Error);

    ExperimentConfig narrower = cfg;
    narrower.rep_dim = 4;
    CHECK_THROWS_AS(load_gqnq_stage(narrower, ds), Error);
  }
}
