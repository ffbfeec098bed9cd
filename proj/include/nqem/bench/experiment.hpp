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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nqem/bench/baseline.hpp"
#include "nqem/bench/dataset.hpp"
#include "nqem/bench/metrics.hpp"
#include "nqem/emulator.hpp"
#include "nqem/gqnq.hpp"
#include "nqem/nn/checkpoint.hpp"
#include "nqem/rng.hpp"

namespace nqem {

// ---------------------------------------------------------------------------
// Run-directory layout.
// ---------------------------------------------------------------------------

inline std::string dataset_path(const ExperimentConfig& cfg) {
  return cfg.run_dir + "/dataset.jsonl";
}
inline std::string gqnq_checkpoint_base(const ExperimentConfig& cfg) {
  return cfg.run_dir + "/gqnq";
}
inline std::string emulator_checkpoint_base(const ExperimentConfig& cfg) {
  return cfg.run_dir + "/emulator";
}
inline std::string metrics_csv_path(const ExperimentConfig& cfg) {
  return cfg.run_dir + "/metrics.csv";
}
inline std::string summary_json_path(const ExperimentConfig& cfg) {
  return cfg.run_dir + "/summary.json";
}
inline std::string baseline_csv_path(const ExperimentConfig& cfg) {
  return cfg.run_dir + "/baseline.csv";
}

inline void ensure_run_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.run_dir, ec);
  if (ec) throw_io("cannot create run directory '" + cfg.run_dir + "'");
}

// ---------------------------------------------------------------------------
// Model construction from a config and a dataset.
// ---------------------------------------------------------------------------

inline GqnqConfig gqnq_config_for(const ExperimentConfig& cfg,
                                  const Dataset& ds) {
  GqnqConfig gc;
  gc.encoding_dim = ds.encoding_dim;
  gc.num_outcomes = ds.num_outcomes;
  gc.rep_dim = cfg.rep_dim;
  gc.rep_hidden = cfg.rep_hidden;
  gc.lstm_hidden = cfg.lstm_hidden;
  gc.lstm_steps = cfg.lstm_steps;
  return gc;
}

inline EmulatorConfig emulator_config_for(const ExperimentConfig& cfg) {
  EmulatorConfig ec;
  ec.dim = cfg.rep_dim;
  ec.hidden = cfg.emulator_hidden;
  return ec;
}

inline StateRecords records_for(const Dataset& ds,
                                const std::vector<Eigen::VectorXd>& probs) {
  StateRecords records;
  records.reserve(probs.size());
  for (size_t mi = 0; mi < probs.size(); ++mi) {
    records.push_back({ds.measurements[mi], probs[mi]});
  }
  return records;
}

/// The 2n GQNQ training states: for each training pair, the input state's
/// records then the output state's records.
inline std::vector<StateRecords> fiducial_states(const Dataset& ds) {
  std::vector<StateRecords> states;
  states.reserve(2 * ds.n_train);
  for (auto it = ds.states.begin(); it != ds.train_end(); ++it) {
    states.push_back(records_for(ds, it->input_probs));
    states.push_back(records_for(ds, it->output_probs));
  }
  return states;
}

// ---------------------------------------------------------------------------
// Training stages.
// ---------------------------------------------------------------------------

namespace detail {

inline void dump_trace(const std::string& path, const std::string& stage,
                       const std::vector<double>& trace) {
  nlohmann::json j;
  j["stage"] = stage;
  j["epochs"] = trace.size();
  j["trace"] = trace;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

inline void check_trace_finite(const std::vector<double>& trace,
                               const std::string& stage,
                               const std::string& dump_path) {
  for (double v : trace) {
    if (!std::isfinite(v)) {
      throw_data(stage + " training diverged (non-finite loss); trace "
                 "dumped to " + dump_path);
    }
  }
}

}  // namespace detail

inline GqnqModel train_gqnq_stage(const ExperimentConfig& cfg,
                                  const Dataset& ds) {
  GqnqModel model(gqnq_config_for(cfg, ds));
  Rng init_rng(derive_seed(cfg.seed, "gqnq.init"));
  model.init(init_rng);
  Rng batch_rng(derive_seed(cfg.seed, "gqnq.batch"));
  const auto trace =
      train_gqnq(model, fiducial_states(ds), cfg.gqnq_train, batch_rng);
  const std::string trace_path = cfg.run_dir + "/gqnq_trace.json";
  detail::dump_trace(trace_path, "gqnq", trace);
  detail::check_trace_finite(trace, "gqnq", trace_path);
  check_finite(model.params());
  return model;
}

inline void save_gqnq_stage(const ExperimentConfig& cfg, GqnqModel& model) {
  nlohmann::json extra;
  extra["model"] = "gqnq";
  extra["fingerprint"] = model.architecture_fingerprint();
  extra["kind"] = experiment_kind_name(cfg.kind);
  extra["seed"] = cfg.seed;
  save_checkpoint(gqnq_checkpoint_base(cfg), model.params(), extra);
}

inline GqnqModel load_gqnq_stage(const ExperimentConfig& cfg,
                                 const Dataset& ds) {
  GqnqModel model(gqnq_config_for(cfg, ds));
  ParamRefs refs = model.params();
  const nlohmann::json extra =
      load_checkpoint(gqnq_checkpoint_base(cfg), refs);
  if (!extra.contains("fingerprint") ||
      extra.at("fingerprint") != model.architecture_fingerprint()) {
    throw_config("GQNQ checkpoint was written for a different architecture");
  }
  return model;
}

inline std::vector<RepresentationPair> representation_pairs(
    GqnqModel& model, const Dataset& ds) {
  std::vector<RepresentationPair> pairs;
  pairs.reserve(ds.n_train);
  for (auto it = ds.states.begin(); it != ds.train_end(); ++it) {
    pairs.push_back({model.represent(records_for(ds, it->input_probs)),
                     model.represent(records_for(ds, it->output_probs))});
  }
  return pairs;
}

inline EmulatorNet train_emulator_stage(const ExperimentConfig& cfg,
                                        const Dataset& ds, GqnqModel& gqnq) {
  EmulatorNet net(emulator_config_for(cfg));
  Rng init_rng(derive_seed(cfg.seed, "emulator.init"));
  net.init(init_rng);
  const auto trace = train_emulator(net, representation_pairs(gqnq, ds),
                                    cfg.emulator_train);
  const std::string trace_path = cfg.run_dir + "/emulator_trace.json";
  detail::dump_trace(trace_path, "emulator", trace);
  detail::check_trace_finite(trace, "emulator", trace_path);
  check_finite(net.params());
  return net;
}

inline void save_emulator_stage(const ExperimentConfig& cfg, EmulatorNet& net,
                                GqnqModel& gqnq) {
  nlohmann::json extra;
  extra["model"] = "emulator";
  extra["fingerprint"] = net.architecture_fingerprint();
  extra["gqnq_fingerprint"] = gqnq.architecture_fingerprint();
  extra["gqnq_params_checksum"] = params_checksum(gqnq.params());
  extra["seed"] = cfg.seed;
  save_checkpoint(emulator_checkpoint_base(cfg), net.params(), extra);
}

/// Loads the emulator and verifies it was trained against exactly the given
/// GQNQ (architecture and parameter bytes), so mismatched checkpoint pairs
/// are rejected instead of silently mispredicting.
inline EmulatorNet load_emulator_stage(const ExperimentConfig& cfg,
                                       GqnqModel& gqnq) {
  EmulatorNet net(emulator_config_for(cfg));
  ParamRefs refs = net.params();
  const nlohmann::json extra =
      load_checkpoint(emulator_checkpoint_base(cfg), refs);
  if (!extra.contains("fingerprint") ||
      extra.at("fingerprint") != net.architecture_fingerprint()) {
    throw_config("emulator checkpoint was written for a different "
                 "architecture");
  }
  if (!extra.contains("gqnq_fingerprint") ||
      extra.at("gqnq_fingerprint") != gqnq.architecture_fingerprint() ||
      !extra.contains("gqnq_params_checksum") ||
      extra.at("gqnq_params_checksum").get<uint64_t>() !=
          params_checksum(gqnq.params())) {
    throw_config("emulator checkpoint is linked to a different GQNQ "
                 "checkpoint");
  }
  return net;
}

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd query_matrix(const Dataset& ds) {
  Eigen::MatrixXd queries(ds.encoding_dim, ds.num_measurements());
  for (int mi = 0; mi < ds.num_measurements(); ++mi) {
    queries.col(mi) = ds.measurements[mi];
  }
  return queries;
}

/// Mean classical fidelity over all queries for every held-out state, for
/// both the trained pipeline and the nearest-training-data baseline.
inline MetricsReport evaluate_stage(const ExperimentConfig& cfg,
                                    const Dataset& ds, GqnqModel& gqnq,
                                    EmulatorNet& emu) {
  require(ds.n_test >= 1, "evaluation needs at least one test state");
  const Eigen::MatrixXd queries = query_matrix(ds);
  const std::vector<DatasetState> training = training_states(ds);

  std::vector<int> ids;
  std::vector<double> model_fid, baseline_fid;
  for (auto it = ds.train_end(); it != ds.states.end(); ++it) {
    const Eigen::MatrixXd predicted = predict_output_statistics(
        gqnq, emu, records_for(ds, it->input_probs), queries);
    const int nearest = nearest_training_state(training, it->sidecar);

    double model_sum = 0.0;
    double baseline_sum = 0.0;
    for (int mi = 0; mi < ds.num_measurements(); ++mi) {
      const Eigen::VectorXd& truth = it->output_probs[mi];
      model_sum +=
          classical_fidelity(predicted.col(mi), truth, cfg.squared_fidelity);
      baseline_sum += classical_fidelity(training[nearest].output_probs[mi],
                                         truth, cfg.squared_fidelity);
    }
    ids.push_back(it->state_id);
    model_fid.push_back(std::min(model_sum / ds.num_measurements(), 1.0));
    baseline_fid.push_back(
        std::min(baseline_sum / ds.num_measurements(), 1.0));
  }
  return build_metrics_report(std::move(ids), std::move(model_fid),
                              std::move(baseline_fid), cfg.squared_fidelity);
}

inline nlohmann::json summary_json(const ExperimentConfig& cfg,
                                   const MetricsReport& report) {
  nlohmann::json j = metrics_to_json(report);
  j["kind"] = experiment_kind_name(cfg.kind);
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["n_train"] = cfg.total_train();
  j["n_test"] = cfg.total_test();
  return j;
}

inline void write_report(const ExperimentConfig& cfg,
                         const MetricsReport& report) {
  write_metrics_csv(metrics_csv_path(cfg), report);
  std::ofstream out(summary_json_path(cfg), std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open summary file for writing");
  out << summary_json(cfg, report).dump(2) << "\n";
}

/// Baseline-only fidelities (no trained networks involved). Returns the
/// mean fidelity over test states.
inline double write_baseline_csv(const ExperimentConfig& cfg,
                                 const Dataset& ds) {
  require(ds.n_test >= 1, "baseline evaluation needs test states");
  const std::vector<DatasetState> training = training_states(ds);
  std::ofstream out(baseline_csv_path(cfg), std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open baseline file for writing");
  out << "state_id,baseline_fid\n";
  double total = 0.0;
  int count = 0;
  for (auto it = ds.train_end(); it != ds.states.end(); ++it) {
    const int nearest = nearest_training_state(training, it->sidecar);
    double sum = 0.0;
    for (int mi = 0; mi < ds.num_measurements(); ++mi) {
      sum += classical_fidelity(training[nearest].output_probs[mi],
                                it->output_probs[mi], cfg.squared_fidelity);
    }
    const double fid = std::min(sum / ds.num_measurements(), 1.0);
    out << it->state_id << "," << detail::format_double(fid) << "\n";
    total += fid;
    ++count;
  }
  out << "mean," << detail::format_double(total / count) << "\n";
  return total / count;
}

/// Single prediction for one state and one measurement index.
inline Eigen::VectorXd predict_stage(const Dataset& ds, GqnqModel& gqnq,
                                     EmulatorNet& emu, int state_id,
                                     int measurement_index) {
  require(state_id >= 0 && state_id < static_cast<int>(ds.states.size()),
          "state id out of range");
  require(measurement_index >= 0 &&
              measurement_index < ds.num_measurements(),
          "measurement index out of range");
  const StateRecords records =
      records_for(ds, ds.states[state_id].input_probs);
  return predict_output_statistics(gqnq, emu, records,
                                   Eigen::VectorXd(ds.measurements[measurement_index]));
}

/// End-to-end driver: generate, train both stages, checkpoint, evaluate,
/// and write every artifact into the run directory.
inline MetricsReport run_experiment(const ExperimentConfig& cfg) {
  check_experiment_config(cfg);
  ensure_run_dir(cfg);
  const Dataset ds = generate_dataset(cfg);
  write_dataset(dataset_path(cfg), ds);
  GqnqModel gqnq = train_gqnq_stage(cfg, ds);
  save_gqnq_stage(cfg, gqnq);
  EmulatorNet emu = train_emulator_stage(cfg, ds, gqnq);
  save_emulator_stage(cfg, emu, gqnq);
  const MetricsReport report = evaluate_stage(cfg, ds, gqnq, emu);
  write_report(cfg, report);
  return report;
}

}  // namespace nqem
