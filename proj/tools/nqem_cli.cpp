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

// Command-line driver for the nqem experiment pipeline. Every subcommand
// reads one JSON config, works inside the config's run directory, and
// prints a one-line JSON result on stdout. Failures print
// {"error":{"type":...,"message":...}} on stderr and exit nonzero.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nqem/bench/experiment.hpp"

namespace {

using nlohmann::json;

struct CommandOptions {
  std::string config_path;
  uint64_t seed = 0;
  int shots = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* shots_opt = nullptr;
};

void add_common_options(CLI::App* cmd, CommandOptions& opts) {
  cmd->add_option("config", opts.config_path, "Path to the experiment config")
      ->required();
  opts.seed_opt = cmd->add_option(
      "--seed", opts.seed, "Override the master seed from the config");
  opts.shots_opt = cmd->add_option(
      "--shots", opts.shots,
      "Override the per-record shot count (0 = exact statistics)");
}

nqem::ExperimentConfig load_config(const CommandOptions& opts) {
  nqem::ExperimentConfig cfg =
      nqem::load_experiment_config(opts.config_path);
  if (opts.seed_opt->count() > 0) cfg.seed = opts.seed;
  if (opts.shots_opt->count() > 0) cfg.shots = opts.shots;
  nqem::check_experiment_config(cfg);
  return cfg;
}

/// Rejects datasets that were generated from a different config, so stale
/// run directories fail loudly instead of training on mismatched data.
nqem::Dataset load_matching_dataset(const nqem::ExperimentConfig& cfg) {
  const std::string path = nqem::dataset_path(cfg);
  if (!std::filesystem::exists(path)) {
    nqem::throw_io("no dataset at '" + path + "'; run gen-data first");
  }
  nqem::Dataset ds = nqem::read_dataset(path);
  if (ds.kind_name != nqem::experiment_kind_name(cfg.kind) ||
      ds.seed != cfg.seed || ds.shots != cfg.shots ||
      ds.n_train != cfg.total_train() || ds.n_test != cfg.total_test() ||
      ds.encoding_name != nqem::encoding_scheme_name(cfg.measurement_scheme)) {
    nqem::throw_data("dataset at '" + path +
                     "' does not match the config; run gen-data again");
  }
  return ds;
}

void emit(const json& j) { std::cout << j.dump() << "\n"; }

double final_trace_loss(const std::string& trace_path) {
  std::ifstream in(trace_path);
  json j;
  in >> j;
  const auto& trace = j.at("trace");
  return trace.empty() ? 0.0 : trace.back().get<double>();
}

void cmd_gen_data(const CommandOptions& opts) {
  const nqem::ExperimentConfig cfg = load_config(opts);
  nqem::ensure_run_dir(cfg);
  const nqem::Dataset ds = nqem::generate_dataset(cfg);
  nqem::write_dataset(nqem::dataset_path(cfg), ds);
  emit({{"command", "gen-data"},
        {"dataset", nqem::dataset_path(cfg)},
        {"states", ds.states.size()},
        {"measurements", ds.num_measurements()},
        {"encoding", ds.encoding_name},
        {"shots", ds.shots}});
}

void cmd_train_gqnq(const CommandOptions& opts) {
  const nqem::ExperimentConfig cfg = load_config(opts);
  const nqem::Dataset ds = load_matching_dataset(cfg);
  nqem::GqnqModel model = nqem::train_gqnq_stage(cfg, ds);
  nqem::save_gqnq_stage(cfg, model);
  emit({{"command", "train-gqnq"},
        {"checkpoint", nqem::gqnq_checkpoint_base(cfg)},
        {"epochs", cfg.gqnq_train.epochs},
        {"final_loss", final_trace_loss(cfg.run_dir + "/gqnq_trace.json")}});
}

void cmd_train_emulator(const CommandOptions& opts) {
  const nqem::ExperimentConfig cfg = load_config(opts);
  const nqem::Dataset ds = load_matching_dataset(cfg);
  nqem::GqnqModel gqnq = nqem::load_gqnq_stage(cfg, ds);
  nqem::EmulatorNet emu = nqem::train_emulator_stage(cfg, ds, gqnq);
  nqem::save_emulator_stage(cfg, emu, gqnq);
  emit({{"command", "train-emulator"},
        {"checkpoint", nqem::emulator_checkpoint_base(cfg)},
        {"epochs", cfg.emulator_train.epochs},
        {"final_loss",
         final_trace_loss(cfg.run_dir + "/emulator_trace.json")}});
}

void cmd_predict(const CommandOptions& opts, int state_id,
                 int measurement_index) {
  const nqem::ExperimentConfig cfg = load_config(opts);
  const nqem::Dataset ds = load_matching_dataset(cfg);
  nqem::GqnqModel gqnq = nqem::load_gqnq_stage(cfg, ds);
  nqem::EmulatorNet emu = nqem::load_emulator_stage(cfg, gqnq);
  const Eigen::VectorXd probs =
      nqem::predict_stage(ds, gqnq, emu, state_id, measurement_index);
  emit({{"command", "predict"},
        {"state_id", state_id},
        {"measurement", measurement_index},
        {"probs", std::vector<double>(probs.begin(), probs.end())}});
}

void cmd_evaluate(const CommandOptions& opts) {
  const nqem::ExperimentConfig cfg = load_config(opts);
  const nqem::Dataset ds = load_matching_dataset(cfg);
  nqem::GqnqModel gqnq = nqem::load_gqnq_stage(cfg, ds);
  nqem::EmulatorNet emu = nqem::load_emulator_stage(cfg, gqnq);
  const nqem::MetricsReport report =
      nqem::evaluate_stage(cfg, ds, gqnq, emu);
  nqem::write_report(cfg, report);
  emit(nqem::summary_json(cfg, report));
}

void cmd_baseline(const CommandOptions& opts) {
  const nqem::ExperimentConfig cfg = load_config(opts);
  const nqem::Dataset ds = load_matching_dataset(cfg);
  const double mean = nqem::write_baseline_csv(cfg, ds);
  emit({{"command", "baseline"},
        {"baseline_csv", nqem::baseline_csv_path(cfg)},
        {"mean", mean}});
}

void emit_error(const std::string& type, const std::string& message) {
  const json j = {{"error", {{"type", type}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nqem: learn a quantum process from measurement statistics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nqem 0.1.0");

  CommandOptions gen_opts, gqnq_opts, emu_opts, predict_opts, eval_opts,
      baseline_opts;
  int state_id = 0;
  int measurement_index = 0;

  auto* gen = app.add_subcommand(
      "gen-data", "Generate the simulated dataset for an experiment");
  add_common_options(gen, gen_opts);
  gen->callback([&] { cmd_gen_data(gen_opts); });

  auto* gqnq = app.add_subcommand(
      "train-gqnq", "Train the state-representation model on the dataset");
  add_common_options(gqnq, gqnq_opts);
  gqnq->callback([&] { cmd_train_gqnq(gqnq_opts); });

  auto* emu = app.add_subcommand(
      "train-emulator",
      "Train the process emulator on top of a trained representation model");
  add_common_options(emu, emu_opts);
  emu->callback([&] { cmd_train_emulator(emu_opts); });

  auto* predict = app.add_subcommand(
      "predict",
      "Predict output statistics for one state and one measurement");
  add_common_options(predict, predict_opts);
  predict->add_option("--state", state_id, "Dataset state id")->required();
  predict
      ->add_option("--measurement", measurement_index,
                   "Measurement index into the dataset's measurement table")
      ->required();
  predict->callback(
      [&] { cmd_predict(predict_opts, state_id, measurement_index); });

  auto* eval = app.add_subcommand(
      "evaluate", "Score the trained pipeline against held-out states");
  add_common_options(eval, eval_opts);
  eval->callback([&] { cmd_evaluate(eval_opts); });

  auto* baseline = app.add_subcommand(
      "baseline", "Score the nearest-training-data baseline on its own");
  add_common_options(baseline, baseline_opts);
  baseline->callback([&] { cmd_baseline(baseline_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("argument", e.what());
    return 1;
  } catch (const nqem::Error& e) {
    emit_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
  return 0;
}
