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
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "nqem/common.hpp"

namespace nqem {

/// Bhattacharyya coefficient sum_k sqrt(p_k q_k); 1 iff p = q for valid
/// distributions. The squared variant is a sensitivity switch, not the
/// reporting default.
inline double classical_fidelity(const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& q,
                                 bool squared = false) {
  require(p.size() == q.size(), "distributions differ in length");
  require(p.size() > 0, "empty distributions");
  double cf = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    require(p(k) >= 0.0 && q(k) >= 0.0, "negative probability entry");
    cf += std::sqrt(p(k) * q(k));
  }
  return squared ? cf * cf : cf;
}

/// Box-plot statistics of a fidelity sample.
struct FidelityStats {
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

namespace detail {

/// Linear interpolation between order statistics at rank (n-1)f.
inline double quantile_sorted(const std::vector<double>& sorted, double f) {
  const double pos = f * double(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace detail

inline FidelityStats summarize_fidelities(const std::vector<double>& values) {
  require(!values.empty(), "no fidelity values to summarize");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  FidelityStats st;
  st.min = sorted.front();
  st.max = sorted.back();
  st.median = detail::quantile_sorted(sorted, 0.5);
  st.q1 = detail::quantile_sorted(sorted, 0.25);
  st.q3 = detail::quantile_sorted(sorted, 0.75);
  double total = 0.0;
  for (double v : values) total += v;
  st.mean = total / double(values.size());
  return st;
}

/// Per-test-state mean classical fidelities for the model and the baseline,
/// with aggregate box statistics for both.
struct MetricsReport {
  std::vector<int> state_ids;
  std::vector<double> model_fid;
  std::vector<double> baseline_fid;
  FidelityStats model;
  FidelityStats baseline;
  bool squared = false;
};

inline MetricsReport build_metrics_report(std::vector<int> state_ids,
                                          std::vector<double> model_fid,
                                          std::vector<double> baseline_fid,
                                          bool squared) {
  require(state_ids.size() == model_fid.size() &&
              state_ids.size() == baseline_fid.size(),
          "metrics columns differ in length");
  for (const auto* col : {&model_fid, &baseline_fid}) {
    for (double v : *col) {
      require(v >= 0.0 && v <= 1.0 + 1e-12, "fidelity outside [0, 1]");
    }
  }
  MetricsReport report;
  report.state_ids = std::move(state_ids);
  report.model_fid = std::move(model_fid);
  report.baseline_fid = std::move(baseline_fid);
  report.model = summarize_fidelities(report.model_fid);
  report.baseline = summarize_fidelities(report.baseline_fid);
  report.squared = squared;
  return report;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// CSV layout: header, one row per test state, then a final aggregate row
/// labeled "mean".
inline void write_metrics_csv(const std::string& path,
                              const MetricsReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  out << "state_id,model_fid,baseline_fid\n";
  for (size_t i = 0; i < report.state_ids.size(); ++i) {
    out << report.state_ids[i] << ","
        << detail::format_double(report.model_fid[i]) << ","
        << detail::format_double(report.baseline_fid[i]) << "\n";
  }
  out << "mean," << detail::format_double(report.model.mean) << ","
      << detail::format_double(report.baseline.mean) << "\n";
  if (!out) throw_io("failed writing metrics to '" + path + "'");
}

inline nlohmann::json stats_to_json(const FidelityStats& st) {
  nlohmann::json j;
  j["mean"] = st.mean;
  j["median"] = st.median;
  j["q1"] = st.q1;
  j["q3"] = st.q3;
  j["min"] = st.min;
  j["max"] = st.max;
  return j;
}

inline nlohmann::json metrics_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["squared_fidelity"] = report.squared;
  j["num_test_states"] = report.state_ids.size();
  j["model"] = stats_to_json(report.model);
  j["baseline"] = stats_to_json(report.baseline);
  return j;
}

}  // namespace nqem
