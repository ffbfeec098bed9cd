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

#include <vector>

#include "nqem/bench/dataset.hpp"

namespace nqem {

/// Index into `training` of the state with the highest quantum fidelity to
/// the test input; exact ties resolve to the lowest state_id. The signature
/// deliberately takes only training states and the test input sidecar, so
/// the baseline cannot observe test-state output statistics.
inline int nearest_training_state(const std::vector<DatasetState>& training,
                                  const StateSidecar& test_input) {
  require(!training.empty(), "baseline needs a nonempty training set");
  int best = 0;
  double best_fid = -1.0;
  for (size_t i = 0; i < training.size(); ++i) {
    const double fid = sidecar_fidelity(training[i].sidecar, test_input);
    if (fid > best_fid) {
      best_fid = fid;
      best = static_cast<int>(i);
    }
  }
  return best;
}

/// Recorded output distribution of the nearest training state for one
/// query measurement.
inline Eigen::VectorXd nearest_training_data_predict(
    const std::vector<DatasetState>& training, const StateSidecar& test_input,
    int measurement_index) {
  const int nearest = nearest_training_state(training, test_input);
  const auto& probs = training[nearest].output_probs;
  require(measurement_index >= 0 &&
              measurement_index < static_cast<int>(probs.size()),
          "measurement index out of range");
  return probs[measurement_index];
}

/// Training slice of a dataset, copied so callers hold no reference to the
/// test entries.
inline std::vector<DatasetState> training_states(const Dataset& ds) {
  return std::vector<DatasetState>(ds.states.begin(), ds.train_end());
}

}  // namespace nqem
