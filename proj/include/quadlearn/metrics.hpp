/*
 Copyright 2026 The quadlearn Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <vector>

#include "quadlearn/state.hpp"

namespace quadlearn {

/// √(1/N Σ (x_i − x_des,i)²) over the N = 13 components, quaternions taken with w ≥ 0.
[[nodiscard]] double state_rmse(const State& x, const State& x_des);

/// Euclidean position error ‖p − p_des‖ scaled by 1/√3, the position-only variant of the above.
[[nodiscard]] double position_rmse(const State& x, const State& x_des);

/// Running sum of per-step values.
[[nodiscard]] std::vector<double> cumulative(const std::vector<double>& per_step);

struct TrackingSummary {
    double rmse{0.0};           ///< mean of per-step state RMSE
    double position_rmse{0.0};  ///< RMSE over every position entry of the run
    double final_crmse{0.0};
    std::vector<double> step_rmse;
    std::vector<double> crmse;
};

/// Throws std::invalid_argument for empty or mismatched inputs.
[[nodiscard]] TrackingSummary compute_metrics(const std::vector<State>& states, const std::vector<State>& desired);

}  // namespace quadlearn
