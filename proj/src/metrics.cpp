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

#include "quadlearn/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace quadlearn {

double state_rmse(const State& x, const State& x_des) {
    State a = x;
    State b = x_des;
    a.q = canonicalize(a.q);
    b.q = canonicalize(b.q);
    return std::sqrt((a.to_vector() - b.to_vector()).squaredNorm() / kStateDim);
}

double position_rmse(const State& x, const State& x_des) { return std::sqrt((x.p - x_des.p).squaredNorm() / 3.0); }

std::vector<double> cumulative(const std::vector<double>& per_step) {
    std::vector<double> out(per_step.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < per_step.size(); ++i) {
        acc += per_step[i];
        out[i] = acc;
    }
    return out;
}

TrackingSummary compute_metrics(const std::vector<State>& states, const std::vector<State>& desired) {
    if (states.empty() || states.size() != desired.size()) {
        throw std::invalid_argument("metrics need equally long, non-empty state sequences");
    }
    TrackingSummary s;
    s.step_rmse.reserve(states.size());
    double pos_sq = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double r = state_rmse(states[i], desired[i]);
        s.step_rmse.push_back(r);
        sum += r;
        pos_sq += (states[i].p - desired[i].p).squaredNorm();
    }
    const auto n = static_cast<double>(states.size());
    s.rmse = sum / n;
    s.position_rmse = std::sqrt(pos_sq / (3.0 * n));
    s.crmse = cumulative(s.step_rmse);
    s.final_crmse = s.crmse.back();
    return s;
}

}  // namespace quadlearn
