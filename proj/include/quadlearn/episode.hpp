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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "quadlearn/config.hpp"
#include "quadlearn/metrics.hpp"

namespace quadlearn {

struct StepRecord {
    double t{0.0};
    State x_true;
    State x_hat;
    State x_des;
    Control u{Control::Zero()};
    ControlDiagnostics diag;
};

struct RunRecord {
    std::string scenario;
    ControllerMode mode{ControllerMode::Nominal};
    std::uint64_t seed{0};
    std::vector<StepRecord> steps;
    bool crashed{false};
    double crash_time{0.0};
    std::string crash_reason;
    TrackingSummary metrics;
    /// Hash of every layer except the last, before and after the run.
    std::uint64_t frozen_hash_before{0};
    std::uint64_t frozen_hash_after{0};
};

struct EpisodeOptions {
    /// Replaces the controller's commands with u + N(0, std²), clipped to the bounds.
    double excitation_std{0.0};
};

/// Noise and physics streams derived from one seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/**
 * Closed loop at the control rate: measure (truth plus Gaussian noise),
 * control_step, simulate with zero-order hold, log. Leaving the flight
 * envelope or a controller exception ends the run as crashed; the steps
 * logged so far are kept.
 */
[[nodiscard]] RunRecord run_episode(const Scenario& scenario, const ControllerConfig& controller, ControllerMode mode,
                                    const MlpParams* params, std::uint64_t seed, const EpisodeOptions& opt = {});

/// Columns: t, mode, solve_ms, kkt, forward_error, σ1..σ12, u1..u4, x[13], x_des[13].
/// solve_ms is written as 0 unless with_timing is set, keeping the file reproducible.
void write_run_csv(const RunRecord& run, const std::filesystem::path& path, bool with_timing);

/// Measured states and applied controls of a run, for training.
[[nodiscard]] Trajectory to_trajectory(const RunRecord& run, const std::string& name);

/// Seeded flights of the Nominal MPC over randomized references with command excitation.
[[nodiscard]] std::vector<Trajectory> generate_dataset(const SuiteConfig& cfg);

}  // namespace quadlearn
