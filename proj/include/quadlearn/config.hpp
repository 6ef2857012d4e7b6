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

#include "quadlearn/controller.hpp"
#include "quadlearn/learner.hpp"
#include "quadlearn/reference.hpp"
#include "quadlearn/simulator.hpp"

namespace quadlearn {

/// Zero-mean Gaussian measurement noise in tangent coordinates (standard deviations).
struct MeasurementNoise {
    double position{1e-3};
    double velocity{1e-2};
    double attitude{1e-3};
    double rate{1e-2};

    [[nodiscard]] TangentState stddev() const;
    [[nodiscard]] TangentCov covariance() const;
    [[nodiscard]] bool enabled() const { return stddev().squaredNorm() > 0.0; }
};

struct Scenario {
    std::string name{"hover"};
    RigidBodyParams body{};
    Perturbation perturbation{};
    TrajectoryId trajectory{TrajectoryId::Hover};
    TrajectoryParams trajectory_params{};
    double duration{10.0};
    double control_dt{0.05};
    double physics_dt{1e-3};
    MeasurementNoise noise{};
    std::vector<std::uint64_t> seeds{1};

    void validate() const;
};

/// Flights used for offline training: the Nominal MPC tracking randomized
/// references with Gaussian excitation added to its commands.
struct DatasetConfig {
    int trajectories{24};
    double duration{80.0};
    double excitation_std{0.06};
    std::uint64_t seed{7};
    double amplitude_min{0.3};
    double amplitude_max{1.5};
    double period_min{5.0};
    double period_max{12.0};
    MeasurementNoise noise{};
    double physics_dt{1e-3};

    void validate() const;
};

struct SuiteConfig {
    std::string name{"suite"};
    std::filesystem::path output_dir{"out"};
    std::filesystem::path params_path{"out/model/params.json"};
    std::vector<ControllerMode> modes{ControllerMode::Nominal, ControllerMode::Static, ControllerMode::StaticUA,
                                      ControllerMode::StaticOL, ControllerMode::Adaptive};
    ControllerConfig controller{};  ///< mode is overwritten per run
    std::vector<Scenario> scenarios;
    TrainingConfig training{};
    DatasetConfig dataset{};
    bool record_timing{false};

    void validate() const;
};

/// Built-in defaults: every constant the YAML schema exposes, with no scenarios.
[[nodiscard]] SuiteConfig default_suite_config();

/// Parses YAML text. Errors are ConfigError messages of the form
/// "<source>:<line>:<column>: <field>: <problem>".
[[nodiscard]] SuiteConfig parse_suite_config(const std::string& yaml_text, const std::string& source = "<string>");
[[nodiscard]] SuiteConfig load_suite_config(const std::filesystem::path& path);

}  // namespace quadlearn
