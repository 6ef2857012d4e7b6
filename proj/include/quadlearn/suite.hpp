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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quadlearn/episode.hpp"

namespace quadlearn {

struct RunSummary {
    std::string scenario;
    ControllerMode mode{ControllerMode::Nominal};
    std::uint64_t seed{0};
    double position_rmse{0.0};
    double rmse{0.0};
    double final_crmse{0.0};
    double mean_forward_error{0.0};
    bool crashed{false};
    double crash_time{0.0};
    std::string crash_reason;
    std::size_t steps{0};
    std::string csv;  ///< path relative to the output directory
};

/// Aggregate of one (scenario, mode) cell over its seeds.
struct CellSummary {
    std::string scenario;
    ControllerMode mode{ControllerMode::Nominal};
    std::size_t runs{0};
    std::size_t crashes{0};
    double position_rmse_mean{0.0};
    double position_rmse_std{0.0};
    double rmse_mean{0.0};
    double rmse_std{0.0};
};

/// "better < worse" on a Payload or Wind scenario: fewer crashes first, then lower mean position RMSE.
struct OrderingCheck {
    std::string scenario;
    ControllerMode better{ControllerMode::Adaptive};
    ControllerMode worse{ControllerMode::Static};
    bool holds{false};
};

struct SuiteResult {
    std::vector<RunSummary> runs;
    std::vector<CellSummary> cells;
    std::vector<OrderingCheck> checks;

    [[nodiscard]] bool all_checks_hold() const;
    [[nodiscard]] const CellSummary* cell(const std::string& scenario, ControllerMode mode) const;
};

struct SuiteOptions {
    std::optional<std::vector<ControllerMode>> modes;  ///< overrides the config
    std::optional<std::uint64_t> seed;                  ///< single seed for every scenario
    bool timing{false};
    std::function<void(const RunSummary&)> on_run;      ///< progress callback
};

/// Sample mean and standard deviation (n − 1 in the denominator, 0 for a single value).
[[nodiscard]] std::pair<double, double> mean_std(const std::vector<double>& values);

[[nodiscard]] bool ranks_before(const CellSummary& a, const CellSummary& b);

/**
 * Runs modes × scenarios × seeds, writing runs/<scenario>/<mode>_seed<k>.csv,
 * summary.json and summary.md under out_dir. Network modes load the
 * parameter file named by the config.
 */
SuiteResult run_suite(const SuiteConfig& cfg, const std::filesystem::path& out_dir, const SuiteOptions& opt = {});

/// Same as run_suite with explicit parameters instead of the parameter file.
SuiteResult run_suite(const SuiteConfig& cfg, const MlpParams* params, const std::filesystem::path& out_dir,
                      const SuiteOptions& opt = {});

[[nodiscard]] std::string summary_json(const SuiteConfig& cfg, const SuiteResult& result);
[[nodiscard]] std::string summary_markdown(const SuiteResult& result);

}  // namespace quadlearn
