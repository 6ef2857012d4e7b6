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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quadlearn/learner.hpp"
#include "quadlearn/mpc.hpp"
#include "quadlearn/uncertainty.hpp"

namespace quadlearn {

enum class ControllerMode { Nominal, Static, StaticUA, StaticOL, Adaptive };

/// nominal, static, static-ua, static-ol, adaptive
[[nodiscard]] std::string to_string(ControllerMode mode);
[[nodiscard]] ControllerMode parse_controller_mode(std::string_view name);

[[nodiscard]] bool uses_network(ControllerMode mode);
[[nodiscard]] bool uses_uncertainty(ControllerMode mode);
[[nodiscard]] bool uses_online_learning(ControllerMode mode);

enum class SigmaMode {
    Recursive,  ///< the propagated Σ seeds the next step
    Reset,      ///< every step starts from the initial Σ
};

struct ControllerConfig {
    ControllerMode mode{ControllerMode::Nominal};
    int horizon{20};
    TangentState Qx{(TangentState() << 20, 20, 20, 5, 5, 5, 10, 10, 10, 1, 1, 1).finished()};
    Control Qu{Control::Constant(0.1)};
    double lm_lambda{1e-3};
    Control u_min{Control::Zero()};
    Control u_max{Control::Constant(1.5)};

    NeuralDynamicsOptions network{};
    RigidBodyParams nominal_body{};

    UnscentedParams unscented{};
    WeightingOptions weighting{};
    SigmaMode sigma_mode{SigmaMode::Reset};
    TangentCov initial_cov{TangentCov::Identity() * 1e-4};
    Execution ut_execution{Execution::Serial};

    std::size_t window{20};
    double online_lr{2e-3};
    QuatLoss quat_loss{QuatLoss::Canonical};

    void validate() const;
};

struct ControlDiagnostics {
    TangentState sigma_diag{TangentState::Zero()};
    TangentState weights{TangentState::Zero()};
    double forward_error{0.0};  ///< error of the model on the newest transition, before any update
    bool has_forward_error{false};
    bool updated{false};  ///< an online step ran
    double solve_ms{0.0};
    double kkt_residual{0.0};
    int qp_iterations{0};
    double predicted_cost{0.0};
};

/**
 * Closed-loop controller context. Owns the working copy of the network
 * parameters, the warm start, Σ and the replay window; not thread-safe.
 */
class Controller {
public:
    /// `params` is copied; it may be null only in Nominal mode.
    Controller(ControllerConfig cfg, const MlpParams* params);

    /// x_ref holds horizon + 1 states and u_ref horizon controls starting at t.
    Control control_step(const State& x_hat, double t, const std::vector<State>& x_ref,
                         const std::vector<Control>& u_ref, ControlDiagnostics* diag = nullptr);

    /// Forces the σ fed to the weighting, bypassing the unscented transform.
    void set_sigma_override(std::optional<TangentState> sigma) { sigma_override_ = std::move(sigma); }

    void reset();

    [[nodiscard]] const ControllerConfig& config() const { return cfg_; }
    [[nodiscard]] const MlpParams& params() const { return params_; }
    [[nodiscard]] const OcpSolution& last_solution() const { return warm_; }
    [[nodiscard]] const TangentCov& covariance() const { return cov_; }
    [[nodiscard]] const ReplayWindow& window() const { return window_; }

private:
    [[nodiscard]] double model_forward_error(const Transition& tr) const;

    ControllerConfig cfg_;
    MlpParams params_;
    std::optional<NominalDynamics> nominal_;
    OcpSolution warm_;
    TangentCov cov_;
    ReplayWindow window_;
    std::optional<State> last_x_;
    Control last_u_{Control::Zero()};
    std::optional<TangentState> sigma_override_;
};

}  // namespace quadlearn
