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

#include <stdexcept>
#include <string>

#include "quadlearn/mlp.hpp"
#include "quadlearn/rigid_body.hpp"
#include "quadlearn/state.hpp"

namespace quadlearn {

/// Raised when a model prediction is not a valid state.
class DynamicsError : public std::runtime_error {
public:
    DynamicsError(const std::string& what, int component = -1) : std::runtime_error(what), component_(component) {}
    /// Offending network output index, or -1.
    [[nodiscard]] int component() const { return component_; }

private:
    int component_;
};

using StateJacobian = Eigen::Matrix<double, kTangentDim, kTangentDim>;
using ControlJacobian = Eigen::Matrix<double, kTangentDim, kControlDim>;

/// Next state with Jacobians in tangent coordinates: the input is perturbed
/// as x ⊞ δ, u + δu and the output is read back as x'(δ, δu) ⊟ x'(0, 0).
struct Linearization {
    State next;
    StateJacobian A;
    ControlJacobian B;
};

/// Discrete-time model consumed by the MPC and the unscented transform.
class DynamicsModel {
public:
    virtual ~DynamicsModel() = default;
    [[nodiscard]] virtual State step(const State& x, const Control& u) const = 0;
    [[nodiscard]] virtual Linearization linearize(const State& x, const Control& u) const = 0;
    [[nodiscard]] virtual double dt() const = 0;
};

inline constexpr int kNetInputDim = 14;   ///< v, ω, q, u
inline constexpr int kNetOutputDim = 10;  ///< v', ω', q̂'

struct NeuralDynamicsOptions {
    double dt{0.05};
    /// Network output is added to [v, ω, q] instead of replacing it.
    bool residual{false};
};

/// Network input [v, ω, q (w >= 0), u]. Position is excluded.
[[nodiscard]] Eigen::Matrix<double, kNetInputDim, 1> network_input(const State& x, const Control& u);

/// Network regression target [v', ω', q'] for a transition, in the same mode.
[[nodiscard]] Eigen::Matrix<double, kNetOutputDim, 1> network_target(const State& x, const Control& u,
                                                                    const State& next, bool residual);

/// Builds a state from the raw network output: p' = p + v·dt and q' = q̂'/|q̂'| with w >= 0.
/// Throws DynamicsError for non-finite or degenerate outputs.
[[nodiscard]] State assemble_prediction(const State& x, const VectorXd& output, const NeuralDynamicsOptions& opt);

/// h(x, u; θ).
[[nodiscard]] State predict(const MlpParams& params, const State& x, const Control& u,
                            const NeuralDynamicsOptions& opt = {});

/// Exact chain-rule Jacobian of predict in tangent coordinates.
[[nodiscard]] Linearization predict_jacobian(const MlpParams& params, const State& x, const Control& u,
                                             const NeuralDynamicsOptions& opt = {});

/// d(q̂/|q̂| ⊟ q̂₀/|q̂₀|)/dq̂ at q̂₀, 3 × 4.
[[nodiscard]] Eigen::Matrix<double, 3, 4> normalized_quat_tangent_jacobian(const Quaternion& q_raw);

/// d(q ⊞ δ)/dδ at δ = 0, 4 × 3.
[[nodiscard]] Eigen::Matrix<double, 4, 3> boxplus_jacobian(const Quaternion& q);

/// Neural model h(·; θ) as a DynamicsModel. Holds a reference to the
/// parameters, which must outlive it.
class NeuralDynamics final : public DynamicsModel {
public:
    NeuralDynamics(const MlpParams& params, NeuralDynamicsOptions opt) : params_(&params), opt_(opt) {}

    [[nodiscard]] State step(const State& x, const Control& u) const override { return predict(*params_, x, u, opt_); }
    [[nodiscard]] Linearization linearize(const State& x, const Control& u) const override {
        return predict_jacobian(*params_, x, u, opt_);
    }
    [[nodiscard]] double dt() const override { return opt_.dt; }
    [[nodiscard]] const MlpParams& params() const { return *params_; }

private:
    const MlpParams* params_;
    NeuralDynamicsOptions opt_;
};

/// Rigid-body ODE with RK4, the Nominal baseline. Jacobians by forward-mode
/// automatic differentiation through the integrator.
class NominalDynamics final : public DynamicsModel {
public:
    NominalDynamics(RigidBodyParams params, double dt);

    [[nodiscard]] State step(const State& x, const Control& u) const override;
    [[nodiscard]] Linearization linearize(const State& x, const Control& u) const override;
    [[nodiscard]] double dt() const override { return dt_; }
    [[nodiscard]] const RigidBodyParams& params() const { return params_; }

private:
    RigidBodyParams params_;
    double dt_;
};

}  // namespace quadlearn
