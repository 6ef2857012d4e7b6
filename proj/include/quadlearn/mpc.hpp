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
#include <vector>

#include "quadlearn/dynamics.hpp"
#include "quadlearn/state.hpp"

namespace quadlearn {

class MpcError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Multiple-shooting tracking OCP
 *
 *     min ½ Σ_{i=0..N} ‖x_i ⊟ x_ref,i‖²_Qx + ½ Σ_{i<N} ‖u_i − u_ref,i‖²_Qu
 *     s.t. x_{i+1} = h(x_i, u_i), x_0 = x̂_0, u_min ≤ u_i ≤ u_max.
 */
struct OcpProblem {
    int horizon{20};
    TangentState Qx{TangentState::Ones()};
    Control Qu{Control::Ones()};
    std::vector<State> x_ref;    ///< horizon + 1
    std::vector<Control> u_ref;  ///< horizon
    Control u_min{Control::Zero()};
    Control u_max{Control::Constant(1.5)};
    double lm_lambda{1e-3};
    Control hover{Control::Zero()};  ///< control used by the cold-start guess

    /// Throws MpcError describing the first violated invariant.
    void validate() const;
};

struct OcpSolution {
    std::vector<State> states;    ///< horizon + 1, states[0] is the measured state
    std::vector<Control> controls;  ///< horizon
    std::vector<double> stage_costs;
    double kkt_residual{0.0};
    int qp_iterations{0};

    [[nodiscard]] double total_cost() const;
    [[nodiscard]] bool empty() const { return controls.empty(); }
};

/// Stage costs of a trajectory against the problem's references.
[[nodiscard]] std::vector<double> stage_costs(const OcpProblem& problem, const std::vector<State>& states,
                                              const std::vector<Control>& controls);

/// Hover-hold initial guess: zero velocity at the current position, hover controls.
[[nodiscard]] OcpSolution cold_start_guess(const OcpProblem& problem, const State& x0);

/// Previous solution advanced by one stage, last stage duplicated.
[[nodiscard]] OcpSolution shift_solution(const OcpSolution& previous);

/**
 * One Gauss-Newton SQP iteration around `guess`: linearize the dynamics at
 * every stage, condense onto the control increments, add λ·I, solve the
 * box-constrained QP, take the full step and roll the nonlinear dynamics out
 * from x0.
 */
[[nodiscard]] OcpSolution sqp_iteration(const OcpProblem& problem, const DynamicsModel& model, const State& x0,
                                        const OcpSolution& guess);

/// Real-time iteration: shift the warm start (or build the cold-start guess) and run one SQP iteration.
[[nodiscard]] OcpSolution solve_rti(const OcpProblem& problem, const DynamicsModel& model, const State& x0,
                                    const OcpSolution* warm_start);

/// Repeats SQP iterations without shifting until the control update drops below tol.
[[nodiscard]] OcpSolution solve_converged(const OcpProblem& problem, const DynamicsModel& model, const State& x0,
                                          const OcpSolution& guess, int max_iterations = 200, double tol = 1e-12);

struct WeightingOptions {
    bool normalized{true};
    double sigma_min{1e-8};
    double sigma_max{1e2};
};

/// Qx'ᵢ = Qxᵢ / clamp(σᵢ); in normalized mode the result is rescaled so that Σ Qx' = Σ Qx.
[[nodiscard]] TangentState apply_uncertainty_weighting(const TangentState& Qx, const TangentState& sigma_diag,
                                                       const WeightingOptions& opt = {});

}  // namespace quadlearn
