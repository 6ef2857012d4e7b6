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

#include "quadlearn/mpc.hpp"

#include <algorithm>
#include <cmath>

#include "quadlearn/box_qp.hpp"

namespace quadlearn {

void OcpProblem::validate() const {
    if (horizon < 1) throw MpcError("horizon must be at least 1");
    if (!((Qx.array() > 0.0).all()) || !((Qu.array() > 0.0).all())) throw MpcError("Qx and Qu must be positive");
    if (static_cast<int>(x_ref.size()) != horizon + 1 || static_cast<int>(u_ref.size()) != horizon) {
        throw MpcError("reference must hold horizon+1 states and horizon controls");
    }
    if (!((u_min.array() <= u_max.array()).all())) throw MpcError("control bounds are inverted");
    if (!(lm_lambda >= 0.0)) throw MpcError("Levenberg-Marquardt lambda must be non-negative");
}

double OcpSolution::total_cost() const {
    double c = 0.0;
    for (const double s : stage_costs) c += s;
    return c;
}

std::vector<double> stage_costs(const OcpProblem& problem, const std::vector<State>& states,
                                const std::vector<Control>& controls) {
    std::vector<double> costs(states.size(), 0.0);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const TangentState e = boxminus(states[i], problem.x_ref[i]);
        costs[i] = 0.5 * e.dot(problem.Qx.cwiseProduct(e));
        if (i < controls.size()) {
            const Control du = controls[i] - problem.u_ref[i];
            costs[i] += 0.5 * du.dot(problem.Qu.cwiseProduct(du));
        }
    }
    return costs;
}

OcpSolution cold_start_guess(const OcpProblem& problem, const State& x0) {
    OcpSolution s;
    s.states.assign(static_cast<std::size_t>(problem.horizon) + 1, hover_state(x0.p));
    s.states.front() = x0;
    s.controls.assign(static_cast<std::size_t>(problem.horizon), problem.hover.cwiseMax(problem.u_min).cwiseMin(problem.u_max));
    return s;
}

OcpSolution shift_solution(const OcpSolution& previous) {
    OcpSolution s = previous;
    if (s.controls.empty()) return s;
    std::rotate(s.states.begin(), s.states.begin() + 1, s.states.end());
    s.states.back() = s.states[s.states.size() - 2];
    std::rotate(s.controls.begin(), s.controls.begin() + 1, s.controls.end());
    s.controls.back() = s.controls[s.controls.size() - 2 < s.controls.size() ? s.controls.size() - 2 : 0];
    return s;
}

OcpSolution sqp_iteration(const OcpProblem& problem, const DynamicsModel& model, const State& x0,
                          const OcpSolution& guess) {
    problem.validate();
    const int N = problem.horizon;
    if (static_cast<int>(guess.states.size()) != N + 1 || static_cast<int>(guess.controls.size()) != N) {
        throw MpcError("initial guess does not match the horizon");
    }
    if (!x0.is_finite()) throw MpcError("initial state is not finite");

    const int nz = kControlDim * N;
    const Eigen::DiagonalMatrix<double, kTangentDim> Q(problem.Qx);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nz, nz);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(nz);
    Eigen::Matrix<double, kTangentDim, Eigen::Dynamic> S = Eigen::Matrix<double, kTangentDim, Eigen::Dynamic>::Zero(kTangentDim, nz);
    TangentState d = TangentState::Zero();

    for (int k = 0; k < N; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const State& xk = k == 0 ? x0 : guess.states[ks];
        const Control& uk = guess.controls[ks];
        const Linearization lin = model.linearize(xk, uk);
        if (!lin.A.allFinite() || !lin.B.allFinite() || !lin.next.is_finite()) {
            throw MpcError("non-finite linearization at stage " + std::to_string(k));
        }
        const TangentState gap = boxminus(lin.next, guess.states[ks + 1]);

        // δx_{k+1} = A δx_k + B δu_k + gap, with δx_k = S δU + d
        const int used = kControlDim * (k + 1);
        S.leftCols(used - kControlDim) = lin.A * S.leftCols(used - kControlDim);
        S.middleCols(used - kControlDim, kControlDim) = lin.B;
        d = lin.A * d + gap;

        const TangentState r = boxminus(guess.states[ks + 1], problem.x_ref[ks + 1]) + d;
        const auto Sk = S.leftCols(used);
        H.topLeftCorner(used, used).noalias() += Sk.transpose() * Q * Sk;
        g.head(used).noalias() += Sk.transpose() * (Q * r);

        const int c = kControlDim * k;
        H.block(c, c, kControlDim, kControlDim).diagonal() += problem.Qu + Control::Constant(problem.lm_lambda);
        g.segment(c, kControlDim) += problem.Qu.cwiseProduct(uk - problem.u_ref[ks]);
    }

    Eigen::VectorXd lb(nz);
    Eigen::VectorXd ub(nz);
    for (int k = 0; k < N; ++k) {
        const auto& uk = guess.controls[static_cast<std::size_t>(k)];
        lb.segment(kControlDim * k, kControlDim) = problem.u_min - uk;
        ub.segment(kControlDim * k, kControlDim) = problem.u_max - uk;
    }

    BoxQpResult qp;
    try {
        qp = solve_box_qp(0.5 * (H + H.transpose()), g, lb, ub);
    } catch (const std::invalid_argument& e) {
        throw MpcError(std::string("QP subproblem failed: ") + e.what());
    }

    OcpSolution sol;
    sol.controls.resize(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        Control u = guess.controls[static_cast<std::size_t>(k)] + qp.z.segment(kControlDim * k, kControlDim);
        for (int i = 0; i < kControlDim; ++i) {
            const auto st = qp.active[static_cast<std::size_t>(kControlDim * k + i)];
            if (st == BoundState::Upper) u(i) = problem.u_max(i);
            else if (st == BoundState::Lower) u(i) = problem.u_min(i);
            else u(i) = std::clamp(u(i), problem.u_min(i), problem.u_max(i));
        }
        sol.controls[static_cast<std::size_t>(k)] = u;
    }
    sol.states.resize(static_cast<std::size_t>(N) + 1);
    sol.states[0] = x0;
    for (int k = 0; k < N; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        sol.states[ks + 1] = model.step(sol.states[ks], sol.controls[ks]);
    }
    sol.stage_costs = stage_costs(problem, sol.states, sol.controls);
    sol.kkt_residual = qp.kkt_residual;
    sol.qp_iterations = qp.iterations;
    return sol;
}

OcpSolution solve_rti(const OcpProblem& problem, const DynamicsModel& model, const State& x0,
                      const OcpSolution* warm_start) {
    const bool usable = warm_start != nullptr && static_cast<int>(warm_start->controls.size()) == problem.horizon &&
                        static_cast<int>(warm_start->states.size()) == problem.horizon + 1;
    OcpSolution guess = usable ? shift_solution(*warm_start) : cold_start_guess(problem, x0);
    guess.states.front() = x0;
    return sqp_iteration(problem, model, x0, guess);
}

OcpSolution solve_converged(const OcpProblem& problem, const DynamicsModel& model, const State& x0,
                            const OcpSolution& guess, int max_iterations, double tol) {
    OcpSolution current = guess;
    current.states.front() = x0;
    for (int it = 0; it < max_iterations; ++it) {
        OcpSolution next = sqp_iteration(problem, model, x0, current);
        double change = 0.0;
        for (std::size_t k = 0; k < next.controls.size(); ++k) {
            change = std::max(change, (next.controls[k] - current.controls[k]).cwiseAbs().maxCoeff());
        }
        current = std::move(next);
        if (change < tol) break;
    }
    return current;
}

TangentState apply_uncertainty_weighting(const TangentState& Qx, const TangentState& sigma_diag,
                                         const WeightingOptions& opt) {
    const TangentState sigma = sigma_diag.cwiseMax(opt.sigma_min).cwiseMin(opt.sigma_max);
    if (!opt.normalized) return Qx.cwiseQuotient(sigma);
    const TangentState ratio = sigma / sigma.maxCoeff();
    const TangentState raw = Qx.cwiseQuotient(ratio);
    return raw * (Qx.sum() / raw.sum());
}

}  // namespace quadlearn
