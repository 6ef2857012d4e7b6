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

#include "quadlearn/box_qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quadlearn {

namespace {

double projected_gradient(double grad, double z, double lb, double ub) {
    if (z <= lb) return std::min(0.0, grad);
    if (z >= ub) return std::max(0.0, grad);
    return grad;
}

}  // namespace

double box_qp_kkt_residual(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lb,
                           const Eigen::VectorXd& ub, const Eigen::VectorXd& z) {
    const Eigen::VectorXd grad = H * z + g;
    double r = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) r = std::max(r, std::abs(projected_gradient(grad(i), z(i), lb(i), ub(i))));
    return r;
}

BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lb,
                         const Eigen::VectorXd& ub, int max_iterations) {
    const Eigen::Index n = g.size();
    if (H.rows() != n || H.cols() != n || lb.size() != n || ub.size() != n) {
        throw std::invalid_argument("box QP: dimension mismatch");
    }
    if (!H.allFinite() || !g.allFinite()) throw std::invalid_argument("box QP: non-finite data");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(lb(i) <= ub(i))) throw std::invalid_argument("box QP: infeasible bounds at index " + std::to_string(i));
    }

    BoxQpResult res;
    res.active.assign(static_cast<std::size_t>(n), BoundState::Free);
    res.z = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (0.0 <= lb(i)) {
            res.z(i) = lb(i);
            res.active[k] = BoundState::Lower;
        } else if (0.0 >= ub(i)) {
            res.z(i) = ub(i);
            res.active[k] = BoundState::Upper;
        }
    }

    const double scale = std::max({1.0, H.cwiseAbs().maxCoeff(), g.cwiseAbs().maxCoeff()});
    const double tol = 1e-13 * scale;
    std::vector<Eigen::Index> free;
    free.reserve(static_cast<std::size_t>(n));

    for (res.iterations = 1; res.iterations <= max_iterations; ++res.iterations) {
        free.clear();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (res.active[static_cast<std::size_t>(i)] == BoundState::Free) free.push_back(i);
        }
        const Eigen::VectorXd grad = H * res.z + g;
        Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
        if (!free.empty()) {
            const auto m = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd Hff(m, m);
            Eigen::VectorXd rhs(m);
            for (Eigen::Index a = 0; a < m; ++a) {
                rhs(a) = -grad(free[static_cast<std::size_t>(a)]);
                for (Eigen::Index b = 0; b < m; ++b) {
                    Hff(a, b) = H(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
                }
            }
            Eigen::LLT<Eigen::MatrixXd> llt(Hff);
            if (llt.info() != Eigen::Success) throw std::invalid_argument("box QP: Hessian is not positive definite");
            const Eigen::VectorXd p = llt.solve(rhs);
            for (Eigen::Index a = 0; a < m; ++a) step(free[static_cast<std::size_t>(a)]) = p(a);
        }

        if (step.cwiseAbs().maxCoeff() > 0.0) {
            double alpha = 1.0;
            Eigen::Index blocking = -1;
            BoundState blocking_state = BoundState::Free;
            for (const Eigen::Index i : free) {
                if (step(i) < 0.0) {
                    const double a = (lb(i) - res.z(i)) / step(i);
                    if (a < alpha) {
                        alpha = a;
                        blocking = i;
                        blocking_state = BoundState::Lower;
                    }
                } else if (step(i) > 0.0) {
                    const double a = (ub(i) - res.z(i)) / step(i);
                    if (a < alpha) {
                        alpha = a;
                        blocking = i;
                        blocking_state = BoundState::Upper;
                    }
                }
            }
            alpha = std::max(alpha, 0.0);
            res.z += alpha * step;
            for (const Eigen::Index i : free) res.z(i) = std::clamp(res.z(i), lb(i), ub(i));
            if (blocking >= 0) {
                res.active[static_cast<std::size_t>(blocking)] = blocking_state;
                res.z(blocking) = blocking_state == BoundState::Lower ? lb(blocking) : ub(blocking);
                continue;
            }
        }

        // minimizer on the working set: check multiplier signs
        const Eigen::VectorXd grad_new = H * res.z + g;
        Eigen::Index worst = -1;
        double worst_value = -tol;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto st = res.active[static_cast<std::size_t>(i)];
            if (st == BoundState::Free || lb(i) == ub(i)) continue;
            const double mult = st == BoundState::Lower ? grad_new(i) : -grad_new(i);
            if (mult < worst_value) {
                worst_value = mult;
                worst = i;
            }
        }
        if (worst < 0) {
            res.converged = true;
            break;
        }
        res.active[static_cast<std::size_t>(worst)] = BoundState::Free;
    }
    res.iterations = std::min(res.iterations, max_iterations);
    res.kkt_residual = box_qp_kkt_residual(H, g, lb, ub, res.z);
    return res;
}

}  // namespace quadlearn
