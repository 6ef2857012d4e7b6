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

#include <Eigen/Dense>
#include <vector>

namespace quadlearn {

/// Bound status of a variable at the solution.
enum class BoundState : signed char { Lower = -1, Free = 0, Upper = 1 };

struct BoxQpResult {
    Eigen::VectorXd z;
    std::vector<BoundState> active;
    int iterations{0};
    double kkt_residual{0.0};  ///< ‖projected gradient‖∞
    bool converged{false};
};

/**
 * Primal active-set solver for
 *
 *     min ½ zᵀHz + gᵀz   s.t.  lb ≤ z ≤ ub
 *
 * with H symmetric positive definite. Variables on the working set sit
 * exactly on their bound. Throws std::invalid_argument when lb > ub or the
 * data are not finite.
 */
BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lb,
                         const Eigen::VectorXd& ub, int max_iterations = 500);

/// ‖projected gradient‖∞ of the box QP at z.
double box_qp_kkt_residual(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lb,
                           const Eigen::VectorXd& ub, const Eigen::VectorXd& z);

}  // namespace quadlearn
