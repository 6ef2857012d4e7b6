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

#include "quadlearn/rigid_body.hpp"

namespace quadlearn {

void RigidBodyParams::validate() const {
    if (!(mass > 0.0)) throw ConfigError("rigid body mass must be positive");
    if (!(arm_length > 0.0)) throw ConfigError("arm length must be positive");
    if (!(gravity >= 0.0)) throw ConfigError("gravity must be non-negative");
    if (!inertia.allFinite() || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * inertia.norm()) {
        throw ConfigError("inertia must be a finite symmetric matrix");
    }
    Eigen::LLT<Mat3> llt(inertia);
    if (llt.info() != Eigen::Success) throw ConfigError("inertia must be positive definite");
}

Eigen::Matrix4d RigidBodyParams::mixer() const {
    const double d = arm_length / std::sqrt(2.0);
    const double c = torque_coeff;
    // columns: front-left, rear-left, rear-right, front-right
    Eigen::Matrix4d M;
    M << 1.0, 1.0, 1.0, 1.0,
        d, d, -d, -d,
        -d, d, d, -d,
        c, -c, c, -c;
    return M;
}

State analytic_step(const RigidBodyParams& params, const State& x, const Control& u, double dt,
                    const ExternalWrench& ext) {
    params.validate();
    return State::from_vector(rigid_body_rk4<double>(params, x.to_vector(), u, dt, ext));
}

double mechanical_energy(const RigidBodyParams& params, const State& x) {
    return 0.5 * params.mass * x.v.squaredNorm() + 0.5 * x.w.dot(params.inertia * x.w) +
           params.mass * params.gravity * x.p.z();
}

}  // namespace quadlearn
