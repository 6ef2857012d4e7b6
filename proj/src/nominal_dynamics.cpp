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

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

#include "quadlearn/dynamics.hpp"

namespace quadlearn {

namespace {
constexpr int kDirections = kTangentDim + kControlDim;
using Derivatives = Eigen::Matrix<double, kDirections, 1>;
using Dual = Eigen::AutoDiffScalar<Derivatives>;

Dual seeded(double value, int direction) {
    return Dual(value, Derivatives::Unit(direction));
}

Dual constant(double value) { return Dual(value, Derivatives::Zero()); }
}  // namespace

NominalDynamics::NominalDynamics(RigidBodyParams params, double dt) : params_(std::move(params)), dt_(dt) {
    params_.validate();
    if (!(dt_ > 0.0)) throw ConfigError("model time step must be positive");
}

State NominalDynamics::step(const State& x, const Control& u) const {
    return State::from_vector(rigid_body_rk4<double>(params_, x.to_vector(), u, dt_));
}

Linearization NominalDynamics::linearize(const State& x, const Control& u) const {
    Eigen::Matrix<Dual, kStateDim, 1> xd;
    for (int i = 0; i < 3; ++i) {
        xd(i) = seeded(x.p(i), tangent::kPos + i);
        xd(3 + i) = seeded(x.v(i), tangent::kVel + i);
        xd(10 + i) = seeded(x.w(i), tangent::kRate + i);
    }
    // q ⊗ (1, δθ/2), exact to first order at δθ = 0
    const Eigen::Matrix<Dual, 3, 1> half(Dual(0.0, 0.5 * Derivatives::Unit(tangent::kRot)),
                                         Dual(0.0, 0.5 * Derivatives::Unit(tangent::kRot + 1)),
                                         Dual(0.0, 0.5 * Derivatives::Unit(tangent::kRot + 2)));
    const Dual qw = constant(x.q.w), qx = constant(x.q.x), qy = constant(x.q.y), qz = constant(x.q.z);
    xd(6) = qw - qx * half(0) - qy * half(1) - qz * half(2);
    xd(7) = qx + qw * half(0) + qy * half(2) - qz * half(1);
    xd(8) = qy + qw * half(1) - qx * half(2) + qz * half(0);
    xd(9) = qz + qw * half(2) + qx * half(1) - qy * half(0);

    Eigen::Matrix<Dual, kControlDim, 1> ud;
    for (int i = 0; i < kControlDim; ++i) ud(i) = seeded(u(i), kTangentDim + i);

    const Eigen::Matrix<Dual, kStateDim, 1> out = rigid_body_rk4<Dual>(params_, xd, ud, dt_);

    StateVector value;
    Eigen::Matrix<double, kStateDim, kDirections> jac;
    for (int i = 0; i < kStateDim; ++i) {
        value(i) = out(i).value();
        jac.row(i) = out(i).derivatives().transpose();
    }

    Linearization lin;
    lin.next = State::from_vector(value);
    // output rotation tangent: 2·vec(q'* ⊗ dq')
    const Eigen::Matrix<double, 3, 4> dtheta = 2.0 * quat_left_matrix(lin.next.q.conjugate()).bottomRows<3>();
    Eigen::Matrix<double, kTangentDim, kDirections> full;
    full.middleRows<3>(tangent::kPos) = jac.middleRows<3>(0);
    full.middleRows<3>(tangent::kVel) = jac.middleRows<3>(3);
    full.middleRows<3>(tangent::kRot) = dtheta * jac.middleRows<4>(6);
    full.middleRows<3>(tangent::kRate) = jac.middleRows<3>(10);
    lin.A = full.leftCols<kTangentDim>();
    lin.B = full.rightCols<kControlDim>();
    return lin;
}

}  // namespace quadlearn
