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
#include <cmath>
#include <stdexcept>

#include "quadlearn/state.hpp"

namespace quadlearn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Physical constants of the quadrotor in X configuration.
 *
 * Rotor i sits at arm_length · (cos a_i, sin a_i, 0) with a_i = 45° + i·90°
 * (front-left, rear-left, rear-right, front-right) and spins in direction
 * (+1, -1, +1, -1), producing yaw torque torque_coeff · s_i · f_i.
 */
struct RigidBodyParams {
    double mass{0.25};
    Mat3 inertia{Eigen::Vector3d(2.5e-4, 2.5e-4, 4e-4).asDiagonal()};
    double arm_length{0.08};
    double torque_coeff{0.01};
    double gravity{9.81};

    /// Throws ConfigError for non-positive mass/arm or a non-SPD inertia.
    void validate() const;

    /// Maps rotor forces to (collective thrust, body torque).
    [[nodiscard]] Eigen::Matrix4d mixer() const;

    /// Per-rotor force holding hover.
    [[nodiscard]] double hover_force() const { return mass * gravity / 4.0; }
};

/// Additive wrenches applied on top of rotor forces and gravity.
struct ExternalWrench {
    Vec3 force{Vec3::Zero()};   ///< inertial frame, N
    Vec3 torque{Vec3::Zero()};  ///< body frame, N·m
};

/// Continuous-time derivative of the 13-vector [p, v, q, ω].
template <typename T>
Eigen::Matrix<T, kStateDim, 1> rigid_body_derivative(const RigidBodyParams& params,
                                                     const Eigen::Matrix<T, kStateDim, 1>& x,
                                                     const Eigen::Matrix<T, kControlDim, 1>& u,
                                                     const ExternalWrench& ext = {}) {
    using V3 = Eigen::Matrix<T, 3, 1>;
    const Eigen::Matrix4d mix = params.mixer();
    const Eigen::Matrix<T, 4, 1> wrench = mix.cast<T>() * u;

    const T qw = x(6), qx = x(7), qy = x(8), qz = x(9);
    const V3 w = x.template segment<3>(10);

    // third column of R(q) for a unit quaternion
    const V3 z_body(T(2) * (qx * qz + qw * qy), T(2) * (qy * qz - qw * qx), qw * qw - qx * qx - qy * qy + qz * qz);

    Eigen::Matrix<T, kStateDim, 1> dx;
    dx.template segment<3>(0) = x.template segment<3>(3);
    dx.template segment<3>(3) = z_body * (wrench(0) / T(params.mass)) + ext.force.cast<T>() / T(params.mass);
    dx(5) -= T(params.gravity);

    // q̇ = ½ q ⊗ (0, ω)
    dx(6) = T(0.5) * (-qx * w(0) - qy * w(1) - qz * w(2));
    dx(7) = T(0.5) * (qw * w(0) + qy * w(2) - qz * w(1));
    dx(8) = T(0.5) * (qw * w(1) - qx * w(2) + qz * w(0));
    dx(9) = T(0.5) * (qw * w(2) + qx * w(1) - qy * w(0));

    const Eigen::Matrix<T, 3, 3> J = params.inertia.cast<T>();
    const V3 torque = wrench.template segment<3>(1) + ext.torque.cast<T>();
    const V3 Jw = J * w;
    dx.template segment<3>(10) = params.inertia.inverse().cast<T>() * (torque - w.cross(Jw));
    return dx;
}

/// One classical RK4 step of length dt followed by quaternion renormalization.
template <typename T>
Eigen::Matrix<T, kStateDim, 1> rigid_body_rk4(const RigidBodyParams& params, const Eigen::Matrix<T, kStateDim, 1>& x,
                                              const Eigen::Matrix<T, kControlDim, 1>& u, double dt,
                                              const ExternalWrench& ext = {}) {
    const T h(dt);
    const auto k1 = rigid_body_derivative<T>(params, x, u, ext);
    const auto k2 = rigid_body_derivative<T>(params, Eigen::Matrix<T, kStateDim, 1>(x + k1 * (h / T(2))), u, ext);
    const auto k3 = rigid_body_derivative<T>(params, Eigen::Matrix<T, kStateDim, 1>(x + k2 * (h / T(2))), u, ext);
    const auto k4 = rigid_body_derivative<T>(params, Eigen::Matrix<T, kStateDim, 1>(x + k3 * h), u, ext);
    Eigen::Matrix<T, kStateDim, 1> out = x + (k1 + T(2) * k2 + T(2) * k3 + k4) * (h / T(6));
    using std::sqrt;
    const T n = sqrt(out.template segment<4>(6).squaredNorm());
    out.template segment<4>(6) /= n;
    return out;
}

/// Rigid-body ODE integrated with RK4 over dt. Validates params.
[[nodiscard]] State analytic_step(const RigidBodyParams& params, const State& x, const Control& u, double dt,
                                  const ExternalWrench& ext = {});

/// Kinetic plus gravitational potential energy of the body alone.
[[nodiscard]] double mechanical_energy(const RigidBodyParams& params, const State& x);

}  // namespace quadlearn
