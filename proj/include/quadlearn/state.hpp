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
#include <array>

#include "quadlearn/manifold.hpp"

namespace quadlearn {

inline constexpr int kStateDim = 13;    ///< p, v, q (scalar first), ω
inline constexpr int kTangentDim = 12;  ///< p, v, rotation vector, ω
inline constexpr int kControlDim = 4;   ///< per-rotor forces

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using TangentState = Eigen::Matrix<double, kTangentDim, 1>;
using TangentCov = Eigen::Matrix<double, kTangentDim, kTangentDim>;
using Control = Eigen::Matrix<double, kControlDim, 1>;

/// Offsets into the 12-dim tangent vector.
namespace tangent {
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kRot = 6;
inline constexpr int kRate = 9;
}  // namespace tangent

/**
 * Rigid-body state. Position and velocity are in the inertial frame, the
 * quaternion rotates body to inertial, and body rates are in the body frame.
 */
struct State {
    Vec3 p{Vec3::Zero()};
    Vec3 v{Vec3::Zero()};
    Quaternion q{};
    Vec3 w{Vec3::Zero()};

    /// Layout [p, v, qw, qx, qy, qz, ω].
    [[nodiscard]] StateVector to_vector() const;
    static State from_vector(const StateVector& x);

    [[nodiscard]] bool is_finite() const;

    friend bool operator==(const State&, const State&) = default;
};

/// x ⊞ δ: Euclidean blocks add, the orientation block uses quaternion ⊞.
[[nodiscard]] State boxplus(const State& x, const TangentState& delta);

/// a ⊟ b, the tangent residual taking b to a.
[[nodiscard]] TangentState boxminus(const State& a, const State& b);

/// State at rest at the given position with identity attitude.
[[nodiscard]] State hover_state(const Vec3& position = Vec3::Zero());

}  // namespace quadlearn
