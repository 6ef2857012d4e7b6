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
#include <stdexcept>
#include <string>

namespace quadlearn {

/// Domain error raised by manifold operations on degenerate inputs.
class ManifoldError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

/// Tangent vector at identity of SO(3); its norm is the rotation angle.
using TangentVector = Vec3;

/**
 * Hamilton quaternion, scalar first.
 *
 * Storage does not enforce unit norm: network outputs are arbitrary 4-vectors
 * and are only normalized when converted back into a rotation. Functions that
 * need a unit quaternion say so.
 */
struct Quaternion {
    double w{1.0};
    double x{0.0};
    double y{0.0};
    double z{0.0};

    Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static Quaternion identity() { return {}; }
    static Quaternion from_vec(const Vec4& v) { return {v(0), v(1), v(2), v(3)}; }

    [[nodiscard]] Vec4 vec() const { return {w, x, y, z}; }
    [[nodiscard]] Vec3 imag() const { return {x, y, z}; }
    [[nodiscard]] double norm() const;
    [[nodiscard]] double squared_norm() const { return w * w + x * x + y * y + z * z; }
    [[nodiscard]] Quaternion conjugate() const { return {w, -x, -y, -z}; }
    /// Multiplicative inverse; equals the conjugate for unit quaternions.
    [[nodiscard]] Quaternion inverse() const;
    [[nodiscard]] Quaternion operator-() const { return {-w, -x, -y, -z}; }
    [[nodiscard]] bool is_finite() const;

    friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

/// Hamilton product p ⊗ q.
[[nodiscard]] Quaternion quat_mul(const Quaternion& p, const Quaternion& q);
[[nodiscard]] inline Quaternion operator*(const Quaternion& p, const Quaternion& q) { return quat_mul(p, q); }

/// Unit-norm copy. Throws ManifoldError for a zero quaternion.
[[nodiscard]] Quaternion normalize(const Quaternion& q);

/// Sign flip so that w >= 0. Both signs encode the same rotation.
[[nodiscard]] Quaternion canonicalize(const Quaternion& q);

/// Exponential map of a pure quaternion (0, v): (cos|v|, v/|v| sin|v|).
[[nodiscard]] Quaternion quat_exp(const TangentVector& v);

/// Rotation part of the quaternion logarithm, u·θ with θ = atan2(|q_v|, q_w).
/// The input is normalized and canonicalized first, so log(-q) == log(q).
[[nodiscard]] TangentVector quat_log(const Quaternion& q);

/// q ⊞ δ = q ⊗ exp(δ/2). The tangent vector is the full rotation vector.
[[nodiscard]] Quaternion boxplus(const Quaternion& q, const TangentVector& delta);

/// q1 ⊟ q2 = 2 log(q2* ⊗ q1), inverse of boxplus for |δ| < π.
[[nodiscard]] TangentVector boxminus(const Quaternion& q1, const Quaternion& q2);

/// Homogeneous (quadratic, unnormalized) rotation matrix Q of a quaternion.
/// For unit q this is the rotation matrix; in general Q = |q|² R.
[[nodiscard]] Mat3 quat_to_homogeneous_matrix(const Quaternion& q);

/// R̂ = Q / |q|². Valid rotation for any nonzero input. Throws below |q| = 1e-9.
[[nodiscard]] Mat3 quat_to_rotmat_normalized(const Quaternion& q);

/// Rotation matrix to unit quaternion with w >= 0.
[[nodiscard]] Quaternion rotmat_to_quat(const Mat3& R);

/// Rotates a vector by a unit quaternion, q v q*.
[[nodiscard]] Vec3 rotate(const Quaternion& q, const Vec3& v);

/// Left and right multiplication matrices: p ⊗ q = left(p) q = right(q) p.
[[nodiscard]] Eigen::Matrix4d quat_left_matrix(const Quaternion& p);
[[nodiscard]] Eigen::Matrix4d quat_right_matrix(const Quaternion& q);

/// Rotation angle between two unit quaternions, in [0, π].
[[nodiscard]] double angle_between(const Quaternion& a, const Quaternion& b);

}  // namespace quadlearn
