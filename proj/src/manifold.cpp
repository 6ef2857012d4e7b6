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

#include "quadlearn/manifold.hpp"

#include <cmath>

namespace quadlearn {

namespace {
constexpr double kSmallAngle = 1e-6;
}

double Quaternion::norm() const { return std::sqrt(squared_norm()); }

Quaternion Quaternion::inverse() const {
    const double n2 = squared_norm();
    if (n2 == 0.0) {
        throw ManifoldError("inverse of zero quaternion");
    }
    return {w / n2, -x / n2, -y / n2, -z / n2};
}

bool Quaternion::is_finite() const {
    return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

Quaternion quat_mul(const Quaternion& p, const Quaternion& q) {
    return {
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    };
}

Quaternion normalize(const Quaternion& q) {
    const double n = q.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw ManifoldError("cannot normalize quaternion with norm " + std::to_string(n));
    }
    return {q.w / n, q.x / n, q.y / n, q.z / n};
}

Quaternion canonicalize(const Quaternion& q) { return q.w < 0.0 ? -q : q; }

Quaternion quat_exp(const TangentVector& v) {
    const double theta = v.norm();
    // sin(θ)/θ; the series is exact to double precision below 1e-6
    const double sinc = theta < kSmallAngle ? 1.0 - theta * theta / 6.0 : std::sin(theta) / theta;
    return {std::cos(theta), sinc * v.x(), sinc * v.y(), sinc * v.z()};
}

TangentVector quat_log(const Quaternion& q) {
    const double n = q.norm();
    if (!(n > 0.0)) {
        throw ManifoldError("logarithm of zero quaternion");
    }
    const Quaternion u = canonicalize(Quaternion{q.w / n, q.x / n, q.y / n, q.z / n});
    const Vec3 im = u.imag();
    const double s = im.norm();
    const double theta = std::atan2(s, u.w);
    if (s < kSmallAngle) {
        // θ = atan(s/w) ≈ (s/w)(1 - (s/w)²/3)
        const double t = s / u.w;
        return (1.0 - t * t / 3.0) / u.w * im;
    }
    return (theta / s) * im;
}

Quaternion boxplus(const Quaternion& q, const TangentVector& delta) { return quat_mul(q, quat_exp(0.5 * delta)); }

TangentVector boxminus(const Quaternion& q1, const Quaternion& q2) {
    return 2.0 * quat_log(quat_mul(q2.conjugate(), q1));
}

Mat3 quat_to_homogeneous_matrix(const Quaternion& q) {
    const double ww = q.w * q.w, xx = q.x * q.x, yy = q.y * q.y, zz = q.z * q.z;
    const double wx = q.w * q.x, wy = q.w * q.y, wz = q.w * q.z;
    const double xy = q.x * q.y, xz = q.x * q.z, yz = q.y * q.z;
    Mat3 Q;
    Q << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
        2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
        2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
    return Q;
}

Mat3 quat_to_rotmat_normalized(const Quaternion& q) {
    const double n2 = q.squared_norm();
    if (!(n2 >= 1e-18)) {
        throw ManifoldError("quaternion norm below 1e-9 cannot be mapped to a rotation");
    }
    return quat_to_homogeneous_matrix(q) / n2;
}

Quaternion rotmat_to_quat(const Mat3& R) {
    // Shepperd's method: pick the largest diagonal term for stability.
    const double tr = R.trace();
    Quaternion q;
    if (tr > R(0, 0) && tr > R(1, 1) && tr > R(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + tr);
        q = {0.25 * s, (R(2, 1) - R(1, 2)) / s, (R(0, 2) - R(2, 0)) / s, (R(1, 0) - R(0, 1)) / s};
    } else if (R(0, 0) > R(1, 1) && R(0, 0) > R(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2));
        q = {(R(2, 1) - R(1, 2)) / s, 0.25 * s, (R(0, 1) + R(1, 0)) / s, (R(0, 2) + R(2, 0)) / s};
    } else if (R(1, 1) > R(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2));
        q = {(R(0, 2) - R(2, 0)) / s, (R(0, 1) + R(1, 0)) / s, 0.25 * s, (R(1, 2) + R(2, 1)) / s};
    } else {
        const double s = 2.0 * std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1));
        q = {(R(1, 0) - R(0, 1)) / s, (R(0, 2) + R(2, 0)) / s, (R(1, 2) + R(2, 1)) / s, 0.25 * s};
    }
    return canonicalize(normalize(q));
}

Vec3 rotate(const Quaternion& q, const Vec3& v) {
    const Quaternion r = quat_mul(quat_mul(q, Quaternion{0.0, v.x(), v.y(), v.z()}), q.conjugate());
    return r.imag();
}

Eigen::Matrix4d quat_left_matrix(const Quaternion& p) {
    Eigen::Matrix4d L;
    L << p.w, -p.x, -p.y, -p.z,
        p.x, p.w, -p.z, p.y,
        p.y, p.z, p.w, -p.x,
        p.z, -p.y, p.x, p.w;
    return L;
}

Eigen::Matrix4d quat_right_matrix(const Quaternion& q) {
    Eigen::Matrix4d R;
    R << q.w, -q.x, -q.y, -q.z,
        q.x, q.w, q.z, -q.y,
        q.y, -q.z, q.w, q.x,
        q.z, q.y, -q.x, q.w;
    return R;
}

double angle_between(const Quaternion& a, const Quaternion& b) { return boxminus(a, b).norm(); }

}  // namespace quadlearn
