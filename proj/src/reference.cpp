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

#include "quadlearn/reference.hpp"

#include <cmath>
#include <numbers>

namespace quadlearn {

namespace {

// c · sin(k ω t + φ) on one axis
struct Harmonic {
    int axis;
    double coeff;
    int k;
    double phase;
};

constexpr double kQuarter = std::numbers::pi / 2.0;

std::vector<Harmonic> harmonics(TrajectoryId id, const Vec3& A) {
    switch (id) {
        case TrajectoryId::Hover: return {};
        case TrajectoryId::Ellipse: return {{0, A.x(), 1, 0.0}, {1, A.y(), 1, kQuarter}};
        case TrajectoryId::WarpedEllipse:
            return {{0, A.x(), 1, 0.0}, {1, A.y(), 1, kQuarter}, {2, A.z(), 2, 0.0}};
        case TrajectoryId::Lemniscate: return {{0, A.x(), 1, 0.0}, {1, 0.5 * A.y(), 2, 0.0}};
        case TrajectoryId::ExtendedLemniscate:
            return {{0, 1.5 * A.x(), 1, 0.0}, {1, 0.5 * A.y(), 2, 0.0}, {2, A.z(), 1, 0.0}};
        case TrajectoryId::Parabola:
            // z = A_z sin²(ωt)
            return {{0, A.x(), 1, 0.0}, {2, -0.5 * A.z(), 2, kQuarter}};
        case TrajectoryId::TransposedParabola:
            return {{1, A.y(), 1, 0.0}, {0, -0.5 * A.x(), 2, kQuarter}};
    }
    return {};
}

Vec3 offset(TrajectoryId id, const Vec3& A) {
    if (id == TrajectoryId::Parabola) return {0.0, 0.0, 0.5 * A.z()};
    if (id == TrajectoryId::TransposedParabola) return {0.5 * A.x(), 0.0, 0.0};
    return Vec3::Zero();
}

}  // namespace

std::string to_string(TrajectoryId id) {
    switch (id) {
        case TrajectoryId::Hover: return "hover";
        case TrajectoryId::Ellipse: return "ellipse";
        case TrajectoryId::WarpedEllipse: return "warped_ellipse";
        case TrajectoryId::Lemniscate: return "lemniscate";
        case TrajectoryId::ExtendedLemniscate: return "extended_lemniscate";
        case TrajectoryId::Parabola: return "parabola";
        case TrajectoryId::TransposedParabola: return "transposed_parabola";
    }
    return "unknown";
}

const std::vector<TrajectoryId>& all_trajectories() {
    static const std::vector<TrajectoryId> ids{TrajectoryId::Hover,      TrajectoryId::Ellipse,
                                               TrajectoryId::WarpedEllipse, TrajectoryId::Lemniscate,
                                               TrajectoryId::ExtendedLemniscate, TrajectoryId::Parabola,
                                               TrajectoryId::TransposedParabola};
    return ids;
}

TrajectoryId parse_trajectory(std::string_view name) {
    for (const auto id : all_trajectories()) {
        if (to_string(id) == name) return id;
    }
    throw ConfigError("unknown trajectory '" + std::string(name) + "'");
}

void TrajectoryParams::validate() const {
    if (!center.allFinite() || !amplitude.allFinite()) throw ConfigError("trajectory center/amplitude must be finite");
    if (!(period > 0.0)) throw ConfigError("trajectory period must be positive");
}

FlatOutput reference_trajectory(TrajectoryId id, const TrajectoryParams& params, double t) {
    if (!(t >= 0.0)) throw ConfigError("reference time must be non-negative");
    const double omega = 2.0 * std::numbers::pi / params.period;
    FlatOutput out;
    out.p = params.center + offset(id, params.amplitude);
    for (const auto& h : harmonics(id, params.amplitude)) {
        const double rate = h.k * omega;
        const double arg = rate * t + h.phase;
        // d^n/dt^n sin(rate t + φ) = rate^n sin(rate t + φ + nπ/2)
        out.p(h.axis) += h.coeff * std::sin(arg);
        out.v(h.axis) += h.coeff * rate * std::cos(arg);
        out.a(h.axis) -= h.coeff * rate * rate * std::sin(arg);
        out.j(h.axis) -= h.coeff * rate * rate * rate * std::cos(arg);
    }
    return out;
}

FlatReference flat_reference(const FlatOutput& flat, const RigidBodyParams& body) {
    const Vec3 thrust = body.mass * (flat.a + Vec3(0.0, 0.0, body.gravity));
    const double f = thrust.norm();
    Vec3 zb = f > 1e-9 ? Vec3(thrust / f) : Vec3::UnitZ();
    const Vec3 xc(std::cos(flat.yaw), std::sin(flat.yaw), 0.0);
    Vec3 yb = zb.cross(xc);
    if (yb.norm() < 1e-9) yb = Vec3::UnitY();
    yb.normalize();
    const Vec3 xb = yb.cross(zb);
    Mat3 R;
    R << xb, yb, zb;

    FlatReference ref;
    ref.x.p = flat.p;
    ref.x.v = flat.v;
    ref.x.q = canonicalize(rotmat_to_quat(R));
    ref.x.w = Vec3::Zero();
    ref.u = Control::Constant(f / 4.0);
    return ref;
}

ReferenceWindow reference_window(TrajectoryId id, const TrajectoryParams& params, const RigidBodyParams& body,
                                 double t0, double dt, int horizon) {
    ReferenceWindow w;
    w.states.reserve(static_cast<std::size_t>(horizon) + 1);
    w.controls.reserve(static_cast<std::size_t>(horizon));
    for (int k = 0; k <= horizon; ++k) {
        const FlatReference r = flat_reference(reference_trajectory(id, params, t0 + k * dt), body);
        w.states.push_back(r.x);
        if (k < horizon) w.controls.push_back(r.u);
    }
    return w;
}

}  // namespace quadlearn
