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

#include "quadlearn/simulator.hpp"

#include <cmath>
#include <numbers>

namespace quadlearn {

namespace {
constexpr int kPacked = kStateDim + 6;
using Packed = Eigen::Matrix<double, kPacked, 1>;
constexpr double kSlackTolerance = 1e-3;

Packed pack(const SimState& s) {
    Packed x;
    x.head<kStateDim>() = s.body.to_vector();
    x.segment<3>(kStateDim) = s.payload_pos;
    x.segment<3>(kStateDim + 3) = s.payload_vel;
    return x;
}

void unpack(const Packed& x, SimState& s) {
    StateVector b = x.head<kStateDim>();
    b.segment<4>(6).normalize();
    s.body = State::from_vector(b);
    s.payload_pos = x.segment<3>(kStateDim);
    s.payload_vel = x.segment<3>(kStateDim + 3);
}
}  // namespace

struct Simulator::Derivative {
    Packed dx;
    double tension;
};

std::string to_string(PerturbationKind kind) {
    switch (kind) {
        case PerturbationKind::None: return "none";
        case PerturbationKind::Payload: return "payload";
        case PerturbationKind::MixedPropellers: return "mixed_propellers";
        case PerturbationKind::Wind: return "wind";
    }
    return "unknown";
}

PerturbationKind parse_perturbation(std::string_view name) {
    for (const auto k : {PerturbationKind::None, PerturbationKind::Payload, PerturbationKind::MixedPropellers,
                         PerturbationKind::Wind}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown perturbation '" + std::string(name) +
                      "' (expected none, payload, mixed_propellers or wind)");
}

void Perturbation::validate() const {
    switch (kind) {
        case PerturbationKind::None: break;
        case PerturbationKind::Payload:
            if (!(payload.mass > 0.0) || !(payload.cable_length > 0.0)) {
                throw ConfigError("payload mass and cable length must be positive");
            }
            if (!(payload.baumgarte >= 0.0)) throw ConfigError("payload.baumgarte must be non-negative");
            break;
        case PerturbationKind::MixedPropellers:
            if (!((propellers.efficiency.array() > 0.0).all()) || !propellers.efficiency.allFinite()) {
                throw ConfigError("propeller efficiency factors must be positive");
            }
            break;
        case PerturbationKind::Wind:
            if (!(wind.speed >= 0.0) || !(wind.gust_std >= 0.0) || !(wind.gust_time_constant > 0.0) ||
                !(wind.drag_coeff >= 0.0)) {
                throw ConfigError("wind speed, gust std and drag must be non-negative, time constant positive");
            }
            if (!(wind.direction.norm() > 0.0)) throw ConfigError("wind direction must be non-zero");
            break;
    }
}

Simulator::Simulator(RigidBodyParams body, Perturbation perturbation, std::uint64_t seed, SimulatorOptions opt)
    : body_(std::move(body)), pert_(std::move(perturbation)), opt_(opt), rng_(seed) {
    body_.validate();
    pert_.validate();
    if (!(opt_.substep > 0.0)) throw ConfigError("simulator substep must be positive");
    reset(hover_state());
}

void Simulator::reset(const State& x) {
    state_ = {};
    state_.body = x;
    state_.payload_pos = x.p - Vec3(0.0, 0.0, pert_.payload.cable_length);
    state_.payload_vel = x.v;
    state_.cable_taut = true;
}

Control Simulator::effective_control(const Control& u) const {
    if (pert_.kind == PerturbationKind::MixedPropellers) return u.cwiseProduct(pert_.propellers.efficiency);
    return u;
}

Simulator::Derivative Simulator::derivative(const SimState& s, const Control& ue) const {
    const Vec3 thrust = rotate(s.body.q, Vec3::UnitZ()) * (body_.mixer().row(0).dot(ue));
    Vec3 drag = Vec3::Zero();
    if (pert_.kind == PerturbationKind::Wind) {
        const Vec3 air = pert_.wind.speed * pert_.wind.direction.normalized() + s.gust;
        const Vec3 rel = air - s.body.v;
        drag = pert_.wind.drag_coeff * rel.norm() * rel;
    }

    ExternalWrench ext;
    ext.force = drag;
    Derivative out;
    out.tension = 0.0;
    if (pert_.kind == PerturbationKind::Payload) {
        const double mp = pert_.payload.mass;
        const Vec3 d = s.payload_pos - s.body.p;
        const Vec3 dd = s.payload_vel - s.body.v;
        const double len = d.norm();
        const double L = pert_.payload.cable_length;
        if (s.cable_taut && len > 0.0) {
            const double k = pert_.payload.baumgarte;
            const double c = 0.5 * (len * len - L * L);
            const double cdot = d.dot(dd);
            const double mu = 1.0 / mp + 1.0 / body_.mass;
            const double t = (dd.squaredNorm() - d.dot(thrust + drag) / body_.mass + 2.0 * k * cdot + k * k * c) /
                             (len * mu);
            out.tension = std::max(t, 0.0);
        }
        const Vec3 e = len > 0.0 ? Vec3(d / len) : Vec3(-Vec3::UnitZ());
        ext.force += out.tension * e;
        out.dx.segment<3>(kStateDim) = s.payload_vel;
        out.dx.segment<3>(kStateDim + 3) = -body_.gravity * Vec3::UnitZ() - (out.tension / mp) * e;
    } else {
        out.dx.segment<3>(kStateDim) = s.payload_vel;
        out.dx.segment<3>(kStateDim + 3).setZero();
    }
    out.dx.head<kStateDim>() = rigid_body_derivative<double>(body_, s.body.to_vector(), ue, ext);
    return out;
}

double Simulator::cable_tension(const SimState& s, const Control& u) const {
    return derivative(s, effective_control(u)).tension;
}

void Simulator::apply_cable_impulse() {
    const Vec3 d = state_.payload_pos - state_.body.p;
    const double len = d.norm();
    const double L = pert_.payload.cable_length;
    if (len < L - kSlackTolerance || len == 0.0) {
        state_.cable_taut = false;
        return;
    }
    if (state_.cable_taut) return;
    const Vec3 e = d / len;
    const double separating = e.dot(state_.payload_vel - state_.body.v);
    if (separating > 0.0) {
        // perfectly inelastic jerk of the cable, momentum preserving
        const double j = separating / (1.0 / pert_.payload.mass + 1.0 / body_.mass);
        state_.payload_vel -= (j / pert_.payload.mass) * e;
        state_.body.v += (j / body_.mass) * e;
    }
    state_.cable_taut = true;
}

void Simulator::substep(const Control& ue, double h) {
    if (pert_.kind == PerturbationKind::Payload) {
        apply_cable_impulse();
        if (state_.cable_taut && derivative(state_, ue).tension <= 0.0) {
            const Vec3 d = state_.payload_pos - state_.body.p;
            if (d.norm() < pert_.payload.cable_length) state_.cable_taut = false;
        }
    }
    if (pert_.kind == PerturbationKind::None || pert_.kind == PerturbationKind::MixedPropellers) {
        state_.body = analytic_step(body_, state_.body, ue, h);
        return;
    }
    const Packed x = pack(state_);
    auto eval = [&](const Packed& y) {
        SimState s = state_;
        s.body = State::from_vector(y.head<kStateDim>());
        s.payload_pos = y.segment<3>(kStateDim);
        s.payload_vel = y.segment<3>(kStateDim + 3);
        return derivative(s, ue).dx;
    };
    const Packed k1 = eval(x);
    const Packed k2 = eval(x + 0.5 * h * k1);
    const Packed k3 = eval(x + 0.5 * h * k2);
    const Packed k4 = eval(x + h * k3);
    unpack(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), state_);
}

const State& Simulator::step(const Control& u, double dt) {
    if (pert_.kind == PerturbationKind::Wind && pert_.wind.gust_std > 0.0) {
        const double decay = std::exp(-dt / pert_.wind.gust_time_constant);
        const double spread = pert_.wind.gust_std * std::sqrt(1.0 - decay * decay);
        for (int i = 0; i < 3; ++i) state_.gust(i) = decay * state_.gust(i) + spread * normal_(rng_);
    }
    const Control ue = effective_control(u);
    const int n = std::max(1, static_cast<int>(std::lround(dt / opt_.substep)));
    const double h = dt / n;
    for (int i = 0; i < n; ++i) substep(ue, h);
    return state_.body;
}

double Simulator::total_energy() const {
    double e = mechanical_energy(body_, state_.body);
    if (pert_.kind == PerturbationKind::Payload) {
        e += 0.5 * pert_.payload.mass * state_.payload_vel.squaredNorm() +
             pert_.payload.mass * body_.gravity * state_.payload_pos.z();
    }
    return e;
}

bool outside_envelope(const State& x) {
    if (!x.is_finite()) return true;
    if (x.p.norm() > 10.0) return true;
    const double n2 = x.q.squared_norm();
    const double cos_tilt = 1.0 - 2.0 * (x.q.x * x.q.x + x.q.y * x.q.y) / n2;
    return cos_tilt < std::cos(80.0 * std::numbers::pi / 180.0);
}

}  // namespace quadlearn
