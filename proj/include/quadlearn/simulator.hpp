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

#include <random>
#include <string>
#include <string_view>

#include "quadlearn/rigid_body.hpp"
#include "quadlearn/state.hpp"

namespace quadlearn {

enum class PerturbationKind { None, Payload, MixedPropellers, Wind };

[[nodiscard]] std::string to_string(PerturbationKind kind);
[[nodiscard]] PerturbationKind parse_perturbation(std::string_view name);

/// Point mass hanging from the body's center of mass on an inextensible massless cable.
struct PayloadParams {
    double mass{0.075};
    double cable_length{0.8};
    double baumgarte{20.0};  ///< constraint stabilization rate, 1/s
};

struct MixedPropellerParams {
    Control efficiency{Control::Ones()};
};

/// Drag c_d·|v_air − v|·(v_air − v) with v_air = mean + Ornstein–Uhlenbeck gust.
struct WindParams {
    double speed{3.0};
    Vec3 direction{Vec3::UnitX()};
    double gust_std{0.5};
    double gust_time_constant{1.0};
    double drag_coeff{0.02};
};

struct Perturbation {
    PerturbationKind kind{PerturbationKind::None};
    PayloadParams payload{};
    MixedPropellerParams propellers{};
    WindParams wind{};

    void validate() const;
};

/// Everything the truth model integrates; the learner only ever sees `body`.
struct SimState {
    State body;
    Vec3 payload_pos{Vec3::Zero()};
    Vec3 payload_vel{Vec3::Zero()};
    Vec3 gust{Vec3::Zero()};
    bool cable_taut{true};
};

struct SimulatorOptions {
    double substep{1e-3};  ///< physics step, s
};

/**
 * Ground-truth plant: rigid body plus the active perturbation, integrated
 * with RK4 at the physics rate under a zero-order-hold control.
 */
class Simulator {
public:
    Simulator(RigidBodyParams body, Perturbation perturbation, std::uint64_t seed, SimulatorOptions opt = {});

    /// Places the body at x with the payload hanging straight below it at rest relative to the body.
    void reset(const State& x);

    /// Advances by dt; returns the body state.
    const State& step(const Control& u, double dt);

    [[nodiscard]] const SimState& state() const { return state_; }
    [[nodiscard]] const RigidBodyParams& body() const { return body_; }
    [[nodiscard]] const Perturbation& perturbation() const { return pert_; }

    /// Rotor forces after the propeller efficiency factors.
    [[nodiscard]] Control effective_control(const Control& u) const;

    /// Cable tension for the given state and rotor forces (0 when slack).
    [[nodiscard]] double cable_tension(const SimState& s, const Control& u) const;

    /// Kinetic plus potential energy of body and payload.
    [[nodiscard]] double total_energy() const;

private:
    struct Derivative;
    [[nodiscard]] Derivative derivative(const SimState& s, const Control& u) const;
    void substep(const Control& u, double h);
    void apply_cable_impulse();

    RigidBodyParams body_;
    Perturbation pert_;
    SimulatorOptions opt_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    SimState state_;
};

/// Crash envelope: |p| > 10 m, tilt > 80° or a non-finite state.
[[nodiscard]] bool outside_envelope(const State& x);

}  // namespace quadlearn
