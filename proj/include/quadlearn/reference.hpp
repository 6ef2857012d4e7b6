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

#include <string>
#include <string_view>
#include <vector>

#include "quadlearn/rigid_body.hpp"
#include "quadlearn/state.hpp"

namespace quadlearn {

enum class TrajectoryId {
    Hover,
    Ellipse,
    WarpedEllipse,
    Lemniscate,
    ExtendedLemniscate,
    Parabola,
    TransposedParabola,
};

[[nodiscard]] std::string to_string(TrajectoryId id);
/// Accepts snake_case names, e.g. "warped_ellipse". Throws ConfigError otherwise.
[[nodiscard]] TrajectoryId parse_trajectory(std::string_view name);
[[nodiscard]] const std::vector<TrajectoryId>& all_trajectories();

struct TrajectoryParams {
    Vec3 center{0.0, 0.0, 1.0};
    Vec3 amplitude{1.0, 0.6, 0.2};  ///< per-axis size, m
    double period{8.0};             ///< s

    void validate() const;
};

/// Position and its first three time derivatives.
struct FlatOutput {
    Vec3 p{Vec3::Zero()};
    Vec3 v{Vec3::Zero()};
    Vec3 a{Vec3::Zero()};
    Vec3 j{Vec3::Zero()};
    double yaw{0.0};
};

/// Closed-form curve with analytic derivatives. Throws ConfigError for t < 0.
[[nodiscard]] FlatOutput reference_trajectory(TrajectoryId id, const TrajectoryParams& params, double t);

/// Desired state and per-rotor control from the flat outputs: attitude from the
/// thrust direction with zero yaw, zero body rates, equal rotor forces.
struct FlatReference {
    State x;
    Control u{Control::Zero()};
};

[[nodiscard]] FlatReference flat_reference(const FlatOutput& flat, const RigidBodyParams& body);

/// Horizon window sampled at t0, t0 + dt, ...: horizon + 1 states and horizon controls.
struct ReferenceWindow {
    std::vector<State> states;
    std::vector<Control> controls;
};

[[nodiscard]] ReferenceWindow reference_window(TrajectoryId id, const TrajectoryParams& params,
                                               const RigidBodyParams& body, double t0, double dt, int horizon);

}  // namespace quadlearn
