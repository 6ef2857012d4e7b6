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

#include "quadlearn/state.hpp"

namespace quadlearn {

StateVector State::to_vector() const {
    StateVector x;
    x << p, v, q.w, q.x, q.y, q.z, w;
    return x;
}

State State::from_vector(const StateVector& x) {
    State s;
    s.p = x.segment<3>(0);
    s.v = x.segment<3>(3);
    s.q = Quaternion{x(6), x(7), x(8), x(9)};
    s.w = x.segment<3>(10);
    return s;
}

bool State::is_finite() const { return p.allFinite() && v.allFinite() && q.is_finite() && w.allFinite(); }

State boxplus(const State& x, const TangentState& delta) {
    State out;
    out.p = x.p + delta.segment<3>(tangent::kPos);
    out.v = x.v + delta.segment<3>(tangent::kVel);
    out.q = boxplus(x.q, Vec3(delta.segment<3>(tangent::kRot)));
    out.w = x.w + delta.segment<3>(tangent::kRate);
    return out;
}

TangentState boxminus(const State& a, const State& b) {
    TangentState d;
    d.segment<3>(tangent::kPos) = a.p - b.p;
    d.segment<3>(tangent::kVel) = a.v - b.v;
    d.segment<3>(tangent::kRot) = boxminus(a.q, b.q);
    d.segment<3>(tangent::kRate) = a.w - b.w;
    return d;
}

State hover_state(const Vec3& position) {
    State s;
    s.p = position;
    return s;
}

}  // namespace quadlearn
