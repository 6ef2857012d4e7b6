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

#include <cmath>

#include "quadlearn/dynamics.hpp"

namespace quadlearn {

namespace {
constexpr double kMinQuatNorm = 1e-6;
const char* const kOutputNames[kNetOutputDim] = {"vx", "vy", "vz", "wx", "wy", "wz", "qw", "qx", "qy", "qz"};
}  // namespace

Eigen::Matrix<double, kNetInputDim, 1> network_input(const State& x, const Control& u) {
    const Quaternion q = canonicalize(x.q);
    Eigen::Matrix<double, kNetInputDim, 1> in;
    in << x.v, x.w, q.w, q.x, q.y, q.z, u;
    return in;
}

Eigen::Matrix<double, kNetOutputDim, 1> network_target(const State& x, const Control& /*u*/, const State& next,
                                                       bool residual) {
    Quaternion qn = canonicalize(next.q);
    Eigen::Matrix<double, kNetOutputDim, 1> y;
    y << next.v, next.w, qn.w, qn.x, qn.y, qn.z;
    if (residual) {
        const Quaternion q = canonicalize(x.q);
        // keep the target on the same hemisphere as the input quaternion
        if (qn.vec().dot(q.vec()) < 0.0) {
            qn = -qn;
            y.segment<4>(6) = qn.vec();
        }
        y.segment<3>(0) -= x.v;
        y.segment<3>(3) -= x.w;
        y.segment<4>(6) -= q.vec();
    }
    return y;
}

State assemble_prediction(const State& x, const VectorXd& output, const NeuralDynamicsOptions& opt) {
    if (output.size() != kNetOutputDim) throw DynamicsError("network output must have 10 entries");
    for (int i = 0; i < kNetOutputDim; ++i) {
        if (!std::isfinite(output(i))) {
            throw DynamicsError(std::string("non-finite network output '") + kOutputNames[i] + "'", i);
        }
    }
    Eigen::Matrix<double, kNetOutputDim, 1> y = output;
    if (opt.residual) {
        const Quaternion q = canonicalize(x.q);
        y.segment<3>(0) += x.v;
        y.segment<3>(3) += x.w;
        y.segment<4>(6) += q.vec();
    }
    const Quaternion q_raw = Quaternion::from_vec(y.segment<4>(6));
    const double n = q_raw.norm();
    if (n < kMinQuatNorm) {
        throw DynamicsError("degenerate predicted quaternion (norm " + std::to_string(n) + ")", 6);
    }
    State next;
    next.p = x.p + x.v * opt.dt;
    next.v = y.segment<3>(0);
    next.w = y.segment<3>(3);
    next.q = canonicalize(normalize(q_raw));
    return next;
}

State predict(const MlpParams& params, const State& x, const Control& u, const NeuralDynamicsOptions& opt) {
    const ForwardResult r = forward(params, network_input(x, u));
    return assemble_prediction(x, r.output, opt);
}

Eigen::Matrix<double, 3, 4> normalized_quat_tangent_jacobian(const Quaternion& q_raw) {
    const double n = q_raw.norm();
    const Vec4 unit = q_raw.vec() / n;
    const Eigen::Matrix4d dnorm = (Eigen::Matrix4d::Identity() - unit * unit.transpose()) / n;
    const Eigen::Matrix4d left_conj = quat_left_matrix(Quaternion::from_vec(unit).conjugate());
    return 2.0 * left_conj.bottomRows<3>() * dnorm;
}

Eigen::Matrix<double, 4, 3> boxplus_jacobian(const Quaternion& q) {
    return 0.5 * quat_left_matrix(q).rightCols<3>();
}

Linearization predict_jacobian(const MlpParams& params, const State& x, const Control& u,
                               const NeuralDynamicsOptions& opt) {
    const ForwardResult r = forward(params, network_input(x, u));
    Linearization lin;
    lin.next = assemble_prediction(x, r.output, opt);

    Eigen::Matrix<double, kNetOutputDim, kNetInputDim> J = input_jacobian(params, r.cache);
    if (opt.residual) {
        J.block<3, 3>(0, 0) += Mat3::Identity();
        J.block<3, 3>(3, 3) += Mat3::Identity();
        J.block<4, 4>(6, 6) += Eigen::Matrix4d::Identity();
    }

    // network input w.r.t. input tangent; the sign flip used for the network
    // input commutes with the perturbation
    const Quaternion q_in = canonicalize(x.q);
    const Eigen::Matrix<double, 4, 3> dq_in = boxplus_jacobian(q_in);

    Eigen::Matrix<double, kNetOutputDim, kTangentDim> dy_dx = Eigen::Matrix<double, kNetOutputDim, kTangentDim>::Zero();
    dy_dx.middleCols<3>(tangent::kVel) = J.middleCols<3>(0);
    dy_dx.middleCols<3>(tangent::kRate) = J.middleCols<3>(3);
    dy_dx.middleCols<3>(tangent::kRot) = J.middleCols<4>(6) * dq_in;
    const Eigen::Matrix<double, kNetOutputDim, kControlDim> dy_du = J.rightCols<4>();

    Eigen::Matrix<double, kNetOutputDim, 1> y = r.output;
    if (opt.residual) y.segment<4>(6) += q_in.vec();
    const Eigen::Matrix<double, 3, 4> dtheta = normalized_quat_tangent_jacobian(Quaternion::from_vec(y.segment<4>(6)));

    lin.A.setZero();
    lin.A.block<3, 3>(tangent::kPos, tangent::kPos) = Mat3::Identity();
    lin.A.block<3, 3>(tangent::kPos, tangent::kVel) = opt.dt * Mat3::Identity();
    lin.A.middleRows<3>(tangent::kVel) = dy_dx.middleRows<3>(0);
    lin.A.middleRows<3>(tangent::kRate) = dy_dx.middleRows<3>(3);
    lin.A.middleRows<3>(tangent::kRot) = dtheta * dy_dx.middleRows<4>(6);

    lin.B.setZero();
    lin.B.middleRows<3>(tangent::kVel) = dy_du.middleRows<3>(0);
    lin.B.middleRows<3>(tangent::kRate) = dy_du.middleRows<3>(3);
    lin.B.middleRows<3>(tangent::kRot) = dtheta * dy_du.middleRows<4>(6);
    return lin;
}

}  // namespace quadlearn
