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

#include "quadlearn/controller.hpp"

#include <chrono>

namespace quadlearn {

std::string to_string(ControllerMode mode) {
    switch (mode) {
        case ControllerMode::Nominal: return "nominal";
        case ControllerMode::Static: return "static";
        case ControllerMode::StaticUA: return "static-ua";
        case ControllerMode::StaticOL: return "static-ol";
        case ControllerMode::Adaptive: return "adaptive";
    }
    return "unknown";
}

ControllerMode parse_controller_mode(std::string_view name) {
    for (const auto m : {ControllerMode::Nominal, ControllerMode::Static, ControllerMode::StaticUA,
                         ControllerMode::StaticOL, ControllerMode::Adaptive}) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown controller mode '" + std::string(name) +
                      "' (expected nominal, static, static-ua, static-ol or adaptive)");
}

bool uses_network(ControllerMode mode) { return mode != ControllerMode::Nominal; }

bool uses_uncertainty(ControllerMode mode) {
    return mode == ControllerMode::StaticUA || mode == ControllerMode::Adaptive;
}

bool uses_online_learning(ControllerMode mode) {
    return mode == ControllerMode::StaticOL || mode == ControllerMode::Adaptive;
}

void ControllerConfig::validate() const {
    if (horizon < 1) throw ConfigError("controller.horizon must be at least 1");
    if (!((Qx.array() > 0.0).all()) || !((Qu.array() > 0.0).all())) throw ConfigError("controller weights must be positive");
    if (!(lm_lambda >= 0.0)) throw ConfigError("controller.lm_lambda must be non-negative");
    if (!((u_min.array() <= u_max.array()).all())) throw ConfigError("controller.u_min exceeds u_max");
    if (!(network.dt > 0.0)) throw ConfigError("network.dt must be positive");
    if (window == 0) throw ConfigError("online.window must be positive");
    if (!(online_lr >= 0.0)) throw ConfigError("online.lr must be non-negative");
    if (!(weighting.sigma_min > 0.0 && weighting.sigma_min <= weighting.sigma_max)) {
        throw ConfigError("uncertainty sigma clamp range is invalid");
    }
    if (!is_symmetric_psd(initial_cov)) throw ConfigError("uncertainty.initial_cov must be symmetric PSD");
    nominal_body.validate();
}

Controller::Controller(ControllerConfig cfg, const MlpParams* params)
    : cfg_(std::move(cfg)), cov_(cfg_.initial_cov), window_(cfg_.window) {
    cfg_.validate();
    if (uses_network(cfg_.mode)) {
        if (params == nullptr) throw ConfigError("mode " + to_string(cfg_.mode) + " needs trained network parameters");
        params->validate();
        params_ = *params;
    } else {
        nominal_.emplace(cfg_.nominal_body, cfg_.network.dt);
    }
}

void Controller::reset() {
    warm_ = {};
    cov_ = cfg_.initial_cov;
    window_.clear();
    last_x_.reset();
    last_u_.setZero();
}

double Controller::model_forward_error(const Transition& tr) const {
    if (uses_network(cfg_.mode)) {
        return forward_error_value(params_, tr, {cfg_.network, cfg_.quat_loss});
    }
    const State pred = nominal_->step(tr.x_prev, tr.u_prev);
    Quaternion q = pred.q;
    if (q.w * tr.x_next.q.w + q.vec().dot(tr.x_next.q.vec()) < 0.0) q = -q;
    return (pred.v - tr.x_next.v).squaredNorm() + (pred.w - tr.x_next.w).squaredNorm() +
           (q.vec() - tr.x_next.q.vec()).squaredNorm();
}

Control Controller::control_step(const State& x_hat, double t, const std::vector<State>& x_ref,
                                 const std::vector<Control>& u_ref, ControlDiagnostics* diag) {
    const auto start = std::chrono::steady_clock::now();
    ControlDiagnostics d;

    if (last_x_) {
        const Transition tr{*last_x_, last_u_, x_hat, t};
        if (tr.is_finite()) {
            d.forward_error = model_forward_error(tr);
            d.has_forward_error = true;
        }
        if (uses_online_learning(cfg_.mode) && window_.push(tr) && window_.full()) {
            params_ = online_step(params_, window_, cfg_.online_lr, {cfg_.network, cfg_.quat_loss});
            d.updated = true;
        }
    }

    NeuralDynamics network(params_, cfg_.network);
    const DynamicsModel& model = uses_network(cfg_.mode) ? static_cast<const DynamicsModel&>(network) : *nominal_;

    OcpProblem problem;
    problem.horizon = cfg_.horizon;
    problem.Qx = cfg_.Qx;
    problem.Qu = cfg_.Qu;
    problem.x_ref = x_ref;
    problem.u_ref = u_ref;
    problem.u_min = cfg_.u_min;
    problem.u_max = cfg_.u_max;
    problem.lm_lambda = cfg_.lm_lambda;
    problem.hover = Control::Constant(cfg_.nominal_body.hover_force());

    if (uses_uncertainty(cfg_.mode)) {
        TangentState sigma;
        if (sigma_override_) {
            sigma = *sigma_override_;
        } else {
            const Control u_plan = warm_.empty() ? problem.hover
                                                 : warm_.controls[std::min<std::size_t>(1, warm_.controls.size() - 1)];
            const TangentCov prior = cfg_.sigma_mode == SigmaMode::Recursive ? cov_ : cfg_.initial_cov;
            const SigmaEnsemble ens = generate_sigma_points({x_hat, prior}, cfg_.unscented);
            cov_ = reconstruct_moments(propagate(model, ens, u_plan, cfg_.ut_execution)).cov;
            sigma = cov_.diagonal();
        }
        d.sigma_diag = sigma;
        problem.Qx = apply_uncertainty_weighting(cfg_.Qx, sigma, cfg_.weighting);
    }
    d.weights = problem.Qx;

    warm_ = solve_rti(problem, model, x_hat, warm_.empty() ? nullptr : &warm_);
    const Control u = warm_.controls.front();

    last_x_ = x_hat;
    last_u_ = u;

    d.kkt_residual = warm_.kkt_residual;
    d.qp_iterations = warm_.qp_iterations;
    d.predicted_cost = warm_.total_cost();
    d.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (diag != nullptr) *diag = d;
    return u;
}

}  // namespace quadlearn
