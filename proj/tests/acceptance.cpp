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

// Acceptance run: one PASS/FAIL line per criterion, each with its runtime budget.
// Usage: acceptance <artifact-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>

#include "quadlearn/config.hpp"
#include "quadlearn/controller.hpp"
#include "quadlearn/episode.hpp"
#include "quadlearn/mpc.hpp"
#include "quadlearn/suite.hpp"
#include "quadlearn/uncertainty.hpp"

using namespace quadlearn;
namespace fs = std::filesystem;

namespace {

// Holdout forward error of the default training run, pinned on the first green run.
constexpr double kPinnedHoldoutLoss = 1.3438e-3;
constexpr double kPinnedTolerance = 0.20;

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Vec3 random_vec(std::mt19937_64& rng, double max_norm) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Vec3 dir = Vec3(n(rng), n(rng), n(rng)).normalized();
    return dir * (max_norm * u(rng));
}

Quaternion random_quat(std::mt19937_64& rng) { return quat_exp(random_vec(rng, 1.5)); }

State random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    State x;
    x.p = Vec3(u(rng), u(rng), u(rng));
    x.v = Vec3(u(rng), u(rng), u(rng));
    x.q = quat_exp(random_vec(rng, 0.4));
    x.w = Vec3(u(rng), u(rng), u(rng));
    return x;
}

Control random_control(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.4, 0.9);
    return {u(rng), u(rng), u(rng), u(rng)};
}

double rel_frobenius(const MatrixXd& a, const MatrixXd& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

// ---------------------------------------------------------------- 1
Outcome manifold_suite() {
    std::mt19937_64 rng(101);
    double exp_log = 0.0, box = 0.0, state_box = 0.0, ortho = 0.0;
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int n = 0; n < 10000; ++n) {
        const Vec3 v = random_vec(rng, 1.5);
        exp_log = std::max(exp_log, (quat_log(quat_exp(v)) - v).norm());

        const Quaternion q = random_quat(rng);
        const Vec3 d = random_vec(rng, 3.0);
        box = std::max(box, (boxminus(boxplus(q, d), q) - d).norm());
        const Quaternion q2 = random_quat(rng);
        box = std::max(box, angle_between(boxplus(q, boxminus(q2, q)), q2));

        const State x = random_state(rng);
        TangentState dx;
        dx << random_vec(rng, 2.0), random_vec(rng, 2.0), random_vec(rng, 3.0), random_vec(rng, 2.0);
        state_box = std::max(state_box, (boxminus(boxplus(x, dx), x) - dx).norm());

        Quaternion s = q;
        const double k = scale(rng);
        s.w *= k;
        s.x *= k;
        s.y *= k;
        s.z *= k;
        const Mat3 R = quat_to_rotmat_normalized(s);
        ortho = std::max(ortho, (R * R.transpose() - Mat3::Identity()).norm());
        ortho = std::max(ortho, std::abs(R.determinant() - 1.0));
    }
    const double worst = std::max({exp_log, box, state_box, ortho});
    return {worst < 1e-10, fmt("10^4 cases, max exp/log %.1e, box %.1e, state box %.1e, orthogonality %.1e", exp_log,
                               box, state_box, ortho)};
}

// ---------------------------------------------------------------- 2
template <typename Step>
std::pair<StateJacobian, ControlJacobian> central_differences(const Step& f, const State& x, const Control& u) {
    const double h = 1e-6;
    const State f0 = f(x, u);
    StateJacobian A;
    ControlJacobian B;
    for (int j = 0; j < kTangentDim; ++j) {
        const TangentState e = TangentState::Unit(j) * h;
        A.col(j) = (boxminus(f(boxplus(x, e), u), f0) - boxminus(f(boxplus(x, -e), u), f0)) / (2 * h);
    }
    for (int j = 0; j < kControlDim; ++j) {
        const Control e = Control::Unit(j) * h;
        B.col(j) = (boxminus(f(x, u + e), f0) - boxminus(f(x, u - e), f0)) / (2 * h);
    }
    return {A, B};
}

MlpParams random_network(std::uint64_t seed) {
    const std::vector<int> sizes{kNetInputDim, 64, 32, 32, kNetOutputDim};
    MlpParams p = MlpParams::initialize(sizes, 1.0, seed);
    std::mt19937_64 rng(seed + 1000);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& l : p.layers) {
        for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = u(rng);
    }
    p.layers.back().bias.segment<4>(6) << 1.0, 0.1, -0.1, 0.05;
    return p;
}

Outcome gradient_suite() {
    std::mt19937_64 rng(202);
    std::normal_distribution<double> n(0.0, 1.0);
    double mlp = 0.0, neural = 0.0, nominal = 0.0;
    const NominalDynamics model(RigidBodyParams{}, 0.05);
    for (int inst = 0; inst < 20; ++inst) {
        MlpParams p = random_network(static_cast<std::uint64_t>(inst));
        VectorXd x(kNetInputDim), w(kNetOutputDim);
        for (auto& v : x) v = n(rng);
        for (auto& v : w) v = n(rng);
        const Gradient g = backward(p, forward(p, x).cache, w);
        for (std::size_t k = 0; k < p.layers.size(); ++k) {
            auto& W = p.layers[k].weight;
            MatrixXd fd(W.rows(), W.cols());
            for (Eigen::Index i = 0; i < W.size(); ++i) {
                const double orig = W.data()[i];
                W.data()[i] = orig + 1e-6;
                const double fp = w.dot(forward(p, x).output);
                W.data()[i] = orig - 1e-6;
                const double fm = w.dot(forward(p, x).output);
                W.data()[i] = orig;
                fd.data()[i] = (fp - fm) / 2e-6;
            }
            mlp = std::max(mlp, rel_frobenius(g.layers[k].weight, fd));
            auto& b = p.layers[k].bias;
            VectorXd fb(b.size());
            for (Eigen::Index i = 0; i < b.size(); ++i) {
                const double orig = b(i);
                b(i) = orig + 1e-6;
                const double fp = w.dot(forward(p, x).output);
                b(i) = orig - 1e-6;
                const double fm = w.dot(forward(p, x).output);
                b(i) = orig;
                fb(i) = (fp - fm) / 2e-6;
            }
            mlp = std::max(mlp, rel_frobenius(g.layers[k].bias, fb));
        }

        const State s = random_state(rng);
        const Control u = random_control(rng);
        for (const bool residual : {false, true}) {
            const NeuralDynamicsOptions opt{0.05, residual};
            const Linearization lin = predict_jacobian(p, s, u, opt);
            const auto [A, B] = central_differences([&](const State& a, const Control& c) { return predict(p, a, c, opt); }, s, u);
            neural = std::max({neural, rel_frobenius(lin.A, A), rel_frobenius(lin.B, B)});
        }
        const Linearization lin = model.linearize(s, u);
        const auto [A, B] = central_differences([&](const State& a, const Control& c) { return model.step(a, c); }, s, u);
        nominal = std::max({nominal, rel_frobenius(lin.A, A), rel_frobenius(lin.B, B)});
    }
    return {mlp < 1e-5 && neural < 1e-4 && nominal < 1e-4,
            fmt("20 instances, backprop rel %.1e (< 1e-5), neural Jacobian %.1e, nominal Jacobian %.1e (< 1e-4)", mlp,
                neural, nominal)};
}

// ---------------------------------------------------------------- 3
TangentCov random_cov(std::mt19937_64& rng, const TangentState& scale) {
    std::normal_distribution<double> n(0.0, 1.0);
    TangentCov M;
    for (int i = 0; i < kTangentDim; ++i) {
        for (int j = 0; j < kTangentDim; ++j) M(i, j) = n(rng);
    }
    const TangentCov C = M * M.transpose() / kTangentDim + 0.1 * TangentCov::Identity();
    return scale.asDiagonal() * C * scale.asDiagonal();
}

Outcome ut_exactness() {
    std::mt19937_64 rng(303);
    const Mat3 A = Mat3::Random(), Bm = Mat3::Random(), C = Mat3::Random(), D = Mat3::Random();
    const Quaternion qc = random_quat(rng);
    const auto f = [&](const State& x) {
        State y;
        y.p = A * x.p + Bm * x.v + Vec3(0.3, -0.1, 0.2);
        y.v = C * x.v;
        y.q = qc * x.q;
        y.w = D * x.w;
        return y;
    };
    TangentCov J = TangentCov::Zero();
    J.block<3, 3>(0, 0) = A;
    J.block<3, 3>(0, 3) = Bm;
    J.block<3, 3>(3, 3) = C;
    J.block<3, 3>(6, 6) = Mat3::Identity();
    J.block<3, 3>(9, 9) = D;
    double affine = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        const TangentGaussian g{random_state(rng), random_cov(rng, TangentState::Constant(0.1))};
        const TangentGaussian r = reconstruct_moments(propagate(f, generate_sigma_points(g)));
        affine = std::max({affine, boxminus(r.mean, f(g.mean)).norm(), rel_frobenius(r.cov, J * g.cov * J.transpose())});
    }

    const NominalDynamics model(RigidBodyParams{}, 0.05);
    TangentState scale;
    scale << Vec3::Constant(0.05), Vec3::Constant(0.2), Vec3::Constant(0.1), Vec3::Constant(0.5);
    const TangentGaussian g{random_state(rng), random_cov(rng, scale)};
    const Control u = Control::Constant(0.65);
    const TangentGaussian ut = reconstruct_moments(propagate(model, generate_sigma_points(g), u));
    const TangentCov L = covariance_sqrt(g.cov);
    const State center = model.step(g.mean, u);
    std::normal_distribution<double> n(0.0, 1.0);
    const int samples = 1000000;
    TangentState sum = TangentState::Zero();
    TangentCov outer = TangentCov::Zero();
    for (int s = 0; s < samples; ++s) {
        TangentState z;
        for (int i = 0; i < kTangentDim; ++i) z(i) = n(rng);
        const TangentState d = boxminus(model.step(boxplus(g.mean, L * z), u), center);
        sum += d;
        outer += d * d.transpose();
    }
    const TangentState mean = sum / samples;
    const TangentCov mc = (outer - samples * mean * mean.transpose()) / (samples - 1);
    const double err = rel_frobenius(ut.cov, mc);
    return {affine < 1e-8 && err < 0.05,
            fmt("affine map max error %.1e (< 1e-8); rigid-body step vs 10^6 Monte-Carlo samples %.2f%% (< 5%%)", affine,
                100.0 * err)};
}

// ---------------------------------------------------------------- 4
class LinearModel final : public DynamicsModel {
public:
    LinearModel(StateJacobian A, ControlJacobian B) : A_(std::move(A)), B_(std::move(B)) {
        A_.middleRows<3>(tangent::kRot).setZero();
        A_.middleCols<3>(tangent::kRot).setZero();
        B_.middleRows<3>(tangent::kRot).setZero();
    }
    State step(const State& x, const Control& u) const override {
        return boxplus(State{}, TangentState(A_ * boxminus(x, State{}) + B_ * u));
    }
    Linearization linearize(const State& x, const Control& u) const override { return {step(x, u), A_, B_}; }
    double dt() const override { return 0.05; }
    const StateJacobian& A() const { return A_; }
    const ControlJacobian& B() const { return B_; }

private:
    StateJacobian A_;
    ControlJacobian B_;
};

LinearModel random_linear_model(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    StateJacobian A = StateJacobian::Identity();
    ControlJacobian B;
    for (int i = 0; i < kTangentDim; ++i) {
        for (int j = 0; j < kTangentDim; ++j) A(i, j) += 0.05 * n(rng);
        for (int j = 0; j < kControlDim; ++j) B(i, j) = 0.1 * n(rng);
    }
    return {A, B};
}

OcpProblem lq_problem(int N) {
    OcpProblem p;
    p.horizon = N;
    p.Qx = (TangentState() << 20, 20, 20, 5, 5, 5, 10, 10, 10, 1, 1, 1).finished();
    p.Qu = Control::Constant(0.1);
    p.x_ref.assign(static_cast<std::size_t>(N) + 1, State{});
    p.u_ref.assign(static_cast<std::size_t>(N), Control::Zero());
    p.u_min = Control::Constant(-1e6);
    p.u_max = Control::Constant(1e6);
    return p;
}

Outcome sqp_oracle() {
    std::mt19937_64 rng(404);
    double riccati = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        const LinearModel model = random_linear_model(rng);
        const int N = 20;
        const OcpProblem prob = lq_problem(N);
        TangentState d0 = TangentState::Zero();
        d0 << random_vec(rng, 1.0), random_vec(rng, 1.0), Vec3::Zero(), random_vec(rng, 1.0);
        const State x0 = boxplus(State{}, d0);
        const OcpSolution sol = solve_converged(prob, model, x0, cold_start_guess(prob, x0));

        const StateJacobian Q = prob.Qx.asDiagonal();
        const Eigen::Matrix4d R = prob.Qu.asDiagonal();
        StateJacobian P = Q;
        std::vector<Eigen::Matrix<double, kControlDim, kTangentDim>> K(N);
        for (int k = N - 1; k >= 0; --k) {
            const auto kk = static_cast<std::size_t>(k);
            K[kk] = (R + model.B().transpose() * P * model.B()).ldlt().solve(model.B().transpose() * P * model.A());
            P = Q + model.A().transpose() * P * (model.A() - model.B() * K[kk]);
            P = 0.5 * (P + P.transpose()).eval();
        }
        TangentState x = d0;
        for (int k = 0; k < N; ++k) {
            const Control u = -K[static_cast<std::size_t>(k)] * x;
            riccati = std::max(riccati, (sol.controls[static_cast<std::size_t>(k)] - u).cwiseAbs().maxCoeff());
            x = model.A() * x + model.B() * u;
        }
    }

    const LinearModel model = random_linear_model(rng);
    OcpProblem one = lq_problem(1);
    one.u_min = Control::Zero();
    one.u_max = Control::Constant(1.5);
    one.u_ref = {Control::Constant(2.0)};
    one.Qu = Control::Constant(10.0);
    const OcpSolution sol = solve_converged(one, model, State{}, cold_start_guess(one, State{}));
    const Control grad = model.B().transpose() * one.Qx.cwiseProduct(boxminus(sol.states[1], one.x_ref[1])) +
                         one.Qu.cwiseProduct(sol.controls[0] - one.u_ref[0]);
    // projected gradient: components at the upper bound may only push outward
    double kkt = 0.0;
    for (int i = 0; i < kControlDim; ++i) {
        const double ui = sol.controls[0](i);
        const double gi = grad(i);
        if (ui >= one.u_max(i)) kkt = std::max(kkt, std::max(gi, 0.0));
        else if (ui <= one.u_min(i)) kkt = std::max(kkt, std::max(-gi, 0.0));
        else kkt = std::max(kkt, std::abs(gi));
    }
    const bool clipped = sol.controls[0] == one.u_max;
    return {riccati < 1e-6 && kkt < 1e-6 && clipped,
            fmt("Riccati max control error %.1e (< 1e-6); 1-step clipped at f_max: %s, KKT residual %.1e (< 1e-6)",
                riccati, clipped ? "yes" : "no", kkt)};
}

// ---------------------------------------------------------------- 5
struct TrainedModel {
    MlpParams params;
    double holdout_loss{0.0};
};

Outcome offline_training(const SuiteConfig& cfg, const fs::path& dir, TrainedModel& out) {
    const auto dataset = generate_dataset(cfg);
    std::size_t samples = 0;
    for (const auto& t : dataset) samples += t.samples.size();
    const double minutes = static_cast<double>(samples) * cfg.controller.network.dt / 60.0;
    TrainingConfig tc = cfg.training;
    tc.loss = {cfg.controller.network, cfg.controller.quat_loss};
    const TrainingResult res = train_offline(dataset, tc);
    out.params = res.params;
    out.holdout_loss = res.holdout_loss;
    fs::create_directories(dir / "model");
    save_params(res.params, dir / "model" / "params.json");
    write_training_curve_csv(res.curve, dir / "model" / "training_curve.csv");
    const double rel = kPinnedHoldoutLoss > 0.0 ? std::abs(res.holdout_loss / kPinnedHoldoutLoss - 1.0) : INFINITY;
    return {minutes >= 30.0 && rel <= kPinnedTolerance,
            fmt("%.1f min of flight, %zu holdout samples, holdout forward error %.6g vs pinned %.6g (%+.1f%%, ±20%%)",
                minutes, res.holdout_samples, res.holdout_loss, kPinnedHoldoutLoss,
                100.0 * (res.holdout_loss / kPinnedHoldoutLoss - 1.0))};
}

// ---------------------------------------------------------------- 6
const Scenario& find_scenario(const SuiteConfig& cfg, const std::string& name) {
    for (const auto& s : cfg.scenarios) {
        if (s.name == name) return s;
    }
    throw ConfigError("scenario '" + name + "' missing from the default config");
}

Outcome online_adaptation(const SuiteConfig& cfg, const MlpParams& params, const fs::path& dir) {
    const Scenario& s = find_scenario(cfg, "payload");
    const RunRecord run = run_episode(s, cfg.controller, ControllerMode::Adaptive, &params, 1);
    write_run_csv(run, dir / "adaptation_payload.csv", false);
    double first = 0.0, last = 0.0;
    int nf = 0, nl = 0;
    for (const auto& st : run.steps) {
        if (!st.diag.has_forward_error) continue;
        if (st.t < 5.0) {
            first += st.diag.forward_error;
            ++nf;
        } else if (st.t >= s.duration - 5.0) {
            last += st.diag.forward_error;
            ++nl;
        }
    }
    first /= std::max(nf, 1);
    last /= std::max(nl, 1);
    const bool frozen = run.frozen_hash_before == run.frozen_hash_after;
    const double ratio = last / first;
    return {!run.crashed && nf > 0 && nl > 0 && ratio <= 0.5 && frozen,
            fmt("payload +%.0f%% mass, forward error first 5 s %.3g, final 5 s %.3g (ratio %.2f, <= 0.50); frozen "
                "features %s%s",
                100.0 * s.perturbation.payload.mass / s.body.mass, first, last, ratio, frozen ? "unchanged" : "CHANGED",
                run.crashed ? "; CRASHED" : "")};
}

// ---------------------------------------------------------------- 7
Outcome ablation_ordering(const SuiteConfig& base, const MlpParams& params, const fs::path& dir) {
    SuiteConfig cfg = base;
    cfg.scenarios = {find_scenario(base, "payload"), find_scenario(base, "wind")};
    for (auto& s : cfg.scenarios) s.seeds = {1, 2, 3, 4, 5};
    const SuiteResult r = run_suite(cfg, &params, dir / "ablation");
    std::string detail;
    for (const auto& sc : cfg.scenarios) {
        const CellSummary* a = r.cell(sc.name, ControllerMode::Adaptive);
        const CellSummary* st = r.cell(sc.name, ControllerMode::Static);
        const CellSummary* n = r.cell(sc.name, ControllerMode::Nominal);
        const CellSummary* ua = r.cell(sc.name, ControllerMode::StaticUA);
        if (a == nullptr || st == nullptr || n == nullptr) return {false, "missing cells for " + sc.name};
        detail += fmt("%s: adaptive %.4f, static %.4f, nominal %.4f", sc.name.c_str(), a->position_rmse_mean,
                      st->position_rmse_mean, n->position_rmse_mean);
        if (ua != nullptr) {
            detail += fmt(", static-ua %.4f (UA delta %+.1f%%)", ua->position_rmse_mean,
                          100.0 * (ua->position_rmse_mean / st->position_rmse_mean - 1.0));
        }
        detail += fmt(", adaptive vs static %+.1f%%; ", 100.0 * (a->position_rmse_mean / st->position_rmse_mean - 1.0));
    }
    bool holds = true;
    for (const auto& c : r.checks) holds = holds && c.holds;
    return {holds && !r.checks.empty(), detail + "5 seeds, mean position RMSE in m"};
}

// ---------------------------------------------------------------- 8
Outcome weighting_invariances() {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> qx(0.1, 50.0);
    std::uniform_real_distribution<double> lg(-7.0, 1.5);
    std::uniform_real_distribution<double> sig(1e-5, 1.0);
    const RigidBodyParams body;
    const NominalDynamics model(body, 0.05);
    OcpProblem prob;
    prob.horizon = 20;
    prob.Qu = Control::Constant(0.1);
    prob.x_ref.assign(21, hover_state(Vec3(0, 0, 1)));
    prob.u_ref.assign(20, Control::Constant(body.hover_force()));
    prob.hover = Control::Constant(body.hover_force());
    int neutral = 0, identical = 0, monotone = 0;
    const int n = 1000;
    for (int k = 0; k < n; ++k) {
        TangentState Q;
        for (int i = 0; i < kTangentDim; ++i) Q(i) = qx(rng);
        const TangentState w = apply_uncertainty_weighting(Q, TangentState::Constant(std::pow(10.0, lg(rng))));
        neutral += w == Q;

        const State x0 = random_state(rng);
        prob.Qx = Q;
        const OcpSolution a = solve_rti(prob, model, x0, nullptr);
        prob.Qx = w;
        const OcpSolution b = solve_rti(prob, model, x0, nullptr);
        identical += a.controls == b.controls && a.states == b.states;

        TangentState s;
        for (int i = 0; i < kTangentDim; ++i) s(i) = sig(rng);
        const int i = k % kTangentDim;
        TangentState s2 = s;
        s2(i) *= 1.0 + 4.0 * sig(rng);
        const TangentState wa = apply_uncertainty_weighting(Q, s);
        const TangentState wb = apply_uncertainty_weighting(Q, s2);
        bool ok = true;
        for (int j = 0; j < kTangentDim; ++j) {
            if (j != i) ok = ok && wb(i) / wb(j) < wa(i) / wa(j);
        }
        monotone += ok;
    }
    return {neutral == n && identical == n && monotone == n,
            fmt("uniform-sigma weights unchanged %d/%d, QP solutions bit-identical %d/%d, monotone response %d/%d",
                neutral, n, identical, n, monotone, n)};
}

// ---------------------------------------------------------------- 9
Outcome performance(const SuiteConfig& cfg, const MlpParams& params) {
    Scenario s = find_scenario(cfg, "payload");
    s.duration = 200 * s.control_dt;
    const RunRecord run = run_episode(s, cfg.controller, ControllerMode::Adaptive, &params, 1);
    std::vector<double> ms;
    int updates = 0;
    for (const auto& st : run.steps) {
        ms.push_back(st.diag.solve_ms);
        updates += st.diag.updated;
    }
    if (ms.empty()) return {false, "no control steps"};
    std::sort(ms.begin(), ms.end());
    const double median = ms[ms.size() / 2];
    return {median < 50.0 && updates > 0,
            fmt("adaptive control_step over %zu steps (%d with an online update): median %.2f ms, p90 %.2f ms, max "
                "%.2f ms (< 50 ms)",
                ms.size(), updates, median, ms[ms.size() * 9 / 10], ms.back())};
}

// ---------------------------------------------------------------- 10
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const SuiteConfig& cfg, const MlpParams& params, const fs::path& dir) {
    const SuiteResult a = run_suite(cfg, &params, dir / "suite_a");
    const SuiteResult b = run_suite(cfg, &params, dir / "suite_b");
    std::size_t same = 0;
    for (const auto& run : a.runs) same += slurp(dir / "suite_a" / run.csv) == slurp(dir / "suite_b" / run.csv);
    const bool summaries = slurp(dir / "suite_a" / "summary.json") == slurp(dir / "suite_b" / "summary.json");
    return {!a.runs.empty() && same == a.runs.size() && b.runs.size() == a.runs.size() && summaries,
            fmt("%zu/%zu run CSVs byte-identical across two runs of the default suite, summary %s", same, a.runs.size(),
                summaries ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_artifacts");
    fs::remove_all(dir);
    fs::create_directories(dir);
    SuiteConfig cfg = load_suite_config(QUADLEARN_SOURCE_DIR "/configs/default.yaml");

    int failed = 0;
    const auto criterion = [&](int id, const char* name, double budget_s, const std::function<Outcome()>& f) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs < budget_s;
        failed += !pass;
        std::printf("%s criterion %2d %-22s %s [%.1f s of %.0f s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                    secs, budget_s);
        std::fflush(stdout);
    };

    TrainedModel model;
    bool trained = false;
    criterion(1, "manifold", 5, manifold_suite);
    criterion(2, "gradients", 30, gradient_suite);
    criterion(3, "ut-exactness", 120, ut_exactness);
    criterion(4, "sqp-oracle", 10, sqp_oracle);
    criterion(5, "offline-training", 900, [&] {
        Outcome o = offline_training(cfg, dir, model);
        trained = true;
        return o;
    });
    const auto needs_model = [&](const std::function<Outcome()>& f) {
        return [&, f] { return trained ? f() : Outcome{false, "no trained model"}; };
    };
    criterion(6, "online-adaptation", 120, needs_model([&] { return online_adaptation(cfg, model.params, dir); }));
    criterion(7, "ablation-ordering", 900, needs_model([&] { return ablation_ordering(cfg, model.params, dir); }));
    criterion(8, "weighting-invariances", 5, weighting_invariances);
    criterion(9, "performance", 60, needs_model([&] { return performance(cfg, model.params); }));
    criterion(10, "determinism", 1800, needs_model([&] { return determinism(cfg, model.params, dir); }));

    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
