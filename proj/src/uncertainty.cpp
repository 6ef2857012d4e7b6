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

#include "quadlearn/uncertainty.hpp"

#include <cmath>
#include <future>

namespace quadlearn {

namespace {
constexpr double kJitter = 1e-12;
}

UnscentedWeights unscented_weights(int n, const UnscentedParams& p) {
    if (n <= 0) throw UncertaintyError("UT dimension must be positive");
    UnscentedWeights w;
    const double nd = static_cast<double>(n);
    w.lambda = p.alpha * p.alpha * (nd + p.kappa) - nd;
    const double spread = nd + w.lambda;
    if (!(spread > 0.0)) throw UncertaintyError("UT requires n + lambda > 0");
    w.mean = VectorXd::Constant(2 * n + 1, 1.0 / (2.0 * spread));
    w.cov = w.mean;
    w.mean(0) = w.lambda / spread;
    w.cov(0) = w.lambda / spread + (1.0 - p.alpha * p.alpha + p.beta);
    return w;
}

TangentCov covariance_sqrt(const TangentCov& cov) {
    if (cov.cwiseAbs().maxCoeff() == 0.0) return TangentCov::Zero();
    Eigen::LLT<TangentCov> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    llt.compute(cov + kJitter * TangentCov::Identity());
    if (llt.info() != Eigen::Success) throw UncertaintyError("covariance is not positive semi-definite");
    return llt.matrixL();
}

SigmaEnsemble generate_sigma_points(const TangentGaussian& g, const UnscentedParams& p) {
    constexpr int n = kTangentDim;
    const UnscentedWeights w = unscented_weights(n, p);
    const TangentCov L = covariance_sqrt(g.cov);
    const double scale = std::sqrt(n + w.lambda);

    SigmaEnsemble e;
    e.points.reserve(2 * n + 1);
    e.points.push_back(g.mean);
    for (int i = 0; i < n; ++i) e.points.push_back(boxplus(g.mean, TangentState(-scale * L.col(i))));
    for (int i = 0; i < n; ++i) e.points.push_back(boxplus(g.mean, TangentState(scale * L.col(i))));
    e.mean_weights = w.mean;
    e.cov_weights = w.cov;
    return e;
}

SigmaEnsemble propagate(const StateMap& f, const SigmaEnsemble& e, Execution exec) {
    SigmaEnsemble out;
    out.mean_weights = e.mean_weights;
    out.cov_weights = e.cov_weights;
    out.points.resize(e.points.size());
    if (exec == Execution::Serial) {
        for (std::size_t i = 0; i < e.points.size(); ++i) out.points[i] = f(e.points[i]);
        return out;
    }
    std::vector<std::future<State>> jobs;
    jobs.reserve(e.points.size());
    for (const auto& pt : e.points) jobs.push_back(std::async(std::launch::async, [&f, &pt] { return f(pt); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) out.points[i] = jobs[i].get();
    return out;
}

SigmaEnsemble propagate(const DynamicsModel& model, const SigmaEnsemble& e, const Control& u, Execution exec) {
    return propagate([&](const State& x) { return model.step(x, u); }, e, exec);
}

SigmaEnsemble propagate(const MlpParams& params, const SigmaEnsemble& e, const Control& u,
                        const NeuralDynamicsOptions& opt, Execution exec) {
    return propagate([&](const State& x) { return predict(params, x, u, opt); }, e, exec);
}

TangentGaussian reconstruct_moments(const SigmaEnsemble& e) {
    if (e.points.empty() || static_cast<Eigen::Index>(e.points.size()) != e.mean_weights.size() ||
        e.mean_weights.size() != e.cov_weights.size()) {
        throw UncertaintyError("malformed sigma ensemble");
    }
    const State& anchor = e.points.front();
    TangentState shift = TangentState::Zero();
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        shift += e.mean_weights(static_cast<Eigen::Index>(i)) * boxminus(e.points[i], anchor);
    }
    TangentGaussian g;
    g.mean = boxplus(anchor, shift);
    g.cov.setZero();
    for (std::size_t i = 0; i < e.points.size(); ++i) {
        const TangentState d = boxminus(e.points[i], g.mean);
        g.cov.noalias() += e.cov_weights(static_cast<Eigen::Index>(i)) * d * d.transpose();
    }
    g.cov = 0.5 * (g.cov + g.cov.transpose()).eval();
    return g;
}

EuclideanGaussian unscented_transform(const EuclideanGaussian& prior, const std::function<VectorXd(const VectorXd&)>& f,
                                      const UnscentedParams& p) {
    const auto n = static_cast<int>(prior.mean.size());
    const UnscentedWeights w = unscented_weights(n, p);
    MatrixXd L;
    if (prior.cov.cwiseAbs().maxCoeff() == 0.0) {
        L = MatrixXd::Zero(n, n);
    } else {
        Eigen::LLT<MatrixXd> llt(prior.cov);
        if (llt.info() != Eigen::Success) llt.compute(prior.cov + kJitter * MatrixXd::Identity(n, n));
        if (llt.info() != Eigen::Success) throw UncertaintyError("covariance is not positive semi-definite");
        L = llt.matrixL();
    }
    const double scale = std::sqrt(n + w.lambda);
    std::vector<VectorXd> ys;
    ys.reserve(2 * n + 1);
    ys.push_back(f(prior.mean));
    for (int i = 0; i < n; ++i) ys.push_back(f(prior.mean - scale * L.col(i)));
    for (int i = 0; i < n; ++i) ys.push_back(f(prior.mean + scale * L.col(i)));

    EuclideanGaussian out;
    VectorXd shift = VectorXd::Zero(ys.front().size());
    for (std::size_t i = 0; i < ys.size(); ++i) shift += w.mean(static_cast<Eigen::Index>(i)) * (ys[i] - ys.front());
    out.mean = ys.front() + shift;
    out.cov = MatrixXd::Zero(out.mean.size(), out.mean.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const VectorXd d = ys[i] - out.mean;
        out.cov.noalias() += w.cov(static_cast<Eigen::Index>(i)) * d * d.transpose();
    }
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

bool is_symmetric_psd(const TangentCov& cov, double sym_tol) {
    if (!cov.allFinite()) return false;
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() >= sym_tol) return false;
    Eigen::LLT<TangentCov> llt(cov + kJitter * TangentCov::Identity());
    return llt.info() == Eigen::Success;
}

}  // namespace quadlearn
