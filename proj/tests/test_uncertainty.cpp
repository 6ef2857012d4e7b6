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

#include <gtest/gtest.h>

#include "quadlearn/uncertainty.hpp"
#include "test_util.hpp"

using namespace quadlearn;

namespace {

TangentCov random_cov(std::mt19937_64& rng, const TangentState& scale) {
    std::normal_distribution<double> n(0.0, 1.0);
    TangentCov M;
    for (int i = 0; i < kTangentDim; ++i) {
        for (int j = 0; j < kTangentDim; ++j) M(i, j) = n(rng);
    }
    const TangentCov C = M * M.transpose() / kTangentDim + 0.1 * TangentCov::Identity();
    return scale.asDiagonal() * C * scale.asDiagonal();
}

double rel_frobenius(const MatrixXd& a, const MatrixXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(Weights, ClosedForm) {
    const UnscentedParams p;
    const UnscentedWeights w = unscented_weights(12, p);
    const double lambda = 1e-6 * 13.0 - 12.0;
    EXPECT_NEAR(w.lambda, lambda, 1e-12);
    EXPECT_EQ(w.mean.size(), 25);
    EXPECT_NEAR(w.mean(0), lambda / (12.0 + lambda), 1e-6);
    EXPECT_NEAR(w.cov(0) - w.mean(0), 1.0 - 1e-6 + 2.0, 1e-9);
    EXPECT_NEAR(w.mean(7), 1.0 / (2.0 * (12.0 + lambda)), 1e-6);
    EXPECT_NEAR(w.mean.sum(), 1.0, 1e-9);
    EXPECT_EQ(w.mean.tail(24), w.cov.tail(24));
}

TEST(SigmaPoints, LayoutAndSymmetry) {
    std::mt19937_64 rng(1);
    const TangentGaussian g{test::random_state(rng), random_cov(rng, TangentState::Constant(0.1))};
    const SigmaEnsemble e = generate_sigma_points(g);
    ASSERT_EQ(e.points.size(), 25u);
    EXPECT_EQ(e.points[0], g.mean);
    const TangentCov L = covariance_sqrt(g.cov);
    const double scale = std::sqrt(12.0 + unscented_weights(12, {}).lambda);
    for (int i = 0; i < 12; ++i) {
        const auto k = static_cast<std::size_t>(i);
        EXPECT_LT((boxminus(e.points[1 + k], g.mean) + scale * L.col(i)).norm(), 1e-12);
        EXPECT_LT((boxminus(e.points[13 + k], g.mean) - scale * L.col(i)).norm(), 1e-12);
    }
}

TEST(SigmaPoints, ZeroCovarianceCollapses) {
    const TangentGaussian g{hover_state(Vec3(1, 2, 3)), TangentCov::Zero()};
    const SigmaEnsemble e = generate_sigma_points(g);
    for (const auto& x : e.points) EXPECT_EQ(x, g.mean);
    const TangentGaussian r = reconstruct_moments(e);
    EXPECT_EQ(r.cov, TangentCov::Zero());
    EXPECT_LT(boxminus(r.mean, g.mean).norm(), 1e-9);
}

TEST(CovarianceSqrt, FactorsAndHandlesSemidefinite) {
    std::mt19937_64 rng(2);
    const TangentCov C = random_cov(rng, TangentState::Ones());
    const TangentCov L = covariance_sqrt(C);
    EXPECT_LT((L * L.transpose() - C).norm(), 1e-12);
    TangentCov S = TangentCov::Zero();
    S(0, 0) = 1.0;  // rank one
    const TangentCov Ls = covariance_sqrt(S);
    EXPECT_TRUE(Ls.allFinite());
    EXPECT_LT((Ls * Ls.transpose() - S).norm(), 1e-10);
}

TEST(Propagate, IdentityRecoversPrior) {
    std::mt19937_64 rng(3);
    const TangentGaussian g{test::random_state(rng), random_cov(rng, TangentState::Constant(0.05))};
    const TangentGaussian r = reconstruct_moments(propagate([](const State& x) { return x; }, generate_sigma_points(g)));
    EXPECT_LT(boxminus(r.mean, g.mean).norm(), 1e-8);
    EXPECT_LT(rel_frobenius(r.cov, g.cov), 1e-8);
}

TEST(Propagate, AffineMapMatchesClosedForm) {
    std::mt19937_64 rng(4);
    const Mat3 A = Mat3::Random();
    const Mat3 Bm = Mat3::Random();
    const Mat3 C = Mat3::Random();
    const Mat3 D = Mat3::Random();
    const Vec3 c(0.3, -0.1, 0.2);
    const Quaternion qc = test::random_unit_quat(rng);
    const auto f = [&](const State& x) {
        State y;
        y.p = A * x.p + Bm * x.v + c;
        y.v = C * x.v;
        y.q = qc * x.q;  // left rotation is the identity in right-perturbation coordinates
        y.w = D * x.w;
        return y;
    };
    TangentCov J = TangentCov::Zero();
    J.block<3, 3>(0, 0) = A;
    J.block<3, 3>(0, 3) = Bm;
    J.block<3, 3>(3, 3) = C;
    J.block<3, 3>(6, 6) = Mat3::Identity();
    J.block<3, 3>(9, 9) = D;
    for (int inst = 0; inst < 10; ++inst) {
        const TangentGaussian g{test::random_state(rng), random_cov(rng, TangentState::Constant(0.1))};
        const TangentGaussian r = reconstruct_moments(propagate(f, generate_sigma_points(g)));
        EXPECT_LT(boxminus(r.mean, f(g.mean)).norm(), 1e-8);
        EXPECT_LT(rel_frobenius(r.cov, J * g.cov * J.transpose()), 1e-8);
        EXPECT_TRUE(is_symmetric_psd(r.cov));
    }
}

TEST(Propagate, ParallelMatchesSerialExactly) {
    std::mt19937_64 rng(5);
    const NominalDynamics model(RigidBodyParams{}, 0.05);
    const TangentGaussian g{test::random_state(rng), random_cov(rng, TangentState::Constant(0.05))};
    const SigmaEnsemble e = generate_sigma_points(g);
    const Control u = Control::Constant(0.6);
    const SigmaEnsemble a = propagate(model, e, u, Execution::Serial);
    const SigmaEnsemble b = propagate(model, e, u, Execution::Parallel);
    for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i], b.points[i]);
}

TEST(Propagate, MonteCarloAgreementOnRigidBodyStep) {
    std::mt19937_64 rng(6);
    const NominalDynamics model(RigidBodyParams{}, 0.05);
    TangentState scale;
    scale << Vec3::Constant(0.05), Vec3::Constant(0.2), Vec3::Constant(0.1), Vec3::Constant(0.5);
    const TangentGaussian g{test::random_state(rng), random_cov(rng, scale)};
    const Control u = Control::Constant(0.65);
    const TangentGaussian ut = reconstruct_moments(propagate(model, generate_sigma_points(g), u));

    const TangentCov L = covariance_sqrt(g.cov);
    const State center = model.step(g.mean, u);
    std::normal_distribution<double> n(0.0, 1.0);
    const int samples = 200000;
    std::vector<TangentState> d(samples);
    TangentState mean = TangentState::Zero();
    for (int s = 0; s < samples; ++s) {
        TangentState z;
        for (int i = 0; i < kTangentDim; ++i) z(i) = n(rng);
        d[static_cast<std::size_t>(s)] = boxminus(model.step(boxplus(g.mean, L * z), u), center);
        mean += d[static_cast<std::size_t>(s)];
    }
    mean /= samples;
    TangentCov cov = TangentCov::Zero();
    for (const auto& x : d) cov += (x - mean) * (x - mean).transpose();
    cov /= samples - 1;
    EXPECT_LT(rel_frobenius(ut.cov, cov), 0.05);
}

TEST(UnscentedTransform, ScalarSquareRecoversBetaMoment) {
    // y = x², x ~ N(0, σ²): the UT gives Var y = (α²κ + β) σ⁴ against the exact 2σ⁴
    const double sigma = 0.7;
    EuclideanGaussian prior{VectorXd::Zero(1), MatrixXd::Constant(1, 1, sigma * sigma)};
    const auto r = unscented_transform(prior, [](const VectorXd& x) { return VectorXd::Constant(1, x(0) * x(0)); });
    EXPECT_NEAR(r.mean(0), sigma * sigma, 1e-9);
    EXPECT_NEAR(r.cov(0, 0) / (2.0 * std::pow(sigma, 4)), 1.0, 1e-6);
}

TEST(PsdCheck, RejectsAsymmetricAndIndefinite) {
    TangentCov C = TangentCov::Identity();
    EXPECT_TRUE(is_symmetric_psd(C));
    C(0, 1) = 0.5;
    EXPECT_FALSE(is_symmetric_psd(C));
    C = TangentCov::Identity();
    C(3, 3) = -1.0;
    EXPECT_FALSE(is_symmetric_psd(C));
}
