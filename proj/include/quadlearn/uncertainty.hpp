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

#include <functional>
#include <stdexcept>
#include <vector>

#include "quadlearn/dynamics.hpp"
#include "quadlearn/state.hpp"

namespace quadlearn {

class UncertaintyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Spread (alpha), prior-shape (beta) and secondary scaling (kappa) of the UT.
struct UnscentedParams {
    double alpha{1e-3};
    double beta{2.0};
    double kappa{1.0};
};

struct UnscentedWeights {
    double lambda{0.0};
    VectorXd mean;  ///< 2n+1 entries
    VectorXd cov;   ///< 2n+1 entries
};

/// λ = α²(n+κ) − n, W₀ᵐ = λ/(n+λ), W₀ᶜ = W₀ᵐ + 1 − α² + β, Wᵢ = 1/(2(n+λ)).
[[nodiscard]] UnscentedWeights unscented_weights(int n, const UnscentedParams& p);

/// Mean state plus 12 × 12 covariance in tangent coordinates.
struct TangentGaussian {
    State mean;
    TangentCov cov{TangentCov::Zero()};
};

/// 2n+1 sigma states; point 0 is the prior mean.
struct SigmaEnsemble {
    std::vector<State> points;
    VectorXd mean_weights;
    VectorXd cov_weights;
};

/// Lower Cholesky factor of a PSD covariance. An all-zero matrix yields zero;
/// a failed factorization is retried once with 1e-12·I jitter.
[[nodiscard]] TangentCov covariance_sqrt(const TangentCov& cov);

[[nodiscard]] SigmaEnsemble generate_sigma_points(const TangentGaussian& g, const UnscentedParams& p = {});

enum class Execution { Serial, Parallel };

using StateMap = std::function<State(const State&)>;

/// Pushes every sigma point through f. Weights are carried over unchanged.
[[nodiscard]] SigmaEnsemble propagate(const StateMap& f, const SigmaEnsemble& e, Execution exec = Execution::Serial);

/// Pushes every sigma point through the model with a fixed control.
[[nodiscard]] SigmaEnsemble propagate(const DynamicsModel& model, const SigmaEnsemble& e, const Control& u,
                                      Execution exec = Execution::Serial);

/// Neural-network convenience overload of the above.
[[nodiscard]] SigmaEnsemble propagate(const MlpParams& params, const SigmaEnsemble& e, const Control& u,
                                      const NeuralDynamicsOptions& opt, Execution exec = Execution::Serial);

/// Single-pass weighted mean anchored at point 0 and weighted tangent
/// covariance about it; the result is symmetrized.
[[nodiscard]] TangentGaussian reconstruct_moments(const SigmaEnsemble& e);

/// Plain Euclidean UT with the same weights, for arbitrary dimension.
struct EuclideanGaussian {
    VectorXd mean;
    MatrixXd cov;
};

[[nodiscard]] EuclideanGaussian unscented_transform(const EuclideanGaussian& prior,
                                                    const std::function<VectorXd(const VectorXd&)>& f,
                                                    const UnscentedParams& p = {});

[[nodiscard]] bool is_symmetric_psd(const TangentCov& cov, double sym_tol = 1e-10);

}  // namespace quadlearn
