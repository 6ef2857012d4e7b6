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

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadlearn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class MlpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Activation { Elu, Linear };

struct DenseLayer {
    MatrixXd weight;  ///< out × in
    VectorXd bias;    ///< out
    Activation activation{Activation::Elu};
};

/// Per-component affine maps applied inside forward: the network sees
/// (x - in_offset) / in_scale and the caller sees out_offset + out_scale ⊙ y.
struct Normalization {
    VectorXd in_offset;
    VectorXd in_scale;
    VectorXd out_offset;
    VectorXd out_scale;

    static Normalization identity(int in_dim, int out_dim);
};

/**
 * Parameters of a fully connected network. Hidden layers use ELU, the last
 * layer is linear, so the output decomposes as W_L φ(x) + b_L where φ is the
 * penultimate activation.
 */
struct MlpParams {
    std::vector<DenseLayer> layers;
    Normalization norm;
    double elu_alpha{1.0};

    [[nodiscard]] int input_dim() const;
    [[nodiscard]] int output_dim() const;
    [[nodiscard]] int parameter_count() const;

    /// Throws MlpError if shapes do not chain or the last layer is not linear.
    void validate() const;

    /// He-style uniform initialization, zero biases, identity normalization.
    /// `sizes` lists every width, input first and output last.
    static MlpParams initialize(std::span<const int> sizes, double elu_alpha, std::uint64_t seed);
};

/// Activations recorded by forward, consumed by backward.
struct ForwardCache {
    std::vector<VectorXd> layer_inputs;  ///< input to layer k (normalized input for k = 0)
    std::vector<VectorXd> pre_activations;
    std::uint64_t params_fingerprint{0};
};

struct ForwardResult {
    VectorXd output;
    ForwardCache cache;
};

struct LayerGradient {
    MatrixXd weight;
    VectorXd bias;
};

/// Shape-congruent partials of a scalar loss with respect to every layer.
struct Gradient {
    std::vector<LayerGradient> layers;

    static Gradient zeros_like(const MlpParams& params);
    Gradient& operator+=(const Gradient& other);
    Gradient& operator*=(double s);
    [[nodiscard]] bool is_finite() const;
};

double elu(double x, double alpha = 1.0);
double elu_derivative(double x, double alpha = 1.0);

/// Cheap content hash over weights and biases of layers [first, last).
std::uint64_t fingerprint_layers(const MlpParams& params, std::size_t first, std::size_t last);
inline std::uint64_t fingerprint(const MlpParams& params) {
    return fingerprint_layers(params, 0, params.layers.size());
}

ForwardResult forward(const MlpParams& params, const VectorXd& input);

/// Penultimate activation φ(x); the last layer maps it linearly to the raw output.
VectorXd features(const MlpParams& params, const VectorXd& input);

/// Gradient of output_grad · forward(x) with respect to every parameter.
/// Throws MlpError when the cache was produced by different parameters.
Gradient backward(const MlpParams& params, const ForwardCache& cache, const VectorXd& output_grad);

/// d forward(x) / d x, output_dim × input_dim, at the cached input.
MatrixXd input_jacobian(const MlpParams& params, const ForwardCache& cache);

/// Column-batched forward/backward used by the offline trainer.
struct BatchCache {
    std::vector<MatrixXd> layer_inputs;
    std::vector<MatrixXd> pre_activations;
};

MatrixXd forward_batch(const MlpParams& params, const MatrixXd& inputs, BatchCache& cache);

/// Sums per-column gradients of output_grads(:, j) · output(:, j).
Gradient backward_batch(const MlpParams& params, const BatchCache& cache, const MatrixXd& output_grads);

struct AdamConfig {
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
};

struct AdamState {
    Gradient m;
    Gradient v;
    long step{0};

    static AdamState zeros_like(const MlpParams& params);
};

struct AdamResult {
    MlpParams params;
    AdamState state;
};

/// One bias-corrected Adam step on every parameter.
AdamResult adam_step(MlpParams params, const Gradient& grad, AdamState state, double lr, const AdamConfig& cfg = {});

/// In-place variant for training loops.
void adam_update(MlpParams& params, const Gradient& grad, AdamState& state, double lr, const AdamConfig& cfg = {});

/// θ_L ← θ_L − lr · mean(grads restricted to the last layer). Earlier layers
/// are returned bit-identical. Throws MlpError on an empty batch.
MlpParams sgd_last_layer_step(MlpParams params, std::span<const Gradient> batch_grads, double lr);

/// Lossless JSON container (format "quadlearn-mlp", version 1).
std::string params_to_json(const MlpParams& params);
MlpParams params_from_json(const std::string& text);
void save_params(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_params(const std::filesystem::path& path);

}  // namespace quadlearn
