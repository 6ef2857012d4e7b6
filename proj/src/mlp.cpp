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

#include "quadlearn/mlp.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace quadlearn {

namespace {

using json = nlohmann::json;

void apply_activation(Activation act, double alpha, const VectorXd& z, VectorXd& a) {
    if (act == Activation::Linear) {
        a = z;
        return;
    }
    a.resize(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) a(i) = elu(z(i), alpha);
}

MatrixXd activation_batch(Activation act, double alpha, const MatrixXd& z) {
    if (act == Activation::Linear) return z;
    return z.unaryExpr([alpha](double v) { return elu(v, alpha); });
}

MatrixXd activation_derivative_batch(Activation act, double alpha, const MatrixXd& z) {
    if (act == Activation::Linear) return MatrixXd::Ones(z.rows(), z.cols());
    return z.unaryExpr([alpha](double v) { return elu_derivative(v, alpha); });
}

VectorXd normalize_input(const MlpParams& params, const VectorXd& input) {
    return (input - params.norm.in_offset).cwiseQuotient(params.norm.in_scale);
}

std::uint64_t mix(std::uint64_t h, double v) {
    h ^= std::bit_cast<std::uint64_t>(v);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
    return h;
}

json matrix_to_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd vector_from_json(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

MatrixXd matrix_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
    MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) throw MlpError("ragged weight matrix in parameter file");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

}  // namespace

double elu(double x, double alpha) { return x > 0.0 ? x : alpha * std::expm1(x); }

double elu_derivative(double x, double alpha) { return x > 0.0 ? 1.0 : alpha * std::exp(x); }

Normalization Normalization::identity(int in_dim, int out_dim) {
    return {VectorXd::Zero(in_dim), VectorXd::Ones(in_dim), VectorXd::Zero(out_dim), VectorXd::Ones(out_dim)};
}

int MlpParams::input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols()); }

int MlpParams::output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows()); }

int MlpParams::parameter_count() const {
    int n = 0;
    for (const auto& l : layers) n += static_cast<int>(l.weight.size() + l.bias.size());
    return n;
}

void MlpParams::validate() const {
    if (layers.empty()) throw MlpError("network has no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& l = layers[k];
        if (l.bias.size() != l.weight.rows()) {
            throw MlpError("layer " + std::to_string(k) + ": bias size does not match weight rows");
        }
        if (k > 0 && l.weight.cols() != layers[k - 1].weight.rows()) {
            throw MlpError("layer " + std::to_string(k) + ": input width does not match previous output");
        }
    }
    if (layers.back().activation != Activation::Linear) throw MlpError("last layer must be linear");
    if (norm.in_offset.size() != input_dim() || norm.in_scale.size() != input_dim() ||
        norm.out_offset.size() != output_dim() || norm.out_scale.size() != output_dim()) {
        throw MlpError("normalization constants do not match network dimensions");
    }
    if ((norm.in_scale.array() == 0.0).any() || (norm.out_scale.array() == 0.0).any()) {
        throw MlpError("normalization scale must be nonzero");
    }
}

MlpParams MlpParams::initialize(std::span<const int> sizes, double elu_alpha, std::uint64_t seed) {
    if (sizes.size() < 2) throw MlpError("need at least input and output sizes");
    std::mt19937_64 rng(seed);
    MlpParams p;
    p.elu_alpha = elu_alpha;
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
        const int in = sizes[k];
        const int out = sizes[k + 1];
        const double bound = std::sqrt(6.0 / in);
        std::uniform_real_distribution<double> dist(-bound, bound);
        DenseLayer layer;
        layer.weight.resize(out, in);
        for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = dist(rng);
        layer.bias = VectorXd::Zero(out);
        layer.activation = (k + 2 == sizes.size()) ? Activation::Linear : Activation::Elu;
        p.layers.push_back(std::move(layer));
    }
    p.norm = Normalization::identity(sizes.front(), sizes.back());
    return p;
}

Gradient Gradient::zeros_like(const MlpParams& params) {
    Gradient g;
    g.layers.reserve(params.layers.size());
    for (const auto& l : params.layers) {
        g.layers.push_back({MatrixXd::Zero(l.weight.rows(), l.weight.cols()), VectorXd::Zero(l.bias.size())});
    }
    return g;
}

Gradient& Gradient::operator+=(const Gradient& other) {
    if (other.layers.size() != layers.size()) throw MlpError("gradient shape mismatch");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        layers[k].weight += other.layers[k].weight;
        layers[k].bias += other.layers[k].bias;
    }
    return *this;
}

Gradient& Gradient::operator*=(double s) {
    for (auto& l : layers) {
        l.weight *= s;
        l.bias *= s;
    }
    return *this;
}

bool Gradient::is_finite() const {
    for (const auto& l : layers) {
        if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
}

std::uint64_t fingerprint_layers(const MlpParams& params, std::size_t first, std::size_t last) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t k = first; k < last && k < params.layers.size(); ++k) {
        const auto& l = params.layers[k];
        h = mix(h, static_cast<double>(l.weight.rows()));
        h = mix(h, static_cast<double>(l.weight.cols()));
        for (Eigen::Index i = 0; i < l.weight.size(); ++i) h = mix(h, l.weight.data()[i]);
        for (Eigen::Index i = 0; i < l.bias.size(); ++i) h = mix(h, l.bias(i));
    }
    return h;
}

ForwardResult forward(const MlpParams& params, const VectorXd& input) {
    if (input.size() != params.input_dim()) {
        throw MlpError("input has " + std::to_string(input.size()) + " entries, network expects " +
                       std::to_string(params.input_dim()));
    }
    ForwardResult r;
    auto& c = r.cache;
    c.layer_inputs.reserve(params.layers.size());
    c.pre_activations.reserve(params.layers.size());
    VectorXd a = normalize_input(params, input);
    for (const auto& l : params.layers) {
        c.layer_inputs.push_back(a);
        VectorXd z = l.weight * a + l.bias;
        apply_activation(l.activation, params.elu_alpha, z, a);
        c.pre_activations.push_back(std::move(z));
    }
    r.output = params.norm.out_offset + params.norm.out_scale.cwiseProduct(a);
    c.params_fingerprint = fingerprint(params);
    return r;
}

VectorXd features(const MlpParams& params, const VectorXd& input) {
    if (input.size() != params.input_dim()) throw MlpError("input dimension mismatch");
    VectorXd a = normalize_input(params, input);
    for (std::size_t k = 0; k + 1 < params.layers.size(); ++k) {
        const auto& l = params.layers[k];
        VectorXd z = l.weight * a + l.bias;
        apply_activation(l.activation, params.elu_alpha, z, a);
    }
    return a;
}

Gradient backward(const MlpParams& params, const ForwardCache& cache, const VectorXd& output_grad) {
    if (cache.layer_inputs.size() != params.layers.size() || cache.params_fingerprint != fingerprint(params)) {
        throw MlpError("stale forward cache: parameters changed since forward");
    }
    if (output_grad.size() != params.output_dim()) throw MlpError("output gradient dimension mismatch");

    Gradient g;
    g.layers.resize(params.layers.size());
    VectorXd delta = output_grad.cwiseProduct(params.norm.out_scale);  // dL/d(raw output)
    for (std::size_t k = params.layers.size(); k-- > 0;) {
        const auto& l = params.layers[k];
        if (l.activation == Activation::Elu) {
            const auto& z = cache.pre_activations[k];
            for (Eigen::Index i = 0; i < z.size(); ++i) delta(i) *= elu_derivative(z(i), params.elu_alpha);
        }
        g.layers[k].weight = delta * cache.layer_inputs[k].transpose();
        g.layers[k].bias = delta;
        if (k > 0) delta = l.weight.transpose() * delta;
    }
    return g;
}

MatrixXd input_jacobian(const MlpParams& params, const ForwardCache& cache) {
    if (cache.layer_inputs.size() != params.layers.size() || cache.params_fingerprint != fingerprint(params)) {
        throw MlpError("stale forward cache: parameters changed since forward");
    }
    // Reverse accumulation with one adjoint row per output.
    MatrixXd adj = params.norm.out_scale.asDiagonal();
    for (std::size_t k = params.layers.size(); k-- > 0;) {
        const auto& l = params.layers[k];
        if (l.activation == Activation::Elu) {
            const auto& z = cache.pre_activations[k];
            for (Eigen::Index i = 0; i < z.size(); ++i) adj.col(i) *= elu_derivative(z(i), params.elu_alpha);
        }
        adj = adj * l.weight;
    }
    return adj * params.norm.in_scale.cwiseInverse().asDiagonal();
}

MatrixXd forward_batch(const MlpParams& params, const MatrixXd& inputs, BatchCache& cache) {
    if (inputs.rows() != params.input_dim()) throw MlpError("batch input dimension mismatch");
    cache.layer_inputs.resize(params.layers.size());
    cache.pre_activations.resize(params.layers.size());
    MatrixXd a = (inputs.colwise() - params.norm.in_offset).array().colwise() / params.norm.in_scale.array();
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        const auto& l = params.layers[k];
        cache.layer_inputs[k] = a;
        MatrixXd z = (l.weight * a).colwise() + l.bias;
        a = activation_batch(l.activation, params.elu_alpha, z);
        cache.pre_activations[k] = std::move(z);
    }
    return (a.array().colwise() * params.norm.out_scale.array()).colwise() + params.norm.out_offset.array();
}

Gradient backward_batch(const MlpParams& params, const BatchCache& cache, const MatrixXd& output_grads) {
    if (cache.layer_inputs.size() != params.layers.size()) throw MlpError("batch cache does not match network");
    Gradient g;
    g.layers.resize(params.layers.size());
    MatrixXd delta = output_grads.array().colwise() * params.norm.out_scale.array();
    for (std::size_t k = params.layers.size(); k-- > 0;) {
        const auto& l = params.layers[k];
        if (l.activation == Activation::Elu) {
            delta.array() *= activation_derivative_batch(l.activation, params.elu_alpha, cache.pre_activations[k]).array();
        }
        g.layers[k].weight.noalias() = delta * cache.layer_inputs[k].transpose();
        g.layers[k].bias = delta.rowwise().sum();
        if (k > 0) delta = l.weight.transpose() * delta;
    }
    return g;
}

AdamState AdamState::zeros_like(const MlpParams& params) {
    return {Gradient::zeros_like(params), Gradient::zeros_like(params), 0};
}

void adam_update(MlpParams& params, const Gradient& grad, AdamState& state, double lr, const AdamConfig& cfg) {
    if (grad.layers.size() != params.layers.size() || state.m.layers.size() != params.layers.size()) {
        throw MlpError("Adam: gradient/state shape mismatch");
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
        theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
    };
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        update(params.layers[k].weight, grad.layers[k].weight, state.m.layers[k].weight, state.v.layers[k].weight);
        update(params.layers[k].bias, grad.layers[k].bias, state.m.layers[k].bias, state.v.layers[k].bias);
    }
}

AdamResult adam_step(MlpParams params, const Gradient& grad, AdamState state, double lr, const AdamConfig& cfg) {
    adam_update(params, grad, state, lr, cfg);
    return {std::move(params), std::move(state)};
}

MlpParams sgd_last_layer_step(MlpParams params, std::span<const Gradient> batch_grads, double lr) {
    if (batch_grads.empty()) throw MlpError("last-layer SGD needs at least one gradient");
    const std::size_t last = params.layers.size() - 1;
    MatrixXd dw = MatrixXd::Zero(params.layers[last].weight.rows(), params.layers[last].weight.cols());
    VectorXd db = VectorXd::Zero(params.layers[last].bias.size());
    for (const auto& g : batch_grads) {
        if (g.layers.size() != params.layers.size()) throw MlpError("gradient shape mismatch");
        dw += g.layers[last].weight;
        db += g.layers[last].bias;
    }
    const double scale = lr / static_cast<double>(batch_grads.size());
    params.layers[last].weight -= scale * dw;
    params.layers[last].bias -= scale * db;
    return params;
}

std::string params_to_json(const MlpParams& params) {
    params.validate();
    json j;
    j["format"] = "quadlearn-mlp";
    j["version"] = 1;
    j["elu_alpha"] = params.elu_alpha;
    j["layers"] = json::array();
    for (const auto& l : params.layers) {
        j["layers"].push_back({{"activation", l.activation == Activation::Elu ? "elu" : "linear"},
                               {"weight", matrix_to_json(l.weight)},
                               {"bias", vector_to_json(l.bias)}});
    }
    j["normalization"] = {{"in_offset", vector_to_json(params.norm.in_offset)},
                          {"in_scale", vector_to_json(params.norm.in_scale)},
                          {"out_offset", vector_to_json(params.norm.out_offset)},
                          {"out_scale", vector_to_json(params.norm.out_scale)}};
    return j.dump();
}

MlpParams params_from_json(const std::string& text) {
    MlpParams p;
    try {
        const json j = json::parse(text);
        if (j.at("format").get<std::string>() != "quadlearn-mlp") throw MlpError("not a quadlearn-mlp file");
        if (j.at("version").get<int>() != 1) throw MlpError("unsupported parameter file version");
        p.elu_alpha = j.at("elu_alpha").get<double>();
        for (const auto& jl : j.at("layers")) {
            DenseLayer l;
            const auto act = jl.at("activation").get<std::string>();
            if (act != "elu" && act != "linear") throw MlpError("unknown activation '" + act + "'");
            l.activation = act == "elu" ? Activation::Elu : Activation::Linear;
            l.weight = matrix_from_json(jl.at("weight"));
            l.bias = vector_from_json(jl.at("bias"));
            p.layers.push_back(std::move(l));
        }
        const auto& n = j.at("normalization");
        p.norm.in_offset = vector_from_json(n.at("in_offset"));
        p.norm.in_scale = vector_from_json(n.at("in_scale"));
        p.norm.out_offset = vector_from_json(n.at("out_offset"));
        p.norm.out_scale = vector_from_json(n.at("out_scale"));
    } catch (const json::exception& e) {
        throw MlpError(std::string("malformed parameter file: ") + e.what());
    }
    p.validate();
    return p;
}

void save_params(const MlpParams& params, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MlpError("cannot write " + path.string());
    out << params_to_json(params) << '\n';
}

MlpParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MlpError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return params_from_json(ss.str());
}

}  // namespace quadlearn
