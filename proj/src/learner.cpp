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

#include "quadlearn/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace quadlearn {

namespace {

using Vec10 = Eigen::Matrix<double, kNetOutputDim, 1>;

struct Sample {
    Eigen::Matrix<double, kNetInputDim, 1> input;
    Vec10 base;    ///< added to the network output in residual mode
    Vec10 target;  ///< [v', ω', q'] of the observed next state (absolute)
};

Sample make_sample(const Transition& tr, const ForwardErrorOptions& opt) {
    Sample s;
    s.input = network_input(tr.x_prev, tr.u_prev);
    s.base.setZero();
    if (opt.model.residual) s.base << tr.x_prev.v, tr.x_prev.w, canonicalize(tr.x_prev.q).vec();
    const Quaternion qt = opt.quat_loss == QuatLoss::Canonical ? canonicalize(tr.x_next.q) : tr.x_next.q;
    s.target << tr.x_next.v, tr.x_next.w, qt.vec();
    return s;
}

/// Loss of one prediction and, optionally, its gradient w.r.t. the network output.
double sample_loss(const Vec10& output, const Sample& s, QuatLoss mode, Vec10* grad) {
    const Vec10 pred = output + s.base;
    const Vec4 q_raw = pred.segment<4>(6);
    const double n = q_raw.norm();
    if (!(n > 1e-12) || !pred.allFinite()) throw LearnerError("forward error is not finite (degenerate prediction)");
    const Vec4 q_unit = q_raw / n;
    const Vec4 q_target = s.target.segment<4>(6);
    const double sign = (mode == QuatLoss::Canonical && q_unit.dot(q_target) < 0.0) ? -1.0 : 1.0;

    Vec10 r;
    r.head<6>() = pred.head<6>() - s.target.head<6>();
    r.segment<4>(6) = sign * q_unit - q_target;
    const double loss = r.squaredNorm();
    if (!std::isfinite(loss)) throw LearnerError("forward error is not finite");
    if (grad != nullptr) {
        grad->head<6>() = 2.0 * r.head<6>();
        const Eigen::Matrix4d dunit = (Eigen::Matrix4d::Identity() - q_unit * q_unit.transpose()) / n;
        grad->segment<4>(6) = 2.0 * sign * (dunit * r.segment<4>(6));
    }
    return loss;
}

std::vector<Sample> make_samples(const std::vector<Transition>& trs, const ForwardErrorOptions& opt) {
    std::vector<Sample> out;
    out.reserve(trs.size());
    for (const auto& tr : trs) out.push_back(make_sample(tr, opt));
    return out;
}

struct SampleMatrix {
    MatrixXd inputs;   // 14 × M
    MatrixXd bases;    // 10 × M
    MatrixXd targets;  // 10 × M
};

SampleMatrix to_matrix(const std::vector<Sample>& samples) {
    const auto m = static_cast<Eigen::Index>(samples.size());
    SampleMatrix sm{MatrixXd(kNetInputDim, m), MatrixXd(kNetOutputDim, m), MatrixXd(kNetOutputDim, m)};
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto& s = samples[static_cast<std::size_t>(j)];
        sm.inputs.col(j) = s.input;
        sm.bases.col(j) = s.base;
        sm.targets.col(j) = s.target;
    }
    return sm;
}

Sample column_sample(const SampleMatrix& sm, Eigen::Index j) {
    return {sm.inputs.col(j), sm.bases.col(j), sm.targets.col(j)};
}

/// Mean loss over the columns; fills dL/dY scaled by 1/M when grads is given.
double batch_loss(const MatrixXd& outputs, const SampleMatrix& sm, QuatLoss mode, MatrixXd* grads) {
    const Eigen::Index m = outputs.cols();
    if (grads != nullptr) grads->resize(kNetOutputDim, m);
    double total = 0.0;
    Vec10 g;
    for (Eigen::Index j = 0; j < m; ++j) {
        const Sample s = column_sample(sm, j);
        total += sample_loss(outputs.col(j), s, mode, grads != nullptr ? &g : nullptr);
        if (grads != nullptr) grads->col(j) = g / static_cast<double>(m);
    }
    return total / static_cast<double>(m);
}

double evaluate(const MlpParams& params, const SampleMatrix& sm, QuatLoss mode) {
    if (sm.inputs.cols() == 0) return 0.0;
    BatchCache cache;
    return batch_loss(forward_batch(params, sm.inputs, cache), sm, mode, nullptr);
}

VectorXd safe_std(const MatrixXd& data, const VectorXd& mean) {
    VectorXd sd = ((data.colwise() - mean).array().square().rowwise().sum() / std::max<double>(1.0, data.cols()))
                      .sqrt()
                      .matrix();
    for (Eigen::Index i = 0; i < sd.size(); ++i) {
        if (!(sd(i) > 1e-8)) sd(i) = 1.0;
    }
    return sd;
}

}  // namespace

bool Transition::is_finite() const {
    return x_prev.is_finite() && x_next.is_finite() && u_prev.allFinite() && std::isfinite(t);
}

ForwardError forward_error(const MlpParams& params, const Transition& tr, const ForwardErrorOptions& opt) {
    const Sample s = make_sample(tr, opt);
    const ForwardResult fr = forward(params, s.input);
    Vec10 g;
    ForwardError fe;
    fe.loss = sample_loss(fr.output, s, opt.quat_loss, &g);
    fe.grad = backward(params, fr.cache, g);
    return fe;
}

double forward_error_value(const MlpParams& params, const Transition& tr, const ForwardErrorOptions& opt) {
    const Sample s = make_sample(tr, opt);
    return sample_loss(forward(params, s.input).output, s, opt.quat_loss, nullptr);
}

ReplayWindow::ReplayWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw LearnerError("replay window capacity must be positive");
}

bool ReplayWindow::push(const Transition& tr) {
    if (!tr.is_finite()) return false;
    if (!items_.empty() && !(tr.t > items_.back().t)) return false;
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(tr);
    return true;
}

MlpParams online_step(const MlpParams& params, const ReplayWindow& window, double lr, const ForwardErrorOptions& opt) {
    if (window.empty()) throw LearnerError("online step on an empty window");
    std::vector<Gradient> grads;
    grads.reserve(window.size());
    for (const auto& tr : window.items()) grads.push_back(forward_error(params, tr, opt).grad);
    return sgd_last_layer_step(params, grads, lr);
}

std::vector<Transition> Trajectory::transitions() const {
    std::vector<Transition> out;
    if (samples.size() < 2) return out;
    out.reserve(samples.size() - 1);
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        out.push_back({samples[k].x, samples[k].u, samples[k + 1].x, samples[k + 1].t});
    }
    return out;
}

double mean_forward_error(const MlpParams& params, const std::vector<Transition>& data, const ForwardErrorOptions& opt) {
    if (data.empty()) return 0.0;
    return evaluate(params, to_matrix(make_samples(data, opt)), opt.quat_loss);
}

TrainingResult train_offline(const std::vector<Trajectory>& dataset, const TrainingConfig& cfg) {
    if (dataset.size() < 2) throw LearnerError("offline training needs at least two trajectories");
    if (cfg.batch_size <= 0 || cfg.epochs < 0) throw LearnerError("invalid batch size or epoch count");

    const auto holdout_count = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(cfg.holdout_fraction * static_cast<double>(dataset.size()))), 1,
        dataset.size() - 1);
    std::vector<Transition> train_tr;
    std::vector<Transition> hold_tr;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto trs = dataset[i].transitions();
        auto& dst = i + holdout_count < dataset.size() ? train_tr : hold_tr;
        dst.insert(dst.end(), trs.begin(), trs.end());
    }
    if (train_tr.size() < static_cast<std::size_t>(cfg.batch_size)) {
        throw LearnerError("dataset has " + std::to_string(train_tr.size()) + " training samples, fewer than batch size " +
                           std::to_string(cfg.batch_size));
    }

    const SampleMatrix train = to_matrix(make_samples(train_tr, cfg.loss));
    const SampleMatrix hold = to_matrix(make_samples(hold_tr, cfg.loss));

    std::vector<int> sizes{kNetInputDim};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(kNetOutputDim);
    TrainingResult result;
    result.params = MlpParams::initialize(sizes, cfg.elu_alpha, cfg.seed);

    // affine normalization from the training split
    auto& norm = result.params.norm;
    norm.in_offset = train.inputs.rowwise().mean();
    norm.in_scale = safe_std(train.inputs, norm.in_offset);
    const MatrixXd raw_targets = train.targets - train.bases;
    norm.out_offset = raw_targets.rowwise().mean();
    norm.out_scale = safe_std(raw_targets, norm.out_offset);

    AdamState adam = AdamState::zeros_like(result.params);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(train.inputs.cols()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    const auto batch = static_cast<Eigen::Index>(cfg.batch_size);
    SampleMatrix mb{MatrixXd(kNetInputDim, batch), MatrixXd(kNetOutputDim, batch), MatrixXd(kNetOutputDim, batch)};
    BatchCache cache;
    MatrixXd grads;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        Eigen::Index seen = 0;
        // incomplete trailing batch is dropped
        for (std::size_t start = 0; start + static_cast<std::size_t>(batch) <= order.size();
             start += static_cast<std::size_t>(batch)) {
            for (Eigen::Index j = 0; j < batch; ++j) {
                const Eigen::Index src = order[start + static_cast<std::size_t>(j)];
                mb.inputs.col(j) = train.inputs.col(src);
                mb.bases.col(j) = train.bases.col(src);
                mb.targets.col(j) = train.targets.col(src);
            }
            const MatrixXd out = forward_batch(result.params, mb.inputs, cache);
            const double loss = batch_loss(out, mb, cfg.loss.quat_loss, &grads);
            const Gradient g = backward_batch(result.params, cache, grads);
            adam_update(result.params, g, adam, cfg.learning_rate);
            epoch_loss += loss * static_cast<double>(batch);
            seen += batch;
        }
        result.curve.push_back({epoch, epoch_loss / static_cast<double>(seen), evaluate(result.params, hold, cfg.loss.quat_loss)});
    }

    result.holdout_loss = evaluate(result.params, hold, cfg.loss.quat_loss);
    result.train_samples = train_tr.size();
    result.holdout_samples = hold_tr.size();
    if (hold.inputs.cols() > 0) {
        BatchCache hc;
        const MatrixXd pred = forward_batch(result.params, hold.inputs, hc) + hold.bases;
        Eigen::Matrix<double, kNetOutputDim, Eigen::Dynamic> err(kNetOutputDim, pred.cols());
        for (Eigen::Index j = 0; j < pred.cols(); ++j) {
            Vec4 q = pred.col(j).segment<4>(6);
            q /= q.norm();
            const Vec4 qt = hold.targets.col(j).segment<4>(6);
            if (cfg.loss.quat_loss == QuatLoss::Canonical && q.dot(qt) < 0.0) q = -q;
            err.col(j).head<6>() = pred.col(j).head<6>() - hold.targets.col(j).head<6>();
            err.col(j).segment<4>(6) = q - qt;
        }
        const auto m = static_cast<double>(pred.cols());
        result.holdout_rmse = (err.array().square().rowwise().sum() / m).sqrt();
        const VectorXd mean = hold.targets.rowwise().mean();
        result.target_std = ((hold.targets.colwise() - mean).array().square().rowwise().sum() / m).sqrt();
    }
    return result;
}

void write_training_curve_csv(const std::vector<TrainingCurvePoint>& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw LearnerError("cannot write " + path.string());
    out.precision(17);
    out << "epoch,train_loss,holdout_loss\n";
    for (const auto& c : curve) out << c.epoch << ',' << c.train_loss << ',' << c.holdout_loss << '\n';
}

}  // namespace quadlearn
