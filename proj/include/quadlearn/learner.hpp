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

#include <cstdint>
#include <deque>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadlearn/dynamics.hpp"
#include "quadlearn/mlp.hpp"
#include "quadlearn/state.hpp"

namespace quadlearn {

class LearnerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One observed step: x_next was measured after applying u_prev at x_prev.
struct Transition {
    State x_prev;
    Control u_prev{Control::Zero()};
    State x_next;
    double t{0.0};  ///< timestamp of x_next

    [[nodiscard]] bool is_finite() const;
};

enum class QuatLoss {
    Canonical,  ///< sign of the prediction matched to the target before differencing
    Raw,        ///< literal componentwise difference
};

struct ForwardErrorOptions {
    NeuralDynamicsOptions model{};
    QuatLoss quat_loss{QuatLoss::Canonical};
};

struct ForwardError {
    double loss{0.0};
    Gradient grad;
};

/// Squared norm of [v, ω, q] prediction error for one transition, with its gradient.
[[nodiscard]] ForwardError forward_error(const MlpParams& params, const Transition& tr,
                                         const ForwardErrorOptions& opt = {});

/// Loss only, without backpropagation.
[[nodiscard]] double forward_error_value(const MlpParams& params, const Transition& tr,
                                         const ForwardErrorOptions& opt = {});

/// Fixed-capacity FIFO of the most recent transitions.
class ReplayWindow {
public:
    explicit ReplayWindow(std::size_t capacity);

    /// Returns false (and leaves the window unchanged) for a non-finite
    /// transition or a timestamp that does not advance.
    bool push(const Transition& tr);

    [[nodiscard]] std::size_t size() const { return items_.size(); }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] bool empty() const { return items_.empty(); }
    [[nodiscard]] bool full() const { return items_.size() == capacity_; }
    [[nodiscard]] const std::deque<Transition>& items() const { return items_; }
    void clear() { items_.clear(); }

private:
    std::size_t capacity_;
    std::deque<Transition> items_;
};

/// Mini-batch SGD on the last layer over the whole window.
[[nodiscard]] MlpParams online_step(const MlpParams& params, const ReplayWindow& window, double lr,
                                    const ForwardErrorOptions& opt = {});

/// Timestamped states and the control applied from each sample to the next.
struct TrajectorySample {
    double t{0.0};
    State x;
    Control u{Control::Zero()};
};

struct Trajectory {
    std::string name;
    std::vector<TrajectorySample> samples;

    [[nodiscard]] std::vector<Transition> transitions() const;
};

/// CSV with header `t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,u0,u1,u2,u3`.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
[[nodiscard]] Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// FNV-1a over the bytes of a file.
[[nodiscard]] std::uint64_t file_checksum(const std::filesystem::path& path);

struct TrainingConfig {
    std::vector<int> hidden{64, 32, 32};
    double elu_alpha{1.0};
    int epochs{2000};
    int batch_size{1024};
    double learning_rate{1e-3};
    std::uint64_t seed{1};
    double holdout_fraction{0.15};
    ForwardErrorOptions loss{};
};

struct TrainingCurvePoint {
    int epoch{0};
    double train_loss{0.0};
    double holdout_loss{0.0};
};

struct TrainingResult {
    MlpParams params;
    std::vector<TrainingCurvePoint> curve;
    double holdout_loss{0.0};
    /// Per-component one-step RMSE on the holdout set, [v, ω, q].
    Eigen::Matrix<double, kNetOutputDim, 1> holdout_rmse{Eigen::Matrix<double, kNetOutputDim, 1>::Zero()};
    /// Per-component standard deviation of the holdout targets.
    Eigen::Matrix<double, kNetOutputDim, 1> target_std{Eigen::Matrix<double, kNetOutputDim, 1>::Zero()};
    std::size_t train_samples{0};
    std::size_t holdout_samples{0};
};

/// Full-network Adam on shuffled mini-batches of the mean forward error.
/// The last ceil(holdout_fraction · count) trajectories are held out.
[[nodiscard]] TrainingResult train_offline(const std::vector<Trajectory>& dataset, const TrainingConfig& cfg);

/// Mean forward error over a set of transitions.
[[nodiscard]] double mean_forward_error(const MlpParams& params, const std::vector<Transition>& data,
                                        const ForwardErrorOptions& opt = {});

void write_training_curve_csv(const std::vector<TrainingCurvePoint>& curve, const std::filesystem::path& path);

}  // namespace quadlearn
