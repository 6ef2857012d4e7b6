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

#include <fstream>

#include "quadlearn/learner.hpp"
#include "test_util.hpp"

using namespace quadlearn;

namespace {

MlpParams small_network(std::uint64_t seed) {
    const std::vector<int> sizes{kNetInputDim, 16, 12, kNetOutputDim};
    MlpParams p = MlpParams::initialize(sizes, 1.0, seed);
    p.layers.back().bias(6) = 1.0;
    return p;
}

Trajectory random_flight(std::uint64_t seed, int steps) {
    std::mt19937_64 rng(seed);
    const RigidBodyParams body;
    Trajectory t;
    t.name = "flight" + std::to_string(seed);
    State x = hover_state();
    std::normal_distribution<double> n(0.0, 0.03);
    for (int k = 0; k < steps; ++k) {
        Control u = Control::Constant(body.hover_force());
        for (int i = 0; i < 4; ++i) u(i) += n(rng);
        t.samples.push_back({k * 0.05, x, u});
        x = analytic_step(body, x, u, 0.05);
    }
    return t;
}

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "quadlearn_test_learner";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(ForwardError, ZeroOnOwnPrediction) {
    std::mt19937_64 rng(1);
    const MlpParams p = small_network(1);
    const State x = test::random_state(rng);
    const Control u = test::random_control(rng);
    const Transition tr{x, u, predict(p, x, u), 1.0};
    const ForwardError fe = forward_error(p, tr);
    EXPECT_NEAR(fe.loss, 0.0, 1e-24);
    for (const auto& l : fe.grad.layers) EXPECT_LT(l.weight.norm(), 1e-10);
}

TEST(ForwardError, CanonicalLossIgnoresQuaternionSign) {
    std::mt19937_64 rng(2);
    const MlpParams p = small_network(2);
    Transition tr{test::random_state(rng), test::random_control(rng), test::random_state(rng), 1.0};
    const double a = forward_error_value(p, tr);
    tr.x_next.q = -tr.x_next.q;
    EXPECT_NEAR(forward_error_value(p, tr), a, 1e-12);
}

TEST(ForwardError, GradientMatchesCentralDifferences) {
    std::mt19937_64 rng(3);
    for (int inst = 0; inst < 10; ++inst) {
        MlpParams p = small_network(static_cast<std::uint64_t>(inst) + 10);
        const Transition tr{test::random_state(rng), test::random_control(rng), test::random_state(rng), 1.0};
        const ForwardError fe = forward_error(p, tr);
        EXPECT_NEAR(fe.loss, forward_error_value(p, tr), 1e-12);
        for (std::size_t k = 0; k < p.layers.size(); ++k) {
            auto& W = p.layers[k].weight;
            for (int probe = 0; probe < 10; ++probe) {
                const Eigen::Index i = std::uniform_int_distribution<Eigen::Index>(0, W.size() - 1)(rng);
                const double orig = W.data()[i];
                W.data()[i] = orig + 1e-6;
                const double fp = forward_error_value(p, tr);
                W.data()[i] = orig - 1e-6;
                const double fm = forward_error_value(p, tr);
                W.data()[i] = orig;
                const double fd = (fp - fm) / 2e-6;
                const double an = fe.grad.layers[k].weight.data()[i];
                EXPECT_LT(std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6}), 1e-5);
            }
        }
    }
}

TEST(ReplayWindow, FifoWithValidation) {
    ReplayWindow w(3);
    State bad;
    bad.v.x() = std::nan("");
    EXPECT_FALSE(w.push({bad, Control::Zero(), State{}, 0.0}));
    for (int k = 1; k <= 5; ++k) EXPECT_TRUE(w.push({State{}, Control::Zero(), State{}, static_cast<double>(k)}));
    EXPECT_TRUE(w.full());
    EXPECT_EQ(w.items().front().t, 3.0);
    EXPECT_EQ(w.items().back().t, 5.0);
    EXPECT_FALSE(w.push({State{}, Control::Zero(), State{}, 5.0}));
    EXPECT_EQ(w.size(), 3u);
    EXPECT_THROW(ReplayWindow(0), LearnerError);
}

TEST(OnlineStep, FreezesFeaturesAndDescends) {
    const MlpParams p = small_network(4);
    const Trajectory flight = random_flight(4, 21);
    ReplayWindow w(20);
    for (const auto& tr : flight.transitions()) w.push(tr);
    ASSERT_TRUE(w.full());
    const std::vector<Transition> data(w.items().begin(), w.items().end());
    const MlpParams q = online_step(p, w, 1e-3);
    EXPECT_EQ(fingerprint_layers(p, 0, p.layers.size() - 1), fingerprint_layers(q, 0, q.layers.size() - 1));
    EXPECT_NE(fingerprint(p), fingerprint(q));
    EXPECT_LT(mean_forward_error(q, data), mean_forward_error(p, data));

    // one SGD step on the mean gradient of the window
    Gradient mean = Gradient::zeros_like(p);
    for (const auto& tr : data) mean += forward_error(p, tr).grad;
    mean *= 1.0 / static_cast<double>(data.size());
    EXPECT_LT((q.layers.back().weight - (p.layers.back().weight - 1e-3 * mean.layers.back().weight)).norm(), 1e-13);
    EXPECT_THROW((void)online_step(p, ReplayWindow(5), 1e-3), LearnerError);
}

TEST(Dataset, CsvRoundTripIsExact) {
    const Trajectory t = random_flight(5, 30);
    const auto path = temp_file("roundtrip.csv");
    write_trajectory_csv(t, path);
    const Trajectory back = read_trajectory_csv(path);
    ASSERT_EQ(back.samples.size(), t.samples.size());
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
        EXPECT_EQ(back.samples[k].t, t.samples[k].t);
        EXPECT_EQ(back.samples[k].x, t.samples[k].x);
        EXPECT_EQ(back.samples[k].u, t.samples[k].u);
    }
    const auto copy = temp_file("roundtrip_copy.csv");
    write_trajectory_csv(back, copy);
    EXPECT_EQ(file_checksum(path), file_checksum(copy));
}

TEST(Dataset, MalformedRowReportsLine) {
    const auto path = temp_file("bad.csv");
    {
        std::ofstream out(path);
        out << "t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,u0,u1,u2,u3\n";
        out << "0,0,0,0,0,0,0,1,0,0,0,0,0,0,0.6,0.6,0.6,0.6\n";
        out << "0.05,0,0,zero,0,0,0,1,0,0,0,0,0,0,0.6,0.6,0.6,0.6\n";
    }
    try {
        (void)read_trajectory_csv(path);
        FAIL() << "expected LearnerError";
    } catch (const LearnerError& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
}

TEST(Dataset, TransitionsPairConsecutiveSamples) {
    const Trajectory t = random_flight(6, 5);
    const auto tr = t.transitions();
    ASSERT_EQ(tr.size(), 4u);
    EXPECT_EQ(tr[1].x_prev, t.samples[1].x);
    EXPECT_EQ(tr[1].u_prev, t.samples[1].u);
    EXPECT_EQ(tr[1].x_next, t.samples[2].x);
    EXPECT_EQ(tr[1].t, t.samples[2].t);
}

TEST(TrainOffline, ReducesHoldoutErrorDeterministically) {
    std::vector<Trajectory> data;
    for (std::uint64_t s = 0; s < 6; ++s) data.push_back(random_flight(s + 20, 120));
    TrainingConfig cfg;
    cfg.hidden = {32, 16};
    cfg.epochs = 60;
    cfg.batch_size = 64;
    cfg.holdout_fraction = 0.2;
    const TrainingResult a = train_offline(data, cfg);
    const TrainingResult b = train_offline(data, cfg);
    EXPECT_EQ(fingerprint(a.params), fingerprint(b.params));
    ASSERT_EQ(a.curve.size(), 60u);
    EXPECT_LT(a.holdout_loss, 0.1 * a.curve.front().holdout_loss);
    EXPECT_EQ(a.holdout_samples, 2u * 119u);
    EXPECT_THROW((void)train_offline({data[0]}, cfg), LearnerError);
}
