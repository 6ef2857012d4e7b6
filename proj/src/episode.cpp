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

#include "quadlearn/episode.hpp"

#include <cstdio>
#include <fstream>
#include <random>

namespace quadlearn {

namespace {

void append(std::string& line, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), ",%.17g", v);
    line += buf;
}

void append_state(std::string& line, const State& x) {
    const StateVector v = x.to_vector();
    for (int i = 0; i < kStateDim; ++i) append(line, v(i));
}

TangentState sample_noise(const TangentState& stddev, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    TangentState d;
    for (int i = 0; i < kTangentDim; ++i) d(i) = stddev(i) * n(rng);
    return d;
}

std::uint64_t frozen_hash(const MlpParams* p) {
    if (p == nullptr || p->layers.empty()) return 0;
    return fingerprint_layers(*p, 0, p->layers.size() - 1);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RunRecord run_episode(const Scenario& scenario, const ControllerConfig& controller, ControllerMode mode,
                      const MlpParams* params, std::uint64_t seed, const EpisodeOptions& opt) {
    scenario.validate();
    ControllerConfig cc = controller;
    cc.mode = mode;
    cc.network.dt = scenario.control_dt;
    Controller ctrl(cc, params);

    RunRecord run;
    run.scenario = scenario.name;
    run.mode = mode;
    run.seed = seed;
    run.frozen_hash_before = uses_network(mode) ? frozen_hash(&ctrl.params()) : 0;

    Simulator sim(scenario.body, scenario.perturbation, derive_seed(seed, 2), {scenario.physics_dt});
    std::mt19937_64 noise_rng(derive_seed(seed, 1));
    std::mt19937_64 excite_rng(derive_seed(seed, 3));
    std::normal_distribution<double> excite(0.0, 1.0);
    const TangentState noise_std = scenario.noise.stddev();
    const bool noisy = scenario.noise.enabled();

    const double dt = scenario.control_dt;
    const auto steps = static_cast<int>(std::lround(scenario.duration / dt));
    sim.reset(flat_reference(reference_trajectory(scenario.trajectory, scenario.trajectory_params, 0.0), scenario.body).x);
    run.steps.reserve(static_cast<std::size_t>(steps));

    for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        const ReferenceWindow ref =
            reference_window(scenario.trajectory, scenario.trajectory_params, cc.nominal_body, t, dt, cc.horizon);
        StepRecord rec;
        rec.t = t;
        rec.x_true = sim.state().body;
        rec.x_hat = noisy ? boxplus(rec.x_true, sample_noise(noise_std, noise_rng)) : rec.x_true;
        rec.x_des = ref.states.front();
        try {
            rec.u = ctrl.control_step(rec.x_hat, t, ref.states, ref.controls, &rec.diag);
        } catch (const std::exception& e) {
            run.crashed = true;
            run.crash_time = t;
            run.crash_reason = std::string("controller: ") + e.what();
            break;
        }
        if (opt.excitation_std > 0.0) {
            for (int i = 0; i < kControlDim; ++i) rec.u(i) += opt.excitation_std * excite(excite_rng);
            rec.u = rec.u.cwiseMax(cc.u_min).cwiseMin(cc.u_max);
        }
        run.steps.push_back(rec);
        sim.step(rec.u, dt);
        if (outside_envelope(sim.state().body)) {
            run.crashed = true;
            run.crash_time = t + dt;
            run.crash_reason = "left the flight envelope";
            break;
        }
    }

    run.frozen_hash_after = uses_network(mode) ? frozen_hash(&ctrl.params()) : 0;
    if (!run.steps.empty()) {
        std::vector<State> xs;
        std::vector<State> ds;
        xs.reserve(run.steps.size());
        ds.reserve(run.steps.size());
        for (const auto& s : run.steps) {
            xs.push_back(s.x_true);
            ds.push_back(s.x_des);
        }
        run.metrics = compute_metrics(xs, ds);
    }
    return run;
}

void write_run_csv(const RunRecord& run, const std::filesystem::path& path, bool with_timing) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    std::string header = "t,mode,solve_ms,kkt,forward_error";
    for (int i = 1; i <= kTangentDim; ++i) header += ",sigma" + std::to_string(i);
    for (int i = 1; i <= kControlDim; ++i) header += ",u" + std::to_string(i);
    const char* names[] = {"px", "py", "pz", "vx", "vy", "vz", "qw", "qx", "qy", "qz", "wx", "wy", "wz"};
    for (const char* n : names) header += std::string(",") + n;
    for (const char* n : names) header += std::string(",des_") + n;
    out << header << '\n';

    const std::string mode = to_string(run.mode);
    for (const auto& s : run.steps) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", s.t);
        std::string line = buf;
        line += "," + mode;
        append(line, with_timing ? s.diag.solve_ms : 0.0);
        append(line, s.diag.kkt_residual);
        append(line, s.diag.forward_error);
        for (int i = 0; i < kTangentDim; ++i) append(line, s.diag.sigma_diag(i));
        for (int i = 0; i < kControlDim; ++i) append(line, s.u(i));
        append_state(line, s.x_true);
        append_state(line, s.x_des);
        out << line << '\n';
    }
}

Trajectory to_trajectory(const RunRecord& run, const std::string& name) {
    Trajectory traj;
    traj.name = name;
    traj.samples.reserve(run.steps.size());
    for (const auto& s : run.steps) traj.samples.push_back({s.t, s.x_hat, s.u});
    return traj;
}

std::vector<Trajectory> generate_dataset(const SuiteConfig& cfg) {
    cfg.dataset.validate();
    const auto& d = cfg.dataset;
    std::vector<TrajectoryId> shapes;
    for (const auto id : all_trajectories()) {
        if (id != TrajectoryId::Hover) shapes.push_back(id);
    }
    std::vector<Trajectory> out;
    for (int i = 0; i < d.trajectories; ++i) {
        std::mt19937_64 rng(derive_seed(d.seed, 100 + static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> amp(d.amplitude_min, d.amplitude_max);
        std::uniform_real_distribution<double> period(d.period_min, d.period_max);
        Scenario s;
        s.name = "dataset";
        s.body = cfg.controller.nominal_body;
        s.trajectory = shapes[static_cast<std::size_t>(i) % shapes.size()];
        s.trajectory_params.amplitude.x() = amp(rng);
        s.trajectory_params.amplitude.y() = amp(rng);
        s.trajectory_params.amplitude.z() = 0.3 * amp(rng);
        s.trajectory_params.period = period(rng);
        s.duration = d.duration;
        s.control_dt = cfg.controller.network.dt;
        s.physics_dt = d.physics_dt;
        s.noise = d.noise;
        const RunRecord run = run_episode(s, cfg.controller, ControllerMode::Nominal, nullptr, derive_seed(d.seed, i),
                                          {d.excitation_std});
        char name[64];
        std::snprintf(name, sizeof(name), "flight_%03d_%s", i, to_string(s.trajectory).c_str());
        Trajectory traj = to_trajectory(run, name);
        if (traj.samples.size() >= 2) out.push_back(std::move(traj));
    }
    return out;
}

}  // namespace quadlearn
