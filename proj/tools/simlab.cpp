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

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "quadlearn/suite.hpp"

using namespace quadlearn;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string mode;
    std::string params;
    bool timing{false};
};

std::filesystem::path output_dir(const SuiteConfig& cfg, const Common& c) {
    return c.out.empty() ? cfg.output_dir : std::filesystem::path(c.out);
}

int cmd_run(const Common& c) {
    SuiteConfig cfg = load_suite_config(c.config);
    if (!c.params.empty()) cfg.params_path = c.params;
    SuiteOptions opt;
    if (!c.mode.empty()) opt.modes = std::vector<ControllerMode>{parse_controller_mode(c.mode)};
    opt.seed = c.seed;
    opt.timing = c.timing || cfg.record_timing;
    opt.on_run = [](const RunSummary& r) {
        std::fprintf(stderr, "%-20s %-10s seed %-4llu pos_rmse %.4f%s\n", r.scenario.c_str(), to_string(r.mode).c_str(),
                     static_cast<unsigned long long>(r.seed), r.position_rmse, r.crashed ? "  CRASHED" : "");
    };
    const auto dir = output_dir(cfg, c);
    const SuiteResult result = run_suite(cfg, dir, opt);
    std::cout << summary_markdown(result);
    std::cout << "artifacts: " << dir.string() << "\n";
    return result.all_checks_hold() ? 0 : 1;
}

int cmd_train(const Common& c) {
    SuiteConfig cfg = load_suite_config(c.config);
    if (c.seed) {
        cfg.training.seed = *c.seed;
        cfg.dataset.seed = *c.seed;
    }
    const auto dir = output_dir(cfg, c);
    const auto params_path = !c.params.empty() ? std::filesystem::path(c.params)
                             : c.out.empty()    ? cfg.params_path
                                                : dir / "model" / "params.json";
    std::filesystem::create_directories(dir / "dataset");
    if (params_path.has_parent_path()) std::filesystem::create_directories(params_path.parent_path());

    const auto t0 = std::chrono::steady_clock::now();
    const auto dataset = generate_dataset(cfg);
    std::size_t samples = 0;
    for (const auto& traj : dataset) {
        write_trajectory_csv(traj, dir / "dataset" / (traj.name + ".csv"));
        samples += traj.samples.size();
    }
    std::fprintf(stderr, "dataset: %zu flights, %zu samples (%.1f min)\n", dataset.size(), samples,
                 static_cast<double>(samples) * cfg.controller.network.dt / 60.0);

    cfg.training.loss = {cfg.controller.network, cfg.controller.quat_loss};
    const TrainingResult res = train_offline(dataset, cfg.training);
    save_params(res.params, params_path);
    write_training_curve_csv(res.curve, dir / "training_curve.csv");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::ordered_json j;
    j["flights"] = dataset.size();
    j["samples"] = samples;
    j["train_samples"] = res.train_samples;
    j["holdout_samples"] = res.holdout_samples;
    j["holdout_loss"] = res.holdout_loss;
    j["holdout_rmse"] = std::vector<double>(res.holdout_rmse.data(), res.holdout_rmse.data() + kNetOutputDim);
    j["params"] = params_path.generic_string();
    std::ofstream(dir / "training.json") << j.dump(2) << "\n";
    std::cout << "holdout forward error " << res.holdout_loss << " written " << params_path.string() << " in "
              << secs << " s\n";
    return 0;
}

int cmd_bench(const Common& c, int steps) {
    SuiteConfig cfg = load_suite_config(c.config);
    if (!c.params.empty()) cfg.params_path = c.params;
    const ControllerMode mode = c.mode.empty() ? ControllerMode::Adaptive : parse_controller_mode(c.mode);
    std::optional<MlpParams> params;
    if (uses_network(mode)) params = load_params(cfg.params_path);
    Scenario s = cfg.scenarios.empty() ? Scenario{} : cfg.scenarios.front();
    s.duration = steps * s.control_dt;
    if (c.seed) s.seeds = {*c.seed};
    const RunRecord run = run_episode(s, cfg.controller, mode, params ? &*params : nullptr, s.seeds.front());
    std::vector<double> ms;
    for (const auto& st : run.steps) ms.push_back(st.diag.solve_ms);
    if (ms.empty()) {
        std::cerr << "no control steps recorded\n";
        return 1;
    }
    std::sort(ms.begin(), ms.end());
    const double median = ms[ms.size() / 2];
    std::printf("mode %s scenario %s steps %zu median %.3f ms p90 %.3f ms max %.3f ms\n", to_string(mode).c_str(),
                s.name.c_str(), ms.size(), median, ms[ms.size() * 9 / 10], ms.back());
    return median < 50.0 ? 0 : 1;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("config", c.config, "scenario YAML file")->required()->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "override seeds");
    app->add_option("--out", c.out, "artifact directory");
    app->add_option("--mode", c.mode, "nominal, static, static-ua, static-ol or adaptive");
    app->add_option("--params", c.params, "network parameter file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simlab: learned-dynamics MPC experiments"};
    app.require_subcommand(1);
    Common c;
    int steps = 200;
    auto* run = app.add_subcommand("run", "run the scenario suite");
    add_common(run, c);
    run->add_flag("--timing", c.timing, "write measured solve times into the CSVs");
    auto* train = app.add_subcommand("train", "generate the dataset and train the network offline");
    add_common(train, c);
    auto* bench = app.add_subcommand("bench", "time control steps");
    add_common(bench, c);
    bench->add_option("--steps", steps, "control steps to time")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(c);
        if (*train) return cmd_train(c);
        if (*bench) return cmd_bench(c, steps);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
