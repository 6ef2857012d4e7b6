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

#include "quadlearn/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace quadlearn {

TangentState MeasurementNoise::stddev() const {
    TangentState s;
    s << Vec3::Constant(position), Vec3::Constant(velocity), Vec3::Constant(attitude), Vec3::Constant(rate);
    return s;
}

TangentCov MeasurementNoise::covariance() const { return stddev().cwiseAbs2().asDiagonal(); }

void Scenario::validate() const {
    const std::string where = "scenario '" + name + "': ";
    if (name.empty()) throw ConfigError("scenario name must not be empty");
    if (!(duration > 0.0)) throw ConfigError(where + "duration must be positive");
    if (!(control_dt > 0.0) || !(physics_dt > 0.0) || physics_dt > control_dt) {
        throw ConfigError(where + "need 0 < physics_dt <= control_dt");
    }
    if (!(noise.stddev().array() >= 0.0).all()) throw ConfigError(where + "noise must be non-negative");
    if (seeds.empty()) throw ConfigError(where + "at least one seed is required");
    try {
        body.validate();
        perturbation.validate();
        trajectory_params.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
    }
}

void DatasetConfig::validate() const {
    if (trajectories < 2) throw ConfigError("dataset.trajectories must be at least 2");
    if (!(duration > 0.0)) throw ConfigError("dataset.duration must be positive");
    if (!(excitation_std >= 0.0)) throw ConfigError("dataset.excitation_std must be non-negative");
    if (!(amplitude_min > 0.0 && amplitude_min <= amplitude_max)) throw ConfigError("dataset amplitude range is invalid");
    if (!(period_min > 0.0 && period_min <= period_max)) throw ConfigError("dataset period range is invalid");
}

void SuiteConfig::validate() const {
    controller.validate();
    dataset.validate();
    std::set<std::string> names;
    for (const auto& s : scenarios) {
        s.validate();
        if (!names.insert(s.name).second) throw ConfigError("duplicate scenario name '" + s.name + "'");
        if (std::abs(s.control_dt - controller.network.dt) > 1e-12) {
            throw ConfigError("scenario '" + s.name + "': control_dt must equal the model step dt");
        }
    }
}

SuiteConfig default_suite_config() {
    SuiteConfig c;
    c.controller.online_lr = 2e-3;
    return c;
}

namespace {

// Field reader that reports source position and dotted path on every error.
class Reader {
public:
    Reader(YAML::Node node, std::string path, const std::string* source)
        : node_(std::move(node)), path_(std::move(path)), source_(source) {}

    [[noreturn]] void fail(const std::string& msg) const { fail_at(node_, path_, msg); }

    [[noreturn]] void fail_at(const YAML::Node& n, const std::string& field, const std::string& msg) const {
        std::ostringstream os;
        os << *source_;
        const auto mark = n.Mark();
        if (mark.line >= 0) os << ':' << mark.line + 1 << ':' << mark.column + 1;
        os << ": " << (field.empty() ? std::string("<root>") : field) << ": " << msg;
        throw ConfigError(os.str());
    }

    void require_map() const {
        if (!node_.IsMap()) fail("expected a mapping");
    }

    void allow(std::initializer_list<const char*> keys) const {
        require_map();
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!ok.count(key)) fail_at(kv.first, child_path(key), "unknown key");
        }
    }

    [[nodiscard]] bool has(const char* key) const { return node_[key].IsDefined() && !node_[key].IsNull(); }

    [[nodiscard]] Reader child(const char* key) const { return {node_[key], child_path(key), source_}; }

    template <typename T>
    void read(const char* key, T& out) const {
        if (!has(key)) return;
        const YAML::Node n = node_[key];
        try {
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            fail_at(n, child_path(key), "cannot convert '" + scalar_text(n) + "'");
        }
    }

    void read_positive(const char* key, double& out) const {
        read(key, out);
        if (has(key) && !(out > 0.0)) fail_at(node_[key], child_path(key), "must be positive");
    }

    void read_non_negative(const char* key, double& out) const {
        read(key, out);
        if (has(key) && !(out >= 0.0)) fail_at(node_[key], child_path(key), "must be non-negative");
    }

    template <int N>
    void read_vector(const char* key, Eigen::Matrix<double, N, 1>& out) const {
        if (!has(key)) return;
        const YAML::Node n = node_[key];
        if (!n.IsSequence() || static_cast<int>(n.size()) != N) {
            fail_at(n, child_path(key), "expected a list of " + std::to_string(N) + " numbers");
        }
        for (int i = 0; i < N; ++i) {
            try {
                out(i) = n[static_cast<std::size_t>(i)].as<double>();
            } catch (const YAML::Exception&) {
                fail_at(n[static_cast<std::size_t>(i)], child_path(key) + "[" + std::to_string(i) + "]", "not a number");
            }
        }
    }

    template <typename T>
    void read_list(const char* key, std::vector<T>& out) const {
        if (!has(key)) return;
        const YAML::Node n = node_[key];
        if (!n.IsSequence()) fail_at(n, child_path(key), "expected a list");
        std::vector<T> v;
        for (std::size_t i = 0; i < n.size(); ++i) {
            try {
                v.push_back(n[i].as<T>());
            } catch (const YAML::Exception&) {
                fail_at(n[i], child_path(key) + "[" + std::to_string(i) + "]", "cannot convert '" + scalar_text(n[i]) + "'");
            }
        }
        out = std::move(v);
    }

    template <typename F>
    auto parse_named(const char* key, F&& parse) const {
        std::string text;
        read(key, text);
        try {
            return parse(text);
        } catch (const ConfigError& e) {
            fail_at(node_[key], child_path(key), e.what());
        }
    }

    [[nodiscard]] const YAML::Node& node() const { return node_; }
    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] const std::string* source() const { return source_; }

private:
    [[nodiscard]] std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    static std::string scalar_text(const YAML::Node& n) { return n.IsScalar() ? n.Scalar() : std::string("<non-scalar>"); }

    YAML::Node node_;
    std::string path_;
    const std::string* source_;
};

void read_body(const Reader& r, RigidBodyParams& b) {
    r.allow({"mass", "inertia", "arm_length", "torque_coeff", "gravity"});
    r.read_positive("mass", b.mass);
    Vec3 diag = b.inertia.diagonal();
    r.read_vector<3>("inertia", diag);
    b.inertia = diag.asDiagonal();
    r.read_positive("arm_length", b.arm_length);
    r.read_non_negative("torque_coeff", b.torque_coeff);
    r.read_non_negative("gravity", b.gravity);
    try {
        b.validate();
    } catch (const ConfigError& e) {
        r.fail(e.what());
    }
}

void read_noise(const Reader& r, MeasurementNoise& n) {
    r.allow({"position", "velocity", "attitude", "rate"});
    r.read_non_negative("position", n.position);
    r.read_non_negative("velocity", n.velocity);
    r.read_non_negative("attitude", n.attitude);
    r.read_non_negative("rate", n.rate);
}

void read_perturbation(const Reader& r, Perturbation& p) {
    r.require_map();
    if (!r.has("type")) r.fail("missing 'type'");
    p.kind = r.parse_named("type", parse_perturbation);
    switch (p.kind) {
        case PerturbationKind::None: r.allow({"type"}); break;
        case PerturbationKind::Payload:
            r.allow({"type", "mass", "cable_length", "baumgarte"});
            r.read_positive("mass", p.payload.mass);
            r.read_positive("cable_length", p.payload.cable_length);
            r.read_non_negative("baumgarte", p.payload.baumgarte);
            break;
        case PerturbationKind::MixedPropellers:
            r.allow({"type", "efficiency"});
            r.read_vector<4>("efficiency", p.propellers.efficiency);
            if (!(p.propellers.efficiency.array() > 0.0).all()) r.fail("efficiency factors must be positive");
            break;
        case PerturbationKind::Wind:
            r.allow({"type", "speed", "direction", "gust_std", "gust_time_constant", "drag_coeff"});
            r.read_non_negative("speed", p.wind.speed);
            r.read_vector<3>("direction", p.wind.direction);
            r.read_non_negative("gust_std", p.wind.gust_std);
            r.read_positive("gust_time_constant", p.wind.gust_time_constant);
            r.read_non_negative("drag_coeff", p.wind.drag_coeff);
            if (!(p.wind.direction.norm() > 0.0)) r.fail("wind direction must be non-zero");
            break;
    }
}

Scenario read_scenario(const Reader& r, const Scenario& defaults) {
    r.allow({"name", "trajectory", "trajectory_params", "duration", "perturbation", "seeds", "vehicle", "noise"});
    Scenario s = defaults;
    if (!r.has("name")) r.fail("missing 'name'");
    r.read("name", s.name);
    if (r.has("trajectory")) s.trajectory = r.parse_named("trajectory", parse_trajectory);
    if (r.has("trajectory_params")) {
        const Reader t = r.child("trajectory_params");
        t.allow({"center", "amplitude", "period"});
        t.read_vector<3>("center", s.trajectory_params.center);
        t.read_vector<3>("amplitude", s.trajectory_params.amplitude);
        t.read_positive("period", s.trajectory_params.period);
    }
    r.read_positive("duration", s.duration);
    if (r.has("perturbation")) read_perturbation(r.child("perturbation"), s.perturbation);
    r.read_list("seeds", s.seeds);
    if (r.has("vehicle")) read_body(r.child("vehicle"), s.body);
    if (r.has("noise")) read_noise(r.child("noise"), s.noise);
    try {
        s.validate();
    } catch (const ConfigError& e) {
        r.fail(e.what());
    }
    return s;
}

}  // namespace

SuiteConfig parse_suite_config(const std::string& yaml_text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": syntax error: " + e.msg);
    }
    SuiteConfig c = default_suite_config();
    if (root.IsNull()) return c;
    const Reader r(root, "", &source);
    r.allow({"name", "output_dir", "params", "seeds", "modes", "record_timing", "vehicle", "simulation", "controller",
             "uncertainty", "online", "training", "dataset", "scenarios"});
    r.read("name", c.name);
    std::string path;
    if (r.has("output_dir")) {
        r.read("output_dir", path);
        c.output_dir = path;
    }
    if (r.has("params")) {
        r.read("params", path);
        c.params_path = path;
    }
    r.read("record_timing", c.record_timing);

    Scenario defaults;
    r.read_list("seeds", defaults.seeds);
    if (r.has("modes")) {
        std::vector<std::string> names;
        r.read_list("modes", names);
        c.modes.clear();
        for (std::size_t i = 0; i < names.size(); ++i) {
            try {
                c.modes.push_back(parse_controller_mode(names[i]));
            } catch (const ConfigError& e) {
                r.fail_at(root["modes"][i], "modes[" + std::to_string(i) + "]", e.what());
            }
        }
    }
    if (r.has("vehicle")) read_body(r.child("vehicle"), defaults.body);
    c.controller.nominal_body = defaults.body;

    if (r.has("simulation")) {
        const Reader s = r.child("simulation");
        s.allow({"control_dt", "physics_dt", "noise"});
        s.read_positive("control_dt", defaults.control_dt);
        s.read_positive("physics_dt", defaults.physics_dt);
        if (s.has("noise")) read_noise(s.child("noise"), defaults.noise);
    }
    c.controller.network.dt = defaults.control_dt;
    c.dataset.noise = defaults.noise;
    c.dataset.physics_dt = defaults.physics_dt;

    if (r.has("controller")) {
        const Reader s = r.child("controller");
        s.allow({"horizon", "Qx", "Qu", "lm_lambda", "u_min", "u_max", "residual"});
        s.read("horizon", c.controller.horizon);
        if (s.has("horizon") && c.controller.horizon < 1) s.fail("horizon must be at least 1");
        s.read_vector<kTangentDim>("Qx", c.controller.Qx);
        s.read_vector<kControlDim>("Qu", c.controller.Qu);
        s.read_non_negative("lm_lambda", c.controller.lm_lambda);
        double bound = c.controller.u_min(0);
        s.read("u_min", bound);
        c.controller.u_min.setConstant(bound);
        bound = c.controller.u_max(0);
        s.read("u_max", bound);
        c.controller.u_max.setConstant(bound);
        s.read("residual", c.controller.network.residual);
    }
    if (r.has("uncertainty")) {
        const Reader s = r.child("uncertainty");
        s.allow({"alpha", "beta", "kappa", "initial_variance", "sigma_min", "sigma_max", "normalized", "sigma_mode",
                 "parallel"});
        s.read_positive("alpha", c.controller.unscented.alpha);
        s.read("beta", c.controller.unscented.beta);
        s.read("kappa", c.controller.unscented.kappa);
        TangentState var = c.controller.initial_cov.diagonal();
        s.read_vector<kTangentDim>("initial_variance", var);
        if (!(var.array() >= 0.0).all()) s.fail("initial_variance must be non-negative");
        c.controller.initial_cov = var.asDiagonal();
        s.read_positive("sigma_min", c.controller.weighting.sigma_min);
        s.read_positive("sigma_max", c.controller.weighting.sigma_max);
        s.read("normalized", c.controller.weighting.normalized);
        if (s.has("sigma_mode")) {
            c.controller.sigma_mode = s.parse_named("sigma_mode", [](const std::string& v) {
                if (v == "recursive") return SigmaMode::Recursive;
                if (v == "reset") return SigmaMode::Reset;
                throw ConfigError("expected 'recursive' or 'reset', got '" + v + "'");
            });
        }
        bool parallel = false;
        s.read("parallel", parallel);
        c.controller.ut_execution = parallel ? Execution::Parallel : Execution::Serial;
    }
    if (r.has("online")) {
        const Reader s = r.child("online");
        s.allow({"window", "lr", "quat_loss"});
        int window = static_cast<int>(c.controller.window);
        s.read("window", window);
        if (window < 1) s.fail("window must be positive");
        c.controller.window = static_cast<std::size_t>(window);
        s.read_non_negative("lr", c.controller.online_lr);
        if (s.has("quat_loss")) {
            c.controller.quat_loss = s.parse_named("quat_loss", [](const std::string& v) {
                if (v == "canonical") return QuatLoss::Canonical;
                if (v == "raw") return QuatLoss::Raw;
                throw ConfigError("expected 'canonical' or 'raw', got '" + v + "'");
            });
        }
    }
    if (r.has("training")) {
        const Reader s = r.child("training");
        s.allow({"hidden", "elu_alpha", "epochs", "batch_size", "learning_rate", "seed", "holdout_fraction"});
        s.read_list("hidden", c.training.hidden);
        s.read_positive("elu_alpha", c.training.elu_alpha);
        s.read("epochs", c.training.epochs);
        s.read("batch_size", c.training.batch_size);
        s.read_positive("learning_rate", c.training.learning_rate);
        s.read("seed", c.training.seed);
        s.read("holdout_fraction", c.training.holdout_fraction);
        if (!(c.training.holdout_fraction > 0.0 && c.training.holdout_fraction < 1.0)) {
            s.fail("holdout_fraction must lie in (0, 1)");
        }
        if (c.training.epochs < 0 || c.training.batch_size < 1) s.fail("epochs must be >= 0 and batch_size >= 1");
    }
    c.training.loss = {c.controller.network, c.controller.quat_loss};
    if (r.has("dataset")) {
        const Reader s = r.child("dataset");
        s.allow({"trajectories", "duration", "excitation_std", "seed", "amplitude_min", "amplitude_max", "period_min",
                 "period_max"});
        s.read("trajectories", c.dataset.trajectories);
        s.read_positive("duration", c.dataset.duration);
        s.read_non_negative("excitation_std", c.dataset.excitation_std);
        s.read("seed", c.dataset.seed);
        s.read_positive("amplitude_min", c.dataset.amplitude_min);
        s.read_positive("amplitude_max", c.dataset.amplitude_max);
        s.read_positive("period_min", c.dataset.period_min);
        s.read_positive("period_max", c.dataset.period_max);
    }
    if (r.has("scenarios")) {
        const YAML::Node list = root["scenarios"];
        if (!list.IsSequence()) r.fail_at(list, "scenarios", "expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
            c.scenarios.push_back(
                read_scenario(Reader(list[i], "scenarios[" + std::to_string(i) + "]", &source), defaults));
        }
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return c;
}

SuiteConfig load_suite_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_suite_config(ss.str(), path.string());
}

}  // namespace quadlearn
