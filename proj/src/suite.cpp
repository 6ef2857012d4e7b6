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

#include "quadlearn/suite.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>

namespace quadlearn {

namespace {

std::string fmt(double v, const char* spec = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

std::vector<ControllerMode> ordered_modes(const std::vector<RunSummary>& runs) {
    std::vector<ControllerMode> modes;
    for (const auto& r : runs) {
        if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
    }
    return modes;
}

}  // namespace

std::pair<double, double> mean_std(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

bool ranks_before(const CellSummary& a, const CellSummary& b) {
    if (a.crashes != b.crashes) return a.crashes < b.crashes;
    return a.position_rmse_mean < b.position_rmse_mean;
}

bool SuiteResult::all_checks_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const OrderingCheck& c) { return c.holds; });
}

const CellSummary* SuiteResult::cell(const std::string& scenario, ControllerMode mode) const {
    for (const auto& c : cells) {
        if (c.scenario == scenario && c.mode == mode) return &c;
    }
    return nullptr;
}

SuiteResult run_suite(const SuiteConfig& cfg, const std::filesystem::path& out_dir, const SuiteOptions& opt) {
    const auto& modes = opt.modes ? *opt.modes : cfg.modes;
    const bool needs_network = std::any_of(modes.begin(), modes.end(), uses_network) && !cfg.scenarios.empty();
    if (!needs_network) return run_suite(cfg, nullptr, out_dir, opt);
    if (!std::filesystem::exists(cfg.params_path)) {
        throw ConfigError("parameter file " + cfg.params_path.string() + " not found; run `simlab train` first");
    }
    const MlpParams params = load_params(cfg.params_path);
    return run_suite(cfg, &params, out_dir, opt);
}

SuiteResult run_suite(const SuiteConfig& cfg, const MlpParams* params, const std::filesystem::path& out_dir,
                      const SuiteOptions& opt) {
    cfg.validate();
    const auto& modes = opt.modes ? *opt.modes : cfg.modes;
    std::filesystem::create_directories(out_dir);

    SuiteResult result;
    for (const auto& scenario : cfg.scenarios) {
        const auto dir = out_dir / "runs" / scenario.name;
        std::filesystem::create_directories(dir);
        const std::vector<std::uint64_t> seeds = opt.seed ? std::vector<std::uint64_t>{*opt.seed} : scenario.seeds;
        for (const auto mode : modes) {
            std::vector<double> pos;
            std::vector<double> full;
            CellSummary cell;
            cell.scenario = scenario.name;
            cell.mode = mode;
            for (const auto seed : seeds) {
                const RunRecord rec = run_episode(scenario, cfg.controller, mode, params, seed);
                RunSummary rs;
                rs.scenario = scenario.name;
                rs.mode = mode;
                rs.seed = seed;
                rs.position_rmse = rec.metrics.position_rmse;
                rs.rmse = rec.metrics.rmse;
                rs.final_crmse = rec.metrics.final_crmse;
                rs.crashed = rec.crashed;
                rs.crash_time = rec.crash_time;
                rs.crash_reason = rec.crash_reason;
                rs.steps = rec.steps.size();
                double fe = 0.0;
                std::size_t nfe = 0;
                for (const auto& s : rec.steps) {
                    if (s.diag.has_forward_error) {
                        fe += s.diag.forward_error;
                        ++nfe;
                    }
                }
                rs.mean_forward_error = nfe > 0 ? fe / static_cast<double>(nfe) : 0.0;
                const auto file = std::filesystem::path("runs") / scenario.name /
                                  (to_string(mode) + "_seed" + std::to_string(seed) + ".csv");
                write_run_csv(rec, out_dir / file, opt.timing);
                rs.csv = file.generic_string();

                pos.push_back(rs.position_rmse);
                full.push_back(rs.rmse);
                cell.crashes += rs.crashed ? 1 : 0;
                ++cell.runs;
                if (opt.on_run) opt.on_run(rs);
                result.runs.push_back(std::move(rs));
            }
            std::tie(cell.position_rmse_mean, cell.position_rmse_std) = mean_std(pos);
            std::tie(cell.rmse_mean, cell.rmse_std) = mean_std(full);
            result.cells.push_back(cell);
        }
        const auto kind = scenario.perturbation.kind;
        if (kind != PerturbationKind::Payload && kind != PerturbationKind::Wind) continue;
        const CellSummary* adaptive = result.cell(scenario.name, ControllerMode::Adaptive);
        for (const auto other : {ControllerMode::Static, ControllerMode::Nominal}) {
            const CellSummary* c = result.cell(scenario.name, other);
            if (adaptive != nullptr && c != nullptr) {
                result.checks.push_back({scenario.name, ControllerMode::Adaptive, other, ranks_before(*adaptive, *c)});
            }
        }
    }

    write_text(out_dir / "summary.json", summary_json(cfg, result));
    write_text(out_dir / "summary.md", summary_markdown(result));
    return result;
}

std::string summary_json(const SuiteConfig& cfg, const SuiteResult& result) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["suite"] = cfg.name;
    j["runs"] = ordered_json::array();
    for (const auto& r : result.runs) {
        j["runs"].push_back({{"scenario", r.scenario},
                             {"mode", to_string(r.mode)},
                             {"seed", r.seed},
                             {"position_rmse", r.position_rmse},
                             {"rmse", r.rmse},
                             {"final_crmse", r.final_crmse},
                             {"mean_forward_error", r.mean_forward_error},
                             {"crashed", r.crashed},
                             {"crash_time", r.crash_time},
                             {"crash_reason", r.crash_reason},
                             {"steps", r.steps},
                             {"csv", r.csv}});
    }
    j["cells"] = ordered_json::array();
    for (const auto& c : result.cells) {
        j["cells"].push_back({{"scenario", c.scenario},
                              {"mode", to_string(c.mode)},
                              {"runs", c.runs},
                              {"crashes", c.crashes},
                              {"position_rmse_mean", c.position_rmse_mean},
                              {"position_rmse_std", c.position_rmse_std},
                              {"rmse_mean", c.rmse_mean},
                              {"rmse_std", c.rmse_std}});
    }
    j["checks"] = ordered_json::array();
    for (const auto& c : result.checks) {
        j["checks"].push_back({{"scenario", c.scenario},
                               {"better", to_string(c.better)},
                               {"worse", to_string(c.worse)},
                               {"holds", c.holds}});
    }
    j["all_checks_hold"] = result.all_checks_hold();
    return j.dump(2) + "\n";
}

std::string summary_markdown(const SuiteResult& result) {
    const auto modes = ordered_modes(result.runs);
    std::string md = "| Scenario |";
    std::string rule = "|---|";
    for (const auto m : modes) {
        md += " " + to_string(m) + " |";
        rule += "---|";
    }
    md += "\n" + rule + "\n";
    std::vector<std::string> scenarios;
    for (const auto& c : result.cells) {
        if (std::find(scenarios.begin(), scenarios.end(), c.scenario) == scenarios.end()) scenarios.push_back(c.scenario);
    }
    for (const auto& s : scenarios) {
        md += "| " + s + " |";
        for (const auto m : modes) {
            const CellSummary* c = result.cell(s, m);
            if (c == nullptr) {
                md += " - |";
                continue;
            }
            md += " " + fmt(c->position_rmse_mean) + " ± " + fmt(c->position_rmse_std);
            if (c->crashes > 0) md += " (" + std::to_string(c->crashes) + "/" + std::to_string(c->runs) + " crashed)";
            md += " |";
        }
        md += "\n";
    }
    md += "\nMean ± std of the position RMSE in meters over seeds.\n";
    if (!result.checks.empty()) {
        md += "\n| Scenario | Ordering | Holds |\n|---|---|---|\n";
        for (const auto& c : result.checks) {
            md += "| " + c.scenario + " | " + to_string(c.better) + " < " + to_string(c.worse) + " | " +
                  (c.holds ? "yes" : "no") + " |\n";
        }
    }
    return md;
}

}  // namespace quadlearn
