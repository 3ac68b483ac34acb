// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qmetro: curves, sweeps, figure data, validation and estimator runs.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qmetro/config_io.h"
#include "qmetro/errors.h"
#include "qmetro/validation.h"

namespace fs = std::filesystem;

namespace qmetro {
namespace {

enum ExitCode { kSuccess = 0, kPartial = 1, kConfigFailure = 2, kValidationFailure = 3 };

struct Options {
    std::string config;
    std::string out;
    size_t threads = 0;
    uint64_t seed = 0;
    uint64_t nu = 0;
    size_t runs = 0;
    std::string figure;
};

size_t resolve_threads(size_t flag) {
    if (flag > 0) {
        return flag;
    }
    if (const char *env = std::getenv("QMETRO_THREADS")) {
        char *end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return v;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

class Stopwatch {
   public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

   private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_file(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

fs::path manifest_path(const fs::path &out) {
    return fs::path(out.string() + ".manifest.json");
}

/// Copy of `rc` with every field of `e` written out, so the echoed text
/// reproduces the run without relying on defaults.
RunConfig resolved(RunConfig rc, const ExperimentConfig &e) {
    rc.set("n", std::to_string(e.n));
    rc.set("chi", format_double(e.chi));
    rc.set("gamma", format_double(e.channel.gamma));
    rc.set("channel", std::string(to_string(e.channel.kind)));
    rc.set("t_max", format_double(e.t_max));
    rc.set("samples_per_period", std::to_string(e.samples_per_period));
    rc.set("total_time_T", format_double(e.total_time_T));
    rc.set("rtol", format_double(e.rtol));
    rc.set("atol", format_double(e.atol));
    return rc;
}

nlohmann::json manifest_config(const RunConfig &rc, const ExperimentConfig &e) {
    nlohmann::json j = resolved(rc, e).to_json();
    j["experiment"] = to_json(e);
    return j;
}

void note_failure(RunManifest &m, const std::string &what) {
    m.status = "failed";
    m.errors.push_back(what);
    std::cerr << "error: " << what << "\n";
}

/// Integrates one scheme and writes its curve; false on integration failure.
bool emit_curve(const ExperimentConfig &e, const fs::path &out, RunManifest &m) {
    try {
        PrecisionRun run(e);
        std::ostringstream os;
        write_curve_csv(os, run.curve());
        write_file(out, os.str());
        m.outputs.push_back(out.string());
        m.trace_renormalizations += run.diagnostics().trace_renormalizations;
        m.nonfinite_samples += run.diagnostics().nonfinite_samples;
        return true;
    } catch (const StiffnessError &err) {
        note_failure(m, std::string(to_string(e.scheme)) + ": " + err.what());
    } catch (const InvariantViolation &err) {
        note_failure(m, std::string(to_string(e.scheme)) + ": " + err.what());
    }
    return false;
}

void emit_envelopes(const ExperimentConfig &e, const fs::path &out, RunManifest &m) {
    std::ostringstream os;
    os << "t,ref_max,ref_unc,cluster_approx\n";
    for (double t : sample_times(e)) {
        os << format_double(t);
        for (auto f : {EnvelopeFamily::kRefMax, EnvelopeFamily::kRefUnc, EnvelopeFamily::kClusterApprox}) {
            double v = t > 0 ? envelope(f, e.n, e.chi, e.channel.gamma, t, 1.0, false, e.channel.kind)
                             : std::numeric_limits<double>::quiet_NaN();
            os << ',' << format_double(v);
        }
        os << '\n';
    }
    write_file(out, os.str());
    m.outputs.push_back(out.string());
}

/// Runs the sweep described by `rc` and writes the CSV pair; returns the exit code.
int emit_sweep(const RunConfig &rc, const fs::path &out, size_t threads, RunManifest &m) {
    ExperimentConfig base = rc.experiment(Scheme::kCluster);
    SweepOptions opts;
    opts.t_f = rc.has("t_max") ? base.t_max : 0.0;
    opts.samples_per_period = base.samples_per_period;
    opts.chi = base.chi;
    opts.threads = threads;
    auto rows = gamma_sweep(rc.gamma_grid(), rc.n_list(), base.channel.kind, rc.reference(), opts);

    std::ostringstream main_csv;
    write_sweep_csv(main_csv, rows);
    write_file(out, main_csv.str());
    m.outputs.push_back(out.string());
    std::ostringstream detail;
    write_sweep_detail_csv(detail, rows);
    fs::path detail_path = out.string() + ".detail.csv";
    write_file(detail_path, detail.str());
    m.outputs.push_back(detail_path.string());

    size_t failed = 0;
    for (const auto &r : rows) {
        if (!r.error.empty()) {
            failed++;
            m.errors.push_back("gamma=" + format_double(r.gamma) + " n=" + std::to_string(r.n) + ": " + r.error);
        }
    }
    m.config = rc.to_json();
    m.config["reference"] = std::string(to_string(rc.reference()));
    m.config["gamma_grid"] = rc.gamma_grid();
    m.config["n_list"] = rc.n_list();
    if (failed == 0) {
        return kSuccess;
    }
    m.status = failed == rows.size() ? "failed" : "partial";
    return kPartial;
}

RunConfig load_or_empty(const std::string &path) {
    return path.empty() ? RunConfig::parse("") : RunConfig::load(path);
}

int cmd_curve(const Options &o, RunManifest &m, fs::path &out) {
    out = o.out.empty() ? "curve.csv" : o.out;
    RunConfig rc = load_or_empty(o.config);
    ExperimentConfig e = rc.experiment();
    m.config = manifest_config(rc, e);
    return emit_curve(e, out, m) ? kSuccess : kPartial;
}

int cmd_sweep(const Options &o, RunManifest &m, fs::path &out) {
    out = o.out.empty() ? "sweep.csv" : o.out;
    RunConfig rc = load_or_empty(o.config);
    return emit_sweep(rc, out, resolve_threads(o.threads), m);
}

const std::map<std::string, std::string> &figure_presets() {
    static const std::map<std::string, std::string> presets = {
        {"fig1a", "n = 7\nchi = 1\ngamma = 0.05\nchannel = dephasing\nscheme = cluster\n"},
        {"fig1b", "chi = 1\nchannel = dephasing\nreference = ref1-max\nn_list = 2,3,4,5,6,7\n"},
        {"fig2", "chi = 1\nchannel = depolarizing\nreference = ref1-max\nn_list = 2,4,6\n"},
        {"fig3a", "n = 7\nchi = 1\ngamma = 0.05\nchannel = dephasing\n"},
        {"fig3b", "chi = 1\nchannel = dephasing\nreference = ref2-unc\nn_list = 2,3,4,5,6,7\n"},
        {"fig4a", "chi = 1\nchannel = damping\nreference = ref2-unc\nn_list = 2,3,4,6\n"},
        {"fig4b", "chi = 1\nchannel = damping\nreference = ref2-max\nn_list = 2,3,4,6\n"},
    };
    return presets;
}

int cmd_figure(const Options &o, RunManifest &m, fs::path &out) {
    auto it = figure_presets().find(o.figure);
    if (it == figure_presets().end()) {
        throw ConfigError("unknown figure '" + o.figure + "'", 0, "figure");
    }
    RunConfig rc = RunConfig::parse(it->second);
    fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
    out = dir / (o.figure + ".csv");
    m.command = "figure " + o.figure;
    if (!o.config.empty()) {
        rc.merge(RunConfig::load(o.config));
    }

    if (o.figure == "fig1a" || o.figure == "fig3a") {
        std::vector<Scheme> schemes = o.figure == "fig1a"
                                          ? std::vector<Scheme>{Scheme::kCluster}
                                          : std::vector<Scheme>{Scheme::kCluster, Scheme::kRef2Max, Scheme::kRef2Unc};
        bool ok = true;
        nlohmann::json configs = nlohmann::json::object();
        for (Scheme s : schemes) {
            ExperimentConfig e = rc.experiment(s);
            configs[std::string(to_string(s))] = manifest_config(rc, e);
            ok = emit_curve(e, dir / (o.figure + "_" + std::string(to_string(s)) + ".csv"), m) && ok;
            if (o.figure == "fig1a") {
                emit_envelopes(e, dir / "fig1a_envelopes.csv", m);
            }
        }
        m.config = configs;
        return ok ? kSuccess : kPartial;
    }
    return emit_sweep(rc, out, resolve_threads(o.threads), m);
}

int cmd_validate(RunManifest &m) {
    bool all = true;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto &r : run_validation()) {
        std::printf("%-40s %s  max_error=%.3e  tolerance=%.1e  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                    r.max_error, r.tolerance, r.detail.c_str());
        checks.push_back(
            {{"name", r.name}, {"passed", r.passed}, {"max_error", r.max_error}, {"tolerance", r.tolerance},
             {"detail", r.detail}});
        if (!r.passed) {
            all = false;
            m.errors.push_back(r.name);
        }
    }
    m.config = {{"checks", checks}};
    if (!all) {
        m.status = "failed";
    }
    return all ? kSuccess : kValidationFailure;
}

int cmd_estimate(const Options &o, RunManifest &m, fs::path &out) {
    out = o.out.empty() ? "estimate.csv" : o.out;
    RunConfig rc = load_or_empty(o.config);
    ExperimentConfig e = rc.experiment();
    if (!has_product_measurement(e.scheme)) {
        throw ConfigError("scheme '" + std::string(to_string(e.scheme)) + "' has no two-outcome measurement", 0,
                          "scheme");
    }
    // Flags win over the config file.
    uint64_t nu = o.nu > 0 ? o.nu : rc.nu(1000);
    size_t runs = o.runs > 0 ? o.runs : rc.runs(1);
    RunConfig echo = resolved(rc, e);
    echo.set("nu", std::to_string(nu));
    echo.set("runs", std::to_string(runs));
    m.config = echo.to_json();
    m.config["experiment"] = to_json(e);
    m.config["seed"] = o.seed;

    EstimatorResult result = simulate_estimator(e, nu, o.seed, runs);
    std::ostringstream os;
    write_estimate_csv(os, result);
    write_file(out, os.str());
    m.outputs.push_back(out.string());
    return kSuccess;
}

void add_common(CLI::App *sub, Options &o, bool with_config = true) {
    if (with_config) {
        sub->add_option("--config", o.config, "Run file (key = value lines, [scheme] sections)");
    }
    sub->add_option("--out", o.out, "Output path (a directory for figure)");
    sub->add_option("--threads", o.threads, "Worker cap; falls back to QMETRO_THREADS");
    sub->add_option("--seed", o.seed, "Random seed");
}

}  // namespace
}  // namespace qmetro

int main(int argc, char **argv) {
    using namespace qmetro;
    CLI::App app{"Cluster-state parameter estimation under Lindblad noise"};
    app.set_version_flag("--version", QMETRO_VERSION);
    app.require_subcommand(1);
    Options o;

    auto *curve = app.add_subcommand("curve", "Precision curve of one scheme");
    add_common(curve, o);
    auto *sweep = app.add_subcommand("sweep", "Improvement over a gamma grid and N list");
    add_common(sweep, o);
    auto *figure = app.add_subcommand("figure", "Data for a built-in figure preset");
    figure->add_option("id", o.figure, "fig1a|fig1b|fig2|fig3a|fig3b|fig4a|fig4b")->required();
    add_common(figure, o);
    auto *validate = app.add_subcommand("validate", "Run the oracle suite");
    add_common(validate, o, false);
    auto *estimate = app.add_subcommand("estimate", "Monte Carlo estimator at t_max");
    add_common(estimate, o);
    estimate->add_option("--nu", o.nu, "Shots per repetition");
    estimate->add_option("--runs", o.runs, "Repetitions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? kSuccess : kConfigFailure;
    }

    RunManifest m;
    m.command = app.get_subcommands().front()->get_name();
    fs::path out;
    Stopwatch clock;
    int code = kSuccess;
    try {
        if (curve->parsed()) {
            code = cmd_curve(o, m, out);
        } else if (sweep->parsed()) {
            code = cmd_sweep(o, m, out);
        } else if (figure->parsed()) {
            code = cmd_figure(o, m, out);
        } else if (validate->parsed()) {
            code = cmd_validate(m);
            out = o.out.empty() ? fs::path() : fs::path(o.out);
        } else {
            code = cmd_estimate(o, m, out);
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << (e.field.empty() ? "" : " [" + e.field + "]") << "\n";
        m.status = "config_error";
        m.errors.push_back(e.what());
        code = kConfigFailure;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        m.status = "config_error";
        m.errors.push_back(e.what());
        code = kConfigFailure;
    } catch (const std::exception &e) {
        note_failure(m, e.what());
        code = kPartial;
    }
    m.wall_clock_seconds = clock.seconds();
    if (!out.empty()) {
        try {
            m.write(manifest_path(out));
        } catch (const std::exception &e) {
            std::cerr << "error: " << e.what() << "\n";
        }
    }
    return code;
}
