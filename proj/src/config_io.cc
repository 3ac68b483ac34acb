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

#include "qmetro/config_io.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qmetro/errors.h"

namespace qmetro {

namespace {

constexpr std::array<const char *, 17> kKnownKeys = {
    "n",          "chi",        "gamma",           "channel", "scheme", "reference", "t_max",
    "samples_per_period", "gamma_min", "gamma_max", "points_per_decade", "n_list", "total_time_T",
    "rtol",       "atol",       "nu",              "runs"};

// Keys that only make sense once per file.
const std::set<std::string> kGlobalOnly = {"scheme", "reference", "gamma_min", "gamma_max", "points_per_decade",
                                           "n_list", "nu", "runs"};

// Keeps free text inside one CSV field.
std::string csv_field(std::string s) {
    for (char &c : s) {
        if (c == ',' || c == '\n' || c == '\r') {
            c = ';';
        }
    }
    return s;
}

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string &key, const std::string &value, int line) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
        throw ConfigError("'" + key + "' expects a number, got '" + value + "'", line, key);
    }
    return v;
}

uint64_t to_unsigned(const std::string &key, const std::string &value, int line) {
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("'" + key + "' expects a non-negative integer, got '" + value + "'", line, key);
    }
    return v;
}

std::vector<size_t> to_list(const std::string &key, const std::string &value, int line) {
    std::vector<size_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(static_cast<size_t>(to_unsigned(key, item, line)));
        }
    }
    if (out.empty()) {
        throw ConfigError("'" + key + "' expects a comma-separated list of integers", line, key);
    }
    return out;
}

// Checks a single value in isolation so errors carry the line they came from.
void check_value(const std::string &key, const std::string &value, int line) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
        throw ConfigError("unknown key '" + key + "'", line, key);
    }
    try {
        if (key == "scheme" || key == "reference") {
            parse_scheme(value);
        } else if (key == "channel") {
            parse_channel(value);
        } else if (key == "n_list") {
            to_list(key, value, line);
        } else if (key == "n" || key == "samples_per_period" || key == "points_per_decade" || key == "nu" ||
                   key == "runs") {
            to_unsigned(key, value, line);
        } else {
            to_double(key, value, line);
        }
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(e.what(), line, key);
    }
}

}  // namespace

RunConfig RunConfig::parse(const std::string &text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    Section *current = &cfg.global_;
    bool in_section = false;
    while (std::getline(in, raw)) {
        line++;
        std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError("unterminated section header", line);
            }
            std::string name = trim(s.substr(1, s.size() - 2));
            try {
                current = &cfg.sections_[parse_scheme(name)];
            } catch (const std::exception &) {
                throw ConfigError("section '" + name + "' is not a scheme name", line, name);
            }
            in_section = true;
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value'", line);
        }
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("empty key or value", line, key);
        }
        check_value(key, value, line);
        if (in_section && kGlobalOnly.count(key)) {
            throw ConfigError("'" + key + "' is only allowed before the first section", line, key);
        }
        if (current->count(key)) {
            throw ConfigError("duplicate key '" + key + "'", line, key);
        }
        (*current)[key] = value;
    }
    // Surface range errors (n = 0, negative gamma, ...) at load time.
    cfg.experiment();
    for (const auto &[scheme, section] : cfg.sections_) {
        cfg.experiment(scheme);
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void RunConfig::set(const std::string &key, const std::string &value) {
    check_value(key, value, 0);
    global_[key] = value;
}

bool RunConfig::has(const std::string &key) const {
    return global_.count(key) > 0;
}

void RunConfig::merge(const RunConfig &other) {
    for (const auto &[k, v] : other.global_) {
        global_[k] = v;
    }
    for (const auto &[scheme, section] : other.sections_) {
        for (const auto &[k, v] : section) {
            sections_[scheme][k] = v;
        }
    }
}

std::string RunConfig::lookup(const std::string &key, Scheme scheme, const std::string &fallback) const {
    auto sec = sections_.find(scheme);
    if (sec != sections_.end()) {
        auto it = sec->second.find(key);
        if (it != sec->second.end()) {
            return it->second;
        }
    }
    return lookup(key, fallback);
}

std::string RunConfig::lookup(const std::string &key, const std::string &fallback) const {
    auto it = global_.find(key);
    return it != global_.end() ? it->second : fallback;
}

ExperimentConfig RunConfig::experiment(Scheme scheme) const {
    ExperimentConfig c;
    try {
        c.scheme = scheme;
        c.n = static_cast<size_t>(to_unsigned("n", lookup("n", scheme, "2"), 0));
        c.chi = to_double("chi", lookup("chi", scheme, "1"), 0);
        c.channel.kind = parse_channel(lookup("channel", scheme, "dephasing"));
        c.channel.gamma = to_double("gamma", lookup("gamma", scheme, "0"), 0);
        std::string t_max = lookup("t_max", scheme, "");
        c.t_max = t_max.empty() ? default_window(c.n) : to_double("t_max", t_max, 0);
        c.samples_per_period = static_cast<size_t>(to_unsigned("samples_per_period", lookup("samples_per_period", scheme, "32"), 0));
        c.total_time_T = to_double("total_time_T", lookup("total_time_T", scheme, "1"), 0);
        c.rtol = to_double("rtol", lookup("rtol", scheme, "1e-9"), 0);
        c.atol = to_double("atol", lookup("atol", scheme, "1e-12"), 0);
        c.validate();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(std::string(to_string(scheme)) + ": " + e.what());
    }
    return c;
}

ExperimentConfig RunConfig::experiment() const {
    return experiment(scheme());
}

Scheme RunConfig::scheme() const {
    return parse_scheme(lookup("scheme", "cluster"));
}

Scheme RunConfig::reference() const {
    return parse_scheme(lookup("reference", "ref1-max"));
}

std::vector<size_t> RunConfig::n_list() const {
    std::string v = lookup("n_list", "");
    if (v.empty()) {
        return {experiment().n};
    }
    return to_list("n_list", v, 0);
}

double RunConfig::gamma_min() const {
    return to_double("gamma_min", lookup("gamma_min", "0.005"), 0);
}

double RunConfig::gamma_max() const {
    return to_double("gamma_max", lookup("gamma_max", "1"), 0);
}

size_t RunConfig::points_per_decade() const {
    return static_cast<size_t>(to_unsigned("points_per_decade", lookup("points_per_decade", "60"), 0));
}

uint64_t RunConfig::nu(uint64_t fallback) const {
    return has("nu") ? to_unsigned("nu", lookup("nu", ""), 0) : fallback;
}

size_t RunConfig::runs(size_t fallback) const {
    return has("runs") ? static_cast<size_t>(to_unsigned("runs", lookup("runs", ""), 0)) : fallback;
}

std::vector<double> RunConfig::gamma_grid() const {
    try {
        return log_grid(gamma_min(), gamma_max(), points_per_decade());
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what(), 0, "gamma_min");
    }
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    for (const auto &[k, v] : global_) {
        os << k << " = " << v << "\n";
    }
    for (const auto &[scheme, section] : sections_) {
        os << "[" << to_string(scheme) << "]\n";
        for (const auto &[k, v] : section) {
            os << k << " = " << v << "\n";
        }
    }
    return os.str();
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["keys"] = global_;
    nlohmann::json sections = nlohmann::json::object();
    for (const auto &[scheme, section] : sections_) {
        sections[std::string(to_string(scheme))] = section;
    }
    j["sections"] = sections;
    j["text"] = to_text();
    return j;
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return {};
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_curve_csv(std::ostream &os, const PrecisionCurve &curve) {
    os << "t,expM,dexpM_dchi,deltaM,deltachi_sqrtT,finite\n";
    for (size_t i = 0; i < curve.size(); i++) {
        os << format_double(curve.times[i]) << ',' << format_double(curve.expM[i]) << ','
           << format_double(curve.dexpM_dchi[i]) << ',' << format_double(curve.deltaM[i]) << ','
           << format_double(curve.deltachi_sqrtT[i]) << ',' << (curve.finite[i] ? 1 : 0) << '\n';
    }
}

void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows) {
    os << "gamma,n,scheme,channel,t_min,deltachi_min_sqrtT,epsilon\n";
    for (const auto &r : rows) {
        os << format_double(r.gamma) << ',' << r.n << ',' << to_string(r.scheme) << ',' << to_string(r.channel) << ','
           << format_double(r.t_min_found) << ',' << format_double(r.deltachi_min_sqrtT) << ','
           << format_double(r.epsilon) << '\n';
    }
}

void write_sweep_detail_csv(std::ostream &os, const std::vector<SweepRow> &rows) {
    os << "gamma,n,scheme,reference,channel,t_min,deltachi_min_sqrtT,reference_t_min,reference_min_sqrtT,epsilon,"
          "epsilon_envelope,error\n";
    for (const auto &r : rows) {
        os << format_double(r.gamma) << ',' << r.n << ',' << to_string(r.scheme) << ',' << to_string(r.reference)
           << ',' << to_string(r.channel) << ',' << format_double(r.t_min_found) << ','
           << format_double(r.deltachi_min_sqrtT) << ',' << format_double(r.reference_t_min) << ','
           << format_double(r.reference_min_sqrtT) << ',' << format_double(r.epsilon) << ','
           << format_double(r.epsilon_envelope) << ',' << csv_field(r.error) << '\n';
    }
}

void write_estimate_csv(std::ostream &os, const EstimatorResult &result) {
    os << "run,chi_est\n";
    for (size_t i = 0; i < result.samples.size(); i++) {
        os << i << ',' << format_double(result.samples[i]) << '\n';
    }
    os << "\nexpM,mean,bias,spread\n";
    os << format_double(result.expM) << ',' << format_double(result.mean) << ',' << format_double(result.bias) << ','
       << format_double(result.spread) << '\n';
}

nlohmann::json to_json(const ExperimentConfig &c) {
    return {{"n", c.n},
            {"chi", c.chi},
            {"gamma", c.channel.gamma},
            {"channel", std::string(to_string(c.channel.kind))},
            {"scheme", std::string(to_string(c.scheme))},
            {"t_max", c.t_max},
            {"samples_per_period", c.samples_per_period},
            {"total_time_T", c.total_time_T},
            {"rtol", c.rtol},
            {"atol", c.atol}};
}

nlohmann::json to_json(const RunDiagnostics &d) {
    return {{"accepted_steps", d.integrator.accepted},
            {"rejected_steps", d.integrator.rejected},
            {"rhs_evaluations", d.integrator.rhs_evaluations},
            {"frame", std::string(to_string(d.frame))},
            {"support_size", d.support_size},
            {"trace_renormalizations", d.trace_renormalizations},
            {"max_trace_defect", d.max_trace_defect},
            {"max_hermiticity_defect", d.max_hermiticity_defect},
            {"final_min_eigenvalue", d.final_min_eigenvalue},
            {"nonfinite_samples", d.nonfinite_samples}};
}

nlohmann::json RunManifest::to_json() const {
    return {{"command", command},
            {"config", config},
            {"version", QMETRO_VERSION},
            {"wall_clock_seconds", wall_clock_seconds},
            {"outputs", outputs},
            {"counters", {{"trace_renormalizations", trace_renormalizations}, {"nonfinite_samples", nonfinite_samples}}},
            {"status", status},
            {"errors", errors}};
}

void RunManifest::write(const std::filesystem::path &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write manifest " + path.string());
    }
    out << to_json().dump(2) << '\n';
}

}  // namespace qmetro
