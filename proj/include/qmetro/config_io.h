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

#ifndef QMETRO_CONFIG_IO_H
#define QMETRO_CONFIG_IO_H

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmetro/metrology.h"

namespace qmetro {

/// Parsed run file. Keys before the first section apply to every scheme;
/// a `[scheme]` section overrides them for that scheme only.
///
///     n = 7
///     gamma = 0.05
///     scheme = cluster
///     [ref1-max]
///     samples_per_period = 64
class RunConfig {
   public:
    static RunConfig parse(const std::string &text);
    static RunConfig load(const std::filesystem::path &path);

    /// Sets a global key, validating it like a file line would.
    void set(const std::string &key, const std::string &value);
    bool has(const std::string &key) const;
    /// Overlays every key of `other` onto this config.
    void merge(const RunConfig &other);

    /// Fully resolved experiment for `scheme`; t_max defaults to the N window.
    ExperimentConfig experiment(Scheme scheme) const;
    /// Resolved experiment for the `scheme` key (cluster if absent).
    ExperimentConfig experiment() const;
    Scheme scheme() const;
    Scheme reference() const;
    std::vector<size_t> n_list() const;
    double gamma_min() const;
    double gamma_max() const;
    size_t points_per_decade() const;
    /// Estimator shots per repetition and repetition count.
    uint64_t nu(uint64_t fallback) const;
    size_t runs(size_t fallback) const;
    /// gamma grid from gamma_min, gamma_max, points_per_decade.
    std::vector<double> gamma_grid() const;

    /// Canonical text that parses back to the same config.
    std::string to_text() const;
    nlohmann::json to_json() const;

   private:
    using Section = std::map<std::string, std::string>;
    std::string lookup(const std::string &key, Scheme scheme, const std::string &fallback) const;
    std::string lookup(const std::string &key, const std::string &fallback) const;

    Section global_;
    std::map<Scheme, Section> sections_;
};

/// Text form of a double with 17 significant digits; empty for NaN.
std::string format_double(double v);

void write_curve_csv(std::ostream &os, const PrecisionCurve &curve);
void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows);
/// Sweep rows with the reference minima, envelope epsilon and error columns.
void write_sweep_detail_csv(std::ostream &os, const std::vector<SweepRow> &rows);
void write_estimate_csv(std::ostream &os, const EstimatorResult &result);

nlohmann::json to_json(const ExperimentConfig &config);
nlohmann::json to_json(const RunDiagnostics &diag);

/// Run record written next to every output.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    double wall_clock_seconds = 0;
    std::vector<std::string> outputs;
    uint64_t trace_renormalizations = 0;
    uint64_t nonfinite_samples = 0;
    std::string status = "ok";
    std::vector<std::string> errors;

    nlohmann::json to_json() const;
    void write(const std::filesystem::path &path) const;
};

}  // namespace qmetro

#endif
