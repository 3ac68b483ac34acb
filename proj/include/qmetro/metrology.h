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

#ifndef QMETRO_METROLOGY_H
#define QMETRO_METROLOGY_H

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qmetro/analytic.h"
#include "qmetro/dynamics.h"

namespace qmetro {

struct DeviationMinimum {
    double t_star;
    /// delta chi * sqrt(T) at t_star.
    double value;
};

/// Smallest finite sample in (0, t_f]; ties go to the earlier sample.
/// Throws NoFiniteSamples when the window holds none.
DeviationMinimum min_deviation(const PrecisionCurve &curve, double t_f);

/// Grid minimum refined by golden-section search to 1e-6 in t on a freshly
/// integrated stretch one grid spacing either side of the best sample.
DeviationMinimum min_deviation(const PrecisionRun &run, double t_f);

/// Config for one scheme at (n, gamma) with the window t_f; every other field
/// keeps its default.
ExperimentConfig make_config(Scheme scheme, size_t n, ChannelKind channel, double gamma, double t_f,
                             size_t samples_per_period = 32, double chi = 1.0);

struct ImprovementResult {
    double epsilon;
    /// 1 - min delta chi_cluster / closed-form envelope minimum of the
    /// reference; NaN for ref2 references, which have no closed form.
    double epsilon_envelope;
    DeviationMinimum cluster;
    DeviationMinimum reference;
};

/// Closed-form envelope minimum of a ref1 scheme in delta chi sqrt(T) units;
/// NaN for the other schemes.
double reference_envelope_minimum(Scheme reference, size_t n, double chi, double gamma, ChannelKind channel);

/// epsilon = 1 - min delta chi_cluster / min delta chi_reference, both over (0, t_f].
ImprovementResult improvement(double gamma, size_t n, ChannelKind channel, Scheme reference, double t_f,
                              size_t samples_per_period = 32);

struct SweepRow {
    double gamma = 0;
    size_t n = 0;
    Scheme scheme = Scheme::kCluster;
    Scheme reference = Scheme::kRef1Max;
    ChannelKind channel = ChannelKind::kDephasing;
    double t_min_found = 0;
    double deltachi_min_sqrtT = 0;
    double reference_t_min = 0;
    double reference_min_sqrtT = 0;
    double epsilon = 0;
    double epsilon_envelope = 0;
    /// Empty on success.
    std::string error;
};

struct SweepOptions {
    /// 0 picks the default window for each N.
    double t_f = 0;
    size_t samples_per_period = 32;
    double chi = 1.0;
    size_t threads = 1;
};

/// One row per (gamma, N), sorted by gamma then N. Cells run in parallel and
/// failures are recorded in the row without stopping the sweep.
std::vector<SweepRow> gamma_sweep(const std::vector<double> &gammas, const std::vector<size_t> &n_list,
                                  ChannelKind channel, Scheme reference, const SweepOptions &options = {});

/// points_per_decade log-spaced values from gamma_min to gamma_max inclusive.
std::vector<double> log_grid(double gamma_min, double gamma_max, size_t points_per_decade);

struct EstimatorResult {
    /// One chi estimate per repetition.
    std::vector<double> samples;
    double expM = 0;
    double mean = 0;
    /// Sample standard deviation of the estimates; NaN for a single repetition.
    double spread = 0;
    double bias = 0;
};

/// Repeats the nu-shot experiment `runs` times at t = config.t_max. Each
/// repetition draws nu +-1 outcomes with P(+1) = (1 + <M>)/2 and solves
/// (1/nu) sum M_j = cos(N chi_est t) on the branch holding N chi t.
/// Repetition r uses its own generator seeded from (seed, r).
EstimatorResult simulate_estimator(const ExperimentConfig &config, uint64_t nu, uint64_t seed, size_t runs = 1);

/// Same, from a known expectation value; no integration.
EstimatorResult simulate_estimator(double expM, size_t n, double chi, double t, uint64_t nu, uint64_t seed,
                                   size_t runs = 1);

struct ScalingRow {
    size_t n = 0;
    /// Two-term predictions for cluster-approx, ref-max, ref-unc.
    std::array<ScalingTerms, 3> terms{};
    /// validity_parameter^2 for each family.
    std::array<double, 3> validity_sq{};
    /// Offset below 25% of the two-term total.
    std::array<bool, 3> heisenberg_dominated{};
    /// Numeric cluster minimum over (0, t]; NaN when not computed.
    double numeric_cluster_min = 0;
};

struct ScalingTable {
    double gamma_t = 0;
    double gamma = 0;
    std::vector<ScalingRow> rows;
    /// Largest N in a run of dominated rows starting at the smallest N; 0 if none.
    std::array<size_t, 3> largest_dominated_n{};
};

/// Scaling at fixed gamma t. Numeric minima are computed for n <= numeric_max_n.
ScalingTable scaling_table(const std::vector<size_t> &n_list, double gamma_t,
                           ChannelKind channel = ChannelKind::kDephasing, double gamma = 0.05,
                           size_t numeric_max_n = 0);

}  // namespace qmetro

#endif
