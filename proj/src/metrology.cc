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

#include "qmetro/metrology.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "qmetro/errors.h"

namespace qmetro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGoldenTol = 1e-6;

size_t best_sample(const PrecisionCurve &curve, double t_f) {
    size_t best = curve.size();
    double value = kInf;
    for (size_t i = 0; i < curve.size(); i++) {
        double t = curve.times[i];
        if (t <= 0 || t > t_f * (1 + 1e-12)) {
            continue;
        }
        if (curve.finite[i] && curve.deltachi_sqrtT[i] < value) {
            value = curve.deltachi_sqrtT[i];
            best = i;
        }
    }
    if (best == curve.size()) {
        throw NoFiniteSamples("no finite deviation sample inside the window");
    }
    return best;
}

double local_value(const LocalCurve &local, double t) {
    PrecisionPoint p = local.at(t);
    return p.finite ? p.deltachi_sqrtT : kInf;
}

uint64_t splitmix64(uint64_t &state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Runs task(i) for i in [0, count) on up to `threads` workers.
template <typename Task>
void parallel_for(size_t count, size_t threads, Task task) {
    threads = std::max<size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (size_t i = 0; i < count; i++) {
            task(i);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < threads; w++) {
        pool.emplace_back([&] {
            for (size_t i = next++; i < count; i = next++) {
                task(i);
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
}

}  // namespace

DeviationMinimum min_deviation(const PrecisionCurve &curve, double t_f) {
    size_t i = best_sample(curve, t_f);
    return {curve.times[i], curve.deltachi_sqrtT[i]};
}

DeviationMinimum min_deviation(const PrecisionRun &run, double t_f) {
    const PrecisionCurve &curve = run.curve();
    size_t i = best_sample(curve, t_f);
    DeviationMinimum grid{curve.times[i], curve.deltachi_sqrtT[i]};
    double t_end = std::min(t_f, run.config().t_max);
    double lo = i > 0 ? curve.times[i - 1] : 0.0;
    double hi = i + 1 < curve.size() ? std::min(curve.times[i + 1], t_end) : t_end;
    if (!(hi > lo)) {
        return grid;
    }
    LocalCurve local = run.local_curve(lo, hi);

    // Golden-section search; the bracket is one lobe at most, so it is unimodal.
    const double r = std::numbers::phi - 1;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = local_value(local, c), fd = local_value(local, d);
    while (b - a > kGoldenTol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = local_value(local, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = local_value(local, d);
        }
    }
    double t = (a + b) / 2;
    double v = local_value(local, t);
    // Keep the grid sample unless the refinement is strictly better; this also
    // covers minima sitting on the window edge.
    if (v < grid.value) {
        return {t, v};
    }
    return grid;
}

ExperimentConfig make_config(Scheme scheme, size_t n, ChannelKind channel, double gamma, double t_f,
                             size_t samples_per_period, double chi) {
    ExperimentConfig c;
    c.n = n;
    c.chi = chi;
    c.scheme = scheme;
    c.channel = {channel, gamma};
    c.t_max = t_f;
    c.samples_per_period = samples_per_period;
    return c;
}

double reference_envelope_minimum(Scheme reference, size_t n, double chi, double gamma, ChannelKind channel) {
    if (reference != Scheme::kRef1Max && reference != Scheme::kRef1Unc) {
        return kNaN;
    }
    return minima_and_times(envelope_family(reference), n, chi, gamma, 1.0, channel).deviation_min;
}

ImprovementResult improvement(double gamma, size_t n, ChannelKind channel, Scheme reference, double t_f,
                              size_t samples_per_period) {
    PrecisionRun cluster(make_config(Scheme::kCluster, n, channel, gamma, t_f, samples_per_period));
    PrecisionRun ref(make_config(reference, n, channel, gamma, t_f, samples_per_period));
    ImprovementResult out;
    out.cluster = min_deviation(cluster, t_f);
    out.reference = min_deviation(ref, t_f);
    out.epsilon = 1 - out.cluster.value / out.reference.value;
    out.epsilon_envelope = 1 - out.cluster.value / reference_envelope_minimum(reference, n, 1.0, gamma, channel);
    return out;
}

std::vector<double> log_grid(double gamma_min, double gamma_max, size_t points_per_decade) {
    if (!(gamma_min > 0) || !(gamma_max >= gamma_min) || points_per_decade == 0) {
        throw std::invalid_argument("log_grid needs 0 < gamma_min <= gamma_max and points_per_decade > 0");
    }
    double decades = std::log10(gamma_max / gamma_min);
    auto steps = static_cast<size_t>(std::ceil(decades * static_cast<double>(points_per_decade) - 1e-9));
    std::vector<double> out;
    if (steps == 0) {
        return {gamma_min};
    }
    for (size_t k = 0; k <= steps; k++) {
        out.push_back(gamma_min * std::pow(gamma_max / gamma_min, static_cast<double>(k) / static_cast<double>(steps)));
    }
    out.back() = gamma_max;
    return out;
}

std::vector<SweepRow> gamma_sweep(const std::vector<double> &gammas, const std::vector<size_t> &n_list,
                                  ChannelKind channel, Scheme reference, const SweepOptions &options) {
    std::vector<double> gs = gammas;
    std::vector<size_t> ns = n_list;
    std::sort(gs.begin(), gs.end());
    std::sort(ns.begin(), ns.end());
    for (double g : gs) {
        if (!(g > 0)) {
            throw std::invalid_argument("gamma_sweep needs positive rates");
        }
    }
    std::vector<SweepRow> rows(gs.size() * ns.size());
    // Each cell needs two runs; split them so both can go in parallel.
    std::vector<DeviationMinimum> minima(2 * rows.size());
    std::vector<std::string> errors(2 * rows.size());
    parallel_for(minima.size(), options.threads, [&](size_t task) {
        size_t cell = task / 2;
        bool is_ref = task % 2 == 1;
        double g = gs[cell / ns.size()];
        size_t n = ns[cell % ns.size()];
        double t_f = options.t_f > 0 ? options.t_f : default_window(n);
        try {
            PrecisionRun run(
                make_config(is_ref ? reference : Scheme::kCluster, n, channel, g, t_f, options.samples_per_period,
                            options.chi));
            minima[task] = min_deviation(run, t_f);
        } catch (const std::exception &e) {
            errors[task] = std::string(is_ref ? "reference: " : "cluster: ") + e.what();
            minima[task] = {kNaN, kNaN};
        }
    });
    for (size_t cell = 0; cell < rows.size(); cell++) {
        SweepRow &row = rows[cell];
        row.gamma = gs[cell / ns.size()];
        row.n = ns[cell % ns.size()];
        row.scheme = Scheme::kCluster;
        row.reference = reference;
        row.channel = channel;
        row.t_min_found = minima[2 * cell].t_star;
        row.deltachi_min_sqrtT = minima[2 * cell].value;
        row.reference_t_min = minima[2 * cell + 1].t_star;
        row.reference_min_sqrtT = minima[2 * cell + 1].value;
        row.epsilon = 1 - row.deltachi_min_sqrtT / row.reference_min_sqrtT;
        row.epsilon_envelope =
            1 - row.deltachi_min_sqrtT / reference_envelope_minimum(reference, row.n, options.chi, row.gamma, channel);
        row.error = errors[2 * cell];
        if (!errors[2 * cell + 1].empty()) {
            row.error += (row.error.empty() ? "" : "; ") + errors[2 * cell + 1];
        }
    }
    return rows;
}

EstimatorResult simulate_estimator(double expM, size_t n, double chi, double t, uint64_t nu, uint64_t seed,
                                   size_t runs) {
    if (nu == 0 || runs == 0) {
        throw std::invalid_argument("simulate_estimator needs nu >= 1 and runs >= 1");
    }
    if (!(std::abs(expM) <= 1 + 1e-9)) {
        throw std::invalid_argument("expectation of a +-1 measurement must lie in [-1, 1]");
    }
    double p = std::clamp((1 + expM) / 2, 0.0, 1.0);
    double nn = static_cast<double>(n);
    // The estimator is only locally invertible; resolve the arccos on the
    // half-period that holds the true phase.
    double phase0 = nn * chi * t;
    auto branch = static_cast<int64_t>(std::floor(phase0 / std::numbers::pi));

    EstimatorResult out;
    out.expM = expM;
    out.samples.resize(runs);
    for (size_t r = 0; r < runs; r++) {
        uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (r + 1));
        std::mt19937_64 rng(splitmix64(state));
        std::binomial_distribution<uint64_t> draw(nu, p);
        uint64_t plus = draw(rng);
        double mean = (2.0 * static_cast<double>(plus) - static_cast<double>(nu)) / static_cast<double>(nu);
        double a = std::acos(std::clamp(mean, -1.0, 1.0));
        double phase = branch % 2 == 0 ? static_cast<double>(branch) * std::numbers::pi + a
                                       : static_cast<double>(branch + 1) * std::numbers::pi - a;
        out.samples[r] = t > 0 ? phase / (nn * t) : 0.0;
    }
    double sum = 0;
    for (double s : out.samples) {
        sum += s;
    }
    out.mean = sum / static_cast<double>(runs);
    out.bias = out.mean - chi;
    if (runs > 1) {
        double ss = 0;
        for (double s : out.samples) {
            ss += (s - out.mean) * (s - out.mean);
        }
        out.spread = std::sqrt(ss / static_cast<double>(runs - 1));
    } else {
        out.spread = kNaN;
    }
    return out;
}

EstimatorResult simulate_estimator(const ExperimentConfig &config, uint64_t nu, uint64_t seed, size_t runs) {
    if (!has_product_measurement(config.scheme)) {
        throw std::invalid_argument("the estimator needs a two-outcome product measurement (cluster or ref*-max)");
    }
    PrecisionRun run(config);
    double expM = run.curve().expM.back();
    return simulate_estimator(expM, config.n, config.chi, config.t_max, nu, seed, runs);
}

ScalingTable scaling_table(const std::vector<size_t> &n_list, double gamma_t, ChannelKind channel, double gamma,
                           size_t numeric_max_n) {
    if (!(gamma_t >= 0) || !(gamma_t < 1)) {
        throw std::invalid_argument("scaling_table needs 0 <= gamma t < 1");
    }
    if (!(gamma > 0)) {
        throw std::invalid_argument("scaling_table needs a positive gamma to fix t");
    }
    constexpr EnvelopeFamily kFamilies[3] = {EnvelopeFamily::kClusterApprox, EnvelopeFamily::kRefMax,
                                             EnvelopeFamily::kRefUnc};
    ScalingTable table;
    table.gamma_t = gamma_t;
    table.gamma = gamma;
    double t = gamma_t / gamma;
    std::vector<size_t> ns = n_list;
    std::sort(ns.begin(), ns.end());
    std::array<bool, 3> run_open = {true, true, true};
    for (size_t n : ns) {
        ScalingRow row;
        row.n = n;
        for (size_t f = 0; f < 3; f++) {
            // T = 1: every term is reported in delta chi sqrt(T) units.
            row.terms[f] = scaling_expansion(kFamilies[f], n, gamma, t, 1.0);
            row.validity_sq[f] = row.terms[f].validity_parameter * row.terms[f].validity_parameter;
            double total = row.terms[f].heisenberg_term + row.terms[f].offset_term;
            row.heisenberg_dominated[f] = row.terms[f].offset_term < 0.25 * total;
            if (run_open[f] && row.heisenberg_dominated[f]) {
                table.largest_dominated_n[f] = n;
            } else {
                run_open[f] = false;
            }
        }
        row.numeric_cluster_min = kNaN;
        if (n <= numeric_max_n && t > 0) {
            PrecisionRun run(make_config(Scheme::kCluster, n, channel, gamma, t));
            row.numeric_cluster_min = min_deviation(run, t).value;
        }
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace qmetro
