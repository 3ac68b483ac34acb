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

#include "qmetro/dynamics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qmetro/errors.h"

namespace qmetro {

namespace {

constexpr double kAbortThreshold = 1e-7;
constexpr double kRenormalizeThreshold = 1e-10;
// Checkpoint memory per run; the stride between checkpoints grows to fit.
constexpr size_t kCheckpointBudgetBytes = size_t{128} << 20;

Eigen::MatrixXcd commutator_term(const Eigen::MatrixXcd &m, const ObservableOperator &h, double scale) {
    // i [m, scale * h].
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (const auto &[c, p] : h.terms()) {
        out += Complex(0, scale * c) * (apply_right(m, p) - apply_left(p, m));
    }
    return out;
}

// Checks the packed state after an accepted step and renormalizes the trace
// when it has drifted. Returns true if y was modified.
bool guard_state(const CompiledLiouvillian &liou, std::span<Complex> y, double t, RunDiagnostics &diag) {
    auto d = liou.defects(y);
    diag.max_trace_defect = std::max(diag.max_trace_defect, d.rho_trace);
    diag.max_hermiticity_defect = std::max(diag.max_hermiticity_defect, d.rho_hermiticity);
    double sens_limit = kAbortThreshold * std::max(1.0, d.sens_scale);
    if (d.rho_trace > kAbortThreshold || d.rho_hermiticity > kAbortThreshold || d.sens_trace > sens_limit ||
        d.sens_hermiticity > sens_limit) {
        std::ostringstream msg;
        msg << "state invariants violated at t = " << t << ": |tr rho - 1| = " << d.rho_trace
            << ", rho hermiticity = " << d.rho_hermiticity << ", |tr rho_chi| = " << d.sens_trace
            << ", rho_chi hermiticity = " << d.sens_hermiticity;
        throw InvariantViolation(msg.str());
    }
    if (d.rho_trace > kRenormalizeThreshold) {
        double tr = liou.rho_trace(y).real();
        for (size_t k = 0; k < liou.support_size(); k++) {
            y[k] /= tr;
        }
        diag.trace_renormalizations++;
        return true;
    }
    return false;
}

void check_final_positivity(const CompiledLiouvillian &liou, std::span<const Complex> y, double t,
                            RunDiagnostics &diag) {
    diag.final_min_eigenvalue = liou.min_eigenvalue(y);
    if (diag.final_min_eigenvalue < -kAbortThreshold) {
        std::ostringstream msg;
        msg << "rho lost positivity at t = " << t << ": smallest eigenvalue " << diag.final_min_eigenvalue;
        throw InvariantViolation(msg.str());
    }
}

std::array<Complex, 5> probe_coefficients(const Probe &p, const DenseStep &step) {
    std::array<Complex, 5> out;
    for (size_t m = 0; m < 5; m++) {
        out[m] = p.apply(step.coefficient(m));
    }
    return out;
}

double combine(const std::array<Complex, 5> &c, const std::array<double, 5> &w) {
    double acc = 0;
    for (size_t m = 0; m < 5; m++) {
        acc += w[m] * c[m].real();
    }
    return acc;
}

bool sample_reached(double sample, const DenseStep &step) {
    return sample <= step.t1() + 1e-13 * std::max(1.0, std::abs(step.t1()));
}

}  // namespace

SensitivityDerivative lindblad_rhs(const Eigen::MatrixXcd &rho, const Eigen::MatrixXcd &drho_dchi,
                                   const ObservableOperator &h0, double chi, const NoiseChannel &channel) {
    auto dim = Eigen::Index{1} << h0.num_qubits();
    if (rho.rows() != dim || rho.cols() != dim || drho_dchi.rows() != dim || drho_dchi.cols() != dim) {
        throw DimensionMismatch("lindblad_rhs: matrices do not match the Hamiltonian's qubit count");
    }
    if (!(channel.gamma >= 0)) {
        throw std::invalid_argument("gamma must be non-negative");
    }
    auto jumps = jump_operators(channel, h0.num_qubits());
    SensitivityDerivative out;
    out.drho_dt = commutator_term(rho, h0, chi) + apply_dissipator(jumps, rho);
    out.dsens_dt = commutator_term(drho_dchi, h0, chi) + commutator_term(rho, h0, 1.0) +
                   apply_dissipator(jumps, drho_dchi);
    return out;
}

SensitivityDerivative lindblad_rhs(const SensitivityPair &state, const ObservableOperator &h0, double chi,
                                   const NoiseChannel &channel) {
    return lindblad_rhs(state.rho.matrix(), state.drho_dchi, h0, chi, channel);
}

std::vector<double> sample_times(const ExperimentConfig &config) {
    config.validate();
    double dt_max = config.period() / static_cast<double>(config.samples_per_period);
    auto count = static_cast<size_t>(std::ceil(config.t_max / dt_max - 1e-9));
    count = std::max<size_t>(count, 1);
    double dt = config.t_max / static_cast<double>(count);
    std::vector<double> times(count + 1);
    for (size_t k = 0; k <= count; k++) {
        times[k] = static_cast<double>(k) * dt;
    }
    times.back() = config.t_max;
    return times;
}

IntegratorOptions integrator_options(const ExperimentConfig &config) {
    IntegratorOptions opts;
    opts.rtol = config.rtol;
    opts.atol = config.atol;
    return opts;
}

Trajectory integrate(const ExperimentConfig &config) {
    CompiledLiouvillian liou(config);
    Trajectory traj;
    traj.times = sample_times(config);
    double bytes = static_cast<double>(traj.times.size()) * 2.0 * 16.0 * std::pow(4.0, static_cast<double>(config.n));
    if (bytes > 2e9) {
        throw std::length_error("trajectory would need more than 2 GB; use PrecisionRun for this config");
    }
    traj.diagnostics.frame = liou.frame();
    traj.diagnostics.support_size = liou.support_size();

    std::vector<Complex> y = liou.initial_state();
    std::vector<Complex> buf(y.size());
    auto store = [&](std::span<const Complex> state) {
        traj.states.push_back({DensityMatrix(liou.unpack_rho(state)), liou.unpack_sensitivity(state)});
    };
    store(y);
    size_t next = 1;
    DormandPrince45 integ(
        y.size(), [&](std::span<const Complex> in, std::span<Complex> out) { liou.apply(in, out); },
        integrator_options(config));
    integ.integrate(y, 0.0, config.t_max, [&](const DenseStep &step, std::span<Complex> state) {
        while (next < traj.times.size() && sample_reached(traj.times[next], step)) {
            step.interpolate(std::min(traj.times[next], step.t1()), buf);
            store(buf);
            next++;
        }
        return guard_state(liou, state, step.t1(), traj.diagnostics);
    });
    while (next < traj.times.size()) {
        store(y);
        next++;
    }
    traj.diagnostics.integrator = integ.stats();
    check_final_positivity(liou, y, config.t_max, traj.diagnostics);
    return traj;
}

PrecisionPoint make_point(double t, double expM, double expM2, double dexpM_dchi) {
    PrecisionPoint p;
    p.t = t;
    p.expM = expM;
    p.dexpM_dchi = dexpM_dchi;
    double var = expM2 - expM * expM;
    if (var < -1e-9 * std::max(1.0, std::abs(expM2))) {
        throw InvariantViolation("negative variance " + std::to_string(var) + " at t = " + std::to_string(t));
    }
    p.deltaM = std::sqrt(std::max(var, 0.0));
    p.finite = t > 0 && std::abs(dexpM_dchi) >= 1e-12;
    p.deltachi_sqrtT =
        p.finite ? p.deltaM * std::sqrt(t) / std::abs(dexpM_dchi) : std::numeric_limits<double>::quiet_NaN();
    return p;
}

void PrecisionCurve::push_back(const PrecisionPoint &p) {
    times.push_back(p.t);
    expM.push_back(p.expM);
    deltaM.push_back(p.deltaM);
    dexpM_dchi.push_back(p.dexpM_dchi);
    deltachi_sqrtT.push_back(p.deltachi_sqrtT);
    finite.push_back(p.finite);
}

PrecisionPoint PrecisionCurve::point(size_t i) const {
    return {times[i], expM[i], deltaM[i], dexpM_dchi[i], deltachi_sqrtT[i], finite[i]};
}

size_t PrecisionCurve::nonfinite_count() const {
    return static_cast<size_t>(std::count(finite.begin(), finite.end(), false));
}

PrecisionCurve expectation_curve(const Trajectory &traj, const ObservableOperator &m, double total_time_T) {
    if (!(total_time_T > 0)) {
        throw std::invalid_argument("total_time_T must be positive");
    }
    PauliSum m2 = m.squared();
    PrecisionCurve curve;
    for (size_t k = 0; k < traj.times.size(); k++) {
        const auto &s = traj.states[k];
        if (s.rho.num_qubits() != m.num_qubits()) {
            throw DimensionMismatch("expectation_curve: operator and trajectory sizes differ");
        }
        double e = expectation(m, s.rho);
        double e2 = trace_product(m2, s.rho.matrix()).real();
        double d = expectation(m, s.drho_dchi);
        curve.push_back(make_point(traj.times[k], e, e2, d));
    }
    return curve;
}

PrecisionPoint LocalCurve::at(double t) const {
    if (segments_.empty()) {
        throw NoFiniteSamples("local curve has no segments");
    }
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment &s) { return v < s.t0; });
    const Segment &s = it == segments_.begin() ? segments_.front() : *std::prev(it);
    double th = (t - s.t0) / s.h;
    double th1 = 1.0 - th;
    std::array<double, 5> w = {1.0, th, th * th1, th * th * th1, th * th * th1 * th1};
    return make_point(t, combine(s.coef[0], w), combine(s.coef[1], w), combine(s.coef[2], w));
}

PrecisionRun::PrecisionRun(const ExperimentConfig &config)
    : PrecisionRun(config, build_measurement(config.scheme, config.n)) {
}

PrecisionRun::PrecisionRun(const ExperimentConfig &config, const ObservableOperator &m) : config_(config) {
    config_.validate();
    if (m.num_qubits() != config_.n) {
        throw DimensionMismatch("measurement operator and config disagree on the qubit count");
    }
    liou_ = std::make_shared<const CompiledLiouvillian>(config_);
    probes_ = {liou_->probe(m.to_pauli_sum(), false), liou_->probe(m.squared(), false),
               liou_->probe(m.to_pauli_sum(), true)};
    run();
}

void PrecisionRun::run() {
    const auto &liou = *liou_;
    diag_.frame = liou.frame();
    diag_.support_size = liou.support_size();
    std::vector<double> times = sample_times(config_);
    size_t bytes = liou.state_size() * sizeof(Complex);
    size_t stride = std::max<size_t>(1, (times.size() * bytes + kCheckpointBudgetBytes - 1) / kCheckpointBudgetBytes);

    std::vector<Complex> y = liou.initial_state();
    auto direct = [&](double t, std::span<const Complex> state) {
        return make_point(t, probes_[0].apply(state).real(), probes_[1].apply(state).real(),
                          probes_[2].apply(state).real());
    };
    curve_.push_back(direct(0.0, y));
    checkpoints_.push_back({0.0, y});

    size_t next = 1;
    DormandPrince45 integ(
        y.size(), [&](std::span<const Complex> in, std::span<Complex> out) { liou.apply(in, out); },
        integrator_options(config_));
    integ.integrate(y, 0.0, config_.t_max, [&](const DenseStep &step, std::span<Complex> state) {
        if (next < times.size() && sample_reached(times[next], step)) {
            std::array<std::array<Complex, 5>, 3> c;
            for (size_t p = 0; p < 3; p++) {
                c[p] = probe_coefficients(probes_[p], step);
            }
            while (next < times.size() && sample_reached(times[next], step)) {
                double t = std::min(times[next], step.t1());
                auto w = step.weights(t);
                curve_.push_back(make_point(times[next], combine(c[0], w), combine(c[1], w), combine(c[2], w)));
                if (next % stride == 0) {
                    Checkpoint cp{times[next], std::vector<Complex>(state.size())};
                    step.interpolate(t, cp.y);
                    checkpoints_.push_back(std::move(cp));
                }
                next++;
            }
        }
        return guard_state(liou, state, step.t1(), diag_);
    });
    while (next < times.size()) {
        curve_.push_back(direct(times[next], y));
        next++;
    }
    diag_.integrator = integ.stats();
    diag_.nonfinite_samples = curve_.nonfinite_count();
    check_final_positivity(liou, y, config_.t_max, diag_);
}

LocalCurve PrecisionRun::local_curve(double t_lo, double t_hi) const {
    t_lo = std::max(t_lo, 0.0);
    t_hi = std::min(t_hi, config_.t_max);
    if (!(t_hi > t_lo)) {
        throw std::invalid_argument("local_curve needs t_lo < t_hi inside the run window");
    }
    auto it = std::upper_bound(checkpoints_.begin(), checkpoints_.end(), t_lo,
                               [](double v, const Checkpoint &c) { return v < c.t; });
    const Checkpoint &start = *std::prev(it);
    std::vector<Complex> y = start.y;

    LocalCurve out;
    out.t_lo_ = t_lo;
    out.t_hi_ = t_hi;
    RunDiagnostics scratch;
    const auto &liou = *liou_;
    DormandPrince45 integ(
        y.size(), [&](std::span<const Complex> in, std::span<Complex> o) { liou.apply(in, o); },
        integrator_options(config_));
    integ.integrate(y, start.t, t_hi, [&](const DenseStep &step, std::span<Complex> state) {
        if (step.t1() > t_lo) {
            LocalCurve::Segment seg{step.t0(), step.h(), {}};
            for (size_t p = 0; p < 3; p++) {
                seg.coef[p] = probe_coefficients(probes_[p], step);
            }
            out.segments_.push_back(seg);
        }
        return guard_state(liou, state, step.t1(), scratch);
    });
    return out;
}

}  // namespace qmetro
