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

#include "qmetro/integrator.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmetro/errors.h"

namespace qmetro {

namespace {

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double *as_doubles(Complex *p) {
    return reinterpret_cast<double *>(p);
}

// Step-size controller constants.
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr double kBeta = 0.04;

}  // namespace

std::array<double, 5> DenseStep::weights(double t) const {
    double th = (t - t0_) / h_;
    double th1 = 1.0 - th;
    return {1.0, th, th * th1, th * th * th1, th * th * th1 * th1};
}

void DenseStep::interpolate(double t, std::span<Complex> out) const {
    auto w = weights(t);
    for (size_t i = 0; i < out.size(); i++) {
        out[i] = r_[0][i] + w[1] * r_[1][i] + w[2] * r_[2][i] + w[3] * r_[3][i] + w[4] * r_[4][i];
    }
}

DormandPrince45::DormandPrince45(size_t dim, Rhs rhs, IntegratorOptions options)
    : dim_(dim), rhs_(std::move(rhs)), opts_(options) {
    for (auto &k : k_) {
        k.assign(dim, Complex{});
    }
    for (auto &r : rcont_) {
        r.assign(dim, Complex{});
    }
    ytmp_.assign(dim, Complex{});
    ynew_.assign(dim, Complex{});
    err_.assign(dim, Complex{});
    incr_.assign(dim, Complex{});
    comp_.assign(dim, Complex{});
}

void DormandPrince45::eval(std::span<const Complex> y, std::vector<Complex> &dy) {
    rhs_(y, dy);
    stats_.rhs_evaluations++;
}

double DormandPrince45::error_norm(std::span<const Complex> y0, std::span<const Complex> y1) const {
    double acc = 0;
    for (size_t i = 0; i < dim_; i++) {
        // sqrt(norm) rather than std::abs, which goes through hypot and dominates the step cost.
        double sk = opts_.atol + opts_.rtol * std::sqrt(std::max(std::norm(y0[i]), std::norm(y1[i])));
        acc += std::norm(err_[i]) / (sk * sk);
    }
    return std::sqrt(acc / static_cast<double>(std::max<size_t>(dim_, 1)));
}

double DormandPrince45::initial_step(std::span<const Complex> y, double span) {
    double dy0 = 0, df0 = 0;
    for (size_t i = 0; i < dim_; i++) {
        double sk = opts_.atol + opts_.rtol * std::sqrt(std::norm(y[i]));
        dy0 += std::norm(y[i]) / (sk * sk);
        df0 += std::norm(k_[0][i]) / (sk * sk);
    }
    double n = static_cast<double>(std::max<size_t>(dim_, 1));
    dy0 = std::sqrt(dy0 / n);
    df0 = std::sqrt(df0 / n);
    double h0 = (dy0 <= 1e-10 || df0 <= 1e-10) ? 1e-6 : 0.01 * dy0 / df0;
    h0 = std::min({h0, span, opts_.max_step});
    for (size_t i = 0; i < dim_; i++) {
        ytmp_[i] = y[i] + h0 * k_[0][i];
    }
    eval(ytmp_, k_[1]);
    double d2 = 0;
    for (size_t i = 0; i < dim_; i++) {
        double sk = opts_.atol + opts_.rtol * std::sqrt(std::norm(y[i]));
        d2 += std::norm(k_[1][i] - k_[0][i]) / (sk * sk);
    }
    d2 = std::sqrt(d2 / n) / h0;
    double dmax = std::max(df0, d2);
    double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min({100 * h0, h1, span, opts_.max_step});
}

void DormandPrince45::integrate(std::span<Complex> y, double t0, double t1, const OnStep &on_step) {
    if (y.size() != dim_) {
        throw DimensionMismatch("state length does not match the integrator dimension");
    }
    if (!(t1 > t0)) {
        return;
    }
    auto &[k1, k2, k3, k4, k5, k6, k7] = k_;
    std::fill(comp_.begin(), comp_.end(), Complex{});
    eval(y, k1);
    double t = t0;
    double h = initial_step(y, t1 - t0);
    double facold = 1e-4;
    const double expo = 0.2 - kBeta * 0.75;
    bool rejected_last = false;

    while (t < t1) {
        bool last = false;
        if (t + h >= t1 || (t1 - (t + h)) <= 1e-12 * std::max(1.0, std::abs(t1))) {
            h = t1 - t;
            last = true;
        }
        if (h < opts_.min_step && !last) {
            std::ostringstream msg;
            msg << "step size " << h << " below floor " << opts_.min_step << " at t = " << t;
            throw StiffnessError(msg.str());
        }

        // Stage combinations have real weights, so run them over the interleaved
        // real/imaginary doubles where they vectorize.
        const size_t m = 2 * dim_;
        double *yv = as_doubles(y.data());
        double *tv = as_doubles(ytmp_.data());
        const double *q1 = as_doubles(k1.data()), *q2 = as_doubles(k2.data()), *q3 = as_doubles(k3.data()),
                     *q4 = as_doubles(k4.data()), *q5 = as_doubles(k5.data()), *q6 = as_doubles(k6.data()),
                     *q7 = as_doubles(k7.data());
        for (size_t i = 0; i < m; i++) {
            tv[i] = yv[i] + h * a21 * q1[i];
        }
        eval(ytmp_, k2);
        for (size_t i = 0; i < m; i++) {
            tv[i] = yv[i] + h * (a31 * q1[i] + a32 * q2[i]);
        }
        eval(ytmp_, k3);
        for (size_t i = 0; i < m; i++) {
            tv[i] = yv[i] + h * (a41 * q1[i] + a42 * q2[i] + a43 * q3[i]);
        }
        eval(ytmp_, k4);
        for (size_t i = 0; i < m; i++) {
            tv[i] = yv[i] + h * (a51 * q1[i] + a52 * q2[i] + a53 * q3[i] + a54 * q4[i]);
        }
        eval(ytmp_, k5);
        for (size_t i = 0; i < m; i++) {
            tv[i] = yv[i] + h * (a61 * q1[i] + a62 * q2[i] + a63 * q3[i] + a64 * q4[i] + a65 * q5[i]);
        }
        eval(ytmp_, k6);
        double *inc = as_doubles(incr_.data());
        double *cmp = as_doubles(comp_.data());
        double *yn = as_doubles(ynew_.data());
        for (size_t i = 0; i < m; i++) {
            // Compensated update: carry the rounding error of y + dy into the next step.
            inc[i] = h * (a71 * q1[i] + a73 * q3[i] + a74 * q4[i] + a75 * q5[i] + a76 * q6[i]) - cmp[i];
            yn[i] = yv[i] + inc[i];
        }
        eval(ynew_, k7);
        double *ev = as_doubles(err_.data());
        for (size_t i = 0; i < m; i++) {
            ev[i] = h * (e1 * q1[i] + e3 * q3[i] + e4 * q4[i] + e5 * q5[i] + e6 * q6[i] + e7 * q7[i]);
        }
        double err = error_norm(y, ynew_);
        if (!std::isfinite(err)) {
            throw StiffnessError("non-finite error estimate at t = " + std::to_string(t));
        }

        double fac11 = std::pow(err, expo);
        if (err <= 1.0) {
            stats_.accepted++;
            double *r0 = as_doubles(rcont_[0].data()), *r1 = as_doubles(rcont_[1].data()),
                   *r2 = as_doubles(rcont_[2].data()), *r3 = as_doubles(rcont_[3].data()),
                   *r4 = as_doubles(rcont_[4].data());
            for (size_t i = 0; i < m; i++) {
                double ydiff = yn[i] - yv[i];
                double bspl = h * q1[i] - ydiff;
                r0[i] = yv[i];
                r1[i] = ydiff;
                r2[i] = bspl;
                r3[i] = ydiff - h * q7[i] - bspl;
                r4[i] = h * (d1 * q1[i] + d3 * q3[i] + d4 * q4[i] + d5 * q5[i] + d6 * q6[i] + d7 * q7[i]);
                cmp[i] = ydiff - inc[i];
            }
            std::copy(ynew_.begin(), ynew_.end(), y.begin());
            std::swap(k1, k7);
            double t_end = last ? t1 : t + h;
            DenseStep step(t, h, rcont_);
            if (on_step && on_step(step, y)) {
                std::fill(comp_.begin(), comp_.end(), Complex{});
                eval(y, k1);
            }
            t = t_end;
            if (last) {
                break;
            }
            double fac = fac11 / std::pow(facold, kBeta) / kSafety;
            fac = std::clamp(fac, 1.0 / kFacMax, 1.0 / kFacMin);
            double hnew = h / fac;
            if (rejected_last) {
                hnew = std::min(hnew, h);
            }
            facold = std::max(err, 1e-4);
            h = std::min(hnew, opts_.max_step);
            rejected_last = false;
        } else {
            stats_.rejected++;
            h = h / std::min(1.0 / kFacMin, fac11 / kSafety);
            rejected_last = true;
            if (h < opts_.min_step) {
                std::ostringstream msg;
                msg << "step size " << h << " below floor " << opts_.min_step << " at t = " << t;
                throw StiffnessError(msg.str());
            }
        }
    }
}

}  // namespace qmetro
