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

#ifndef QMETRO_INTEGRATOR_H
#define QMETRO_INTEGRATOR_H

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "qmetro/pauli.h"

namespace qmetro {

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    /// A predicted step below this raises StiffnessError.
    double min_step = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
};

struct IntegratorStats {
    uint64_t accepted = 0;
    uint64_t rejected = 0;
    uint64_t rhs_evaluations = 0;
};

/// Fifth-order continuous extension of one accepted Dormand-Prince step,
///
///     y(t0 + theta h) = r1 + theta r2 + theta (1-theta) r3
///                       + theta^2 (1-theta) r4 + theta^2 (1-theta)^2 r5.
///
/// Because the interpolant is linear in the r vectors, a linear functional of
/// the state can be interpolated by applying it to r1..r5 once.
class DenseStep {
   public:
    DenseStep(double t0, double h, const std::array<std::vector<Complex>, 5> &r) : t0_(t0), h_(h), r_(r) {
    }

    double t0() const {
        return t0_;
    }
    double t1() const {
        return t0_ + h_;
    }
    double h() const {
        return h_;
    }
    std::span<const Complex> coefficient(size_t m) const {
        return r_[m];
    }
    /// Weights w with y(t) = sum_m w[m] r_m.
    std::array<double, 5> weights(double t) const;
    void interpolate(double t, std::span<Complex> out) const;

   private:
    double t0_;
    double h_;
    const std::array<std::vector<Complex>, 5> &r_;
};

/// Dormand-Prince 5(4) with FSAL, PI step control and dense output, for
/// complex linear or nonlinear systems y' = f(y).
class DormandPrince45 {
   public:
    using Rhs = std::function<void(std::span<const Complex> y, std::span<Complex> dy)>;
    /// Called after every accepted step with the new state. Returning true
    /// signals that y was modified in place, which invalidates the FSAL stage.
    using OnStep = std::function<bool(const DenseStep &step, std::span<Complex> y)>;

    DormandPrince45(size_t dim, Rhs rhs, IntegratorOptions options);

    /// Advances y from t0 to exactly t1.
    void integrate(std::span<Complex> y, double t0, double t1, const OnStep &on_step);

    const IntegratorStats &stats() const {
        return stats_;
    }

   private:
    double error_norm(std::span<const Complex> y0, std::span<const Complex> y1) const;
    double initial_step(std::span<const Complex> y, double span);
    void eval(std::span<const Complex> y, std::vector<Complex> &dy);

    size_t dim_;
    Rhs rhs_;
    IntegratorOptions opts_;
    IntegratorStats stats_;
    std::array<std::vector<Complex>, 7> k_;
    std::vector<Complex> ytmp_;
    std::vector<Complex> ynew_;
    std::vector<Complex> err_;
    std::vector<Complex> incr_;
    std::vector<Complex> comp_;
    std::array<std::vector<Complex>, 5> rcont_;
};

}  // namespace qmetro

#endif
