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

#ifndef QMETRO_VALIDATION_H
#define QMETRO_VALIDATION_H

#include <string>
#include <utility>
#include <vector>

#include "qmetro/analytic.h"
#include "qmetro/metrology.h"

namespace qmetro {

struct CheckResult {
    std::string name;
    bool passed = false;
    double max_error = 0;
    double tolerance = 0;
    std::string detail;
};

/// 1-indexed entries where the printed generator carries a spurious +-i chi
/// that the rederivation does not produce.
const std::vector<std::pair<int, int>> &known_generator_errata();

/// Passes when the printed and derived generators differ exactly at the
/// known errata, so any further change to either side is caught.
CheckResult check_generator(const SymbolicGenerator &printed, const SymbolicGenerator &derived);

/// max |expm <M_c> - closed form| for N = 2 dephasing over [0, t_max].
CheckResult check_expm_closed_form(double gamma = 0.05, double t_max = 50.0);

/// Integrated N = 2 dephasing run against the closed forms: the first result
/// covers <M_c>, the second delta chi sqrt(T), the third the expm evolution.
std::vector<CheckResult> check_integrator_closed_form(double gamma = 0.05, double t_max = 50.0, double rtol = 1e-12,
                                                      double atol = 1e-15);

struct FiniteDifferenceReport {
    double max_rel_error = 0;
    size_t compared = 0;
};

/// Compares d<M>/dchi from the sensitivity equation with a central
/// difference of <M> in chi at every sample where |d<M>/dchi| > floor.
FiniteDifferenceReport finite_difference_error(const ExperimentConfig &config, double h = 1e-5, double floor = 1e-3);

CheckResult check_sensitivity(size_t max_n, double gamma = 0.1, double t_max = 4.0);

/// K_i |+_N> = |+_N>, K_i Z_i |+_N> = -Z_i |+_N>, [K_i, K_j] = 0 for N = 1..max_n.
CheckResult check_stabilizers(size_t max_n = 8);

/// Largest sample difference of <M> and of finite delta chi sqrt(T), each
/// measured as |a - b| / max(1, |a|). The deviation reaches 1e8 late in a
/// decayed run, where only a relative comparison is meaningful.
double max_curve_difference(const PrecisionCurve &a, const PrecisionCurve &b);

/// ref1 curves agree under dephasing and depolarizing noise.
CheckResult check_channel_degeneracy(const std::vector<size_t> &n_list, double gamma = 0.1, double t_max = 20.0);

/// ref1-max under damping follows exp(-N gamma t / 2) cos(N chi t).
CheckResult check_damping_decay(const std::vector<size_t> &n_list, double gamma = 0.1, double t_max = 20.0);

/// Noiseless delta chi sqrt(T) >= 1 / (2 sqrt(t) Delta H_0) for every scheme.
CheckResult check_cramer_rao(size_t max_n = 4, double t_max = 10.0);

/// Noiseless cluster curve equals 1 / (N sqrt(t)) at every finite sample.
CheckResult check_heisenberg(size_t max_n, double tolerance = 1e-8);

/// The full oracle suite run by `validate`.
std::vector<CheckResult> run_validation();

}  // namespace qmetro

#endif
