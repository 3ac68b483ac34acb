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

#ifndef QMETRO_ANALYTIC_H
#define QMETRO_ANALYTIC_H

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmetro/model.h"

namespace qmetro {

/// Two-qubit Pauli coefficients c_ij of rho = 1/4 + sum c_ij sigma_i (x) sigma_j,
/// ordered row-major over (i, j) in {0..3}^2 with (0, 0) left out.
using CoefficientVector = Eigen::Matrix<Complex, 15, 1>;
using GeneratorMatrix = Eigen::Matrix<Complex, 15, 15>;

/// Position of c_ij in a CoefficientVector.
int coefficient_index(int i, int j);

/// Integer weights of a generator in the form chi * (re + i im) + gamma * g.
struct SymbolicGenerator {
    Eigen::Matrix<int, 15, 15> chi_re;
    Eigen::Matrix<int, 15, 15> chi_im;
    Eigen::Matrix<int, 15, 15> gamma;

    GeneratorMatrix evaluate(double chi, double gamma) const;
};

/// The coefficient-ODE generator of the N=2 cluster setup under dephasing,
/// transcribed entry by entry from its published form.
SymbolicGenerator printed_generator();

/// The same generator derived from the master equation by projecting
/// L(sigma_kl) onto the Pauli basis. Each projection is checked to be an
/// integer multiple of chi or gamma before it is accepted.
SymbolicGenerator derived_generator();

/// Published matrix evaluated at (chi, gamma).
GeneratorMatrix build_matrix_a(double chi, double gamma);
/// Derived matrix evaluated at (chi, gamma).
GeneratorMatrix derive_matrix_a(double chi, double gamma);

struct GeneratorMismatch {
    int row;  // 1-indexed
    int col;  // 1-indexed
    std::string printed;
    std::string derived;
};

/// Entries where the two symbolic generators differ.
std::vector<GeneratorMismatch> compare_generators(const SymbolicGenerator &printed, const SymbolicGenerator &derived);

/// c(0) for the N=2 cluster probe: c11 = -1/4, c22 = c33 = 1/4.
CoefficientVector initial_coefficients();

struct ExpmEvolution {
    CoefficientVector c;
    double expM;
};

/// c(t) = exp(A t) c(0) with the derived generator, and <M_c> = 4 c33.
ExpmEvolution evolve_expm(double chi, double gamma, double t);

/// Omega = sqrt(4 chi^2 - gamma^2); throws OmegaDomainError unless 0 <= gamma < 2 chi.
double omega(double chi, double gamma);

/// <M_c>(t) = exp(-gamma t) (cos(Omega t) + (gamma / Omega) sin(Omega t)).
double closed_form_expectation_n2(double chi, double gamma, double t);

/// Exact N=1 or N=2 cluster deviation under dephasing. Non-finite where the
/// signal derivative vanishes.
double closed_form_deviation(size_t n, double chi, double gamma, double t, double T);

/// Natural extension of the N=2 expectation to N qubits: gamma -> N gamma / 2
/// and Omega -> N Omega / 2.
double extrapolated_cluster_expectation(size_t n, double chi, double gamma, double t);

enum class EnvelopeFamily { kRefMax, kRefUnc, kClusterApprox };

std::string_view to_string(EnvelopeFamily f);
/// Envelope family that bounds a scheme's deviation.
EnvelopeFamily envelope_family(Scheme s);

/// Lobe-minimum envelopes of the deviation:
///
///   ref-max          exp(N g t) / (N sqrt(T t))
///   ref-unc          exp(g t) / sqrt(N T t)
///   cluster-approx   exp(N g t / 2) / (N sqrt(T t))
///   cluster, N=2     exp(g t) Omega^2 sqrt(t) / (2 sqrt(T) (g + 4 chi^2 t))   (exact = true)
///
/// g is gamma, halved for the reference families under damping.
double envelope(EnvelopeFamily family, size_t n, double chi, double gamma, double t, double T, bool exact = false,
                ChannelKind channel = ChannelKind::kDephasing);

struct EnvelopeMinimum {
    double t_min;
    double deviation_min;
    /// False for gamma = 0, where the envelope decreases forever.
    bool bounded;
};

/// Closed-form minimizer of the envelope and its value. Cluster with n = 2
/// uses the exact envelope.
EnvelopeMinimum minima_and_times(EnvelopeFamily family, size_t n, double chi, double gamma, double T,
                                 ChannelKind channel = ChannelKind::kDephasing);

/// 1 - 1/sqrt2 + 3/(4 sqrt2) x^2, the small-rate improvement for x = gamma/chi.
double epsilon_series(double gamma_over_chi);

/// gamma_k = 2 chi / sqrt((k pi)^2 + 1) for odd k <= k_max.
std::vector<double> hump_positions(double chi, int k_max);

struct ScalingTerms {
    double heisenberg_term;
    double offset_term;
    /// N g t / 2, N g t or g t depending on the family.
    double validity_parameter;
    bool valid;
};

/// Leading two terms of the envelope for small gamma t.
ScalingTerms scaling_expansion(EnvelopeFamily family, size_t n, double gamma, double t, double T);

}  // namespace qmetro

#endif
