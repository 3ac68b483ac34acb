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

#ifndef QMETRO_MODEL_H
#define QMETRO_MODEL_H

#include <string>
#include <string_view>
#include <vector>

#include "qmetro/pauli.h"

namespace qmetro {

/// The five estimation setups. Each fixes a (Hamiltonian, probe, measurement) triple:
///
///   cluster   H_II, (|+_N> + |-_N>)/sqrt2, prod Z
///   ref1-max  H_I,  GHZ,                   prod X
///   ref1-unc  H_I,  |+>^N,                 sum X
///   ref2-max  H_II, GHZ,                   prod X
///   ref2-unc  H_II, |+>^N,                 sum X
enum class Scheme { kCluster, kRef1Max, kRef1Unc, kRef2Max, kRef2Unc };

enum class ChannelKind { kDephasing, kDepolarizing, kDamping };

struct NoiseChannel {
    ChannelKind kind = ChannelKind::kDephasing;
    /// Rate in units of chi.
    double gamma = 0.0;
};

std::string_view to_string(Scheme s);
std::string_view to_string(ChannelKind k);
Scheme parse_scheme(std::string_view text);
ChannelKind parse_channel(std::string_view text);
/// True for the schemes whose measurement is a single +-1 valued product.
bool has_product_measurement(Scheme s);
/// True for ref2-* and cluster, which evolve under the stabilizer-sum Hamiltonian.
bool uses_stabilizer_hamiltonian(Scheme s);

/// Evolution window ceil(1 / (0.005 N)).
double default_window(size_t n);

struct ExperimentConfig {
    size_t n = 2;
    double chi = 1.0;
    NoiseChannel channel;
    Scheme scheme = Scheme::kCluster;
    double t_max = 100.0;
    size_t samples_per_period = 32;
    double total_time_T = 1.0;
    double rtol = 1e-9;
    double atol = 1e-12;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;
    /// Oscillation period 2 pi / (N chi) that sets the output grid density.
    double period() const;
};

/// K^(i) = Z^(i-1) X^(i) Z^(i+1) on a chain, with 1 <= i <= n and the
/// out-of-range neighbours omitted.
PauliString stabilizer(size_t i, size_t n);

/// 1D cluster state |+_N>: |+>^N followed by CZ on every adjacent pair.
StateVector build_cluster_state(size_t n);
StateVector build_probe_state(Scheme scheme, size_t n);
/// H_chi = chi * H_0 for the scheme.
ObservableOperator build_hamiltonian(Scheme scheme, size_t n, double chi);
ObservableOperator build_measurement(Scheme scheme, size_t n);

/// One Lindblad term rate * (L rho L^dag - {L^dag L, rho} / 2) acting on one qubit.
struct JumpTerm {
    double rate;
    size_t qubit;
    PauliSum op;
};

/// sigma_+ = (X + iY)/2 and sigma_- = (X - iY)/2 on one qubit of an n-qubit register.
PauliSum sigma_plus(size_t n, size_t qubit);
PauliSum sigma_minus(size_t n, size_t qubit);

/// Per-qubit dissipator terms of a channel:
///
///   dephasing     (gamma/2) (Z rho Z - rho)
///   depolarizing  (gamma/4) (2 s- rho s+ - {s+ s-, rho} + 2 s+ rho s- - {s- s+, rho} + Z rho Z - rho)
///   damping       (gamma/2) (2 s+ rho s- - {s- s+, rho})
///
/// With sigma_+ = |0><1| the damping channel relaxes each qubit into |0>.
std::vector<JumpTerm> jump_operators(const NoiseChannel &channel, size_t n);

/// Dense reference evaluation of sum_k D_k(m) for the given terms.
Eigen::MatrixXcd apply_dissipator(const std::vector<JumpTerm> &terms, const Eigen::MatrixXcd &m);

}  // namespace qmetro

#endif
