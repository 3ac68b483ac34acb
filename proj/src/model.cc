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

#include "qmetro/model.h"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmetro {

namespace {

void require_qubits(size_t n) {
    if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("qubit count " + std::to_string(n) + " outside [1, " +
                                    std::to_string(kMaxQubits) + "]");
    }
}

}  // namespace

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::kCluster:
            return "cluster";
        case Scheme::kRef1Max:
            return "ref1-max";
        case Scheme::kRef1Unc:
            return "ref1-unc";
        case Scheme::kRef2Max:
            return "ref2-max";
        case Scheme::kRef2Unc:
            return "ref2-unc";
    }
    throw std::invalid_argument("invalid scheme");
}

std::string_view to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::kDephasing:
            return "dephasing";
        case ChannelKind::kDepolarizing:
            return "depolarizing";
        case ChannelKind::kDamping:
            return "damping";
    }
    throw std::invalid_argument("invalid channel");
}

Scheme parse_scheme(std::string_view text) {
    for (auto s : {Scheme::kCluster, Scheme::kRef1Max, Scheme::kRef1Unc, Scheme::kRef2Max, Scheme::kRef2Unc}) {
        if (text == to_string(s)) {
            return s;
        }
    }
    throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

ChannelKind parse_channel(std::string_view text) {
    for (auto k : {ChannelKind::kDephasing, ChannelKind::kDepolarizing, ChannelKind::kDamping}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown channel '" + std::string(text) + "'");
}

bool has_product_measurement(Scheme s) {
    return s == Scheme::kCluster || s == Scheme::kRef1Max || s == Scheme::kRef2Max;
}

bool uses_stabilizer_hamiltonian(Scheme s) {
    return s == Scheme::kCluster || s == Scheme::kRef2Max || s == Scheme::kRef2Unc;
}

double default_window(size_t n) {
    require_qubits(n);
    // 1 / (0.005 n) = 200 / n exactly, so take the integer ceiling.
    return static_cast<double>((200 + n - 1) / n);
}

void ExperimentConfig::validate() const {
    require_qubits(n);
    if (!(chi > 0) || !std::isfinite(chi)) {
        throw std::invalid_argument("chi must be positive");
    }
    if (!(channel.gamma >= 0) || !std::isfinite(channel.gamma)) {
        throw std::invalid_argument("gamma must be non-negative");
    }
    if (!(t_max > 0) || !std::isfinite(t_max)) {
        throw std::invalid_argument("t_max must be positive");
    }
    if (samples_per_period < 16) {
        throw std::invalid_argument("samples_per_period must be at least 16");
    }
    if (!(total_time_T > 0)) {
        throw std::invalid_argument("total_time_T must be positive");
    }
    if (!(rtol > 0) || !(atol > 0)) {
        throw std::invalid_argument("integrator tolerances must be positive");
    }
}

double ExperimentConfig::period() const {
    return 2 * std::numbers::pi / (static_cast<double>(n) * chi);
}

PauliString stabilizer(size_t i, size_t n) {
    require_qubits(n);
    if (i < 1 || i > n) {
        throw std::out_of_range("stabilizer index " + std::to_string(i) + " outside [1, " + std::to_string(n) + "]");
    }
    PauliString k = PauliString::single(n, i - 1, Pauli::X);
    if (i > 1) {
        k.set_letter(i - 2, Pauli::Z);
    }
    if (i < n) {
        k.set_letter(i, Pauli::Z);
    }
    return k;
}

StateVector build_cluster_state(size_t n) {
    require_qubits(n);
    auto dim = Eigen::Index{1} << n;
    Eigen::VectorXcd amps(dim);
    double scale = std::pow(2.0, -0.5 * static_cast<double>(n));
    for (Eigen::Index b = 0; b < dim; b++) {
        // CZ on (j, j+1) contributes -1 when both bits are set.
        auto pairs = std::popcount(static_cast<uint64_t>(b) & (static_cast<uint64_t>(b) >> 1));
        amps[b] = (pairs & 1) ? -scale : scale;
    }
    return StateVector::normalized(std::move(amps));
}

StateVector build_probe_state(Scheme scheme, size_t n) {
    require_qubits(n);
    auto dim = Eigen::Index{1} << n;
    switch (scheme) {
        case Scheme::kCluster: {
            StateVector plus = build_cluster_state(n);
            PauliString all_z = PauliString::from_masks(n, 0, static_cast<uint32_t>(dim - 1));
            Eigen::VectorXcd minus = apply_string(all_z, plus.amplitudes());
            return StateVector::normalized(plus.amplitudes() + minus);
        }
        case Scheme::kRef1Max:
        case Scheme::kRef2Max: {
            Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
            amps[0] = 1;
            amps[dim - 1] = 1;
            return StateVector::normalized(std::move(amps));
        }
        case Scheme::kRef1Unc:
        case Scheme::kRef2Unc:
            return StateVector::normalized(Eigen::VectorXcd::Ones(dim));
    }
    throw std::invalid_argument("invalid scheme");
}

ObservableOperator build_hamiltonian(Scheme scheme, size_t n, double chi) {
    require_qubits(n);
    ObservableOperator h(n);
    for (size_t j = 1; j <= n; j++) {
        if (uses_stabilizer_hamiltonian(scheme)) {
            h.add(chi / 2, stabilizer(j, n));
        } else {
            h.add(chi / 2, PauliString::single(n, j - 1, Pauli::Z));
        }
    }
    return h;
}

ObservableOperator build_measurement(Scheme scheme, size_t n) {
    require_qubits(n);
    uint32_t all = static_cast<uint32_t>((uint64_t{1} << n) - 1);
    ObservableOperator m(n);
    switch (scheme) {
        case Scheme::kCluster:
            m.add(1.0, PauliString::from_masks(n, 0, all));
            break;
        case Scheme::kRef1Max:
        case Scheme::kRef2Max:
            m.add(1.0, PauliString::from_masks(n, all, 0));
            break;
        case Scheme::kRef1Unc:
        case Scheme::kRef2Unc:
            for (size_t j = 0; j < n; j++) {
                m.add(1.0, PauliString::single(n, j, Pauli::X));
            }
            break;
    }
    return m;
}

PauliSum sigma_plus(size_t n, size_t qubit) {
    PauliSum s(n);
    s.add(0.5, PauliString::single(n, qubit, Pauli::X));
    s.add(Complex(0, 0.5), PauliString::single(n, qubit, Pauli::Y));
    return s;
}

PauliSum sigma_minus(size_t n, size_t qubit) {
    PauliSum s(n);
    s.add(0.5, PauliString::single(n, qubit, Pauli::X));
    s.add(Complex(0, -0.5), PauliString::single(n, qubit, Pauli::Y));
    return s;
}

std::vector<JumpTerm> jump_operators(const NoiseChannel &channel, size_t n) {
    require_qubits(n);
    if (!(channel.gamma >= 0)) {
        throw std::invalid_argument("gamma must be non-negative");
    }
    double g = channel.gamma;
    std::vector<JumpTerm> out;
    for (size_t q = 0; q < n; q++) {
        PauliSum z(n);
        z.add(1.0, PauliString::single(n, q, Pauli::Z));
        switch (channel.kind) {
            case ChannelKind::kDephasing:
                out.push_back({g / 2, q, z});
                break;
            case ChannelKind::kDepolarizing:
                // (g/4) * 2 (s rho s^dag - {s^dag s, rho}/2) for s = s-, s+, then (g/4)(Z rho Z - rho).
                out.push_back({g / 2, q, sigma_minus(n, q)});
                out.push_back({g / 2, q, sigma_plus(n, q)});
                out.push_back({g / 4, q, z});
                break;
            case ChannelKind::kDamping:
                out.push_back({g, q, sigma_plus(n, q)});
                break;
        }
    }
    return out;
}

Eigen::MatrixXcd apply_dissipator(const std::vector<JumpTerm> &terms, const Eigen::MatrixXcd &m) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (const auto &term : terms) {
        PauliSum ldag_l = term.op.adjoint() * term.op;
        for (const auto &[a, pa] : term.op.terms()) {
            Eigen::MatrixXcd left = apply_left(pa, m);
            for (const auto &[b, pb] : term.op.terms()) {
                // (b pb)^dag = conj(b) pb for phase-free words.
                out += term.rate * a * std::conj(b) * apply_right(left, pb);
            }
        }
        for (const auto &[c, p] : ldag_l.terms()) {
            out -= 0.5 * term.rate * c * (apply_left(p, m) + apply_right(m, p));
        }
    }
    return out;
}

}  // namespace qmetro
