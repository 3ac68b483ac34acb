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

#ifndef QMETRO_LIOUVILLIAN_H
#define QMETRO_LIOUVILLIAN_H

#include <cstdint>
#include <span>
#include <vector>

#include "qmetro/frame.h"
#include "qmetro/model.h"

namespace qmetro {

/// coef * left * rho * right with phase-free words.
struct PairTerm {
    Complex coef;
    PauliString left;
    PauliString right;
};

/// The master equation written as a sum of pair terms. The Hamiltonian part is
/// linear in chi; dividing it by chi gives the chi-derivative of the generator.
struct PairExpansion {
    std::vector<PairTerm> hamiltonian;
    std::vector<PairTerm> dissipator;
};

/// Expands i[rho, chi h0] and the jump terms, conjugated into `frame`, merging
/// duplicate pairs and dropping coefficients below 1e-15.
PairExpansion expand_lindbladian(const ObservableOperator &h0, double chi, const std::vector<JumpTerm> &jumps,
                                 CliffordFrame frame);

/// A linear functional y -> sum_k w_k y[k] over the packed state.
struct Probe {
    std::vector<uint32_t> index;
    std::vector<Complex> weight;

    Complex apply(std::span<const Complex> y) const {
        Complex acc{};
        for (size_t k = 0; k < index.size(); k++) {
            acc += weight[k] * y[index[k]];
        }
        return acc;
    }
};

/// Matrix-free generator for the joint system (rho, d rho / d chi).
///
/// The problem is moved into whichever Clifford frame keeps the set of
/// reachable density-matrix entries smallest. Only those entries are stored:
/// entries outside the closure of the initial support under the generator's
/// index moves stay exactly zero for all time. The packed state holds the
/// active rho entries followed by the matching d rho / d chi entries.
class CompiledLiouvillian {
   public:
    /// Picks the frame with the smallest support.
    explicit CompiledLiouvillian(const ExperimentConfig &config);
    /// Uses a fixed frame; mainly for tests.
    CompiledLiouvillian(const ExperimentConfig &config, CliffordFrame frame);

    size_t num_qubits() const {
        return n_;
    }
    CliffordFrame frame() const {
        return frame_;
    }
    /// Number of active density-matrix entries.
    size_t support_size() const {
        return entries_.size();
    }
    /// Length of the packed state, 2 * support_size().
    size_t state_size() const {
        return 2 * entries_.size();
    }

    /// rho(0) = |psi><psi| and d rho / d chi (0) = 0, packed.
    std::vector<Complex> initial_state() const;
    void apply(std::span<const Complex> y, std::span<Complex> dy) const;

    /// tr(op rho) or tr(op d rho / d chi) for a computational-basis operator.
    Probe probe(const PauliSum &op, bool sensitivity) const;

    /// Packed state back to dense computational-basis matrices.
    Eigen::MatrixXcd unpack_rho(std::span<const Complex> y) const;
    Eigen::MatrixXcd unpack_sensitivity(std::span<const Complex> y) const;

    /// Largest deviation from Hermiticity and |tr - target| over both halves.
    struct Defects {
        double rho_trace;
        double rho_hermiticity;
        double sens_trace;
        double sens_hermiticity;
        double sens_scale;
    };
    Defects defects(std::span<const Complex> y) const;
    Complex rho_trace(std::span<const Complex> y) const;
    /// Smallest eigenvalue of rho; frame independent.
    double min_eigenvalue(std::span<const Complex> y) const;

   private:
    struct Term {
        Complex coef;
        uint64_t left_x;
        uint64_t z_combined;
    };
    struct Group {
        uint64_t move;
        std::vector<Term> terms;
        // Optional per-entry tables: source entry and summed coefficient.
        std::vector<uint32_t> src;
        std::vector<Complex> coef;
    };

    void compile(const PairExpansion &pairs, const Eigen::VectorXcd &psi);
    static void add_groups(const std::vector<PairTerm> &pairs, size_t n, std::vector<Group> &groups,
                           std::vector<Term> &diagonal);
    Eigen::MatrixXcd unpack(std::span<const Complex> half) const;
    Complex group_coefficient(const Group &g, size_t k, size_t &src) const;

    size_t n_ = 0;
    double chi_ = 1.0;
    CliffordFrame frame_ = CliffordFrame::kComputational;
    Eigen::VectorXcd psi_;
    std::vector<uint64_t> entries_;
    std::vector<int32_t> position_;
    std::vector<uint32_t> transpose_;
    std::vector<Complex> ham_diag_;
    std::vector<Complex> diss_diag_;
    std::vector<Group> ham_groups_;
    std::vector<Group> diss_groups_;
    std::vector<uint32_t> diag_entries_;
};

}  // namespace qmetro

#endif
