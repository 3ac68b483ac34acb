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

#include "qmetro/liouvillian.h"

#include <algorithm>
#include <bit>
#include <map>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "qmetro/errors.h"

namespace qmetro {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

using PairKey = std::tuple<uint32_t, uint32_t, uint32_t, uint32_t>;

void accumulate(std::map<PairKey, Complex> &acc, Complex coef, const PauliString &l, const PauliString &r) {
    // Words arrive phase-free except for products, whose phase moves into the coefficient.
    coef *= l.phase() * r.phase();
    acc[{l.x_mask(), l.z_mask(), r.x_mask(), r.z_mask()}] += coef;
}

std::vector<PairTerm> flatten(const std::map<PairKey, Complex> &acc, size_t n) {
    std::vector<PairTerm> out;
    for (const auto &[key, c] : acc) {
        if (std::abs(c) < 1e-15) {
            continue;
        }
        auto [lx, lz, rx, rz] = key;
        out.push_back({c, PauliString::from_masks(n, lx, lz), PauliString::from_masks(n, rx, rz)});
    }
    return out;
}

// Linear span of XOR moves, kept in reduced echelon form keyed by leading bit.
class XorBasis {
   public:
    void insert(uint64_t v) {
        v = reduce(v);
        if (v == 0) {
            return;
        }
        for (auto &b : basis_) {
            if (b & highest(v)) {
                b ^= v;
            }
        }
        basis_.push_back(v);
        std::sort(basis_.begin(), basis_.end(), std::greater<>());
    }
    uint64_t reduce(uint64_t v) const {
        for (uint64_t b : basis_) {
            if (v & highest(b)) {
                v ^= b;
            }
        }
        return v;
    }
    size_t rank() const {
        return basis_.size();
    }
    /// Every element of the span.
    std::vector<uint64_t> elements() const {
        std::vector<uint64_t> out{0};
        for (uint64_t b : basis_) {
            size_t m = out.size();
            for (size_t i = 0; i < m; i++) {
                out.push_back(out[i] ^ b);
            }
        }
        return out;
    }

   private:
    static uint64_t highest(uint64_t v) {
        return v ? (uint64_t{1} << (63 - std::countl_zero(v))) : 0;
    }
    std::vector<uint64_t> basis_;
};

struct SupportPlan {
    XorBasis moves;
    std::vector<uint64_t> cosets;

    size_t size() const {
        return cosets.size() << moves.rank();
    }
};

uint64_t move_of(const PairTerm &p, size_t n) {
    return uint64_t{p.left.x_mask()} | (uint64_t{p.right.x_mask()} << n);
}

std::vector<uint64_t> nonzero_indices(const Eigen::VectorXcd &psi) {
    double peak = psi.cwiseAbs().maxCoeff();
    std::vector<uint64_t> out;
    for (Eigen::Index i = 0; i < psi.size(); i++) {
        if (std::abs(psi[i]) > 1e-14 * peak) {
            out.push_back(static_cast<uint64_t>(i));
        }
    }
    return out;
}

SupportPlan plan_support(const PairExpansion &pairs, const Eigen::VectorXcd &psi, size_t n) {
    SupportPlan plan;
    for (const auto *group : {&pairs.hamiltonian, &pairs.dissipator}) {
        for (const auto &p : *group) {
            plan.moves.insert(move_of(p, n));
        }
    }
    auto nz = nonzero_indices(psi);
    for (uint64_t i : nz) {
        for (uint64_t j : nz) {
            plan.cosets.push_back(plan.moves.reduce(i | (j << n)));
        }
    }
    std::sort(plan.cosets.begin(), plan.cosets.end());
    plan.cosets.erase(std::unique(plan.cosets.begin(), plan.cosets.end()), plan.cosets.end());
    return plan;
}

bool parity(uint64_t v) {
    return std::popcount(v) & 1;
}

// Plain complex product; operator* adds NaN recovery branches that block vectorization.
inline Complex cmul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

constexpr size_t kTableBudgetBytes = size_t{256} << 20;

}  // namespace

PairExpansion expand_lindbladian(const ObservableOperator &h0, double chi, const std::vector<JumpTerm> &jumps,
                                 CliffordFrame frame) {
    size_t n = h0.num_qubits();
    PauliString id = PauliString::identity(n);
    std::map<PairKey, Complex> ham;
    for (const auto &[c, p] : h0.terms()) {
        PauliString w = conjugate(p, frame);
        // i [rho, H] = i rho H - i H rho.
        accumulate(ham, kI * chi * c, id, w);
        accumulate(ham, -kI * chi * c, w, id);
    }
    std::map<PairKey, Complex> diss;
    for (const auto &term : jumps) {
        PauliSum l = conjugate(term.op, frame);
        for (const auto &[a, pa] : l.terms()) {
            for (const auto &[b, pb] : l.terms()) {
                accumulate(diss, term.rate * a * std::conj(b), pa, pb);
                // L^dag L contributes conj(a) b pa pb on either side.
                PauliString prod = pa * pb;
                Complex half = -0.5 * term.rate * std::conj(a) * b;
                accumulate(diss, half, prod, id);
                accumulate(diss, half, id, prod);
            }
        }
    }
    return {flatten(ham, n), flatten(diss, n)};
}

CompiledLiouvillian::CompiledLiouvillian(const ExperimentConfig &config) {
    config.validate();
    n_ = config.n;
    chi_ = config.chi;
    ObservableOperator h0 = build_hamiltonian(config.scheme, n_, 1.0);
    auto jumps = jump_operators(config.channel, n_);
    Eigen::VectorXcd psi = build_probe_state(config.scheme, n_).amplitudes();

    size_t best_size = 0;
    for (CliffordFrame f : kAllFrames) {
        PairExpansion pairs = expand_lindbladian(h0, chi_, jumps, f);
        Eigen::VectorXcd psi_f = to_frame(psi, f);
        size_t size = plan_support(pairs, psi_f, n_).size();
        if (best_size == 0 || size < best_size) {
            best_size = size;
            frame_ = f;
        }
    }
    compile(expand_lindbladian(h0, chi_, jumps, frame_), to_frame(psi, frame_));
}

CompiledLiouvillian::CompiledLiouvillian(const ExperimentConfig &config, CliffordFrame frame) {
    config.validate();
    n_ = config.n;
    chi_ = config.chi;
    frame_ = frame;
    ObservableOperator h0 = build_hamiltonian(config.scheme, n_, 1.0);
    auto jumps = jump_operators(config.channel, n_);
    Eigen::VectorXcd psi = build_probe_state(config.scheme, n_).amplitudes();
    compile(expand_lindbladian(h0, chi_, jumps, frame_), to_frame(psi, frame_));
}

void CompiledLiouvillian::add_groups(const std::vector<PairTerm> &pairs, size_t n, std::vector<Group> &groups,
                                     std::vector<Term> &diagonal) {
    std::map<uint64_t, std::vector<Term>> by_move;
    for (const auto &p : pairs) {
        uint64_t lx = p.left.x_mask(), lz = p.left.z_mask();
        uint64_t rx = p.right.x_mask(), rz = p.right.z_mask();
        // Words are phase-free, so each contributes i^|x & z| from Y = i X Z.
        int k = std::popcount(lx & lz) + std::popcount(rx & rz);
        Term t{p.coef * kPowersOfI[k & 3], lx, lz | (rz << n)};
        uint64_t move = lx | (rx << n);
        if (move == 0) {
            diagonal.push_back(t);
        } else {
            by_move[move].push_back(t);
        }
    }
    for (auto &[move, terms] : by_move) {
        groups.push_back({move, std::move(terms), {}, {}});
    }
}

void CompiledLiouvillian::compile(const PairExpansion &pairs, const Eigen::VectorXcd &psi) {
    psi_ = psi;
    double peak = psi_.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < psi_.size(); i++) {
        if (std::abs(psi_[i]) <= 1e-14 * peak) {
            psi_[i] = 0;
        }
    }

    SupportPlan plan = plan_support(pairs, psi_, n_);
    auto span = plan.moves.elements();
    entries_.clear();
    entries_.reserve(plan.size());
    for (uint64_t c : plan.cosets) {
        for (uint64_t s : span) {
            entries_.push_back(c ^ s);
        }
    }
    std::sort(entries_.begin(), entries_.end());

    position_.assign(size_t{1} << (2 * n_), -1);
    for (size_t k = 0; k < entries_.size(); k++) {
        position_[entries_[k]] = static_cast<int32_t>(k);
    }
    uint64_t low = (uint64_t{1} << n_) - 1;
    transpose_.resize(entries_.size());
    diag_entries_.clear();
    for (size_t k = 0; k < entries_.size(); k++) {
        uint64_t i = entries_[k] & low, j = entries_[k] >> n_;
        transpose_[k] = static_cast<uint32_t>(position_[j | (i << n_)]);
        if (i == j) {
            diag_entries_.push_back(static_cast<uint32_t>(k));
        }
    }

    std::vector<Term> ham_diag, diss_diag;
    ham_groups_.clear();
    diss_groups_.clear();
    add_groups(pairs.hamiltonian, n_, ham_groups_, ham_diag);
    add_groups(pairs.dissipator, n_, diss_groups_, diss_diag);
    auto fold = [&](const std::vector<Term> &terms, std::vector<Complex> &table) {
        table.assign(entries_.size(), Complex{});
        for (size_t k = 0; k < entries_.size(); k++) {
            for (const auto &t : terms) {
                table[k] += parity(entries_[k] & t.z_combined) ? -t.coef : t.coef;
            }
        }
    };
    fold(ham_diag, ham_diag_);
    fold(diss_diag, diss_diag_);

    // Tabulate source indices and coefficients per group when they fit the budget.
    size_t groups = ham_groups_.size() + diss_groups_.size();
    if (groups * entries_.size() * (sizeof(uint32_t) + sizeof(Complex)) <= kTableBudgetBytes) {
        for (auto *list : {&ham_groups_, &diss_groups_}) {
            for (auto &g : *list) {
                std::vector<uint32_t> src(entries_.size());
                std::vector<Complex> coef(entries_.size());
                for (size_t k = 0; k < entries_.size(); k++) {
                    size_t idx;
                    coef[k] = group_coefficient(g, k, idx);
                    src[k] = static_cast<uint32_t>(idx);
                }
                g.src = std::move(src);
                g.coef = std::move(coef);
            }
        }
    }
}

std::vector<Complex> CompiledLiouvillian::initial_state() const {
    std::vector<Complex> y(state_size(), Complex{});
    uint64_t low = (uint64_t{1} << n_) - 1;
    for (size_t k = 0; k < entries_.size(); k++) {
        auto i = static_cast<Eigen::Index>(entries_[k] & low);
        auto j = static_cast<Eigen::Index>(entries_[k] >> n_);
        y[k] = psi_[i] * std::conj(psi_[j]);
    }
    return y;
}

void CompiledLiouvillian::apply(std::span<const Complex> y, std::span<Complex> dy) const {
    const size_t s = entries_.size();
    const Complex *rho = y.data();
    const Complex *sens = y.data() + s;
    Complex *drho = dy.data();
    Complex *dsens = dy.data() + s;
    const double inv_chi = 1.0 / chi_;

    for (size_t k = 0; k < s; k++) {
        Complex hr = cmul(ham_diag_[k], rho[k]);
        drho[k] = hr + cmul(diss_diag_[k], rho[k]);
        dsens[k] = cmul(ham_diag_[k] + diss_diag_[k], sens[k]) + inv_chi * hr;
    }
    for (const auto &g : ham_groups_) {
        for (size_t k = 0; k < s; k++) {
            size_t src;
            Complex c = group_coefficient(g, k, src);
            Complex hr = cmul(c, rho[src]);
            drho[k] += hr;
            dsens[k] += cmul(c, sens[src]) + inv_chi * hr;
        }
    }
    for (const auto &g : diss_groups_) {
        for (size_t k = 0; k < s; k++) {
            size_t src;
            Complex c = group_coefficient(g, k, src);
            drho[k] += cmul(c, rho[src]);
            dsens[k] += cmul(c, sens[src]);
        }
    }
}

Complex CompiledLiouvillian::group_coefficient(const Group &g, size_t k, size_t &src) const {
    if (!g.src.empty()) {
        src = g.src[k];
        return g.coef[k];
    }
    uint64_t e = entries_[k];
    src = static_cast<size_t>(position_[e ^ g.move]);
    Complex c{};
    for (const auto &t : g.terms) {
        c += parity((e ^ t.left_x) & t.z_combined) ? -t.coef : t.coef;
    }
    return c;
}

Probe CompiledLiouvillian::probe(const PauliSum &op, bool sensitivity) const {
    if (op.num_qubits() != n_) {
        throw DimensionMismatch("probe operator has the wrong number of qubits");
    }
    PauliSum framed = conjugate(op, frame_);
    std::map<uint32_t, Complex> acc;
    uint32_t offset = sensitivity ? static_cast<uint32_t>(entries_.size()) : 0;
    uint64_t dim = uint64_t{1} << n_;
    for (const auto &[c, p] : framed.terms()) {
        uint64_t x = p.x_mask();
        for (uint64_t k = 0; k < dim; k++) {
            // tr(P m) = sum_k factor(k ^ x) m(k ^ x, k).
            int32_t pos = position_[(k ^ x) | (k << n_)];
            if (pos >= 0) {
                acc[static_cast<uint32_t>(pos) + offset] += c * p.factor(k ^ x);
            }
        }
    }
    Probe out;
    for (const auto &[idx, w] : acc) {
        if (w != Complex{}) {
            out.index.push_back(idx);
            out.weight.push_back(w);
        }
    }
    return out;
}

Eigen::MatrixXcd CompiledLiouvillian::unpack(std::span<const Complex> half) const {
    auto dim = Eigen::Index{1} << n_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t k = 0; k < entries_.size(); k++) {
        // Entry (i, j) lives at i + j * dim, matching Eigen's column-major storage.
        m.data()[entries_[k]] = half[k];
    }
    return m;
}

Eigen::MatrixXcd CompiledLiouvillian::unpack_rho(std::span<const Complex> y) const {
    return to_lab(unpack(y.subspan(0, entries_.size())), frame_);
}

Eigen::MatrixXcd CompiledLiouvillian::unpack_sensitivity(std::span<const Complex> y) const {
    return to_lab(unpack(y.subspan(entries_.size(), entries_.size())), frame_);
}

Complex CompiledLiouvillian::rho_trace(std::span<const Complex> y) const {
    Complex tr{};
    for (uint32_t k : diag_entries_) {
        tr += y[k];
    }
    return tr;
}

CompiledLiouvillian::Defects CompiledLiouvillian::defects(std::span<const Complex> y) const {
    const size_t s = entries_.size();
    Defects d{};
    Complex sens_tr{};
    for (uint32_t k : diag_entries_) {
        sens_tr += y[s + k];
    }
    d.rho_trace = std::abs(rho_trace(y) - 1.0);
    d.sens_trace = std::abs(sens_tr);
    for (size_t k = 0; k < s; k++) {
        size_t t = transpose_[k];
        d.rho_hermiticity = std::max(d.rho_hermiticity, std::norm(y[k] - std::conj(y[t])));
        d.sens_hermiticity = std::max(d.sens_hermiticity, std::norm(y[s + k] - std::conj(y[s + t])));
        d.sens_scale = std::max(d.sens_scale, std::norm(y[s + k]));
    }
    d.rho_hermiticity = std::sqrt(d.rho_hermiticity);
    d.sens_hermiticity = std::sqrt(d.sens_hermiticity);
    d.sens_scale = std::sqrt(d.sens_scale);
    return d;
}

double CompiledLiouvillian::min_eigenvalue(std::span<const Complex> y) const {
    Eigen::MatrixXcd rho = unpack(y.subspan(0, entries_.size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace qmetro
