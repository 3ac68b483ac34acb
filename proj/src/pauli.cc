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

#include "qmetro/pauli.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qmetro/errors.h"

namespace qmetro {

namespace {

constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

uint32_t bit_of(size_t n, size_t qubit) {
    return uint32_t{1} << (n - 1 - qubit);
}

void require_same_length(size_t a, size_t b, const char *what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": length " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

size_t qubits_for_dim(Eigen::Index dim, const char *what) {
    if (dim <= 0 || (dim & (dim - 1)) != 0) {
        throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(dim) + " is not a power of two");
    }
    auto n = static_cast<size_t>(std::countr_zero(static_cast<uint64_t>(dim)));
    if (n > kMaxQubits) {
        throw DimensionMismatch(std::string(what) + ": " + std::to_string(n) + " qubits exceeds the cap of " +
                                std::to_string(kMaxQubits));
    }
    return n;
}

void require_string_fits(const PauliString &p, Eigen::Index dim, const char *what) {
    if ((Eigen::Index{1} << p.size()) != dim) {
        throw DimensionMismatch(std::string(what) + ": string of length " + std::to_string(p.size()) +
                                " applied to dimension " + std::to_string(dim));
    }
}

}  // namespace

PauliString::PauliString(std::string_view text) {
    uint8_t phase = 0;
    if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
        phase = text[0] == '-' ? 2 : 0;
        text.remove_prefix(1);
    }
    if (!text.empty() && text[0] == 'i') {
        phase = (phase + 1) & 3;
        text.remove_prefix(1);
    }
    if (text.size() > kMaxStringLength) {
        throw std::invalid_argument("Pauli string longer than " + std::to_string(kMaxStringLength));
    }
    num_qubits_ = static_cast<uint8_t>(text.size());
    phase_ = phase;
    for (size_t q = 0; q < text.size(); q++) {
        switch (text[q]) {
            case 'I':
            case '_':
                break;
            case 'X':
                set_letter(q, Pauli::X);
                break;
            case 'Y':
                set_letter(q, Pauli::Y);
                break;
            case 'Z':
                set_letter(q, Pauli::Z);
                break;
            default:
                throw std::invalid_argument("not a Pauli letter: '" + std::string(1, text[q]) + "'");
        }
    }
}

PauliString PauliString::identity(size_t n) {
    return from_masks(n, 0, 0, 0);
}

PauliString PauliString::single(size_t n, size_t qubit, Pauli letter) {
    if (qubit >= n) {
        throw std::out_of_range("qubit " + std::to_string(qubit) + " outside a string of length " + std::to_string(n));
    }
    PauliString p = identity(n);
    p.set_letter(qubit, letter);
    return p;
}

PauliString PauliString::from_masks(size_t n, uint32_t x_mask, uint32_t z_mask, uint8_t phase_exponent) {
    if (n > kMaxStringLength) {
        throw std::invalid_argument("Pauli string longer than " + std::to_string(kMaxStringLength));
    }
    uint32_t valid = n == 32 ? ~uint32_t{0} : (uint32_t{1} << n) - 1;
    if ((x_mask & ~valid) || (z_mask & ~valid)) {
        throw std::invalid_argument("mask bits outside the string");
    }
    PauliString p;
    p.num_qubits_ = static_cast<uint8_t>(n);
    p.x_ = x_mask;
    p.z_ = z_mask;
    p.phase_ = phase_exponent & 3;
    return p;
}

Pauli PauliString::letter(size_t qubit) const {
    uint32_t b = bit_of(num_qubits_, qubit);
    bool x = x_ & b;
    bool z = z_ & b;
    if (x && z) {
        return Pauli::Y;
    }
    return x ? Pauli::X : (z ? Pauli::Z : Pauli::I);
}

void PauliString::set_letter(size_t qubit, Pauli letter) {
    if (qubit >= num_qubits_) {
        throw std::out_of_range("qubit outside string");
    }
    uint32_t b = bit_of(num_qubits_, qubit);
    x_ &= ~b;
    z_ &= ~b;
    if (letter == Pauli::X || letter == Pauli::Y) {
        x_ |= b;
    }
    if (letter == Pauli::Z || letter == Pauli::Y) {
        z_ |= b;
    }
}

Complex PauliString::phase() const {
    return kPowersOfI[phase_];
}

PauliString PauliString::with_phase_exponent(uint8_t k) const {
    PauliString p = *this;
    p.phase_ = k & 3;
    return p;
}

bool PauliString::commutes_with(const PauliString &other) const {
    require_same_length(size(), other.size(), "commutes_with");
    return ((std::popcount(x_ & other.z_) + std::popcount(z_ & other.x_)) & 1) == 0;
}

Complex PauliString::factor(uint64_t basis_index) const {
    int k = phase_ + std::popcount(x_ & z_) + 2 * std::popcount(static_cast<uint32_t>(basis_index) & z_);
    return kPowersOfI[k & 3];
}

std::string PauliString::str() const {
    static constexpr char kSigns[4][3] = {"+", "+i", "-", "-i"};
    std::string out = kSigns[phase_];
    for (size_t q = 0; q < num_qubits_; q++) {
        out += "IXYZ"[static_cast<int>(letter(q))];
    }
    return out;
}

PauliString pauli_multiply(const PauliString &a, const PauliString &b) {
    require_same_length(a.size(), b.size(), "pauli_multiply");
    uint32_t x1 = a.x_mask(), z1 = a.z_mask(), x2 = b.x_mask(), z2 = b.z_mask();
    uint32_t x3 = x1 ^ x2, z3 = z1 ^ z2;
    // Moving Z^z1 past X^x2 costs (-1)^|z1 & x2|; re-expressing X^x Z^z as letters costs i^-|x & z|.
    int k = a.phase_exponent() + b.phase_exponent() + std::popcount(x1 & z1) + std::popcount(x2 & z2) +
            2 * std::popcount(z1 & x2) - std::popcount(x3 & z3);
    return PauliString::from_masks(a.size(), x3, z3, static_cast<uint8_t>(((k % 4) + 4) % 4));
}

PauliString operator*(const PauliString &a, const PauliString &b) {
    return pauli_multiply(a, b);
}

void PauliSum::add(Complex coefficient, const PauliString &word) {
    if (terms_.empty() && num_qubits_ == 0) {
        num_qubits_ = word.size();
    }
    require_same_length(num_qubits_, word.size(), "PauliSum::add");
    terms_.emplace_back(coefficient * word.phase(), word.with_phase_exponent(0));
}

void PauliSum::canonicalize() {
    std::map<std::pair<uint32_t, uint32_t>, Complex> merged;
    for (const auto &[c, p] : terms_) {
        merged[{p.x_mask(), p.z_mask()}] += c;
    }
    terms_.clear();
    for (const auto &[masks, c] : merged) {
        if (std::abs(c) >= 1e-15) {
            terms_.emplace_back(c, PauliString::from_masks(num_qubits_, masks.first, masks.second));
        }
    }
}

PauliSum PauliSum::adjoint() const {
    PauliSum out(num_qubits_);
    for (const auto &[c, p] : terms_) {
        out.terms_.emplace_back(std::conj(c), p);
    }
    return out;
}

PauliSum operator*(const PauliSum &a, const PauliSum &b) {
    require_same_length(a.num_qubits(), b.num_qubits(), "PauliSum product");
    PauliSum out(a.num_qubits());
    for (const auto &[ca, pa] : a.terms()) {
        for (const auto &[cb, pb] : b.terms()) {
            out.add(ca * cb, pauli_multiply(pa, pb));
        }
    }
    out.canonicalize();
    return out;
}

ObservableOperator::ObservableOperator(size_t n, std::vector<std::pair<double, PauliString>> terms)
    : num_qubits_(n) {
    for (const auto &[c, p] : terms) {
        add(c, p);
    }
}

void ObservableOperator::add(double coefficient, const PauliString &word) {
    require_same_length(num_qubits_, word.size(), "ObservableOperator::add");
    if (!std::isfinite(coefficient)) {
        throw std::invalid_argument("non-finite coefficient on " + word.str());
    }
    if (!word.is_hermitian()) {
        throw std::invalid_argument("term " + word.str() + " is not Hermitian");
    }
    double sign = word.phase_exponent() == 2 ? -1.0 : 1.0;
    terms_.emplace_back(sign * coefficient, word.with_phase_exponent(0));
    canonicalize();
}

void ObservableOperator::canonicalize() {
    std::map<std::pair<uint32_t, uint32_t>, double> merged;
    std::vector<std::pair<uint32_t, uint32_t>> order;
    for (const auto &[c, p] : terms_) {
        auto key = std::make_pair(p.x_mask(), p.z_mask());
        if (!merged.contains(key)) {
            order.push_back(key);
        }
        merged[key] += c;
    }
    terms_.clear();
    for (const auto &key : order) {
        double c = merged[key];
        if (std::abs(c) >= 1e-15) {
            terms_.emplace_back(c, PauliString::from_masks(num_qubits_, key.first, key.second));
        }
    }
}

PauliSum ObservableOperator::to_pauli_sum() const {
    PauliSum out(num_qubits_);
    for (const auto &[c, p] : terms_) {
        out.add(c, p);
    }
    return out;
}

PauliSum ObservableOperator::squared() const {
    PauliSum s = to_pauli_sum();
    return s * s;
}

std::string ObservableOperator::str() const {
    std::ostringstream out;
    for (size_t k = 0; k < terms_.size(); k++) {
        out << (k ? " + " : "") << terms_[k].first << "*" << terms_[k].second.str().substr(1);
    }
    return out.str();
}

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
    num_qubits_ = qubits_for_dim(amplitudes_.size(), "StateVector");
    double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
        throw std::invalid_argument("state vector norm " + std::to_string(norm) + " is not 1");
    }
}

StateVector StateVector::normalized(Eigen::VectorXcd amplitudes) {
    double norm = amplitudes.norm();
    if (norm == 0.0 || !std::isfinite(norm)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    return StateVector(amplitudes / norm);
}

StateVector StateVector::basis(size_t n, uint64_t index) {
    if (n > kMaxQubits || index >= (uint64_t{1} << n)) {
        throw std::out_of_range("basis index out of range");
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return StateVector(std::move(v));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw DimensionMismatch("density matrix is not square");
    }
    num_qubits_ = qubits_for_dim(entries_.rows(), "DensityMatrix");
    double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTolerance) {
        throw InvariantViolation("density matrix not Hermitian: max |rho - rho^dag| = " + std::to_string(herm));
    }
    Complex tr = entries_.trace();
    if (std::abs(tr - 1.0) > kTraceTolerance) {
        throw InvariantViolation("density matrix trace " + std::to_string(tr.real()) + " is not 1");
    }
}

DensityMatrix DensityMatrix::pure(const StateVector &psi) {
    const auto &a = psi.amplitudes();
    return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(size_t n) {
    auto dim = Eigen::Index{1} << n;
    return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::check_positive() const {
    double lo = min_eigenvalue();
    if (lo < kEigenvalueFloor) {
        throw InvariantViolation("density matrix has eigenvalue " + std::to_string(lo));
    }
}

Eigen::VectorXcd apply_string(const PauliString &p, const Eigen::VectorXcd &v) {
    require_string_fits(p, v.size(), "apply_string");
    Eigen::VectorXcd out(v.size());
    uint64_t x = p.x_mask();
    for (Eigen::Index b = 0; b < v.size(); b++) {
        out[static_cast<Eigen::Index>(b ^ x)] = p.factor(b) * v[b];
    }
    return out;
}

StateVector apply_string(const PauliString &p, const StateVector &v) {
    return StateVector(apply_string(p, v.amplitudes()));
}

Eigen::MatrixXcd apply_left(const PauliString &p, const Eigen::MatrixXcd &m) {
    require_string_fits(p, m.rows(), "apply_left");
    Eigen::MatrixXcd out(m.rows(), m.cols());
    uint64_t x = p.x_mask();
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        auto src = static_cast<Eigen::Index>(r ^ x);
        out.row(r) = p.factor(src) * m.row(src);
    }
    return out;
}

Eigen::MatrixXcd apply_right(const Eigen::MatrixXcd &m, const PauliString &p) {
    require_string_fits(p, m.cols(), "apply_right");
    Eigen::MatrixXcd out(m.rows(), m.cols());
    uint64_t x = p.x_mask();
    for (Eigen::Index c = 0; c < m.cols(); c++) {
        out.col(c) = p.factor(c) * m.col(static_cast<Eigen::Index>(c ^ x));
    }
    return out;
}

Complex trace_product(const PauliString &p, const Eigen::MatrixXcd &m) {
    require_string_fits(p, m.rows(), "trace_product");
    Complex acc = 0;
    uint64_t x = p.x_mask();
    for (Eigen::Index k = 0; k < m.rows(); k++) {
        auto src = static_cast<Eigen::Index>(k ^ x);
        acc += p.factor(src) * m(src, k);
    }
    return acc;
}

Complex trace_product(const PauliSum &op, const Eigen::MatrixXcd &m) {
    Complex acc = 0;
    for (const auto &[c, p] : op.terms()) {
        acc += c * trace_product(p, m);
    }
    return acc;
}

double expectation(const ObservableOperator &o, const Eigen::MatrixXcd &m) {
    double acc = 0;
    for (const auto &[c, p] : o.terms()) {
        acc += c * trace_product(p, m).real();
    }
    return acc;
}

double expectation(const ObservableOperator &o, const DensityMatrix &rho) {
    if ((size_t{1} << o.num_qubits()) != rho.dim()) {
        throw DimensionMismatch("expectation: operator on " + std::to_string(o.num_qubits()) + " qubits, state on " +
                                std::to_string(rho.num_qubits()));
    }
    Complex acc = 0;
    for (const auto &[c, p] : o.terms()) {
        acc += c * trace_product(p, rho.matrix());
    }
    if (std::abs(acc.imag()) >= 1e-9) {
        throw InvariantViolation("tr(O rho) has imaginary part " + std::to_string(acc.imag()));
    }
    return acc.real();
}

double variance(const ObservableOperator &o, const DensityMatrix &rho) {
    double mean = expectation(o, rho);
    double second = trace_product(o.squared(), rho.matrix()).real();
    double v = second - mean * mean;
    if (v < -1e-9) {
        throw InvariantViolation("negative variance " + std::to_string(v));
    }
    return std::max(v, 0.0);
}

}  // namespace qmetro
