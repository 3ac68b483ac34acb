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

#ifndef QMETRO_PAULI_H
#define QMETRO_PAULI_H

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qmetro {

using Complex = std::complex<double>;

/// Largest register a dense state or density matrix may describe.
inline constexpr size_t kMaxQubits = 10;
/// Pauli strings themselves are bit-packed and may be longer than a state.
inline constexpr size_t kMaxStringLength = 32;

enum class Pauli : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// A word over {I, X, Y, Z} with an overall phase i^k, k in {0, 1, 2, 3}.
///
/// Qubit 0 is the leftmost letter and the most significant bit of a
/// computational-basis index. Each letter is stored as an (x, z) bit pair with
/// Y = i X Z, so a string with masks (x, z) and phase exponent k acts as
///
///     P |b> = i^(k + |x & z|) (-1)^|b & z| |b ^ x>.
class PauliString {
   public:
    PauliString() = default;

    /// Parses an optional sign prefix ("+", "-", "i", "+i", "-i") followed by letters.
    explicit PauliString(std::string_view text);

    static PauliString identity(size_t n);
    static PauliString single(size_t n, size_t qubit, Pauli letter);
    static PauliString from_masks(size_t n, uint32_t x_mask, uint32_t z_mask, uint8_t phase_exponent = 0);

    size_t size() const {
        return num_qubits_;
    }
    Pauli letter(size_t qubit) const;
    void set_letter(size_t qubit, Pauli letter);

    uint32_t x_mask() const {
        return x_;
    }
    uint32_t z_mask() const {
        return z_;
    }
    /// k such that the overall phase is i^k.
    uint8_t phase_exponent() const {
        return phase_;
    }
    Complex phase() const;
    PauliString with_phase_exponent(uint8_t k) const;

    bool is_diagonal() const {
        return x_ == 0;
    }
    /// True when the overall phase is +1 or -1.
    bool is_hermitian() const {
        return (phase_ & 1) == 0;
    }
    bool commutes_with(const PauliString &other) const;

    /// Phase picked up by |b> when the string is applied: P|b> = factor(b) |b ^ x>.
    Complex factor(uint64_t basis_index) const;

    std::string str() const;

    bool operator==(const PauliString &other) const = default;

   private:
    uint8_t num_qubits_ = 0;
    uint8_t phase_ = 0;
    uint32_t x_ = 0;
    uint32_t z_ = 0;
};

/// Product a * b with the accumulated phase.
PauliString pauli_multiply(const PauliString &a, const PauliString &b);
PauliString operator*(const PauliString &a, const PauliString &b);

/// Complex-weighted sum of phase-free Pauli words.
///
/// Used for operators that are not Hermitian term by term, such as jump
/// operators built from sigma_+ and sigma_-, or products of observables.
class PauliSum {
   public:
    PauliSum() = default;
    explicit PauliSum(size_t n) : num_qubits_(n) {
    }

    void add(Complex coefficient, const PauliString &word);
    /// Merges duplicate words and drops coefficients below 1e-15 in magnitude.
    void canonicalize();

    size_t num_qubits() const {
        return num_qubits_;
    }
    const std::vector<std::pair<Complex, PauliString>> &terms() const {
        return terms_;
    }
    PauliSum adjoint() const;

    friend PauliSum operator*(const PauliSum &a, const PauliSum &b);

   private:
    size_t num_qubits_ = 0;
    std::vector<std::pair<Complex, PauliString>> terms_;
};

/// Real-weighted sum of Hermitian Pauli words, kept canonical.
class ObservableOperator {
   public:
    ObservableOperator() = default;
    explicit ObservableOperator(size_t n) : num_qubits_(n) {
    }
    ObservableOperator(size_t n, std::vector<std::pair<double, PauliString>> terms);

    /// Adds coefficient * word. A word with phase -1 folds the sign into the
    /// coefficient; a word with phase +-i is rejected as non-Hermitian.
    void add(double coefficient, const PauliString &word);

    size_t num_qubits() const {
        return num_qubits_;
    }
    const std::vector<std::pair<double, PauliString>> &terms() const {
        return terms_;
    }
    PauliSum to_pauli_sum() const;
    /// O * O expanded through pauli_multiply.
    PauliSum squared() const;

    std::string str() const;

   private:
    void canonicalize();

    size_t num_qubits_ = 0;
    std::vector<std::pair<double, PauliString>> terms_;
};

class StateVector {
   public:
    StateVector() = default;
    /// Validates that the length is a power of two and the norm is 1 within 1e-12.
    explicit StateVector(Eigen::VectorXcd amplitudes);
    /// Normalizes first; rejects the zero vector.
    static StateVector normalized(Eigen::VectorXcd amplitudes);
    static StateVector basis(size_t n, uint64_t index);

    size_t num_qubits() const {
        return num_qubits_;
    }
    size_t dim() const {
        return static_cast<size_t>(amplitudes_.size());
    }
    const Eigen::VectorXcd &amplitudes() const {
        return amplitudes_;
    }
    Complex operator[](size_t i) const {
        return amplitudes_[static_cast<Eigen::Index>(i)];
    }

   private:
    size_t num_qubits_ = 0;
    Eigen::VectorXcd amplitudes_;
};

class DensityMatrix {
   public:
    static constexpr double kHermitianTolerance = 1e-10;
    static constexpr double kTraceTolerance = 1e-10;
    static constexpr double kEigenvalueFloor = -1e-8;

    DensityMatrix() = default;
    /// Checks shape, Hermiticity and unit trace. Positivity is checked on
    /// demand by check_positive() since it costs an eigendecomposition.
    explicit DensityMatrix(Eigen::MatrixXcd entries);
    static DensityMatrix pure(const StateVector &psi);
    static DensityMatrix maximally_mixed(size_t n);

    size_t num_qubits() const {
        return num_qubits_;
    }
    size_t dim() const {
        return static_cast<size_t>(entries_.rows());
    }
    const Eigen::MatrixXcd &matrix() const {
        return entries_;
    }
    double min_eigenvalue() const;
    /// Throws InvariantViolation when an eigenvalue is below kEigenvalueFloor.
    void check_positive() const;

   private:
    size_t num_qubits_ = 0;
    Eigen::MatrixXcd entries_;
};

/// p * v in O(2^N) without materializing p.
StateVector apply_string(const PauliString &p, const StateVector &v);
Eigen::VectorXcd apply_string(const PauliString &p, const Eigen::VectorXcd &v);

/// Left and right actions on a square matrix: p * m and m * p.
Eigen::MatrixXcd apply_left(const PauliString &p, const Eigen::MatrixXcd &m);
Eigen::MatrixXcd apply_right(const Eigen::MatrixXcd &m, const PauliString &p);

/// tr(p * m) in O(2^N).
Complex trace_product(const PauliString &p, const Eigen::MatrixXcd &m);
Complex trace_product(const PauliSum &op, const Eigen::MatrixXcd &m);

/// Re tr(O rho). Throws InvariantViolation if |Im tr(O rho)| >= 1e-9.
double expectation(const ObservableOperator &o, const DensityMatrix &rho);
/// Unchecked real part of tr(O m) for matrices that are not states (e.g. d rho / d chi).
double expectation(const ObservableOperator &o, const Eigen::MatrixXcd &m);
/// <O^2> - <O>^2, clamped at zero from below.
double variance(const ObservableOperator &o, const DensityMatrix &rho);

}  // namespace qmetro

#endif
