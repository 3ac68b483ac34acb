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

#ifndef QMETRO_TESTS_TEST_UTIL_H
#define QMETRO_TESTS_TEST_UTIL_H

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qmetro/pauli.h"

namespace qmetro::testing {

inline Eigen::Matrix2cd letter_matrix(Pauli p) {
    const Complex i(0, 1);
    Eigen::Matrix2cd m;
    switch (p) {
        case Pauli::I:
            m << 1, 0, 0, 1;
            break;
        case Pauli::X:
            m << 0, 1, 1, 0;
            break;
        case Pauli::Y:
            m << 0, -i, i, 0;
            break;
        case Pauli::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

/// Dense matrix of a Pauli string by explicit Kronecker products, qubit 0 leftmost.
inline Eigen::MatrixXcd kron_matrix(const PauliString &p) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (size_t q = 0; q < p.size(); q++) {
        Eigen::MatrixXcd next = Eigen::kroneckerProduct(m, letter_matrix(p.letter(q))).eval();
        m = next;
    }
    return p.phase() * m;
}

inline Eigen::MatrixXcd kron_matrix(const PauliSum &s) {
    size_t dim = size_t{1} << s.num_qubits();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto &[c, w] : s.terms()) {
        m += c * kron_matrix(w);
    }
    return m;
}

inline Eigen::MatrixXcd kron_matrix(const ObservableOperator &o) {
    return kron_matrix(o.to_pauli_sum());
}

}  // namespace qmetro::testing

#endif
