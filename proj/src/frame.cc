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

#include "qmetro/frame.h"

#include <bit>
#include <cmath>
#include <numbers>

namespace qmetro {

namespace {

bool uses_cz(CliffordFrame f) {
    return f == CliffordFrame::kCzChain || f == CliffordFrame::kHadamardCzChain;
}

bool uses_hadamard(CliffordFrame f) {
    return f == CliffordFrame::kHadamard || f == CliffordFrame::kHadamardCzChain;
}

// Words are handled as i^k X^x Z^z (all X factors to the left), which makes
// the gate rules pure bit manipulation.
struct XzForm {
    uint32_t x;
    uint32_t z;
    int k;
};

XzForm to_xz(const PauliString &p) {
    return {p.x_mask(), p.z_mask(), p.phase_exponent() + std::popcount(p.x_mask() & p.z_mask())};
}

PauliString from_xz(size_t n, XzForm f) {
    int k = f.k - std::popcount(f.x & f.z);
    return PauliString::from_masks(n, f.x, f.z, static_cast<uint8_t>(((k % 4) + 4) % 4));
}

void cz_chain(XzForm &f, size_t n) {
    // CZ(a, b): X_a -> X_a Z_b, X_b -> Z_a X_b, with a (-1)^(x_a x_b) reordering sign.
    for (size_t q = 0; q + 1 < n; q++) {
        uint32_t a = uint32_t{1} << (n - 1 - q);
        uint32_t b = a >> 1;
        bool xa = f.x & a;
        bool xb = f.x & b;
        if (xb) {
            f.z ^= a;
        }
        if (xa) {
            f.z ^= b;
        }
        if (xa && xb) {
            f.k += 2;
        }
    }
}

void hadamard_all(XzForm &f) {
    // H X^a Z^b H = (-1)^(ab) X^b Z^a on every qubit.
    f.k += 2 * std::popcount(f.x & f.z);
    std::swap(f.x, f.z);
}

std::vector<double> cz_signs(size_t dim) {
    std::vector<double> s(dim);
    for (size_t b = 0; b < dim; b++) {
        s[b] = (std::popcount(b & (b >> 1)) & 1) ? -1.0 : 1.0;
    }
    return s;
}

// In-place Walsh-Hadamard transform along the rows of each column.
void hadamard_columns(Eigen::MatrixXcd &m) {
    const double r = std::numbers::sqrt2 / 2;
    auto dim = m.rows();
    for (Eigen::Index len = 1; len < dim; len <<= 1) {
        for (Eigen::Index base = 0; base < dim; base += 2 * len) {
            for (Eigen::Index off = 0; off < len; off++) {
                Eigen::Index a = base + off;
                Eigen::Index b = a + len;
                for (Eigen::Index c = 0; c < m.cols(); c++) {
                    Complex u = m(a, c);
                    Complex v = m(b, c);
                    m(a, c) = r * (u + v);
                    m(b, c) = r * (u - v);
                }
            }
        }
    }
}

}  // namespace

std::string_view to_string(CliffordFrame f) {
    switch (f) {
        case CliffordFrame::kComputational:
            return "computational";
        case CliffordFrame::kHadamard:
            return "hadamard";
        case CliffordFrame::kCzChain:
            return "cz-chain";
        case CliffordFrame::kHadamardCzChain:
            return "hadamard-cz-chain";
    }
    return "?";
}

PauliString conjugate(const PauliString &p, CliffordFrame f) {
    XzForm form = to_xz(p);
    if (uses_cz(f)) {
        cz_chain(form, p.size());
    }
    if (uses_hadamard(f)) {
        hadamard_all(form);
    }
    return from_xz(p.size(), form);
}

PauliSum conjugate(const PauliSum &op, CliffordFrame f) {
    PauliSum out(op.num_qubits());
    for (const auto &[c, p] : op.terms()) {
        out.add(c, conjugate(p, f));
    }
    out.canonicalize();
    return out;
}

Eigen::VectorXcd to_frame(const Eigen::VectorXcd &psi, CliffordFrame f) {
    Eigen::MatrixXcd v = psi;
    if (uses_cz(f)) {
        auto s = cz_signs(static_cast<size_t>(v.rows()));
        for (Eigen::Index b = 0; b < v.rows(); b++) {
            v(b, 0) *= s[static_cast<size_t>(b)];
        }
    }
    if (uses_hadamard(f)) {
        hadamard_columns(v);
    }
    return v.col(0);
}

Eigen::MatrixXcd to_lab(const Eigen::MatrixXcd &m, CliffordFrame f) {
    // U^dag = CZ H (both factors are self-inverse), applied on both sides.
    Eigen::MatrixXcd out = m;
    if (uses_hadamard(f)) {
        hadamard_columns(out);
        out.transposeInPlace();
        hadamard_columns(out);
        out.transposeInPlace();
    }
    if (uses_cz(f)) {
        auto s = cz_signs(static_cast<size_t>(out.rows()));
        for (Eigen::Index c = 0; c < out.cols(); c++) {
            for (Eigen::Index r = 0; r < out.rows(); r++) {
                out(r, c) *= s[static_cast<size_t>(r)] * s[static_cast<size_t>(c)];
            }
        }
    }
    return out;
}

}  // namespace qmetro
