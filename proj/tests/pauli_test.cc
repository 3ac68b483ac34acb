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

#include <random>

#include <gtest/gtest.h>

#include "qmetro/errors.h"
#include "qmetro/pauli.h"
#include "test_util.h"

namespace qmetro {
namespace {

using testing::kron_matrix;

PauliString random_string(std::mt19937_64 &rng, size_t n) {
    std::uniform_int_distribution<int> letter(0, 3);
    std::uniform_int_distribution<int> phase(0, 3);
    PauliString p = PauliString::identity(n);
    for (size_t q = 0; q < n; q++) {
        p.set_letter(q, static_cast<Pauli>(letter(rng)));
    }
    return p.with_phase_exponent(static_cast<uint8_t>(phase(rng)));
}

TEST(PauliStringTest, SingleSiteProductsFollowCyclicRule) {
    EXPECT_EQ(PauliString("X") * PauliString("Y"), PauliString("iZ"));
    EXPECT_EQ(PauliString("Y") * PauliString("Z"), PauliString("iX"));
    EXPECT_EQ(PauliString("Z") * PauliString("X"), PauliString("iY"));
    EXPECT_EQ(PauliString("Y") * PauliString("X"), PauliString("-iZ"));
    EXPECT_EQ(PauliString("X") * PauliString("X"), PauliString("I"));
}

TEST(PauliStringTest, ParsesAndPrintsRoundTrip) {
    for (const char *text : {"XYZI", "-ZZ", "iXY", "-iI"}) {
        PauliString p(text);
        EXPECT_EQ(PauliString(p.str()), p) << text;
    }
}

TEST(PauliStringTest, RejectsBadText) {
    EXPECT_THROW(PauliString("XQ"), std::invalid_argument);
}

TEST(PauliStringTest, ProductMatchesKroneckerMatrices) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; trial++) {
        size_t n = 1 + trial % 4;
        PauliString a = random_string(rng, n);
        PauliString b = random_string(rng, n);
        EXPECT_LT((kron_matrix(a * b) - kron_matrix(a) * kron_matrix(b)).norm(), 1e-12);
    }
}

TEST(PauliStringTest, CommutationMatchesMatrices) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; trial++) {
        PauliString a = random_string(rng, 3);
        PauliString b = random_string(rng, 3);
        Eigen::MatrixXcd ma = kron_matrix(a);
        Eigen::MatrixXcd mb = kron_matrix(b);
        bool commute = (ma * mb - mb * ma).norm() < 1e-12;
        EXPECT_EQ(a.commutes_with(b), commute);
    }
}

TEST(PauliStringTest, ApplyStringMatchesKronecker) {
    std::mt19937_64 rng(13);
    for (size_t n = 1; n <= 5; n++) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Random(static_cast<Eigen::Index>(size_t{1} << n));
        for (int trial = 0; trial < 20; trial++) {
            PauliString p = random_string(rng, n);
            EXPECT_LT((apply_string(p, v) - kron_matrix(p) * v).norm(), 1e-12);
        }
    }
}

TEST(PauliStringTest, LeftRightAndTraceProducts) {
    std::mt19937_64 rng(14);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(8, 8);
    for (int trial = 0; trial < 30; trial++) {
        PauliString p = random_string(rng, 3);
        Eigen::MatrixXcd pm = kron_matrix(p);
        EXPECT_LT((apply_left(p, m) - pm * m).norm(), 1e-12);
        EXPECT_LT((apply_right(m, p) - m * pm).norm(), 1e-12);
        EXPECT_LT(std::abs(trace_product(p, m) - (pm * m).trace()), 1e-12);
    }
}

TEST(PauliStringTest, MismatchedSizesThrow) {
    EXPECT_THROW(PauliString("XX") * PauliString("X"), DimensionMismatch);
}

TEST(StateVectorTest, NormalizedHasUnitNorm) {
    StateVector s = StateVector::normalized(Eigen::VectorXcd::Ones(4));
    EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-12);
}

TEST(DensityMatrixTest, PureStateStatistics) {
    StateVector plus = StateVector::normalized(Eigen::VectorXcd::Ones(2));
    DensityMatrix rho = DensityMatrix::pure(plus);
    ObservableOperator x(1);
    x.add(1.0, PauliString("X"));
    ObservableOperator z(1);
    z.add(1.0, PauliString("Z"));
    EXPECT_NEAR(expectation(x, rho), 1.0, 1e-12);
    EXPECT_NEAR(variance(x, rho), 0.0, 1e-12);
    EXPECT_NEAR(variance(z, rho), 1.0, 1e-12);
}

TEST(DensityMatrixTest, MaximallyMixedHasFlatSpectrum) {
    DensityMatrix rho = DensityMatrix::maximally_mixed(3);
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(rho.min_eigenvalue(), 0.125, 1e-12);
}

}  // namespace
}  // namespace qmetro
