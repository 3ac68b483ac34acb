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

#include <cmath>

#include <gtest/gtest.h>

#include "qmetro/model.h"
#include "test_util.h"

namespace qmetro {
namespace {

using testing::kron_matrix;

// |+>^N followed by CZ on neighbours, built from dense gates.
Eigen::VectorXcd dense_cluster(size_t n) {
    size_t dim = size_t{1} << n;
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(dim), 1.0 / std::sqrt(double(dim)));
    for (size_t q = 0; q + 1 < n; q++) {
        PauliString zz = PauliString::single(n, q, Pauli::Z) * PauliString::single(n, q + 1, Pauli::Z);
        Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        Eigen::MatrixXcd zi = kron_matrix(PauliString::single(n, q, Pauli::Z));
        Eigen::MatrixXcd iz = kron_matrix(PauliString::single(n, q + 1, Pauli::Z));
        Eigen::MatrixXcd cz = 0.5 * (id + zi + iz - kron_matrix(zz));
        v = cz * v;
    }
    return v;
}

TEST(ModelTest, ClusterStateMatchesDenseConstruction) {
    for (size_t n = 1; n <= 6; n++) {
        Eigen::VectorXcd a = build_cluster_state(n).amplitudes();
        EXPECT_LT((a - dense_cluster(n)).norm(), 1e-12) << "n=" << n;
    }
}

TEST(ModelTest, StabilizerLettersOnChain) {
    EXPECT_EQ(stabilizer(1, 3), PauliString("XZI"));
    EXPECT_EQ(stabilizer(2, 3), PauliString("ZXZ"));
    EXPECT_EQ(stabilizer(3, 3), PauliString("IZX"));
    EXPECT_EQ(stabilizer(1, 1), PauliString("X"));
    EXPECT_THROW(stabilizer(0, 3), std::out_of_range);
    EXPECT_THROW(stabilizer(4, 3), std::out_of_range);
}

TEST(ModelTest, ProbeStatesAreNormalized) {
    for (auto s : {Scheme::kCluster, Scheme::kRef1Max, Scheme::kRef1Unc, Scheme::kRef2Max, Scheme::kRef2Unc}) {
        for (size_t n = 1; n <= 5; n++) {
            EXPECT_NEAR(build_probe_state(s, n).amplitudes().norm(), 1.0, 1e-12);
        }
    }
}

TEST(ModelTest, GhzProbeHasTwoEqualAmplitudes) {
    Eigen::VectorXcd v = build_probe_state(Scheme::kRef1Max, 3).amplitudes();
    EXPECT_NEAR(std::abs(v[0]), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(std::abs(v[7]), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(v.segment(1, 6).norm(), 0.0, 1e-12);
}

TEST(ModelTest, ClusterProbeSpectrumUnderStabilizerHamiltonian) {
    // (|+_N> + |-_N>)/sqrt2 is an equal mix of the H_II eigenvalues +-N/2.
    for (size_t n = 1; n <= 5; n++) {
        Eigen::MatrixXcd h = kron_matrix(build_hamiltonian(Scheme::kCluster, n, 1.0));
        Eigen::VectorXcd psi = build_probe_state(Scheme::kCluster, n).amplitudes();
        double mean = (psi.adjoint() * h * psi)(0).real();
        double second = (psi.adjoint() * h * h * psi)(0).real();
        EXPECT_NEAR(mean, 0.0, 1e-12);
        EXPECT_NEAR(second, n * n / 4.0, 1e-12);
    }
}

TEST(ModelTest, MeasurementsAreInvolutionsForProductSchemes) {
    for (auto s : {Scheme::kCluster, Scheme::kRef1Max, Scheme::kRef2Max}) {
        ASSERT_TRUE(has_product_measurement(s));
        Eigen::MatrixXcd m = kron_matrix(build_measurement(s, 3));
        EXPECT_LT((m * m - Eigen::MatrixXcd::Identity(8, 8)).norm(), 1e-12);
    }
    EXPECT_FALSE(has_product_measurement(Scheme::kRef1Unc));
}

// Dense Lindblad dissipator from explicit jump matrices.
Eigen::MatrixXcd dense_dissipator(ChannelKind kind, double gamma, size_t n, const Eigen::MatrixXcd &rho) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    auto d = [&](const Eigen::MatrixXcd &l, double rate) {
        out += rate * (l * rho * l.adjoint() - 0.5 * (l.adjoint() * l * rho + rho * l.adjoint() * l));
    };
    for (size_t q = 0; q < n; q++) {
        Eigen::MatrixXcd z = kron_matrix(PauliString::single(n, q, Pauli::Z));
        Eigen::MatrixXcd sp = kron_matrix(sigma_plus(n, q));
        Eigen::MatrixXcd sm = kron_matrix(sigma_minus(n, q));
        switch (kind) {
            case ChannelKind::kDephasing:
                d(z, gamma / 2);
                break;
            case ChannelKind::kDepolarizing:
                d(sm, gamma / 2);
                d(sp, gamma / 2);
                d(z, gamma / 4);
                break;
            case ChannelKind::kDamping:
                d(sp, gamma);
                break;
        }
    }
    return out;
}

TEST(ModelTest, JumpOperatorsMatchDenseDissipator) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(8, 8);
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace();
    for (auto kind : {ChannelKind::kDephasing, ChannelKind::kDepolarizing, ChannelKind::kDamping}) {
        NoiseChannel ch{kind, 0.3};
        Eigen::MatrixXcd got = apply_dissipator(jump_operators(ch, 3), rho);
        EXPECT_LT((got - dense_dissipator(kind, 0.3, 3, rho)).norm(), 1e-12) << to_string(kind);
        EXPECT_LT(std::abs(got.trace()), 1e-12);
    }
}

TEST(ModelTest, DampingRelaxesIntoZeroState) {
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Zero(2, 2);
    one(1, 1) = 1;
    Eigen::MatrixXcd d = apply_dissipator(jump_operators({ChannelKind::kDamping, 1.0}, 1), one);
    EXPECT_NEAR(d(0, 0).real(), 1.0, 1e-12);
    EXPECT_NEAR(d(1, 1).real(), -1.0, 1e-12);
}

TEST(ModelTest, DefaultWindowIsIntegerCeiling) {
    EXPECT_EQ(default_window(2), 100);
    EXPECT_EQ(default_window(3), 67);
    EXPECT_EQ(default_window(7), 29);
}

TEST(ModelTest, NamesRoundTrip) {
    for (auto s : {Scheme::kCluster, Scheme::kRef1Max, Scheme::kRef1Unc, Scheme::kRef2Max, Scheme::kRef2Unc}) {
        EXPECT_EQ(parse_scheme(to_string(s)), s);
    }
    for (auto k : {ChannelKind::kDephasing, ChannelKind::kDepolarizing, ChannelKind::kDamping}) {
        EXPECT_EQ(parse_channel(to_string(k)), k);
    }
    EXPECT_THROW(parse_scheme("ghz"), std::invalid_argument);
}

TEST(ModelTest, ValidateNamesOffendingField) {
    ExperimentConfig c;
    c.channel.gamma = -1;
    try {
        c.validate();
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument &e) {
        EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
    }
    c = ExperimentConfig{};
    c.samples_per_period = 4;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ExperimentConfig{};
    c.n = 11;
    EXPECT_THROW(c.validate(), std::exception);
}

}  // namespace
}  // namespace qmetro
