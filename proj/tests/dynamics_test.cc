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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "qmetro/dynamics.h"
#include "qmetro/errors.h"
#include "qmetro/integrator.h"
#include "qmetro/liouvillian.h"
#include "test_util.h"

namespace qmetro {
namespace {

using testing::kron_matrix;

constexpr Scheme kSchemes[] = {Scheme::kCluster, Scheme::kRef1Max, Scheme::kRef1Unc, Scheme::kRef2Max,
                               Scheme::kRef2Unc};
constexpr ChannelKind kChannels[] = {ChannelKind::kDephasing, ChannelKind::kDepolarizing, ChannelKind::kDamping};

ExperimentConfig config(Scheme s, size_t n, ChannelKind k, double gamma, double t_max = 3.0) {
    ExperimentConfig c;
    c.scheme = s;
    c.n = n;
    c.channel = {k, gamma};
    c.t_max = t_max;
    return c;
}

TEST(IntegratorTest, ExponentialDecayToTolerance) {
    // y' = (-1 + 2i) y.
    const Complex lambda(-1, 2);
    IntegratorOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-14;
    DormandPrince45 dp(1, [&](std::span<const Complex> y, std::span<Complex> dy) { dy[0] = lambda * y[0]; }, opts);
    std::vector<Complex> y = {1.0};
    double worst_dense = 0;
    dp.integrate(y, 0.0, 3.0, [&](const DenseStep &step, std::span<Complex>) {
        std::vector<Complex> mid(1);
        double t = step.t0() + 0.37 * step.h();
        step.interpolate(t, mid);
        worst_dense = std::max(worst_dense, std::abs(mid[0] - std::exp(lambda * t)));
        return false;
    });
    EXPECT_LT(std::abs(y[0] - std::exp(lambda * 3.0)), 1e-9);
    EXPECT_LT(worst_dense, 1e-8);
    EXPECT_GT(dp.stats().accepted, 0u);
}

TEST(IntegratorTest, OscillatorConservesEnergy) {
    IntegratorOptions opts;
    opts.rtol = 1e-11;
    opts.atol = 1e-14;
    DormandPrince45 dp(
        2,
        [](std::span<const Complex> y, std::span<Complex> dy) {
            dy[0] = y[1];
            dy[1] = -y[0];
        },
        opts);
    std::vector<Complex> y = {1.0, 0.0};
    dp.integrate(y, 0.0, 20.0, [](const DenseStep &, std::span<Complex>) { return false; });
    EXPECT_NEAR(y[0].real(), std::cos(20.0), 1e-8);
    EXPECT_NEAR(y[1].real(), -std::sin(20.0), 1e-8);
}

TEST(IntegratorTest, StiffnessFloorRaises) {
    IntegratorOptions opts;
    opts.min_step = 1e-3;
    DormandPrince45 dp(1, [](std::span<const Complex> y, std::span<Complex> dy) { dy[0] = -1e7 * y[0]; }, opts);
    std::vector<Complex> y = {1.0};
    EXPECT_THROW(dp.integrate(y, 0.0, 1.0, [](const DenseStep &, std::span<Complex>) { return false; }),
                 StiffnessError);
}

TEST(LindbladRhsTest, DenseRhsMatchesCommutatorForm) {
    std::mt19937_64 rng(3);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(8, 8);
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace();
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Random(8, 8);
    s = (s + s.adjoint()).eval();
    ObservableOperator h0 = build_hamiltonian(Scheme::kCluster, 3, 1.0);
    Eigen::MatrixXcd h = kron_matrix(h0);
    const Complex i(0, 1);
    NoiseChannel ch{ChannelKind::kDepolarizing, 0.2};
    auto d = lindblad_rhs(rho, s, h0, 0.7, ch);
    auto jumps = jump_operators(ch, 3);
    Eigen::MatrixXcd want_rho = i * (rho * h - h * rho) * 0.7 + apply_dissipator(jumps, rho);
    Eigen::MatrixXcd want_s = i * (s * h - h * s) * 0.7 + i * (rho * h - h * rho) + apply_dissipator(jumps, s);
    EXPECT_LT((d.drho_dt - want_rho).norm(), 1e-12);
    EXPECT_LT((d.dsens_dt - want_s).norm(), 1e-12);
}

// Random Hermitian state and sensitivity on the compiled support, packed.
std::vector<Complex> random_packed(const CompiledLiouvillian &l, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<Complex> y(l.state_size());
    for (auto &v : y) {
        v = {g(rng), g(rng)};
    }
    return y;
}

TEST(CompiledLiouvillianTest, ApplyMatchesDenseRhsInEveryFrame) {
    std::mt19937_64 rng(5);
    for (auto s : kSchemes) {
        for (auto k : kChannels) {
            for (auto f : kAllFrames) {
                ExperimentConfig c = config(s, 3, k, 0.15);
                c.chi = 0.8;
                CompiledLiouvillian l(c, f);
                std::vector<Complex> y = random_packed(l, rng);
                std::vector<Complex> dy(y.size());
                l.apply(y, dy);
                Eigen::MatrixXcd rho = l.unpack_rho(y);
                Eigen::MatrixXcd sens = l.unpack_sensitivity(y);
                auto want = lindblad_rhs(rho, sens, build_hamiltonian(s, 3, 1.0), 0.8, c.channel);
                // The support is closed under the generator, so unpacking dy loses nothing.
                EXPECT_LT((l.unpack_rho(dy) - want.drho_dt).norm(), 1e-11)
                    << to_string(s) << " " << to_string(k) << " " << to_string(f);
                EXPECT_LT((l.unpack_sensitivity(dy) - want.dsens_dt).norm(), 1e-11)
                    << to_string(s) << " " << to_string(k) << " " << to_string(f);
            }
        }
    }
}

TEST(CompiledLiouvillianTest, InitialStateIsProjector) {
    for (auto s : kSchemes) {
        CompiledLiouvillian l(config(s, 4, ChannelKind::kDamping, 0.1));
        auto y = l.initial_state();
        Eigen::VectorXcd psi = build_probe_state(s, 4).amplitudes();
        EXPECT_LT((l.unpack_rho(y) - psi * psi.adjoint()).norm(), 1e-12) << to_string(s);
        EXPECT_LT(l.unpack_sensitivity(y).norm(), 1e-15);
    }
}

TEST(TrajectoryTest, DenseTrajectoryMatchesStreamedCurve) {
    ExperimentConfig c = config(Scheme::kCluster, 3, ChannelKind::kDephasing, 0.1, 5.0);
    Trajectory traj = integrate(c);
    PrecisionCurve dense = expectation_curve(traj, build_measurement(c.scheme, c.n), c.total_time_T);
    PrecisionRun run(c);
    ASSERT_EQ(dense.size(), run.curve().size());
    for (size_t i = 0; i < dense.size(); i++) {
        EXPECT_NEAR(dense.expM[i], run.curve().expM[i], 1e-8);
        EXPECT_NEAR(dense.dexpM_dchi[i], run.curve().dexpM_dchi[i], 1e-7);
    }
}

TEST(TrajectoryTest, StatesStayPhysical) {
    for (auto k : kChannels) {
        Trajectory traj = integrate(config(Scheme::kRef2Unc, 3, k, 0.3, 4.0));
        for (const auto &st : traj.states) {
            EXPECT_NEAR(st.rho.matrix().trace().real(), 1.0, 1e-9);
            EXPECT_LT((st.rho.matrix() - st.rho.matrix().adjoint()).norm(), 1e-10);
            EXPECT_NEAR(st.drho_dchi.trace().real(), 0.0, 1e-9);
        }
        EXPECT_GT(traj.states.back().rho.min_eigenvalue(), -1e-8);
    }
}

TEST(SampleTimesTest, UniformGridEndingAtTmax) {
    ExperimentConfig c = config(Scheme::kCluster, 4, ChannelKind::kDephasing, 0.0, 10.0);
    auto t = sample_times(c);
    EXPECT_EQ(t.front(), 0.0);
    EXPECT_EQ(t.back(), 10.0);
    double dt = t[1] - t[0];
    EXPECT_LE(dt, c.period() / c.samples_per_period + 1e-12);
    for (size_t i = 1; i < t.size(); i++) {
        EXPECT_NEAR(t[i] - t[i - 1], dt, 1e-12);
    }
}

TEST(MakePointTest, DeviationFromStatistics) {
    PrecisionPoint p = make_point(4.0, 0.6, 1.0, -0.5);
    EXPECT_NEAR(p.deltaM, 0.8, 1e-15);
    EXPECT_NEAR(p.deltachi_sqrtT, 0.8 * 2.0 / 0.5, 1e-15);
    EXPECT_TRUE(p.finite);
    EXPECT_FALSE(make_point(0.0, 1.0, 1.0, 0.0).finite);
    EXPECT_FALSE(make_point(1.0, 1.0, 1.0, 0.0).finite);
    EXPECT_THROW(make_point(1.0, 0.9, 0.5, 1.0), InvariantViolation);
}

TEST(PrecisionRunTest, NoiselessClusterReachesHeisenbergLimit) {
    for (size_t n = 1; n <= 4; n++) {
        ExperimentConfig c = config(Scheme::kCluster, n, ChannelKind::kDephasing, 0.0, 6.0);
        c.rtol = 1e-13;
        c.atol = 1e-18;
        PrecisionRun run(c);
        const auto &cv = run.curve();
        for (size_t i = 0; i < cv.size(); i++) {
            if (cv.finite[i]) {
                EXPECT_NEAR(cv.deltachi_sqrtT[i] * n * std::sqrt(cv.times[i]), 1.0, 1e-7);
            }
        }
    }
}

TEST(PrecisionRunTest, LocalCurveAgreesWithGrid) {
    ExperimentConfig c = config(Scheme::kRef1Max, 3, ChannelKind::kDamping, 0.1, 8.0);
    PrecisionRun run(c);
    const auto &cv = run.curve();
    size_t i = cv.size() / 2;
    LocalCurve local = run.local_curve(cv.times[i - 1], cv.times[i + 1]);
    PrecisionPoint p = local.at(cv.times[i]);
    EXPECT_NEAR(p.expM, cv.expM[i], 1e-8);
    EXPECT_NEAR(p.dexpM_dchi, cv.dexpM_dchi[i], 1e-7);
}

TEST(PrecisionRunTest, SupportIsSmallForStabilizerSchemes) {
    PrecisionRun run(config(Scheme::kCluster, 6, ChannelKind::kDephasing, 0.05, 1.0));
    EXPECT_LT(run.diagnostics().support_size, size_t{1} << 12);
}

}  // namespace
}  // namespace qmetro
