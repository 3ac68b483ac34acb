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
#include <limits>

#include <gtest/gtest.h>

#include "qmetro/errors.h"
#include "qmetro/metrology.h"
#include "qmetro/validation.h"

namespace qmetro {
namespace {

PrecisionCurve curve_from(std::vector<double> t, std::vector<double> d) {
    PrecisionCurve c;
    for (size_t i = 0; i < t.size(); i++) {
        PrecisionPoint p;
        p.t = t[i];
        p.deltachi_sqrtT = d[i];
        p.finite = std::isfinite(d[i]);
        c.push_back(p);
    }
    return c;
}

TEST(MinDeviationTest, TiesGoToEarlierSample) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    PrecisionCurve c = curve_from({0, 1, 2, 3, 4}, {nan, 0.5, 0.3, 0.3, 0.7});
    DeviationMinimum m = min_deviation(c, 10.0);
    EXPECT_EQ(m.t_star, 2.0);
    EXPECT_EQ(m.value, 0.3);
}

TEST(MinDeviationTest, WindowIsRespected) {
    PrecisionCurve c = curve_from({0.5, 1, 2, 3}, {0.9, 0.8, 0.7, 0.1});
    EXPECT_EQ(min_deviation(c, 2.0).t_star, 2.0);
}

TEST(MinDeviationTest, ThrowsWithoutFiniteSamples) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(min_deviation(curve_from({0, 1}, {nan, nan}), 1.0), NoFiniteSamples);
}

TEST(MinDeviationTest, RefinedMinimumIsNoWorseThanGrid) {
    ExperimentConfig c = make_config(Scheme::kRef1Max, 3, ChannelKind::kDephasing, 0.05, default_window(3));
    PrecisionRun run(c);
    DeviationMinimum grid = min_deviation(run.curve(), c.t_max);
    DeviationMinimum fine = min_deviation(run, c.t_max);
    EXPECT_LE(fine.value, grid.value);
    EXPECT_NEAR(fine.t_star, grid.t_star, 2 * c.period() / c.samples_per_period);
}

TEST(LogGridTest, EndpointsAndDensity) {
    auto g = log_grid(0.01, 1.0, 10);
    ASSERT_EQ(g.size(), 21u);
    EXPECT_NEAR(g.front(), 0.01, 1e-15);
    EXPECT_NEAR(g.back(), 1.0, 1e-15);
    EXPECT_NEAR(g[10], 0.1, 1e-14);
}

TEST(ImprovementTest, TwoQubitDephasingNearSmallRateLimit) {
    ImprovementResult r = improvement(0.03, 2, ChannelKind::kDephasing, Scheme::kRef1Max, default_window(2));
    EXPECT_NEAR(r.epsilon, epsilon_series(0.03), 0.02);
    EXPECT_TRUE(std::isfinite(r.epsilon_envelope));
    ImprovementResult r2 = improvement(0.03, 2, ChannelKind::kDephasing, Scheme::kRef2Unc, default_window(2));
    EXPECT_TRUE(std::isnan(r2.epsilon_envelope));
}

TEST(SweepTest, OrderedAndThreadInvariant) {
    auto g = log_grid(0.05, 0.2, 4);
    SweepOptions one;
    one.threads = 1;
    SweepOptions three;
    three.threads = 3;
    auto a = gamma_sweep(g, {3, 2}, ChannelKind::kDephasing, Scheme::kRef1Unc, one);
    auto b = gamma_sweep(g, {3, 2}, ChannelKind::kDephasing, Scheme::kRef1Unc, three);
    ASSERT_EQ(a.size(), g.size() * 2);
    ASSERT_EQ(a.size(), b.size());
    for (size_t i = 0; i < a.size(); i++) {
        EXPECT_EQ(a[i].gamma, b[i].gamma);
        EXPECT_EQ(a[i].n, b[i].n);
        EXPECT_EQ(a[i].epsilon, b[i].epsilon);
        EXPECT_EQ(a[i].t_min_found, b[i].t_min_found);
        EXPECT_TRUE(a[i].error.empty());
        if (i > 0) {
            EXPECT_TRUE(a[i - 1].gamma < a[i].gamma || (a[i - 1].gamma == a[i].gamma && a[i - 1].n < a[i].n));
        }
    }
}

TEST(SweepTest, FailuresAreRecordedPerRow) {
    SweepOptions opts;
    opts.samples_per_period = 4;  // rejected by config validation
    auto rows = gamma_sweep({0.1}, {2}, ChannelKind::kDephasing, Scheme::kRef1Max, opts);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].error.empty());
}

TEST(EstimatorTest, DeterministicForSeed) {
    auto a = simulate_estimator(0.3, 4, 1.0, 0.2, 1000, 42, 5);
    auto b = simulate_estimator(0.3, 4, 1.0, 0.2, 1000, 42, 5);
    EXPECT_EQ(a.samples, b.samples);
    auto c = simulate_estimator(0.3, 4, 1.0, 0.2, 1000, 43, 5);
    EXPECT_NE(a.samples, c.samples);
}

TEST(EstimatorTest, SingleRunHasUndefinedSpread) {
    auto r = simulate_estimator(0.3, 4, 1.0, 0.2, 1, 7, 1);
    EXPECT_EQ(r.samples.size(), 1u);
    EXPECT_TRUE(std::isnan(r.spread));
}

TEST(EstimatorTest, UnwrapsBranchBeyondFirstLobe) {
    // N chi t = 4 lies on the second branch of arccos.
    const size_t n = 4;
    const double t = 1.0;
    auto r = simulate_estimator(std::cos(n * 1.0 * t), n, 1.0, t, 10'000'000, 3, 1);
    EXPECT_NEAR(r.mean, 1.0, 1e-2);
}

TEST(EstimatorTest, RejectsSumMeasurement) {
    ExperimentConfig c = make_config(Scheme::kRef1Unc, 2, ChannelKind::kDephasing, 0.0, 1.0);
    EXPECT_THROW(simulate_estimator(c, 100, 1, 1), std::invalid_argument);
}

TEST(ScalingTableTest, ClusterDominatesLonger) {
    std::vector<size_t> ns;
    for (size_t n = 1; n <= 20; n++) {
        ns.push_back(n);
    }
    ScalingTable t = scaling_table(ns, 0.05);
    EXPECT_GT(t.largest_dominated_n[0], t.largest_dominated_n[1]);
    EXPECT_EQ(t.rows.size(), ns.size());
}

TEST(ValidationTest, StabilizerAndExpmChecksPass) {
    EXPECT_TRUE(check_stabilizers(6).passed);
    EXPECT_TRUE(check_expm_closed_form().passed);
}

TEST(ValidationTest, FiniteDifferenceAgreesForSmallSystems) {
    ExperimentConfig c = make_config(Scheme::kRef2Max, 2, ChannelKind::kDamping, 0.2, 4.0);
    c.rtol = 1e-12;
    c.atol = 1e-15;
    FiniteDifferenceReport rep = finite_difference_error(c);
    EXPECT_GT(rep.compared, 10u);
    EXPECT_LT(rep.max_rel_error, 1e-4);
}

}  // namespace
}  // namespace qmetro
