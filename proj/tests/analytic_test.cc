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
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "qmetro/analytic.h"
#include "qmetro/errors.h"
#include "qmetro/metrology.h"
#include "qmetro/validation.h"

namespace qmetro {
namespace {

// Plain scan plus golden-section polish of a unimodal function on [lo, hi].
double numeric_argmin(const std::function<double(double)> &f, double lo, double hi) {
    const int grid = 2000;
    int best = 0;
    for (int k = 1; k <= grid; k++) {
        if (f(lo + (hi - lo) * k / grid) < f(lo + (hi - lo) * best / grid)) {
            best = k;
        }
    }
    double a = lo + (hi - lo) * std::max(best - 1, 0) / grid;
    double b = lo + (hi - lo) * std::min(best + 1, grid) / grid;
    const double r = std::numbers::phi - 1;
    while (b - a > 1e-10) {
        double c = b - r * (b - a);
        double d = a + r * (b - a);
        if (f(c) < f(d)) {
            b = d;
        } else {
            a = c;
        }
    }
    return 0.5 * (a + b);
}

TEST(GeneratorTest, CoefficientOrderingIsRowMajor) {
    EXPECT_EQ(coefficient_index(0, 1), 0);
    EXPECT_EQ(coefficient_index(0, 3), 2);
    EXPECT_EQ(coefficient_index(1, 0), 3);
    EXPECT_EQ(coefficient_index(3, 3), 14);
}

TEST(GeneratorTest, DerivedGeneratorIsReal) {
    SymbolicGenerator d = derived_generator();
    EXPECT_EQ(d.chi_im.cwiseAbs().sum(), 0);
    EXPECT_GT(d.chi_re.cwiseAbs().sum(), 0);
    EXPECT_GT(d.gamma.cwiseAbs().sum(), 0);
}

TEST(GeneratorTest, PrintedAndDerivedDifferOnlyAtImaginaryErrata) {
    auto mismatches = compare_generators(printed_generator(), derived_generator());
    std::set<std::pair<int, int>> found;
    for (const auto &m : mismatches) {
        found.insert({m.row, m.col});
    }
    std::set<std::pair<int, int>> expected(known_generator_errata().begin(), known_generator_errata().end());
    EXPECT_EQ(found, expected);
    SymbolicGenerator p = printed_generator();
    SymbolicGenerator d = derived_generator();
    EXPECT_EQ(p.chi_re, d.chi_re);
    EXPECT_EQ(p.gamma, d.gamma);
}

TEST(GeneratorTest, PerturbedEntryFailsRederivationCheck) {
    SymbolicGenerator p = printed_generator();
    EXPECT_TRUE(check_generator(p, derived_generator()).passed);
    p.gamma(2, 4) += 1;
    CheckResult r = check_generator(p, derived_generator());
    EXPECT_FALSE(r.passed);
    EXPECT_NE(r.detail.find("1 unexpected"), std::string::npos);
}

TEST(GeneratorTest, DerivedGeneratorMatchesNumericProjection) {
    GeneratorMatrix a = derive_matrix_a(0.7, 0.2);
    GeneratorMatrix b = derived_generator().evaluate(0.7, 0.2);
    EXPECT_LT((a - b).norm(), 1e-14);
}

TEST(ClosedFormTest, ExpectationStartsAtOneWithZeroSlope) {
    EXPECT_NEAR(closed_form_expectation_n2(1.0, 0.1, 0.0), 1.0, 1e-15);
    double h = 1e-6;
    double slope = (closed_form_expectation_n2(1.0, 0.1, h) - closed_form_expectation_n2(1.0, 0.1, -h)) / (2 * h);
    EXPECT_NEAR(slope, 0.0, 1e-8);
}

TEST(ClosedFormTest, ExpectationSolvesDampedOscillator) {
    // y'' + 2 g y' + 4 chi^2 y = 0.
    const double chi = 0.9, g = 0.3, h = 1e-4;
    for (double t : {0.5, 2.0, 7.3}) {
        auto y = [&](double s) { return closed_form_expectation_n2(chi, g, s); };
        double d1 = (y(t + h) - y(t - h)) / (2 * h);
        double d2 = (y(t + h) - 2 * y(t) + y(t - h)) / (h * h);
        EXPECT_NEAR(d2 + 2 * g * d1 + 4 * chi * chi * y(t), 0.0, 1e-5);
    }
}

TEST(ClosedFormTest, OmegaDomain) {
    EXPECT_NEAR(omega(1.0, 0.0), 2.0, 1e-15);
    EXPECT_THROW(omega(1.0, 2.0), OmegaDomainError);
    EXPECT_THROW(omega(1.0, -0.1), OmegaDomainError);
}

TEST(ClosedFormTest, ExpmFollowsClosedForm) {
    for (double t : {0.0, 1.0, 12.5, 40.0}) {
        EXPECT_NEAR(evolve_expm(1.0, 0.05, t).expM, closed_form_expectation_n2(1.0, 0.05, t), 1e-12);
    }
    EXPECT_LT((evolve_expm(1.0, 0.05, 0.0).c - initial_coefficients()).norm(), 1e-15);
}

TEST(ClosedFormTest, DeviationFromExpectationStatistics) {
    // Two-outcome measurement: Delta M = sqrt(1 - <M>^2), derivative in chi by central difference.
    const double g = 0.05, h = 1e-6;
    for (double t : {0.9, 3.3, 11.0}) {
        double m = closed_form_expectation_n2(1.0, g, t);
        double dm = (closed_form_expectation_n2(1.0 + h, g, t) - closed_form_expectation_n2(1.0 - h, g, t)) / (2 * h);
        double want = std::sqrt(1 - m * m) * std::sqrt(t) / std::abs(dm);
        EXPECT_NEAR(closed_form_deviation(2, 1.0, g, t, 1.0), want, 1e-6 * want);
    }
}

TEST(ClosedFormTest, SingleQubitDeviationMatchesIntegration) {
    ExperimentConfig c = make_config(Scheme::kCluster, 1, ChannelKind::kDephasing, 0.1, 10.0);
    c.rtol = 1e-12;
    c.atol = 1e-15;
    PrecisionRun run(c);
    const auto &cv = run.curve();
    for (size_t i = 1; i < cv.size(); i += 7) {
        double d = closed_form_deviation(1, 1.0, 0.1, cv.times[i], 1.0);
        if (cv.finite[i] && std::isfinite(d) && d < 100) {
            EXPECT_NEAR(cv.deltachi_sqrtT[i], d, 1e-6 * d) << "t=" << cv.times[i];
        }
    }
}

TEST(EnvelopeTest, ClosedFormMinimaMatchNumericMinimization) {
    struct Case {
        EnvelopeFamily f;
        size_t n;
        ChannelKind k;
    };
    for (Case c : {Case{EnvelopeFamily::kRefMax, 3, ChannelKind::kDephasing},
                   Case{EnvelopeFamily::kRefUnc, 4, ChannelKind::kDephasing},
                   Case{EnvelopeFamily::kRefMax, 5, ChannelKind::kDamping},
                   Case{EnvelopeFamily::kRefUnc, 2, ChannelKind::kDamping},
                   Case{EnvelopeFamily::kClusterApprox, 6, ChannelKind::kDephasing}}) {
        const double g = 0.05;
        auto f = [&](double t) { return envelope(c.f, c.n, 1.0, g, t, 1.0, false, c.k); };
        EnvelopeMinimum m = minima_and_times(c.f, c.n, 1.0, g, 1.0, c.k);
        double t_num = numeric_argmin(f, 1e-3, 60.0);
        EXPECT_NEAR(m.t_min, t_num, 1e-5 * t_num) << to_string(c.f) << " n=" << c.n;
        EXPECT_NEAR(m.deviation_min, f(t_num), 1e-10) << to_string(c.f);
        EXPECT_TRUE(m.bounded);
    }
}

TEST(EnvelopeTest, ExactTwoQubitClusterMinimum) {
    auto f = [](double t) { return envelope(EnvelopeFamily::kClusterApprox, 2, 1.0, 0.05, t, 1.0, true); };
    EnvelopeMinimum m = minima_and_times(EnvelopeFamily::kClusterApprox, 2, 1.0, 0.05, 1.0);
    double t_num = numeric_argmin(f, 1e-3, 60.0);
    EXPECT_NEAR(m.t_min, t_num, 1e-5);
    EXPECT_NEAR(m.deviation_min, f(t_num), 1e-10);
}

TEST(EnvelopeTest, RefMaxMinimumValue) {
    for (size_t n : {3, 5, 7}) {
        EnvelopeMinimum m = minima_and_times(EnvelopeFamily::kRefMax, n, 1.0, 0.05, 1.0);
        EXPECT_NEAR(m.deviation_min, std::sqrt(2 * 0.05 * std::numbers::e / n), 1e-12);
    }
}

TEST(EnvelopeTest, NoiselessEnvelopeIsUnbounded) {
    EXPECT_FALSE(minima_and_times(EnvelopeFamily::kRefMax, 3, 1.0, 0.0, 1.0).bounded);
}

TEST(EnvelopeTest, EpsilonSeriesLeadingTerm) {
    EXPECT_NEAR(epsilon_series(0.0), 1 - 1 / std::sqrt(2.0), 1e-15);
    EXPECT_GT(epsilon_series(0.1), epsilon_series(0.0));
}

TEST(EnvelopeTest, HumpPositionsForOddOrders) {
    auto g = hump_positions(1.0, 7);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_NEAR(g[1], 2 / std::sqrt(9 * std::numbers::pi * std::numbers::pi + 1), 1e-15);
    for (size_t i = 1; i < g.size(); i++) {
        EXPECT_LT(g[i], g[i - 1]);
    }
}

TEST(ScalingTest, TwoTermsApproximateEnvelope) {
    for (auto f : {EnvelopeFamily::kRefMax, EnvelopeFamily::kRefUnc, EnvelopeFamily::kClusterApprox}) {
        for (size_t n : {2, 6}) {
            double t = 1.0, g = 1e-3;
            ScalingTerms s = scaling_expansion(f, n, g, t, 1.0);
            double env = envelope(f, n, 1.0, g, t, 1.0);
            double x = s.validity_parameter;
            EXPECT_NEAR(s.heisenberg_term + s.offset_term, env, env * x * x) << to_string(f);
            EXPECT_TRUE(s.valid);
        }
    }
}

}  // namespace
}  // namespace qmetro
