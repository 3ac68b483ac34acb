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

#ifndef QMETRO_DYNAMICS_H
#define QMETRO_DYNAMICS_H

#include <cstdint>
#include <memory>
#include <vector>

#include "qmetro/integrator.h"
#include "qmetro/liouvillian.h"
#include "qmetro/model.h"

namespace qmetro {

/// rho together with d rho / d chi.
struct SensitivityPair {
    DensityMatrix rho;
    Eigen::MatrixXcd drho_dchi;
};

struct SensitivityDerivative {
    Eigen::MatrixXcd drho_dt;
    Eigen::MatrixXcd dsens_dt;
};

/// Dense reference right-hand side of the master equation and of its chi-derivative:
///
///     d rho / dt   = i [rho, chi h0] + D(rho)
///     d rho_chi/dt = i [rho_chi, chi h0] + i [rho, h0] + D(rho_chi)
SensitivityDerivative lindblad_rhs(const Eigen::MatrixXcd &rho, const Eigen::MatrixXcd &drho_dchi,
                                   const ObservableOperator &h0, double chi, const NoiseChannel &channel);
SensitivityDerivative lindblad_rhs(const SensitivityPair &state, const ObservableOperator &h0, double chi,
                                   const NoiseChannel &channel);

/// Uniform output grid from 0 to t_max with at least samples_per_period
/// points per period 2 pi / (N chi).
std::vector<double> sample_times(const ExperimentConfig &config);

IntegratorOptions integrator_options(const ExperimentConfig &config);

struct RunDiagnostics {
    IntegratorStats integrator;
    CliffordFrame frame = CliffordFrame::kComputational;
    size_t support_size = 0;
    uint64_t trace_renormalizations = 0;
    double max_trace_defect = 0;
    double max_hermiticity_defect = 0;
    double final_min_eigenvalue = 0;
    size_t nonfinite_samples = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SensitivityPair> states;
    RunDiagnostics diagnostics;
};

/// Integrates the scheme's probe state and returns dense states on the sample
/// grid. Memory grows as samples * 4^N; PrecisionRun streams instead.
Trajectory integrate(const ExperimentConfig &config);

struct PrecisionPoint {
    double t = 0;
    double expM = 0;
    double deltaM = 0;
    double dexpM_dchi = 0;
    double deltachi_sqrtT = 0;
    bool finite = false;
};

/// Turns <M>, <M^2> and d<M>/dchi at time t into a sample. The stored
/// deviation is delta chi * sqrt(T) = deltaM sqrt(t) / |d<M>/dchi|, so the
/// total budget T drops out.
PrecisionPoint make_point(double t, double expM, double expM2, double dexpM_dchi);

struct PrecisionCurve {
    std::vector<double> times;
    std::vector<double> expM;
    std::vector<double> deltaM;
    std::vector<double> dexpM_dchi;
    std::vector<double> deltachi_sqrtT;
    std::vector<bool> finite;

    size_t size() const {
        return times.size();
    }
    void push_back(const PrecisionPoint &p);
    PrecisionPoint point(size_t i) const;
    size_t nonfinite_count() const;
};

PrecisionCurve expectation_curve(const Trajectory &traj, const ObservableOperator &m, double total_time_T);

/// Dense-output view of a short, freshly integrated stretch of a run.
class LocalCurve {
   public:
    double t_lo() const {
        return t_lo_;
    }
    double t_hi() const {
        return t_hi_;
    }
    PrecisionPoint at(double t) const;

   private:
    friend class PrecisionRun;
    struct Segment {
        double t0;
        double h;
        // Probe values on the five interpolation vectors for <M>, <M^2>, d<M>/dchi.
        std::array<std::array<Complex, 5>, 3> coef;
    };
    double t_lo_ = 0;
    double t_hi_ = 0;
    std::vector<Segment> segments_;
};

/// Streams one integration of a config into a PrecisionCurve without storing
/// density matrices. Checkpoints taken along the way let local_curve()
/// re-integrate any sub-interval with dense output.
class PrecisionRun {
   public:
    /// Uses the scheme's measurement operator.
    explicit PrecisionRun(const ExperimentConfig &config);
    PrecisionRun(const ExperimentConfig &config, const ObservableOperator &m);

    const ExperimentConfig &config() const {
        return config_;
    }
    const PrecisionCurve &curve() const {
        return curve_;
    }
    const RunDiagnostics &diagnostics() const {
        return diag_;
    }
    LocalCurve local_curve(double t_lo, double t_hi) const;

   private:
    struct Checkpoint {
        double t;
        std::vector<Complex> y;
    };

    void run();

    ExperimentConfig config_;
    std::shared_ptr<const CompiledLiouvillian> liou_;
    std::array<Probe, 3> probes_;
    PrecisionCurve curve_;
    RunDiagnostics diag_;
    std::vector<Checkpoint> checkpoints_;
};

}  // namespace qmetro

#endif
