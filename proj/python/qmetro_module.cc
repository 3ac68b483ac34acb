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

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmetro/analytic.h"
#include "qmetro/config_io.h"
#include "qmetro/errors.h"
#include "qmetro/metrology.h"
#include "qmetro/validation.h"

namespace py = pybind11;

namespace qmetro {
namespace {

py::array_t<double> to_array(const std::vector<double> &v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict curve_dict(const PrecisionCurve &c) {
    py::dict d;
    d["t"] = to_array(c.times);
    d["expM"] = to_array(c.expM);
    d["dexpM_dchi"] = to_array(c.dexpM_dchi);
    d["deltaM"] = to_array(c.deltaM);
    d["deltachi_sqrtT"] = to_array(c.deltachi_sqrtT);
    py::array_t<bool> finite(static_cast<py::ssize_t>(c.size()));
    auto f = finite.mutable_unchecked<1>();
    for (size_t i = 0; i < c.size(); i++) {
        f(static_cast<py::ssize_t>(i)) = c.finite[i];
    }
    d["finite"] = finite;
    return d;
}

}  // namespace
}  // namespace qmetro

PYBIND11_MODULE(_core, m) {
    using namespace qmetro;
    m.doc() = "Cluster-state parameter estimation under Lindblad noise";
    m.attr("__version__") = QMETRO_VERSION;

    py::register_exception<StiffnessError>(m, "StiffnessError", PyExc_RuntimeError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);
    py::register_exception<NoFiniteSamples>(m, "NoFiniteSamples", PyExc_RuntimeError);
    py::register_exception<OmegaDomainError>(m, "OmegaDomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::enum_<Scheme>(m, "Scheme")
        .value("CLUSTER", Scheme::kCluster)
        .value("REF1_MAX", Scheme::kRef1Max)
        .value("REF1_UNC", Scheme::kRef1Unc)
        .value("REF2_MAX", Scheme::kRef2Max)
        .value("REF2_UNC", Scheme::kRef2Unc);
    py::enum_<ChannelKind>(m, "Channel")
        .value("DEPHASING", ChannelKind::kDephasing)
        .value("DEPOLARIZING", ChannelKind::kDepolarizing)
        .value("DAMPING", ChannelKind::kDamping);
    py::enum_<EnvelopeFamily>(m, "EnvelopeFamily")
        .value("REF_MAX", EnvelopeFamily::kRefMax)
        .value("REF_UNC", EnvelopeFamily::kRefUnc)
        .value("CLUSTER_APPROX", EnvelopeFamily::kClusterApprox);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init([](Scheme scheme, size_t n, ChannelKind channel, double gamma, double t_max, double chi,
                         size_t samples_per_period, double rtol, double atol) {
                 ExperimentConfig c = make_config(scheme, n, channel, gamma, t_max, samples_per_period, chi);
                 c.rtol = rtol;
                 c.atol = atol;
                 c.validate();
                 return c;
             }),
             py::arg("scheme") = Scheme::kCluster, py::arg("n") = 2, py::arg("channel") = ChannelKind::kDephasing,
             py::arg("gamma") = 0.0, py::arg("t_max") = 10.0, py::arg("chi") = 1.0,
             py::arg("samples_per_period") = 32, py::arg("rtol") = 1e-9, py::arg("atol") = 1e-12)
        .def_readwrite("n", &ExperimentConfig::n)
        .def_readwrite("chi", &ExperimentConfig::chi)
        .def_readwrite("scheme", &ExperimentConfig::scheme)
        .def_readwrite("t_max", &ExperimentConfig::t_max)
        .def_readwrite("samples_per_period", &ExperimentConfig::samples_per_period)
        .def_readwrite("rtol", &ExperimentConfig::rtol)
        .def_readwrite("atol", &ExperimentConfig::atol)
        .def_property(
            "gamma", [](const ExperimentConfig &c) { return c.channel.gamma; },
            [](ExperimentConfig &c, double g) { c.channel.gamma = g; })
        .def_property(
            "channel", [](const ExperimentConfig &c) { return c.channel.kind; },
            [](ExperimentConfig &c, ChannelKind k) { c.channel.kind = k; });

    m.def("default_window", &default_window, py::arg("n"));
    m.def(
        "precision_curve",
        [](const ExperimentConfig &c) {
            PrecisionCurve curve;
            {
                py::gil_scoped_release release;
                PrecisionRun run(c);
                curve = run.curve();
            }
            return curve_dict(curve);
        },
        py::arg("config"), "Integrates the config and returns the precision curve as numpy arrays.");
    m.def(
        "min_deviation",
        [](const ExperimentConfig &c, double t_f) {
            PrecisionRun run(c);
            DeviationMinimum d = min_deviation(run, t_f);
            return py::make_tuple(d.t_star, d.value);
        },
        py::arg("config"), py::arg("t_f"));
    m.def(
        "improvement",
        [](double gamma, size_t n, ChannelKind channel, Scheme reference, double t_f) {
            ImprovementResult r = improvement(gamma, n, channel, reference, t_f);
            py::dict d;
            d["epsilon"] = r.epsilon;
            d["epsilon_envelope"] = r.epsilon_envelope;
            d["cluster"] = py::make_tuple(r.cluster.t_star, r.cluster.value);
            d["reference"] = py::make_tuple(r.reference.t_star, r.reference.value);
            return d;
        },
        py::arg("gamma"), py::arg("n"), py::arg("channel"), py::arg("reference"), py::arg("t_f"));
    m.def(
        "gamma_sweep",
        [](const std::vector<double> &gammas, const std::vector<size_t> &n_list, ChannelKind channel,
           Scheme reference, size_t threads) {
            SweepOptions opts;
            opts.threads = threads;
            std::vector<SweepRow> rows;
            {
                py::gil_scoped_release release;
                rows = gamma_sweep(gammas, n_list, channel, reference, opts);
            }
            py::list out;
            for (const auto &r : rows) {
                py::dict d;
                d["gamma"] = r.gamma;
                d["n"] = r.n;
                d["t_min"] = r.t_min_found;
                d["deltachi_min_sqrtT"] = r.deltachi_min_sqrtT;
                d["reference_min_sqrtT"] = r.reference_min_sqrtT;
                d["epsilon"] = r.epsilon;
                d["epsilon_envelope"] = r.epsilon_envelope;
                d["error"] = r.error;
                out.append(d);
            }
            return out;
        },
        py::arg("gammas"), py::arg("n_list"), py::arg("channel"), py::arg("reference"), py::arg("threads") = 1);
    m.def("log_grid", &log_grid, py::arg("gamma_min"), py::arg("gamma_max"), py::arg("points_per_decade"));

    m.def("closed_form_expectation_n2", &closed_form_expectation_n2, py::arg("chi"), py::arg("gamma"), py::arg("t"));
    m.def("closed_form_deviation", &closed_form_deviation, py::arg("n"), py::arg("chi"), py::arg("gamma"),
          py::arg("t"), py::arg("T") = 1.0);
    m.def("omega", &omega, py::arg("chi"), py::arg("gamma"));
    m.def(
        "evolve_expm", [](double chi, double gamma, double t) { return evolve_expm(chi, gamma, t).expM; },
        py::arg("chi"), py::arg("gamma"), py::arg("t"));
    m.def("build_matrix_a", &build_matrix_a, py::arg("chi"), py::arg("gamma"));
    m.def("derive_matrix_a", &derive_matrix_a, py::arg("chi"), py::arg("gamma"));
    m.def("envelope", &envelope, py::arg("family"), py::arg("n"), py::arg("chi"), py::arg("gamma"), py::arg("t"),
          py::arg("T") = 1.0, py::arg("exact") = false, py::arg("channel") = ChannelKind::kDephasing);
    m.def(
        "minima_and_times",
        [](EnvelopeFamily f, size_t n, double chi, double gamma, ChannelKind channel) {
            EnvelopeMinimum e = minima_and_times(f, n, chi, gamma, 1.0, channel);
            return py::make_tuple(e.t_min, e.deviation_min);
        },
        py::arg("family"), py::arg("n"), py::arg("chi"), py::arg("gamma"),
        py::arg("channel") = ChannelKind::kDephasing);
    m.def("epsilon_series", &epsilon_series, py::arg("gamma_over_chi"));

    m.def(
        "simulate_estimator",
        [](double expM, size_t n, double chi, double t, uint64_t nu, uint64_t seed, size_t runs) {
            EstimatorResult r = simulate_estimator(expM, n, chi, t, nu, seed, runs);
            py::dict d;
            d["samples"] = to_array(r.samples);
            d["mean"] = r.mean;
            d["spread"] = r.spread;
            d["bias"] = r.bias;
            return d;
        },
        py::arg("expM"), py::arg("n"), py::arg("chi"), py::arg("t"), py::arg("nu"), py::arg("seed"),
        py::arg("runs") = 1);

    m.def(
        "validate",
        [] {
            py::list out;
            for (const auto &r : run_validation()) {
                py::dict d;
                d["name"] = r.name;
                d["passed"] = r.passed;
                d["max_error"] = r.max_error;
                d["tolerance"] = r.tolerance;
                d["detail"] = r.detail;
                out.append(d);
            }
            return out;
        },
        "Runs the oracle suite and returns one record per check.");

    m.def(
        "parse_config",
        [](const std::string &text) {
            RunConfig rc = RunConfig::parse(text);
            ExperimentConfig e = rc.experiment();
            return e;
        },
        py::arg("text"), "Resolves a run file to the experiment for its scheme.");
}
