# Copyright 2026 The qmetro Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import qmetro


def test_noiseless_cluster_is_heisenberg_limited():
    cfg = qmetro.ExperimentConfig(qmetro.Scheme.CLUSTER, n=3, gamma=0.0, t_max=5.0, rtol=1e-13, atol=1e-18)
    c = qmetro.precision_curve(cfg)
    t = c["t"][c["finite"]]
    d = c["deltachi_sqrtT"][c["finite"]]
    np.testing.assert_allclose(d * 3 * np.sqrt(t), 1.0, rtol=1e-7)


def test_two_qubit_curve_matches_closed_form():
    cfg = qmetro.ExperimentConfig(qmetro.Scheme.CLUSTER, n=2, gamma=0.05, t_max=20.0)
    c = qmetro.precision_curve(cfg)
    want = [qmetro.closed_form_expectation_n2(1.0, 0.05, t) for t in c["t"]]
    np.testing.assert_allclose(c["expM"], want, atol=1e-7)
    assert qmetro.evolve_expm(1.0, 0.05, 3.0) == pytest.approx(qmetro.closed_form_expectation_n2(1.0, 0.05, 3.0))


def test_generator_matrices_have_expected_shape():
    a = qmetro.build_matrix_a(1.0, 0.1)
    b = qmetro.derive_matrix_a(1.0, 0.1)
    assert a.shape == (15, 15) and b.shape == (15, 15)
    assert np.count_nonzero(np.abs(a - b) > 1e-12) == 8
    assert np.allclose(b.imag, 0.0)


def test_envelope_minimum():
    t, v = qmetro.minima_and_times(qmetro.EnvelopeFamily.REF_MAX, 5, 1.0, 0.05)
    assert t == pytest.approx(1 / (2 * 5 * 0.05))
    assert v == pytest.approx(math.sqrt(2 * 0.05 * math.e / 5))


def test_improvement_near_small_rate_limit():
    r = qmetro.improvement(0.03, 2, qmetro.Channel.DEPHASING, qmetro.Scheme.REF1_MAX, qmetro.default_window(2))
    assert r["epsilon"] == pytest.approx(1 - 1 / math.sqrt(2), abs=0.02)


def test_sweep_rows_are_sorted():
    rows = qmetro.gamma_sweep(qmetro.log_grid(0.05, 0.1, 3), [3, 2], qmetro.Channel.DEPHASING,
                              qmetro.Scheme.REF1_UNC)
    keys = [(r["gamma"], r["n"]) for r in rows]
    assert keys == sorted(keys)
    assert all(r["error"] == "" for r in rows)


def test_estimator_is_deterministic():
    a = qmetro.simulate_estimator(0.2, 4, 1.0, 0.3, 1000, 5, 3)
    b = qmetro.simulate_estimator(0.2, 4, 1.0, 0.3, 1000, 5, 3)
    np.testing.assert_array_equal(a["samples"], b["samples"])
    assert math.isnan(qmetro.simulate_estimator(0.2, 4, 1.0, 0.3, 1, 5, 1)["spread"])


def test_errors_are_mapped():
    with pytest.raises(ValueError):
        qmetro.omega(1.0, 3.0)
    with pytest.raises(ValueError):
        qmetro.parse_config("gama = 1\n")
    with pytest.raises(ValueError):
        qmetro.ExperimentConfig(n=2, samples_per_period=2)


def test_config_text_resolves():
    cfg = qmetro.parse_config("n = 4\ngamma = 0.1\nchannel = damping\nscheme = ref2-unc\n")
    assert cfg.n == 4 and cfg.scheme == qmetro.Scheme.REF2_UNC and cfg.channel == qmetro.Channel.DAMPING
    assert cfg.t_max == qmetro.default_window(4)


def test_validation_suite_passes():
    assert all(r["passed"] for r in qmetro.validate())
