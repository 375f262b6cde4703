"""Acceptance suite: one test per pinned criterion, each printing PASS/FAIL.

Two tests are expected to fail and are left red deliberately:

* test_c10_conditional_gate - the pinned protocol (rectangular resonant pi
  pulse on the control=1 line, duration 10/delta_omega) gives
  P(flip|control=0) = 0.0670 in closed form, which cannot meet the 0.05
  bound; the test asserts the bound as stated rather than weakening it.
* test_c11_report_exit_code - the report aggregates that same check, so
  its exit code cannot be 0.

Everything else must pass. See tests/test_gates.py for the faithful frozen
value of the conditional leak probability.
"""

import json
import math
import time

import numpy as np
import pytest

from ramanqc.cli import main
from ramanqc.config import default_config
from ramanqc.report import (
    check_addressing,
    check_cnot_budget,
    check_cnot_conditional,
    check_detuning_optimum,
    check_noise_mc,
    check_potential_oracle,
    check_propagator,
    check_shielding,
    check_tau2,
    check_well_geometry,
)


@pytest.fixture(scope="module")
def cfg():
    return default_config()


def _report(name, check):
    print(f"ACCEPTANCE {name}: {'PASS' if check.passed else 'FAIL'}  {check.computed}")
    return check


def test_c01_potential_oracle(cfg):
    c = _report("C1 potential oracle", check_potential_oracle(cfg))
    assert c.computed["max_rel_dev"] <= 1e-12
    assert c.computed["runtime_s"] < 1.0
    assert c.passed


def test_c02_detuning_optimization(cfg):
    c = _report("C2 detuning optimization", check_detuning_optimum(cfg))
    assert c.computed["delta_a_over_alpha"] == pytest.approx(-1 / 15, abs=1e-6)
    assert c.computed["delta_b_over_alpha"] == pytest.approx(+1 / 15, abs=1e-6)
    assert 0.15 <= c.computed["off_resonant_barrier_ratio"] <= 0.25
    assert c.passed


def test_c03_geometry(cfg):
    c = _report("C3 geometry", check_well_geometry(cfg))
    assert c.computed["spacing_m"] == pytest.approx(77.25e-9, rel=1e-12)
    assert c.computed["spacing_rel_dev"] <= 1e-12
    assert c.computed["barrier_rel_dev"] <= 1e-15
    assert c.passed


def test_c04_cnot_budget(cfg):
    c = _report("C4 CNOT budget", check_cnot_budget(cfg))
    assert 1.0e-3 <= c.computed["tau_cnot_s"] <= 2.0e-3
    assert c.computed["quarter_to_half_shift_ratio"] == 8.0
    assert c.passed


def test_c05_tau2_and_escape(cfg):
    c = _report("C5 tau2", check_tau2(cfg))
    assert 1e-7 <= c.computed["tau2_s"] <= 5e-7
    assert c.computed["identity_dev"] <= 1e-12
    assert 1 / 3 <= c.computed["escape_over_tau2"] <= 3.0
    assert c.computed["runtime_s"] < 30.0
    assert c.passed


def test_c06_shielding(cfg):
    c = _report("C6 shielding", check_shielding(cfg))
    assert c.computed["rel_dev_from_3e-12"] <= 0.20
    assert c.passed


def test_c07_noise_oracle_equivalence(cfg):
    c = _report("C7 noise MC oracle", check_noise_mc(cfg))
    for ratio in c.computed["slope_times_tau1"]:
        assert abs(ratio - 1.0) <= 0.10
    assert c.computed["runtime_s"] < 120.0
    assert c.passed


def test_c08_propagator_quality(cfg):
    c = _report("C8 propagator", check_propagator(cfg))
    assert c.computed["norm_drift_1e4_steps"] <= 1e-10
    assert c.computed["free_gaussian_var_rel_dev"] <= 1e-6
    assert c.computed["deep_well_gs_rel_dev"] <= 0.005
    assert c.passed


def test_c09_addressing(cfg):
    c = _report("C9 addressing", check_addressing(cfg))
    assert c.computed["max_crosstalk"] < 0.01
    assert abs(c.computed["resonant_pi_transfer"] - 1.0) <= 1e-10
    assert c.passed


def test_c10_conditional_gate(cfg):
    """EXPECTED FAIL: the pinned protocol yields P(flip|0) = 0.0670 > 0.05.

    P(flip|1) >= 0.99 holds exactly; the 0.05 bound on the detuned branch
    contradicts the closed-form Rabi leak (pi^2/(pi^2+100)) sin^2(...) at
    duration * delta_omega = 10 and is asserted as stated.
    """
    c = _report("C10 conditional gate", check_cnot_conditional(cfg))
    assert c.computed["p_flip_control_1"] >= 0.99
    assert c.computed["p_flip_control_0"] <= 0.05  # unattainable; see docstring
    assert c.passed


@pytest.fixture(scope="module")
def report_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("report")
    t0 = time.perf_counter()
    code = main(["report", "--output", str(out)])
    runtime = time.perf_counter() - t0
    return out, code, runtime


def test_c11_report_artifacts_and_runtime(report_run):
    """Everything except the known-defective conditional-gate bound."""
    out, code, runtime = report_run
    assert runtime < 300.0
    payload = json.loads((out / "report.json").read_text())
    print(f"ACCEPTANCE C11 runtime: {runtime:.1f} s; checks:")
    for name, entry in payload["checks"].items():
        print(f"  {'PASS' if entry['pass'] else 'FAIL'}  {name}")
    failing = {n for n, e in payload["checks"].items() if not e["pass"]}
    assert failing == {"cnot_conditional"}
    for artifact in (
        "report.json",
        "potentials.csv",
        "potentials.png",
        "motional.csv",
        "motional.json",
        "motional.png",
        "noise.json",
        "noise_pt.csv",
        "noise.png",
    ):
        assert (out / artifact).exists(), artifact
    assert payload["meta"]["config_hash"]


def test_c11_report_exit_code(report_run):
    """EXPECTED FAIL: exit 0 requires the C10 bound, which is unattainable."""
    out, code, runtime = report_run
    payload = json.loads((out / "report.json").read_text())
    print(f"ACCEPTANCE C11 all_pass: {'PASS' if payload['all_pass'] else 'FAIL'}")
    assert payload["all_pass"]
    assert code == 0
