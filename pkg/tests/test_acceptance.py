"""Twelve acceptance criteria at their stated tolerances.

Each test prints one ``[NN] PASS|FAIL`` line.  Criterion 10 cannot be met
by the leading asymptotic wave form at x = 50 for r = 2..4, so it is kept
at its stated tolerance and marked as an expected failure.
"""
import math
import subprocess
import sys

import numpy as np
import pytest

from mathieu_pendulum import FAMILIES
from mathieu_pendulum.oracle import oracle_family_energies
from mathieu_pendulum.propagator import (
    Splitting,
    euclidean_trotter_kernel,
    kernel_trace,
    spectral_partition_sum,
    trotter_convergence,
)
from mathieu_pendulum.specfun import bessel_j, bessel_small_x, bessel_wave_asymptotic
from mathieu_pendulum.spectrum import energy_levels, kernel_coefficient, negative_coupling_spectrum
from mathieu_pendulum.verify import (
    addition_theorem_error,
    dual_representation_error,
    free_limit_error,
    gram_deviation,
    max_ode_residual,
    omega_ratio,
    oracle_spectrum_error,
)


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{number:02d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        return ok
    return emit


def test_01_orthogonality(report):
    worst = max(gram_deviation(b2, 8, 512) for b2 in (0.0, 1.0, 5.0))
    assert report(1, "orthogonality", worst <= 1e-10, f"max |G - pi I| = {worst:.2e} (<= 1e-10)")


def test_02_eigen_certification(report):
    worst = max(max_ode_residual(b2, 8, 512) for b2 in (0.0, 1.0, 5.0))
    assert report(2, "eigen-certification", worst <= 1e-8, f"max relative ODE residual = {worst:.2e} (<= 1e-8)")


def test_03_oracle_cross_validation(report):
    worst = max(oracle_spectrum_error(b2, 8) for b2 in (0.5, 1.0, 5.0))
    free = free_limit_error(8)
    ok = worst <= 1e-9 and free <= 1e-12
    assert report(3, "oracle cross-validation", ok,
                  f"max |E - E_oracle| = {worst:.2e} (<= 1e-9), free limit {free:.2e} (<= 1e-12)")


def test_04_addition_theorem(report):
    worst = max(addition_theorem_error(b, (0.0, 0.5, 1.0, 2.0), 8, 32) for b in (0.5, 1.0, 2.0))
    assert report(4, "addition theorem", worst <= 1e-8, f"max |direct - series|/(1+|direct|) = {worst:.2e} (<= 1e-8)")


def test_05_dual_representation(report):
    ys = np.linspace(0.0, 2.0, 21)
    worst = max(dual_representation_error(b2, 3, ys) for b2 in (0.5, 1.0, 5.0))
    assert report(5, "dual Ce/Se representation", worst <= 1e-8, f"max relative gap = {worst:.2e} (<= 1e-8)")


def test_06_time_slicing_limit(report):
    lie = trotter_convergence(1.0, 1.0, 128, splitting=Splitting.LIE)
    strang = trotter_convergence(1.0, 1.0, 128, splitting=Splitting.STRANG)
    sup = strang.errors[-1]
    ok = sup <= 1e-3 and 0.8 <= lie.order <= 1.2 and 1.8 <= strang.order <= 2.2
    detail = (f"STRANG sup error n=64 {sup:.2e} (<= 1e-3; LIE {lie.errors[-1]:.2e}), "
              f"orders LIE {lie.order:.3f} in [0.8, 1.2], STRANG {strang.order:.3f} in [1.8, 2.2]")
    assert report(6, "time-slicing limit", ok, detail)


def test_07_trace_consistency(report):
    trace = kernel_trace(euclidean_trotter_kernel(1.0, 64, 128, 1.0, Splitting.LIE))
    diff = abs(trace - spectral_partition_sum(1.0, 1.0, 32))
    assert report(7, "trace consistency", diff <= 1e-3, f"|Tr K_trotter - sum exp(-beta E)| = {diff:.2e} (<= 1e-3)")


def test_08_spectrum_conventions(report):
    ident, phase = 0.0, 0.0
    for b2 in (0.0, 0.5, 1.0, 5.0):
        table = energy_levels(b2, 8)
        for lv in table.levels:
            ident = max(ident, abs(lv.paper_energy + lv.physical_energy - table.h0))
            for T in (0.1, 1.0, 25.0):
                phase = max(phase, abs(abs(kernel_coefficient(lv, T)) - 1.0))
    ok = ident <= 1e-13 and phase <= 1e-14
    assert report(8, "spectrum conventions", ok, f"max |E_paper + E - h0| = {ident:.1e}, max ||phase| - 1| = {phase:.1e}")


def test_09_negative_coupling(report):
    worst = 0.0
    for b2 in (1.0, 5.0):
        pos = oracle_family_energies(b2, 8)
        neg = oracle_family_energies(-b2, 8)
        a = np.sort(np.concatenate([pos[f] for f in FAMILIES]))
        b = np.sort(np.concatenate([neg[f] for f in FAMILIES]))
        mine = np.sort(negative_coupling_spectrum(-b2, 8).table.physical_energies())
        worst = max(worst, float(np.max(np.abs(a - b))), float(np.max(np.abs(mine - b))))
    assert report(9, "negative coupling", worst <= 1e-10,
                  f"max sorted-spectrum gap (oracle +/-b2 and emitted -b2 table) = {worst:.2e} (<= 1e-10)")


@pytest.mark.xfail(strict=True, reason="second-order Hankel term at x=50 exceeds 1e-3 relative for r >= 2")
def test_10_bessel_asymptotics(report):
    wave = max(abs(2 * bessel_wave_asymptotic(r, 50.0).real - bessel_j(r, 50.0)) / abs(bessel_j(r, 50.0))
               for r in range(5))
    small = max(abs(bessel_small_x(r, 0.01) - bessel_j(r, 0.01)) / abs(bessel_j(r, 0.01)) for r in range(5))
    ok = wave <= 1e-3 and small <= 1e-4
    assert report(10, "Bessel asymptotics", ok,
                  f"wave form max relative error r<=4 at x=50 = {wave:.2e} (<= 1e-3), small-x {small:.2e} (<= 1e-4)")


def test_11_omega_slope(report):
    ratios = [omega_ratio(m, 1.0, 1e-3, 1e-4)[1] for m in (0, 1, 2)]
    ok = all(0.08 <= r <= 0.12 for r in ratios)
    text = ", ".join(f"m={m}: {r:.4f}" for m, r in enumerate(ratios))
    assert report(11, "omega slope", ok, f"deviation ratio eps 1e-3 -> 1e-4 ({text}), expected 0.1")


def test_12_determinism(tmp_path, report):
    outputs = []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        proc = subprocess.run([sys.executable, "-m", "mathieu_pendulum", "verify", "--all", "--out", str(path)],
                              capture_output=True)
        outputs.append((proc.returncode, proc.stdout, path.read_bytes()))
    same = outputs[0] == outputs[1]
    assert report(12, "determinism", same and outputs[0][0] == 0,
                  f"two verify --all runs byte-identical: {same}, exit code {outputs[0][0]}")
