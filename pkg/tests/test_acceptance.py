"""Acceptance criteria C1-C9, each at its stated tolerance.

Every criterion records its parts through ``record_criterion``; the terminal
summary prints one PASS/FAIL line per criterion followed by the parts.
"""

import math
import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.polynomial import hermite as phys

from conftest import record_criterion
from qphot.errors import NumericalAccuracyError, SingularityError
from qphot.floquet import QuadraticHamiltonian, monodromy
from qphot.fock_oracle import (
    closed_form_coherent,
    closed_form_squeezed_vacuum,
    closed_form_thermal,
    oracle_pnd_single_mode_range,
)
from qphot.gaussian_state import (
    GaussianState,
    apply_symplectic,
    dump_state,
    make_coherent,
    make_squeezed_vacuum,
    make_thermal,
    mean_photon_number,
    product_state,
)
from qphot.hermite import HermiteSpec, hermite_batch, hermite_series_table
from qphot.photon_distribution import VARIANTS, mean_from_pnd, pnd
from qphot.q_planck import QOscillator, mean_occupation_approx, mean_occupation_exact

N_MAX = 20


def _displaced_squeezed_thermal():
    base = make_squeezed_vacuum(0.4, 0.6)
    disp = (2 * 0.3 + 1) * base.disp
    return GaussianState(1, make_coherent([0.8 - 0.5j]).mean, disp)


def _single_mode_cases():
    cases = []
    for nbar in (0.2, 1.0, 3.0):
        cases.append((f"thermal nbar={nbar}", make_thermal(nbar), lambda n, a=nbar: closed_form_thermal(a, n)))
    for a2 in (0.5, 1.0, 4.0):
        alpha = math.sqrt(a2) * complex(math.cos(0.3), math.sin(0.3))
        cases.append((f"coherent |a|^2={a2}", make_coherent([alpha]), lambda n, a=a2: closed_form_coherent(a, n)))
    for r in (0.3, 1.0):
        cases.append(
            (f"squeezed r={r}", make_squeezed_vacuum(r, 0.0), lambda n, a=r: closed_form_squeezed_vacuum(a, n))
        )
    cases.append(("displaced squeezed thermal", _displaced_squeezed_thermal(), None))
    return cases


def _correlated_two_mode():
    S = np.array(
        [
            [math.cosh(0.5), -math.sinh(0.5), 0, 0],
            [-math.sinh(0.5), math.cosh(0.5), 0, 0],
            [0, 0, math.cosh(0.5), math.sinh(0.5)],
            [0, 0, math.sinh(0.5), math.cosh(0.5)],
        ]
    )
    base = product_state(make_thermal(0.2), make_coherent([0.6j]))
    return apply_symplectic(base, S, d=[0.1, 0.0, -0.2, 0.3])


def test_c1_normalization():
    title = "normalization and geometric tail, thermal nbar=1, cutoff 60"
    probs = pnd(make_thermal(1.0), cutoff=60).probs
    total = math.fsum(probs)
    ok_sum = 1 - 1e-8 <= total <= 1 + 1e-9
    record_criterion(1, title, "sum in [1-1e-8, 1+1e-9]", ok_sum, f"sum={total:.17g}")
    ratios = probs[1:] / probs[:-1]
    worst = float(np.max(np.abs(ratios[-20:] - 0.5)))
    ok_ratio = worst <= 1e-6
    record_criterion(1, title, "P_{n+1}/P_n -> 1/2 within 1e-6 (last 20)", ok_ratio, f"max dev={worst:.3e}")
    assert ok_sum and ok_ratio


def test_c2_single_mode_oracle_equivalence():
    title = "single-mode pnd vs closed forms and phase-space oracle, n <= 20"
    all_ok = True
    for name, state, closed in _single_mode_cases():
        probs = pnd(state, cutoff=N_MAX).probs
        oracle, _ = oracle_pnd_single_mode_range(state, N_MAX)
        dev = float(np.max(np.abs(probs - oracle)))
        if closed is not None:
            ref = np.array([closed(n) for n in range(N_MAX + 1)])
            dev = max(dev, float(np.max(np.abs(probs - ref))))
        ok = dev <= 1e-8
        all_ok &= ok
        record_criterion(2, title, name, ok, f"max |delta|={dev:.3e}")

    # the R/y construction is pinned: only the default variant survives the suite
    survivors = []
    for variant in sorted(VARIANTS):
        try:
            passed = True
            for _, state, closed in _single_mode_cases():
                if closed is None:
                    continue
                probs = pnd(state, cutoff=N_MAX, variant=variant).probs
                ref = np.array([closed(n) for n in range(N_MAX + 1)])
                passed &= float(np.max(np.abs(probs - ref))) <= 1e-8
        except (NumericalAccuracyError, SingularityError):
            passed = False
        if passed:
            survivors.append(variant)
    ok = survivors == ["regularized"]
    all_ok &= ok
    record_criterion(2, title, "variant pinned", ok, f"passing variants={survivors}")
    assert all_ok


def test_c3_moment_identity():
    title = "mean_from_pnd vs mean_photon_number within 1e-6"
    cases = [(name, state) for name, state, _ in _single_mode_cases()]
    cases.append(("two-mode correlated", _correlated_two_mode()))
    all_ok = True
    for name, state in cases:
        dist = pnd(state)
        dev = max(abs(mean_from_pnd(dist, j) - mean_photon_number(state, j)) for j in range(state.n_modes))
        ok = dev <= 1e-6
        all_ok &= ok
        record_criterion(3, title, name, ok, f"|delta|={dev:.3e} cutoff={dist.cutoff}")
    assert all_ok


def test_c4_parity():
    title = "odd P_n of squeezed vacuum r=0.5 vanish up to n=21"
    probs = pnd(make_squeezed_vacuum(0.5), cutoff=21).probs
    worst = float(np.max(np.abs(probs[1::2])))
    ok = worst <= 1e-12
    record_criterion(4, title, "max odd |P_n| <= 1e-12", ok, f"{worst:.3e}")
    assert ok


def test_c5_hermite_engine():
    title = "Hermite recurrence vs series oracle and classical reduction"
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(200):
        dim = int(rng.integers(1, 5))
        order = int(rng.integers(0, 7))
        A = rng.uniform(-1, 1, (dim, dim)) + 1j * rng.uniform(-1, 1, (dim, dim))
        y = rng.uniform(-1, 1, dim) + 1j * rng.uniform(-1, 1, dim)
        spec = HermiteSpec((A + A.T) / 2, y)
        table = hermite_batch(spec, order)
        for n, ref in hermite_series_table(spec, order).items():
            if max(n) <= order:
                worst = max(worst, abs(table[n] - ref) / max(1.0, abs(ref)))
    ok_random = worst <= 1e-10
    record_criterion(5, title, "200 random specs, D<=4, order<=6", ok_random, f"max rel err={worst:.3e}")

    worst_classical = 0.0
    for x in np.linspace(-3, 3, 61):
        values = hermite_batch(HermiteSpec([[2.0]], [x]), 10)
        for n in range(11):
            ref = phys.hermval(x, [0] * n + [1])
            worst_classical = max(worst_classical, abs(values[n] - ref) / max(1.0, abs(ref)))
    ok_classical = worst_classical <= 1e-9
    record_criterion(5, title, "D=1, R=2 vs physicists' H_n, n<=10", ok_classical, f"max rel err={worst_classical:.3e}")
    assert ok_random and ok_classical


def _factor_direct(x):
    e = math.exp
    return x * (e(3 * x) + 4 * e(2 * x) + e(x)) / (e(x) - 1) ** 4


def test_c6_q_planck():
    title = "q-deformed Planck law and its lambda^2 correction"
    x = 1.0

    def err(lam):
        osc = QOscillator(lam, x)
        return abs(mean_occupation_exact(osc) - mean_occupation_approx(osc))

    ratio = err(0.1) / err(0.05)
    ok_ratio = 8 <= ratio <= 32
    record_criterion(6, title, "err(0.1)/err(0.05) in [8, 32]", ok_ratio, f"ratio={ratio:.4f}")

    planck = 1 / (math.e - 1)
    osc = QOscillator(0.0, x)
    dev0 = max(abs(mean_occupation_exact(osc) - planck), abs(mean_occupation_approx(osc) - planck))
    ok_zero = dev0 <= 1e-12
    record_criterion(6, title, "lambda=0 gives 1/(e-1)", ok_zero, f"max dev={dev0:.3e}")

    correction = mean_occupation_approx(QOscillator(0.1, x)) - planck
    dev2 = abs(correction - (-0.01 * _factor_direct(x)))
    ok_corr = dev2 <= 1e-12
    record_criterion(6, title, "lambda^2 correction at (0.1, 1)", ok_corr, f"|delta|={dev2:.3e}")
    assert ok_ratio and ok_zero and ok_corr


def _phase_distance(phases, target, period):
    band = 2 * math.pi / period
    return float(np.min(np.abs(np.mod(phases - target + band / 2, band) - band / 2)))


def test_c7_floquet_invariance():
    title = "Floquet invariant spectra, residuals, phases and resonance"
    omega, period = 1.3, 2.0
    cases = [
        ("constant omega=1.3", QuadraticHamiltonian.constant(np.diag([1.0, omega**2]), period)),
        ("Mathieu eps=0.01, Omega=2", QuadraticHamiltonian.mathieu(1.0, 0.01, 2.0)),
        ("Mathieu eps=0.3, Omega=2", QuadraticHamiltonian.mathieu(1.0, 0.3, 2.0)),
    ]
    all_ok = True
    reports = {}
    for name, ham in cases:
        rep = monodromy(ham, samples=8)
        reports[name] = rep
        ok = rep.invariance_residual <= 1e-8 and rep.symplectic_residual <= 1e-9
        all_ok &= ok
        record_criterion(
            7,
            title,
            name,
            ok,
            f"invariance={rep.invariance_residual:.3e} symplectic={rep.symplectic_residual:.3e} "
            f"class={rep.conjugacy[0]} trace={np.trace(rep.S_T):.10f}",
        )
    phases = reports["constant omega=1.3"].phases
    dev = max(_phase_distance(phases, s * omega, period) for s in (1, -1))
    ok = dev <= 1e-8 and len(phases) == 2
    all_ok &= ok
    record_criterion(7, title, "constant phases = +-omega mod 2pi/T", ok, f"max dev={dev:.3e}")
    label = reports["Mathieu eps=0.3, Omega=2"].conjugacy
    ok = label == ("hyperbolic",)
    all_ok &= ok
    record_criterion(7, title, "tuned parametric resonance hyperbolic", ok, f"class={label}")
    assert all_ok


def test_c8_literal_variant_singular():
    title = "literal (I - 2M)^-1 construction raises on a coherent state"
    try:
        pnd(make_coherent([1.0]), cutoff=5, variant="literal")
    except SingularityError as exc:
        ok, detail = True, f"SingularityError: {exc}"
    else:
        ok, detail = False, "no error raised"
    record_criterion(8, title, "SingularityError raised", ok, detail)
    assert ok


def _cli(args, workers):
    env = dict(os.environ)
    env.pop("QPHOT_WORKERS", None)
    if workers is not None:
        env["QPHOT_WORKERS"] = str(workers)
    proc = subprocess.run(
        [sys.executable, "-m", "qphot.cli", *args], env=env, capture_output=True, check=False
    )
    return proc.returncode, proc.stdout


@pytest.mark.slow
def test_c9_cli_determinism(tmp_path):
    title = "pnd and verify output byte-identical across runs and worker counts"
    single = tmp_path / "single.json"
    dump_state(_displaced_squeezed_thermal(), single)
    double = tmp_path / "double.json"
    dump_state(_correlated_two_mode(), double)
    commands = {
        "pnd single": ["pnd", str(single)],
        "pnd two-mode": ["pnd", str(double), "--format", "jsonl"],
        "verify single": ["verify", str(single)],
        "verify two-mode": ["verify", str(double)],
    }
    all_ok = True
    for name, args in commands.items():
        outputs = {_cli(args, workers) for workers in (1, None) for _ in range(3)}
        codes = {code for code, _ in outputs}
        ok = len(outputs) == 1 and codes == {0}
        all_ok &= ok
        record_criterion(9, title, name, ok, f"distinct outputs={len(outputs)} exit codes={sorted(codes)}")
    assert all_ok
