"""q-deformed oscillator spectrum and thermal occupation.

Energies are in units of the bare quantum ``hbar omega`` and temperature
enters only through ``x = hbar omega / kT``. The deformation parameter is
``lam`` with ``q = exp(lam)``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._parallel import ordered_map
from .errors import NumericalAccuracyError

WEIGHT_THRESHOLD = 1e-18
MAX_TERMS = 1_000_000


def qbracket(n, lam):
    """``[n] = sinh(lam n) / sinh(lam)``; equals ``n`` at ``lam = 0``."""
    n = np.asarray(n, dtype=float)
    if lam == 0:
        return n if n.ndim else float(n)
    with np.errstate(over="ignore"):
        out = np.sinh(lam * n) / np.sinh(lam)
    return out if out.ndim else float(out)


def q_energy(n, lam):
    """Level ``n`` of ``H = (a_q^+ a_q + a_q a_q^+) / 2``, i.e. ``([n] + [n+1]) / 2``."""
    n = np.asarray(n, dtype=float)
    return 0.5 * (qbracket(n, lam) + qbracket(n + 1, lam))


def q_frequency(n_value, lam):
    """Amplitude-dependent frequency ``(lam / sinh lam) cosh(lam n)`` in bare units."""
    n_value = np.asarray(n_value, dtype=float)
    prefactor = 1.0 if lam == 0 else lam / math.sinh(lam)
    out = prefactor * np.cosh(lam * n_value)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class QOscillator:
    lam: float
    x: float

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise ValueError(f"lambda must be finite, got {self.lam}")
        if not (math.isfinite(self.x) and self.x > 0):
            raise ValueError(f"x = hbar omega / kT must be finite and > 0, got {self.x}")


def mean_occupation_exact(osc, cutoff=None):
    """Boltzmann average of the level label ``n`` over the q-oscillator ladder.

    Without ``cutoff`` the sum grows until the last weight falls below
    ``1e-18`` of the running partition sum (at most ``10**6`` levels).
    """
    e0 = q_energy(0, osc.lam)
    chunk = 1024 if cutoff is None else int(cutoff) + 1
    while True:
        n = np.arange(chunk, dtype=float)
        with np.errstate(over="ignore"):
            weights = np.exp(-osc.x * (q_energy(n, osc.lam) - e0))
        z = weights.sum()
        if cutoff is not None or weights[-1] < WEIGHT_THRESHOLD * z:
            return float((n * weights).sum() / z)
        if chunk >= MAX_TERMS:
            raise NumericalAccuracyError(
                f"partition sum not converged within {MAX_TERMS} levels"
            )
        chunk = min(4 * chunk, MAX_TERMS)


def planck(x):
    return 1.0 / math.expm1(x)


def correction_factor(x):
    """``x (e^{3x} + 4 e^{2x} + e^x) / (e^x - 1)^4``, the coefficient of ``-lam^2``."""
    # divide through by e^{4x} so large x stays finite
    z = math.exp(-x)
    return x * z * (1 + 4 * z + z * z) / (-math.expm1(-x)) ** 4


def mean_occupation_approx(osc):
    """Planck occupation with the closed-form ``lam^2`` correction."""
    return planck(osc.x) - osc.lam**2 * correction_factor(osc.x)


class CurveRow(NamedTuple):
    x: float
    exact: float
    approx: float
    difference: float


def planck_curve(lam, x_values):
    """Rows ``(x, exact, approx, exact - approx)`` for each ``x``."""
    oscillators = [QOscillator(lam, float(x)) for x in x_values]

    def row(osc):
        exact = mean_occupation_exact(osc)
        approx = mean_occupation_approx(osc)
        return CurveRow(osc.x, exact, approx, exact - approx)

    return ordered_map(row, oscillators)
