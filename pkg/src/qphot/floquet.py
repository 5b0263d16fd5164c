"""Monodromy, quasi-phases and invariant spectra of periodic quadratic Hamiltonians.

Work is done in the symplectic representation: ``H(t) = 1/2 Q^T B(t) Q``
generates ``dS/dt = J B(t) S`` with ``Q = (p_1..p_N, q_1..q_N)`` and
``J = [[0, -I], [I, 0]]``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ._parallel import ordered_map
from .errors import NoPrincipalLogError, NonSymplecticError, NumericalAccuracyError
from .gaussian_state import symplectic_form, symplectic_residual

SYMPLECTIC_TOL = 1e-9
TRACE_TOL = 1e-10
UNIT_CIRCLE_TOL = 1e-9
MAX_STEPS = 1 << 20
COND_LIMIT = 1e12


@dataclass(frozen=True)
class QuadraticHamiltonian:
    n_modes: int
    B: Callable[[float], np.ndarray]
    period: float
    description: str = field(default="custom", compare=False)

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError(f"number of modes must be >= 1, got {self.n_modes}")
        if not (math.isfinite(self.period) and self.period > 0):
            raise ValueError(f"period must be positive, got {self.period}")

    @classmethod
    def constant(cls, B, period):
        B = np.array(B, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] % 2:
            raise ValueError(f"B must be a 2N x 2N matrix, got shape {B.shape}")
        if not np.allclose(B, B.T, rtol=0, atol=1e-12):
            raise ValueError("B must be symmetric")
        B.flags.writeable = False
        return cls(B.shape[0] // 2, lambda t: B, float(period), "constant")

    @classmethod
    def mathieu(cls, omega0, epsilon, Omega):
        """``H = p^2/2 + omega0^2 (1 + epsilon cos(Omega t)) q^2/2``, period ``2 pi / Omega``."""
        if Omega <= 0:
            raise ValueError(f"driving frequency must be positive, got {Omega}")

        def B(t):
            return np.diag([1.0, omega0**2 * (1 + epsilon * math.cos(Omega * t))])

        return cls(1, B, 2 * math.pi / Omega, "mathieu")

    def check(self, samples=16):
        """Max symmetry and periodicity defects of ``B`` on sample times."""
        worst = 0.0
        for t in np.linspace(0, self.period, samples, endpoint=False):
            b = np.asarray(self.B(t), dtype=float)
            worst = max(
                worst,
                float(np.max(np.abs(b - b.T))),
                float(np.max(np.abs(np.asarray(self.B(t + self.period)) - b))),
            )
        return worst


def _rk4(ham, t0, t1, steps):
    J = symplectic_form(ham.n_modes)
    h = (t1 - t0) / steps
    S = np.eye(2 * ham.n_modes)

    def f(t, X):
        return J @ (np.asarray(ham.B(t), dtype=float) @ X)

    t = t0
    for i in range(steps):
        k1 = f(t, S)
        k2 = f(t + h / 2, S + h / 2 * k1)
        k3 = f(t + h / 2, S + h / 2 * k2)
        k4 = f(t + h, S + h * k3)
        S = S + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * h
    return S


def propagate(ham, t0, t1, steps=1024, max_steps=MAX_STEPS):
    """Symplectic propagator ``S(t1)`` with ``S(t0) = I`` (classical RK4).

    The step count doubles until ``|S^T J S - J|`` is at most ``1e-9``.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if t1 == t0:
        return np.eye(2 * ham.n_modes)
    while True:
        S = _rk4(ham, t0, t1, steps)
        res = symplectic_residual(S)
        if res <= SYMPLECTIC_TOL:
            return S
        if 2 * steps > max_steps:
            raise NumericalAccuracyError(
                f"symplectic residual {res:.3e} after {steps} steps exceeds {SYMPLECTIC_TOL:g}"
            )
        steps *= 2


def _pair_traces(S):
    """``lam + 1/lam`` per reciprocal eigenvalue pair, one entry per pair."""
    w = np.linalg.eigvals(S)
    t = w + 1 / w
    order = np.lexsort((t.imag, t.real))
    return t[order][::2]


def _label(trace):
    if abs(trace.imag) > TRACE_TOL:
        return "hyperbolic"
    a = abs(trace.real)
    if a < 2 - TRACE_TOL:
        return "elliptic"
    if a > 2 + TRACE_TOL:
        return "hyperbolic"
    return "parabolic"


def classify_conjugacy(S):
    """Stability label per eigenvalue pair: elliptic, hyperbolic or parabolic.

    For one mode this is the trace test ``|tr S| <, >, = 2``; with more modes
    each reciprocal pair ``(lam, 1/lam)`` is tested through ``lam + 1/lam``.
    """
    S = np.asarray(S, dtype=float)
    res = symplectic_residual(S)
    if res > SYMPLECTIC_TOL:
        raise NonSymplecticError(f"matrix is not symplectic: residual {res:.3e}", res)
    if S.shape == (2, 2):
        return (_label(complex(np.trace(S))),)
    return tuple(_label(t) for t in _pair_traces(S))


def quasi_phases(S, period):
    """``phi = -arg(f) / T`` folded into ``(-pi/T, pi/T]`` for unit-circle eigenvalues."""
    w = np.linalg.eigvals(S)
    w = w[np.abs(np.abs(w) - 1) <= UNIT_CIRCLE_TOL]
    phi = -np.angle(w) / period
    phi = np.where(phi <= -math.pi / period, phi + 2 * math.pi / period, phi)
    return np.sort(phi)


def spectral_distance(a, b):
    """Bottleneck distance: min over pairings of the max ``|a_i - b_j|``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("spectra must have equal size")
    dist = np.abs(a[:, None] - b[None, :])
    candidates = np.unique(dist)
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        match = maximum_bipartite_matching(csr_matrix(dist <= candidates[mid]), perm_type="column")
        if np.all(match >= 0):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def invariant_spectrum_check(ham, t_samples, steps=1024):
    """Max spectral distance between ``S(t) S_T S(t)^{-1}`` and ``S_T`` over samples."""
    t_samples = [float(t) for t in t_samples]
    if any(t < 0 or t > ham.period for t in t_samples):
        raise ValueError("sample times must lie in [0, T]")
    S_T = propagate(ham, 0.0, ham.period, steps)
    reference = np.linalg.eigvals(S_T)

    def distance(t):
        S = propagate(ham, 0.0, t, steps)
        cond = np.linalg.cond(S)
        if cond > COND_LIMIT:
            raise NumericalAccuracyError(f"S({t:g}) is ill-conditioned: cond {cond:.3e}")
        M = np.linalg.solve(S.T, (S @ S_T).T).T
        return spectral_distance(np.linalg.eigvals(M), reference)

    return max(ordered_map(distance, t_samples), default=0.0)


@dataclass(frozen=True, eq=False)
class MonodromyReport:
    S_T: np.ndarray
    period: float
    eigenvalues: np.ndarray
    phases: np.ndarray
    conjugacy: tuple
    symplectic_residual: float
    invariance_residual: float


def monodromy(ham, steps=1024, samples=8):
    """One-period propagator with phases, labels and residuals.

    The invariance residual uses ``samples`` equally spaced times in
    ``[0, T)``; ``samples=0`` skips it and reports NaN.
    """
    S_T = propagate(ham, 0.0, ham.period, steps)
    times = np.linspace(0.0, ham.period, samples, endpoint=False) if samples else []
    inv = invariant_spectrum_check(ham, times, steps) if samples else float("nan")
    return MonodromyReport(
        S_T=S_T,
        period=ham.period,
        eigenvalues=np.linalg.eigvals(S_T),
        phases=quasi_phases(S_T, ham.period),
        conjugacy=classify_conjugacy(S_T),
        symplectic_residual=symplectic_residual(S_T),
        invariance_residual=inv,
    )


def _real_log(S):
    """Real logarithm of a diagonalizable symplectic ``S`` with unit-modulus spectrum.

    Eigenvalues at -1 sit on the branch cut; their eigenvectors are split by
    the sign of the Krein form ``-i v^H J v`` so that the logarithm is real
    (positive sign takes ``+i pi``).
    """
    n = S.shape[0] // 2
    J = symplectic_form(n)
    w, V = np.linalg.eig(S)
    theta = np.angle(w)
    cut = np.abs(w + 1) < 1e-6
    if cut.any():
        m = int(cut.sum())
        _, sv, vh = np.linalg.svd(S + np.eye(2 * n))
        if sv[-m] > 1e-6:
            raise NoPrincipalLogError("eigenvalue -1 is not semisimple (parabolic shear block)")
        basis = vh[-m:].conj().T
        krein, W = np.linalg.eigh(-1j * basis.conj().T @ J @ basis)
        if np.any(np.abs(krein) < 1e-8):
            raise NoPrincipalLogError("degenerate Krein form at eigenvalue -1")
        V = V.astype(complex)
        V[:, cut] = basis @ W
        theta[cut] = np.pi * np.sign(krein)
    logw = np.log(np.abs(w)) + 1j * theta
    L = V @ np.diag(logw) @ np.linalg.inv(V)
    return L.real


def effective_hamiltonian(report):
    """Symmetric ``B_ef`` with ``S_T = expm(T J B_ef)`` on the principal branch."""
    if "hyperbolic" in report.conjugacy:
        raise NoPrincipalLogError(
            f"monodromy has hyperbolic blocks {report.conjugacy}; no real principal logarithm"
        )
    S_T = report.S_T
    n = S_T.shape[0] // 2
    J = symplectic_form(n)
    L = _real_log(S_T)
    B = -J @ L / report.period
    B = (B + B.T) / 2
    err = float(np.max(np.abs(expm(report.period * J @ B) - S_T)))
    if err > 1e-9:
        raise NoPrincipalLogError(
            f"principal logarithm round trip fails (error {err:.3e}); "
            f"conjugacy {report.conjugacy}"
        )
    return B
