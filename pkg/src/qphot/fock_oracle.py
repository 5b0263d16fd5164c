"""Brute-force photon-number probabilities used as ground truth.

Probabilities are phase-space overlaps ``P_n = (2 pi)^N * integral(W_rho W_n)`` of the
Gaussian Wigner function with Fock-state Wigner functions, integrated with
the trapezoidal rule on a square grid. Everything here is deliberately
independent of :mod:`qphot.hermite`.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._parallel import ordered_map
from .errors import InvalidStateError, NumericalAccuracyError, ResourceLimitError

MASS_TOL = 1e-9
SINGLE_MODE_POINTS = 256
TWO_MODE_POINTS = 64
TWO_MODE_MAX_POINTS = 128
TWO_MODE_MAX_ORDER = 8
WIDTH_SIGMAS = 7.0


@dataclass(frozen=True)
class QuadratureGrid:
    half_width: float
    points_per_axis: int

    def __post_init__(self):
        if self.half_width <= 0 or self.points_per_axis < 3:
            raise ValueError("grid needs a positive half width and at least 3 points")

    @classmethod
    def for_state(cls, state, points_per_axis):
        sigma = math.sqrt(float(np.linalg.eigvalsh(state.disp)[-1]))
        shift = float(np.max(np.abs(state.mean)))
        return cls(WIDTH_SIGMAS * sigma + shift, points_per_axis)

    def axis(self):
        return np.linspace(-self.half_width, self.half_width, self.points_per_axis)

    def weights(self):
        h = 2 * self.half_width / (self.points_per_axis - 1)
        w = np.full(self.points_per_axis, h)
        w[[0, -1]] = h / 2
        return w

    def refined(self):
        return QuadratureGrid(self.half_width, 2 * self.points_per_axis - 1)

    def coarser(self):
        return QuadratureGrid(self.half_width, max(3, (3 * self.points_per_axis) // 4))


class OracleEstimate(NamedTuple):
    value: float
    error: float


def _laguerre_all(n_max, x):
    """``L_0(x) .. L_{n_max}(x)`` by the upward three-term recurrence."""
    out = np.empty((n_max + 1,) + np.shape(x))
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def _fock_wigner_all(n_max, p, q):
    r2 = p * p + q * q
    signs = np.where(np.arange(n_max + 1) % 2, -1.0, 1.0)
    signs = signs.reshape((-1,) + (1,) * np.ndim(r2))
    return signs / np.pi * _laguerre_all(n_max, 2 * r2) * np.exp(-r2)


def fock_wigner(n, p, q):
    """Wigner function of the Fock state ``|n>``: ``(-1)^n / pi L_n(2 r^2) e^{-r^2}``."""
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return _fock_wigner_all(int(n), p, q)[n]


def gaussian_wigner(state, points):
    """Normalized Wigner function at ``points`` of shape ``(..., 2N)``."""
    n = state.n_modes
    x = np.asarray(points, dtype=float) - state.mean
    inv = np.linalg.inv(state.disp)
    quad = np.einsum("...a,ab,...b->...", x, inv, x)
    norm = (2 * np.pi) ** n * math.sqrt(np.linalg.det(state.disp))
    return np.exp(-0.5 * quad) / norm


def _single_mode_overlaps(state, n_max, grid):
    axis = grid.axis()
    w = grid.weights()
    P, Q = np.meshgrid(axis, axis, indexing="ij")
    wrho = gaussian_wigner(state, np.stack([P, Q], axis=-1))
    weights = np.outer(w, w)
    mass = float(np.sum(wrho * weights))
    fock = _fock_wigner_all(n_max, P, Q)
    values = 2 * np.pi * np.sum(fock * (wrho * weights), axis=(1, 2))
    return values, mass


def oracle_pnd_single_mode_range(state, n_max, grid=None):
    """Oracle probabilities for ``n = 0..n_max`` with grid-refinement error bars.

    The error of each value is the change when the grid spacing is halved.
    """
    if state.n_modes != 1:
        raise InvalidStateError("single-mode oracle needs a one-mode state")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    grid = grid or QuadratureGrid.for_state(state, SINGLE_MODE_POINTS)
    values, mass = _single_mode_overlaps(state, n_max, grid)
    if mass < 1 - MASS_TOL:
        raise NumericalAccuracyError(
            f"grid of half width {grid.half_width:g} holds only {mass:.12f} of the state"
        )
    fine, _ = _single_mode_overlaps(state, n_max, grid.refined())
    return fine, np.abs(fine - values)


def oracle_pnd_single_mode(state, n, grid=None):
    values, errors = oracle_pnd_single_mode_range(state, n, grid)
    return OracleEstimate(float(values[n]), float(errors[n]))


def closed_form_thermal(nbar, n):
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    return (1 / (1 + nbar)) * (nbar / (1 + nbar)) ** n


def closed_form_coherent(alpha_sq, n):
    if alpha_sq < 0:
        raise ValueError(f"|alpha|^2 must be >= 0, got {alpha_sq}")
    if alpha_sq == 0:
        return float(n == 0)
    return math.exp(-alpha_sq + n * math.log(alpha_sq) - math.lgamma(n + 1))


def closed_form_squeezed_vacuum(r, n):
    if n % 2:
        return 0.0
    k = n // 2
    t = math.tanh(r)
    return math.comb(2 * k, k) * t ** (2 * k) / (4**k * math.cosh(r))


def _two_mode_table(state, c1, c2, grid):
    axis = grid.axis()
    w = grid.weights()
    P, Q = np.meshgrid(axis, axis, indexing="ij")
    fock1 = _fock_wigner_all(c1, P, Q)  # (n1, p1, q1)
    fock2 = _fock_wigner_all(c2, P, Q)  # (n2, p2, q2)
    # ordering (p1, p2, q1, q2); each row fixes p1
    p2, q1, q2 = np.meshgrid(axis, axis, axis, indexing="ij")
    w3 = w[:, None, None] * w[None, :, None] * w[None, None, :]

    def row(i):
        pts = np.stack([np.full_like(p2, axis[i]), p2, q1, q2], axis=-1)
        wrho = gaussian_wigner(state, pts) * w3 * w[i]
        # sum over (p2, q1, q2): wrho[b, a, c] * fock1[n1, i, a] * fock2[n2, b, c]
        partial = np.einsum("bac,mbc->am", wrho, fock2)
        return np.einsum("la,am->lm", fock1[:, i, :], partial), float(wrho.sum())

    rows = ordered_map(row, range(len(axis)))
    # exact-rounded reduction: independent of worker count and row order
    stacked = np.stack([r[0] for r in rows])
    table = np.empty((c1 + 1, c2 + 1))
    for a in range(c1 + 1):
        for b in range(c2 + 1):
            table[a, b] = math.fsum(stacked[:, a, b])
    mass = math.fsum(r[1] for r in rows)
    return (2 * np.pi) ** 2 * table, mass


def oracle_pnd_two_mode_table(state, cutoff, grid=None):
    """Oracle ``P_(n1, n2)`` for ``n1, n2 <= cutoff`` with coarse-grid error bars.

    Error bars compare against a grid with three quarters of the points per axis.
    """
    if state.n_modes != 2:
        raise InvalidStateError("two-mode oracle needs a two-mode state")
    if 2 * cutoff > TWO_MODE_MAX_ORDER:
        raise ValueError(f"two-mode oracle limited to total order {TWO_MODE_MAX_ORDER}")
    grid = grid or QuadratureGrid.for_state(state, TWO_MODE_POINTS)
    if grid.points_per_axis > TWO_MODE_MAX_POINTS:
        raise ResourceLimitError(
            f"{grid.points_per_axis}^4 grid points exceed the limit of {TWO_MODE_MAX_POINTS}^4"
        )
    values, mass = _two_mode_table(state, cutoff, cutoff, grid)
    if mass < 1 - MASS_TOL:
        raise NumericalAccuracyError(
            f"grid of half width {grid.half_width:g} holds only {mass:.12f} of the state"
        )
    coarse, _ = _two_mode_table(state, cutoff, cutoff, grid.coarser())
    return values, np.abs(values - coarse)


def oracle_pnd_two_mode(state, n, grid=None):
    n1, n2 = (int(k) for k in n)
    if n1 < 0 or n2 < 0:
        raise ValueError(f"photon numbers must be >= 0, got {n}")
    if n1 + n2 > TWO_MODE_MAX_ORDER:
        raise ValueError(f"two-mode oracle limited to total order {TWO_MODE_MAX_ORDER}")
    if state.n_modes != 2:
        raise InvalidStateError("two-mode oracle needs a two-mode state")
    grid = grid or QuadratureGrid.for_state(state, TWO_MODE_POINTS)
    if grid.points_per_axis > TWO_MODE_MAX_POINTS:
        raise ResourceLimitError(
            f"{grid.points_per_axis}^4 grid points exceed the limit of {TWO_MODE_MAX_POINTS}^4"
        )
    values, mass = _two_mode_table(state, n1, n2, grid)
    if mass < 1 - MASS_TOL:
        raise NumericalAccuracyError(
            f"grid of half width {grid.half_width:g} holds only {mass:.12f} of the state"
        )
    coarse, _ = _two_mode_table(state, n1, n2, grid.coarser())
    return OracleEstimate(float(values[n1, n2]), float(abs(values[n1, n2] - coarse[n1, n2])))
