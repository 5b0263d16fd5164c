r"""Photon-number distributions of Gaussian states via Hermite polynomials.

For a state with dispersion ``M`` and mean quadratures ``Q``::

    P_n = P_0 H_{(n,n)}^{R}(y) / n!
    P_0 = det(M + I/2)^{-1/2} exp(-Q^T (2M + I)^{-1} Q)

with the fixed unitary ``U = [[-iI, iI], [I, I]] / sqrt(2)``. The matrix
``R`` is pinned by oracle tests to::

    R   = U^dagger (I - 2M)(I + 2M)^{-1} U^*
    R y = 2 U^dagger (I + 2M)^{-1} Q

The second line equals ``R`` applied to ``y = 2 U^T (I - 2M)^{-1} Q`` whenever
``I - 2M`` is invertible, and stays finite when it is not (pure states), so
the default variant works with the linear term directly.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import hermite
from .errors import (
    CutoffCapExceeded,
    NumericalAccuracyError,
    SingularityError,
)
from .gaussian_state import mean_photon_number, reduced_state, validate

DEFAULT_VARIANT = "regularized"
IMAG_TOL = 1e-10
NEGATIVE_TOL = 1e-12
SUM_TOL = 1e-9
DEFAULT_CAP = 256
SINGULAR_RCOND = 1e-12


def unitary_u(n_modes):
    eye = np.eye(n_modes)
    return np.block([[-1j * eye, 1j * eye], [eye, eye]]) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class HermiteArguments:
    R: np.ndarray
    y: np.ndarray | None
    linear: np.ndarray
    U: np.ndarray
    variant_id: str

    def spec(self):
        return hermite.HermiteSpec(self.R, self.y, self.linear)


def _describe(state):
    if np.allclose(state.disp, np.eye(2 * state.n_modes) / 2, atol=1e-12):
        return "vacuum" if not np.any(state.mean) else "coherent"
    return "general"


def _solve_or_raise(A, rhs, name, state):
    if np.linalg.cond(A) * SINGULAR_RCOND > 1:
        raise SingularityError(
            f"{name} is singular for this state (family: {_describe(state)}); "
            f"condition number {np.linalg.cond(A):.3e}"
        )
    return np.linalg.solve(A, rhs)


def _core(state):
    n = state.n_modes
    eye = np.eye(2 * n)
    M = state.disp
    U = unitary_u(n)
    plus_inv = np.linalg.inv(eye + 2 * M)
    K = (eye - 2 * M) @ plus_inv
    R = U.conj().T @ K @ U.conj()
    return eye, M, U, plus_inv, (R + R.T) / 2


def _regularized(state):
    eye, M, U, plus_inv, R = _core(state)
    Q = state.mean
    linear = 2 * U.conj().T @ plus_inv @ Q
    y = None
    minus = eye - 2 * M
    if np.linalg.cond(minus) * SINGULAR_RCOND <= 1:
        y = 2 * U.T @ np.linalg.solve(minus, Q)
    return HermiteArguments(R, y, linear, U, "regularized")


def _literal(state):
    eye, M, U, _, R = _core(state)
    y = 2 * U.T @ _solve_or_raise(eye - 2 * M, state.mean, "(I - 2M)", state)
    return HermiteArguments(R, y, R @ y, U, "literal")


def _doubled(state):
    args = _regularized(state)
    return HermiteArguments(2 * args.R, None, args.linear, args.U, "doubled")


def _sign_flipped(state):
    args = _regularized(state)
    return HermiteArguments(-args.R, None, args.linear, args.U, "sign_flipped")


def _plus_argument(state):
    eye, M, U, plus_inv, R = _core(state)
    y = 2 * U.T @ plus_inv @ state.mean
    return HermiteArguments(R, y, R @ y, U, "plus_argument")


VARIANTS = {
    "regularized": _regularized,
    "literal": _literal,
    "doubled": _doubled,
    "sign_flipped": _sign_flipped,
    "plus_argument": _plus_argument,
}


def build_hermite_args(state, variant=DEFAULT_VARIANT):
    """``(R, y)`` for the requested construction; see ``VARIANTS``.

    Only ``regularized`` reproduces the oracle suite. ``literal`` inverts
    ``I - 2M`` as written and raises :class:`SingularityError` for pure
    vacuum-like dispersions; the rest are kept as documented failures.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {sorted(VARIANTS)}")
    validate(state).raise_if_invalid()
    return VARIANTS[variant](state)


def prob_zero(state):
    validate(state).raise_if_invalid()
    n = state.n_modes
    eye = np.eye(2 * n)
    sign, logdet = np.linalg.slogdet(state.disp + eye / 2)
    if sign <= 0:
        raise NumericalAccuracyError("det(M + I/2) is not positive")
    Q = state.mean
    quad = Q @ np.linalg.solve(2 * state.disp + eye, Q)
    return float(np.exp(-0.5 * logdet - quad))


@dataclass(frozen=True, eq=False)
class PhotonDistribution:
    """Probabilities ``probs[n_1, ..., n_N]`` for every ``n_j <= cutoff``."""

    n_modes: int
    cutoff: int
    probs: np.ndarray
    tail_mass: float
    p0: float
    variant_id: str

    def rows(self):
        """``(n, probability)`` pairs in lexicographic order of ``n``."""
        for n in product(range(self.cutoff + 1), repeat=self.n_modes):
            yield n, float(self.probs[n])


def pnd(state, cutoff=None, tail_tol=1e-9, variant=DEFAULT_VARIANT):
    """Photon-number distribution truncated at ``cutoff`` photons per mode.

    When ``cutoff`` is None it is chosen by :func:`adaptive_cutoff`.
    """
    if cutoff is None:
        cutoff = adaptive_cutoff(state, tail_tol)
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    cutoff = int(cutoff)
    args = build_hermite_args(state, variant)
    p0 = prob_zero(state)
    table = hermite.hermite_batch(args.spec(), cutoff, normalized=True)

    n = state.n_modes
    grid = tuple(np.indices((cutoff + 1,) * n))
    # normalized table holds H_m / sqrt(m!); for m = (n, n) that is H / n!
    diag = p0 * table[grid + grid]
    scale = max(1.0, float(np.max(np.abs(diag.real))))
    imag = float(np.max(np.abs(diag.imag)))
    if imag > IMAG_TOL * scale:
        raise NumericalAccuracyError(
            f"imaginary residue {imag:.3e} in probabilities (variant {args.variant_id!r})"
        )
    probs = diag.real
    lowest = float(probs.min())
    if lowest < -NEGATIVE_TOL:
        raise NumericalAccuracyError(
            f"negative probability {lowest:.3e} (variant {args.variant_id!r})"
        )
    probs = np.clip(probs, 0.0, None)
    total = float(probs.sum())
    if total > 1 + SUM_TOL:
        raise NumericalAccuracyError(
            f"probabilities sum to {total:.17g} > 1 (variant {args.variant_id!r})"
        )
    probs.flags.writeable = False
    return PhotonDistribution(n, cutoff, probs, max(0.0, 1.0 - total), p0, args.variant_id)


def mean_from_pnd(dist, j, max_tail=1e-6):
    """``sum_n n_j P_n`` over the truncated lattice (mode ``j`` is 0-based)."""
    if not 0 <= j < dist.n_modes:
        raise IndexError(f"mode index {j} out of range for {dist.n_modes} modes")
    if dist.tail_mass > max_tail:
        raise NumericalAccuracyError(
            f"tail mass {dist.tail_mass:.3e} exceeds {max_tail:g}; raise the cutoff"
        )
    counts = np.arange(dist.cutoff + 1)
    marginal = dist.probs.sum(axis=tuple(a for a in range(dist.n_modes) if a != j))
    return float(counts @ marginal)


def _geometric_guess(nbar, tol):
    if nbar <= 0:
        return 4
    ratio = nbar / (1 + nbar)
    return int(np.ceil(np.log(tol) / np.log(ratio)))


def adaptive_cutoff(state, tail_tol=1e-9, cap=DEFAULT_CAP):
    """Smallest per-mode cutoff whose summed single-mode tails are ``<= tail_tol``.

    The search window starts from a geometric tail bound at each mode's mean
    photon number and widens to ``cap``. Tails are measured on the marginal
    distributions, which upper-bound the joint tail by the union bound.
    """
    if not 0 < tail_tol < 1:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    n = state.n_modes
    nbars = [mean_photon_number(state, j) for j in range(n)]
    guess = max(_geometric_guess(nb, tail_tol / n) for nb in nbars)
    windows = [w for w in (min(cap, 2 * guess + 8), cap) if w >= 0]
    for window in dict.fromkeys(windows):
        tails = np.zeros(window + 1)
        for j in range(n):
            marginal = pnd(reduced_state(state, [j]), cutoff=window)
            tails += np.clip(1.0 - np.cumsum(marginal.probs), 0.0, None)
        ok = np.flatnonzero(tails <= tail_tol)
        if ok.size:
            return int(ok[0])
    raise CutoffCapExceeded(
        f"tail tolerance {tail_tol:g} not reached below cutoff cap {cap}; "
        "pass a larger cap"
    )
