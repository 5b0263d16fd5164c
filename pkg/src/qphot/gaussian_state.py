r"""Multimode Gaussian states in the (p, q) quadrature ordering.

A state of ``N`` modes is a mean vector ``(p_1..p_N, q_1..q_N)`` together with
the symmetric ``2N x 2N`` dispersion matrix of symmetrized second moments,
in dimensionless units with :math:`\hbar = 1`. The vacuum has dispersion
``I/2``.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import InvalidStateError, NonSymplecticError

SYMMETRY_RTOL = 1e-12
UNCERTAINTY_TOL = 1e-10
SYMPLECTIC_TOL = 1e-9


def symplectic_form(n_modes):
    """Canonical form ``J = [[0, -I], [I, 0]]`` for the (p, q) ordering.

    With this choice Hamilton's equations read ``dQ/dt = J grad H`` and the
    commutators are ``[Q_a, Q_b] = i J_ab``.
    """
    if n_modes < 1:
        raise InvalidStateError(f"number of modes must be >= 1, got {n_modes}")
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, -eye], [eye, zero]])


def symplectic_residual(S):
    """Max-abs residual of ``S^T J S - J``."""
    S = np.asarray(S, dtype=float)
    J = symplectic_form(S.shape[0] // 2)
    return float(np.max(np.abs(S.T @ J @ S - J)))


def random_symplectic(n_modes, rng, scale=0.5):
    """Random element of Sp(2N, R) as ``expm(J K)`` for a random symmetric ``K``."""
    A = rng.normal(scale=scale, size=(2 * n_modes, 2 * n_modes))
    return expm(symplectic_form(n_modes) @ (A + A.T) / 2)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean quadratures and dispersion matrix of an ``N``-mode Gaussian state.

    Instances are immutable: the arrays are copied and flagged read-only.
    Physicality is not enforced here, use :func:`validate` for that.
    """

    n_modes: int
    mean: np.ndarray
    disp: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.n_modes
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidStateError(f"number of modes must be a positive integer, got {n!r}")
        mean = np.array(self.mean, dtype=float)
        disp = np.array(self.disp, dtype=float)
        if mean.shape != (2 * n,):
            raise InvalidStateError(f"mean must have shape ({2 * n},), got {mean.shape}")
        if disp.shape != (2 * n, 2 * n):
            raise InvalidStateError(f"disp must have shape ({2 * n}, {2 * n}), got {disp.shape}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(disp))):
            raise InvalidStateError("mean and disp must be finite")
        scale = max(1.0, float(np.max(np.abs(disp))))
        if np.max(np.abs(disp - disp.T)) > SYMMETRY_RTOL * scale:
            raise InvalidStateError("disp is not symmetric")
        mean.flags.writeable = False
        disp.flags.writeable = False
        object.__setattr__(self, "n_modes", int(n))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "disp", disp)

    def to_dict(self):
        return {
            "n_modes": self.n_modes,
            "mean": self.mean.tolist(),
            "disp": self.disp.tolist(),
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls(int(doc["n_modes"]), doc["mean"], doc["disp"])
        except (KeyError, TypeError) as exc:
            raise InvalidStateError(f"malformed state document: {exc}") from exc

    def mode_indices(self, j):
        """Positions of ``p_j`` and ``q_j`` in the quadrature vector."""
        if not 0 <= j < self.n_modes:
            raise IndexError(f"mode index {j} out of range for {self.n_modes} modes")
        return j, j + self.n_modes


def load_state(path):
    with open(path, encoding="utf-8") as fh:
        return GaussianState.from_dict(json.load(fh))


def dump_state(state, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state.to_dict(), fh)
        fh.write("\n")


def make_vacuum(n_modes):
    if not isinstance(n_modes, (int, np.integer)) or n_modes < 1:
        raise InvalidStateError(f"number of modes must be >= 1, got {n_modes!r}")
    return GaussianState(n_modes, np.zeros(2 * n_modes), np.eye(2 * n_modes) / 2)


def make_coherent(alphas):
    """Coherent state with amplitudes ``alphas``: ``p = sqrt(2) Im a``, ``q = sqrt(2) Re a``."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    if alphas.ndim != 1 or alphas.size < 1:
        raise InvalidStateError("need at least one coherent amplitude")
    n = alphas.size
    mean = np.sqrt(2) * np.concatenate([alphas.imag, alphas.real])
    return GaussianState(n, mean, np.eye(2 * n) / 2)


def make_thermal(nbars):
    nbars = np.atleast_1d(np.asarray(nbars, dtype=float))
    if nbars.ndim != 1 or nbars.size < 1:
        raise InvalidStateError("need at least one mean occupation")
    if np.any(nbars < 0) or not np.all(np.isfinite(nbars)):
        raise InvalidStateError(f"mean occupations must be finite and >= 0, got {nbars.tolist()}")
    variances = np.concatenate([nbars, nbars]) + 0.5
    return GaussianState(nbars.size, np.zeros(2 * nbars.size), np.diag(variances))


def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def make_squeezed_vacuum(r, phi=0.0):
    """Single-mode squeezed vacuum; ``phi = 0`` stretches ``p`` by ``e^r``."""
    if not (np.isfinite(r) and np.isfinite(phi)):
        raise InvalidStateError("squeezing parameters must be finite")
    rot = _rotation(phi / 2)
    disp = 0.5 * rot @ np.diag([np.exp(2 * r), np.exp(-2 * r)]) @ rot.T
    return GaussianState(1, np.zeros(2), (disp + disp.T) / 2)


def product_state(*states):
    """Tensor product of independent states, re-ordered into (p..., q...)."""
    if not states:
        raise InvalidStateError("product of zero states")
    n_total = sum(s.n_modes for s in states)
    mean = np.zeros(2 * n_total)
    disp = np.zeros((2 * n_total, 2 * n_total))
    offset = 0
    for s in states:
        n = s.n_modes
        src = np.arange(2 * n)
        dst = np.where(src < n, offset + src, n_total + offset + src - n)
        mean[dst] = s.mean
        disp[np.ix_(dst, dst)] = s.disp
        offset += n
    return GaussianState(n_total, mean, disp)


def reduced_state(state, modes):
    """Marginal state of the listed modes (in the given order)."""
    modes = list(modes)
    idx = [m for m in modes] + [m + state.n_modes for m in modes]
    for m in modes:
        state.mode_indices(m)
    return GaussianState(len(modes), state.mean[idx], state.disp[np.ix_(idx, idx)])


def symplectic_eigenvalues(disp):
    """Sorted symplectic eigenvalues: moduli of the eigenvalue pairs of ``J disp``."""
    disp = np.asarray(disp, dtype=float)
    J = symplectic_form(disp.shape[0] // 2)
    moduli = np.sort(np.abs(np.linalg.eigvals(J @ disp)))
    return moduli[::2]


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    symmetry_residual: float
    min_symplectic_eigenvalue: float
    violations: tuple = ()

    def raise_if_invalid(self):
        if not self.ok:
            raise InvalidStateError("; ".join(self.violations))


def validate(state):
    """Check symmetry and the uncertainty relation ``disp + (i/2) J >= 0``."""
    disp = state.disp
    scale = max(1.0, float(np.max(np.abs(disp))))
    sym_res = float(np.max(np.abs(disp - disp.T))) / scale
    nu_min = float(symplectic_eigenvalues(disp)[0])
    violations = []
    if sym_res > SYMMETRY_RTOL:
        violations.append(f"symmetry: residual {sym_res:.3e} exceeds {SYMMETRY_RTOL:g}")
    if nu_min < 0.5 - UNCERTAINTY_TOL:
        violations.append(
            f"uncertainty: minimum symplectic eigenvalue {nu_min:.17g} is below 1/2"
        )
    # J disp has +-i nu pairs only for positive-definite disp
    if np.linalg.eigvalsh((disp + disp.T) / 2)[0] <= 0:
        violations.append("positivity: disp is not positive definite")
    return ValidityReport(not violations, sym_res, nu_min, tuple(violations))


def apply_symplectic(state, S, d=None):
    """Transform ``mean -> S mean + d`` and ``disp -> S disp S^T``."""
    S = np.asarray(S, dtype=float)
    dim = 2 * state.n_modes
    if S.shape != (dim, dim):
        raise InvalidStateError(f"S must have shape ({dim}, {dim}), got {S.shape}")
    res = symplectic_residual(S)
    if res > SYMPLECTIC_TOL:
        raise NonSymplecticError(f"S is not symplectic: residual {res:.3e}", res)
    d = np.zeros(dim) if d is None else np.asarray(d, dtype=float)
    if d.shape != (dim,):
        raise InvalidStateError(f"displacement must have shape ({dim},), got {d.shape}")
    disp = S @ state.disp @ S.T
    return GaussianState(state.n_modes, S @ state.mean + d, (disp + disp.T) / 2)


def mean_photon_number(state, j):
    """Mean photon number of mode ``j`` (0-based) from first and second moments."""
    ip, iq = state.mode_indices(j)
    sigma = state.disp
    mu = state.mean
    return 0.5 * (sigma[ip, ip] + sigma[iq, iq] - 1.0) + 0.5 * (mu[ip] ** 2 + mu[iq] ** 2)


def purity(state):
    """``Tr rho^2 = (2^{2N} det disp)^{-1/2}``."""
    sign, logdet = np.linalg.slogdet(state.disp)
    if sign <= 0:
        raise InvalidStateError("dispersion matrix has non-positive determinant")
    return float(np.exp(-0.5 * (2 * state.n_modes * np.log(2.0) + logdet)))
