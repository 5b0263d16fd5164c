r"""Multidimensional Hermite polynomials :math:`H_n^{R}(y)`.

Convention (generating function)::

    exp(-1/2 a^T R a + a^T R y) = sum_n H_n^{R}(y) a^n / n!

which gives the raising recurrence

    H_{n+e_k} = (R y)_k H_n - sum_j R_kj n_j H_{n-e_j},   H_0 = 1.

For ``D = 1, R = 2, y = x`` this is the physicists' Hermite family.
The recurrence only needs ``R`` and the linear coefficient ``b = R y``, so a
spec may be given by ``b`` directly when ``y`` itself is undefined.
"""

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ResourceLimitError

MAX_LATTICE_ENTRIES = 1 << 23
SERIES_MAX_ORDER = 12


@dataclass(frozen=True, eq=False)
class HermiteSpec:
    """Complex symmetric ``R`` and either ``y`` or the linear term ``b = R y``."""

    R: np.ndarray
    y: np.ndarray | None = None
    linear: np.ndarray | None = None

    def __post_init__(self):
        R = np.array(self.R, dtype=complex, ndmin=2)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise ValueError(f"R must be square, got shape {R.shape}")
        scale = max(1.0, float(np.max(np.abs(R))))
        if np.max(np.abs(R - R.T)) > 1e-12 * scale:
            raise ValueError("R must be symmetric")
        dim = R.shape[0]
        y = None if self.y is None else np.array(self.y, dtype=complex, ndmin=1)
        b = None if self.linear is None else np.array(self.linear, dtype=complex, ndmin=1)
        if y is None and b is None:
            raise ValueError("either y or the linear term R y is required")
        for name, v in (("y", y), ("linear", b)):
            if v is not None and v.shape != (dim,):
                raise ValueError(f"{name} must have shape ({dim},), got {v.shape}")
        if b is None:
            b = R @ y
        for arr in (R, y, b):
            if arr is not None:
                arr.flags.writeable = False
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "linear", b)

    @property
    def dim(self):
        return self.R.shape[0]


def _check_index(spec, n):
    n = tuple(int(k) for k in n)
    if len(n) != spec.dim:
        raise ValueError(f"multi-index has dimension {len(n)}, spec has {spec.dim}")
    if any(k < 0 for k in n):
        raise ValueError(f"multi-index entries must be non-negative, got {n}")
    return n


def multi_factorial(n):
    """``n! = n_1! n_2! ... n_D!``."""
    return math.prod(math.factorial(k) for k in n)


def _lattice(R, b, shape, normalized, max_entries):
    dim = len(shape)
    size = math.prod(shape)
    if size > max_entries:
        raise ResourceLimitError(
            f"Hermite lattice of shape {shape} has {size} entries, "
            f"exceeding the budget of {max_entries}"
        )
    table = np.zeros(size, dtype=complex)
    table[0] = 1.0
    if size == 1:
        return table.reshape(shape)

    itype = np.int16 if max(shape) < 2**15 else np.int64
    idx = np.indices(shape, dtype=itype).reshape(dim, -1).T
    strides = np.array([math.prod(shape[j + 1:]) for j in range(dim)], dtype=np.int64)
    levels = idx.sum(axis=1, dtype=np.int64)
    order = np.argsort(levels, kind="stable")
    bounds = np.cumsum(np.bincount(levels))

    for level in range(1, len(bounds)):
        rows = order[bounds[level - 1]:bounds[level]]
        n = idx[rows].astype(np.int64)
        m = np.arange(len(rows))
        # raise along the first non-zero axis; all parents sit one level down
        k = np.argmax(n > 0, axis=1)
        parent = n.copy()
        parent[m, k] -= 1
        parent_flat = rows - strides[k]
        val = b[k] * table[parent_flat]
        for j in range(dim):
            sel = parent[:, j] > 0
            if not sel.any():
                continue
            nj = parent[sel, j]
            weight = np.sqrt(nj) if normalized else nj
            val[sel] -= R[k[sel], j] * weight * table[parent_flat[sel] - strides[j]]
        if normalized:
            val /= np.sqrt(n[m, k])
        table[rows] = val
    return table.reshape(shape)


def hermite_eval(spec, n, max_entries=MAX_LATTICE_ENTRIES):
    """Value of ``H_n^{R}(y)`` for one multi-index via the raising recurrence."""
    n = _check_index(spec, n)
    shape = tuple(k + 1 for k in n)
    return complex(_lattice(spec.R, spec.linear, shape, False, max_entries)[n])


def hermite_batch(spec, cutoff, normalized=False, max_entries=MAX_LATTICE_ENTRIES):
    """All ``H_n`` with every entry of ``n`` at most ``cutoff``.

    Returns a complex array of shape ``(cutoff + 1,) * D`` indexed by the
    multi-index. Entries are filled level by level in total order, each once.
    With ``normalized=True`` the table holds ``H_n / sqrt(n!)``, which stays
    bounded where ``H_n`` and ``n!`` would both overflow.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    shape = (int(cutoff) + 1,) * spec.dim
    return _lattice(spec.R, spec.linear, shape, normalized, max_entries)


# -- independent oracle: truncated multinomial expansion of the generating function


def _poly_mul(a, b, cap, max_degree):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if sum(e) > max_degree or any(x > c for x, c in zip(e, cap)):
                continue
            out[e] = out.get(e, 0) + ca * cb
    return out


def _exp_series(spec, cap, max_terms, max_degree):
    dim = spec.dim
    R = spec.R
    unit = [tuple(int(i == j) for i in range(dim)) for j in range(dim)]
    # exponent polynomial: -1/2 a^T R a + a^T b
    poly = {}
    for i in range(dim):
        if cap[i] >= 1:
            poly[unit[i]] = poly.get(unit[i], 0) + complex(spec.linear[i])
        for j in range(dim):
            e = tuple(x + y for x, y in zip(unit[i], unit[j]))
            if all(x <= c for x, c in zip(e, cap)):
                poly[e] = poly.get(e, 0) - 0.5 * complex(R[i, j])
    zero = (0,) * dim
    total = {zero: 1 + 0j}
    power = {zero: 1 + 0j}
    for k in range(1, max_terms + 1):
        power = _poly_mul(power, poly, cap, max_degree)
        inv = 1.0 / math.factorial(k)
        for e, c in power.items():
            total[e] = total.get(e, 0) + c * inv
    return total


def hermite_series_oracle(spec, n, max_terms=None):
    """``H_n^{R}(y)`` from the coefficient of ``a^n`` in the expanded generating function.

    Every monomial of the exponent has degree >= 1, so ``|n|`` series terms
    already contain every contribution to ``a^n``.
    """
    n = _check_index(spec, n)
    order = sum(n)
    if order > SERIES_MAX_ORDER:
        raise ValueError(f"series oracle limited to order {SERIES_MAX_ORDER}, got {order}")
    terms = order if max_terms is None else int(max_terms)
    coeffs = _exp_series(spec, n, terms, order)
    return complex(coeffs.get(n, 0) * multi_factorial(n))


def hermite_series_table(spec, order):
    """Series-oracle values for every multi-index of total order <= ``order``."""
    if order > SERIES_MAX_ORDER:
        raise ValueError(f"series oracle limited to order {SERIES_MAX_ORDER}, got {order}")
    coeffs = _exp_series(spec, (order,) * spec.dim, order, order)
    out = {}
    for n in product(range(order + 1), repeat=spec.dim):
        if sum(n) <= order:
            out[n] = complex(coeffs.get(n, 0) * multi_factorial(n))
    return out
