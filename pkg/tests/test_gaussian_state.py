import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qphot import gaussian_state as gs
from qphot.errors import InvalidStateError, NonSymplecticError


def test_vacuum_moments():
    s = gs.make_vacuum(1)
    np.testing.assert_array_equal(s.mean, [0, 0])
    np.testing.assert_array_equal(s.disp, np.eye(2) / 2)
    s2 = gs.make_vacuum(2)
    assert s2.mean.shape == (4,)
    np.testing.assert_array_equal(s2.disp, np.eye(4) / 2)
    assert gs.validate(gs.make_vacuum(3)).ok


def test_vacuum_rejects_zero_modes():
    with pytest.raises(InvalidStateError):
        gs.make_vacuum(0)


def test_state_is_immutable():
    s = gs.make_vacuum(1)
    with pytest.raises(ValueError):
        s.disp[0, 0] = 3.0


@pytest.mark.parametrize(
    "alpha, mean",
    [(0, [0, 0]), (1, [0, math.sqrt(2)]), (1j, [math.sqrt(2), 0])],
)
def test_coherent_mean(alpha, mean):
    s = gs.make_coherent([alpha])
    np.testing.assert_allclose(s.mean, mean, atol=1e-15)
    np.testing.assert_array_equal(s.disp, np.eye(2) / 2)


def test_coherent_zero_is_vacuum():
    a, b = gs.make_coherent([0]), gs.make_vacuum(1)
    np.testing.assert_array_equal(a.mean, b.mean)
    np.testing.assert_array_equal(a.disp, b.disp)


def test_thermal():
    np.testing.assert_array_equal(gs.make_thermal([0]).disp, np.eye(2) / 2)
    np.testing.assert_array_equal(gs.make_thermal([1]).disp, np.diag([1.5, 1.5]))
    with pytest.raises(InvalidStateError):
        gs.make_thermal([-0.1])


@pytest.mark.parametrize("nbar", [0, 0.5, 1, 2, 5])
def test_thermal_mean_photon_number(nbar):
    assert abs(gs.mean_photon_number(gs.make_thermal([nbar]), 0) - nbar) <= 1e-12


def test_squeezed_vacuum():
    np.testing.assert_allclose(gs.make_squeezed_vacuum(0, 0).disp, np.eye(2) / 2, atol=1e-15)
    s = gs.make_squeezed_vacuum(1, 0)
    np.testing.assert_allclose(s.disp, np.diag([math.e**2 / 2, math.e**-2 / 2]), rtol=1e-14)
    for r, phi in [(0.3, 0.0), (1.0, 1.3), (2.5, -2.0)]:
        s = gs.make_squeezed_vacuum(r, phi)
        assert abs(np.linalg.det(s.disp) - 0.25) < 1e-12 * math.exp(4 * r)
        assert gs.validate(s).ok


def test_validate_reports():
    rep = gs.validate(gs.make_vacuum(1))
    assert rep.ok and abs(rep.min_symplectic_eigenvalue - 0.5) < 1e-15
    bad = gs.GaussianState(1, [0, 0], np.diag([0.25, 0.25]))
    rep = gs.validate(bad)
    assert not rep.ok
    assert any(v.startswith("uncertainty") for v in rep.violations)
    with pytest.raises(InvalidStateError):
        rep.raise_if_invalid()
    rep = gs.validate(gs.make_thermal([1]))
    assert rep.ok and abs(rep.min_symplectic_eigenvalue - 1.5) < 1e-14


def test_asymmetric_dispersion_rejected():
    with pytest.raises(InvalidStateError):
        gs.GaussianState(1, [0, 0], [[1, 0.1], [0, 1]])


def test_shape_checks():
    with pytest.raises(InvalidStateError):
        gs.GaussianState(2, [0, 0], np.eye(2))
    with pytest.raises(InvalidStateError):
        gs.GaussianState(1, [0, 0], np.eye(3))


def test_symplectic_form():
    J = gs.symplectic_form(3)
    np.testing.assert_array_equal(J.T, -J)
    np.testing.assert_array_equal(J @ J, -np.eye(6))


def test_apply_identity_and_squeezer():
    s = gs.make_thermal([0.7])
    out = gs.apply_symplectic(s, np.eye(2), np.zeros(2))
    np.testing.assert_array_equal(out.disp, s.disp)
    np.testing.assert_array_equal(out.mean, s.mean)
    r = 0.8
    # diag(e^r, e^-r) in (p, q) stretches p, matching the squeezed-vacuum convention
    sq = gs.apply_symplectic(gs.make_vacuum(1), np.diag([math.exp(r), math.exp(-r)]))
    np.testing.assert_allclose(sq.disp, gs.make_squeezed_vacuum(r, 0).disp, atol=1e-12)


def test_apply_rejects_non_symplectic():
    with pytest.raises(NonSymplecticError) as err:
        gs.apply_symplectic(gs.make_vacuum(1), np.diag([2.0, 1.0]))
    assert err.value.residual == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 3))
def test_symplectic_spectrum_invariant(seed, n):
    rng = np.random.default_rng(seed)
    base = gs.make_thermal(rng.uniform(0, 3, size=n))
    S = gs.random_symplectic(n, rng)
    out = gs.apply_symplectic(base, S, rng.normal(size=2 * n))
    np.testing.assert_allclose(
        gs.symplectic_eigenvalues(out.disp), gs.symplectic_eigenvalues(base.disp), atol=1e-10
    )
    assert gs.validate(out).ok


def test_mean_photon_number_cases():
    assert gs.mean_photon_number(gs.make_vacuum(1), 0) == 0
    assert gs.mean_photon_number(gs.make_coherent([1]), 0) == pytest.approx(1, abs=1e-14)
    assert gs.mean_photon_number(gs.make_coherent([0.3, 1 + 1j]), 1) == pytest.approx(2, abs=1e-14)
    with pytest.raises(IndexError):
        gs.mean_photon_number(gs.make_vacuum(2), 2)


def test_purity():
    assert gs.purity(gs.make_vacuum(2)) == pytest.approx(1, abs=1e-14)
    # geometric law p_n = (1/2)^(n+1): sum p_n^2 = 1/3
    assert gs.purity(gs.make_thermal([1])) == pytest.approx(1 / 3, abs=1e-14)
    assert gs.purity(gs.make_squeezed_vacuum(1, 0.4)) == pytest.approx(1, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_purity_bounds(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    nbars = rng.uniform(0, 2, size=n) * (rng.random(n) < 0.6)
    s = gs.apply_symplectic(gs.make_thermal(nbars), gs.random_symplectic(n, rng))
    p = gs.purity(s)
    assert 0 < p <= 1 + 1e-10
    pure = np.all(np.abs(gs.symplectic_eigenvalues(s.disp) - 0.5) <= 1e-10)
    assert pure == (abs(p - 1) <= 1e-9)


def test_product_and_reduced_roundtrip():
    a = gs.make_squeezed_vacuum(0.4, 0.2)
    b = gs.make_coherent([0.5 - 0.2j])
    prod = gs.product_state(a, b)
    assert prod.n_modes == 2
    for j, part in enumerate((a, b)):
        red = gs.reduced_state(prod, [j])
        np.testing.assert_array_equal(red.disp, part.disp)
        np.testing.assert_array_equal(red.mean, part.mean)


def test_state_document_roundtrip(tmp_path):
    s = gs.apply_symplectic(gs.make_thermal([0.2, 1.0]), gs.random_symplectic(2, np.random.default_rng(1)))
    path = tmp_path / "state.json"
    gs.dump_state(s, path)
    back = gs.load_state(path)
    np.testing.assert_array_equal(back.disp, s.disp)
    np.testing.assert_array_equal(back.mean, s.mean)
