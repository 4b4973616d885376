"""Tests for coadjoint orbits, the momentum map and the gauge slice."""

import math

import numpy as np
import pytest

from spincal import algebra, orbits
from spincal.algebra import AdmissibilityError, SpaceSpec
from spincal.orbits import OrbitSpec


def frob(X):
    return float(np.linalg.norm(X))


# ---------------------------------------------------------------------------
# eta_of_u / mu_kks
# ---------------------------------------------------------------------------

def test_eta_of_u_k2():
    eta = orbits.eta_of_u(np.array([math.sqrt(2.0), 0.0]), 1.0)
    assert np.allclose(eta, np.diag([1j, -1j]))


def test_eta_of_u_phase_invariance(rng):
    u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    u *= math.sqrt(3.0 * 0.7) / np.linalg.norm(u)
    alpha = rng.uniform(0, 2 * math.pi)
    assert np.allclose(orbits.eta_of_u(u, 0.7), orbits.eta_of_u(np.exp(1j * alpha) * u, 0.7))


def test_eta_of_u_ones_has_zero_diagonal():
    eta = orbits.eta_of_u(np.ones(3), 1.0)
    assert np.abs(np.diag(eta)).max() < 1e-15
    assert np.abs(np.trace(eta)) < 1e-14
    assert np.abs(eta + eta.conj().T).max() < 1e-14


def test_eta_of_u_norm_violation():
    with pytest.raises(AdmissibilityError):
        orbits.eta_of_u(np.array([1.0, 1.0]), 5.0)


def test_eta_of_u_conjugation_covariance(rng):
    u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    u *= math.sqrt(4.0) / np.linalg.norm(u)
    Z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    V = np.linalg.qr(Z)[0]
    assert np.allclose(orbits.eta_of_u(V @ u, 1.0), V @ orbits.eta_of_u(u, 1.0) @ V.conj().T)


def test_mu_kks_matches_paper_k2():
    assert np.allclose(orbits.mu_kks(2, 1.0), np.array([[0.0, 1j], [1j, 0.0]]))


def test_mu_kks_zero_diagonal_and_eta_consistency():
    k, kappa = 4, 0.6
    mu = orbits.mu_kks(k, kappa)
    assert np.abs(np.diag(mu)).max() == 0.0
    assert np.allclose(mu, orbits.eta_of_u(math.sqrt(kappa) * np.ones(k), kappa))


# ---------------------------------------------------------------------------
# slice map and momentum map
# ---------------------------------------------------------------------------

def test_moment_map_zero_data(su22):
    pt = orbits.build_slice_point(su22, np.array([1.5, 0.5]), np.zeros(2),
                                  orbits.zero_spin(su22))
    assert frob(orbits.moment_map(su22, pt)) < 1e-12


def test_moment_map_identity_lambda(su22, rng):
    xi = orbits.random_slice_spin(su22, OrbitSpec.su(kappa_m=1.0, kappa_n=0.5), rng)
    pt = orbits.UnreducedPoint(Lam=np.eye(4, dtype=complex),
                               j_minus=algebra.embed(su22, np.array([0.3, -0.1])),
                               xi=xi)
    psi = orbits.moment_map(su22, pt)
    assert np.abs(psi - xi.xi).max() < 1e-13


@pytest.mark.parametrize("label,orbit", [
    ("su21", ("bc", 1.0, 0.0)),
    ("su21", ("bc", 1.0, 0.4)),
    ("su22", ("generic", 1.0, 0.5)),
    ("su32", ("generic", 1.2, 0.3)),
    ("su31", ("forced", 0.8, 0.0)),
])
def test_slice_constraint_vanishes(label, orbit, rng, request):
    sp = request.getfixturevalue(label)
    kind, km, kn = orbit
    if kind == "bc":
        spec = OrbitSpec.su(kappa_m=km, x=kn)
    elif kind == "generic":
        spec = OrbitSpec.su(kappa_m=km, kappa_n=kn, x=0.2)
    else:
        # m - n >= 2 forces x = kappa_m / n for the slice to be met
        spec = OrbitSpec.su(kappa_m=km, x=km / sp.spec.n)
    for _ in range(20):
        xi = orbits.random_slice_spin(sp, spec, rng)
        q = algebra.random_chamber_point(sp, rng)
        p = rng.standard_normal(sp.n_coords)
        if sp.spec.family == "sl_kc":
            p -= p.mean()
        up = orbits.build_slice_point(sp, q, p, xi)
        assert frob(orbits.moment_map(sp, up)) < 1e-11


def test_slice_constraint_sl(sl3, rng):
    spec = OrbitSpec.kks(0.9)
    for _ in range(20):
        xi = orbits.random_slice_spin(sl3, spec, rng)
        q = algebra.random_chamber_point(sl3, rng)
        p = rng.standard_normal(3)
        p -= p.mean()
        up = orbits.build_slice_point(sl3, q, p, xi)
        assert frob(orbits.moment_map(sl3, up)) < 1e-11


def test_moment_map_equivariance_off_slice(su22, rng):
    # conjugating an on-slice point by a generic compact element exercises the
    # general (non-flat) Lambda path of the momentum map
    spec = OrbitSpec.su(kappa_m=1.0, kappa_n=0.5)
    xi = orbits.random_slice_spin(su22, spec, rng)
    up = orbits.build_slice_point(su22, np.array([1.3, 0.6]), np.array([0.2, -0.4]), xi)
    import scipy.linalg
    g = scipy.linalg.expm(algebra.random_gplus_element(su22, rng, 0.7))
    moved = orbits.UnreducedPoint(
        Lam=g @ up.Lam @ g.conj().T,
        j_minus=g @ up.j_minus @ g.conj().T,
        xi=orbits.spin_point(su22, g @ up.xi.xi @ g.conj().T, require_slice=False))
    assert frob(orbits.moment_map(su22, moved)) < 1e-10


def test_build_slice_point_j_minus_form(su21, rng):
    # the J_minus component reproduces p - coth(ad_q) xi
    xi = orbits.xi_red(su21, "bc", 1.0, 0.0)
    q, p = np.array([1.0]), np.array([0.3])
    up = orbits.build_slice_point(su21, q, p, xi)
    expected = algebra.embed(su21, p) - algebra.ad_fn(su21, "coth", q, xi.xi)
    assert np.abs(up.j_minus - expected).max() < 1e-14
    assert frob(orbits.moment_map(su21, up)) < 1e-11


def test_build_slice_point_rejects_wall_and_m_part(su22, rng):
    with pytest.raises(algebra.WallProximityError):
        orbits.build_slice_point(su22, np.array([1.0, 1.0]), np.zeros(2),
                                 orbits.zero_spin(su22))
    bad = orbits.SpinPoint(xi=su22.m_basis[0], coeffs=None, on_slice=False)
    with pytest.raises(orbits.MembershipError):
        orbits.build_slice_point(su22, np.array([2.0, 1.0]), np.zeros(2), bad)


# ---------------------------------------------------------------------------
# xi_red and couplings
# ---------------------------------------------------------------------------

def test_xi_red_bc_n1():
    sp = algebra.build_space(SpaceSpec.su(2, 1))
    xi = orbits.xi_red(sp, "bc", 1.0, 0.0)
    g, g1, g2 = orbits.bc_couplings(1, 1.0, 0.0)
    assert abs(g1 - math.sqrt(0.5)) < 1e-15 and g2 == 0.0
    # expansion: 2 g1 on the imaginary e_1 vector only
    lbl = dict(zip(sp.e_labels, xi.coeffs))
    assert abs(lbl["e1:im,d1"] - 2 * g1) < 1e-13
    for name in ("e1:re,d1", "2e1:im"):
        assert abs(lbl[name]) < 1e-13


def test_xi_red_bc_couplings_n2():
    g, g1, g2 = orbits.bc_couplings(2, 3.0, 1.0)
    assert abs(g - 2.0) < 1e-15
    assert abs(g1 - math.sqrt(2.0)) < 1e-15
    assert abs(g2 - 3.0 / math.sqrt(2.0)) < 1e-15


def test_xi_red_bc_expansion_matches_couplings(su32):
    kappa, x = 3.0, 1.0
    xi = orbits.xi_red(su32, "bc", kappa, x)
    g, g1, g2 = orbits.bc_couplings(2, kappa, x)
    lbl = dict(zip(su32.e_labels, xi.coeffs))
    assert abs(lbl["e1-e2:im"] - 2 * g) < 1e-12
    assert abs(lbl["e1+e2:im"] - 2 * g) < 1e-12
    assert abs(lbl["e1:im,d1"] - 2 * g1) < 1e-12
    assert abs(lbl["2e1:im"] - 2 * g2) < 1e-12
    for name in ("e1-e2:re", "e1+e2:re", "e1:re,d1", "e2:re,d1"):
        assert abs(lbl[name]) < 1e-12


def test_coupling_relation(rng):
    # g1^2 - 2 g^2 + sqrt(2) g g2 = 0 over random admissible draws
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        kappa = float(rng.uniform(0.05, 4.0))
        x = float(rng.uniform(-kappa, kappa / n))
        g, g1, g2 = orbits.bc_couplings(n, kappa, x)
        worst = max(worst, abs(g1 ** 2 - 2 * g ** 2 + math.sqrt(2.0) * g * g2))
    assert worst < 1e-13


def test_xi_red_on_slice_everywhere(su21, su22, su32, sl3):
    cases = [
        (su21, "bc", 1.0, 0.3),
        (su32, "bc", 3.0, 1.0),
        (su22, "c", 1.0, 0.5),
        (su22, "c", 0.0, 0.7),
        (su22, "d", 2.0, 0.0),
        (sl3, "kks", 1.1, 0.0),
    ]
    for sp, case, kappa, x in cases:
        xi = orbits.xi_red(sp, case, kappa, x)
        assert xi.on_slice
        assert np.abs(algebra.project(sp, xi.xi, "m")).max() < 1e-12


def test_xi_red_admissibility():
    su21 = algebra.build_space(SpaceSpec.su(2, 1))
    with pytest.raises(AdmissibilityError):
        orbits.xi_red(su21, "bc", 1.0, -1.5)    # kappa + x < 0
    with pytest.raises(AdmissibilityError):
        orbits.xi_red(su21, "bc", 1.0, 1.5)     # kappa - n x < 0
    su22 = algebra.build_space(SpaceSpec.su(2, 2))
    with pytest.raises(AdmissibilityError):
        orbits.xi_red(su22, "c", 0.0, 0.0)
    with pytest.raises(AdmissibilityError):
        orbits.xi_red(su22, "d", 0.0, 0.0)      # nonzero-orbit requirement


# ---------------------------------------------------------------------------
# Theorem-6 style checks
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,kappa,x", [(1, 1.0, 0.0), (1, 1.0, 0.5), (2, 3.0, 1.0), (3, 2.0, 0.4)])
def test_reduce_orbit_check(n, kappa, x, rng):
    sp = algebra.build_space(SpaceSpec.su(n + 1, n))
    report = orbits.reduce_orbit_check(sp, kappa, x, rng, n_samples=24)
    assert report.passed, report


def test_reduce_orbit_check_inadmissible(rng):
    sp = algebra.build_space(SpaceSpec.su(2, 1))
    with pytest.raises(AdmissibilityError):
        orbits.reduce_orbit_check(sp, 1.0, -2.0, rng)


def test_emptiness_probe(su32, rng):
    # O~(n, kappa) + x C misses the slice for x != 0: M-part bounded below
    margin = orbits.emptiness_probe(su32, 1.0, 0.5, rng, n_samples=2000)
    assert margin > 1e-3


# ---------------------------------------------------------------------------
# random orbit points
# ---------------------------------------------------------------------------

def sorted_block_spectra(space, xi):
    if space.spec.family == "su_mn":
        m = space.spec.m
        sa = np.sort(np.linalg.eigvalsh(-1j * xi[:m, :m]))
        sd = np.sort(np.linalg.eigvalsh(-1j * xi[m:, m:]))
        return np.concatenate([sa, sd])
    return np.sort(np.linalg.eigvalsh(-1j * xi))


def test_random_orbit_point_deterministic(su22):
    spec = OrbitSpec.su(kappa_m=1.0, kappa_n=0.5, x=0.2)
    a = orbits.random_orbit_point(su22, spec, np.random.default_rng(7)).xi
    b = orbits.random_orbit_point(su22, spec, np.random.default_rng(7)).xi
    assert np.array_equal(a, b)


@pytest.mark.parametrize("fixture,speckw", [
    ("su22", dict(kappa_m=1.0, kappa_n=0.5, x=0.2)),
    ("su32", dict(kappa_m=1.0, x=0.3)),
])
def test_random_orbit_point_preserves_spectra(fixture, speckw, rng, request):
    sp = request.getfixturevalue(fixture)
    spec = OrbitSpec.su(**speckw)
    base = orbits.orbit_base_point(sp, spec)
    ref = sorted_block_spectra(sp, base)
    for _ in range(5):
        pt = orbits.random_orbit_point(sp, spec, rng)
        assert np.abs(sorted_block_spectra(sp, pt.xi) - ref).max() < 1e-10
        assert np.abs(algebra.project(sp, pt.xi, "gminus")).max() < 1e-12


def test_random_slice_spin_is_on_orbit_and_slice(su22, rng):
    spec = OrbitSpec.su(kappa_m=1.0, kappa_n=0.5, x=0.2)
    base = orbits.orbit_base_point(su22, spec)
    ref = sorted_block_spectra(su22, base)
    for _ in range(10):
        xi = orbits.random_slice_spin(su22, spec, rng)
        assert xi.on_slice
        assert np.abs(sorted_block_spectra(su22, xi.xi) - ref).max() < 1e-9


def test_random_slice_spin_su31_requires_forced_x(su31, rng):
    with pytest.raises(AdmissibilityError):
        orbits.random_slice_spin(su31, OrbitSpec.su(kappa_m=1.0, x=0.2), rng)
    xi = orbits.random_slice_spin(su31, OrbitSpec.su(kappa_m=1.0, x=1.0), rng)
    assert xi.on_slice
    # the forced datum is the pure 2e_1 spin 3 kappa sqrt(2) E+_{2e1}
    lbl = dict(zip(su31.e_labels, xi.coeffs))
    assert abs(lbl["2e1:im"] - 3.0 * math.sqrt(2.0)) < 1e-12


def test_pure_central_orbit_never_on_slice(su32, rng):
    with pytest.raises(AdmissibilityError):
        orbits.random_slice_spin(su32, OrbitSpec.su(x=1.0), rng)


def test_moment_map_rejects_foreign_lambda(su22):
    # a positive matrix that is not in the noncompact part must be refused
    bad = np.diag([2.0, 1.0, 1.0, 0.5]).astype(complex)
    pt = orbits.UnreducedPoint(Lam=bad, j_minus=np.zeros((4, 4), complex),
                               xi=orbits.zero_spin(su22))
    with pytest.raises(orbits.MembershipError):
        orbits.moment_map(su22, pt)


def test_space_data_is_write_protected(su22):
    with pytest.raises(ValueError):
        su22.eplus[0, 0, 0] = 1.0
    with pytest.raises(ValueError):
        su22.m_basis[0, 0, 0] = 1.0
