"""Coadjoint orbits of the compact subgroup, momentum map and gauge slice.

The unreduced phase space is ``{(Lambda, J_minus)}`` with ``Lambda`` a
positive-definite group element of the noncompact part and ``J_minus`` in
g-minus, extended by a coadjoint orbit variable ``xi`` in g-plus.  The
momentum map of the diagonal compact action is

    Psi(Lambda, J_minus, xi) = tanh(ad_Q) J_minus + xi,   Q = log(Lambda)/2,

and its zero set intersected with the exponential gauge slice is
parametrized by ``(q, p, xi)`` with ``xi`` constrained to M-perp.  This
module provides the slice map, orbit representatives built from rank-one
projectors, the single-point ("spinless") orbit reductions and their
verification, and samplers for generic on-slice spin data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import algebra
from .algebra import (
    AdmissibilityError,
    MembershipError,
    SymmetricSpaceData,
    pair,
)

__all__ = [
    "OrbitSpec",
    "SpinPoint",
    "UnreducedPoint",
    "eta_of_u",
    "mu_kks",
    "orbit_base_point",
    "random_orbit_point",
    "random_slice_spin",
    "spin_point",
    "zero_spin",
    "moment_map",
    "build_slice_point",
    "xi_red",
    "reduce_orbit_check",
    "emptiness_probe",
    "ReductionReport",
    "expm_herm",
    "logm_herm",
    "diagonalize_flat",
]

EPS_ONSLICE = 1e-10


# ---------------------------------------------------------------------------
# Hermitian matrix functions (Lambda is always Hermitian positive definite)
# ---------------------------------------------------------------------------

def expm_herm(H: np.ndarray) -> np.ndarray:
    H = 0.5 * (H + H.conj().T)
    w, V = np.linalg.eigh(H)
    return (V * np.exp(w)) @ V.conj().T


def logm_herm(P: np.ndarray) -> np.ndarray:
    P = 0.5 * (P + P.conj().T)
    w, V = np.linalg.eigh(P)
    if np.any(w <= 0):
        raise ValueError(f"matrix is not positive definite (min eig {w.min():.3e})")
    return (V * np.log(w)) @ V.conj().T


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitSpec:
    """Coadjoint orbit of the compact subgroup with minimal constituents.

    For the su(m,n) family the orbit is
        O = O~(m, kappa_m) + O~(n, kappa_n) + x * C_{m,n}
    with minimal constituent orbits (a zero kappa means the constituent is
    absent) and central coefficient x.  For sl(k,C) the orbit is the minimal
    orbit of the compact group with parameter kappa.
    """

    family: str  # "su_mn" | "sl_kc"
    kappa_m: float = 0.0
    kappa_n: float = 0.0
    x: float = 0.0
    kappa: float = 0.0

    @staticmethod
    def su(kappa_m: float = 0.0, kappa_n: float = 0.0, x: float = 0.0) -> "OrbitSpec":
        if kappa_m < 0 or kappa_n < 0:
            raise AdmissibilityError("constituent parameters must be >= 0")
        if kappa_m == 0 and kappa_n == 0 and x == 0:
            raise AdmissibilityError("orbit must be nonzero")
        return OrbitSpec("su_mn", kappa_m=float(kappa_m), kappa_n=float(kappa_n), x=float(x))

    @staticmethod
    def kks(kappa: float) -> "OrbitSpec":
        if kappa <= 0:
            raise AdmissibilityError("KKS orbit requires kappa > 0")
        return OrbitSpec("sl_kc", kappa=float(kappa))


@dataclass(frozen=True)
class SpinPoint:
    """Orbit element xi in g-plus, with M-perp coefficients when on-slice."""

    xi: np.ndarray
    coeffs: np.ndarray | None = None   # M-perp coefficients, basis order
    on_slice: bool = False

    @property
    def is_zero(self) -> bool:
        return bool(np.abs(self.xi).max(initial=0.0) == 0.0)


@dataclass(frozen=True)
class UnreducedPoint:
    """Point of the extended unreduced phase space (Lambda, J_minus, xi)."""

    Lam: np.ndarray
    j_minus: np.ndarray
    xi: SpinPoint


# ---------------------------------------------------------------------------
# Spin points
# ---------------------------------------------------------------------------

def spin_point(space: SymmetricSpaceData, xi: np.ndarray,
               require_slice: bool = True, tol: float = EPS_ONSLICE) -> SpinPoint:
    """Wrap an orbit element; certifies g-plus membership and, if requested,
    the slice condition (vanishing M-part) along with the coefficient
    expansion in the M-perp basis."""
    xi = np.asarray(xi, dtype=complex)
    res = algebra.membership_residual(space, xi)
    gminus_part = algebra.project(space, xi, "gminus")
    res = max(res, float(np.abs(gminus_part).max(initial=0.0)))
    if res > algebra.EPS_MEMBERSHIP:
        raise MembershipError(f"xi is not in g+ (residual {res:.3e})")
    a, cm, cplus, _ = algebra.decompose(space, xi)
    m_norm = float(np.linalg.norm(cm))
    if not require_slice:
        return SpinPoint(xi=xi, coeffs=None, on_slice=m_norm < tol)
    if m_norm > tol:
        raise MembershipError(f"xi has a nonzero M-part (norm {m_norm:.3e})")
    recon = algebra.reconstruct(space, cplus=cplus)
    if np.abs(recon - xi).max(initial=0.0) > 1e-12 * max(1.0, np.abs(xi).max()):
        raise MembershipError("xi is not spanned by the M-perp basis")
    return SpinPoint(xi=xi, coeffs=cplus, on_slice=True)


def zero_spin(space: SymmetricSpaceData) -> SpinPoint:
    return SpinPoint(xi=np.zeros((space.N, space.N), complex),
                     coeffs=np.zeros(space.K), on_slice=True)


# ---------------------------------------------------------------------------
# Rank-one orbit representatives
# ---------------------------------------------------------------------------

def eta_of_u(u: np.ndarray, kappa: float, tol: float = 1e-10) -> np.ndarray:
    """Traceless anti-Hermitian projector i(u u+ - (u+u/k) 1) on the minimal
    orbit with parameter kappa; requires |u|^2 = k * kappa."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    k = u.size
    norm2 = float(np.vdot(u, u).real)
    if abs(norm2 - k * kappa) > tol * max(1.0, k * kappa):
        raise AdmissibilityError(
            f"norm constraint violated: |u|^2 = {norm2:.12g}, expected {k * kappa:.12g}")
    return 1j * (np.outer(u, u.conj()) - (norm2 / k) * np.eye(k))


def mu_kks(k: int, kappa: float) -> np.ndarray:
    """Torus normal form of the constrained minimal orbit: i*kappa off the
    diagonal, zero on it."""
    if k < 2 or kappa <= 0:
        raise AdmissibilityError("mu_kks requires k >= 2 and kappa > 0")
    return 1j * kappa * (np.ones((k, k)) - np.eye(k))


def _central_element(m: int, n: int) -> np.ndarray:
    return np.diag(np.concatenate([1j * n * np.ones(m), -1j * m * np.ones(n)]))


def _embed_su_factor(space: SymmetricSpaceData, eta: np.ndarray, which: str) -> np.ndarray:
    """Embed an su(m) or su(n) element into its diagonal block."""
    m, n = space.spec.m, space.spec.n
    out = np.zeros((space.N, space.N), complex)
    if which == "m":
        out[:m, :m] = eta
    else:
        out[m:, m:] = eta
    return out


def _base_u(k: int, kappa: float) -> np.ndarray:
    u = np.zeros(k, dtype=complex)
    u[0] = math.sqrt(k * kappa)
    return u


def orbit_base_point(space: SymmetricSpaceData, spec: OrbitSpec) -> np.ndarray:
    """A reference element of the orbit (not on the slice in general)."""
    if spec.family != space.spec.family:
        raise AdmissibilityError("orbit family does not match the space")
    if space.spec.family == "sl_kc":
        return eta_of_u(_base_u(space.spec.k, spec.kappa), spec.kappa)
    m, n = space.spec.m, space.spec.n
    xi = np.zeros((space.N, space.N), complex)
    if spec.kappa_m > 0:
        if m < 2:
            raise AdmissibilityError("size-m factor su(1) has no nonzero orbits")
        xi += _embed_su_factor(space, eta_of_u(_base_u(m, spec.kappa_m), spec.kappa_m), "m")
    if spec.kappa_n > 0:
        if n < 2:
            raise AdmissibilityError("size-n factor su(1) has no nonzero orbits")
        xi += _embed_su_factor(space, eta_of_u(_base_u(n, spec.kappa_n), spec.kappa_n), "n")
    if spec.x != 0.0:
        xi += spec.x * _central_element(m, n)
    return xi


def random_orbit_point(space: SymmetricSpaceData, spec: OrbitSpec,
                       rng: np.random.Generator) -> SpinPoint:
    """Ad-conjugate the base point by a random compact group element."""
    xi0 = orbit_base_point(space, spec)
    Z = algebra.random_gplus_element(space, rng, scale=1.0)
    g = scipy.linalg.expm(Z)
    # global phase det-correction acts trivially under Ad; applied for cleanliness
    g = g * np.exp(-1j * np.angle(np.linalg.det(g)) / space.N)
    return spin_point(space, g @ xi0 @ g.conj().T, require_slice=False)


# ---------------------------------------------------------------------------
# Momentum map and the gauge slice
# ---------------------------------------------------------------------------

def diagonalize_flat(space: SymmetricSpaceData, Q: np.ndarray,
                     require_chamber: bool = False, tol_degenerate: float = 1e-9):
    """Conjugate Q in g-minus into the flat: Q = g q^ g^-1 with g compact.

    For su(m,n) the off-diagonal block is SVD-decomposed (singular values in
    descending order give the chamber representative); for sl(k,C) a
    Hermitian eigendecomposition sorted descending is used.  Returns
    (q, g).  With ``require_chamber`` the coordinates must be regular,
    strictly inside the open chamber and nondegenerate.
    """
    if space.spec.family == "su_mn":
        m, n = space.spec.m, space.spec.n
        B = Q[:m, m:]
        U, s, Vh = np.linalg.svd(B)
        q = s.copy()
        g = np.zeros((space.N, space.N), complex)
        g[:m, :m] = U
        g[m:, m:] = Vh.conj().T
    else:
        w, V = np.linalg.eigh(0.5 * (Q + Q.conj().T))
        q = w[::-1].copy()
        g = V[:, ::-1].copy()
    if require_chamber:
        if not algebra.is_in_chamber(space, q, margin=algebra.EPS_WALL):
            raise algebra.WallProximityError(
                f"diagonalized point is outside the open chamber: q = {q}")
        gaps = np.abs(np.diff(np.sort(q)))
        if gaps.size and gaps.min() < tol_degenerate:
            raise algebra.DegenerateSpectrumError(
                f"near-degenerate flat coordinates: min gap {gaps.min():.3e}")
    return q, g


def moment_map(space: SymmetricSpaceData, point: UnreducedPoint) -> np.ndarray:
    """Value of the compact-group momentum map Psi = tanh(ad_Q) J_minus + xi."""
    Q = 0.5 * logm_herm(point.Lam)
    bad = max(algebra.membership_residual(space, Q),
              float(np.abs(algebra.split(space, Q)[0]).max(initial=0.0)))
    if bad > 1e-8 * max(1.0, float(np.abs(Q).max())):
        raise MembershipError(
            f"Lambda is not a noncompact group element (log residual {bad:.3e})")
    q, g = diagonalize_flat(space, Q)
    Jm_rot = g.conj().T @ point.j_minus @ g
    if algebra.is_regular(space, q):
        Jp_rot = algebra.ad_fn(space, "tanh", q, Jm_rot)
    else:
        # tanh(0) = 0 on any degenerate directions: evaluate componentwise on
        # the regular part only; a vanishing flat is the Lambda = 1 case.
        a, cm, cplus, cminus = algebra.decompose(space, Jm_rot)
        av = space.alpha_cols(q)
        vals = np.tanh(av)
        Jp_rot = algebra.reconstruct(space, cplus=vals * cminus, cminus=vals * cplus)
    return g @ Jp_rot @ g.conj().T + point.xi.xi


def build_slice_point(space: SymmetricSpaceData, q, p, xi: SpinPoint) -> UnreducedPoint:
    """Map (q, p, xi) on the slice to the unreduced point
    (e^{2q}, p - coth(ad_q) xi, xi); the momentum map vanishes on the result."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if not algebra.is_in_chamber(space, q):
        raise algebra.WallProximityError(f"q = {q} is not in the open Weyl chamber")
    if not xi.on_slice:
        raise MembershipError("xi must be on the slice (vanishing M-part)")
    Lam = expm_herm(2.0 * algebra.embed(space, q))
    Jm = algebra.embed(space, p)
    if not xi.is_zero:
        Jm = Jm - algebra.ad_fn(space, "coth", q, xi.xi)
    return UnreducedPoint(Lam=Lam, j_minus=Jm, xi=xi)


# ---------------------------------------------------------------------------
# Single-point orbit reductions (spinless data)
# ---------------------------------------------------------------------------

def _check_bc_params(n: int, kappa: float, x: float):
    if kappa <= 0:
        raise AdmissibilityError("BC case requires kappa > 0")
    if kappa - n * x < -1e-14:
        raise AdmissibilityError(f"BC case requires kappa - n x >= 0 (got {kappa - n * x:.6g})")
    if kappa + x < -1e-14:
        raise AdmissibilityError(f"BC case requires kappa + x >= 0 (got {kappa + x:.6g})")


def xi_red(space: SymmetricSpaceData, case: str, kappa: float, x: float = 0.0) -> SpinPoint:
    """Representative of a single-point reduced orbit.

    case "d": minimal orbit in the size-n factor, any m >= n, kappa > 0, x = 0.
    case "c": m = n, orbit plus central term, kappa >= 0, (kappa, x) != 0.
    case "bc": m = n + 1, kappa > 0 with kappa - n x >= 0 and kappa + x >= 0.
    case "kks": sl(k,C), kappa > 0.
    """
    case = case.lower()
    if case == "kks":
        if space.spec.family != "sl_kc":
            raise AdmissibilityError("KKS case lives on the sl(k,C) family")
        if kappa <= 0:
            raise AdmissibilityError("KKS case requires kappa > 0")
        return spin_point(space, mu_kks(space.spec.k, kappa))

    if space.spec.family != "su_mn":
        raise AdmissibilityError(f"case {case!r} lives on the su(m,n) family")
    m, n = space.spec.m, space.spec.n
    if case == "d":
        if kappa <= 0:
            raise AdmissibilityError("D case requires kappa > 0")
        if x != 0.0:
            raise AdmissibilityError("D case has no central term (x = 0)")
        if n < 2:
            raise AdmissibilityError("D case requires n >= 2")
        return spin_point(space, _embed_su_factor(space, mu_kks(n, kappa), "n"))
    if case == "c":
        if m != n:
            raise AdmissibilityError("C case requires m = n")
        if kappa < 0 or (kappa == 0 and x == 0):
            raise AdmissibilityError("C case requires kappa >= 0 and (kappa, x) != (0, 0)")
        xi = x * _central_element(n, n)
        if kappa > 0:
            xi = xi + _embed_su_factor(space, mu_kks(n, kappa), "n")
        return spin_point(space, xi)
    if case == "bc":
        if m != n + 1:
            raise AdmissibilityError("BC case requires m = n + 1")
        _check_bc_params(n, kappa, x)
        u = np.concatenate([
            np.full(n, math.sqrt(max(kappa + x, 0.0))),
            [math.sqrt(max(kappa - n * x, 0.0))],
        ]).astype(complex)
        xi = _embed_su_factor(space, eta_of_u(u, kappa), "m") + x * _central_element(m, n)
        return spin_point(space, xi)
    raise AdmissibilityError(f"unknown spinless case {case!r}")


def bc_couplings(n: int, kappa: float, x: float):
    """(g, g1, g2) of the two-coupling BC_n model; they satisfy
    g1^2 - 2 g^2 + sqrt(2) g g2 = 0."""
    _check_bc_params(n, kappa, x)
    g = 0.5 * (kappa + x)
    g1 = math.sqrt(max((kappa + x) * (kappa - n * x), 0.0) / 2.0)
    g2 = (n + 1) * x / math.sqrt(2.0)
    return g, g1, g2


@dataclass(frozen=True)
class ReductionReport:
    """Outcome of the single-point reduction verification."""

    n_samples: int
    diag_constraint_residual: float
    normal_form_residual: float
    xi_match_residual: float

    @property
    def passed(self) -> bool:
        return max(self.diag_constraint_residual, self.normal_form_residual,
                   self.xi_match_residual) < 1e-10


def reduce_orbit_check(space: SymmetricSpaceData, kappa: float, x: float,
                       rng: np.random.Generator, n_samples: int = 32) -> ReductionReport:
    """Verify the single-point reduction of the BC-type orbit on su(n+1, n).

    Samples orbit points satisfying the slice moduli constraints, checks the
    diagonal constraint on the projector factor, solves for torus phases
    mapping each sample to the normal form (phase differences against the
    last component), and confirms the result equals the stored
    representative.
    """
    m, n = space.spec.m, space.spec.n
    if space.spec.family != "su_mn" or m != n + 1:
        raise AdmissibilityError("reduce_orbit_check applies to su(n+1, n)")
    _check_bc_params(n, kappa, x)
    target = xi_red(space, "bc", kappa, x)
    C = _central_element(m, n)
    diag_target = np.concatenate([1j * x * np.ones(n), [-1j * x * n]])

    moduli = np.concatenate([np.full(n, math.sqrt(max(kappa + x, 0.0))),
                             [math.sqrt(max(kappa - n * x, 0.0))]])
    res_diag = res_norm = res_match = 0.0
    for _ in range(n_samples):
        beta = rng.uniform(0.0, 2.0 * math.pi, size=m)
        u = moduli * np.exp(1j * beta)
        eta = eta_of_u(u, kappa)
        res_diag = max(res_diag, float(np.abs(np.diag(eta) - diag_target).max()))
        # torus phase solve: phase differences against component n+1 align all
        # components onto a common phase (which drops out of eta)
        phases = np.concatenate([beta[-1] - beta[:-1], [0.0]])
        t = np.exp(1j * phases)
        t = t * np.exp(-1j * np.angle(np.prod(t)) / m)  # det correction inside SU(m)
        u_hat = t * u
        common = u_hat[-1] / abs(u_hat[-1])
        res_norm = max(res_norm, float(np.abs(u_hat - common * np.abs(u_hat)).max()))
        xi_rot = _embed_su_factor(space, eta_of_u(u_hat, kappa), "m") + x * C
        res_match = max(res_match, float(np.abs(xi_rot - target.xi).max()))
        # the same rotation realized by an honest centralizer group element
        # (phases repeated in both size-n blocks) must agree
        g = np.diag(np.concatenate([t, t[:n]]))
        res_match = max(res_match, float(np.abs(
            g @ (_embed_su_factor(space, eta, "m") + x * C) @ g.conj().T - xi_rot).max()))
    return ReductionReport(n_samples=n_samples, diag_constraint_residual=res_diag,
                           normal_form_residual=res_norm, xi_match_residual=res_match)


def emptiness_probe(space: SymmetricSpaceData, kappa: float, x: float,
                    rng: np.random.Generator, n_samples: int = 10000) -> float:
    """Minimum M-part norm over random points of the orbit
    O~(n, kappa) + x C on su(n+1, n); a positive lower bound certifies that
    the orbit misses the slice entirely for x != 0."""
    m, n = space.spec.m, space.spec.n
    if space.spec.family != "su_mn" or m != n + 1:
        raise AdmissibilityError("emptiness_probe applies to su(n+1, n)")
    if x == 0.0:
        raise AdmissibilityError("the probe targets x != 0 (x = 0 meets the slice)")
    C = _central_element(m, n)
    best = np.inf
    for _ in range(n_samples):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v *= math.sqrt(n * kappa) / np.linalg.norm(v)
        xi = _embed_su_factor(space, eta_of_u(v, kappa), "n") + x * C
        cm = algebra.decompose(space, xi)[1]
        best = min(best, float(np.linalg.norm(cm)))
    return best


# ---------------------------------------------------------------------------
# Generic on-slice spin data
# ---------------------------------------------------------------------------

def _slice_moduli_su(space: SymmetricSpaceData, spec: OrbitSpec,
                     rng: np.random.Generator, max_tries: int = 200):
    """Sample squared moduli (t for the size-m factor, s for the size-n one)
    compatible with the vanishing-M-part conditions.

    The conditions follow from pairing the orbit element against M: with
    t_a = |u_a|^2 and s_j = |v_j|^2,
        m - n >= 2: requires u to vanish on the middle block and
                    x = kappa_m / n exactly; t_j + s_j constant over j.
        m = n + 1:  t_m = kappa_m - n x and t_j + s_j = kappa_m + kappa_n + x.
        m = n:      t_j + s_j = kappa_m + kappa_n.
    """
    m, n = space.spec.m, space.spec.n
    km, kn, x = spec.kappa_m, spec.kappa_n, spec.x
    if km == 0 and kn == 0:
        raise AdmissibilityError("a purely central orbit never meets the slice")

    t = np.zeros(m)
    s = np.zeros(n)
    if km == 0:
        # orbit in the size-n factor only: s_j = kappa_n forced, x constrained
        if m > n and x != 0.0:
            raise AdmissibilityError(
                "O~(n, kappa) + x C misses the slice for x != 0 on su(m>n, n)")
        s[:] = kn
        return t, s
    if m - n >= 2:
        x_req = km / n
        if abs(x - x_req) > 1e-12 * max(1.0, abs(x_req)):
            raise AdmissibilityError(
                f"su({m},{n}) slice data requires x = kappa_m/n = {x_req:.12g}, got {x:.12g}")
        T = kn - km + (m + n) * x_req
        total_t = m * km
    elif m == n + 1:
        t_m = km - n * x
        if t_m < -1e-14 or km + kn + x < -1e-14:
            raise AdmissibilityError(
                "su(n+1,n) slice requires kappa_m - n x >= 0 and kappa_m + kappa_n + x >= 0")
        t[-1] = max(t_m, 0.0)
        T = km + kn + x
        total_t = m * km - t[-1]
    else:
        T = km + kn
        total_t = n * km
    if T < -1e-14:
        raise AdmissibilityError("slice moduli constraints are infeasible")

    if kn == 0:
        t[:n] = total_t / n
        if np.any(t > T + 1e-12):
            raise AdmissibilityError("slice moduli constraints are infeasible")
        return t, s
    for _ in range(max_tries):
        cand = rng.dirichlet(np.ones(n)) * total_t
        if np.all(cand <= T + 1e-14):
            t[:n] = cand
            s = T - t[:n]
            return t, s
    # fall back to the barycenter, always feasible
    t[:n] = total_t / n
    s = T - t[:n]
    if np.any(s < -1e-12):
        raise AdmissibilityError("slice moduli constraints are infeasible")
    return t, np.maximum(s, 0.0)


def random_slice_spin(space: SymmetricSpaceData, spec: OrbitSpec,
                      rng: np.random.Generator) -> SpinPoint:
    """Random element of (orbit intersect M-perp): valid initial spin data."""
    if spec.family != space.spec.family:
        raise AdmissibilityError("orbit family does not match the space")
    if space.spec.family == "sl_kc":
        k = space.spec.k
        beta = rng.uniform(0.0, 2.0 * math.pi, size=k)
        u = math.sqrt(spec.kappa) * np.exp(1j * beta)
        return spin_point(space, eta_of_u(u, spec.kappa))

    m, n = space.spec.m, space.spec.n
    t, s = _slice_moduli_su(space, spec, rng)
    xi = np.zeros((space.N, space.N), complex)
    if spec.kappa_m > 0:
        u = np.sqrt(t) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=m))
        xi += _embed_su_factor(space, eta_of_u(u, spec.kappa_m), "m")
    if spec.kappa_n > 0:
        v = np.sqrt(s) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=n))
        xi += _embed_su_factor(space, eta_of_u(v, spec.kappa_n), "n")
    if spec.x != 0.0:
        xi += spec.x * _central_element(m, n)
    return spin_point(space, xi)
