"""Degree estimation and its consequences.

The degree field of a cocycle phi is the Cesaro limit of transferred
M-fields,

    (P M)(x) = lim_N (1/N) sum_{n<N} Ad_{phi^(n)(x)} M(F_n x),

estimated here at finite N with an N/2 partial as convergence
diagnostic.  For diagonalizable situations the limit collapses to closed
forms (the plain integral of M, or its Ad-average projection), and the
module provides: invariance checks under cohomology and homomorphisms,
the SU(2) straightening that conjugates a nondegenerate cocycle to
diagonal form, the spectral floor a_{phi,pi}, and obstruction verdicts
for unique ergodicity / ergodicity of the skew product.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import dynamics as D
from . import groups as G
from . import reps as R
from .errors import (ConfigError, DegenerateDegreeError,
                     InconsistentDegreeError, NumericGuardError,
                     TagMismatchError)

DEFAULT_N = 10_000
CONSTANT_SPREAD_FACTOR = 10.0


# ---------------------------------------------------------------------------
# pointwise Cesaro estimation
# ---------------------------------------------------------------------------

@dataclass
class DegreeEstimate:
    """Cesaro average at N with its half-length partial for diagnostics."""

    value: G.AlgebraElement
    half: G.AlgebraElement
    n_used: int

    @property
    def diagnostic(self) -> np.ndarray:
        """Per-point ||estimate_N - estimate_{N/2}||; shrinks as N grows."""
        return G.algebra_norm(G.AlgebraElement(
            self.value.group, self.value.payload - self.half.payload))


def degree_pointwise(c: D.Cocycle, flow: D.TranslationFlow, x: D.BasePoint,
                     N: int = DEFAULT_N) -> DegreeEstimate:
    """(1/N) sum_{n<N} Ad_{phi^(n)(x)} M(F_n x), batched over x.

    The orbit is walked once, accumulating the running product phi^(n)
    and the transferred M-field term by term; a snapshot at floor(N/2)
    provides the convergence diagnostic.
    """
    if N < 1:
        raise ConfigError("N must be >= 1")
    group = c.group
    half_n = max(N // 2, 1)
    phases = np.array(x.phases)
    alpha = flow.alpha_array
    g = G.identity(group, phases.shape[:-1])
    total = np.zeros_like(c.m_field(phases))
    half = total
    for n in range(N):
        term = G.ad(g, G.AlgebraElement(group, c.m_field(phases))).payload
        total = total + term
        if n + 1 == half_n:
            half = total / half_n
        g = G.group_mul(g, G.GroupElement(group, c.value(phases)))
        if (n + 1) % 256 == 0:
            g = G.maybe_renormalize(g)
        phases = np.mod(phases + alpha, 1.0)
    return DegreeEstimate(G.AlgebraElement(group, total / N),
                          G.AlgebraElement(group, half), N)


@dataclass
class DegreeField:
    """Degree estimates on a family of sample points.

    `constant` is granted when the cross-point spread stays within
    CONSTANT_SPREAD_FACTOR times the worst per-point convergence
    diagnostic — a self-consistency criterion, not a proof.
    """

    points: D.BasePoint
    values: G.AlgebraElement
    n_used: int
    diagnostics: np.ndarray
    spread: float
    constant: bool

    @property
    def mean_value(self) -> G.AlgebraElement:
        return G.AlgebraElement(self.values.group,
                                np.mean(self.values.payload, axis=0))

    @property
    def norms(self) -> np.ndarray:
        return G.algebra_norm(self.values)


def _pairwise_spread(values: G.AlgebraElement) -> float:
    payload = values.payload
    diff = payload[:, None] - payload[None, :]
    return float(np.max(G.algebra_norm(G.AlgebraElement(values.group, diff))))


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(int(threads), 1)
    env = os.environ.get("LIEDEG_THREADS", "")
    try:
        return max(int(env), 1) if env else 1
    except ValueError:
        return 1


def degree_field(c: D.Cocycle, flow: D.TranslationFlow, points: D.BasePoint,
                 N: int = DEFAULT_N, threads: int | None = None) -> DegreeField:
    """Degree estimates over a point family, optionally thread-parallel.

    Points are processed in fixed order; each point's orbit sum is
    independent of the others, so results are identical for any thread
    count (set LIEDEG_THREADS or pass `threads`).
    """
    phases = np.atleast_2d(points.phases)
    n_threads = _thread_count(threads)
    if n_threads == 1 or phases.shape[0] == 1:
        est = degree_pointwise(c, flow, D.BasePoint(phases), N)
        values, diags = est.value, est.diagnostic
    else:
        chunks = np.array_split(np.arange(phases.shape[0]),
                                min(n_threads, phases.shape[0]))
        chunks = [ch for ch in chunks if ch.size]

        def run(idx):
            return degree_pointwise(c, flow, D.BasePoint(phases[idx]), N)

        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            parts = list(pool.map(run, chunks))
        values = G.AlgebraElement(
            c.group, np.concatenate([p.value.payload for p in parts], axis=0))
        diags = np.concatenate([p.diagnostic for p in parts], axis=0)
    spread = _pairwise_spread(values)
    tol = CONSTANT_SPREAD_FACTOR * max(float(np.max(diags)), 1e-12)
    return DegreeField(D.BasePoint(phases), values, N, diags, spread,
                       constant=spread <= tol)


# ---------------------------------------------------------------------------
# constant closed forms
# ---------------------------------------------------------------------------

def degree_constant_diagonal(c: D.Cocycle, quadrature: D.QuadratureSpec,
                             d: int | None = None) -> G.AlgebraElement:
    """Quadrature of the M-field over the base torus: the constant-degree
    closed form on the diagonal route (base map uniquely ergodic and the
    composed representation diagonal)."""
    dim = d if d is not None else _cocycle_base_dim(c, quadrature)
    pts = D.quadrature_points(quadrature, dim)
    return G.AlgebraElement(c.group, np.mean(c.m_field(pts), axis=0))


def degree_constant_ergodic(c: D.Cocycle, quadrature: D.QuadratureSpec,
                            d: int | None = None) -> G.AlgebraElement:
    """Ad-average projection of the integrated M-field: the constant-degree
    closed form on the ergodic route (whole skew product uniquely ergodic).
    Identically zero for SU(2)/SO(3), where no Ad-invariant vector exists."""
    return G.p_ad(degree_constant_diagonal(c, quadrature, d))


def _cocycle_base_dim(c: D.Cocycle, quadrature: D.QuadratureSpec) -> int:
    # probe the value callable for the base dimension it accepts
    for d in (1, 2, 3):
        try:
            c.value(np.zeros((1, d)))
            return d
        except Exception:
            continue
    raise ConfigError("could not infer base dimension; pass d explicitly")


# ---------------------------------------------------------------------------
# spectral floor a_{phi,pi}
# ---------------------------------------------------------------------------

def _hermitian_part(rep: R.Representation, Z: G.AlgebraElement) -> np.ndarray:
    ortho = replace(rep, convention=R.ORTHONORMAL)
    H = 1j * R.rep_differential(ortho, Z).matrix
    return 0.5 * (H + np.conj(H.T))


def a_phi_pi(rep: R.Representation, degree) -> float:
    """Spectral floor: the smallest eigenvalue of (i dpi(degree))^2.

    For a constant degree this is (min |eigenvalue of i dpi(M_star)|)^2;
    for a DegreeField it is the minimum over the sample points — a grid
    surrogate for the essential infimum (see DegreeReport diagnostics).
    Always computed in the orthonormal convention, where i dpi of an
    algebra element is Hermitian.
    """
    if isinstance(degree, DegreeField):
        best = math.inf
        for i in range(degree.values.payload.shape[0]):
            Z = G.AlgebraElement(degree.values.group, degree.values.payload[i])
            lam = np.linalg.eigvalsh(_hermitian_part(rep, Z))
            best = min(best, float(np.min(lam ** 2)))
        return best
    lam = np.linalg.eigvalsh(_hermitian_part(rep, degree))
    return float(np.min(lam ** 2))


def kernel_indices(rep: R.Representation, M_star: G.AlgebraElement,
                   rel_tol: float = 1e-9) -> list[int]:
    """Indices of near-zero eigenvalues of i dpi(M_star), ascending by
    eigenvalue; empty when the differential is injective on the line."""
    lam = np.linalg.eigvalsh(_hermitian_part(rep, M_star))
    scale = max(1.0, float(np.max(np.abs(lam))))
    return [int(i) for i in np.where(np.abs(lam) <= rel_tol * scale)[0]]


# ---------------------------------------------------------------------------
# invariance checks
# ---------------------------------------------------------------------------

def invariance_check_cohomology(phi: D.Cocycle, delta: D.Cocycle,
                                zeta: D.Cocycle, flow: D.TranslationFlow,
                                N: int, points: D.BasePoint) -> dict:
    """Degrees of cohomologous cocycles are conjugate:
    (P_delta M_delta)(x) = Ad_{zeta(x)} (P_phi M_phi)(x), with equal norms.

    Reports the max deviation of both statements at estimator level,
    alongside the Cesaro diagnostics that bound what 'zero' means here.
    """
    est_d = degree_pointwise(delta, flow, points, N)
    est_p = degree_pointwise(phi, flow, points, N)
    z = G.GroupElement(zeta.group, zeta.value(points.phases))
    moved = G.ad(z, est_p.value)
    dev_conj = G.algebra_norm(G.AlgebraElement(
        delta.group, est_d.value.payload - moved.payload))
    dev_norm = np.abs(G.algebra_norm(est_d.value) - G.algebra_norm(est_p.value))
    return {
        "max_conjugation_deviation": float(np.max(dev_conj)),
        "max_norm_deviation": float(np.max(dev_norm)),
        "cesaro_diagnostic_delta": float(np.max(est_d.diagnostic)),
        "cesaro_diagnostic_phi": float(np.max(est_p.diagnostic)),
        "n_used": N,
    }


@dataclass(frozen=True)
class Homomorphism:
    """A group homomorphism h with its differential dh, in the payload
    calculus: `value_map` sends domain group payload(s) to codomain
    payload, `alg_map` the same on algebra payloads."""

    name: str
    codomain: G.GroupSpec
    value_map: Callable
    alg_map: Callable


def hom_identity(group: G.GroupSpec) -> Homomorphism:
    return Homomorphism("identity", group, lambda p: p, lambda z: z)


def hom_torus_power(d: int, p: int) -> Homomorphism:
    """y -> y^p componentwise on the d-torus; dh = p * id."""
    return Homomorphism(f"torus-power p={p}", G.torus_group(d),
                        lambda payload: payload ** p,
                        lambda z: p * z)


def hom_so3_circle_u2() -> Homomorphism:
    """(R, w) -> sqrt(w) lift(R) into U(2) (defined up to central sign).

    Payloads are pairs: value_map takes (R_payload, w_payload) with w the
    unit-circle coordinate of shape (..., 1); alg_map takes
    (S_payload, v_payload) and returns lift(S)/1 + (v/2) I with lift the
    inverse of the double-cover differential.  The differential is
    single-valued even though the value map has a sign ambiguity.
    """
    def value_map(pair):
        Rp, wp = pair
        return G.iso_so3_torus_to_u2(
            G.GroupElement(G.SO3_GROUP, Rp), wp[..., 0], +1).payload

    def alg_map(pair):
        Sp, vp = pair
        half_lift = 0.5 * G.su2_alg_from_components(G.so3_alg_components(Sp))
        return half_lift + 0.5 * vp[..., 0][..., None, None] * np.eye(2)

    return Homomorphism("so3-circle-to-u2", G.U2_GROUP, value_map, alg_map)


def hom_apply_cocycle(h: Homomorphism, delta) -> D.Cocycle:
    """Compose a cocycle (or an (so3, torus) pair) with a homomorphism."""
    if isinstance(delta, tuple):
        rot, tor = delta
        if rot.group.tag != G.SO3 or tor.group.tag != G.TORUS or tor.group.torus_dim != 1:
            raise TagMismatchError("pair homomorphisms expect (so3, torus-1) cocycles")

        def value(ph):
            return h.value_map((rot.value(ph), tor.value(ph)))

        def m_field(ph):
            return h.alg_map((rot.m_field(ph), tor.m_field(ph)))

        return D.Cocycle(h.codomain, value, m_field,
                         rot.freq_bound + tor.freq_bound,
                         name=f"{h.name}[{rot.name}, {tor.name}]",
                         branch_discontinuous=True)
    return D.Cocycle(h.codomain, lambda ph: h.value_map(delta.value(ph)),
                     lambda ph: h.alg_map(delta.m_field(ph)),
                     delta.freq_bound, name=f"{h.name}[{delta.name}]",
                     branch_discontinuous=delta.branch_discontinuous)


def invariance_check_homomorphism(delta, h: Homomorphism,
                                  flow: D.TranslationFlow, N: int,
                                  points: D.BasePoint) -> dict:
    """Degrees intertwine with homomorphisms: P(h.delta) = dh(P delta).

    `delta` is a cocycle or an (so3, torus) pair; the composed cocycle's
    degree is estimated directly and compared with dh applied to the
    component degree estimate(s), pointwise.
    """
    composed = hom_apply_cocycle(h, delta)
    est_comp = degree_pointwise(composed, flow, points, N)
    if isinstance(delta, tuple):
        est_parts = tuple(degree_pointwise(c, flow, points, N) for c in delta)
        pushed = h.alg_map(tuple(e.value.payload for e in est_parts))
        diag = max(float(np.max(e.diagnostic)) for e in est_parts)
    else:
        est = degree_pointwise(delta, flow, points, N)
        pushed = h.alg_map(est.value.payload)
        diag = float(np.max(est.diagnostic))
    dev = G.algebra_norm(G.AlgebraElement(
        composed.group, est_comp.value.payload - pushed))
    return {
        "max_deviation": float(np.max(dev)),
        "cesaro_diagnostic_composed": float(np.max(est_comp.diagnostic)),
        "cesaro_diagnostic_domain": diag,
        "n_used": N,
        "hom": h.name,
        "pushed_degree": pushed,
        "composed_degree": est_comp.value.payload,
    }


# ---------------------------------------------------------------------------
# SU(2): the norm invariant and the straightening construction
# ---------------------------------------------------------------------------

def rho_phi(field: DegreeField) -> dict:
    """Norm of the SU(2) degree field: mean of ||degree(x)|| with the max
    deviation from that mean (the norm is constant a.e. in the limit)."""
    if field.values.group.tag != G.SU2:
        raise TagMismatchError("rho_phi is an SU(2) invariant")
    norms = field.norms
    rho = float(np.mean(norms))
    return {
        "rho": rho,
        "max_norm_deviation": float(np.max(np.abs(norms - rho))),
        "n_used": field.n_used,
        "cesaro_diagnostic": float(np.max(field.diagnostics)),
    }


def _su2_components(payload: np.ndarray):
    # D = [[i a, b + i c], [-b + i c, -i a]]
    a = np.imag(payload[..., 0, 0])
    b = np.real(payload[..., 0, 1])
    cc = np.imag(payload[..., 0, 1])
    return a, b, cc


def su2_transfer_zeta(Dz: G.AlgebraElement, rho, branch_tol: float = 1e-9,
                      norm_tol: float = 1e-6) -> G.GroupElement:
    """The unitary that conjugates D in su(2) to diag(i rho, -i rho).

    Three branches: a = rho (identity), a = -rho (quarter turn), and the
    generic closed form dividing by |b + ic|; `rho` may be scalar or
    per-point.  Guards: ||D|| must equal rho within `norm_tol`; the
    generic branch cannot meet b + ic = 0 when the norms are consistent.
    Post-condition Ad_zeta(D) = diag(i rho, -i rho) is verified to 1e-8.
    """
    if Dz.group.tag != G.SU2:
        raise TagMismatchError("transfer construction lives in su(2)")
    a, b, cc = _su2_components(Dz.payload)
    rho_arr = np.broadcast_to(np.asarray(rho, dtype=float), a.shape)
    if np.any(rho_arr <= 0):
        raise DegenerateDegreeError("transfer requires rho > 0")
    norms = np.sqrt(a * a + b * b + cc * cc)
    if np.max(np.abs(norms - rho_arr)) > norm_tol:
        raise InconsistentDegreeError(
            f"||D|| deviates from rho by {np.max(np.abs(norms - rho_arr)):.3e}")

    plus = np.abs(a - rho_arr) <= branch_tol
    minus = np.abs(a + rho_arr) <= branch_tol
    generic = ~(plus | minus)
    bc_abs = np.hypot(b, cc)
    if np.any(generic & (bc_abs == 0.0)):
        raise InconsistentDegreeError(
            "b + ic vanished on a non-degenerate branch; degree data corrupt")

    z1 = np.where(plus, 1.0 + 0j, 0.0 + 0j).astype(complex)
    z2 = np.where(minus, -1.0 + 0j, 0.0 + 0j).astype(complex)
    if np.any(generic):
        with np.errstate(divide="ignore", invalid="ignore"):
            unit = np.where(bc_abs > 0, (b - 1j * cc) / np.where(bc_abs > 0, bc_abs, 1.0), 0.0)
            zg1 = 1j * np.sqrt(np.clip((rho_arr + a) / (2 * rho_arr), 0.0, None)) * unit
            zg2 = np.sqrt(np.clip((rho_arr - a) / (2 * rho_arr), 0.0, None)) + 0j
        z1 = np.where(generic, zg1, z1)
        z2 = np.where(generic, zg2, z2)
    zeta = G.GroupElement(G.SU2_GROUP, np.stack([z1, z2], axis=-1))

    target = rho_arr[..., None, None] * G.E3  # diag(i rho, -i rho)
    moved = G.ad(zeta, Dz).payload
    worst = float(np.max(np.abs(moved - target)))
    if worst > 1e-8:
        raise NumericGuardError(f"transfer post-condition failed at {worst:.3e}")
    return zeta


def su2_straighten(phi: D.Cocycle, flow: D.TranslationFlow, N: int,
                   grid: D.BasePoint, rho_threshold: float = 1e-3) -> dict:
    """Conjugate an SU(2) cocycle toward diagonal form on a grid.

    Estimates the degree at the grid points and their unit-time shifts,
    builds the pointwise transfer unitaries zeta, and forms
    delta(x) = zeta(x) phi(x) zeta(F_1 x)^{-1}; for exact degree data
    delta is exactly diagonal, so the reported max off-diagonal magnitude
    measures the degree-estimation error amplified by the conditioning of
    the transfer construction.
    """
    if phi.group.tag != G.SU2:
        raise TagMismatchError("straightening lives in SU(2)")
    phases = np.atleast_2d(grid.phases)
    shifted = np.mod(phases + flow.alpha_array, 1.0)
    both = D.BasePoint(np.concatenate([phases, shifted], axis=0))
    est = degree_pointwise(phi, flow, both, N)
    n_pts = phases.shape[0]
    norms = G.algebra_norm(est.value)
    rho_est = float(np.mean(norms[:n_pts]))
    if rho_est <= rho_threshold:
        raise DegenerateDegreeError(
            f"estimated rho {rho_est:.3e} below threshold {rho_threshold:.0e}")
    # per-point norms as rho: keeps the transfer guards self-consistent
    zeta_all = su2_transfer_zeta(est.value, norms)
    zeta_here = G.GroupElement(G.SU2_GROUP, zeta_all.payload[:n_pts])
    zeta_next = G.GroupElement(G.SU2_GROUP, zeta_all.payload[n_pts:])
    phi_vals = G.GroupElement(G.SU2_GROUP, phi.value(phases))
    delta = G.group_mul(G.group_mul(zeta_here, phi_vals), G.group_inv(zeta_next))
    off_diag = float(np.max(np.abs(delta.payload[..., 1])))
    diag_mag = float(np.min(np.abs(delta.payload[..., 0])))
    cesaro = float(np.max(est.diagnostic))
    return {
        "delta_values": delta,
        "zeta_values": zeta_here,
        "grid": D.BasePoint(phases),
        "rho_estimate": rho_est,
        "max_off_diagonal": off_diag,
        "min_diagonal_magnitude": diag_mag,
        "cesaro_diagnostic": cesaro,
        "conditioning_ratio": off_diag / cesaro if cesaro > 0 else float("inf"),
        "n_used": N,
        "interpolation_note": ("delta sampled on the grid only; use the "
                               "manufactured pathway for a closed form"),
    }


# ---------------------------------------------------------------------------
# ergodicity obstructions
# ---------------------------------------------------------------------------

NOT_UNIQUELY_ERGODIC_A = "NOT_UNIQUELY_ERGODIC(a)"
NOT_UNIQUELY_ERGODIC_B = "NOT_UNIQUELY_ERGODIC(b)"
NOT_ERGODIC_C = "NOT_ERGODIC(c)"
NO_OBSTRUCTION = "NO_OBSTRUCTION"


def ergodicity_verdict(group: G.GroupSpec, integral_M: G.AlgebraElement,
                       degree_nonzero: bool,
                       flow_uniquely_ergodic: bool = False) -> dict:
    """Obstruction verdict for the skew product.

    (a) nonzero degree whose Ad-average projection vanishes rules out
    unique ergodicity; (b) nonzero degree over a centerless connected
    group (SU(2), SO(3)) does the same; either upgrades to a failure of
    plain ergodicity (c) when the base flow is flagged uniquely ergodic.
    These are necessary-condition reports, never ergodicity certificates.
    """
    verdict = NO_OBSTRUCTION
    why = "no obstruction detected (not an ergodicity certificate)"
    if degree_nonzero:
        centered = float(G.algebra_norm(G.p_ad(integral_M)))
        if group.tag in (G.SU2, G.SO3):
            verdict = NOT_UNIQUELY_ERGODIC_B
            why = ("nonzero degree over a group with trivial center "
                   "direction: no invariant vector survives averaging")
        elif centered <= 1e-9:
            verdict = NOT_UNIQUELY_ERGODIC_A
            why = ("nonzero degree while the Ad-averaged integral of the "
                   "M-field vanishes")
        if verdict != NO_OBSTRUCTION and flow_uniquely_ergodic:
            verdict = NOT_ERGODIC_C
            why += "; base flow uniquely ergodic, so ergodicity itself fails"
    return {"verdict": verdict, "justification": why}


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------

def _matrix_json(payload: np.ndarray):
    arr = np.atleast_1d(payload)
    if arr.ndim == 1:
        return [[float(np.real(v)), float(np.imag(v))] for v in arr]
    return [[[float(np.real(v)), float(np.imag(v))] for v in row]
            for row in arr]


def degree_report(group: G.GroupSpec, M_star: G.AlgebraElement,
                  reps: Sequence[R.Representation], verdict: dict,
                  n_used: int, constant_form: str,
                  diagnostics: dict | None = None) -> dict:
    """JSON-ready summary of a degree computation.

    `constant_form` names the route that justified treating the degree as
    constant: 'diagonal-route', 'ergodic-route', 'pointwise-cesaro', or
    'manufactured'.
    """
    per_rep = []
    for rep in reps:
        lam = np.linalg.eigvalsh(_hermitian_part(rep, M_star))
        per_rep.append({
            "label": rep.name,
            "eigenvalues": [float(v) for v in lam],
            "a_phi_pi": a_phi_pi(rep, M_star),
            "kernel_indices": kernel_indices(rep, M_star),
        })
    return {
        "group": group.name,
        "M_star": _matrix_json(M_star.payload),
        "per_rep": per_rep,
        "verdict": verdict["verdict"],
        "justification": verdict["justification"],
        "N_used": n_used,
        "constant_form": constant_form,
        "diagnostics": diagnostics or {},
    }
