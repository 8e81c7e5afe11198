"""Base dynamics and cocycles over torus translation flows.

The base system is the linear flow F_t(x) = x + t*alpha on the torus
[0,1)^d; its time-one map drives all skew products.  A cocycle is a map
phi from the base into one of the compact groups together with its
logarithmic derivative along the flow, the M-field

    M_phi(x) = (d/dt phi(F_t x))|_{t=0} * phi(x)^{-1},

which every built-in supplies in closed form (and `validate_m_field`
cross-checks by central differences).  Iterates follow

    phi^(n)(x)  = phi(x) phi(F_1 x) ... phi(F_{n-1} x),   n >= 1,
    phi^(0)     = e,
    phi^(-n)(x) = (phi^(n)(F_{-n} x))^{-1}.

Cocycle `value`/`m_field` callables map a phases array of shape (..., d)
to a batched group/algebra payload; BasePoint wrappers carry phases
reduced mod 1.  Built-in constructors take the flow because the M-field
closed forms contain alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import groups as G
from .errors import ConfigError, TagMismatchError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
EQUISPACED = "EQUISPACED"


@dataclass
class BasePoint:
    """Point(s) on the torus; phases shape (..., d), entries in [0, 1)."""

    phases: np.ndarray

    def __post_init__(self):
        self.phases = np.mod(np.asarray(self.phases, dtype=float), 1.0)

    @property
    def dim(self) -> int:
        return self.phases.shape[-1]


def base_point(*phases) -> BasePoint:
    if len(phases) == 1 and np.ndim(phases[0]) >= 1:
        return BasePoint(np.asarray(phases[0], dtype=float))
    return BasePoint(np.array(phases, dtype=float))


@dataclass(frozen=True)
class TranslationFlow:
    alpha: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in np.atleast_1d(self.alpha)))

    @property
    def dim(self) -> int:
        return len(self.alpha)

    @property
    def alpha_array(self) -> np.ndarray:
        return np.array(self.alpha)


def default_flow(d: int = 1) -> TranslationFlow:
    """Golden rotation for d=1; (golden, sqrt(2)-1) for d=2."""
    if d == 1:
        return TranslationFlow((GOLDEN,))
    if d == 2:
        return TranslationFlow((GOLDEN, math.sqrt(2.0) - 1.0))
    raise ConfigError("default flows provided for d = 1, 2 only")


def flow_advance(flow: TranslationFlow, x: BasePoint, t: float) -> BasePoint:
    if x.dim != flow.dim:
        raise TagMismatchError("flow and point dimensions differ")
    return BasePoint(x.phases + t * flow.alpha_array)


@dataclass(frozen=True)
class QuadratureSpec:
    """Equispaced product grid on the torus, nodes_per_dim per dimension.

    Exact for trigonometric polynomials of per-dimension degree below
    nodes_per_dim; callers size it by the rule
    nodes >= 2 * (coefficient degree + N * cocycle degree) + 1.
    """

    nodes_per_dim: int
    kind: str = EQUISPACED

    def __post_init__(self):
        if self.kind != EQUISPACED:
            raise ConfigError(f"unsupported quadrature kind {self.kind!r}")
        if self.nodes_per_dim < 1:
            raise ConfigError("nodes_per_dim must be positive")


def quadrature_points(spec: QuadratureSpec, d: int) -> np.ndarray:
    """Grid phases, shape (nodes_per_dim^d, d); weights are uniform."""
    m = spec.nodes_per_dim
    grids = np.meshgrid(*([np.arange(m) / m] * d), indexing="ij")
    return np.stack([gr.ravel() for gr in grids], axis=-1)


@dataclass(frozen=True)
class Cocycle:
    """Group-valued cocycle generator with its M-field.

    `value` / `m_field` act on raw phase arrays (..., d) and return
    batched payloads; `freq_bound` is the per-dimension trigonometric
    degree of the matrix entries of phi in the defining representation,
    used by the correlation quadrature sizing rule.
    """

    group: G.GroupSpec
    value: Callable[[np.ndarray], np.ndarray]
    m_field: Callable[[np.ndarray], np.ndarray] | None
    freq_bound: int
    name: str = ""
    smoothness_note: str = "real-analytic trigonometric polynomial"
    branch_discontinuous: bool = False


def cocycle_value(c: Cocycle, x: BasePoint) -> G.GroupElement:
    return G.GroupElement(c.group, c.value(x.phases))


def cocycle_m_field(c: Cocycle, x: BasePoint) -> G.AlgebraElement:
    if c.m_field is None:
        raise ConfigError(f"cocycle {c.name!r} carries no M-field")
    return G.AlgebraElement(c.group, c.m_field(x.phases))


def cocycle_iterate(c: Cocycle, flow: TranslationFlow, x: BasePoint, n: int) -> G.GroupElement:
    """phi^(n) over the time-one map of the flow, any integer n."""
    if n == 0:
        return G.identity(c.group, x.phases.shape[:-1])
    if n < 0:
        shifted = flow_advance(flow, x, float(n))
        return G.group_inv(cocycle_iterate(c, flow, shifted, -n))
    alpha = flow.alpha_array
    phases = np.array(x.phases)
    g = G.GroupElement(c.group, c.value(phases))
    for k in range(1, n):
        phases += alpha
        phases %= 1.0
        g = G.group_mul(g, G.GroupElement(c.group, c.value(phases)))
        if k % 256 == 0:
            g = G.maybe_renormalize(g)
    return G.maybe_renormalize(g)


def skew_step(c: Cocycle, flow: TranslationFlow, x: BasePoint,
              g: G.GroupElement, n: int = 1) -> tuple[BasePoint, G.GroupElement]:
    """n-th power of the skew product: (x, g) -> (F_n x, g * phi^(n)(x))."""
    return flow_advance(flow, x, float(n)), G.group_mul(g, cocycle_iterate(c, flow, x, n))


def w_apply(c: Cocycle, flow: TranslationFlow,
            f: Callable[[BasePoint], G.AlgebraElement], n: int,
            x: BasePoint) -> G.AlgebraElement:
    """Transfer operator on algebra-valued fields, evaluated at x:
    (W^n f)(x) = Ad_{phi^(n)(x)} f(F_n x).  Batched x is supported when
    f maps batched points to matching batched algebra elements."""
    gn = cocycle_iterate(c, flow, x, n)
    return G.ad(gn, f(flow_advance(flow, x, float(n))))


def validate_m_field(c: Cocycle, flow: TranslationFlow, x: BasePoint,
                     h: float = 1e-4) -> dict:
    """Central-difference check of the declared M-field.

    Computes (phi(F_h x) - phi(F_{-h} x)) / 2h * phi(x)^{-1}, projects it
    onto the algebra, and compares with `m_field`; also reruns at h/2 and
    reports the error ratio (should be ~4 for the O(h^2) scheme).
    """
    declared = c.m_field(x.phases)

    def fd(step):
        plus = c.value(flow_advance(flow, x, step).phases)
        minus = c.value(flow_advance(flow, x, -step).phases)
        if c.group.tag == G.TORUS:
            raw = (plus - minus) / (2 * step) * np.conj(c.value(x.phases))
            return 1j * np.imag(raw)
        if c.group.tag == G.SU2:
            plus, minus = G.su2_matrix(plus), G.su2_matrix(minus)
            here = G.su2_matrix(c.value(x.phases))
        else:
            here = c.value(x.phases)
        raw = (plus - minus) / (2 * step) @ np.conj(np.swapaxes(here, -1, -2))
        skew = 0.5 * (raw - np.conj(np.swapaxes(raw, -1, -2)))
        if c.group.tag == G.SO3:
            skew = np.real(skew)
        return skew

    err_h = float(np.max(np.abs(fd(h) - declared)))
    err_h2 = float(np.max(np.abs(fd(h / 2) - declared)))
    ratio = err_h / err_h2 if err_h2 > 0 else float("inf")
    return {"max_deviation": err_h, "deviation_half_step": err_h2,
            "ratio": ratio, "h": h}


def cohomologous_build(delta: Cocycle, zeta: Cocycle, flow: TranslationFlow,
                       name: str = "") -> Cocycle:
    """The cocycle phi(x) = zeta(x)^{-1} delta(x) zeta(F_1 x).

    Its M-field follows from the product rule,

      M_phi = -Ad_{zeta^{-1}} ( M_zeta - M_delta - Ad_delta (M_zeta o F_1) ),

    so degree data of phi and delta are conjugate by zeta.
    """
    if zeta.group != delta.group:
        raise TagMismatchError("zeta and delta must share the group")
    group = zeta.group
    alpha = flow.alpha_array

    def value(phases: np.ndarray) -> np.ndarray:
        zl = G.GroupElement(group, zeta.value(phases))
        dm = G.GroupElement(group, delta.value(phases))
        zr = G.GroupElement(group, zeta.value(np.mod(phases + alpha, 1.0)))
        return G.group_mul(G.group_mul(G.group_inv(zl), dm), zr).payload

    m_field = None
    if zeta.m_field is not None and delta.m_field is not None:
        def m_field(phases: np.ndarray) -> np.ndarray:
            zl = G.GroupElement(group, zeta.value(phases))
            dm = G.GroupElement(group, delta.value(phases))
            mz1 = G.AlgebraElement(group, zeta.m_field(np.mod(phases + alpha, 1.0)))
            inner = (-zeta.m_field(phases) + delta.m_field(phases)
                     + G.ad(dm, mz1).payload)
            return G.ad(G.group_inv(zl), G.AlgebraElement(group, inner)).payload

    return Cocycle(group, value, m_field,
                   freq_bound=2 * zeta.freq_bound + delta.freq_bound,
                   name=name or f"cohomologous[{zeta.name} ; {delta.name}]")


# ---------------------------------------------------------------------------
# built-in cocycle library
# ---------------------------------------------------------------------------

def _winding(k, d):
    k = np.asarray(k, dtype=int)
    if k.ndim == 0:
        k = k[None]
    if k.ndim != 1 or (d is not None and k.shape[0] != d):
        raise ConfigError(f"winding vector must have length {d}")
    return k


def torus_monomial(flow: TranslationFlow, k, theta0=None) -> Cocycle:
    """Torus-valued phi(x)_j = exp(2 pi i (k_j . x + theta0_j)); k is an
    integer matrix of shape (d', d) (a vector means d' = 1)."""
    k = np.atleast_2d(np.asarray(k, dtype=int))
    if k.shape[1] != flow.dim:
        raise ConfigError(f"winding matrix needs {flow.dim} columns")
    dprime = k.shape[0]
    th = np.zeros(dprime) if theta0 is None else np.asarray(theta0, dtype=float)
    const = 2j * np.pi * (k @ flow.alpha_array)

    def value(phases):
        return np.exp(2j * np.pi * (phases @ k.T + th))

    def m_field(phases):
        return np.broadcast_to(const, phases.shape[:-1] + (dprime,)).copy()

    return Cocycle(G.torus_group(dprime), value, m_field,
                   int(np.max(np.abs(k))), name=f"torus-monomial k={k.tolist()}")


def torus_power(c: Cocycle, p: int) -> Cocycle:
    """phi -> phi^p for torus-valued cocycles (entrywise power)."""
    if c.group.tag != G.TORUS:
        raise TagMismatchError("torus_power applies to torus cocycles")
    return Cocycle(c.group, lambda ph: c.value(ph) ** p,
                   (lambda ph: p * c.m_field(ph)) if c.m_field else None,
                   abs(p) * c.freq_bound, name=f"({c.name})^{p}")


def su2_diagonal(flow: TranslationFlow, k, theta0: float = 0.0) -> Cocycle:
    """diag(e^{i theta(x)}, e^{-i theta(x)}) with theta = 2 pi k.x + theta0."""
    k = _winding(k, flow.dim)
    mconst = G.su2_alg_from_components(
        np.array([0.0, 0.0, 2 * np.pi * float(k @ flow.alpha_array)]))

    def value(phases):
        th = 2 * np.pi * (phases @ k) + theta0
        z1 = np.exp(1j * th)
        return np.stack([z1, np.zeros_like(z1)], axis=-1)

    def m_field(phases):
        return np.broadcast_to(mconst, phases.shape[:-1] + (2, 2)).copy()

    return Cocycle(G.SU2_GROUP, value, m_field, int(np.max(np.abs(k))),
                   name=f"su2-diagonal k={k.tolist()}")


def su2_twisted_diagonal(flow: TranslationFlow, k, c0: float = 0.7) -> Cocycle:
    """exp(c0 E1) * diag(e^{i theta(x)}, e^{-i theta(x)}), theta = 2 pi k.x.

    A transfer-function model: conjugating a diagonal cocycle by this map
    produces degree fields whose E3-component stays at cos(2 c0) times the
    norm, uniformly away from the degenerate straightening branches.
    """
    k = _winding(k, flow.dim)
    front = np.array([math.cos(c0), math.sin(c0)], dtype=complex)  # exp(c0 E1)
    fmat = G.su2_matrix(front)
    mconst = 2 * np.pi * float(k @ flow.alpha_array) * (fmat @ G.E3 @ np.conj(fmat.T))

    def value(phases):
        th = 2 * np.pi * (phases @ k)
        z = np.exp(1j * th)
        return np.stack([front[0] * z, front[1] * np.conj(z)], axis=-1)

    def m_field(phases):
        return np.broadcast_to(mconst, phases.shape[:-1] + (2, 2)).copy()

    return Cocycle(G.SU2_GROUP, value, m_field, int(np.max(np.abs(k))),
                   name=f"su2-twisted-diagonal k={k.tolist()} c0={c0}")


def su2_two_angle(flow: TranslationFlow, m1, m2, c1: float = 0.0,
                  c2: float = 0.0) -> Cocycle:
    """exp(theta1(x) E1) exp(theta2(x) E2), theta_i = 2 pi m_i.x + c_i.

    M-field: theta1' E1 + theta2' Ad_{exp(theta1 E1)} E2 with constant
    theta_i' = 2 pi m_i . alpha; genuinely x-dependent when m1 != 0.
    """
    m1 = _winding(m1, flow.dim)
    m2 = _winding(m2, flow.dim)
    t1p = 2 * np.pi * float(m1 @ flow.alpha_array)
    t2p = 2 * np.pi * float(m2 @ flow.alpha_array)

    def angles(phases):
        return (2 * np.pi * (phases @ m1) + c1, 2 * np.pi * (phases @ m2) + c2)

    def value(phases):
        th1, th2 = angles(phases)
        # exp(t E1) = (cos t, sin t); exp(t E2) = (cos t, -i sin t)
        a = np.stack([np.cos(th1), np.sin(th1)], axis=-1).astype(complex)
        b = np.stack([np.cos(th2), -1j * np.sin(th2)], axis=-1)
        ga = G.GroupElement(G.SU2_GROUP, a)
        gb = G.GroupElement(G.SU2_GROUP, b)
        return G.group_mul(ga, gb).payload

    def m_field(phases):
        th1, _ = angles(phases)
        a = np.stack([np.cos(th1), np.sin(th1)], axis=-1).astype(complex)
        amat = G.su2_matrix(a)
        ade2 = amat @ G.E2 @ np.conj(np.swapaxes(amat, -1, -2))
        return t1p * G.E1 + t2p * ade2

    return Cocycle(G.SU2_GROUP, value, m_field,
                   int(np.max(np.abs(m1)) + np.max(np.abs(m2))),
                   name=f"su2-two-angle m1={m1.tolist()} m2={m2.tolist()}")


def so3_x3_rotation(flow: TranslationFlow, k, theta0: float = 0.0) -> Cocycle:
    """Rotation about the x3 axis by theta(x) = 2 pi k.x + theta0."""
    k = _winding(k, flow.dim)
    mconst = G.so3_alg_from_components(
        np.array([0.0, 0.0, 2 * np.pi * float(k @ flow.alpha_array)]))

    def value(phases):
        th = 2 * np.pi * (phases @ k) + theta0
        c, s = np.cos(th), np.sin(th)
        out = np.zeros(th.shape + (3, 3))
        out[..., 0, 0], out[..., 0, 1] = c, s
        out[..., 1, 0], out[..., 1, 1] = -s, c
        out[..., 2, 2] = 1.0
        return out

    def m_field(phases):
        return np.broadcast_to(mconst, phases.shape[:-1] + (3, 3)).copy()

    return Cocycle(G.SO3_GROUP, value, m_field, int(np.max(np.abs(k), initial=0)),
                   name=f"so3-x3-rotation k={k.tolist()}")


def u2_product(flow: TranslationFlow, k_torus, k_rot, theta0: float = 0.0) -> Cocycle:
    """U(2) cocycle assembled from an x3-rotation factor with winding
    k_rot (angle 2 pi k_rot.x + theta0) and a torus factor with winding
    k_torus, through (R, w) -> sqrt(w) lift(R).

    When k_torus = k_rot (mod 2) componentwise, the two square-root sign
    jumps cancel and the result is the continuous diagonal cocycle

        diag(e^{i pi (k_torus+k_rot).x + i theta0/2},
             e^{i pi (k_torus-k_rot).x - i theta0/2});

    otherwise no continuous branch exists: the value falls back to the
    pointwise principal-branch construction, with the discontinuity
    recorded on the returned cocycle for downstream reporting.
    """
    kt = _winding(k_torus, flow.dim)
    kr = _winding(k_rot, flow.dim)
    matched = bool(np.all((kt - kr) % 2 == 0))
    kp, km = kt + kr, kt - kr
    mconst = np.diag([1j * np.pi * float(kp @ flow.alpha_array),
                      1j * np.pi * float(km @ flow.alpha_array)])

    if matched:
        def value(phases):
            a = np.pi * (phases @ kp) + theta0 / 2
            b = np.pi * (phases @ km) - theta0 / 2
            out = np.zeros(a.shape + (2, 2), dtype=complex)
            out[..., 0, 0] = np.exp(1j * a)
            out[..., 1, 1] = np.exp(1j * b)
            return out
    else:
        def value(phases):
            w = np.exp(2j * np.pi * (phases @ kt))
            th = 2 * np.pi * (phases @ kr) + theta0
            c, s = np.cos(th), np.sin(th)
            R = np.zeros(th.shape + (3, 3))
            R[..., 0, 0], R[..., 0, 1] = c, s
            R[..., 1, 0], R[..., 1, 1] = -s, c
            R[..., 2, 2] = 1.0
            u = G.iso_so3_torus_to_u2(G.GroupElement(G.SO3_GROUP, R), w, +1)
            return u.payload

    def m_field(phases):
        return np.broadcast_to(mconst, phases.shape[:-1] + (2, 2)).copy()

    if matched:
        # entries wind as exp(i pi k.x) with k even, i.e. degree |k|/2
        freq = int(max(np.max(np.abs(kp)), np.max(np.abs(km)))) // 2
    else:
        freq = int(np.max(np.abs(kt)) + np.max(np.abs(kr)))
    return Cocycle(G.U2_GROUP, value, m_field, max(freq, 1),
                   name=f"u2-product k_torus={kt.tolist()} k_rot={kr.tolist()}",
                   smoothness_note=("real-analytic trigonometric polynomial" if matched
                                    else "discontinuous branch cut (parity mismatch)"),
                   branch_discontinuous=not matched)


def u2_scalar_su2(flow: TranslationFlow, k_scalar, inner: Cocycle) -> Cocycle:
    """e^{2 pi i k.x} times an SU(2) cocycle, as a U(2) cocycle."""
    if inner.group.tag != G.SU2:
        raise TagMismatchError("inner cocycle must be SU2-valued")
    k = _winding(k_scalar, flow.dim)
    dconst = 2j * np.pi * float(k @ flow.alpha_array)

    def value(phases):
        z = np.exp(2j * np.pi * (phases @ k))
        return z[..., None, None] * G.su2_matrix(inner.value(phases))

    def m_field(phases):
        return dconst * np.eye(2) + inner.m_field(phases)

    return Cocycle(G.U2_GROUP, value, m_field if inner.m_field else None,
                   int(np.max(np.abs(k))) + inner.freq_bound,
                   name=f"u2-scalar k={k.tolist()} times [{inner.name}]")
