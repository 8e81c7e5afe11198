"""Finite-dimensional unitary representations of the four groups.

Labels
------
TORUS(d)  integer frequency vector q, dimension 1 (characters)
SU2       integer l >= 0, dimension l+1 (action on binary forms of
          degree l in two variables)
SO3       integer l >= 0, dimension 2l+1 (Euler-angle Wigner matrices)
U2        pair (l, m), dimension l+1: u = z g with z^2 = det u maps to
          z^{2m-l} pi_l(g); the half-integer ambiguity cancels because
          pi_l(-g) = (-1)^l pi_l(g)

Conventions
-----------
ORTHONORMAL returns genuinely unitary homomorphisms (the monomial basis
normalized).  PAPER returns the matrix coefficients taken against the
*unnormalized* monomial basis p_j = w1^j w2^{l-j}, i.e. rescaled by
||p_j||*||p_k|| = sqrt(j!(l-j)!) sqrt(k!(l-k)!); those are the natural
Peter-Weyl matrix coefficients for that basis but are not multiplicative,
so homomorphism/unitarity checks always run in ORTHONORMAL.

For SU(2) the matrix is assembled from the expansion

    p_k((w1,w2) g) = sum_j c_jk(g) p_j,   g ~ (z1, z2),

whose coefficients are an explicit double sum in z1, conj(z1), z2,
conj(z2); the implementation tabulates the exponent patterns once per l
and evaluates all batch elements with power tables.  SO(3) uses the
Euler-angle Wigner formula with j, k in -l..l; the x3-rotation with
angle t maps to diag(e^{ijt}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import groups as G
from .errors import ConfigError, TagMismatchError
from .rng import RngHandle

ORTHONORMAL = "ORTHONORMAL"
PAPER = "PAPER"

L_CAP = 12  # factorial/binomial tables are precomputed up to this label


@dataclass(frozen=True)
class Representation:
    group: G.GroupSpec
    label: tuple[int, ...]
    convention: str = ORTHONORMAL

    def __post_init__(self):
        if self.convention not in (ORTHONORMAL, PAPER):
            raise ConfigError(f"unknown convention {self.convention!r}")
        tag = self.group.tag
        if tag == G.TORUS:
            if len(self.label) != self.group.torus_dim:
                raise ConfigError("torus label length must match torus_dim")
        elif tag in (G.SU2, G.SO3):
            if len(self.label) != 1 or self.label[0] < 0:
                raise ConfigError("label must be a single l >= 0")
            if self.label[0] > L_CAP:
                raise ConfigError(f"l > {L_CAP} not tabulated")
        else:
            if len(self.label) != 2 or self.label[0] < 0:
                raise ConfigError("U2 label is (l, m) with l >= 0")
            if self.label[0] > L_CAP:
                raise ConfigError(f"l > {L_CAP} not tabulated")

    @property
    def dim(self) -> int:
        tag = self.group.tag
        if tag == G.TORUS:
            return 1
        if tag == G.SO3:
            return 2 * self.label[0] + 1
        return self.label[0] + 1

    @property
    def name(self) -> str:
        tag = self.group.tag
        if tag == G.TORUS:
            return f"torus q={list(self.label)}"
        if tag == G.U2:
            return f"u2 (l,m)=({self.label[0]},{self.label[1]})"
        return f"{tag.lower()} l={self.label[0]}"


@dataclass
class RepMatrix:
    rep: Representation
    matrix: np.ndarray


def torus_rep(q, dim: int | None = None, convention: str = ORTHONORMAL) -> Representation:
    q = tuple(int(v) for v in np.atleast_1d(q))
    d = len(q) if dim is None else dim
    return Representation(G.torus_group(d), q, convention)


def su2_rep(l: int, convention: str = ORTHONORMAL) -> Representation:
    return Representation(G.SU2_GROUP, (int(l),), convention)


def so3_rep(l: int, convention: str = ORTHONORMAL) -> Representation:
    return Representation(G.SO3_GROUP, (int(l),), convention)


def u2_rep(l: int, m: int, convention: str = ORTHONORMAL) -> Representation:
    return Representation(G.U2_GROUP, (int(l), int(m)), convention)


def rep_weight(rep: Representation) -> int:
    """Frequency multiplier: matrix entries of pi(phi) have per-dimension
    trig degree <= rep_weight * (entry degree of phi itself)."""
    tag = rep.group.tag
    if tag == G.TORUS:
        return int(sum(abs(v) for v in rep.label))
    if tag in (G.SU2, G.SO3):
        return rep.label[0]
    l, m = rep.label
    return l + abs(2 * m - l)


# ---------------------------------------------------------------------------
# SU(2): expansion-coefficient tables
# ---------------------------------------------------------------------------

def _powers(z: np.ndarray, maxp: int) -> np.ndarray:
    out = np.empty(z.shape + (maxp + 1,), dtype=complex)
    out[..., 0] = 1.0
    for p in range(1, maxp + 1):
        out[..., p] = out[..., p - 1] * z
    return out


@lru_cache(maxsize=None)
def _su2_table(l: int):
    p1, p2, p3, p4, coeff, flat = [], [], [], [], [], []
    for k in range(l + 1):
        for m in range(k + 1):
            for n in range(l - k + 1):
                j = m + n
                p1.append(m)
                p2.append(l - k - n)
                p3.append(n)
                p4.append(k - m)
                coeff.append(math.comb(k, m) * math.comb(l - k, n))
                flat.append(j * (l + 1) + k)
    nt = len(coeff)
    scatter = np.zeros((nt, (l + 1) ** 2))
    scatter[np.arange(nt), np.array(flat)] = 1.0
    norms = np.array([math.sqrt(math.factorial(j) * math.factorial(l - j))
                      for j in range(l + 1)])
    return (np.array(p1), np.array(p2), np.array(p3), np.array(p4),
            np.array(coeff, dtype=float), scatter, norms)


def _su2_c_matrix(l: int, payload: np.ndarray) -> np.ndarray:
    """Raw expansion coefficients c_jk(g); this matrix is multiplicative."""
    p1, p2, p3, p4, coeff, scatter, _ = _su2_table(l)
    z1, z2 = payload[..., 0], payload[..., 1]
    P1 = _powers(z1, l)
    P2 = _powers(np.conj(z1), l)
    P3 = _powers(z2, l)
    P4 = _powers(-np.conj(z2), l)
    vals = coeff * P1[..., p1] * P2[..., p2] * P3[..., p3] * P4[..., p4]
    flat = vals @ scatter
    return flat.reshape(payload.shape[:-1] + (l + 1, l + 1))


def su2_norms(l: int) -> np.ndarray:
    """Norms ||p_j|| = sqrt(j!(l-j)!) of the monomial basis."""
    return _su2_table(l)[6]


def _apply_convention_su2(c: np.ndarray, l: int, convention: str) -> np.ndarray:
    n = su2_norms(l)
    if convention == ORTHONORMAL:
        return c * (n[:, None] / n[None, :])
    return c * (n[:, None] ** 2)


# ---------------------------------------------------------------------------
# SO(3): Euler extraction and Wigner matrices
# ---------------------------------------------------------------------------

def so3_euler_angles(R: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angles (alpha, beta, gamma) with R = A(alpha) B(beta) C(gamma).

    A and C rotate about the x3 axis with first row (cos, sin, 0); B tilts
    about x2 with B[0,0] = cos(beta), B[0,2] = -sin(beta).  beta comes from
    atan2(hypot(R13, R23), R33), which stays fully conditioned where
    arccos(R33) would lose half the digits; at the gimbal points, gamma is
    set to 0 and the whole x3-rotation is reported in alpha.
    """
    R = np.asarray(R)
    g13, g23, g33 = R[..., 0, 2], R[..., 1, 2], R[..., 2, 2]
    sb = np.hypot(g13, g23)
    beta = np.arctan2(sb, g33)
    generic = sb > 1e-12
    alpha_g = np.arctan2(g23, -g13)
    gamma_g = np.arctan2(R[..., 2, 1], R[..., 2, 0])
    north = g33 > 0
    alpha_0 = np.arctan2(R[..., 0, 1], R[..., 0, 0])
    alpha_pi = np.arctan2(R[..., 0, 1], -R[..., 0, 0])
    alpha = np.where(generic, alpha_g, np.where(north, alpha_0, alpha_pi))
    gamma = np.where(generic, gamma_g, 0.0)
    return alpha, beta, gamma


def so3_from_euler(alpha, beta, gamma) -> np.ndarray:
    alpha, beta, gamma = np.broadcast_arrays(alpha, beta, gamma)
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    A = np.zeros(np.shape(alpha) + (3, 3))
    A[..., 0, 0], A[..., 0, 1] = ca, sa
    A[..., 1, 0], A[..., 1, 1] = -sa, ca
    A[..., 2, 2] = 1.0
    B = np.zeros_like(A)
    B[..., 0, 0], B[..., 0, 2] = cb, -sb
    B[..., 1, 1] = 1.0
    B[..., 2, 0], B[..., 2, 2] = sb, cb
    C = np.zeros_like(A)
    C[..., 0, 0], C[..., 0, 1] = cg, sg
    C[..., 1, 0], C[..., 1, 1] = -sg, cg
    C[..., 2, 2] = 1.0
    return A @ B @ C


@lru_cache(maxsize=None)
def _wigner_table(l: int):
    rows, cols, cpow, spow, coeff = [], [], [], [], []
    f = math.factorial
    for j in range(-l, l + 1):
        for k in range(-l, l + 1):
            pref = math.sqrt(f(l + k) * f(l - k) * f(l + j) * f(l - j))
            for m in range(max(0, k - j), min(l - j, l + k) + 1):
                rows.append(j + l)
                cols.append(k + l)
                cpow.append(2 * l + k - j - 2 * m)
                spow.append(2 * m + j - k)
                coeff.append((-1) ** m * pref
                             / (f(l - j - m) * f(l + k - m) * f(m) * f(m + j - k)))
    nt = len(coeff)
    d = 2 * l + 1
    scatter = np.zeros((nt, d * d))
    scatter[np.arange(nt), np.array(rows) * d + np.array(cols)] = 1.0
    return (np.array(cpow), np.array(spow), np.array(coeff, dtype=float), scatter)


def _wigner_d(l: int, half_cos: np.ndarray, half_sin: np.ndarray) -> np.ndarray:
    """Little-d matrix from cos(beta/2), sin(beta/2)."""
    cpow, spow, coeff, scatter = _wigner_table(l)
    C = _powers(half_cos.astype(complex), 2 * l)
    S = _powers(half_sin.astype(complex), 2 * l)
    vals = coeff * C[..., cpow] * S[..., spow]
    d = 2 * l + 1
    return np.real(vals @ scatter).reshape(half_cos.shape + (d, d))


def _so3_matrix(l: int, R: np.ndarray) -> np.ndarray:
    alpha, beta, gamma = so3_euler_angles(R)
    dmat = _wigner_d(l, np.cos(beta / 2), np.sin(beta / 2))
    jj = np.arange(-l, l + 1)
    row = np.exp(1j * jj * alpha[..., None])
    col = np.exp(1j * jj * gamma[..., None])
    return dmat * row[..., :, None] * col[..., None, :]


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def rep_eval_payload(rep: Representation, payload: np.ndarray) -> np.ndarray:
    """Representation matrix on raw payloads, batched over leading axes."""
    tag = rep.group.tag
    if tag == G.TORUS:
        q = np.array(rep.label)
        val = np.prod(payload ** q, axis=-1)
        return val[..., None, None]
    if tag == G.SU2:
        l = rep.label[0]
        return _apply_convention_su2(_su2_c_matrix(l, payload), l, rep.convention)
    if tag == G.SO3:
        return _so3_matrix(rep.label[0], payload)
    l, m = rep.label
    det = (payload[..., 0, 0] * payload[..., 1, 1]
           - payload[..., 0, 1] * payload[..., 1, 0])
    z = G.circle_sqrt(det)
    su2_payload = G.su2_from_matrix(payload / z[..., None, None])
    c = _su2_c_matrix(l, su2_payload)
    scaled = _apply_convention_su2(c, l, rep.convention)
    return (z ** (2 * m - l))[..., None, None] * scaled


def rep_eval(rep: Representation, g: G.GroupElement) -> RepMatrix:
    if g.group != rep.group:
        raise TagMismatchError(f"element in {g.group.name}, rep on {rep.group.name}")
    return RepMatrix(rep, rep_eval_payload(rep, g.payload))


def paper_element(rep: Representation, j: int, k: int, g: G.GroupElement) -> complex | np.ndarray:
    """Single matrix coefficient in the PAPER (unnormalized-basis) scaling."""
    tag = rep.group.tag
    if tag == G.TORUS:
        if j != 0 or k != 0:
            raise ConfigError("torus characters have the single index (0, 0)")
        row = col = 0
    elif tag == G.SO3:
        l = rep.label[0]
        if not (-l <= j <= l and -l <= k <= l):
            raise ConfigError(f"indices must lie in -{l}..{l}")
        row, col = j + l, k + l
    else:
        l = rep.label[0]
        if not (0 <= j <= l and 0 <= k <= l):
            raise ConfigError(f"indices must lie in 0..{l}")
        row, col = j, k
    paper = Representation(rep.group, rep.label, PAPER)
    mat = rep_eval_payload(paper, g.payload)
    val = mat[..., row, col]
    return complex(val) if val.ndim == 0 else val


# ---------------------------------------------------------------------------
# differential
# ---------------------------------------------------------------------------

def _diag_matrix(values: np.ndarray) -> np.ndarray:
    d = values.shape[-1]
    out = np.zeros(values.shape[:-1] + (d, d), dtype=complex)
    idx = np.arange(d)
    out[..., idx, idx] = values
    return out


def _paper_rescale(mat: np.ndarray, rep: Representation) -> np.ndarray:
    if rep.convention == ORTHONORMAL or rep.group.tag in (G.TORUS, G.SO3):
        return mat
    n = su2_norms(rep.label[0])
    return mat * (n[:, None] * n[None, :])


def rep_differential(rep: Representation, Z: G.AlgebraElement,
                     h: float = 1e-3) -> RepMatrix:
    """d pi (Z), closed forms for the standard diagonal data, Richardson-
    extrapolated central differences otherwise.

    Closed forms (ORTHONORMAL scaling; PAPER multiplies entry (j,k) by
    ||p_j|| ||p_k||):
      torus                 sum_i q_i Z_i
      su2,  Z=diag(is,-is)  diag(i s (2j - l)),        j = 0..l
      so3,  Z=a J3          diag(i j a),               j = -l..l
      u2,   Z=diag(is1,is2) diag(i[s1(m+j-l)+s2(m-j)]) j = 0..l
    """
    if Z.group != rep.group:
        raise TagMismatchError("algebra element and rep on different groups")
    tag = rep.group.tag
    p = Z.payload
    if tag == G.TORUS:
        q = np.array(rep.label)
        return RepMatrix(rep, np.sum(q * p, axis=-1)[..., None, None])
    if tag == G.SU2 and np.all(p[..., 0, 1] == 0):
        l = rep.label[0]
        s = np.imag(p[..., 0, 0])
        jj = np.arange(l + 1)
        diag = 1j * s[..., None] * (2 * jj - l)
        return RepMatrix(rep, _paper_rescale(_diag_matrix(diag), rep))
    if tag == G.SO3:
        a = G.so3_alg_components(p)
        if np.all(a[..., 0] == 0) and np.all(a[..., 1] == 0):
            l = rep.label[0]
            jj = np.arange(-l, l + 1)
            diag = 1j * a[..., 2:3] * jj
            return RepMatrix(rep, _diag_matrix(diag))
    if tag == G.U2 and np.all(p[..., 0, 1] == 0) and np.all(p[..., 1, 0] == 0):
        l, m = rep.label
        s1, s2 = np.imag(p[..., 0, 0]), np.imag(p[..., 1, 1])
        jj = np.arange(l + 1)
        diag = 1j * (s1[..., None] * (m + jj - l) + s2[..., None] * (m - jj))
        return RepMatrix(rep, _paper_rescale(_diag_matrix(diag), rep))

    def at(t):
        return rep_eval_payload(rep, G.exp_alg(G.AlgebraElement(Z.group, t * p)).payload)

    def central(step):
        return (-at(2 * step) + 8 * at(step) - 8 * at(-step) + at(-2 * step)) / (12 * step)

    d1 = central(h)
    d2 = central(h / 2)
    return RepMatrix(rep, (16 * d2 - d1) / 15)


# ---------------------------------------------------------------------------
# Peter-Weyl checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductQuadrature:
    """Euler-angle product rule: equispaced x3-angles, Gauss-Legendre in
    cos(beta).  Exact for matrix-element Grams up to l ~ nodes/4."""
    nodes: int = 64


@dataclass(frozen=True)
class MonteCarloQuadrature:
    samples: int = 100000
    seed: int = 20240816


def su2_euler_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Haar quadrature nodes/weights on SU(2), (n^3, 2) payload pairs."""
    alpha = 2 * np.pi * np.arange(n) / n
    gamma = 4 * np.pi * np.arange(n) / n
    u, w = np.polynomial.legendre.leggauss(n)
    hc = np.sqrt((1 + u) / 2)     # cos(beta/2)
    hs = np.sqrt((1 - u) / 2)     # sin(beta/2)
    A, H, C = np.meshgrid(alpha, np.arange(n), gamma, indexing="ij")
    hcg, hsg, wg = hc[H], hs[H], w[H]
    z1 = np.exp(0.5j * A) * hcg * np.exp(0.5j * C)
    z2 = np.exp(0.5j * A) * hsg * np.exp(-0.5j * C)
    payload = np.stack([z1.ravel(), z2.ravel()], axis=-1)
    weights = (wg / 2).ravel() / (n * n)
    return payload, weights


def so3_euler_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    alpha = 2 * np.pi * np.arange(n) / n
    gamma = 2 * np.pi * np.arange(n) / n
    u, w = np.polynomial.legendre.leggauss(n)
    A, U, C = np.meshgrid(alpha, u, gamma, indexing="ij")
    _, W, _ = np.meshgrid(alpha, w, gamma, indexing="ij")
    beta = np.arccos(np.clip(U, -1, 1))
    payload = so3_from_euler(A.ravel(), beta.ravel(), C.ravel())
    weights = (W / 2).ravel() / (n * n)
    return payload, weights


def _quadrature_nodes(group: G.GroupSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    tag = group.tag
    if tag == G.SU2:
        return su2_euler_nodes(n)
    if tag == G.SO3:
        return so3_euler_nodes(n)
    if tag == G.TORUS:
        d = group.torus_dim
        grids = np.meshgrid(*([np.arange(n) / n] * d), indexing="ij")
        ph = np.stack([g.ravel() for g in grids], axis=-1)
        payload = np.exp(2j * np.pi * ph)
        return payload, np.full(payload.shape[0], 1.0 / n ** d)
    # U2: circle times SU2 pushed through (z, g) -> z g
    su2_payload, su2_w = su2_euler_nodes(n)
    nz = 8
    z = np.exp(2j * np.pi * np.arange(nz) / nz)
    mats = G.su2_matrix(su2_payload)
    payload = (z[:, None, None, None] * mats[None]).reshape(-1, 2, 2)
    weights = np.tile(su2_w, nz) / nz
    return payload, weights


def peter_weyl_check(rep: Representation, scheme=None) -> dict:
    """Gram matrix of the matrix elements against Haar measure.

    For the orthonormal convention the exact Gram is I / dim.  Returns the
    max absolute deviation plus, for Monte Carlo, the per-entry standard
    error; the product rule is spectrally exact for tabulated labels, so
    its deviation is pure round-off.
    """
    scheme = ProductQuadrature() if scheme is None else scheme
    ortho = Representation(rep.group, rep.label, ORTHONORMAL)
    d = rep.dim
    if isinstance(scheme, MonteCarloQuadrature):
        g = G.haar_sample(rep.group, scheme.samples, RngHandle(scheme.seed))
        payload, weights = g.payload, np.full(scheme.samples, 1.0 / scheme.samples)
        mc = True
    else:
        payload, weights = _quadrature_nodes(rep.group, scheme.nodes)
        mc = False
    gram = np.zeros((d * d, d * d), dtype=complex)
    sq = np.zeros((d * d, d * d)) if mc else None
    chunk = 65536
    for lo in range(0, payload.shape[0], chunk):
        mats = rep_eval_payload(ortho, payload[lo:lo + chunk])
        flat = mats.reshape(mats.shape[0], d * d)
        w = weights[lo:lo + chunk]
        gram += (flat * w[:, None]).T @ np.conj(flat)
        if mc:
            sq += (np.abs(flat[:, :, None] * np.conj(flat[:, None, :])) ** 2
                   * w[:, None, None]).sum(axis=0).reshape(d * d, d * d)
    expected = np.eye(d * d) / d
    deviation = float(np.max(np.abs(gram - expected)))
    out = {
        "rep": rep.name,
        "dim": d,
        "scheme": "monte-carlo" if mc else "product",
        "n_nodes": int(payload.shape[0]),
        "max_abs_deviation": deviation,
    }
    if mc:
        var = np.maximum(sq - np.abs(gram) ** 2, 0.0)
        out["sigma"] = float(np.sqrt(np.max(var) / payload.shape[0]))
    return out
