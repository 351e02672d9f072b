"""Constructive tools for U(p,q).

Witt extension of partial isometries, transitivity witnesses, the
non-isotropic dilations, and the factorization of an automorphism into
block-unitary factors and dilations.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ._config import resolve
from ._validation import check_square_matrix, check_vector
from .core import (
    Signature,
    VectorClass,
    classify_vector,
    gram_matrix,
    null_space,
    orthonormal_columns,
    projective_distance,
)
from .exceptions import NotSelfMapError, PreconditionError, RankDeficientError
from .selfmap import Verdict, classify

GRAM_MATCH_TOL = 1e-10


def membership_residual(F, sig):
    """``|F^H H F - H|_F``."""
    return float(np.linalg.norm(gram_matrix(F, sig) - sig.form))


# ------------------------------------------------------------------ Witt


@dataclass(frozen=True)
class PartialIsometry:
    """Linear map ``Y -> C^{p,q}`` given on a basis of ``Y``; must preserve the form."""

    domain_basis: np.ndarray
    images: np.ndarray
    signature: Signature

    def __post_init__(self):
        Y = np.atleast_2d(np.asarray(self.domain_basis, dtype=complex))
        Z = np.atleast_2d(np.asarray(self.images, dtype=complex))
        if Y.shape != Z.shape or Y.shape[0] != self.signature.n:
            raise PreconditionError(f"basis shape {Y.shape} and image shape {Z.shape} must both be (p+q, k)")
        object.__setattr__(self, "domain_basis", Y)
        object.__setattr__(self, "images", Z)

    @property
    def gram_mismatch(self):
        G1 = gram_matrix(self.domain_basis, self.signature)
        G2 = gram_matrix(self.images, self.signature)
        scale = max(np.linalg.norm(G1), np.linalg.norm(G2), 1.0)
        return float(np.linalg.norm(G1 - G2) / scale)


def _h_orthonormal(P, sig, tol):
    """Columns spanning ``P`` with Gram ``diag(+1.., -1..)``; returns ``(basis, signs)``."""
    if P.shape[1] == 0:
        return P, np.zeros(0)
    G = gram_matrix(P, sig)
    w, V = np.linalg.eigh(0.5 * (G + G.conj().T))
    if np.min(np.abs(w)) <= tol.rank * max(np.max(np.abs(w)), 1e-300):
        raise RankDeficientError("subspace is degenerate where a non-degenerate one was expected")
    order = np.argsort(-np.sign(w), kind="stable")
    w, V = w[order], V[:, order]
    return (P @ V) / np.sqrt(np.abs(w))[None, :], np.sign(w)


def _complement(X, sig, tol):
    """Orthonormal basis of the H-orthogonal complement of ``span(X)``."""
    Q = orthonormal_columns(X, tol) if X.shape[1] else X
    return null_space(Q.conj().T * sig.diag[None, :], tol.rank)


def _radical_split(Y, Z, sig, tol):
    """Rebase ``(Y, Z)`` so that ``Y = [Y0 | R]`` with ``Y0`` H-orthonormal and ``R`` the radical."""
    G = gram_matrix(Y, sig)
    w, V = np.linalg.eigh(0.5 * (G + G.conj().T))
    scale = max(np.max(np.abs(w)), np.max(np.linalg.norm(Y, axis=0)) ** 2, 1e-300)
    rad = np.abs(w) <= tol.rank * scale * 10
    nd = ~rad
    order = np.r_[np.flatnonzero(nd & (w > 0)), np.flatnonzero(nd & (w < 0)), np.flatnonzero(rad)]
    w, V = w[order], V[:, order]
    k0 = int(np.sum(nd))
    D = np.ones(len(w))
    D[:k0] = 1.0 / np.sqrt(np.abs(w[:k0]))
    T = V * D[None, :]
    return Y @ T, Z @ T, k0


def _hyperbolic_partner(R, W, sig):
    """Vectors ``T`` in ``span(W)`` with ``R^H H T = I`` and ``T^H H T = 0``."""
    A = R.conj().T @ (sig.diag[:, None] * W)
    C = np.linalg.lstsq(A, np.eye(R.shape[1]), rcond=None)[0]
    T0 = W @ C
    X = gram_matrix(T0, sig)
    return T0 - 0.5 * R @ X


def witt_extend(f, sig=None, tol=None):
    """Extend a partial isometry to ``F`` in U(p,q) with ``F y_i = f(y_i)``.

    The domain is split into a non-degenerate part and its radical; each
    radical vector is completed to a hyperbolic pair in the complement of
    the non-degenerate part (on both sides), and the resulting
    non-degenerate bases are extended by H-orthonormal bases of their
    complements, matching +1 with +1 and -1 with -1.
    """
    tol = resolve(tol)
    sig = sig or f.signature
    if f.gram_mismatch > GRAM_MATCH_TOL * 10 and f.gram_mismatch > 1e-9:
        raise PreconditionError(f"not an isometric embedding (Gram mismatch {f.gram_mismatch:.3e})")
    Y, Z = f.domain_basis, f.images
    orthonormal_columns(Y, tol, "domain basis")
    n = sig.n
    if Y.shape[1] == 0:
        return np.eye(n, dtype=complex)
    Yr, Zr, k0 = _radical_split(Y, Z, sig, tol)
    Y0, R = Yr[:, :k0], Yr[:, k0:]
    Z0, S = Zr[:, :k0], Zr[:, k0:]
    if R.shape[1]:
        T = _hyperbolic_partner(R, _complement(Y0, sig, tol), sig)
        U = _hyperbolic_partner(S, _complement(Z0, sig, tol), sig)
        X1 = np.hstack([Y0, R, T])
        X2 = np.hstack([Z0, S, U])
    else:
        X1, X2 = Y0, Z0
    P1, s1 = _h_orthonormal(_complement(X1, sig, tol), sig, tol)
    P2, s2 = _h_orthonormal(_complement(X2, sig, tol), sig, tol)
    if P1.shape[1] != P2.shape[1] or np.any(s1 != s2):
        raise PreconditionError("complement signatures differ; the map is not an isometric embedding")
    B1 = np.hstack([X1, P1])
    B2 = np.hstack([X2, P2])
    F = np.linalg.solve(B1.T, B2.T).T
    F = _nearest_extension(F, P1, P2, s1, sig)
    return _refine_isometry(F, Y, sig)


def _refine_isometry(F, Y, sig, steps=4):
    """Newton steps towards U(p,q) that keep ``F Y`` unchanged.

    With ``R = F^H H F - H`` the update is ``F <- F (I + H(A - R/2))`` where
    the anti-Hermitian ``A`` solves ``A Y = R Y / 2``; that kills the first
    order defect while ``(A - R/2) Y = 0``.  Needed when the domain is
    nearly degenerate and the split bases above are badly conditioned.
    """
    Q, Rq = np.linalg.qr(Y)
    Hd = sig.diag
    best, best_res = F, membership_residual(F, sig)
    for _ in range(steps):
        if best_res <= 1e-14 * sig.n:
            break
        R = gram_matrix(F, sig) - sig.form
        R = 0.5 * (R + R.conj().T)
        V = np.linalg.solve(Rq.T, (0.5 * R @ Y).T).T
        A = V @ Q.conj().T - Q @ V.conj().T
        F = F + F @ (Hd[:, None] * (A - 0.5 * R))
        res = membership_residual(F, sig)
        if res >= best_res:
            break
        best, best_res = F, res
    return best


def _nearest_extension(F, P1, P2, signs, sig):
    """Use the U(k+) x U(k-) freedom on the complement to minimize ``|F - I|_F``.

    ``F = F_a + P2 U Q`` with ``Q = J P1^H H``; the optimal block ``U`` is
    ``-V W^H`` from the SVD ``Q (F_a - I)^H P2 = W S V^H`` of each sign
    block.  Near-degenerate domains have nearly null complements, where an
    arbitrary phase would blow up ``|F|`` and the rounding with it.
    """
    if P1.shape[1] == 0:
        return F
    Q = signs[:, None] * (P1.conj().T * sig.diag[None, :])
    Fa = F - P2 @ Q
    M = Q @ (Fa - np.eye(sig.n)).conj().T @ P2
    U = np.zeros_like(M)
    for sg in (1.0, -1.0):
        idx = np.flatnonzero(signs == sg)
        if idx.size:
            W, _, Vh = np.linalg.svd(M[np.ix_(idx, idx)])
            U[np.ix_(idx, idx)] = -(Vh.conj().T @ W.conj().T)
    return Fa + P2 @ U @ Q


def witt_residuals(F, f, sig):
    """``(isometry residual, interpolation residual)``, both relative."""
    iso = membership_residual(F, sig) / math.sqrt(sig.n)
    Y, Z = f.domain_basis, f.images
    interp = float(np.linalg.norm(F @ Y - Z) / max(np.linalg.norm(Z), np.linalg.norm(Y), 1e-300))
    return iso, interp


# ------------------------------------------------------------------ transitivity


def transitivity_witness(src, dst, sig, tol=None):
    """``F`` in U(p,q) with ``[F src] = [dst]``.

    Both points must have the same class.  Negative (exterior) points are
    accepted as well: the same construction applies there even though the
    transitivity statement is only about the domain and its boundary.
    """
    tol = resolve(tol)
    src = check_vector(src, sig, "src")
    dst = check_vector(dst, sig, "dst")
    c1 = classify_vector(src, sig, tol)
    c2 = classify_vector(dst, sig, tol)
    if c1.kind is not c2.kind:
        raise PreconditionError(f"class mismatch: {c1.kind.value} vs {c2.kind.value}")
    if c1.kind is VectorClass.NULL:
        k = 1.0
    else:
        ns = np.real(np.vdot(src, sig.diag * src))
        nd = np.real(np.vdot(dst, sig.diag * dst))
        k = math.sqrt(ns / nd)
    if projective_distance(src, dst) <= 1e-14:
        return np.eye(sig.n, dtype=complex)
    f = PartialIsometry(src[:, None], k * dst[:, None], sig)
    return witt_extend(f, sig, tol)


def _cross_product_zero(a, b, scale):
    return abs(np.vdot(b, a)) <= GRAM_MATCH_TOL * scale


def double_transitivity_witness(v1, v2, w1, w2, sig, tol=None):
    """``F`` with ``[F v_j] = [w_j]`` for two pairs of distinct boundary points, or ``None``.

    Such an ``F`` exists iff ``v_1, v_2`` and ``w_1, w_2`` are both
    orthogonal pairs or both non-orthogonal pairs.
    """
    tol = resolve(tol)
    vs = [check_vector(x, sig, name) for x, name in ((v1, "v1"), (v2, "v2"), (w1, "w1"), (w2, "w2"))]
    for x in vs:
        if classify_vector(x, sig, tol).kind is not VectorClass.NULL:
            raise PreconditionError("all four points must be null vectors")
    v1, v2, w1, w2 = [x / np.linalg.norm(x) for x in vs]
    if projective_distance(v1, v2) <= 1e-8 or projective_distance(w1, w2) <= 1e-8:
        raise PreconditionError("points in each pair must be projectively distinct")
    a = np.vdot(v2, sig.diag * v1)  # v2^H H v1
    b = np.vdot(w2, sig.diag * w1)
    za, zb = abs(a) <= GRAM_MATCH_TOL, abs(b) <= GRAM_MATCH_TOL
    if za != zb:
        return None
    if za:
        W1 = w1
    else:
        W1 = (a / b) * w1
    f = PartialIsometry(np.column_stack([v1, v2]), np.column_stack([W1, w2]), sig)
    return witt_extend(f, sig, tol)


# ------------------------------------------------------------------ dilations


@dataclass(frozen=True)
class DilationParams:
    a: float
    b: float
    slot: int = 1

    def __post_init__(self):
        if self.a < 1 - 1e-12 or self.b < 0:
            raise ValueError("dilation needs a >= 1 and b >= 0")
        if abs(self.a * self.a - self.b * self.b - 1.0) > 1e-12 * max(1.0, self.a * self.a):
            raise ValueError(f"a^2 - b^2 must equal 1, got {self.a * self.a - self.b * self.b!r}")

    @classmethod
    def from_rapidity(cls, t, slot=1):
        return cls(math.cosh(t), math.sinh(abs(t)), slot)


def dilation(params, sig):
    """Involutive dilation mixing coordinate ``slot`` with the last one."""
    if not 1 <= params.slot <= sig.p:
        raise PreconditionError(f"slot must be in 1..{sig.p}, got {params.slot}")
    n = sig.n
    j = params.slot - 1
    M = np.eye(n, dtype=complex)
    M[j, j] = params.a
    M[j, n - 1] = -params.b
    M[n - 1, j] = params.b
    M[n - 1, n - 1] = -params.a
    return M


def _haar_unitary(rng, k):
    Z = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / math.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))[None, :]


def block_diag_unitary(U1, U2):
    p, q = U1.shape[0], U2.shape[0]
    U = np.zeros((p + q, p + q), dtype=complex)
    U[:p, :p] = U1
    U[p:, p:] = U2
    return U


def random_u_pq(sig, seed, t_max=2.0, unitary_parts=True):
    """Random element of U(p,q) as a word ``U_{p+1} M_p ... M_1 U_1``.

    Block-unitary parts come from QR of complex Gaussian matrices and the
    dilations use ``a = cosh t`` with ``t`` uniform on ``[0, t_max]``.
    ``t_max=0`` with ``unitary_parts=False`` gives the identity.
    """
    rng = np.random.default_rng(seed)
    p, q = sig.p, sig.q
    n = sig.n

    def unit():
        if not unitary_parts:
            return np.eye(n, dtype=complex)
        return block_diag_unitary(_haar_unitary(rng, p), _haar_unitary(rng, q))

    flip = np.ones(n)
    flip[-1] = -1.0
    F = unit()
    for j in range(1, p + 1):
        t = rng.uniform(0.0, t_max) if t_max > 0 else 0.0
        # the sign flip on the last coordinate is block unitary; with it the
        # step is a boost that reduces to I at t = 0
        F = unit() @ (dilation(DilationParams.from_rapidity(t, j), sig) * flip[None, :]) @ F
    return F


# ------------------------------------------------------------------ normal form


@dataclass(frozen=True)
class Factor:
    kind: str  # "unitary_block" | "dilation"
    matrix: np.ndarray
    params: Optional[DilationParams] = None


@dataclass(frozen=True)
class FactorSequence:
    """Factors ``U_{p+1}, M_p, U_p, ..., M_1, U_1`` (left to right).

    ``scale * product(factors)`` reproduces the input matrix.
    """

    factors: List[Factor]
    signature: Signature
    scale: float = 1.0
    dilations: List[Tuple[float, float]] = field(default_factory=list)

    def product(self):
        P = np.eye(self.signature.n, dtype=complex)
        for fac in self.factors:
            P = P @ fac.matrix
        return self.scale * P

    def word(self):
        p = self.signature.p
        names = [f"U{p + 1}"]
        for j in range(p, 0, -1):
            names += [f"M{j}", f"U{j}"]
        return " ".join(names)

    def reduced_word(self, atol=1e-12):
        """``word()`` without the unitary factors that equal the identity to ``atol``."""
        I = np.eye(self.signature.n)
        keep = [
            name
            for name, f in zip(self.word().split(), self.factors)
            if f.kind != "unitary_block" or np.max(np.abs(f.matrix - I)) > atol
        ]
        return " ".join(keep) or "I"


def phase_aligned_error(A, B):
    """``min_phi |A - e^{i phi} B|_F``."""
    ip = np.vdot(B, A)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.linalg.norm(A - phase * B))


def _align_to(x, target):
    """Unitary ``U`` with ``U x = |x| e_target`` (phase fix then Householder)."""
    k = x.shape[0]
    nx = np.linalg.norm(x)
    U = np.eye(k, dtype=complex)
    if nx == 0:
        return U
    xt = x[target]
    if abs(xt) > 0:
        U[target, target] = np.conj(xt) / abs(xt)
    xs = U @ x
    y = np.zeros(k, dtype=complex)
    y[target] = nx
    u = xs + y  # xs[target] >= 0, no cancellation
    nu = np.linalg.norm(u)
    P = np.eye(k, dtype=complex) - 2.0 * np.outer(u, u.conj()) / (nu * nu)
    # P maps xs -> -y
    return -P @ U


def normal_form(A, sig, tol=None):
    """Factor an automorphism as ``U_{p+1} M_p U_p ... M_1 U_1``.

    ``A`` is first rescaled into U(p,q).  At step ``j`` the vector
    ``v = C^{-1} e_j`` of the current matrix ``C`` is moved by a block
    unitary ``U_j`` to ``(|v'|, 0, ..., 0, |v''|)`` on the active
    coordinates, the dilation with ``(a, b) = (|v'|, |v''|)`` sends that
    to ``e_j``, and ``C <- C U_j^{-1} M_j`` fixes ``e_1..e_j``.
    """
    tol = resolve(tol)
    A = check_square_matrix(A, sig)
    report = classify(A, sig, tol)
    if report.verdict is not Verdict.AUTOMORPHISM:
        raise NotSelfMapError(f"normal_form needs an automorphism, got {report.verdict.value}")
    s = math.sqrt(report.isometry_constant)
    C = A / s
    p, q, n = sig.p, sig.q, sig.n
    Hd = sig.diag
    Us, Ms, params = [], [], []
    for j in range(p):
        # C^{-1} = H C^H H for C in U(p,q)
        v = Hd * (C.conj().T @ (Hd * np.eye(n)[:, j]))
        vp, vm = v[j:p], v[p:]
        a, b = np.linalg.norm(vp), np.linalg.norm(vm)
        # enforce a^2 - b^2 = 1 exactly against rounding in v
        a = math.sqrt(1.0 + b * b)
        U = block_diag_unitary(np.eye(p, dtype=complex), np.eye(q, dtype=complex))
        U[j:p, j:p] = _align_to(vp, 0)
        U[p:, p:] = _align_to(vm, q - 1)
        par = DilationParams(a, b, j + 1)
        Mj = dilation(par, sig)
        C = C @ U.conj().T @ Mj
        Us.append(U)
        Ms.append(Mj)
        params.append(par)
    # C now acts as the identity on e_1..e_p; clean the exact zeros
    U_last = C.copy()
    U_last[:p, :] = 0
    U_last[:, :p] = 0
    U_last[:p, :p] = np.eye(p)
    factors = [Factor("unitary_block", U_last)]
    for j in range(p - 1, -1, -1):
        factors.append(Factor("dilation", Ms[j], params[j]))
        factors.append(Factor("unitary_block", Us[j]))
    return FactorSequence(factors, sig, s, [(par.a, par.b) for par in params])


def is_block_unitary(U, sig, atol=1e-9):
    p = sig.p
    off = max(np.max(np.abs(U[:p, p:]), initial=0), np.max(np.abs(U[p:, :p]), initial=0))
    return off <= atol and membership_residual(U, sig) <= atol * math.sqrt(sig.n)
