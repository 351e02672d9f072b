"""r-planes in C^{p,q}: positivity, induced maps, sampling, invariant planes."""

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ._config import resolve
from ._validation import check_frame, check_positive_int
from .core import (
    Signature,
    VectorClass,
    _class_from_margin,
    normalized_margin,
    principal_angles,
    projective_normalize,
)
from .exceptions import ConvergenceError, DimensionError, NotSelfMapError, RankDeficientError
from .fixed_points import jordan_structure, _eigenspaces
from .selfmap import OracleResult, _as_candidate, _chunks, classify

PLANE_ANGLE_TOL = 1e-8
INVARIANCE_TOL = 1e-7
_MAX_REJECTION_ROUNDS = 200


class PlaneClass(str, Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemiDefinite"
    OTHER = "Indefinite/Other"


@dataclass(frozen=True, eq=False)
class PlaneFrame:
    """An r-plane given by a full-rank ``(p+q, r)`` frame."""

    frame: np.ndarray
    signature: Signature

    def __post_init__(self):
        Z = check_frame(self.frame, self.signature)
        s = np.linalg.svd(Z, compute_uv=False)
        if s[-1] <= resolve(None).rank * s[0]:
            raise RankDeficientError("plane frame is not of full column rank")
        object.__setattr__(self, "frame", Z)
        if self.signature.r != Z.shape[1]:
            object.__setattr__(self, "signature", self.signature.with_r(Z.shape[1]))

    @property
    def r(self):
        return self.frame.shape[1]

    @property
    def gram(self):
        Z = self.frame
        return Z.conj().T @ (self.signature.diag[:, None] * Z)

    def orthonormal(self):
        Q, _ = np.linalg.qr(self.frame)
        return Q

    def same_plane(self, other, atol=PLANE_ANGLE_TOL):
        if self.r != other.r:
            return False
        return float(np.max(principal_angles(self.frame, other.frame), initial=0.0)) <= atol


def _as_frame(Z, sig):
    if isinstance(Z, PlaneFrame):
        return Z
    return PlaneFrame(np.asarray(Z), sig)


def _class_from_gram_eigs(w, tol_null):
    if np.all(w > tol_null):
        return PlaneClass.POSITIVE_DEFINITE
    if np.all(w >= -tol_null):
        return PlaneClass.POSITIVE_SEMIDEFINITE
    return PlaneClass.OTHER


def classify_plane(Z, sig=None, tol=None):
    """Sign pattern of the Gram of an orthonormalized frame, with the null band."""
    tol = resolve(tol)
    P = _as_frame(Z, sig)
    Q = P.orthonormal()
    G = Q.conj().T @ (P.signature.diag[:, None] * Q)
    return _class_from_gram_eigs(np.linalg.eigvalsh(0.5 * (G + G.conj().T)), tol.null)


def induced_plane_map(M, Z, sig=None, tol=None):
    """Image frame ``M Z``; raises if the plane meets ``ker M``."""
    tol = resolve(tol)
    cand = _as_candidate(M, sig if sig is not None else getattr(Z, "signature", None))
    P = _as_frame(Z, cand.signature)
    W = cand.matrix @ P.frame
    s = np.linalg.svd(W, compute_uv=False)
    nZ = np.linalg.norm(P.frame, 2)
    if s[-1] <= tol.rank * max(np.linalg.norm(cand.matrix, 2) * nZ, 1e-300):
        raise RankDeficientError("the plane meets the kernel of M: the induced map is undefined here")
    return PlaneFrame(W, P.signature)


# ------------------------------------------------------------------ sampling


def _pd_mask(Z, sig, tol_null):
    """Mask of stacked frames ``Z[k]`` whose orthonormalized Gram is positive definite.

    With ``Z = QR`` the orthonormalized Gram is ``R^{-H} G R^{-1}``, so
    ``lambda_min > tol`` iff ``G - tol Z^H Z`` is positive definite
    (congruence keeps the inertia); no QR is needed.
    """
    ZH = np.conj(np.swapaxes(Z, -1, -2))
    A = ZH @ (sig.diag[:, None] * Z) - tol_null * (ZH @ Z)
    return _hpd_mask(0.5 * (A + np.conj(np.swapaxes(A, -1, -2))))


def _hpd_mask(A):
    """Positive definiteness of stacked Hermitian matrices: all elimination pivots positive."""
    A = A.copy()
    ok = np.ones(A.shape[:-2], dtype=bool)
    for k in range(A.shape[-1]):
        piv = A[..., k, k].real
        ok &= piv > 0
        if k + 1 < A.shape[-1]:
            safe = np.where(ok, piv, 1.0)
            col = A[..., k + 1 :, k]
            A[..., k + 1 :, k + 1 :] -= col[..., :, None] * np.conj(col)[..., None, :] / safe[..., None, None]
    return ok


def _chunk_positive_planes(sig, r, seed, chunk, count, tol, real=False):
    rng = np.random.default_rng(seed ^ chunk)
    out, have, drawn = [], 0, 0
    for _ in range(_MAX_REJECTION_ROUNDS):
        # size the batch from the acceptance rate seen so far
        rate = max(have / drawn, 0.01) if drawn else 0.25
        batch = int(math.ceil(1.2 * (count - have) / rate)) + 8
        shape = (batch, sig.n, r)
        if real:
            Z = rng.standard_normal(shape)
        else:
            Z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
        drawn += batch
        Z = Z[_pd_mask(Z, sig, tol.null)]
        out.append(Z)
        have += Z.shape[0]
        if have >= count:
            return np.concatenate(out)[:count]
    raise ConvergenceError(f"rejection sampling accepted only {have} of {count} positive {r}-planes")


def _check_r(sig, r):
    r = check_positive_int(r, "r")
    if r > sig.p:
        raise DimensionError(f"positive {r}-planes need r <= p = {sig.p}")
    return r


def sample_positive_planes(sig, r, samples, seed, tol=None, real=False):
    """Stack ``(samples, p+q, r)`` of positive-definite frames; chunk i seeded by ``seed ^ i``."""
    tol = resolve(tol)
    r = _check_r(sig, r)
    return np.concatenate([_chunk_positive_planes(sig, r, seed, i, c, tol, real) for i, c in _chunks(samples)])


def sample_positive_plane(sig, r, seed, tol=None):
    return PlaneFrame(sample_positive_planes(sig, r, 1, seed, tol)[0], sig.with_r(r))


def _first_bad_plane(M, Z, sig, tol):
    W = M @ Z
    s = np.linalg.svd(W, compute_uv=False)
    full = s[:, -1] > tol.rank * np.maximum(s[:, 0], 1e-300)
    good = np.zeros(len(W), dtype=bool)
    if np.any(full):
        good[full] = _pd_mask(W[full], sig, tol.null)
    if np.all(good):
        return None
    i = int(np.argmax(~good))
    return Z[i], W[i]


def oracle_selfmap_planes(M, r, samples=2000, seed=0, sig=None, tol=None, real=False):
    """Push sampled positive r-planes through ``M``; the first non-positive image is a counterexample.

    Chunks are scanned in order and the scan stops at the first bad one.
    """
    tol = resolve(tol)
    cand = _as_candidate(M, sig)
    r = _check_r(cand.signature, r)
    for i, c in _chunks(samples):
        Z = _chunk_positive_planes(cand.signature, r, seed, i, c, tol, real)
        hit = _first_bad_plane(cand.matrix, Z, cand.signature, tol)
        if hit is not None:
            return OracleResult(False, hit[0], hit[1], samples)
    return OracleResult(True, samples=samples)


# ------------------------------------------------------------------ invariant planes


@dataclass(frozen=True)
class ClosureFixedPoint:
    plane: PlaneFrame
    plane_class: PlaneClass
    invariance_angle: float
    vector: np.ndarray
    vector_class: VectorClass
    eigenvalue: complex


@dataclass(frozen=True)
class _Piece:
    vectors: np.ndarray  # columns; span is M-invariant
    eigenvalue: complex
    margin: float  # largest normalized form value among the eigenvectors
    eigenvectors: np.ndarray


def _canonical_in_span(B):
    """Projection of the first standard basis vector with nonzero component onto span(B)."""
    Q, _ = np.linalg.qr(B)
    for k in range(Q.shape[0]):
        v = Q @ Q[k].conj()
        if np.linalg.norm(v) > 1e-8:
            return v
    return Q[:, 0]


def _invariant_pieces(M, sig, tol):
    pieces = []
    normM = np.linalg.norm(M, 2)
    spaces = {complex(es.eigenvalue): es for es in _eigenspaces(M, sig, tol)}
    for jd in jordan_structure(M, sig, tol):
        lam = complex(jd.eigenvalue)
        if abs(lam) <= tol.rank * normM:
            continue
        es = spaces.get(lam)
        if es is not None:
            pos = es.form_values > tol.null
            if es.signature[0] == 0 and es.signature[1] == es.dim:
                # totally isotropic eigenspace: any basis works, prefer a canonical one
                v = _canonical_in_span(es.basis)
                pieces.append(_Piece(v[:, None], lam, normalized_margin(v, sig), v[:, None]))
                rest = es.basis - np.outer(v, v.conj() @ es.basis) / np.vdot(v, v)
                U, s, _ = np.linalg.svd(rest, full_matrices=False)
                for k in range(int(np.sum(s > 1e-8))):
                    u = U[:, k]
                    pieces.append(_Piece(u[:, None], lam, normalized_margin(u, sig), u[:, None]))
            else:
                for k in range(es.dim):
                    v = es.basis[:, k]
                    pieces.append(_Piece(v[:, None], lam, float(es.form_values[k]) if pos[k] else normalized_margin(v, sig), v[:, None]))
        for chain in jd.chains:
            for k in range(2, chain.shape[1] + 1):
                C = chain[:, :k]
                pieces.append(_Piece(C, lam, normalized_margin(C[:, 0], sig), C[:, :1]))
    pieces.sort(key=lambda pc: (-round(pc.margin, 12), round(abs(pc.eigenvalue), 12)))
    return pieces


def _plane_ok(E, sig, tol):
    Q, _ = np.linalg.qr(E)
    G = Q.conj().T @ (sig.diag[:, None] * Q)
    return float(np.min(np.linalg.eigvalsh(0.5 * (G + G.conj().T)))) >= -tol.null


def _stack(cols, pc):
    X = pc.vectors if cols is None else np.column_stack([cols, pc.vectors])
    return X


def _try_assemble(order, pieces, sig, tol):
    E = None
    used = []
    for idx in order:
        pc = pieces[idx]
        X = _stack(E, pc)
        if X.shape[1] > sig.p:
            continue
        if np.linalg.matrix_rank(X, tol=1e-8 * max(np.linalg.norm(X, 2), 1e-300)) < X.shape[1]:
            continue
        if not _plane_ok(X, sig, tol):
            continue
        E, used = X, used + [idx]
        if E.shape[1] == sig.p:
            return E, used
    return None, used


def _invariance_angle(M, E):
    ME = M @ E
    if np.linalg.matrix_rank(ME) < E.shape[1]:
        return math.inf
    return float(np.max(principal_angles(E, ME)))


def closure_fixed_plane_search(M, sig=None, tol=None, max_subsets=20000):
    """An M-invariant p-plane in the closure of the positive p-planes, and a fixed point in it.

    Invariant pieces (eigenvectors and Jordan chain prefixes for nonzero
    eigenvalues) are added greedily in order of decreasing positivity while
    the Gram stays positive semidefinite; if that stalls, subsets of pieces
    are tried exhaustively up to ``max_subsets``.
    """
    tol = resolve(tol)
    cand = _as_candidate(M, sig)
    A, sig = cand.matrix, cand.signature
    if not classify(cand, tol=tol).verdict.is_self_map:
        raise NotSelfMapError("closure_fixed_plane_search needs a linear self map")
    pieces = _invariant_pieces(A, sig, tol)
    E, used = _try_assemble(range(len(pieces)), pieces, sig, tol)
    if E is None:
        tried = 0
        for k in range(1, sig.p + 1):
            for combo in itertools.combinations(range(len(pieces)), k):
                tried += 1
                if tried > max_subsets:
                    break
                if sum(pieces[i].vectors.shape[1] for i in combo) != sig.p:
                    continue
                E, used = _try_assemble(combo, pieces, sig, tol)
                if E is not None:
                    break
            if E is not None or tried > max_subsets:
                break
    if E is None:
        raise ConvergenceError("no invariant positive semidefinite p-plane assembled from spectral data")
    angle = _invariance_angle(A, E)
    if angle > INVARIANCE_TOL:
        raise ConvergenceError(f"assembled plane is not invariant (principal angle {angle:.3e})")
    plane = PlaneFrame(E, sig.with_r(sig.p))
    pclass = classify_plane(plane, tol=tol)
    best = None
    for idx in used:
        pc = pieces[idx]
        for k in range(pc.eigenvectors.shape[1]):
            v = pc.eigenvectors[:, k]
            kind = _class_from_margin(normalized_margin(v, sig), tol.null)
            if kind is VectorClass.NEGATIVE:
                continue
            if best is None or (kind is VectorClass.POSITIVE and best[1] is not VectorClass.POSITIVE):
                best = (v, kind, pc.eigenvalue)
    if best is None:
        raise ConvergenceError("invariant plane contains no non-negative eigenvector")
    v, kind, lam = best
    return ClosureFixedPoint(plane, pclass, angle, projective_normalize(v), kind, lam)


def chart_coordinates(Z, sig=None):
    """Inhomogeneous coordinates ``W`` with ``Z ~ [I_p; W]`` (display only)."""
    P = _as_frame(Z, sig)
    p = P.signature.p
    top = P.frame[:p]
    if P.r != p or np.linalg.matrix_rank(top) < p:
        raise RankDeficientError("plane is not in the standard chart")
    return np.linalg.solve(top.T, P.frame[p:].T).T
