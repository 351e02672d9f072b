"""Linear algebra on C^{p,q}: the form diag(I_p, -I_q) and what it induces.

Conventions used throughout the package:

* vectors are 1-D complex arrays, subspace bases and plane frames are
  ``(p+q, k)`` arrays whose columns span the space;
* ``inner_product(u, v, sig) == v^H H u`` (second argument conjugated).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import schur

from ._config import resolve
from ._validation import check_frame, check_nonzero, check_vector, check_square_matrix
from .exceptions import (
    ClusteredSpectrumError,
    ConvergenceError,
    DimensionError,
    RankDeficientError,
)


@dataclass(frozen=True)
class Signature:
    """Signature ``(p, q)`` of the form, with optional plane dimension ``r``."""

    p: int
    q: int
    r: Optional[int] = None

    def __post_init__(self):
        for name in ("p", "q"):
            val = getattr(self, name)
            if not isinstance(val, (int, np.integer)) or val < 1:
                raise ValueError(f"{name} must be a positive integer, got {val!r}")
        if self.r is not None and not (1 <= self.r <= self.p):
            raise ValueError(f"r must satisfy 1 <= r <= p={self.p}, got {self.r!r}")

    @property
    def n(self):
        return self.p + self.q

    @property
    def form(self):
        """``H_{p,q}`` as a fresh float array."""
        return np.diag(np.r_[np.ones(self.p), -np.ones(self.q)])

    @property
    def diag(self):
        return np.r_[np.ones(self.p), -np.ones(self.q)]

    def with_r(self, r):
        return Signature(self.p, self.q, r)

    @classmethod
    def parse(cls, text):
        """Parse ``"p,q"`` or ``"p,q,r"``."""
        try:
            parts = [int(x) for x in str(text).split(",")]
        except ValueError:
            raise ValueError(f"cannot parse signature {text!r}") from None
        if len(parts) not in (2, 3):
            raise ValueError(f"signature needs 2 or 3 integers, got {text!r}")
        return cls(*parts)

    def __str__(self):
        return f"{self.p},{self.q}" + ("" if self.r is None else f",{self.r}")


def form_value(v, sig):
    """``v^H H v`` for a vector, or row-wise for a 2-D batch of row vectors."""
    v = np.asarray(v)
    w = np.abs(v) ** 2
    return np.sum(w[..., : sig.p], axis=-1) - np.sum(w[..., sig.p :], axis=-1)


def inner_product(u, v, sig):
    """Indefinite product ``v^H H u``."""
    u = check_vector(u, sig, "u")
    v = check_vector(v, sig, "v")
    return complex(np.vdot(v, sig.diag * u))


def gram_matrix(B, sig):
    """``B^H H B`` for a column basis ``B``."""
    B = np.asarray(B)
    return B.conj().T @ (sig.diag[:, None] * B)


class VectorClass(str, Enum):
    POSITIVE = "positive"
    NULL = "null"
    NEGATIVE = "negative"


class VectorClassification(NamedTuple):
    kind: VectorClass
    margin: float


def _class_from_margin(margin, tol_null):
    if margin > tol_null:
        return VectorClass.POSITIVE
    if margin < -tol_null:
        return VectorClass.NEGATIVE
    return VectorClass.NULL


def normalized_margin(v, sig):
    """``v^H H v / v^H v``; invariant under nonzero complex scaling."""
    scale = np.max(np.abs(v))
    w = v / scale
    return float(form_value(w, sig) / np.real(np.vdot(w, w)))


def classify_vector(v, sig, tol=None):
    """Positive / null / negative class of a nonzero vector."""
    tol = resolve(tol)
    v = check_nonzero(check_vector(v, sig), "v")
    margin = normalized_margin(v, sig)
    return VectorClassification(_class_from_margin(margin, tol.null), margin)


def orthonormal_columns(B, tol=None, name="basis"):
    """Orthonormal basis of the column span; raises if ``B`` is rank deficient."""
    tol = resolve(tol)
    B = np.asarray(B, dtype=complex)
    if B.shape[1] == 0:
        return B.copy()
    s = np.linalg.svd(B, compute_uv=False)
    if s[-1] <= tol.rank * s[0] or s[0] == 0:
        raise RankDeficientError(
            f"{name} is rank deficient (sigma_min/sigma_max = {s[-1] / max(s[0], 1e-300):.3e})"
        )
    Q, _ = np.linalg.qr(B)
    return Q


def null_space(A, atol):
    """Orthonormal basis of ``{x : Ax = 0}`` with singular values ``<= atol`` treated as zero."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(A)
    rank = int(np.sum(s > atol))
    return Vh[rank:].conj().T


def numerical_rank(A, rtol):
    s = np.linalg.svd(np.asarray(A), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def sign_counts(eigenvalues, atol):
    ev = np.asarray(eigenvalues, dtype=float)
    return (int(np.sum(ev > atol)), int(np.sum(np.abs(ev) <= atol)), int(np.sum(ev < -atol)))


@dataclass(frozen=True)
class Subspace:
    """Subspace of C^{p,q} given by a linearly independent column basis."""

    basis: np.ndarray
    signature: Signature
    _tol: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        B = check_frame(self.basis, self.signature, "basis")
        if B.shape[1]:
            orthonormal_columns(B, self._tol)
        object.__setattr__(self, "basis", B)

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def gram(self):
        """``gram[i, j] = b_j^H H b_i``."""
        return gram_matrix(self.basis, self.signature).T

    @property
    def signature_triple(self):
        return subspace_signature(self, self._tol)

    def contains(self, v, tol=None):
        """Membership by least-squares residual relative to ``|v|``."""
        tol = resolve(tol)
        v = np.asarray(v, dtype=complex)
        if self.dim == 0:
            return not np.any(v)
        Q = orthonormal_columns(self.basis, tol)
        r = v - Q @ (Q.conj().T @ v)
        return np.linalg.norm(r) <= max(tol.rank, 1e-12) * 100 * max(np.linalg.norm(v), 1e-300)


def span(vectors, sig, tol=None):
    """Subspace spanned by a list of vectors (or the columns of a 2-D array)."""
    arr = np.asarray(vectors, dtype=complex)
    if arr.ndim == 2 and isinstance(vectors, np.ndarray) and arr.shape[0] == sig.n:
        B = arr
    else:
        B = np.atleast_2d(arr).T
    return Subspace(B, sig, tol)


def subspace_signature(S, tol=None):
    """Counts ``(n_plus, n_zero, n_minus)`` of Gram eigenvalues.

    The Gram matrix is evaluated on an orthonormal basis of ``S`` so the
    eigenvalues lie in ``[-1, 1]`` and the result does not depend on the
    basis the subspace was given in.
    """
    tol = resolve(tol)
    if S.dim == 0:
        return (0, 0, 0)
    Q = orthonormal_columns(S.basis, tol)
    ev = np.linalg.eigvalsh(gram_matrix(Q, S.signature))
    return sign_counts(ev, tol.null)


def orthogonal_complement(S, tol=None):
    """``{w : v^H H w = 0 for all v in S}``."""
    tol = resolve(tol)
    sig = S.signature
    if S.dim == 0:
        return Subspace(np.eye(sig.n, dtype=complex), sig, S._tol)
    Q = orthonormal_columns(S.basis, tol)
    # rows of Q^H H; H is orthogonal so these stay orthonormal
    C = Q.conj().T * sig.diag[None, :]
    return Subspace(null_space(C, tol.rank), sig, S._tol)


# ---------------------------------------------------------------- eigensolver


class EigenPair(NamedTuple):
    value: complex
    vector: np.ndarray
    residual: float


def _triangular_eigenvectors(T):
    """Eigenvectors of an upper triangular matrix by back-substitution.

    Column ``k`` of the result is the eigenvector for ``T[k, k]``; tiny
    pivots are replaced by ``smin`` as done in LAPACK's ``trevc``.
    """
    n = T.shape[0]
    X = np.zeros((n, n), dtype=complex)
    eps = np.finfo(float).eps
    smin = max(eps * np.max(np.abs(T)), np.finfo(float).tiny)
    for k in range(n):
        lam = T[k, k]
        x = np.zeros(n, dtype=complex)
        x[k] = 1.0
        for i in range(k - 1, -1, -1):
            d = T[i, i] - lam
            if abs(d) < smin:
                d = smin
            x[i] = -(T[i, i + 1 : k + 1] @ x[i + 1 : k + 1]) / d
            big = np.max(np.abs(x))
            if big > 1e100:
                x /= big
        X[:, k] = x / np.linalg.norm(x)
    return X


def _eig_sort_key(lam):
    ang = np.angle(lam)
    if ang <= -np.pi + 1e-12:
        ang = np.pi
    return (-round(abs(lam), 10), round(ang, 10))


def eigen_decompose(M, tol=None):
    """All eigenpairs of ``M`` via a complex Schur form.

    Returns a list of :class:`EigenPair` sorted by decreasing modulus and
    then by argument in ``(-pi, pi]``.  Each residual ``|Mv - lambda v|`` is
    checked against ``tol.eig * |M|``; a failure raises
    :class:`ConvergenceError`.
    """
    tol = resolve(tol)
    M = check_square_matrix(M)
    try:
        T, Z = schur(M, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"Schur reduction failed: {exc}") from exc
    X = Z @ _triangular_eigenvectors(T)
    normM = np.linalg.norm(M, 2)
    pairs = []
    for k in range(M.shape[0]):
        lam = complex(T[k, k])
        v = X[:, k] / np.linalg.norm(X[:, k])
        res = float(np.linalg.norm(M @ v - lam * v))
        if res > tol.eig * max(normM, 1e-300) and normM > 0:
            raise ConvergenceError(f"eigen-residual {res:.3e} exceeds tolerance for eigenvalue {lam}")
        pairs.append(EigenPair(lam, v, res))
    pairs.sort(key=lambda ep: _eig_sort_key(ep.value))
    return pairs


class SpectralCluster(NamedTuple):
    """One eigenvalue of ``M`` with its algebraic multiplicity and eigenspace."""

    eigenvalue: complex
    multiplicity: int
    eigenspace: np.ndarray  # orthonormal columns


def _single_linkage(values, radius):
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def shifted_nullity(M, lam, power, tol):
    """``dim ker (M - lam I)^power`` with threshold ``tol.eig * |M|^power``."""
    n = M.shape[0]
    N = M - lam * np.eye(n)
    P = np.linalg.matrix_power(N, power)
    scale = max(np.linalg.norm(M, 2), 1e-300) ** power
    s = np.linalg.svd(P, compute_uv=False)
    return int(np.sum(s <= tol.eig * scale))


def _is_jordan_staircase(nullities, m):
    """Nullities of ``(M - lam I)^k``, k = 0..m, must look like a Jordan block pattern."""
    steps = np.diff(nullities)
    return nullities[1] >= 1 and nullities[-1] == m and bool(np.all(steps >= 0)) and bool(np.all(np.diff(steps) <= 0))


def spectral_clusters(M, tol=None):
    """Group eigenvalues into clusters and compute each eigenspace.

    Eigenvalues within ``tol.cluster * |M|`` of each other are merged
    (single linkage); the merged value is the cluster mean, which is
    accurate even for defective eigenvalues.  A merged cluster must be a
    genuine multiple eigenvalue: the nullities of ``(M - lambda I)^k`` have
    to grow like a Jordan staircase, starting at 1 or more and reaching the
    cluster size ``m`` at ``k = m``.  Clusters that fail this test, or that
    sit closer than ``100 * tol.eig * |M|`` to one another, raise
    :class:`ClusteredSpectrumError`.
    """
    tol = resolve(tol)
    M = check_square_matrix(M)
    n = M.shape[0]
    normM = max(np.linalg.norm(M, 2), 1e-300)
    vals = np.linalg.eigvals(M)
    groups = _single_linkage(vals, tol.cluster * normM)
    clusters = []
    for g in groups:
        lam = complex(np.mean(vals[g]))
        m = len(g)
        if abs(lam) <= tol.cluster * normM:
            # keep zero exactly zero so kernel computations stay clean
            lam = 0.0 + 0.0j if max(abs(vals[i]) for i in g) <= tol.cluster * normM else lam
        if m > 1 and not _is_jordan_staircase([shifted_nullity(M, lam, k, tol) for k in range(m + 1)], m):
            raise ClusteredSpectrumError(
                f"eigenvalues near {lam:.6g} are clustered but do not form a multiple eigenvalue"
            )
        N = M - lam * np.eye(n)
        E = null_space(N, tol.eig * normM)
        if E.shape[1] == 0:
            # simple eigenvalue whose shifted matrix is slightly above threshold
            _, _, Vh = np.linalg.svd(N)
            E = Vh[-1:].conj().T
        if E.shape[1] > m:
            E = E[:, :m]
        clusters.append(SpectralCluster(lam, m, E))
    lams = [c.eigenvalue for c in clusters]
    for i in range(len(lams)):
        for j in range(i + 1, len(lams)):
            if abs(lams[i] - lams[j]) <= 100 * tol.eig * normM:
                raise ClusteredSpectrumError("eigenvalue clusters are not separated")
    clusters.sort(key=lambda c: _eig_sort_key(c.eigenvalue))
    return clusters


def principal_angles(A, B):
    """Principal angles between the column spans of ``A`` and ``B`` (radians)."""
    from scipy.linalg import subspace_angles

    return np.sort(subspace_angles(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex)))


def projective_normalize(v):
    """Unit Euclidean norm with the first nonzero coordinate real positive."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    idx = int(np.argmax(np.abs(v) > 1e-12 * np.max(np.abs(v))))
    phase = v[idx] / abs(v[idx])
    return v / phase


def projective_distance(u, v):
    """Distance between ``u/|u|`` and the phase-aligned ``v/|v|``; zero iff ``[u] == [v]``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    ip = np.vdot(v, u)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.linalg.norm(u - phase * v))


def hermitian_part(A):
    return 0.5 * (A + A.conj().T)


def dimension_check(M, sig):
    if M.shape != (sig.n, sig.n):
        raise DimensionError(f"matrix shape {M.shape} does not match signature {sig}")
