"""Fixed points of linear self maps of D_{p,q}.

Fixed points of the induced map are the projectivized eigenvectors with
nonzero eigenvalue.  One-dimensional eigenspaces give isolated fixed
points; larger eigenspaces give projective subspaces fixed pointwise,
reported here as fixed lines.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from ._config import resolve
from ._validation import check_square_matrix
from .core import (
    VectorClass,
    _class_from_margin,
    gram_matrix,
    normalized_margin,
    null_space,
    projective_normalize,
    shifted_nullity,
    sign_counts,
    span,
    spectral_clusters,
    subspace_signature,
)
from .exceptions import InvariantViolation, NotSelfMapError, PreconditionError
from .selfmap import Verdict, classify

UNIMODULAR_TOL = 1e-6
ORTHO_TOL = 1e-8
CHAIN_TOL = 1e-7


class Location(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


_LOCATION_OF = {
    VectorClass.POSITIVE: Location.INTERIOR,
    VectorClass.NULL: Location.BOUNDARY,
    VectorClass.NEGATIVE: Location.EXTERIOR,
}


class LineDisposition(str, Enum):
    IN_BOUNDARY = "InBoundary"
    MEETS_INTERIOR = "MeetsInterior"
    # signature (0,1,1): one boundary point, the rest outside the closure
    TOUCHES_BOUNDARY = "TouchesBoundary"
    EXTERIOR = "Exterior"


@dataclass(frozen=True)
class FixedPointRecord:
    point: np.ndarray
    eigenvalue: complex
    location: Location
    margin: float


@dataclass(frozen=True)
class FixedLine:
    basis: np.ndarray  # (p+q, 2)
    eigenvalue: complex
    disposition: LineDisposition
    signature: Tuple[int, int, int]


@dataclass(frozen=True)
class Eigenspace:
    eigenvalue: complex
    basis: np.ndarray  # H-diagonalizing orthonormal basis, positive directions first
    form_values: np.ndarray
    signature: Tuple[int, int, int]

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def max_isotropic_dim(self):
        n_plus, n_zero, n_minus = self.signature
        return n_zero + min(n_plus, n_minus)


@dataclass(frozen=True)
class FixedPointAnalysis:
    records: List[FixedPointRecord]
    lines: List[FixedLine]
    eigenspaces: List[Eigenspace]
    counts: dict  # location -> int or math.inf


def _require_self_map(M, sig, tol):
    report = classify(M, sig, tol)
    if not report.verdict.is_self_map:
        raise NotSelfMapError("fixed-point analysis needs a linear self map")
    return report


def _eigenspaces(M, sig, tol):
    normM = np.linalg.norm(M, 2)
    out = []
    for cl in spectral_clusters(M, tol):
        if abs(cl.eigenvalue) <= tol.rank * normM:
            continue
        Q = cl.eigenspace
        G = gram_matrix(Q, sig)
        w, V = np.linalg.eigh(0.5 * (G + G.conj().T))
        order = np.argsort(-w, kind="stable")
        w, V = w[order], V[:, order]
        out.append(Eigenspace(cl.eigenvalue, Q @ V, w, sign_counts(w, tol.null)))
    return out


def _space_counts(es):
    """Number of fixed points an eigenspace contributes to each location."""
    n_plus, n_zero, n_minus = es.signature
    if es.dim == 1:
        loc = {(1, 0, 0): Location.INTERIOR, (0, 1, 0): Location.BOUNDARY, (0, 0, 1): Location.EXTERIOR}
        return {k: (1 if loc[es.signature] is k else 0) for k in Location}
    inf = math.inf
    interior = inf if n_plus else 0
    exterior = inf if n_minus else 0
    if n_zero >= 2 or (n_plus and n_minus):
        boundary = inf
    elif n_zero == 1:
        boundary = 1
    else:
        boundary = 0
    return {Location.INTERIOR: interior, Location.BOUNDARY: boundary, Location.EXTERIOR: exterior}


def _disposition(sig3):
    n_plus, n_zero, n_minus = sig3
    if n_plus:
        return LineDisposition.MEETS_INTERIOR
    if n_zero == 2:
        return LineDisposition.IN_BOUNDARY
    if n_zero == 1:
        return LineDisposition.TOUCHES_BOUNDARY
    return LineDisposition.EXTERIOR


def analyze_fixed_points(M, sig, tol=None):
    tol = resolve(tol)
    M = check_square_matrix(M, sig)
    _require_self_map(M, sig, tol)
    spaces = _eigenspaces(M, sig, tol)
    records, lines = [], []
    counts = {k: 0 for k in Location}
    for es in spaces:
        for k, c in _space_counts(es).items():
            counts[k] = counts[k] + c
        if es.dim == 1:
            v = projective_normalize(es.basis[:, 0])
            margin = normalized_margin(v, sig)
            kind = _class_from_margin(margin, tol.null)
            records.append(FixedPointRecord(v, es.eigenvalue, _LOCATION_OF[kind], margin))
            continue
        for i in range(es.dim):
            for j in range(i + 1, es.dim):
                s3 = sign_counts(es.form_values[[i, j]], tol.null)
                lines.append(FixedLine(es.basis[:, [i, j]], es.eigenvalue, _disposition(s3), s3))
    return FixedPointAnalysis(records, lines, spaces, counts)


def fixed_points(M, sig, tol=None):
    """Isolated fixed points: one record per one-dimensional eigenspace."""
    return analyze_fixed_points(M, sig, tol).records


def fixed_lines(M, sig, tol=None):
    """Pointwise-fixed projective lines from eigenspaces of dimension >= 2."""
    return analyze_fixed_points(M, sig, tol).lines


def location_counts(M, sig, tol=None):
    return analyze_fixed_points(M, sig, tol).counts


# ------------------------------------------------------------------ Jordan data


@dataclass(frozen=True)
class JordanData:
    eigenvalue: complex
    block_sizes: Tuple[int, ...]  # descending
    chains: List[np.ndarray]  # chain[:, 0] = v_1 (eigenvector) ... chain[:, r-1] = v_r
    nullities: Tuple[int, ...]  # dim ker (M - lam I)^k for k = 0, 1, ...


def _kernel_power(N, k, atol):
    return null_space(np.linalg.matrix_power(N, k), atol)


def _chains_for(M, lam, mult, tol):
    n = M.shape[0]
    N = M - lam * np.eye(n)
    normM = max(np.linalg.norm(M, 2), 1e-300)
    nullities = [0]
    kernels = [np.zeros((n, 0), dtype=complex)]
    k = 0
    while nullities[-1] < mult:
        k += 1
        if k > mult:
            raise InvariantViolation(f"nullities of (M - lam I)^k never reach multiplicity {mult}")
        nullities.append(shifted_nullity(M, lam, k, tol))
        kernels.append(_kernel_power(N, k, tol.eig * normM**k))
        if kernels[-1].shape[1] != nullities[-1]:
            raise InvariantViolation("inconsistent kernel dimension")
    K = k
    at_least = [nullities[j] - nullities[j - 1] for j in range(1, K + 1)] + [0]
    tops = []  # (size, vector)
    for level in range(K, 0, -1):
        new = at_least[level - 1] - at_least[level]
        if new <= 0:
            continue
        lower = kernels[level - 1]
        carried = [np.linalg.matrix_power(N, size - level) @ x for size, x in tops]
        S = np.column_stack([lower] + carried) if (lower.shape[1] or carried) else np.zeros((n, 0))
        Kl = kernels[level]
        if S.shape[1]:
            Qs, _ = np.linalg.qr(S)
            P = Kl - Qs @ (Qs.conj().T @ Kl)
        else:
            P = Kl
        U, s, _ = np.linalg.svd(P, full_matrices=False)
        if s.size < new or s[new - 1] <= 1e-8:
            raise InvariantViolation("could not find independent chain tops")
        for i in range(new):
            tops.append((level, U[:, i]))
    chains = []
    for size, x in sorted(tops, key=lambda t: -t[0]):
        cols = [np.linalg.matrix_power(N, size - 1 - i) @ x for i in range(size)]
        C = np.column_stack(cols)
        v1 = C[:, 0]
        if np.linalg.norm(N @ v1) > CHAIN_TOL * normM * np.linalg.norm(v1):
            raise InvariantViolation("Jordan chain residual exceeds tolerance")
        chains.append(C)
    sizes = tuple(c.shape[1] for c in chains)
    return JordanData(lam, sizes, chains, tuple(nullities))


def jordan_structure(M, sig=None, tol=None):
    """Jordan block sizes from rank differences, with explicit chains.

    Raises :class:`ClusteredSpectrumError` when eigenvalues cannot be
    separated into clean clusters.
    """
    tol = resolve(tol)
    M = check_square_matrix(M, sig)
    out = [_chains_for(M, cl.eigenvalue, cl.multiplicity, tol) for cl in spectral_clusters(M, tol)]
    if sum(sum(j.block_sizes) for j in out) != M.shape[0]:
        raise InvariantViolation("Jordan block sizes do not add up to the dimension")
    return out


# ------------------------------------------------------------------ automorphism-specific


def _unitary_scale(M, sig, tol):
    report = classify(M, sig, tol)
    if report.verdict is not Verdict.AUTOMORPHISM:
        raise PreconditionError(f"an automorphism is required, got {report.verdict.value}")
    return math.sqrt(report.isometry_constant)


@dataclass(frozen=True)
class BoundarySubspace:
    basis: np.ndarray
    eigenvalue: complex  # of the U(p,q) representative
    signature: Tuple[int, int, int]
    invariance_residual: float

    @property
    def isotropic(self):
        return self.signature == (0, self.basis.shape[1], 0)

    @property
    def passed(self):
        return self.isotropic and self.invariance_residual <= CHAIN_TOL


def boundary_invariant_subspace(M, sig, jordan, chain_index=0, tol=None):
    """Isotropic ``M``-invariant subspace carried by a Jordan chain.

    For ``|lambda| != 1`` (after scaling into U(p,q)) the whole chain span
    is returned; for ``|lambda| = 1`` and chain length ``r >= 2`` the span
    of the first ``r // 2`` chain vectors.
    """
    tol = resolve(tol)
    M = check_square_matrix(M, sig)
    s = _unitary_scale(M, sig, tol)
    chain = jordan.chains[chain_index]
    r = chain.shape[1]
    lam = jordan.eigenvalue / s
    if abs(abs(lam) - 1.0) > UNIMODULAR_TOL:
        k = r
    elif r >= 2:
        k = r // 2
    else:
        raise PreconditionError("a size-1 chain with unimodular eigenvalue carries no boundary subspace")
    B = chain[:, :k]
    S = span(B, sig, tol)
    sig3 = subspace_signature(S, tol)
    Q, _ = np.linalg.qr(B)
    MB = (M / s) @ Q
    coeffs = Q.conj().T @ MB
    resid = float(np.linalg.norm(MB - Q @ coeffs) / max(np.linalg.norm(M / s, 2), 1e-300))
    return BoundarySubspace(B, lam, sig3, resid)


class PairStatus(str, Enum):
    ORTHOGONAL = "Orthogonal"
    RECIPROCAL_PAIR = "ReciprocalPair"


@dataclass(frozen=True)
class OrthogonalityEntry:
    i: int
    j: int
    status: PairStatus
    product: complex
    reciprocal_gap: float


def eigenpairs_unitary(M, sig, tol=None):
    """Eigenpairs of the U(p,q) representative, one per eigenspace basis vector."""
    tol = resolve(tol)
    s = _unitary_scale(M, sig, tol)
    A = M / s
    pairs = []
    for cl in spectral_clusters(A, tol):
        for k in range(cl.eigenspace.shape[1]):
            pairs.append((cl.eigenvalue, cl.eigenspace[:, k]))
    return pairs


def orthogonality_audit(M, sig, tol=None):
    """Check that every two eigenvectors are H-orthogonal or have ``conj(l_j) l_i = 1``."""
    tol = resolve(tol)
    M = check_square_matrix(M, sig)
    pairs = eigenpairs_unitary(M, sig, tol)
    out = []
    for i, (li, vi) in enumerate(pairs):
        for j in range(i, len(pairs)):
            lj, vj = pairs[j]
            prod = complex(np.vdot(vj, sig.diag * vi))
            gap = abs(np.conj(lj) * li - 1.0)
            if abs(prod) <= ORTHO_TOL:
                status = PairStatus.ORTHOGONAL
            elif gap <= ORTHO_TOL:
                status = PairStatus.RECIPROCAL_PAIR
            else:
                raise InvariantViolation(
                    f"eigenvectors {i}, {j} are neither orthogonal (|v^H H v| = {abs(prod):.3e}) "
                    f"nor a reciprocal pair (gap {gap:.3e})"
                )
            out.append(OrthogonalityEntry(i, j, status, prod, float(gap)))
    return out


# ------------------------------------------------------------------ theorem audit


class AuditStatus(str, Enum):
    PASS = "PASS"
    VACUOUS = "VACUOUS"
    FAIL = "FAIL"


@dataclass(frozen=True)
class AuditEntry:
    theorem: str
    hypothesis: bool
    conclusion: bool
    status: AuditStatus
    detail: str = ""


def _entry(name, hyp, concl, detail=""):
    hyp, concl = bool(hyp), bool(concl)
    status = AuditStatus.VACUOUS if not hyp else (AuditStatus.PASS if concl else AuditStatus.FAIL)
    return AuditEntry(name, hyp, concl, status, detail)


def theorem_audit(M, sig, tol=None):
    """Evaluate each fixed-point theorem's hypothesis and conclusion on ``M``.

    Hypothesis false → VACUOUS; hypothesis true and conclusion true → PASS;
    otherwise FAIL (a bug or a tolerance breach).
    """
    tol = resolve(tol)
    M = check_square_matrix(M, sig)
    report = classify(M, sig, tol)
    if not report.verdict.is_self_map:
        raise NotSelfMapError("theorem_audit needs a linear self map")
    fa = analyze_fixed_points(M, sig, tol)
    p, q = sig.p, sig.q
    auto = report.verdict is Verdict.AUTOMORPHISM
    # isolated fixed points only; larger eigenspaces go through the line branch
    n_int = sum(r.location is Location.INTERIOR for r in fa.records)
    n_bd = sum(r.location is Location.BOUNDARY for r in fa.records)
    n_ext = sum(r.location is Location.EXTERIOR for r in fa.records)
    any_line = any(es.dim >= 2 for es in fa.eigenspaces)
    closure_line = any(es.dim >= 2 and (es.signature[0] or es.signature[1]) for es in fa.eigenspaces)
    interior_line = any(es.dim >= 2 and es.signature[0] > 0 for es in fa.eigenspaces)
    boundary_line = any(es.dim >= 2 and es.max_isotropic_dim >= 2 for es in fa.eigenspaces)
    has_interior = n_int > 0 or interior_line
    counts = f"isolated interior={n_int}, boundary={n_bd}, exterior={n_ext}"

    entries = [
        _entry("existence", True, n_int + n_bd > 0 or closure_line, counts),
        _entry("fixed_point_number_1", auto and n_int >= p + 1, interior_line, counts),
        _entry("fixed_point_number_2", auto and n_bd >= 2 * p + 1, closure_line, counts),
        _entry(
            "at_most",
            auto and not any_line,
            n_int <= p and n_ext <= q and n_bd <= min(2 * p, 2 * q),
            counts,
        ),
        _entry("hs_generalization", auto and not boundary_line and n_bd >= 2 * p + 1, has_interior, counts),
    ]
    # the general self-map theorems count every boundary fixed point,
    # including those inside multi-dimensional eigenspaces
    bd_all = fa.counts[Location.BOUNDARY]
    if p == 1:
        ball_hyp = bd_all >= 3
    elif q == 1:
        ball_hyp = bd_all >= 2
    else:
        ball_hyp = False
    entries.append(_entry("ball", ball_hyp, has_interior, counts))
    if p <= q:
        bb_hyp = not boundary_line and bd_all >= 2 * p + 1
        bb_concl = has_interior and any_line
    else:
        bb_hyp = not boundary_line and bd_all >= 2 * q
        bb_concl = has_interior
    entries.append(_entry("bb_generalization", bb_hyp, bb_concl, counts))
    entries.append(_entry("minimal_no_boundary", report.verdict is Verdict.MINIMAL, n_bd == 0, counts))
    return entries
