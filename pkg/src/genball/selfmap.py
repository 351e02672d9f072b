"""Deciding whether a matrix induces a linear self map of D_{p,q}.

A matrix ``M`` induces a self map iff either ``rank M = p`` with a
negative semi-definite kernel and a positive definite range (minimal
case), or ``M^H H M - lam H`` is positive semi-definite for some
``lam > 0`` (non-minimal case, after which ``lam^{-1/2} M`` is an
expansion of C^{p,q}).
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from ._config import resolve
from ._validation import check_positive_int, check_square_matrix
from .core import (
    Signature,
    form_value,
    gram_matrix,
    sign_counts,
)
from .exceptions import NotSelfMapError

logger = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
ORACLE_CHUNK = 1024


@dataclass(frozen=True)
class MapCandidate:
    matrix: np.ndarray
    signature: Signature

    def __post_init__(self):
        M = check_square_matrix(self.matrix, self.signature)
        object.__setattr__(self, "matrix", M)


def _as_candidate(M, sig):
    if isinstance(M, MapCandidate):
        return M
    if sig is None:
        raise TypeError("signature is required when passing a bare matrix")
    return MapCandidate(M, sig)


class Verdict(str, Enum):
    NOT_SELF_MAP = "NotSelfMap"
    MINIMAL = "Minimal"
    NON_MINIMAL = "NonMinimal"
    AUTOMORPHISM = "Automorphism"

    @property
    def is_self_map(self):
        return self is not Verdict.NOT_SELF_MAP


@dataclass(frozen=True)
class ScalingInterval:
    """``{lam : M^H H M - lam H is PSD}``; ``lo``/``hi`` may be infinite."""

    lo: float
    hi: float
    empty: bool
    # max over lam of lambda_min(G(lam)) / scale(lam), diagnostic only
    peak_margin: float = float("nan")
    peak_at: float = float("nan")

    def __post_init__(self):
        for name in ("lo", "hi", "peak_margin", "peak_at"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def __contains__(self, lam):
        return (not self.empty) and self.lo <= lam <= self.hi

    @property
    def midpoint(self):
        if self.empty:
            raise ValueError("empty interval has no midpoint")
        return 0.5 * (self.lo + self.hi)

    def scaled(self, factor):
        if self.empty:
            return self
        return ScalingInterval(self.lo * factor, self.hi * factor, False, self.peak_margin, self.peak_at * factor)

    @classmethod
    def empty_interval(cls, peak_margin=float("nan"), peak_at=float("nan")):
        return cls(float("nan"), float("nan"), True, peak_margin, peak_at)


@dataclass(frozen=True)
class SelfMapReport:
    verdict: Verdict
    scaling: ScalingInterval
    kernel_signature: Tuple[int, int, int]
    range_signature: Tuple[int, int, int]
    rank: int
    isometry_constant: Optional[float] = None
    # signed distance to the PSD boundary, relative to the pencil scale
    psd_margin: float = float("nan")


# ------------------------------------------------------------------ scaling


def _pencil(M, sig):
    K = gram_matrix(M, sig)
    K = 0.5 * (K + K.conj().T)
    return K, np.linalg.norm(K, 2)


def _lam_min(K, d, lam):
    return float(np.linalg.eigvalsh(K - lam * np.diag(d))[0])


def _psd_floor(normK, lam, tol):
    """Admissible negative eigenvalue at ``lam``: ``tol.psd * (|K| + |lam| |H|)``."""
    return tol.psd * (normK + abs(lam))


def _golden_max(f, a, b, xtol):
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _bisect_edge(feasible, inside, outside, xtol):
    while abs(outside - inside) > xtol:
        mid = 0.5 * (inside + outside)
        if feasible(mid):
            inside = mid
        else:
            outside = mid
    return inside


def scaling_interval(M, sig=None, tol=None):
    """Exact feasibility interval of ``lam -> M^H H M - lam H >= 0``.

    ``lam -> lambda_min(G(lam))`` is concave, so it is maximized by a
    golden-section search; each end of the (convex) feasible set is then
    located by bisection on ``lambda_min(G(lam)) >= 0``.  When the peak is
    non-positive but within the PSD band ``tol.psd * (|M^H H M| + |lam|)``
    the set is a single point (isometries, the identity) and
    ``[lam*, lam*]`` is returned.
    """
    tol = resolve(tol)
    cand = _as_candidate(M, sig)
    M, sig = cand.matrix, cand.signature
    K, normK = _pencil(M, sig)
    d = sig.diag
    B = 1.0 + normK
    xtol = 1e-14 * B

    def raw(lam):
        return _lam_min(K, d, lam)

    lam_star, m_star = _golden_max(raw, -B, B, xtol)
    peak = m_star / (normK + abs(lam_star) + 1e-300)
    if m_star < -_psd_floor(normK, lam_star, tol):
        return ScalingInterval.empty_interval(peak, lam_star)
    if m_star <= 0:
        return ScalingInterval(lam_star, lam_star, False, peak, lam_star)

    def feasible(lam):
        return raw(lam) >= 0

    # outside [-B, B] one of e_1, e_n already gives a negative Rayleigh quotient
    lo = -math.inf if feasible(-B) else _bisect_edge(feasible, lam_star, -B, xtol)
    hi = math.inf if feasible(B) else _bisect_edge(feasible, lam_star, B, xtol)
    return ScalingInterval(float(lo), float(hi), False, peak, lam_star)


def positive_scaling_margin(M, sig, tol=None):
    """``sup_{lam > 0} lambda_min(G(lam)) / (|K| + lam)``; positive means strictly inside."""
    tol = resolve(tol)
    K, normK = _pencil(M, sig)
    d = sig.diag
    B = 1.0 + normK

    def rel(lam):
        return _lam_min(K, d, lam) / (normK + lam + 1e-300)

    # the relative margin is quasi-concave on (0, B]: ratio of concave to affine
    _, val = _golden_max(rel, 0.0, B, 1e-13 * B)
    return val


# ------------------------------------------------------------------ classify


def _kernel_and_range(M, tol):
    U, s, Vh = np.linalg.svd(M)
    if s[0] == 0:
        return 0, Vh.conj().T, U[:, :0]
    rank = int(np.sum(s > tol.rank * s[0]))
    return rank, Vh[rank:].conj().T, U[:, :rank]


def _signature_of_orthonormal(Q, sig, tol):
    if Q.shape[1] == 0:
        return (0, 0, 0)
    return sign_counts(np.linalg.eigvalsh(gram_matrix(Q, sig)), tol.null)


def isometry_constant(M, sig, tol=None):
    """Least-squares ``c`` in ``M^H H M ~ c H`` and whether it fits within ``tol.psd``."""
    tol = resolve(tol)
    K = gram_matrix(M, sig)
    c = float(np.real(np.sum(K.diagonal() * sig.diag)) / sig.n)
    resid = np.linalg.norm(K - c * sig.form)
    ok = c > 0 and resid <= tol.psd * max(np.linalg.norm(K), 1e-300)
    return c, ok


def classify(M, sig=None, tol=None):
    """Classify ``M`` as NotSelfMap, Minimal, NonMinimal or Automorphism."""
    tol = resolve(tol)
    cand = _as_candidate(M, sig)
    M, sig = cand.matrix, cand.signature
    p = sig.p
    rank, kernel, rng = _kernel_and_range(M, tol)
    ker_sig = _signature_of_orthonormal(kernel, sig, tol)
    rng_sig = _signature_of_orthonormal(rng, sig, tol)
    interval = scaling_interval(cand, tol=tol)
    c = None
    margin = float("nan")

    if rank < p or ker_sig[0] > 0:
        verdict = Verdict.NOT_SELF_MAP
    elif rank == p:
        verdict = Verdict.MINIMAL if rng_sig[0] == p else Verdict.NOT_SELF_MAP
    else:
        margin = positive_scaling_margin(M, sig, tol)
        if interval.empty or interval.hi <= 0:
            verdict = Verdict.NOT_SELF_MAP
        else:
            verdict = Verdict.NON_MINIMAL
            c_fit, ok = isometry_constant(M, sig, tol)
            if ok:
                verdict = Verdict.AUTOMORPHISM
                c = c_fit
    return SelfMapReport(verdict, interval, ker_sig, rng_sig, rank, c, margin)


def is_expansion(M, sig=None, tol=None):
    """``M^H H M - H >= 0`` up to ``tol.psd * (|M^H H M| + |H|)``."""
    tol = resolve(tol)
    cand = _as_candidate(M, sig)
    K, normK = _pencil(cand.matrix, cand.signature)
    G = K - cand.signature.form
    if not np.any(G):
        return True
    return float(np.linalg.eigvalsh(G)[0]) >= -tol.psd * (normK + 1.0)


class ExtensionKind(str, Enum):
    EXTENDS_ACROSS_CLOSURE = "ExtendsAcrossClosure"
    INDETERMINACY_MEETS_BOUNDARY = "IndeterminacyMeetsBoundary"
    INVERTIBLE = "Invertible"


def kernel_null_vectors(M, sig, tol=None):
    """Orthonormal basis of the null directions inside ``ker M``.

    For a self map the kernel is negative semi-definite, so these are the
    radical of the kernel's Gram matrix: the points where the indeterminacy
    set meets the boundary.
    """
    tol = resolve(tol)
    M = check_square_matrix(M, sig)
    _, kernel, _ = _kernel_and_range(M, tol)
    if kernel.shape[1] == 0:
        return kernel
    G = gram_matrix(kernel, sig)
    w, V = np.linalg.eigh(0.5 * (G + G.conj().T))
    return kernel @ V[:, np.abs(w) <= tol.null]


def extension_obstruction(M, sig=None, tol=None, report=None):
    tol = resolve(tol)
    cand = _as_candidate(M, sig)
    report = report or classify(cand, tol=tol)
    if not report.verdict.is_self_map:
        raise NotSelfMapError("extension_obstruction needs a linear self map")
    if report.rank == cand.signature.n:
        return ExtensionKind.INVERTIBLE
    if report.kernel_signature[1] == 0:
        return ExtensionKind.EXTENDS_ACROSS_CLOSURE
    return ExtensionKind.INDETERMINACY_MEETS_BOUNDARY


# ------------------------------------------------------------------ oracle


@dataclass(frozen=True)
class OracleResult:
    consistent: bool
    witness: Optional[np.ndarray] = None
    image: Optional[np.ndarray] = None
    samples: int = 0

    @property
    def label(self):
        return "ConsistentSelfMap" if self.consistent else "CounterexampleFound"


def _positive_rows(X, sig, tol):
    m = form_value(X, sig) / np.sum(np.abs(X) ** 2, axis=1)
    return m > tol.null


def _chunk_positive_vectors(sig, seed, chunk, count, tol, real=False):
    """``count`` positive vectors from substream ``chunk`` (rejection sampling)."""
    rng = np.random.default_rng(seed ^ chunk)
    out = []
    have = 0
    while have < count:
        shape = (2 * count + 8, sig.n)
        if real:
            Z = rng.standard_normal(shape)
        else:
            Z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
        Z = Z[_positive_rows(Z, sig, tol)]
        out.append(Z)
        have += Z.shape[0]
    return np.concatenate(out)[:count]


def _chunks(samples):
    """``(i, count)`` for the substreams covering ``samples`` draws."""
    samples = check_positive_int(samples, "samples")
    return [(i, min(ORACLE_CHUNK, samples - start)) for i, start in enumerate(range(0, samples, ORACLE_CHUNK))]


def sample_positive_vectors(sig, samples, seed, tol=None, real=False):
    """Deterministic positive samples; chunk ``i`` is drawn from ``seed ^ i``."""
    tol = resolve(tol)
    return np.concatenate([_chunk_positive_vectors(sig, seed, i, c, tol, real) for i, c in _chunks(samples)])


def _scan_vectors(M, sig, samples, seed, tol, real=False):
    """First positive sample with a non-positive image, chunk by chunk; ``None`` if there is none.

    Stopping at the first bad chunk gives the same witness as scanning the
    full sample set, since chunk ``i`` only depends on ``seed ^ i``.
    """
    for i, c in _chunks(samples):
        hit = _first_bad_image(M, _chunk_positive_vectors(sig, seed, i, c, tol, real), sig, tol)
        if hit is not None:
            return hit
    return None


def _first_bad_image(M, Z, sig, tol):
    W = Z @ M.T
    bad = ~_positive_rows_safe(W, sig, tol)
    if not np.any(bad):
        return None
    i = int(np.argmax(bad))
    return Z[i], W[i]


def _positive_rows_safe(W, sig, tol):
    nrm = np.sum(np.abs(W) ** 2, axis=1)
    ok = nrm > 0
    out = np.zeros(W.shape[0], dtype=bool)
    out[ok] = (form_value(W[ok], sig) / nrm[ok]) > tol.null
    return out


def oracle_selfmap_vectors(M, sig=None, samples=5000, seed=0, tol=None):
    """Sampling check: push positive vectors through ``M`` and look for a non-positive image."""
    tol = resolve(tol)
    cand = _as_candidate(M, sig)
    hit = _scan_vectors(cand.matrix, cand.signature, samples, seed, tol)
    if hit is None:
        return OracleResult(True, samples=samples)
    return OracleResult(False, hit[0], hit[1], samples)
