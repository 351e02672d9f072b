"""Real generalized balls: real matrices, real sampling and phase normalization."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from ._config import resolve
from ._validation import check_real, check_vector
from .core import VectorClass, classify_vector
from .exceptions import PreconditionError
from .selfmap import OracleResult, Verdict, _as_candidate, _scan_vectors, classify

THETA_TOL = 1e-9


@dataclass(frozen=True)
class RealCheck:
    real_result: OracleResult
    complex_verdict: Verdict
    agree: bool

    @property
    def real_verdict(self):
        return self.real_result.label


def real_selfmap_check(M, sig=None, samples=5000, seed=0, tol=None):
    """Compare real-point sampling with the complex classification of a real matrix."""
    tol = resolve(tol)
    cand = _as_candidate(M, sig)
    A = check_real(cand.matrix)
    hit = _scan_vectors(A, cand.signature, samples, seed, tol, real=True)
    if hit is None:
        res = OracleResult(True, samples=samples)
    else:
        res = OracleResult(False, hit[0].real, hit[1].real, samples)
    verdict = classify(cand, tol=tol).verdict
    return RealCheck(res, verdict, res.consistent == verdict.is_self_map)


def _split_form(v, p):
    return float(np.sum(v[:p] ** 2) - np.sum(v[p:] ** 2))


def theta_normalize(z, sig, tol=None):
    """Phase ``theta`` in [0, pi/2] making ``e^{i theta} z = x + i y`` have
    ``|x'|^2 = |x''|^2`` and ``|y'|^2 > |y''|^2``.

    Inputs whose real and imaginary parts are each positive or zero are
    left alone (``theta = 0``).  Returns ``(theta, e^{i theta} z)``.
    """
    tol = resolve(tol)
    z = check_vector(z, sig)
    if classify_vector(z, sig, tol).kind is not VectorClass.POSITIVE:
        raise PreconditionError("theta_normalize needs a positive vector")
    p = sig.p
    x, y = z.real, z.imag

    def ok(v):
        return not np.any(v) or _split_form(v, p) > 0

    if ok(x) and ok(y):
        return 0.0, z.copy()

    def f(t):
        return _split_form(x * np.cos(t) - y * np.sin(t), p)

    scale = float(np.real(np.vdot(z, z)))
    theta = float(bisect(f, 0.0, np.pi / 2, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    w = np.exp(1j * theta) * z
    if abs(_split_form(w.real, p)) > THETA_TOL * scale or _split_form(w.imag, p) <= 0:
        raise PreconditionError("phase normalization did not meet its tolerances")
    return theta, w


def normalized_parts(w, sig):
    """``(|x'|^2 - |x''|^2, |y'|^2 - |y''|^2)`` of ``w = x + i y``."""
    w = check_vector(w, sig)
    return _split_form(w.real, sig.p), _split_form(w.imag, sig.p)

