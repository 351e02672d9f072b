"""Estimator-style front end bundling the analyses of a single map."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._config import Tolerances
from ._validation import check_points
from .core import Signature, _class_from_margin, form_value, projective_normalize
from .fixed_points import analyze_fixed_points
from .selfmap import _as_candidate, classify, extension_obstruction

_LOCATION = {"positive": "interior", "null": "boundary", "negative": "exterior"}


class LinearSelfMapAnalyzer(BaseEstimator):
    """Classify a matrix as a self map of D_{p,q} and act with it on points.

    ``fit`` takes the ``(p+q, p+q)`` matrix.  ``transform`` maps rows of
    homogeneous coordinates through it (projectively normalized) and
    ``predict`` labels the images interior / boundary / exterior.

    Parameters
    ----------
    p, q : int
        Signature of the form.
    tol_null, tol_rank, tol_eig, tol_psd : float
        Numerical tolerances.
    with_fixed_points : bool
        Also compute fixed points and lines when the map is a self map.
    """

    def __init__(self, p=1, q=1, tol_null=1e-8, tol_rank=1e-10, tol_eig=1e-9, tol_psd=1e-9, with_fixed_points=True):
        self.p = p
        self.q = q
        self.tol_null = tol_null
        self.tol_rank = tol_rank
        self.tol_eig = tol_eig
        self.tol_psd = tol_psd
        self.with_fixed_points = with_fixed_points

    def _tolerances(self):
        return Tolerances(null=self.tol_null, rank=self.tol_rank, eig=self.tol_eig, psd=self.tol_psd)

    def fit(self, X, y=None):
        sig = Signature(self.p, self.q)
        tol = self._tolerances()
        cand = _as_candidate(X, sig)
        self.signature_ = sig
        self.tolerances_ = tol
        self.matrix_ = cand.matrix
        self.n_features_in_ = sig.n
        self.report_ = classify(cand, tol=tol)
        self.verdict_ = self.report_.verdict
        self.scaling_interval_ = self.report_.scaling
        self.fixed_points_ = None
        self.fixed_lines_ = None
        self.extension_ = None
        if self.verdict_.is_self_map:
            self.extension_ = extension_obstruction(cand, tol=tol, report=self.report_)
            if self.with_fixed_points:
                fa = analyze_fixed_points(cand.matrix, sig, tol)
                self.fixed_points_ = fa.records
                self.fixed_lines_ = fa.lines
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        Z = check_points(X, self.signature_)
        W = Z @ self.matrix_.T
        out = np.zeros_like(W)
        for i, w in enumerate(W):
            if np.any(np.abs(w) > 0):
                out[i] = projective_normalize(w)
        return out

    def predict(self, X):
        """Location labels of the images; ``"undefined"`` where a point maps to 0."""
        W = self.transform(X)
        labels = []
        for w in W:
            nrm = float(np.real(np.vdot(w, w)))
            if nrm == 0:
                labels.append("undefined")
                continue
            kind = _class_from_margin(float(form_value(w, self.signature_)) / nrm, self.tolerances_.null)
            labels.append(_LOCATION[kind.value])
        return np.array(labels)
