import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from genball import LinearSelfMapAnalyzer, get_fixture
from genball.selfmap import Verdict

from conftest import block_ex52


def test_fit_automorphism():
    est = LinearSelfMapAnalyzer(p=2, q=2).fit(block_ex52())
    assert est.verdict_ is Verdict.AUTOMORPHISM
    assert est.n_features_in_ == 4
    assert len(est.fixed_lines_) == 2 and est.fixed_points_ == []
    assert est.scaling_interval_.lo == pytest.approx(1, abs=1e-7)


def test_not_self_map_skips_fixed_points():
    est = LinearSelfMapAnalyzer(p=1, q=1).fit(np.diag([1.0, 2.0]))
    assert est.verdict_ is Verdict.NOT_SELF_MAP
    assert est.fixed_points_ is None and est.extension_ is None


def test_transform_predict():
    est = LinearSelfMapAnalyzer(p=2, q=2).fit(get_fixture("ex5.1-corrected").matrix)
    X = np.array([[1, 0, 0, 0], [1, 0, -1, 0], [0, 0, 1, 0], [0.3, 1, 0.2, 0.1]], dtype=complex)
    labels = est.predict(X)
    # [1,0,-1,0] spans the null kernel direction, e3 maps to the positive e1
    assert list(labels) == ["interior", "undefined", "interior", "interior"]
    W = est.transform(X)
    assert np.allclose(np.linalg.norm(W[[0, 2, 3]], axis=1), 1)


def test_params_and_clone():
    est = LinearSelfMapAnalyzer(p=2, q=3, tol_null=1e-7)
    c = clone(est)
    assert c.get_params()["tol_null"] == 1e-7 and c.q == 3


def test_not_fitted():
    with pytest.raises(NotFittedError):
        LinearSelfMapAnalyzer().transform(np.eye(2))


def test_dimension_check():
    with pytest.raises(ValueError):
        LinearSelfMapAnalyzer(p=1, q=1).fit(np.eye(3))
