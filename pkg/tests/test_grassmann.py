import numpy as np
import pytest
from hypothesis import given, strategies as st

from genball import Signature, get_fixture, random_u_pq
from genball.core import VectorClass, classify_vector
from genball.exceptions import ConvergenceError, DimensionError, NotSelfMapError, RankDeficientError
from genball.grassmann import (
    PlaneClass,
    PlaneFrame,
    chart_coordinates,
    classify_plane,
    closure_fixed_plane_search,
    induced_plane_map,
    oracle_selfmap_planes,
    sample_positive_plane,
    sample_positive_planes,
)

from conftest import R2, block_ex52, cgauss, proj_close

S22 = Signature(2, 2)
S23 = Signature(2, 3)


class TestPlanes:
    def test_classes(self):
        e = np.eye(4)
        assert classify_plane(e[:, :2], S22) is PlaneClass.POSITIVE_DEFINITE
        assert classify_plane(np.column_stack([e[0] + e[2], e[1]]), S22) is PlaneClass.POSITIVE_SEMIDEFINITE
        assert classify_plane(np.column_stack([e[0], e[3]]), S22) is PlaneClass.OTHER

    def test_rank_deficient(self):
        with pytest.raises(RankDeficientError):
            PlaneFrame(np.column_stack([np.eye(4)[0], 2 * np.eye(4)[0]]), S22)

    def test_bad_shape(self):
        with pytest.raises(DimensionError):
            PlaneFrame(np.ones((3, 2)), S22)

    def test_same_plane(self):
        rng = np.random.default_rng(3)
        Z = cgauss(rng, 5, 2)
        G = cgauss(rng, 2, 2)
        assert PlaneFrame(Z, S23).same_plane(PlaneFrame(Z @ G, S23))
        assert not PlaneFrame(Z, S23).same_plane(PlaneFrame(cgauss(rng, 5, 2), S23))

    @given(st.integers(0, 2**32 - 1))
    def test_class_invariant_under_frame_change(self, seed):
        rng = np.random.default_rng(seed)
        Z, G = cgauss(rng, 5, 2), cgauss(rng, 2, 2)
        if np.linalg.cond(G) > 1e4:
            return
        assert classify_plane(Z, S23) is classify_plane(Z @ G, S23)

    def test_chart(self):
        W = np.array([[0.1, 0.2j], [0.0, 0.3], [0.5, 0]])
        Z = np.vstack([np.eye(2), W]) @ np.array([[2, 1], [0, 1j]])
        assert np.allclose(chart_coordinates(Z, S23), W)
        with pytest.raises(RankDeficientError):
            chart_coordinates(np.eye(5)[:, 2:4], S23)


class TestInduced:
    def test_kernel_hit(self):
        M = get_fixture("ex5.1-corrected").matrix
        Z = np.column_stack([[1, 0, -1, 0], [0, 1, 0, 0]]).astype(complex)
        with pytest.raises(RankDeficientError):
            induced_plane_map(M, Z, S22)

    def test_automorphism_keeps_positivity(self):
        A = random_u_pq(S23, 4)
        for Z in sample_positive_planes(S23, 2, 50, 1):
            assert classify_plane(induced_plane_map(A, Z, S23)) is PlaneClass.POSITIVE_DEFINITE


class TestSampling:
    def test_all_positive(self):
        Z = sample_positive_planes(S23, 2, 1000, 0)
        assert Z.shape == (1000, 5, 2)
        assert all(classify_plane(z, S23) is PlaneClass.POSITIVE_DEFINITE for z in Z[::10])

    def test_deterministic_and_prefix(self):
        a = sample_positive_planes(S22, 1, 1500, 9)
        b = sample_positive_planes(S22, 1, 1500, 9)
        c = sample_positive_planes(S22, 1, 1024, 9)
        assert np.array_equal(a, b) and np.array_equal(a[:1024], c)

    def test_real(self):
        Z = sample_positive_planes(S22, 2, 20, 0, real=True)
        assert np.isrealobj(Z)

    def test_r_too_large(self):
        with pytest.raises(DimensionError):
            sample_positive_planes(S22, 3, 5, 0)

    def test_single(self):
        P = sample_positive_plane(S22, 2, 5)
        assert P.r == 2 and classify_plane(P) is PlaneClass.POSITIVE_DEFINITE


class TestOracle:
    @pytest.mark.parametrize("r", [1, 2])
    def test_automorphism(self, r):
        assert oracle_selfmap_planes(block_ex52(), r, 500, sig=S22).consistent

    def test_counterexample(self):
        res = oracle_selfmap_planes(np.diag([1.0, 2.0]), 1, 500, sig=Signature(1, 1))
        assert not res.consistent
        assert res.label == "CounterexampleFound"
        assert classify_plane(res.witness, Signature(1, 1)) is PlaneClass.POSITIVE_DEFINITE

    def test_minimal_map_r2(self):
        # rank-p maps send generic positive p-planes onto their positive range
        assert oracle_selfmap_planes(get_fixture("ex5.1-corrected").matrix, 2, 500, sig=S22).consistent


class TestClosureSearch:
    def test_block_example(self):
        c = closure_fixed_plane_search(block_ex52(), S22)
        assert c.vector_class is VectorClass.NULL
        assert c.plane_class is PlaneClass.POSITIVE_SEMIDEFINITE
        assert c.invariance_angle <= 1e-7

    def test_diag(self):
        c = closure_fixed_plane_search(np.diag([1, -1, 1j, -1j]), S22)
        assert c.vector_class is VectorClass.POSITIVE
        assert c.plane_class is PlaneClass.POSITIVE_DEFINITE

    def test_not_self_map(self):
        with pytest.raises(NotSelfMapError):
            closure_fixed_plane_search(np.diag([1.0, 2.0]), Signature(1, 1))

    @given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 1), (1, 2), (2, 2), (2, 3), (3, 2)]))
    def test_random_automorphisms(self, seed, pq):
        sig = Signature(*pq)
        A = random_u_pq(sig, seed)
        try:
            c = closure_fixed_plane_search(A, sig)
        except ConvergenceError:
            pytest.fail("no closure fixed point")
        v = c.vector
        assert classify_vector(v, sig).kind is not VectorClass.NEGATIVE
        lam = c.eigenvalue
        assert np.linalg.norm(A @ v - lam * v) <= 1e-8 * np.linalg.norm(A, 2)
        assert c.plane.r == sig.p and c.invariance_angle <= 1e-7
