import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from genball import (
    NotSelfMapError,
    Signature,
    Verdict,
    classify,
    extension_obstruction,
    get_fixture,
    is_expansion,
    isometry_constant,
    oracle_selfmap_vectors,
    random_u_pq,
    scaling_interval,
)
from genball.selfmap import ExtensionKind, MapCandidate, kernel_null_vectors, sample_positive_vectors

from conftest import block_ex52, cgauss, proj_close

EX51 = get_fixture("ex5.1-corrected").matrix


class TestScalingInterval:
    def test_diag_closed_form(self, s11):
        s = scaling_interval(np.diag([2.0, 1.0]), s11)
        assert not s.empty
        assert s.lo == pytest.approx(1, abs=1e-9) and s.hi == pytest.approx(4, abs=1e-9)

    @pytest.mark.parametrize("p,q", [(1, 1), (2, 2), (1, 3)])
    def test_identity(self, p, q):
        s = scaling_interval(np.eye(p + q), Signature(p, q))
        assert not s.empty
        assert s.lo == pytest.approx(1, abs=1e-9) and s.hi == pytest.approx(1, abs=1e-9)

    def test_empty(self, s11):
        assert scaling_interval(np.diag([1.0, 2.0]), s11).empty

    def test_every_point_feasible(self):
        sig = Signature(1, 2)
        M = np.diag([3.0, 1.0, 0.5])
        s = scaling_interval(M, sig)
        K = M.conj().T @ sig.form @ M
        for lam in np.linspace(s.lo, s.hi, 7):
            G = K - lam * sig.form
            assert np.linalg.eigvalsh(G).min() >= -1e-9 * max(np.linalg.norm(G, 2), 1)

    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.floats(0, 2 * np.pi))
    def test_scale_covariance(self, seed, r, phi):
        sig = Signature(1, 2)
        rng = np.random.default_rng(seed)
        # diagonal expansions perturbed by U(1,2) conjugation stay self maps with finite ends
        d = np.array([rng.uniform(2, 4), rng.uniform(0.1, 1), rng.uniform(0.1, 1)])
        U = random_u_pq(sig, seed, t_max=0.5)
        M = U @ np.diag(d) @ np.linalg.inv(U)
        s1 = scaling_interval(M, sig)
        s2 = scaling_interval(r * np.exp(1j * phi) * M, sig)
        assert not s1.empty and not s2.empty
        for a, b in ((s1.lo, s2.lo), (s1.hi, s2.hi)):
            assert b == pytest.approx(r * r * a, rel=1e-7, abs=1e-7 * r * r)


class TestClassify:
    def test_block_automorphism(self, s22):
        rep = classify(block_ex52(), s22)
        assert rep.verdict is Verdict.AUTOMORPHISM
        assert rep.isometry_constant == pytest.approx(1, abs=1e-9)

    def test_minimal(self, s22):
        rep = classify(EX51, s22)
        assert rep.verdict is Verdict.MINIMAL
        assert rep.kernel_signature == (0, 1, 1)
        assert rep.rank == 2

    def test_printed_variant_is_not_a_self_map(self, s22):
        # [z1+z3, z4, 0, 0] sends the positive e2 to zero
        M = np.zeros((4, 4))
        M[0] = [1, 0, 1, 0]
        M[1] = [0, 0, 0, 1]
        assert classify(M, s22).verdict is Verdict.NOT_SELF_MAP

    def test_not_self_map(self, s11):
        assert classify(np.diag([1.0, 2.0]), s11).verdict is Verdict.NOT_SELF_MAP
        # the explicit witness
        w = np.diag([1.0, 2.0]) @ np.array([1, 0.9])
        assert abs(w[0]) ** 2 - abs(w[1]) ** 2 < 0

    def test_non_minimal(self):
        rep = classify(np.diag([2.0, 1.0, 1.0]), Signature(1, 2))
        assert rep.verdict is Verdict.NON_MINIMAL
        assert rep.scaling.lo == pytest.approx(1, abs=1e-9)
        assert rep.scaling.hi == pytest.approx(4, abs=1e-9)

    def test_rank_below_p(self, s22):
        M = np.zeros((4, 4))
        M[0, 0] = 1
        assert classify(M, s22).verdict is Verdict.NOT_SELF_MAP

    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 100), st.floats(0, 2 * np.pi))
    def test_verdict_scale_invariant(self, seed, r, phi):
        rng = np.random.default_rng(seed)
        sig = Signature(2, 2)
        kind = seed % 3
        if kind == 0:
            M = random_u_pq(sig, seed)
        elif kind == 1:
            U = random_u_pq(sig, seed, t_max=0.3)
            M = U @ np.diag([2.0, 1.5, 0.3, 0.2]) @ np.linalg.inv(U)
        else:
            M = cgauss(rng, 4, 4)
        a = r * np.exp(1j * phi)
        assert classify(a * M, sig).verdict is classify(M, sig).verdict

    @given(st.integers(0, 2**32 - 1))
    def test_isometry_property(self, seed):
        sig = Signature(2, 3)
        c = 0.5 + (seed % 7)
        A = math.sqrt(c) * random_u_pq(sig, seed)
        rep = classify(A, sig)
        assert rep.verdict is Verdict.AUTOMORPHISM
        assert rep.isometry_constant == pytest.approx(c, rel=1e-9)
        B = A / math.sqrt(rep.isometry_constant)
        assert np.linalg.norm(B.conj().T @ sig.form @ B - sig.form) <= 1e-8 * np.linalg.norm(sig.form)
        # the inverse of a surjective isometry is again a self map
        assert classify(np.linalg.inv(A), sig).verdict is Verdict.AUTOMORPHISM

    @given(st.integers(0, 2**32 - 1))
    def test_expansion_round_trip(self, seed):
        sig = Signature(2, 2)
        rng = np.random.default_rng(seed)
        U = random_u_pq(sig, seed, t_max=1.0)
        V = random_u_pq(sig, seed + 1, t_max=1.0)
        d = np.concatenate([rng.uniform(1.5, 3, 2), rng.uniform(0.1, 0.9, 2)])
        M = U @ np.diag(d) @ V
        rep = classify(M, sig)
        assert rep.verdict is Verdict.NON_MINIMAL
        lam = rep.scaling.midpoint
        assert lam > 0
        assert is_expansion(M / math.sqrt(lam), sig)


class TestIsExpansion:
    def test_unitary(self, s22):
        assert is_expansion(random_u_pq(s22, 3), s22)

    def test_diag(self):
        assert is_expansion(np.diag([2.0, 1.0, 1.0]), Signature(1, 2))

    def test_not(self, s11):
        assert not is_expansion(np.diag([1.0, 2.0]), s11)


class TestExtension:
    def test_minimal_meets_boundary(self, s22):
        assert extension_obstruction(EX51, s22) is ExtensionKind.INDETERMINACY_MEETS_BOUNDARY
        K = kernel_null_vectors(EX51, s22)
        assert K.shape[1] == 1
        assert proj_close(K[:, 0], [1, 0, -1, 0])

    def test_invertible(self, s22):
        assert extension_obstruction(block_ex52(), s22) is ExtensionKind.INVERTIBLE
        assert extension_obstruction(np.diag([2.0, 1.0, 1.0]), Signature(1, 2)) is ExtensionKind.INVERTIBLE

    def test_negative_definite_kernel(self):
        # rank p+q-1, kernel spanned by a negative vector
        M = np.diag([2.0, 1.0, 0.0])
        assert extension_obstruction(M, Signature(1, 2)) is ExtensionKind.EXTENDS_ACROSS_CLOSURE

    def test_not_self_map(self, s11):
        with pytest.raises(NotSelfMapError):
            extension_obstruction(np.diag([1.0, 2.0]), s11)


class TestVectorOracle:
    def test_automorphism(self, s22):
        assert oracle_selfmap_vectors(block_ex52(), s22, samples=5000, seed=0).consistent

    def test_counterexample(self, s11):
        res = oracle_selfmap_vectors(np.diag([1.0, 2.0]), s11, samples=5000, seed=0)
        assert not res.consistent and res.label == "CounterexampleFound"
        w = res.image
        assert abs(w[0]) ** 2 - abs(w[1]) ** 2 <= 1e-8 * np.vdot(w, w).real
        z = res.witness
        assert abs(z[0]) ** 2 - abs(z[1]) ** 2 > 0

    @pytest.mark.parametrize("p,q", [(1, 1), (2, 3)])
    def test_identity(self, p, q):
        assert oracle_selfmap_vectors(np.eye(p + q), Signature(p, q), samples=300, seed=1).consistent

    def test_deterministic(self, s22):
        a = sample_positive_vectors(s22, 2100, seed=5)
        b = sample_positive_vectors(s22, 2100, seed=5)
        np.testing.assert_array_equal(a, b)
        assert a.shape == (2100, 4)
        m = np.sum(np.abs(a[:, :2]) ** 2, 1) - np.sum(np.abs(a[:, 2:]) ** 2, 1)
        assert np.all(m > 0)

    def test_chunked_prefix(self, s22):
        # substreams make the first chunk independent of the total
        a = sample_positive_vectors(s22, 1024, seed=9)
        b = sample_positive_vectors(s22, 3000, seed=9)
        np.testing.assert_array_equal(a, b[:1024])


def test_candidate_validation(s22):
    with pytest.raises(ValueError):
        MapCandidate(np.eye(3), s22)


def test_isometry_constant_fit(s22):
    c, ok = isometry_constant(3 * block_ex52(), s22)
    assert ok and c == pytest.approx(9)
    assert not isometry_constant(np.diag([2.0, 1, 1, 1]), s22)[1]
