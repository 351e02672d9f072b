import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from genball import (
    ClusteredSpectrumError,
    NotSelfMapError,
    PreconditionError,
    Signature,
    boundary_invariant_subspace,
    fixed_lines,
    fixed_points,
    get_fixture,
    jordan_structure,
    location_counts,
    orthogonality_audit,
    random_u_pq,
    theorem_audit,
)
from genball.core import VectorClass, classify_vector, span, subspace_signature
from genball.fixed_points import AuditStatus, LineDisposition, Location, PairStatus, analyze_fixed_points
from genball.fixtures import EX54_EIGENPAIRS

from conftest import R2, block_ex52, proj_close

EX53 = np.diag([1, -1, 1j, -1j])
EX54 = get_fixture("ex5.4").matrix
EX55 = get_fixture("ex5.5").matrix


def audit_map(M, sig):
    return {e.theorem: e for e in theorem_audit(M, sig)}


class TestFixedPoints:
    def test_diag(self, s22):
        recs = fixed_points(EX53, s22)
        assert len(recs) == 4
        by_val = {complex(np.round(r.eigenvalue, 12)): r for r in recs}
        for lam, k, loc in [(1, 0, Location.INTERIOR), (-1, 1, Location.INTERIOR), (1j, 2, Location.EXTERIOR), (-1j, 3, Location.EXTERIOR)]:
            r = by_val[lam]
            assert r.location is loc
            assert proj_close(r.point, np.eye(4)[k])

    def test_boundary_example(self, s22):
        recs = fixed_points(EX54, s22)
        assert [r.location for r in recs] == [Location.BOUNDARY] * 4
        for lam, alpha in EX54_EIGENPAIRS:
            match = [r for r in recs if abs(r.eigenvalue - lam) <= 1e-8]
            assert len(match) == 1
            assert proj_close(match[0].point, alpha, 1e-7)

    def test_identity(self, s11):
        assert fixed_points(np.eye(2), s11) == []

    def test_not_self_map(self, s11):
        with pytest.raises(NotSelfMapError):
            fixed_points(np.diag([1.0, 2.0]), s11)

    def test_point_normalization(self, s22):
        for r in fixed_points(EX54, s22):
            assert abs(np.linalg.norm(r.point) - 1) < 1e-12
            k = int(np.flatnonzero(np.abs(r.point) > 1e-12)[0])
            assert r.point[k].imag == 0 and r.point[k].real > 0

    def test_minimal_map_kernel_excluded(self, s22):
        recs = fixed_points(get_fixture("ex5.1-corrected").matrix, s22)
        assert all(abs(r.eigenvalue) > 1e-8 for r in recs)
        assert all(r.location is not Location.BOUNDARY for r in recs)


class TestFixedLines:
    def test_block_example(self, s22):
        lines = fixed_lines(block_ex52(), s22)
        assert [l.disposition for l in lines] == [LineDisposition.IN_BOUNDARY] * 2
        vals = sorted(l.eigenvalue.real for l in lines)
        assert vals == pytest.approx([R2 - 1, R2 + 1])
        for l in lines:
            for v in l.basis.T:
                assert np.linalg.norm(block_ex52() @ v - l.eigenvalue * v) <= 1e-9 * np.linalg.norm(block_ex52(), 2)

    def test_none(self, s22):
        assert fixed_lines(EX54, s22) == []

    def test_identity(self, s11):
        lines = fixed_lines(np.eye(2), s11)
        assert len(lines) == 1 and lines[0].disposition is LineDisposition.MEETS_INTERIOR

    def test_exterior_and_touching(self):
        sig = Signature(1, 3)
        # eigenspaces {e3,e4} (negative definite) and {e1, e2} (indefinite)
        lines = fixed_lines(np.diag([2.0, 2.0, 1.0, 1.0]), sig)
        disp = {l.disposition for l in lines}
        assert LineDisposition.EXTERIOR in disp and LineDisposition.MEETS_INTERIOR in disp

    def test_counts_infinite(self, s22):
        c = location_counts(block_ex52(), s22)
        assert c[Location.BOUNDARY] == math.inf and c[Location.INTERIOR] == 0 and c[Location.EXTERIOR] == 0


class TestJordan:
    def test_two_blocks(self, s22):
        js = jordan_structure(EX55, s22)
        assert len(js) == 1
        jd = js[0]
        assert abs(jd.eigenvalue - 1) <= 1e-7
        assert sorted(jd.block_sizes) == [2, 2]
        E = span([[1, 0, 1, 0], [0, 1, 0, -1]], s22)
        for ch in jd.chains:
            v1 = ch[:, 0]
            assert E.contains(v1 / np.linalg.norm(v1), tol=None)
            assert classify_vector(v1, s22).kind is VectorClass.NULL
            # chain relation v_1 = (A - I) v_2
            assert np.linalg.norm((EX55 - jd.eigenvalue * np.eye(4)) @ ch[:, 1] - v1) <= 1e-12

    def test_diag(self, s22):
        js = jordan_structure(EX53, s22)
        assert len(js) == 4 and all(j.block_sizes == (1,) for j in js)

    def test_identity(self):
        js = jordan_structure(np.eye(4))
        assert len(js) == 1 and js[0].block_sizes == (1, 1, 1, 1)

    def test_mixed_blocks(self):
        M = np.eye(5, dtype=complex) * 2
        M[0, 1] = M[1, 2] = 1
        M[4, 4] = -1
        js = {round(j.eigenvalue.real): j for j in jordan_structure(M)}
        assert js[2].block_sizes == (3, 1) and js[-1].block_sizes == (1,)
        assert js[2].nullities == (0, 2, 3, 4)

    def test_clustered(self):
        with pytest.raises(ClusteredSpectrumError):
            jordan_structure(np.diag([1.0, 1.0 + 1e-7, 3.0]))

    @given(st.integers(0, 2**32 - 1))
    def test_sizes_sum(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        # blocks of size <= 2: longer blocks split by eps**(1/k) past the cluster radius
        sizes = []
        while sum(sizes) < n:
            sizes.append(int(rng.integers(1, min(2, n - sum(sizes)) + 1)))
        vals = rng.choice([1.0, -2.0, 3.0], size=len(sizes))
        J = np.zeros((n, n), dtype=complex)
        i = 0
        for s, v in zip(sizes, vals):
            J[i : i + s, i : i + s] = v * np.eye(s) + np.eye(s, k=1)
            i += s
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        M = Q @ J @ Q.conj().T
        js = jordan_structure(M)
        assert sum(sum(j.block_sizes) for j in js) == n
        for v in set(vals):
            want = sorted([s for s, w in zip(sizes, vals) if w == v], reverse=True)
            got = [j for j in js if abs(j.eigenvalue - v) < 1e-6]
            assert len(got) == 1 and list(got[0].block_sizes) == want


class TestBoundarySubspace:
    def test_unimodular_chains(self, s22):
        jd = jordan_structure(EX55, s22)[0]
        for i in range(len(jd.chains)):
            b = boundary_invariant_subspace(EX55, s22, jd, i)
            assert b.basis.shape[1] == 1
            assert b.passed and b.isotropic
            assert span([[1, 0, 1, 0], [0, 1, 0, -1]], s22).contains(b.basis[:, 0] / np.linalg.norm(b.basis[:, 0]))

    def test_non_unimodular(self, s22):
        for jd in jordan_structure(EX54, s22):
            b = boundary_invariant_subspace(EX54, s22, jd, 0)
            assert b.passed and b.signature == (0, 1, 0)

    def test_precondition(self, s22):
        jd = jordan_structure(EX53, s22)[0]
        with pytest.raises(PreconditionError):
            boundary_invariant_subspace(EX53, s22, jd, 0)

    def test_needs_automorphism(self):
        sig = Signature(1, 2)
        M = np.diag([2.0, 1.0, 1.0])
        with pytest.raises(PreconditionError):
            boundary_invariant_subspace(M, sig, jordan_structure(M, sig)[0], 0)

    @given(st.integers(0, 2**32 - 1))
    def test_random_automorphisms(self, seed):
        sig = Signature(2, 3)
        A = random_u_pq(sig, seed)
        for jd in jordan_structure(A, sig):
            lam = jd.eigenvalue
            if abs(abs(lam) - 1) > 1e-3:
                b = boundary_invariant_subspace(A, sig, jd, 0)
                assert b.passed


class TestOrthogonality:
    def test_block_example(self, s22):
        au = orthogonality_audit(block_ex52(), s22)
        assert {e.status for e in au} <= {PairStatus.ORTHOGONAL, PairStatus.RECIPROCAL_PAIR}
        # eigenvalues sqrt2+1 are listed first (two vectors), then sqrt2-1
        cross = [e for e in au if e.i < 2 <= e.j]
        assert any(e.status is PairStatus.RECIPROCAL_PAIR for e in cross)
        v1, v3 = np.array([1, 0, -1, 0]), np.array([1, 0, 1, 0])
        assert complex(np.vdot(v3, s22.diag * v1)) == 2

    def test_diag(self, s22):
        au = {(e.i, e.j): e for e in orthogonality_audit(EX53, s22)}
        pairs = [(e.i, e.j) for e in au.values() if e.i != e.j]
        assert all(au[k].status is PairStatus.ORTHOGONAL for k in pairs)

    @given(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
    def test_diag_u11(self, a, b):
        if abs(np.exp(1j * a) - np.exp(1j * b)) < 1e-3:
            return
        au = orthogonality_audit(np.diag([np.exp(1j * a), np.exp(1j * b)]), Signature(1, 1))
        assert [e.status for e in au if e.i != e.j] == [PairStatus.ORTHOGONAL]

    @given(st.integers(0, 2**32 - 1))
    def test_random(self, seed):
        sig = Signature(2, 2)
        orthogonality_audit(random_u_pq(sig, seed), sig)


class TestAudit:
    def test_sharpness(self, s22):
        a = audit_map(EX54, s22)
        assert a["bb_generalization"].status is AuditStatus.VACUOUS
        assert a["at_most"].status is AuditStatus.PASS

    def test_at_most_diag(self, s22):
        assert audit_map(EX53, s22)["at_most"].status is AuditStatus.PASS

    def test_ball(self):
        sig = Signature(1, 3)
        U = random_u_pq(sig, 11)
        th = 0.7
        A = U @ np.diag([np.exp(1j * th), np.exp(1j * th), np.exp(0.4j), np.exp(2.1j)]) @ np.linalg.inv(U)
        a = audit_map(A, sig)
        assert a["ball"].status is AuditStatus.PASS
        assert a["existence"].status is AuditStatus.PASS

    def test_minimal(self, s22):
        a = audit_map(get_fixture("ex5.1-corrected").matrix, s22)
        assert a["minimal_no_boundary"].status is AuditStatus.PASS

    def test_no_fail_on_fixtures(self):
        for name in ("ex5.1-corrected", "ex5.2", "ex5.3", "ex5.4", "ex5.5", "hyperbolic-1,1"):
            fx = get_fixture(name)
            assert all(e.status is not AuditStatus.FAIL for e in theorem_audit(fx.matrix, fx.signature))

    @given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 1), (1, 2), (2, 2), (2, 3)]))
    def test_random_automorphisms(self, seed, pq):
        sig = Signature(*pq)
        A = random_u_pq(sig, seed)
        a = audit_map(A, sig)
        assert all(e.status is not AuditStatus.FAIL for e in a.values())
        fa = analyze_fixed_points(A, sig)
        if not fa.lines:
            c = fa.counts
            assert c[Location.INTERIOR] <= sig.p and c[Location.EXTERIOR] <= sig.q
            assert c[Location.BOUNDARY] <= min(2 * sig.p, 2 * sig.q)

    @given(st.integers(0, 2**32 - 1))
    def test_conjugation_invariance(self, seed):
        sig = Signature(2, 2)
        A = random_u_pq(sig, seed)
        C = random_u_pq(sig, seed + 7)
        c1 = location_counts(A, sig)
        c2 = location_counts(C @ A @ np.linalg.inv(C), sig)
        assert c1 == c2


def test_record_residuals():
    sig = Signature(2, 3)
    for seed in range(20):
        A = random_u_pq(sig, seed)
        for r in fixed_points(A, sig):
            assert np.linalg.norm(A @ r.point - r.eigenvalue * r.point) <= 1e-9 * np.linalg.norm(A, 2)
            assert classify_vector(r.point, sig).kind.value == {"interior": "positive", "boundary": "null", "exterior": "negative"}[r.location.value]


def test_subspace_signature_of_eigenspace(s22):
    assert subspace_signature(span([[1, 0, 1, 0], [0, 1, 0, -1]], s22)) == (0, 2, 0)
