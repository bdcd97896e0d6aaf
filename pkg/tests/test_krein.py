import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from friedrichs_bc import krein
from friedrichs_bc.errors import DegenerateForm, InvalidDimension, NotADirectSum
from friedrichs_bc.krein import IndefForm, Subspace

J2 = IndefForm(np.diag([-1.0, 1.0]))
INV_E = np.exp(-1.0)


def span(*vecs):
    return Subspace.span(np.array(vecs, dtype=float).T)


def random_form(rng, n, n_plus=None):
    """Random nondegenerate Hermitian form with prescribed inertia."""
    if n_plus is None:
        n_plus = int(rng.integers(0, n + 1))
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    ev = np.concatenate([rng.uniform(0.2, 3.0, n_plus), -rng.uniform(0.2, 3.0, n - n_plus)])
    return IndefForm(q @ np.diag(ev) @ q.conj().T)


class TestFormEval:
    @pytest.mark.parametrize("x, y, expected", [
        ((0, 0), (0, 0), 0.0),
        ((1, 1), (1, 1), 0.0),
        ((1, 2), (1, 2), 3.0),
    ])
    def test_values(self, x, y, expected):
        assert krein.form_eval(J2, np.array(x, float), np.array(y, float)) == expected

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDimension):
            krein.form_eval(J2, np.ones(3), np.ones(2))

    def test_conjugate_linear_in_second_slot(self):
        x = np.array([1.0, 2.0])
        y = np.array([1j, 1.0])
        assert J2(x, 2j * y) == pytest.approx(-2j * J2(x, y))
        assert J2(2j * x, y) == pytest.approx(2j * J2(x, y))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
    def test_hermitian_symmetry(self, n, seed):
        rng = np.random.default_rng(seed)
        form = random_form(rng, n)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        assert abs(form(x, y) - np.conj(form(y, x))) <= 1e-10 * max(1, abs(form(x, y)))


class TestIndefForm:
    def test_rejects_singular(self):
        with pytest.raises(DegenerateForm):
            IndefForm(np.diag([1.0, 0.0]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            IndefForm(np.array([[1.0, 2.0], [0.0, -1.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(InvalidDimension):
            IndefForm(np.ones((2, 3)))

    @pytest.mark.parametrize("gram, expected", [
        (np.diag([-1.0, 1.0]), (1, 0, 1)),
        (np.eye(3), (3, 0, 0)),
    ])
    def test_signature(self, gram, expected):
        assert tuple(krein.signature(IndefForm(gram))) == expected

    def test_signature_elliptic_block_form(self):
        e = np.diag([-1.0, 1.0])
        j = np.block([[np.zeros((2, 2)), e], [e, np.zeros((2, 2))]])
        assert tuple(krein.signature(IndefForm(j))) == (2, 0, 2)


class TestSubspace:
    def test_span_drops_dependent_columns(self):
        s = Subspace.span(np.array([[1.0, 2.0, 0.0], [1.0, 2.0, 0.0]]))
        assert s.dim == 1

    def test_equality_is_basis_independent(self):
        assert span((1, 2)) == span((-3, -6))
        assert span((1, 0), (0, 1)) == Subspace.full(2)
        assert not span((1, 2)) == span((2, 1))

    def test_basis_orthonormal(self):
        rng = np.random.default_rng(1)
        s = Subspace.span(rng.standard_normal((6, 3)))
        assert np.allclose(s.basis.T @ s.basis, np.eye(3), atol=1e-12)

    def test_ambient_dim_check(self):
        with pytest.raises(InvalidDimension):
            Subspace.span(np.ones((3, 1)), ambient_dim=2)


class TestOrthoComplement:
    def test_full_space(self):
        assert krein.ortho_complement(J2, Subspace.full(2)).dim == 0

    def test_zero_space(self):
        assert krein.ortho_complement(J2, Subspace.zero(2)) == Subspace.full(2)

    def test_hand_solved(self):
        assert krein.ortho_complement(J2, span((1, 2))) == span((2, 1))

    def test_neutral_line_is_self_orthogonal(self):
        assert krein.ortho_complement(J2, span((1, 1))) == span((1, 1))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1), st.data())
    def test_dimension_law_and_biorthogonality(self, n, seed, data):
        rng = np.random.default_rng(seed)
        form = random_form(rng, n)
        k = data.draw(st.integers(0, n))
        x = Subspace.span(rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k)), n)
        perp = krein.ortho_complement(form, x)
        assert x.dim + perp.dim == n
        assert krein.ortho_complement(form, perp) == x
        for u in x.basis.T:
            for v in perp.basis.T:
                assert abs(form(u, v)) <= 1e-9

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
    def test_neutral_subspaces_lie_in_both_cones(self, half, seed):
        # graph of a form-isometry between the two definite halves is neutral
        rng = np.random.default_rng(seed)
        n = 2 * half
        form = IndefForm(np.diag([1.0] * half + [-1.0] * half))
        q, _ = np.linalg.qr(rng.standard_normal((half, half)))
        k = int(rng.integers(0, half + 1))
        x = Subspace.span(np.vstack([np.eye(half), q])[:, :k], n)
        assert x.dim == k
        perp = krein.ortho_complement(form, x)
        assert np.allclose(perp.projector() @ x.basis, x.basis, atol=1e-10)  # X in X^[perp]
        assert krein.cone_check(form, x, "nonneg") and krein.cone_check(form, x, "nonpos")


class TestCones:
    def test_zero_subspace(self):
        assert krein.cone_check(J2, Subspace.zero(2), "nonneg")
        assert krein.cone_check(J2, Subspace.zero(2), "nonpos")

    def test_signs(self):
        assert krein.cone_check(J2, span((1, 2)), "nonneg")
        assert not krein.cone_check(J2, span((2, 1)), "nonneg")
        assert krein.cone_check(J2, span((2, 1)), "nonpos")

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            krein.cone_check(J2, span((1, 2)), "positive")

    def test_maximality_examples(self):
        assert krein.is_maximal_semidefinite(J2, span((1, 2)), "nonneg", crosscheck=True)
        assert not krein.is_maximal_semidefinite(J2, Subspace.zero(2), "nonneg", crosscheck=True)
        assert not krein.is_maximal_semidefinite(J2, span((2, 1)), "nonneg", crosscheck=True)

    def test_dirichlet_traces_maximal(self):
        e = np.diag([-1.0, 1.0])
        form = IndefForm(np.block([[np.zeros((2, 2)), e], [e, np.zeros((2, 2))]]))
        x = Subspace.span(np.eye(4)[:, :2])
        assert krein.is_maximal_semidefinite(form, x, "nonneg")
        assert krein.extension_oracle(form, x, "nonneg")

    def test_maximality_agrees_with_oracle(self):
        # mixes arbitrary subspaces with maximal ones built as contraction graphs
        rng = np.random.default_rng(2024)
        hits = {True: 0, False: 0}
        for i in range(1000):
            n = int(rng.integers(1, 9))
            n_plus = int(rng.integers(0, n + 1))
            form = random_form(rng, n, n_plus)
            sign = "nonneg" if rng.random() < 0.5 else "nonpos"
            if rng.random() < 0.5:
                k = int(rng.integers(0, n + 1))
                x = Subspace.span(rng.standard_normal((n, k)), n)
            else:
                ev, vec = np.linalg.eigh(form.gram)
                pos, neg = vec[:, ev > 0], vec[:, ev < 0]
                if sign == "nonpos":
                    pos, neg = neg, pos
                c = rng.standard_normal((neg.shape[1], pos.shape[1]))
                if c.size:
                    # keep ||c|| (in the form-induced norms) at most one
                    w_pos = np.sqrt(np.abs(ev[ev > 0] if sign == "nonneg" else ev[ev < 0]))
                    w_neg = np.sqrt(np.abs(ev[ev < 0] if sign == "nonneg" else ev[ev > 0]))
                    core = w_neg[:, None] * c / w_pos[None, :]
                    c = c * (rng.uniform(0, 1) / np.linalg.norm(core, 2))
                x = Subspace.span(pos + neg @ c, n) if pos.shape[1] else Subspace.zero(n)
            verdict = krein.is_maximal_semidefinite(form, x, sign, crosscheck=True, seed=i)
            hits[verdict] += 1
        assert hits[True] > 100 and hits[False] > 100


class TestProjectorPair:
    def test_orthogonal_case(self):
        p1, p2 = krein.projector_pair(span((1, 0)), span((0, 1)))
        assert np.allclose(p1, np.diag([1.0, 0.0]))
        assert np.allclose(p2, np.diag([0.0, 1.0]))

    def test_oblique_hand_inverse(self):
        # X = span{(1, 2)}, Y = span{(1, 1/e)}: (a, b) = s (1, 2) + t (1, 1/e)
        x, y = span((1, 2)), span((1, INV_E))
        p1, p2 = krein.projector_pair(x, y)
        det = INV_E - 2.0
        s_row = np.array([INV_E, -1.0]) / det          # coefficient s as a functional
        expected = np.outer([1.0, 2.0], s_row)
        assert np.allclose(p1, expected, atol=1e-12)
        assert np.allclose(p1 + p2, np.eye(2), atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1), st.data())
    def test_projector_identities(self, n, seed, data):
        rng = np.random.default_rng(seed)
        k = data.draw(st.integers(0, n))
        a = rng.standard_normal((n, n))
        x, y = Subspace.span(a[:, :k], n), Subspace.span(a[:, k:], n)
        p1, p2 = krein.projector_pair(x, y)
        assert np.max(np.abs(p1 + p2 - np.eye(n))) <= 1e-10 * np.linalg.cond(a)
        assert np.max(np.abs(p1 @ p1 - p1)) <= 1e-10 * np.linalg.cond(a)
        assert np.allclose(p1 @ x.basis, x.basis, atol=1e-8)
        assert np.allclose(p1 @ y.basis, 0, atol=1e-8)

    def test_coincident(self):
        with pytest.raises(NotADirectSum):
            krein.projector_pair(span((1, INV_E)), span((1, INV_E)))

    def test_not_exhaustive(self):
        with pytest.raises(NotADirectSum):
            krein.projector_pair(span((1, 0, 0)), span((0, 1, 0)))
