import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xcflow.curvature import (
    MetricJet,
    Riemann3,
    SymTensor3,
    christoffel,
    cross_curvature,
    cross_curvature_forms,
    eigen_frame,
    einstein_raised,
    jet_from_function,
    pack,
    ricci,
    riemann,
    space_form_chart,
    space_form_chart_jet,
    unpack,
    volume_form,
)
from xcflow.errors import DomainError, InternalConsistencyError

IDENTITY = SymTensor3.identity()


def constant_jet(g: SymTensor3) -> MetricJet:
    return MetricJet(g, np.zeros((3, 6)), np.zeros((6, 6)))


def spd(rng, scale=1.0):
    m = rng.uniform(-1.0, 1.0, (3, 3))
    return SymTensor3.from_matrix(scale * (m @ m.T + 0.5 * np.eye(3)))


def gen_eigs(t, g):
    import scipy.linalg
    gm = g.matrix
    if t.variance == "lower":
        return np.sort(scipy.linalg.eigvalsh(t.matrix, gm))
    return np.sort(scipy.linalg.eigvalsh(gm @ t.matrix @ gm, gm))


class TestSymTensor3:
    def test_pack_unpack_roundtrip(self):
        m = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 5.0], [3.0, 5.0, 6.0]])
        assert np.array_equal(unpack(pack(m)), m)

    def test_component_order_is_11_12_13_22_33_23(self):
        m = np.array([[11.0, 12.0, 13.0], [12.0, 22.0, 23.0], [13.0, 23.0, 33.0]])
        assert np.array_equal(pack(m), [11.0, 12.0, 13.0, 22.0, 33.0, 23.0])

    def test_rejects_asymmetric_matrix(self):
        with pytest.raises(DomainError):
            SymTensor3.from_matrix(np.array([[1.0, 2.0, 0], [0, 1, 0], [0, 0, 1]]))

    def test_positive_definite_by_leading_minors(self):
        assert IDENTITY.is_positive_definite()
        assert not SymTensor3(np.array([1.0, 0, 0, -1.0, 1.0, 0])).is_positive_definite()
        # positive minors but indefinite-looking off-diagonals
        assert not SymTensor3(np.array([1.0, 2.0, 0, 1.0, 1.0, 0])).is_positive_definite()


class TestVolumeForm:
    def test_identity_metric_normalization(self):
        mu_lo, mu_up = volume_form(IDENTITY)
        assert mu_lo[0, 1, 2] == 1.0
        assert mu_up[0, 1, 2] == 1.0

    def test_scaled_metric_determinant_scaling(self):
        g = SymTensor3(4.0 * IDENTITY.components)
        mu_lo, mu_up = volume_form(g)
        assert mu_lo[0, 1, 2] == pytest.approx(8.0, rel=1e-15)
        assert mu_up[0, 1, 2] == pytest.approx(1.0 / 8.0, rel=1e-15)

    def test_rejects_indefinite_metric(self):
        with pytest.raises(DomainError):
            volume_form(SymTensor3(np.array([-1.0, 0, 0, 1.0, 1.0, 0])))

    def test_contraction_identity_brute_force(self):
        rng = np.random.default_rng(3)
        g = spd(rng)
        mu_lo, mu_up = volume_form(g)
        delta = np.eye(3)
        for i in range(3):
            for j in range(3):
                for l in range(3):
                    for m in range(3):
                        got = sum(mu_lo[i, j, k] * mu_up[l, m, k] for k in range(3))
                        want = delta[i, l] * delta[j, m] - delta[i, m] * delta[j, l]
                        assert got == pytest.approx(want, abs=1e-12)


class TestChristoffel:
    def test_constant_metric_gives_zero(self):
        rng = np.random.default_rng(5)
        jet = constant_jet(spd(rng))
        assert np.abs(christoffel(jet)).max() == 0.0

    def test_conformal_chart_critical_point(self):
        # dg = 0 at the chart origin, so the connection vanishes there
        jet = space_form_chart_jet(1.0, np.zeros(3))
        assert np.abs(christoffel(jet)).max() == 0.0

    def test_chart_values_match_symbolic_oracle(self):
        # frozen from symbolic differentiation of the kappa=1 conformal chart
        # at the point (0.1, 0.2, 0.3)
        gamma = christoffel(space_form_chart_jet(1.0, np.array([0.1, 0.2, 0.3])))
        d1, d2, d3 = -0.04830917874396135, -0.0966183574879227, -0.14492753623188406
        expected = np.array([
            [[d1, d2, d3], [d2, -d1, 0.0], [d3, 0.0, -d1]],
            [[-d2, d1, 0.0], [d1, d2, d3], [0.0, d3, -d2]],
            [[-d3, 0.0, d1], [0.0, -d3, d2], [d1, d2, d3]],
        ])
        assert np.abs(gamma - expected).max() < 1e-12


class TestRiemann:
    def test_flat_jet_gives_zero(self):
        jet = constant_jet(IDENTITY)
        assert np.abs(riemann(jet).lowered).max() == 0.0

    @pytest.mark.parametrize("kappa", [1.0, -1.0, 0.5])
    def test_space_form_closed_form_from_analytic_jet(self, kappa):
        x = np.array([0.2, -0.1, 0.3])
        jet = space_form_chart_jet(kappa, x)
        got = riemann(jet).lowered
        gm = jet.g.matrix
        want = kappa * (np.einsum("ik,jl->ijkl", gm, gm) - np.einsum("il,jk->ijkl", gm, gm))
        assert np.abs(got - want).max() < 1e-12

    def test_algebraic_symmetries_and_bianchi(self):
        jet = space_form_chart_jet(-1.0, np.array([0.3, 0.1, -0.2]))
        r = riemann(jet).lowered
        assert np.abs(r + r.transpose(1, 0, 2, 3)).max() < 1e-12
        assert np.abs(r + r.transpose(0, 1, 3, 2)).max() < 1e-12
        assert np.abs(r - r.transpose(2, 3, 0, 1)).max() < 1e-12
        bianchi = r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2)
        assert np.abs(bianchi).max() < 1e-12

    def test_from_lowered_rejects_broken_symmetry(self):
        bad = np.zeros((3, 3, 3, 3))
        bad[0, 1, 0, 1] = 1.0  # missing the antisymmetric partners
        with pytest.raises(DomainError):
            Riemann3.from_lowered(bad, IDENTITY)

    def test_sphere_sign_convention(self):
        # unit round sphere has R_1212 = +1 in an orthonormal frame
        r = Riemann3.space_form(1.0, IDENTITY)
        assert r.lowered[0, 1, 0, 1] == 1.0


class TestRicci:
    def test_unit_sphere(self):
        r = Riemann3.from_frame(1.0, 1.0, 1.0)
        ric, scalar = ricci(r, IDENTITY)
        assert np.abs(ric.matrix - 2.0 * np.eye(3)).max() == 0.0
        assert scalar == 6.0

    def test_eigenvalues_for_mixed_frame(self):
        ric, scalar = ricci(Riemann3.from_frame(1.0, 2.0, 3.0), IDENTITY)
        assert np.allclose(np.sort(np.linalg.eigvalsh(ric.matrix)), [3.0, 4.0, 5.0])
        assert scalar == 12.0

    def test_flat(self):
        ric, scalar = ricci(Riemann3.space_form(0.0, IDENTITY), IDENTITY)
        assert np.abs(ric.matrix).max() == 0.0
        assert scalar == 0.0


class TestEinsteinRaised:
    def test_unit_sphere_is_identity(self):
        p = einstein_raised(Riemann3.from_frame(1.0, 1.0, 1.0), IDENTITY)
        assert np.abs(p.matrix - np.eye(3)).max() < 1e-15
        assert p.variance == "upper"

    def test_frame_eigenvalues_are_sectional_curvatures(self):
        p = einstein_raised(Riemann3.from_frame(1.0, 2.0, 3.0), IDENTITY)
        assert np.allclose(np.linalg.eigvalsh(p.matrix), [1.0, 2.0, 3.0])

    def test_flat_is_zero(self):
        p = einstein_raised(Riemann3.space_form(0.0, IDENTITY), IDENTITY)
        assert np.abs(p.matrix).max() == 0.0

    def test_inconsistent_pair_raises(self):
        # Riemann of one metric paired with a very different metric breaks
        # the agreement between the trace form and the volume-form route
        r = Riemann3.space_form(1.0, IDENTITY)
        other = SymTensor3(np.array([4.0, 0.3, -0.2, 2.0, 1.0, 0.5]))
        with pytest.raises(InternalConsistencyError):
            einstein_raised(r, other)


class TestCrossCurvature:
    def test_frame_eigenvalues(self):
        h = cross_curvature(Riemann3.from_frame(1.0, 2.0, 3.0), IDENTITY)
        assert np.allclose(np.sort(np.linalg.eigvalsh(h.matrix)), [2.0, 3.0, 6.0])

    def test_unit_sphere_h_equals_g(self):
        h = cross_curvature(Riemann3.from_frame(1.0, 1.0, 1.0), IDENTITY)
        assert np.abs(h.matrix - np.eye(3)).max() < 1e-15

    def test_flat_contraction_form_defined_determinant_skipped(self):
        forms = cross_curvature_forms(Riemann3.space_form(0.0, IDENTITY), IDENTITY)
        assert np.abs(forms.contraction_form.matrix).max() == 0.0
        assert forms.determinant_singular
        assert forms.determinant_form is None

    def test_three_formulas_agree_on_rotated_frame(self):
        rng = np.random.default_rng(11)
        from scipy.stats import special_ortho_group
        q = special_ortho_group.rvs(3, random_state=rng)
        r = Riemann3.from_frame(-1.5, 2.0, 0.7, rotation=q)
        forms = cross_curvature_forms(r, IDENTITY)
        assert forms.max_pairwise_dev < 1e-12
        assert forms.determinant_form is not None

    def test_h_shares_eigenvectors_with_p(self):
        rng = np.random.default_rng(13)
        from scipy.stats import special_ortho_group
        q = special_ortho_group.rvs(3, random_state=rng)
        r = Riemann3.from_frame(1.0, 2.0, 3.0, rotation=q)
        p = einstein_raised(r, IDENTITY)
        h = cross_curvature(r, IDENTITY)
        _, vecs = eigen_frame(p, IDENTITY)
        # in the P eigenbasis h must be diagonal with entries bc, ac, ab
        h_in_frame = vecs.T @ h.matrix @ vecs
        assert np.allclose(h_in_frame, np.diag([6.0, 3.0, 2.0]), atol=1e-12)

    @given(
        a=st.floats(-5, 5), b=st.floats(-5, 5), c=st.floats(-5, 5),
        s=st.floats(0.1, 10),
    )
    @settings(max_examples=150, deadline=None)
    def test_homogeneity_under_metric_scaling(self, a, b, c, s):
        # h(s g) = h(g) / s when the Riemann input is rescaled consistently
        kappa = 0.5 * (a + b + c) / 3.0 + 0.1  # any nonzero-ish curvature
        g1 = IDENTITY
        g2 = SymTensor3(s * g1.components)
        h1 = cross_curvature(Riemann3.space_form(kappa, g1), g1).matrix
        h2 = cross_curvature(Riemann3.space_form(kappa / s, g2), g2).matrix
        scale = max(np.abs(h1).max(), 1e-300)
        assert np.abs(h2 - h1 / s).max() / scale < 1e-9

    @given(st.floats(0.05, 5), st.floats(0.05, 5), st.floats(0.05, 5))
    @settings(max_examples=150, deadline=None)
    def test_positive_frames_give_positive_definite_h(self, a, b, c):
        h = cross_curvature(Riemann3.from_frame(a, b, c), IDENTITY)
        assert h.is_positive_definite()


class TestEigenFrame:
    def test_diagonal_case(self):
        p = SymTensor3(np.array([1.0, 0, 0, 2.0, 3.0, 0]), "upper")
        frame, vecs = eigen_frame(p, IDENTITY)
        assert (frame.a, frame.b, frame.c) == (1.0, 2.0, 3.0)
        assert np.allclose(np.abs(vecs), np.eye(3))

    def test_scaled_sphere_eigenvalues(self):
        c = 4.0
        g = SymTensor3(c * IDENTITY.components)
        riem = Riemann3.space_form(1.0 / c, g)  # curvature of c * round metric
        p = einstein_raised(riem, g)
        frame, _ = eigen_frame(p, g)
        assert np.allclose(frame.as_array(), [1.0 / c] * 3, rtol=1e-12)

    def test_reconstruction_and_g_orthonormality(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            p = SymTensor3(spd(rng).components, "upper")
            g = spd(rng)
            frame, vecs = eigen_frame(p, g)
            rebuilt = (vecs * frame.as_array()) @ vecs.T
            assert np.abs(rebuilt - p.matrix).max() < 1e-10 * max(1, np.abs(p.matrix).max())
            assert np.abs(vecs.T @ g.matrix @ vecs - np.eye(3)).max() < 1e-12
            assert frame.a <= frame.b <= frame.c


class TestJetFromFunction:
    def test_constant_metric_exact_zero(self):
        g = np.diag([2.0, 1.0, 3.0])
        jet = jet_from_function(lambda x: g, np.zeros(3), step=1e-3)
        assert np.abs(jet.dg).max() == 0.0
        assert np.abs(jet.ddg).max() == 0.0

    def test_quadratic_metric_exact_derivatives(self):
        # central differences are exact on quadratics, up to rounding
        def g_fn(x):
            return np.eye(3) * (1.0 + 0.1 * x[0] + 0.05 * x[1] ** 2) + 0.02 * np.outer(x, x)

        jet = jet_from_function(g_fn, np.array([0.3, -0.2, 0.1]), step=1e-2)
        analytic = 0.1 * np.eye(3)
        analytic = analytic + 0.02 * (np.outer(np.eye(3)[0], [0.3, -0.2, 0.1])
                                      + np.outer([0.3, -0.2, 0.1], np.eye(3)[0]))
        assert np.abs(jet.dg_full[0] - analytic).max() < 1e-12

    def test_chart_jet_reproduces_curvature(self):
        rng = np.random.default_rng(23)
        x = rng.uniform(-0.5, 0.5, 3)
        jet = jet_from_function(space_form_chart(1.0), x, step=1e-3)
        _, scalar = ricci(riemann(jet), jet.g)
        assert abs(scalar - 6.0) < 1e-5

    def test_richardson_refinement_improves(self):
        x = np.array([0.4, -0.3, 0.2])
        plain = jet_from_function(space_form_chart(1.0), x, step=1e-3)
        refined = jet_from_function(space_form_chart(1.0), x, step=1e-3, richardson=True)
        _, s_plain = ricci(riemann(plain), plain.g)
        _, s_refined = ricci(riemann(refined), refined.g)
        assert abs(s_refined - 6.0) < abs(s_plain - 6.0) / 10.0

    def test_non_finite_samples_raise(self):
        def g_fn(x):
            with np.errstate(divide="ignore"):
                return np.eye(3) / x[0]  # singular across the stencil at x = 0

        with pytest.raises(DomainError):
            jet_from_function(g_fn, np.zeros(3), step=1e-3)

    def test_ddg_pair_symmetry_is_structural(self):
        jet = jet_from_function(space_form_chart(-1.0), np.array([0.1, 0.5, -0.4]))
        full = jet.ddg_full
        assert np.array_equal(full, full.transpose(1, 0, 2, 3))


@given(st.integers(0, 2), st.integers(0, 2), st.floats(0.2, 5.0))
@settings(max_examples=60, deadline=None)
def test_mu_raising_consistency(i, j, scale):
    g = SymTensor3(scale * IDENTITY.components)
    mu_lo, mu_up = volume_form(g)
    ginv = np.linalg.inv(g.matrix)
    raised = np.einsum("ip,jq,kr,pqr->ijk", ginv, ginv, ginv, mu_lo)
    assert np.abs(raised - mu_up).max() < 1e-12
