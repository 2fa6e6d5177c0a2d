import numpy as np
import pytest

from spingap import (
    BoundCertificate,
    InconclusiveBoundError,
    SiteInterval,
    ValidationError,
    VerificationFailure,
    aklt_model,
    alpha_beta,
    assemble,
    bound_certificate,
    epsilon,
    epsilon_sup,
    gamma_interval,
    gamma_table,
    ground_projector,
    k_operator,
    verify_certificate,
    verify_lemma_cs,
    verify_theorem_inequality,
    xxz_model,
)
from spingap import martingale
from spingap.closedform import xxz_epsilon_closed, xxz_epsilon_limit

XI_LN3_HALF = np.log(3.0) / 2.0  # e^{-2 xi} = 1/3


class TestGroundProjector:
    def test_aklt_two_site_degeneracy(self):
        gp = ground_projector(aklt_model(), SiteInterval(1, 2))
        assert gp.degeneracy == 4

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_xxz_multiplet_dimension(self, n):
        gp = ground_projector(xxz_model(1.0), SiteInterval(1, n))
        assert gp.degeneracy == n + 1

    def test_single_site_is_identity(self):
        gp = ground_projector(aklt_model(), SiteInterval(2, 2), SiteInterval(1, 2))
        np.testing.assert_allclose(gp.matrix(), np.eye(9), atol=0)
        assert gp.degeneracy == 9

    def test_basis_annihilated_and_idempotent(self):
        model = aklt_model()
        ambient = SiteInterval(1, 3)
        gp = ground_projector(model, SiteInterval(1, 2), ambient)
        assert gp.degeneracy == 4 * 3
        H = assemble(model, SiteInterval(1, 2), ambient).to_dense()
        assert np.abs(H @ gp.basis.vectors).max() < 1e-9
        P = gp.matrix()
        assert np.abs(P @ P - P).max() < 1e-10

    def test_nested_disjoint_projectors_commute(self):
        model = aklt_model()
        ambient = SiteInterval(1, 6)
        P1 = ground_projector(model, SiteInterval(1, 2), ambient).matrix()
        P2 = ground_projector(model, SiteInterval(4, 6), ambient).matrix()
        assert np.abs(P1 @ P2 - P2 @ P1).max() < 1e-10


class TestKOperator:
    def test_spectrum_bounded(self):
        op = k_operator(aklt_model(), 1, 1)
        w = np.linalg.eigvalsh(op.matrix)
        assert w[-1] <= 1 + 1e-10
        assert w[0] >= -1e-10

    def test_unit_multiplicities(self):
        # AKLT (1,1): four ground states; XXZ (1,1): dim V(m+3) = 4
        assert epsilon(aklt_model(), 1, 1).unit_multiplicity == 4
        assert epsilon(xxz_model(1.0), 1, 1).unit_multiplicity == 4

    def test_rejects_bad_orders(self):
        with pytest.raises(ValidationError):
            k_operator(aklt_model(), 0, 1)


class TestEpsilon:
    def test_aklt_values(self):
        assert epsilon(aklt_model(), 1, 1).epsilon == pytest.approx(0.25, abs=1e-12)
        assert epsilon(aklt_model(), 2, 2).epsilon == pytest.approx(9 / 49, abs=1e-12)

    def test_xxz_rational_point(self):
        # e^{-2 xi} = 1/3, m = 1: closed form gives exactly 3/16
        res = epsilon(xxz_model(XI_LN3_HALF), 1, 1)
        assert res.epsilon == pytest.approx(3 / 16, abs=1e-12)

    def test_independent_of_ambient_enlargement(self):
        model = aklt_model()
        base = epsilon(model, 1, 1)
        padded = epsilon(model, 1, 1, ambient=SiteInterval(-2, 2))
        assert padded.epsilon == pytest.approx(base.epsilon, abs=1e-10)
        assert padded.unit_multiplicity == base.unit_multiplicity * 9
        model = xxz_model(1.0)
        base = epsilon(model, 2, 1)
        padded = epsilon(model, 2, 1, ambient=SiteInterval(-3, 2))
        assert padded.epsilon == pytest.approx(base.epsilon, abs=1e-10)

    def test_xxz_nondecreasing_in_m(self):
        model = xxz_model(1.0)
        values = [epsilon(model, m, 1).epsilon for m in range(1, 6)]
        assert all(b >= a - 1e-13 for a, b in zip(values, values[1:]))

    def test_spectrum_descending_and_ground_dim(self):
        res = epsilon(aklt_model(), 2, 1)
        assert np.all(np.diff(res.spectrum) <= 1e-12)
        assert res.ground_dim == 4
        assert res.epsilon == pytest.approx(13 / 63, abs=1e-12)


class TestEpsilonSup:
    def test_xxz_limit(self):
        for xi in (0.25, 1.0, 4.0):
            for m in (1, 3):
                es = epsilon_sup(xxz_model(xi), m, 1)
                assert es.value == pytest.approx(xxz_epsilon_limit(xi), abs=1e-15)
                assert es.provenance == "closed_form"
                assert es.rigorous_tail

    def test_aklt_known_values(self):
        es = epsilon_sup(aklt_model(), 1, 1)
        assert es.value == pytest.approx(0.25, abs=1e-14)
        es = epsilon_sup(aklt_model(), 3, 3)
        assert es.value == pytest.approx(0.1225, abs=1e-14)
        assert es.rigorous_tail

    def test_aklt_sup_dominates_pointwise(self):
        from spingap.closedform import aklt_lambda

        es = epsilon_sup(aklt_model(), 2, 2)
        for mp in range(2, 12):
            assert es.value >= aklt_lambda(mp, 2).epsilon - 1e-15

    def test_computed_sup_provenance(self):
        # no registered closed form for XXZ with n = 2
        es = epsilon_sup(xxz_model(1.0), 1, 2, m_max=3)
        assert es.provenance == "computed_sup(m_max=3)"
        assert not es.rigorous_tail
        assert es.value < 0.5

    def test_running_sup_nonincreasing_in_m(self):
        model = aklt_model()
        sups = [epsilon_sup(model, m, 1).value for m in (1, 2, 3)]
        assert all(b <= a + 1e-15 for a, b in zip(sups, sups[1:]))


class TestGamma:
    def test_two_site_gaps_are_unit(self):
        assert gamma_interval(xxz_model(0.5), 2)[0] == pytest.approx(1.0, abs=1e-12)
        assert gamma_interval(aklt_model(), 2)[0] == pytest.approx(1.0, abs=1e-12)

    def test_table_invariants(self):
        table = gamma_table(aklt_model(), 5)
        vals = [table.gamma_of_n[n] for n in range(2, 6)]
        assert all(v > 0 for v in vals)
        assert table.gamma_N == min(vals)
        running = np.minimum.accumulate(vals)
        assert all(b <= a + 1e-15 for a, b in zip(running, running[1:]))

    def test_methods_agree(self):
        model = aklt_model()
        dense, _ = gamma_interval(model, 5, method="dense")
        sector_dense, _ = gamma_interval(model, 5, method="sector-dense")
        lanczos, prov = gamma_interval(model, 5, method="sector-lanczos")
        assert sector_dense == pytest.approx(dense, abs=1e-10)
        assert lanczos == pytest.approx(dense, abs=1e-8)
        assert "lanczos" in prov

    def test_declared_degeneracy_cross_check(self):
        model = aklt_model()
        wrong = type(model)(
            name="aklt-wrong", spin=model.spin, interaction=model.interaction,
            conserves_sz=True, ground_degeneracy=lambda L: 5, params={},
        )
        with pytest.raises(VerificationFailure):
            gamma_interval(wrong, 3)

    def test_n_below_two_rejected(self):
        with pytest.raises(ValidationError):
            gamma_interval(aklt_model(), 1)


class TestAlphaBeta:
    def test_endpoints_and_reference_value(self):
        assert alpha_beta(0.0) == (1.0, 1.0)
        a, b = alpha_beta(0.25)
        assert a == pytest.approx(1 - np.sqrt(3) / 2, abs=1e-15)
        assert b == pytest.approx((3 - np.sqrt(3)) / 4, abs=1e-15)

    def test_ordering_and_corollary_identity(self):
        for eps in np.linspace(0.0, 0.499, 40):
            a, b = alpha_beta(eps)
            assert 0 < a <= b <= 1
            assert a == pytest.approx(
                1 - 2 * np.sqrt(eps * (1 - eps)), abs=1e-14
            )

    def test_limit_toward_half(self):
        a, b = alpha_beta(0.49)
        assert a == pytest.approx(1 - 2 * np.sqrt(0.49 * 0.51), abs=1e-15)
        assert a < 0.05 and b < 0.15

    @pytest.mark.parametrize("eps", [-0.01, 0.5, 0.7])
    def test_domain(self, eps):
        with pytest.raises(ValidationError):
            alpha_beta(eps)


class TestBoundCertificate:
    def test_aklt_one_one(self):
        cert = bound_certificate(aklt_model(), 1, 1)
        assert cert.bound == pytest.approx(1 - np.sqrt(3) / 2, abs=1e-9)
        assert cert.epsilon_provenance == "closed_form"
        assert cert.bound <= cert.gamma

    @pytest.mark.parametrize("xi", [0.25, 0.5, 1.0, 2.0, 4.0])
    def test_xxz_closed_form_identity(self, xi):
        cert = bound_certificate(xxz_model(xi), 1, 1)
        assert abs(cert.bound - (1 - 1 / np.cosh(xi))) < 1e-12

    def test_bound_below_every_computed_gap(self):
        cert = bound_certificate(aklt_model(), 1, 1)
        table = gamma_table(aklt_model(), 8)
        assert all(cert.bound <= g for g in table.gamma_of_n.values())
        cert = bound_certificate(xxz_model(1.0), 1, 1)
        table = gamma_table(xxz_model(1.0), 12)
        assert all(cert.bound <= g for g in table.gamma_of_n.values())

    def test_inconclusive_epsilon_refused(self, monkeypatch):
        from spingap.martingale import EpsilonSup

        def fake_sup(model, m, n, m_max=8):
            return EpsilonSup(m=m, n=n, value=0.6,
                              provenance="computed_sup(m_max=8)",
                              rigorous_tail=False)

        monkeypatch.setattr(martingale, "epsilon_sup", fake_sup)
        with pytest.raises(InconclusiveBoundError):
            martingale.bound_certificate(aklt_model(), 1, 1)

    def test_json_round_trip_is_bit_exact(self):
        cert = bound_certificate(xxz_model(0.7), 1, 1)
        clone = BoundCertificate.from_json(cert.to_json())
        assert clone.bound == cert.bound
        assert clone.epsilon == cert.epsilon
        assert clone.alpha == cert.alpha
        assert clone.beta == cert.beta
        assert clone.gamma == cert.gamma
        assert clone.gamma_table == cert.gamma_table
        assert clone.to_json() == cert.to_json()

    def test_verify_certificate(self):
        cert = bound_certificate(aklt_model(), 1, 1)
        check = verify_certificate(cert)
        assert check.passed
        assert check.max_discrepancy <= 1e-12
        tampered = BoundCertificate.from_json(cert.to_json())
        tampered.bound *= 1 + 1e-6
        assert not verify_certificate(tampered).passed

    def test_alpha_beta_recomputable_from_epsilon(self):
        cert = bound_certificate(aklt_model(), 1, 1)
        a, b = alpha_beta(cert.epsilon)
        assert cert.alpha == a
        assert cert.beta == b


class TestTheoremInequality:
    def test_xxz_chain(self):
        rep = verify_theorem_inequality(xxz_model(1.0), 1, 1, 6)
        assert rep.passed
        assert rep.min_eigenvalue >= -1e-9

    def test_aklt_chain(self):
        rep = verify_theorem_inequality(aklt_model(), 1, 1, 4)
        assert rep.passed

    def test_degenerate_branch_small_N(self):
        # N <= n+1: the length-(N-n) projector degenerates to the identity
        # and the inequality reduces to H >= gamma beta (1 - G)
        rep = verify_theorem_inequality(xxz_model(0.8), 1, 1, 2)
        assert rep.passed
        H = assemble(xxz_model(0.8), SiteInterval(1, 2)).to_dense()
        w = np.linalg.eigvalsh(H)
        assert w[-1] >= rep.gamma * rep.beta - 1e-12


class TestLemmaSuite:
    def test_500_random_trials(self):
        rep = verify_lemma_cs(500, 16, seed=42)
        assert rep.passed
        assert rep.violations == []

    def test_gap_defining_case(self):
        # phi orthogonal to the kernel, psi = phi: part (a) reduces to the
        # defining property of the gap
        rng = np.random.default_rng(0)
        w = np.array([0.0, 0.0, 0.4, 1.0, 2.0])
        Z = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        U, _ = np.linalg.qr(Z)
        H = (U * w) @ U.conj().T
        G = U[:, :2] @ U[:, :2].conj().T
        phi = U[:, 2] + 0.3 * U[:, 4]
        lhs = np.real(np.vdot(phi, H @ phi))
        rhs = 0.4 * np.real(np.vdot(phi, phi - G @ phi))
        assert lhs >= rhs - 1e-12

    def test_zero_projector_case(self):
        # G = 0 makes both sides of part (b) vanish
        rng = np.random.default_rng(1)
        phi = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        psi = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        psi -= phi * (np.vdot(phi, psi) / np.vdot(phi, phi))
        G = np.zeros((6, 6))
        assert abs(np.vdot(psi, G @ phi)) == 0.0

    def test_dim_validation(self):
        with pytest.raises(ValidationError):
            verify_lemma_cs(10, 1)
