from types import SimpleNamespace

import numpy as np
import pytest

from spingap import (
    SiteInterval,
    ValidationError,
    aklt_model,
    assemble,
    embed_two_site,
    check_frustration_free,
    sector_hamiltonian,
    spin_operators,
    sz_sectors,
    xxz_model,
)
from spingap.spinchain import total_sz_dense


def comm(A, B):
    return A @ B - B @ A


class TestSpinOperators:
    def test_spin_half(self):
        rep = spin_operators(0.5)
        np.testing.assert_allclose(np.diag(rep.S3), [0.5, -0.5])
        np.testing.assert_allclose(rep.Splus, [[0, 1], [0, 0]])

    def test_spin_one_ladder(self):
        rep = spin_operators(1.0)
        np.testing.assert_allclose(
            np.diag(rep.Splus, 1), [np.sqrt(2), np.sqrt(2)]
        )

    @pytest.mark.parametrize("s", [0.5, 1.0, 1.5, 2.0])
    def test_su2_algebra_and_casimir(self, s):
        rep = spin_operators(s)
        np.testing.assert_allclose(
            comm(rep.Splus, rep.Sminus), 2 * rep.S3, atol=1e-12
        )
        np.testing.assert_allclose(
            comm(rep.S3, rep.Splus), rep.Splus, atol=1e-12
        )
        np.testing.assert_allclose(
            comm(rep.S3, rep.Sminus), -rep.Sminus, atol=1e-12
        )
        casimir = (
            0.5 * (rep.Splus @ rep.Sminus + rep.Sminus @ rep.Splus)
            + rep.S3 @ rep.S3
        )
        np.testing.assert_allclose(
            casimir, s * (s + 1) * np.eye(rep.d), atol=1e-12
        )

    @pytest.mark.parametrize("s", [0.0, 0.3, -1.0])
    def test_rejects_bad_spin(self, s):
        with pytest.raises(ValidationError):
            spin_operators(s)


class TestEmbedTwoSite:
    def test_identity_embeds_to_identity(self):
        S = embed_two_site(np.eye(4), 1, SiteInterval(1, 3), d=2)
        np.testing.assert_allclose(S.to_dense(), np.eye(8), atol=0)

    def test_left_edge_of_two_sites_is_h_itself(self):
        h = np.diag([0.0, 1.0, 1.0, 0.0])
        S = embed_two_site(h, 1, SiteInterval(1, 2), d=2)
        np.testing.assert_allclose(S.to_dense(), h, atol=0)

    def test_matches_dense_kron_oracle(self):
        rng = np.random.default_rng(2)
        Z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = 0.5 * (Z + Z.conj().T)
        ambient = SiteInterval(0, 3)
        for bond, (nl, nr) in [(0, (1, 4)), (1, (2, 2)), (2, (4, 1))]:
            S = embed_two_site(h, bond, ambient, d=2)
            oracle = np.kron(np.kron(np.eye(nl), h), np.eye(nr))
            np.testing.assert_allclose(S.to_dense(), oracle, atol=1e-13)

    def test_translation_covariance_of_spectra(self):
        rng = np.random.default_rng(4)
        Z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = 0.5 * (Z + Z.conj().T)
        ambient = SiteInterval(1, 3)
        w1 = np.linalg.eigvalsh(embed_two_site(h, 1, ambient, d=2).to_dense())
        w2 = np.linalg.eigvalsh(embed_two_site(h, 2, ambient, d=2).to_dense())
        np.testing.assert_allclose(w1, w2, atol=1e-12)

    def test_bond_outside_ambient(self):
        with pytest.raises(ValidationError):
            embed_two_site(np.eye(4), 3, SiteInterval(1, 3), d=2)


class TestAssemble:
    def test_single_site_support_is_zero(self):
        H = assemble(xxz_model(1.0), SiteInterval(2, 2), SiteInterval(1, 3))
        assert H.matrix.nnz_stored == 0
        np.testing.assert_allclose(H.to_dense(), np.zeros((8, 8)), atol=0)

    def test_xxz_two_site_spectrum(self):
        H = assemble(xxz_model(0.7), SiteInterval(1, 2))
        w = np.linalg.eigvalsh(H.to_dense())
        np.testing.assert_allclose(w, [0, 0, 0, 1], atol=1e-12)

    def test_aklt_two_site_spectrum(self):
        H = assemble(aklt_model(), SiteInterval(1, 2))
        w = np.linalg.eigvalsh(H.to_dense())
        np.testing.assert_allclose(w, [0] * 4 + [1] * 5, atol=1e-12)

    def test_identity_outside_support(self):
        # H(2,3) embedded in [1,4] commutes with single-site operators
        # outside its support
        model = xxz_model(1.0)
        H = assemble(model, SiteInterval(2, 3), SiteInterval(1, 4)).to_dense()
        rep = spin_operators(0.5)
        for op in (rep.Splus, rep.S3):
            for pos in (0, 3):  # sites 1 and 4
                full = np.kron(
                    np.kron(np.eye(2 ** pos), op), np.eye(2 ** (3 - pos))
                )
                assert np.abs(comm(H, full)).max() < 1e-12

    def test_disjoint_supports_commute(self):
        model = aklt_model()
        ambient = SiteInterval(1, 5)
        A = assemble(model, SiteInterval(1, 2), ambient).to_dense()
        B = assemble(model, SiteInterval(4, 5), ambient).to_dense()
        assert np.abs(comm(A, B)).max() < 1e-12

    def test_spectrum_invariant_under_relabeling(self):
        model = xxz_model(0.5)
        w1 = np.linalg.eigvalsh(assemble(model, SiteInterval(1, 4)).to_dense())
        w2 = np.linalg.eigvalsh(assemble(model, SiteInterval(-6, -3)).to_dense())
        np.testing.assert_allclose(w1, w2, atol=1e-12)


class TestSectors:
    def test_spin_half_two_sites(self):
        secs = sz_sectors(xxz_model(1.0), SiteInterval(1, 2))
        assert [s.indices.size for s in secs] == [1, 2, 1]
        assert [s.value for s in secs] == [1.0, 0.0, -1.0]

    def test_spin_one_two_sites(self):
        secs = sz_sectors(aklt_model(), SiteInterval(1, 2))
        assert [s.indices.size for s in secs] == [1, 2, 3, 2, 1]

    def test_partition_of_large_chain(self):
        secs = sz_sectors(xxz_model(1.0), SiteInterval(1, 12))
        assert sum(s.indices.size for s in secs) == 4096
        all_idx = np.sort(np.concatenate([s.indices for s in secs]))
        np.testing.assert_array_equal(all_idx, np.arange(4096))

    def test_refuses_undeclared_symmetry(self):
        model = aklt_model()
        undeclared = SimpleNamespace(
            name="nosym", spin=model.spin, interaction=model.interaction,
            d_loc=model.d_loc, conserves_sz=False,
        )
        with pytest.raises(ValidationError):
            sz_sectors(undeclared, SiteInterval(1, 2))

    def test_catches_false_declaration(self):
        # a projector onto a state that mixes magnetization sectors
        v = np.zeros(4, dtype=complex)
        v[0] = v[1] = 1 / np.sqrt(2)  # (|uu> + |ud>)/sqrt(2)
        h = np.outer(v, v.conj())
        lying = SimpleNamespace(
            name="lying", spin=0.5, d_loc=2, conserves_sz=True,
            interaction=SimpleNamespace(matrix=h),
        )
        with pytest.raises(ValidationError):
            sz_sectors(lying, SiteInterval(1, 2))

    @pytest.mark.parametrize("model,L", [("xxz", 6), ("aklt", 4), ("aklt", 6)])
    def test_sector_blocks_reproduce_full_spectrum(self, model, L):
        model = xxz_model(1.3) if model == "xxz" else aklt_model()
        interval = SiteInterval(1, L)
        H = assemble(model, interval)
        full = np.linalg.eigvalsh(H.to_dense())
        pieces = []
        for sec in sz_sectors(model, interval):
            A = sector_hamiltonian(model, interval, sec)
            # block must equal the dense restriction
            dense_block = H.to_dense()[np.ix_(sec.indices, sec.indices)]
            np.testing.assert_allclose(A.to_dense(), dense_block, atol=1e-13)
            pieces.append(np.linalg.eigvalsh(A.to_dense()))
        combined = np.sort(np.concatenate(pieces))
        np.testing.assert_allclose(combined, full, atol=1e-10)

    def test_total_sz_commutes_for_builtins(self):
        for model in (xxz_model(0.8), aklt_model()):
            rep = spin_operators(model.spin)
            H = assemble(model, SiteInterval(1, 3)).to_dense()
            S3 = total_sz_dense(rep, 3)
            assert np.abs(comm(H, S3)).max() < 1e-10


class TestFrustrationFree:
    def test_xxz_degeneracies(self):
        report = check_frustration_free(xxz_model(1.0), 6)
        assert report.passed
        assert report.ground_degeneracy == {L: L + 1 for L in range(2, 7)}
        assert report.intersection_dim == report.ground_degeneracy

    def test_aklt_degeneracies(self):
        report = check_frustration_free(aklt_model(), 6)
        assert report.passed
        assert report.ground_degeneracy == {L: 4 for L in range(2, 7)}

    def test_negative_interaction_rejected(self):
        bad = SimpleNamespace(
            name="minus-identity", spin=0.5, d_loc=2, conserves_sz=False,
            interaction=SimpleNamespace(matrix=-np.eye(4)),
            ground_degeneracy=None,
        )
        report = check_frustration_free(bad, 3)
        assert not report.passed
        assert "not positive" in report.reason
