import numpy as np
import pytest

from hermlab.charts import metric_jet
from hermlab.connections import (
    chern_connection,
    hessians,
    hessians_from_jet,
    hessian_norms,
    metric_compatibility_residual,
    sb_connection,
    sb_transpose_deviation,
    torsion,
)
from hermlab.fields import fs_ground_eigenfunction, real_part_field, torus_cosine

ORIGIN3 = np.array([0j, 0j, 0j])


def test_chern_flat_torus_zero(torus1):
    conn = chern_connection(torus1.metric, np.array([0.4 + 0.9j]))
    assert np.max(np.abs(conn.gamma_hol)) == 0.0
    assert np.max(np.abs(conn.gamma_mixed)) == 0.0


def test_chern_fs_value(fs1):
    # Gamma^1_11 = -2 zbar/(1+|z|^2) = -1 at z = 1
    conn = chern_connection(fs1.metric, np.array([1 + 0j]))
    assert conn.gamma_hol[0, 0, 0] == pytest.approx(-1.0)


def test_chern_iwasawa_origin(iwa):
    conn = chern_connection(iwa.metric, ORIGIN3)
    assert conn.gamma_hol[2, 0, 1] == pytest.approx(-1.0)
    assert conn.gamma_hol[2, 1, 0] == pytest.approx(0.0)


def test_sb_transpose_and_kahler_degeneracy(fs1, torus1, iwa, rng):
    for entry in (fs1, torus1, iwa):
        for _ in range(5):
            z = rng.standard_normal(entry.n) * 0.5 + 1j * rng.standard_normal(entry.n) * 0.5
            assert sb_transpose_deviation(entry.metric, z) < 1e-10
    for entry in (fs1, torus1):
        z = rng.standard_normal(entry.n) * 0.5 + 1j * rng.standard_normal(entry.n) * 0.5
        conn = sb_connection(entry.metric, z)
        assert np.max(np.abs(conn.gamma_mixed)) < 1e-8


def test_sb_iwasawa_origin_values(iwa):
    conn = sb_connection(iwa.metric, ORIGIN3)
    # transpose of the Chern coefficients
    assert conn.gamma_hol[2, 1, 0] == pytest.approx(-1.0)
    # mixed coefficients from the defining formula (nonzero despite the origin):
    # Gamma^2_{1bar 3} = d_1bar h_{3 2bar} = -1, Gamma^1_{2bar 3} = +1
    assert conn.gamma_mixed[1, 0, 2] == pytest.approx(-1.0)
    assert conn.gamma_mixed[0, 1, 2] == pytest.approx(1.0)


def test_torsion_values(fs1, iwa, rng):
    z = rng.standard_normal(1) * 0.5 + 1j * rng.standard_normal(1) * 0.5
    t_fs = torsion(chern_connection(fs1.metric, z), fs1.metric, z)
    assert np.max(np.abs(t_fs.t)) < 1e-10
    tc = torsion(chern_connection(iwa.metric, ORIGIN3), iwa.metric, ORIGIN3)
    ts = torsion(sb_connection(iwa.metric, ORIGIN3), iwa.metric, ORIGIN3)
    assert tc.t[2, 0, 1] == pytest.approx(-1.0)
    assert ts.t[2, 0, 1] == pytest.approx(1.0)
    # antisymmetry is exact by construction
    assert np.max(np.abs(tc.t + np.swapaxes(tc.t, 1, 2))) == 0.0
    # lowered form
    assert tc.lowered[0, 1, 2] == pytest.approx(-1.0)


def test_metric_compatibility(fs2, iwa, rng):
    for entry in (fs2, iwa):
        for _ in range(5):
            z = rng.standard_normal(entry.n) * 0.4 + 1j * rng.standard_normal(entry.n) * 0.4
            assert metric_compatibility_residual(entry.metric, z) < 1e-8


def test_sb_full_metric_compatibility(iwa, rng):
    # d_i h_{j lbar} = Gamma^s_{ij} h_{s lbar} + conj(Gamma^s_{ibar l}) h_{j sbar}
    m = iwa.metric
    for _ in range(5):
        z = rng.standard_normal(3) * 0.5 + 1j * rng.standard_normal(3) * 0.5
        jet = metric_jet(m, z, order=1)
        from hermlab.connections import sb_from_jet

        conn = sb_from_jet(jet)
        lhs = jet.d1  # [i, j, l]
        t1 = np.einsum("sij,sl->ijl", conn.gamma_hol, jet.H)
        t2 = np.einsum("sil,js->ijl", np.conj(conn.gamma_mixed), jet.H)
        assert np.max(np.abs(lhs - t1 - t2)) < 1e-12


def test_hessians_torus(torus1):
    u = torus_cosine(1)
    pair = hessians(torus1.metric, u, np.array([0j]))
    assert pair.s_mix[0, 0] == pytest.approx(-0.25)
    assert pair.t_hol[0, 0] == pytest.approx(-0.25)
    x = np.array([0.8 + 0.3j])
    pair2 = hessians(torus1.metric, u, x)
    assert pair2.s_mix[0, 0] == pytest.approx(-0.25 * np.cos(0.8))


def test_hessians_fs_trace(fs1):
    jet = metric_jet(fs1.metric, np.array([0j]), order=1)
    pair = hessians_from_jet(jet, fs_ground_eigenfunction())
    assert complex(np.einsum("ij,ij->", jet.G, pair.s_mix)) == pytest.approx(-2.0)


def test_hessians_constant_field(fs1):
    from hermlab.fields import ConstantField

    pair = hessians(fs1.metric, ConstantField(1, 3.0), np.array([0.3 + 0.4j]))
    assert np.max(np.abs(pair.t_hol)) == 0.0
    assert np.max(np.abs(pair.s_mix)) == 0.0


def test_hessian_s_conjugation_symmetry_kahler(fs1, torus2, rng):
    # s_{i jbar} = conj(s_{j ibar}) for real fields on Kahler metrics
    u1 = fs_ground_eigenfunction()
    u2 = real_part_field(2, 1)
    for entry, u in ((fs1, u1), (torus2, u2)):
        for _ in range(5):
            z = rng.standard_normal(entry.n) * 0.4 + 1j * rng.standard_normal(entry.n) * 0.4
            pair = hessians(entry.metric, u, z)
            assert np.max(np.abs(pair.s_mix - pair.s_mix.conj().T)) < 1e-10


def test_hessian_s_torsion_corrected_symmetry(iwa, rng):
    # With skew torsion the mixed Hessian is Hermitian only up to the torsion
    # contraction: s_{i jbar} - conj(s_{j ibar}) = Gamma^k_{jbar i} u_k
    #                                              - conj(Gamma^k_{ibar j}) u_kbar.
    u = real_part_field(3, 0)
    for _ in range(5):
        z = rng.standard_normal(3) * 0.4 + 1j * rng.standard_normal(3) * 0.4
        jet = metric_jet(iwa.metric, z, order=1)
        from hermlab.connections import sb_from_jet

        conn = sb_from_jet(jet)
        pair = hessians_from_jet(jet, u)
        du = u.grad(z)
        corr = (np.einsum("kji,k->ij", conn.gamma_mixed, du)
                - np.einsum("kij,k->ij", np.conj(conn.gamma_mixed), np.conj(du)))
        assert np.max(np.abs(pair.s_mix - pair.s_mix.conj().T - corr)) < 1e-10


def test_hessian_norms_match_torus_closed_form(torus1):
    u = torus_cosine(1)
    x = 0.5
    jet = metric_jet(torus1.metric, np.array([x + 0j]), order=1)
    n10, n01 = hessian_norms(jet, hessians_from_jet(jet, u))
    expected = 4.0 * (np.cos(x) / 4.0) ** 2
    assert n10 == pytest.approx(expected, rel=1e-12)
    assert n01 == pytest.approx(expected, rel=1e-12)
