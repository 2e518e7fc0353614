import math

import numpy as np
import pytest

from hermlab.charts import flat_torus
from hermlab.errors import HermlabError
from hermlab import verify as V

FAST = V.RunSettings(samples=40, fs_quad=(48, 96), torus_axis=24)
FD_COARSE = V.RunSettings(samples=10, fd_step=2e-2, fs_quad=(16, 32), torus_axis=12)
FD_FINE = V.RunSettings(samples=10, fd_step=1e-2, fs_quad=(16, 32), torus_axis=12)


# -- pointwise identities ----------------------------------------------------------


def test_laplacian_identity(fs1, torus1):
    rt = V.check_laplacian_identity(torus1, FAST)
    assert rt.passed and rt.value < 1e-10
    rf = V.check_laplacian_identity(fs1, FAST)
    assert rf.passed and rf.details["pointwise"] < 1e-8 and rf.details["weak"] < 1e-5


def test_mixed_hessian_trace(fs1, torus1, iwa):
    assert V.check_mixed_hessian_trace(torus1, FAST).value < 1e-10
    assert V.check_mixed_hessian_trace(fs1, FAST).value < 1e-8
    # Iwasawa: only the eigenfunction-independent trace identity, with u = Re z1
    rep = V.check_mixed_hessian_trace(iwa, FAST)
    assert rep.passed and rep.value < 1e-6
    assert "eigen_residual" not in rep.details


def test_gradient_bochner(fs1, torus1):
    assert V.check_gradient_bochner(torus1, FAST).value < 1e-8
    rep = V.check_gradient_bochner(fs1, FAST)
    assert rep.passed and rep.value < 1e-6


def test_rigidity_quantities(fs1):
    rep = V.check_rigidity_quantities(fs1, FAST, K=2.0)
    assert rep.passed
    assert rep.details["q_spread"] < 1e-8
    assert rep.details["q_level_residual"] < 1e-8
    assert rep.details["gradient_ratio_residual"] < 1e-8


def test_log_gradient_identities(fs1, torus1):
    rf = V.check_log_gradient_identities(fs1, FAST, a=2.0)
    assert rf.passed and rf.details["trace_residual"] < 1e-7
    assert rf.details["bochner_residual"] < 1e-6
    rt = V.check_log_gradient_identities(torus1, FAST, a=2.0)
    assert rt.value < 1e-8
    with pytest.raises(HermlabError):
        V.check_log_gradient_identities(fs1, FAST, a=1.0)


def test_arcsin_trace_identity(fs1, torus1):
    assert V.check_arcsin_trace_identity(fs1, FAST).value < 1e-7
    assert V.check_arcsin_trace_identity(torus1, FAST).value < 1e-10


def test_level_set_bound(fs1, torus1):
    rf = V.check_level_set_gradient_bound(fs1, FAST)
    assert rf.passed and rf.value == pytest.approx(1.0, abs=1e-8)
    assert rf.details["max_p"] == pytest.approx(1.0, abs=1e-8)
    rt = V.check_level_set_gradient_bound(torus1, FAST)
    assert rt.passed and rt.value >= -1e-10
    assert rt.details["max_p"] == pytest.approx(0.5, abs=1e-10)


# -- integral identities ----------------------------------------------------------------


def test_quartic_integral_identity(fs1, torus1):
    rt = V.check_quartic_integral_identity(torus1, FAST)
    assert rt.passed and rt.value < 1e-8
    # frozen Fourier oracle: lambda1 int |du|^4 = 3 pi^2/8 on the standard torus
    assert rt.details["lhs"] == pytest.approx(3.0 * math.pi ** 2 / 8.0, rel=1e-12)
    rf = V.check_quartic_integral_identity(fs1, FAST)
    assert rf.passed and rf.value < 1e-5
    # frozen radial-integral oracle: lambda1 int |du|^4 = 4 * 16 pi/15
    assert rf.details["lhs"] == pytest.approx(64.0 * math.pi / 15.0, rel=1e-6)
    assert rf.details["int_theta"] == pytest.approx(32.0 * math.pi / 15.0, rel=1e-6)


def test_quartic_integral_inequality(fs1, torus1):
    rt = V.check_quartic_integral_inequality(torus1, FAST)
    assert rt.passed and rt.value == pytest.approx(3.0 * math.pi ** 2 / 8.0, rel=1e-10)
    rf = V.check_quartic_integral_inequality(fs1, FAST)
    # margin = 2 int |du|^4 = 32 pi/15 (curvature term is exactly half the LHS)
    assert rf.passed and rf.value == pytest.approx(32.0 * math.pi / 15.0, rel=1e-6)


# -- curvature relations -------------------------------------------------------------------


def test_route_equivalence_suite(iwa):
    rep = V.check_ricci_route_equivalence(iwa, FAST, count=50)
    assert rep.passed and rep.value < 1e-6
    rel = V.check_ricci_trace_relations(iwa, FAST)
    assert rel.passed and rel.value < 1e-6
    sec = V.check_second_ricci_torsion_relation(iwa, FAST)
    assert sec.passed and sec.value < 1e-5
    comb = V.check_ricci_combination(iwa, FAST)
    assert comb.passed and comb.value < 1e-6
    bridge = V.check_hsc_bridge(iwa, FAST)
    assert bridge.passed and bridge.value < 1e-6


def test_balanced_detection(fs1, iwa, nonbal):
    assert V.check_balanced(fs1, FAST).value < 1e-5
    assert V.check_balanced(iwa, FAST).value < 1e-5
    rep = V.check_balanced(nonbal, FAST)
    assert rep.kind == "inequality-margin" and rep.passed and rep.value > 0.0


# -- Zhong-Yang machinery ---------------------------------------------------------------------


def test_psi_values():
    assert V.zhongyang_psi(0.0) == 0.0
    assert V.zhongyang_psi(math.pi / 2) == pytest.approx(1.0, abs=1e-12)
    assert V.zhongyang_psi(-math.pi / 2) == pytest.approx(-1.0, abs=1e-12)
    # continuity across the stable-evaluation switch
    for eps in (0.2999, 0.3001, 1e-3, 1e-6, 1e-9):
        t = math.pi / 2 - eps
        direct = ((4.0 / math.pi) * (t + math.cos(t) * math.sin(t)) - 2.0 * math.sin(t)) \
            / math.cos(t) ** 2
        if eps > 1e-4:
            assert V.zhongyang_psi(t) == pytest.approx(direct, rel=1e-8)
        assert abs(V.zhongyang_psi(t)) <= 1.0 + 1e-12


def test_psi_odd_and_bounded():
    ts = np.linspace(-math.pi / 2, math.pi / 2, 2001)
    vals = np.array([V.zhongyang_psi(t) for t in ts])
    assert np.max(np.abs(vals + vals[::-1])) < 1e-12
    assert np.max(np.abs(vals)) <= 1.0 + 1e-12


def test_series_values():
    assert V.zhongyang_series(0.0, 12) == pytest.approx(math.pi, abs=1e-14)
    # monotone nondecreasing in the number of terms for fixed b
    vals = [V.zhongyang_series(0.7, k) for k in range(1, 14)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    # b -> 0 limit
    assert V.zhongyang_series(1e-9, 8) == pytest.approx(math.pi, abs=1e-14)
    with pytest.raises(HermlabError):
        V.zhongyang_series(1.0)


def test_ck_positive_decreasing():
    cks = [V.zhongyang_ck(k) for k in range(1, 6)]
    assert all(c > 0 for c in cks)
    assert all(b < a for a, b in zip(cks, cks[1:]))


# -- bound evaluators ----------------------------------------------------------------------


def test_li_yau_bound_values():
    bound, a, alpha = V.li_yau_bound(3, 0.0, 1.0)
    assert alpha == pytest.approx(2.0)
    assert bound == pytest.approx(2.0 / (7.0 * math.e ** 2), rel=1e-14)
    assert bound == pytest.approx(V.li_yau_zero_ricci_closed_form(3, 1.0), rel=1e-14)
    assert a == pytest.approx(1.0 / (1.0 - math.e ** -2.0))
    # monotone decreasing in K
    ks = np.linspace(0.0, 2.0, 21)
    vals = [V.li_yau_bound(3, k, 1.0)[0] for k in ks]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(HermlabError):
        V.li_yau_bound(2, 0.0, 1.0)


def test_formula_evaluators_synthetic():
    # hand-computed arithmetic on synthetic inputs
    val = V.log_gradient_inequality_rhs(n=3, ric_vv=0.5, P=2.0, lam=4.0, a=2.0,
                                        u_val=0.0, re_pair_pv=0.25, grad_p_sq=1.0)
    c = 6.0
    expected = 0.5 + 4.0 / c + (4.0 / c - (7.0 / c) * 4.0) * 2.0 + 1.0 / 8.0 \
        + 1.0 * ((-1.0) * 2.0 + 2.0 - 2.0) * 0.25 / 2.0
    assert val == pytest.approx(expected, rel=1e-14)
    middle, right = V.gradient_peak_bound(n=3, K=1.0, a=2.0, lam=4.0, u_val=0.0)
    assert middle == pytest.approx(6.0 + 7.0 * 4.0 - 4.0)
    assert right == pytest.approx(7.0 * (1.0 + 8.0))
    assert middle <= right


def test_bound_panel_torus(torus1):
    reports = V.check_bounds(torus1, FAST)
    by_name = {}
    for rep in reports:
        by_name.setdefault(rep.name, []).append(rep)
    zy = by_name["zhong-yang-bound"][0]
    assert zy.passed and zy.value == pytest.approx(0.5, abs=1e-10)
    lich = by_name["lichnerowicz-bound"][0]
    assert lich.details.get("applicable") == 0.0
    hsc = by_name["hsc-bound"][0]
    assert hsc.details.get("applicable") == 0.0


def test_bound_panel_fs(fs1):
    from hermlab.spectral import sphere_fs_spectrum, spectrum

    mesh = sphere_fs_spectrum(fs1, 4)
    exact = spectrum(fs1)
    reports = V.check_bounds(fs1, FAST, spectral_exact=exact, spectral_mesh=mesh)
    for rep in reports:
        assert rep.passed
    lich = [r for r in reports if r.name == "lichnerowicz-bound"
            and r.details.get("lambda1_source") == "exact"][0]
    assert abs(lich.value) <= 1e-6
    assert lich.details["equality"] == 1.0
    assert lich.details["diameter_times_sqrtK"] == pytest.approx(math.pi, abs=1e-12)
    hsc = [r for r in reports if r.name == "hsc-bound"
           and r.details.get("lambda1_source") == "exact"][0]
    assert hsc.value == pytest.approx(2.0, abs=1e-6)
    hsc_mesh = [r for r in reports if r.name == "hsc-bound"
                and r.details.get("lambda1_source") == "mesh"][0]
    assert hsc_mesh.value == pytest.approx(2.0, rel=0.02)


def test_bound_panel_iwasawa_not_applicable(iwa):
    reports = V.check_bounds(iwa, FAST)
    assert all(rep.passed for rep in reports)
    assert all(rep.details.get("applicable") == 0.0 for rep in reports)


def test_bounds_nonnegative_margins_everywhere(fs1, torus1, iwa):
    for entry in (fs1, torus1, iwa):
        for rep in V.check_bounds(entry, FAST):
            if rep.details.get("applicable") == 0.0:
                continue
            assert rep.value >= -rep.tolerance


# -- refinement and covariance ------------------------------------------------------------


@pytest.mark.parametrize("checker", [
    V.check_laplacian_identity,
    V.check_mixed_hessian_trace,
    V.check_gradient_bochner,
    V.check_log_gradient_identities,
    V.check_arcsin_trace_identity,
    V.check_quartic_integral_identity,
])
def test_fd_refinement_halves_residuals(fs1, torus1, checker):
    for entry in (torus1, fs1):
        coarse = checker(entry, FD_COARSE).value
        fine = checker(entry, FD_FINE).value
        assert fine <= max(0.5 * coarse, 1e-12)


def test_fd_refinement_ricci_combination(iwa):
    coarse = V.check_ricci_combination(iwa, FD_COARSE, count=6).value
    fine = V.check_ricci_combination(iwa, FD_FINE, count=6).value
    assert fine <= max(0.5 * coarse, 1e-12)


def test_fd_regime_tolerance(fs1):
    rep = V.check_gradient_bochner(fs1, FD_FINE)
    assert rep.tolerance == pytest.approx(1e-3)
    assert rep.passed


def test_scale_covariance():
    # period 4 pi is isometric to scaling the 2 pi metric by c = 4:
    # lambda1 and curvature minima divide by c, D multiplies by sqrt(c),
    # bound margins scale by 1/c.
    base = flat_torus(1)
    scaled = flat_torus(1, period=4.0 * math.pi)
    c = 4.0
    assert scaled.exact_lambda1 == pytest.approx(base.exact_lambda1 / c)
    assert scaled.diameter == pytest.approx(base.diameter * math.sqrt(c))
    zy_base = [r for r in V.check_bounds(base, FAST) if r.name == "zhong-yang-bound"][0]
    zy_scaled = [r for r in V.check_bounds(scaled, FAST) if r.name == "zhong-yang-bound"][0]
    assert zy_scaled.value == pytest.approx(zy_base.value / c, rel=1e-10)


def test_suites_all_pass(fs1, torus1, iwa, nonbal):
    s = V.RunSettings(samples=25, fs_quad=(48, 96), torus_axis=16, subdivisions=4)
    for entry in (torus1, iwa, nonbal):
        for rep in V.run_suite(entry, s, which="all"):
            assert rep.passed, f"{entry.name} {rep.name} value={rep.value}"
    reports = V.run_suite(fs1, s, which="all")
    assert all(rep.passed for rep in reports)
    names = {rep.name for rep in reports}
    assert "sharp-eigenvalue-rigidity" in names
    assert "quartic-integral-identity" in names


def test_pointwise_profile(fs1):
    rows = V.pointwise_profile(fs1, FAST)
    assert len(rows) > 10
    for row in rows:
        assert row["q_composite"] == pytest.approx(1.0, abs=1e-9)
        assert row["bochner_residual"] < 1e-9
