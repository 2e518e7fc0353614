"""Acceptance suite: one test per release criterion, printed pass/fail lines.

Each criterion is pinned to its stated tolerance; nothing here is calibrated
after the fact.  Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import json
import math
import time

import numpy as np
import pytest

from hermlab import verify as V
from hermlab.charts import flat_torus, fubini_study, iwasawa, nonbalanced_example, metric_jet
from hermlab.cli import main as cli_main
from hermlab.curvature import (
    chern_curvature,
    curvature_extrema,
    first_chern_ricci,
    hsc_sb,
    sb_curvature_direct,
    sb_curvature_from_chern,
    torsion_bilinear_from_jet,
)
from hermlab.hodge import balanced_residual
from hermlab.spectral import sphere_fs_spectrum, spectrum

SETTINGS = V.RunSettings(samples=120, fs_quad=(96, 192), torus_axis=32)
FD_A = V.RunSettings(samples=12, fd_step=2e-2, fs_quad=(24, 48), torus_axis=12)
FD_B = V.RunSettings(samples=12, fd_step=1e-2, fs_quad=(24, 48), torus_axis=12)


def report(criterion: str, passed: bool, detail: str = ""):
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}" + (f" ({detail})" if detail else ""))
    assert passed, f"{criterion}: {detail}"


def test_criterion_1_mesh_eigenvalue():
    fs = fubini_study(1)
    t0 = time.time()
    r5 = sphere_fs_spectrum(fs, 5)
    r6 = sphere_fs_spectrum(fs, 6)
    elapsed = time.time() - t0
    ok = (3.92 <= r5.lambda1 <= 4.08
          and abs(r6.lambda1 - 4.0) < abs(r5.lambda1 - 4.0)
          and elapsed < 60.0)
    report("criterion 1: FS mesh eigenvalue", ok,
           f"lvl5={r5.lambda1:.6f}, lvl6={r6.lambda1:.8f}, t={elapsed:.1f}s")


def test_criterion_2_lichnerowicz_equality():
    fs = fubini_study(1)
    pts = V.sample_points(fs, SETTINGS, count=24)
    ext = curvature_extrema(fs.metric, pts, directions=48, seed=0)
    n = 1
    K = ext.min_hol_ricci / (2 * n - 1)
    lam = spectrum(fs).lambda1
    margin = abs(lam - 2 * n * K)
    dres = abs(fs.diameter * math.sqrt(K) - math.pi)
    ok = margin <= 1e-6 and dres <= 1e-12
    report("criterion 2: Lichnerowicz equality case", ok,
           f"|lam - 2nK|={margin:.2e}, |D sqrtK - pi|={dres:.2e}")


def test_criterion_3_curvature_golden_values(rng):
    fs = fubini_study(1)
    worst_ric = 0.0
    worst_hsc = 0.0
    for _ in range(20):
        z = rng.standard_normal(1) * 0.8 + 1j * rng.standard_normal(1) * 0.8
        H = fs.metric.value(z)
        worst_ric = max(worst_ric, float(np.max(np.abs(
            first_chern_ricci(fs.metric, z) - 2.0 * H))))
        W = rng.standard_normal(1) + 1j * rng.standard_normal(1)
        worst_hsc = max(worst_hsc, abs(hsc_sb(fs.metric, z, W) - 2.0))
    worst_flat = 0.0
    for n in (1, 2):
        t = flat_torus(n)
        for _ in range(5):
            z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            jet = metric_jet(t.metric, z, order=2)
            r = sb_curvature_direct(t.metric, z)
            worst_flat = max(worst_flat,
                             float(np.max(np.abs(chern_curvature(t.metric, z)))),
                             float(np.max(np.abs(r))),
                             float(np.max(np.abs(torsion_bilinear_from_jet(jet)))))
    ok = worst_ric <= 1e-8 and worst_hsc <= 1e-8 and worst_flat <= 1e-10
    report("criterion 3: curvature golden values", ok,
           f"|ric-2h|={worst_ric:.1e}, |hsc-2|={worst_hsc:.1e}, flat={worst_flat:.1e}")


def test_criterion_4_route_equivalence(rng):
    iw = iwasawa()
    worst = 0.0
    for _ in range(50):
        z = rng.standard_normal(3) * 0.5 + 1j * rng.standard_normal(3) * 0.5
        d = sb_curvature_direct(iw.metric, z)
        r = sb_curvature_from_chern(iw.metric, z)
        worst = max(worst, float(np.max(np.abs(d - r))))
    rel = V.check_ricci_trace_relations(iw, SETTINGS, count=50)
    ok = worst <= 1e-6 and rel.value <= 1e-6
    report("criterion 4: SB curvature route equivalence", ok,
           f"route={worst:.1e}, trace relations={rel.value:.1e}")


def test_criterion_5_identity_residual_suite():
    fs = fubini_study(1)
    tor = flat_torus(1)
    checks = [
        ("laplacian halving", V.check_laplacian_identity),
        ("mixed hessian trace", V.check_mixed_hessian_trace),
        ("gradient bochner", V.check_gradient_bochner),
        ("log-gradient identities", V.check_log_gradient_identities),
        ("quartic integral identity", V.check_quartic_integral_identity),
        ("ricci combination", V.check_ricci_combination),
    ]
    worst = 0.0
    worst_name = ""
    shrink_ok = True
    for label, fn in checks:
        for entry in (fs, tor):
            val = fn(entry, SETTINGS).value
            if val > worst:
                worst, worst_name = val, f"{label}@{entry.name}"
            coarse = fn(entry, FD_A).value
            fine = fn(entry, FD_B).value
            if not (fine <= max(0.5 * coarse, 1e-12)):
                shrink_ok = False
                worst_name = f"no shrink: {label}@{entry.name}"
    ok = worst <= 1e-6 and shrink_ok
    report("criterion 5: identity residual suite", ok,
           f"max residual={worst:.2e} ({worst_name}), refinement ok={shrink_ok}")


def test_criterion_6_rigidity_quantities():
    fs = fubini_study(1)
    pts = V.sample_points(fs, SETTINGS, count=24)
    K = curvature_extrema(fs.metric, pts, directions=48, seed=0).min_hol_ricci
    rep = V.check_rigidity_quantities(fs, SETTINGS, K=K)
    ok = (rep.details["q_spread"] <= 1e-8
          and rep.details["q_level_residual"] <= 1e-8
          and rep.details["gradient_ratio_residual"] <= 1e-8)
    report("criterion 6: sharp-case proof quantities", ok,
           f"Q spread={rep.details['q_spread']:.1e}, "
           f"|Q-K/2|={rep.details['q_level_residual']:.1e}, "
           f"(grad ratio)={rep.details['gradient_ratio_residual']:.1e}")


def test_criterion_7_zhong_yang_machinery():
    fs = fubini_study(1)
    tor = flat_torus(1)
    psi0 = abs(V.zhongyang_psi(0.0))
    psi1 = abs(V.zhongyang_psi(math.pi / 2) - 1.0)
    ser = abs(V.zhongyang_series(0.0, 10) - math.pi)
    m_fs = V.check_level_set_gradient_bound(fs, SETTINGS)
    m_tor = V.check_level_set_gradient_bound(tor, SETTINGS)
    ok = (psi0 <= 1e-12 and psi1 <= 1e-12 and ser <= 1e-14
          and m_fs.value >= 0.0 and m_tor.value >= -1e-10)
    report("criterion 7: Zhong-Yang machinery", ok,
           f"psi residuals=({psi0:.1e},{psi1:.1e}), series={ser:.1e}, "
           f"margins=({m_fs.value:.3f},{m_tor.value:.1e})")


def test_criterion_8_bound_panel():
    tor = flat_torus(1)
    zy = [r for r in V.check_bounds(tor, SETTINGS) if r.name == "zhong-yang-bound"][0]
    tor_ok = abs(zy.value - 0.5) <= 1e-10

    fs = fubini_study(1)
    mesh = sphere_fs_spectrum(fs, 5)
    exact = spectrum(fs)
    reports = V.check_bounds(fs, SETTINGS, spectral_exact=exact, spectral_mesh=mesh)
    hsc_exact = [r for r in reports if r.name == "hsc-bound"
                 and r.details.get("lambda1_source") == "exact"][0]
    hsc_mesh = [r for r in reports if r.name == "hsc-bound"
                and r.details.get("lambda1_source") == "mesh"][0]
    fs_ok = abs(hsc_exact.value - 2.0) <= 1e-6 and abs(hsc_mesh.value - 2.0) <= 0.04

    bound, _, _ = V.li_yau_bound(3, 0.0, 1.0)
    liyau_ok = bound == V.li_yau_zero_ricci_closed_form(3, 1.0)
    ok = tor_ok and fs_ok and liyau_ok
    report("criterion 8: bound panel", ok,
           f"torus ZY margin={zy.value:.12f}, FS HSC margins=({hsc_exact.value:.8f}, "
           f"{hsc_mesh.value:.4f}), Li-Yau closed form exact={liyau_ok}")


def test_criterion_9_balanced_detection(rng):
    worst_balanced = 0.0
    for entry in (fubini_study(1), flat_torus(1), iwasawa()):
        pts = V.sample_points(entry, SETTINGS, count=25)
        worst_balanced = max(worst_balanced,
                             balanced_residual(entry.metric, pts)["residual"])
    nb = nonbalanced_example()
    pts = [np.array([1.0 + 0j, 0j])] + V.sample_points(nb, SETTINGS, count=20)
    control = balanced_residual(nb.metric, pts)["residual"]
    ok = worst_balanced <= 1e-5 and control >= 0.1
    report("criterion 9: balanced detection", ok,
           f"balanced max={worst_balanced:.1e}, control={control:.2f}")


def test_criterion_10_determinism(tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.json"
        code = cli_main(["check", "all", "--geometry", "flat-torus:1", "--grid", "25",
                         "--seed", "7", "--out", str(out), "--no-figures"])
        assert code == 0
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1]
    report("criterion 10: byte-identical reports", ok,
           f"{len(outs[0])} bytes compared")
