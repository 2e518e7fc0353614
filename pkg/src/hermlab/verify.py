"""Machine checks of the Hermitian-geometry identities and eigenvalue bounds.

Every check produces a CheckReport:

* kind "identity-residual": value is a (relative) residual, passes iff
  value <= tolerance;
* kind "inequality-margin": value is the margin LHS - RHS, passes iff
  value >= -tolerance;
* kind "series-value": value is the computed quantity, passes iff
  |value - details['expected']| <= tolerance.

Checks run in two derivative regimes: analytic (closed-form jets, default
tolerance 1e-6) and finite-difference (metric and field jets by 4th-order
stencils, default tolerance 1e-3).  Halving the FD step must shrink every
identity residual by at least a factor of two, which is asserted by the
refinement tests rather than hoping smallness alone proves correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import hodge
from .charts import GeometryCatalogueEntry, MetricField, halton_points, metric_jet
from .connections import hessians_from_jet, hessian_norms
from .curvature import (
    curvature_extrema,
    first_chern_ricci_from_jet,
    hsc_bridge_residual,
    sb_curvature_direct_from_jet,
    sb_curvature_from_chern_from_jet,
    sb_ricci_traces,
    torsion_bilinear_from_jet,
)
from .errors import HermlabError
from .fields import LogShift, ScalarField, TorusCosine, FSCoordinate, real_part_field
from .spectral import spectrum, sphere_fs_spectrum


# -- reports and settings --------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    geometry: str
    kind: str                      # identity-residual | inequality-margin | series-value
    value: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)
    sample_count: int = 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "geometry": self.geometry,
            "kind": self.kind,
            "value": self.value,
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "details": {k: self.details[k] for k in sorted(self.details)},
            "sample_count": self.sample_count,
        }


def _identity(name, geometry, value, tol, details=None, count=0) -> CheckReport:
    return CheckReport(name, geometry, "identity-residual", float(value), float(tol),
                       float(value) <= float(tol), details or {}, count)


def _margin(name, geometry, value, tol, details=None, count=0) -> CheckReport:
    return CheckReport(name, geometry, "inequality-margin", float(value), float(tol),
                       float(value) >= -float(tol), details or {}, count)


@dataclass(frozen=True)
class RunSettings:
    """Sampling, tolerance, and resolution knobs shared by all checks."""

    seed: int = 0
    samples: int = 200
    directions: int = 64
    tol_analytic: float = 1e-6
    tol_fd: float = 1e-3
    fd_step: Optional[float] = None       # None: analytic jets; float: FD regime
    fs_quad: tuple = (128, 256)
    torus_axis: int = 32
    subdivisions: int = 5
    tol_overrides: dict = field(default_factory=dict)

    @property
    def regime(self) -> str:
        return "analytic" if self.fd_step is None else "finite-difference"

    def tol(self, name: str, default: Optional[float] = None) -> float:
        if name in self.tol_overrides:
            return self.tol_overrides[name]
        if "" in self.tol_overrides:
            return self.tol_overrides[""]
        if default is not None:
            return default
        return self.tol_analytic if self.fd_step is None else self.tol_fd


def prepare(entry: GeometryCatalogueEntry, settings: RunSettings):
    """(metric, eigenfunction-or-None) in the requested derivative regime."""
    m = entry.metric
    u = entry.eigenfunction
    if settings.fd_step is not None:
        m = m.with_fd(settings.fd_step)
        if u is not None:
            u = u.with_fd(settings.fd_step)
    return m, u


def sample_points(entry: GeometryCatalogueEntry, settings: RunSettings, count=None,
                  avoid_field: Optional[ScalarField] = None, pole_margin: float = 1e-6):
    """Low-discrepancy chart points, away from box edges and |field| = 1 poles."""
    count = count or settings.samples
    box = entry.sample_box
    margin = 0.05 * (np.asarray(box.hi) - np.asarray(box.lo)).min()
    pts = halton_points(box, 3 * count, settings.seed, margin=margin)
    out = []
    for z in pts:
        if avoid_field is not None and avoid_field.value(z) ** 2 > 1.0 - pole_margin:
            continue
        out.append(z)
        if len(out) == count:
            break
    return out


def default_quadrature(entry: GeometryCatalogueEntry, settings: RunSettings) -> hodge.Quadrature:
    if entry.period is not None:
        return hodge.torus_quadrature(entry.n, entry.period, settings.torus_axis)
    if entry.name.startswith("fubini-study:1"):
        return hodge.fs_sphere_quadrature(*settings.fs_quad)
    raise HermlabError(f"no built-in quadrature for {entry.name}")


# -- batched node cache for integral checks ---------------------------------------


class NodeCache:
    """Per-node geometric data over a quadrature, stacked for vectorized integrals."""

    def __init__(self, m: MetricField, q: hodge.Quadrature):
        self.q = q
        n = m.n
        N = len(q.nodes)
        self.H = np.empty((N, n, n), dtype=complex)
        self.G = np.empty((N, n, n), dtype=complex)
        self.d1 = np.empty((N, n, n, n), dtype=complex)
        self.d2 = np.empty((N, n, n, n, n), dtype=complex)
        for t, z in enumerate(q.nodes):
            jet = metric_jet(m, z, order=2)
            self.H[t], self.G[t] = jet.H, jet.G
            self.d1[t], self.d2[t] = jet.d1, jet.d2
        self.d1b = np.conj(np.swapaxes(self.d1, 2, 3))
        self.dens = np.real(np.linalg.det(self.H)) * 2.0 ** n
        self.w = np.asarray(q.weights) * self.dens
        self._gamma_c = None
        self._theta = None

    @property
    def gamma_chern(self):
        if self._gamma_c is None:
            self._gamma_c = np.einsum("tkl,tijl->tkij", self.G, self.d1)
        return self._gamma_c

    @property
    def theta(self):
        if self._theta is None:
            term = np.einsum("tpq,tjpl,tikq->tijkl", self.G, self.d1b, self.d1)
            self._theta = -self.d2 + term
        return self._theta

    def integral(self, values: np.ndarray) -> float:
        return float(np.real(np.sum(self.w * values)))


class FieldCache:
    def __init__(self, u: ScalarField, q: hodge.Quadrature):
        N = len(q.nodes)
        n = u.n
        self.u = np.empty(N)
        self.du = np.empty((N, n), dtype=complex)
        self.hh = np.empty((N, n, n), dtype=complex)
        self.hm = np.empty((N, n, n), dtype=complex)
        for t, z in enumerate(q.nodes):
            self.u[t] = u.value(z)
            self.du[t] = u.grad(z)
            self.hh[t] = u.hess_hol(z)
            self.hm[t] = u.hess_mix(z)


# -- pointwise identity checks ------------------------------------------------------


def check_laplacian_identity(entry, settings: RunSettings, q=None) -> CheckReport:
    """Laplace-de Rham halving: Delta_d u = -2 tr_omega(i ddbar u), pointwise and weakly."""
    m, u = prepare(entry, settings)
    lam = entry.exact_lambda1
    pts = sample_points(entry, settings)
    pw = 0.0
    for z in pts:
        pw = max(pw, abs(lam * u.value(z) + 2.0 * hodge.trace_ddbar(m, u, z)))
    pw /= 1.0 + lam
    q = q or default_quadrature(entry, settings)
    weak = 0.0
    for F in _test_scalars(entry, settings, 5):
        lhs = hodge.inner_product(q, m, hodge.del_scalar_form(u), hodge.del_scalar_form(F))
        rhs = -hodge.inner_product(
            q, m,
            hodge.FormField((0, 0), lambda z: np.asarray(hodge.trace_ddbar(m, u, z), dtype=complex)),
            F,
        )
        weak = max(weak, abs(lhs - rhs) / (1.0 + abs(rhs)))
    tol = settings.tol("laplacian-trace-identity")
    return _identity("laplacian-trace-identity", entry.name, max(pw, weak), tol,
                     {"pointwise": pw, "weak": weak, "lambda1": lam}, len(pts))


def _test_scalars(entry, settings, count):
    rng = np.random.default_rng(settings.seed + 17)
    out = []
    if entry.period is not None:
        k0 = 2.0 * math.pi / entry.period
        for _ in range(count):
            kvec = k0 * rng.integers(-2, 3, size=entry.n)
            if not np.any(kvec):
                kvec[0] = k0
            out.append(TorusCosine(entry.n, kvec, phase=float(rng.uniform(0, 2 * math.pi))))
    else:
        basis = [FSCoordinate("x"), FSCoordinate("y"), entry.eigenfunction]
        for _ in range(count):
            w = rng.standard_normal(3)
            out.append(_LinearCombination(basis, w))
    return out


class _LinearCombination(ScalarField):
    analytic_order = 3

    def __init__(self, fields, weights):
        super().__init__(fields[0].n)
        self.fields = fields
        self.weights = np.asarray(weights, dtype=float)
        self.label = "combo"

    def value(self, z):
        return float(sum(w * f.value(z) for w, f in zip(self.weights, self.fields)))

    def grad(self, z):
        return sum(w * f.grad(z) for w, f in zip(self.weights, self.fields))

    def hess_hol(self, z):
        return sum(w * f.hess_hol(z) for w, f in zip(self.weights, self.fields))

    def hess_mix(self, z):
        return sum(w * f.hess_mix(z) for w, f in zip(self.weights, self.fields))

    def third_hhm(self, z):
        return sum(w * f.third_hhm(z) for w, f in zip(self.weights, self.fields))


def check_mixed_hessian_trace(entry, settings: RunSettings) -> CheckReport:
    """h^{i jbar} s_{i jbar} = tr_omega(i ddbar u), and = -(lambda1/2) u for eigenfunctions."""
    m, u = prepare(entry, settings)
    lam = entry.exact_lambda1
    if u is None:
        u = real_part_field(entry.n, 0)
        if settings.fd_step is not None:
            u = u.with_fd(settings.fd_step)
        lam = None
    pts = sample_points(entry, settings)
    res_trace = 0.0
    res_eigen = 0.0
    for z in pts:
        jet = metric_jet(m, z, order=1)
        pair = hessians_from_jet(jet, u)
        s_trace = complex(np.einsum("ij,ij->", jet.G, pair.s_mix))
        res_trace = max(res_trace, abs(s_trace - hodge.trace_ddbar(m, u, z)))
        if lam is not None:
            res_eigen = max(res_eigen, abs(s_trace + 0.5 * lam * u.value(z)) / (1.0 + 0.5 * lam))
    tol = settings.tol("mixed-hessian-trace")
    details = {"trace_residual": res_trace}
    if lam is not None:
        details["eigen_residual"] = res_eigen
        details["lambda1"] = lam
    return _identity("mixed-hessian-trace", entry.name, max(res_trace, res_eigen), tol,
                     details, len(pts))


def check_gradient_bochner(entry, settings: RunSettings) -> CheckReport:
    """Bochner identity for Delta_dbar |del u|^2 on balanced metrics."""
    m, u = prepare(entry, settings)
    lam = entry.exact_lambda1
    pts = sample_points(entry, settings)
    worst = 0.0
    for z in pts:
        jet = metric_jet(m, z, order=2)
        lhs = -hodge.trace_ddbar_grad_norm(jet, u)
        r = sb_curvature_direct_from_jet(jet)
        ric4 = sb_ricci_traces(r, jet.G)[3]
        du = u.grad(z)
        U = np.einsum("ik,k->i", jet.G, np.conj(du))
        ric_uu = float(np.real(np.einsum("ij,i,j->", ric4, U, np.conj(U))))
        gsq = hodge.grad_norm_sq_jet(jet, du)
        n10, n01 = hessian_norms(jet, hessians_from_jet(jet, u))
        rhs = -ric_uu + lam * gsq - n10 - n01
        scale = 1.0 + max(abs(lhs), abs(ric_uu), lam * gsq, n10, n01)
        worst = max(worst, abs(lhs - rhs) / scale)
    tol = settings.tol("gradient-bochner")
    return _identity("gradient-bochner", entry.name, worst, tol, {"lambda1": lam}, len(pts))


def check_rigidity_quantities(entry, settings: RunSettings, K: float) -> CheckReport:
    """Sharp-eigenvalue composite: Q = |del u|^2 + (lambda1/4n) u^2 constant and equal K/2,
    and |del u|/sqrt(1-u^2) = sqrt(K/2) away from the poles."""
    m, u = prepare(entry, settings)
    lam = entry.exact_lambda1
    n = entry.n
    pts = sample_points(entry, settings, avoid_field=entry.eigenfunction)
    qvals = []
    grad_ratio_res = 0.0
    for z in pts:
        gsq = hodge.grad_norm_sq(m, u, z)
        uval = u.value(z)
        qvals.append(gsq + lam / (4.0 * n) * uval ** 2)
        if uval ** 2 < 1.0 - 1e-6:
            grad_ratio_res = max(
                grad_ratio_res,
                abs(math.sqrt(max(gsq, 0.0)) / math.sqrt(1.0 - uval ** 2) - math.sqrt(K / 2.0)),
            )
    qvals = np.asarray(qvals)
    spread = float(qvals.max() - qvals.min())
    level_res = float(np.max(np.abs(qvals - K / 2.0)))
    value = max(spread, level_res, grad_ratio_res)
    tol = settings.tol("sharp-eigenvalue-rigidity", 1e-8 if settings.fd_step is None else None)
    return _identity("sharp-eigenvalue-rigidity", entry.name, value, tol,
                     {"q_spread": spread, "q_level_residual": level_res,
                      "gradient_ratio_residual": grad_ratio_res, "K": K, "lambda1": lam},
                     len(pts))


def check_log_gradient_identities(entry, settings: RunSettings, a: float = 2.0) -> CheckReport:
    """Trace and Bochner identities for v = log(a + u), P = |del v|^2."""
    if a <= 1.0:
        raise HermlabError("shift must satisfy a > 1")
    m, u = prepare(entry, settings)
    lam = entry.exact_lambda1
    v = LogShift(u, a)
    pts = sample_points(entry, settings)
    res_trace = 0.0
    res_bochner = 0.0
    for z in pts:
        jet = metric_jet(m, z, order=2)
        uval = u.value(z)
        dv = v.grad(z)
        P = hodge.grad_norm_sq_jet(jet, dv)
        tr_v = float(np.real(np.einsum("ij,ij->", jet.G, v.hess_mix(z))))
        rhs_trace = -P - 0.5 * lam + 0.5 * a * lam / (a + uval)
        res_trace = max(res_trace, abs(tr_v - rhs_trace) / (1.0 + abs(rhs_trace)))

        tr_P = hodge.trace_ddbar_grad_norm(jet, v)
        r = sb_curvature_direct_from_jet(jet)
        ric4 = sb_ricci_traces(r, jet.G)[3]
        V = np.einsum("ik,k->i", jet.G, np.conj(dv))
        ric_vv = float(np.real(np.einsum("ij,i,j->", ric4, V, np.conj(V))))
        dP = hodge.grad_of_grad_norm(jet, v)
        pair_Pv = complex(np.einsum("ij,i,j->", jet.G, dP, np.conj(dv)))
        n10, n01 = hessian_norms(jet, hessians_from_jet(jet, v))
        rhs = ric_vv - 2.0 * pair_Pv.real - a * lam * P / (a + uval) + n10 + n01
        scale = 1.0 + max(abs(tr_P), abs(ric_vv), abs(pair_Pv), n10 + n01)
        res_bochner = max(res_bochner, abs(tr_P - rhs) / scale)
    value = max(res_trace, res_bochner)
    tol = settings.tol("log-gradient-identities")
    return _identity("log-gradient-identities", entry.name, value, tol,
                     {"trace_residual": res_trace, "bochner_residual": res_bochner,
                      "a": a, "lambda1": lam}, len(pts))


# -- level-set (Zhong-Yang) checks ---------------------------------------------------


def check_arcsin_trace_identity(entry, settings: RunSettings, b: float = 0.0) -> CheckReport:
    """tr_omega(i ddbar theta) = -lambda1 (sin th + b)/(2 cos th) + tan th |del th|^2."""
    m, u = prepare(entry, settings)
    lam = entry.exact_lambda1
    pts = sample_points(entry, settings, avoid_field=entry.eigenfunction)
    worst = 0.0
    for z in pts:
        jet = metric_jet(m, z, order=1)
        y = u.value(z)
        if y ** 2 >= 1.0 - 1e-6:
            continue
        c2 = 1.0 - y ** 2
        c = math.sqrt(c2)
        dy = u.grad(z)
        hm = u.hess_mix(z)
        theta_mix = hm / c + y * np.einsum("i,j->ij", dy, np.conj(dy)) / c2 ** 1.5
        lhs = float(np.real(np.einsum("ij,ij->", jet.G, theta_mix)))
        dth_sq = hodge.grad_norm_sq_jet(jet, dy) / c2
        rhs = -0.5 * lam * (y + b) / c + (y / c) * dth_sq
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
    tol = settings.tol("arcsin-trace-identity")
    return _identity("arcsin-trace-identity", entry.name, worst, tol,
                     {"b": b, "lambda1": lam}, len(pts))


def check_level_set_gradient_bound(entry, settings: RunSettings, b: float = 0.0,
                                   extrema=None) -> CheckReport:
    """Margin (1+b) lambda1 / 2 - max p with p = |del y|^2/(1 - y^2)."""
    m, u = prepare(entry, settings)
    lam = entry.exact_lambda1
    pts = sample_points(entry, settings, avoid_field=entry.eigenfunction)
    max_p = -np.inf
    for z in pts:
        y = u.value(z)
        if y ** 2 >= 1.0 - 1e-6:
            continue
        p = hodge.grad_norm_sq(m, u, z) / (1.0 - y ** 2)
        max_p = max(max_p, p)
    margin = 0.5 * (1.0 + b) * lam - max_p
    details = {"max_p": max_p, "b": b, "lambda1": lam}
    applicable = True
    if extrema is not None:
        details["min_hol_ricci"] = extrema.min_hol_ricci
        applicable = extrema.min_hol_ricci >= -settings.tol("level-set-gradient-bound", 1e-8)
    tol = settings.tol("level-set-gradient-bound", 1e-10 if settings.fd_step is None else None)
    rep = _margin("level-set-gradient-bound", entry.name, margin, tol, details, len(pts))
    if not applicable:
        rep.details["applicable"] = 0.0
        rep.passed = True
    return rep


# -- Zhong-Yang test-function machinery ------------------------------------------------


def zhongyang_psi(theta: float) -> float:
    """The odd comparison function on [-pi/2, pi/2], with stable pole evaluation.

    psi(t) = ((4/pi)(t + cos t sin t) - 2 sin t) / cos^2 t on the open interval,
    extended by psi(+-pi/2) = +-1.
    """
    if not -math.pi / 2 <= theta <= math.pi / 2:
        raise HermlabError("psi is defined on [-pi/2, pi/2]")
    if theta < 0:
        return -zhongyang_psi(-theta)
    eps = 0.5 * math.pi - theta
    if eps == 0.0:
        return 1.0
    if eps > 0.3:
        return ((4.0 / math.pi) * (theta + math.cos(theta) * math.sin(theta))
                - 2.0 * math.sin(theta)) / math.cos(theta) ** 2
    # near the pole: psi = (4 sin^2(eps/2) - (2/pi)(2eps - sin 2eps)) / sin^2(eps)
    num = 4.0 * math.sin(0.5 * eps) ** 2 - (2.0 / math.pi) * _x_minus_sin(2.0 * eps)
    return num / math.sin(eps) ** 2


def _x_minus_sin(x: float) -> float:
    if abs(x) > 0.5:
        return x - math.sin(x)
    total = 0.0
    term = x ** 3 / 6.0
    k = 1
    while abs(term) > 1e-22 * max(abs(total), 1e-30):
        total += term
        term *= -x * x / ((2 * k + 2) * (2 * k + 3))
        k += 1
    return total


_CK_CACHE: dict = {}


def zhongyang_ck(k: int) -> float:
    """C_k = (2/pi) int_0^{pi/2} psi^{2k}, by adaptive quadrature (cached)."""
    if k not in _CK_CACHE:
        from scipy.integrate import quad

        val, _ = quad(lambda t: zhongyang_psi(t) ** (2 * k), 0.0, 0.5 * math.pi,
                      limit=200, epsabs=1e-14, epsrel=1e-13)
        _CK_CACHE[k] = 2.0 * val / math.pi
    return _CK_CACHE[k]


def zhongyang_series(b: float, terms: int = 12) -> float:
    """pi (1 + sum_k [(1*3*...*(4k-1))/(2*4*...*(4k))] C_k b^{2k})."""
    if not 0.0 <= b < 1.0:
        raise HermlabError("b must lie in [0, 1)")
    total = 1.0
    coeff = 1.0
    for k in range(1, terms + 1):
        for m in (4 * k - 3, 4 * k - 1):
            coeff *= m / (m + 1.0)
        total += coeff * zhongyang_ck(k) * b ** (2 * k)
    return math.pi * total


# -- integral identity checks ------------------------------------------------------------


def _integral_context(entry, settings: RunSettings, q=None):
    m, u = prepare(entry, settings)
    q = q or default_quadrature(entry, settings)
    nodes = NodeCache(m, q)
    fc = FieldCache(u, q)
    return m, u, q, nodes, fc


def check_quartic_integral_identity(entry, settings: RunSettings, q=None) -> CheckReport:
    """The quartic gradient integral identity on compact balanced geometries.

    lambda1 int |du|^4 = int Theta(U,Ub,U,Ub) + int |du|^2 |ddbar u|^2
      + ||{Cnabla10 du, du} - (lambda1/2) u du||^2 + ||{Cnabla10 du, du}||^2
      - Re(CT(U,.,Ub), {Cnabla10 du, du}) + Re(conj CT, {Cnabla01 du, du}).
    """
    lam = entry.exact_lambda1
    m, u, q, nc, fc = _integral_context(entry, settings, q)
    G, H = nc.G, nc.H
    du, hm, hh, uval = fc.du, fc.hm, fc.hh, fc.u
    gsq = np.real(np.einsum("tij,ti,tj->t", G, du, np.conj(du)))
    lhs = lam * nc.integral(gsq ** 2)

    U = np.einsum("tik,tk->ti", G, np.conj(du))
    th4 = np.real(np.einsum("tijkl,ti,tj,tk,tl->t", nc.theta, U, np.conj(U), U, np.conj(U)))
    int_theta = nc.integral(th4)

    ddbar_sq = np.real(np.einsum("tik,tjl,tij,tlk->t", hm, np.conj(hm), G, G))
    int_mixed = nc.integral(gsq * ddbar_sq)

    gam = nc.gamma_chern
    chess = hh - np.einsum("tkij,tk->tij", gam, du)
    hp = np.einsum("tjk,tij,tk->ti", G, chess, np.conj(du))
    shifted = hp - 0.5 * lam * uval[:, None] * du
    norm_shifted = nc.integral(np.real(np.einsum("tij,ti,tj->t", G, shifted, np.conj(shifted))))
    norm_hp = nc.integral(np.real(np.einsum("tij,ti,tj->t", G, hp, np.conj(hp))))

    mp = np.einsum("tik,tji,tk->tj", G, np.conj(hm), np.conj(du))
    T = gam - np.swapaxes(gam, 2, 3)
    lowT = np.einsum("tkl,tkij->tijl", H, T)
    tp = np.einsum("tijl,ti,tl->tj", lowT, U, np.conj(U))
    re_t_hp = nc.integral(np.real(np.einsum("tij,ti,tj->t", G, tp, np.conj(hp))))
    re_tb_mp = nc.integral(np.real(np.einsum("tk,tl,tlk->t", np.conj(tp), np.conj(mp), G)))

    rhs = int_theta + int_mixed + norm_shifted + norm_hp - re_t_hp + re_tb_mp
    residual = abs(lhs - rhs) / abs(lhs)
    tol = settings.tol("quartic-integral-identity")
    return _identity("quartic-integral-identity", entry.name, residual, tol,
                     {"lhs": lhs, "rhs": rhs, "int_theta": int_theta,
                      "int_mixed_hessian": int_mixed, "lambda1": lam},
                     len(q.nodes))


def check_quartic_integral_inequality(entry, settings: RunSettings, q=None) -> CheckReport:
    """Margin of lambda1 int |du|^4 >= int R(U,Ub,U,Ub) + (1/2) ||CT(U,.,Ub)||^2."""
    lam = entry.exact_lambda1
    m, u, q, nc, fc = _integral_context(entry, settings, q)
    G, H = nc.G, nc.H
    du = fc.du
    gsq = np.real(np.einsum("tij,ti,tj->t", G, du, np.conj(du)))
    lhs = lam * nc.integral(gsq ** 2)
    U = np.einsum("tik,tk->ti", G, np.conj(du))
    gam = nc.gamma_chern
    T = gam - np.swapaxes(gam, 2, 3)
    lowT = np.einsum("tkl,tkij->tijl", H, T)
    tp = np.einsum("tijl,ti,tl->tj", lowT, U, np.conj(U))
    norm_tp = nc.integral(np.real(np.einsum("tij,ti,tj->t", G, tp, np.conj(tp))))
    # R^{SB,C}(U,Ub,U,Ub) = Theta(U,Ub,U,Ub) - |CT(U,.,Ub)|^2 pointwise (balanced relation)
    th4 = np.real(np.einsum("tijkl,ti,tj,tk,tl->t", nc.theta, U, np.conj(U), U, np.conj(U)))
    tpsq = np.real(np.einsum("tij,ti,tj->t", G, tp, np.conj(tp)))
    int_r = nc.integral(th4 - tpsq)
    margin = lhs - int_r - 0.5 * norm_tp
    tol = settings.tol("quartic-integral-inequality", 1e-10 if settings.fd_step is None else None)
    return _margin("quartic-integral-inequality", entry.name, margin, tol,
                   {"lhs": lhs, "int_r": int_r, "half_torsion_norm": 0.5 * norm_tp,
                    "lambda1": lam}, len(q.nodes))


# -- curvature-relation checks -------------------------------------------------------------


def check_ricci_route_equivalence(entry, settings: RunSettings, count: int = 50) -> CheckReport:
    m, _ = prepare(entry, settings)
    pts = sample_points(entry, settings, count=count)
    worst = 0.0
    for z in pts:
        jet = metric_jet(m, z, order=2)
        d = sb_curvature_direct_from_jet(jet)
        r = sb_curvature_from_chern_from_jet(jet)
        scale = max(1.0, float(np.max(np.abs(d))))
        worst = max(worst, float(np.max(np.abs(d - r))) / scale)
    tol = settings.tol("sb-route-equivalence")
    return _identity("sb-route-equivalence", entry.name, worst, tol, {}, len(pts))


def check_ricci_trace_relations(entry, settings: RunSettings, count: int = 50) -> CheckReport:
    """Ric1 = first Chern Ricci and Ric3 = Ric4 on balanced metrics."""
    m, _ = prepare(entry, settings)
    pts = sample_points(entry, settings, count=count)
    r1_res = 0.0
    r34_res = 0.0
    for z in pts:
        jet = metric_jet(m, z, order=2)
        r = sb_curvature_direct_from_jet(jet)
        ric1, _, ric3, ric4 = sb_ricci_traces(r, jet.G)
        th1 = first_chern_ricci_from_jet(jet)
        scale = max(1.0, float(np.max(np.abs(th1))))
        r1_res = max(r1_res, float(np.max(np.abs(ric1 - th1))) / scale)
        r34_res = max(r34_res, float(np.max(np.abs(ric3 - ric4))) / scale)
    tol = settings.tol("ricci-trace-relations")
    return _identity("ricci-trace-relations", entry.name, max(r1_res, r34_res), tol,
                     {"ric1_vs_chern": r1_res, "ric3_vs_ric4": r34_res}, len(pts))


def check_second_ricci_torsion_relation(entry, settings: RunSettings, count: int = 50) -> CheckReport:
    """Ric2 = first Chern Ricci + Lambda(ddbar omega) - T o Tbar (components)."""
    m, _ = prepare(entry, settings)
    pts = sample_points(entry, settings, count=count)
    worst = 0.0
    for z in pts:
        jet = metric_jet(m, z, order=2)
        r = sb_curvature_direct_from_jet(jet)
        _, ric2, ric3, _ = sb_ricci_traces(r, jet.G)
        th1 = first_chern_ricci_from_jet(jet)
        lam_dd = hodge.lambda_del_delbar_omega(jet)
        tt = torsion_bilinear_from_jet(jet)
        scale = max(1.0, float(np.max(np.abs(th1))))
        worst = max(worst, float(np.max(np.abs(ric2 - (th1 + lam_dd - tt)))) / scale)
        worst = max(worst, float(np.max(np.abs(ric3 - (th1 - lam_dd)))) / scale)
    tol = settings.tol("second-ricci-torsion-relation", 1e-5 if settings.fd_step is None else None)
    return _identity("second-ricci-torsion-relation", entry.name, worst, tol, {}, len(pts))


def check_ricci_combination(entry, settings: RunSettings, count: int = 40) -> CheckReport:
    """Holomorphic Ricci vs the trace combination 2 Ric1 - Ric2 - T o Tbar."""
    m, _ = prepare(entry, settings)
    rng = np.random.default_rng(settings.seed + 5)
    pts = sample_points(entry, settings, count=count)
    worst = 0.0
    for z in pts:
        jet = metric_jet(m, z, order=2)
        r = sb_curvature_direct_from_jet(jet)
        ric1, ric2, _, ric4 = sb_ricci_traces(r, jet.G)
        tt = torsion_bilinear_from_jet(jet)
        W = rng.standard_normal(entry.n) + 1j * rng.standard_normal(entry.n)
        lhs = complex(np.einsum("ij,i,j->", ric4, W, np.conj(W)))
        rhs = complex(np.einsum("ij,i,j->", 2.0 * ric1 - ric2 - tt, W, np.conj(W)))
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    tol = settings.tol("ricci-combination-identity")
    return _identity("ricci-combination-identity", entry.name, worst, tol, {}, len(pts))


def check_hsc_bridge(entry, settings: RunSettings, count: int = 25) -> CheckReport:
    """Real-tensor HSC numerator vs 4 x complexified value, random points and directions."""
    m, _ = prepare(entry, settings)
    rng = np.random.default_rng(settings.seed + 9)
    pts = sample_points(entry, settings, count=count)
    worst = 0.0
    hsc_real = None
    for z in pts:
        U = rng.standard_normal(entry.n) + 1j * rng.standard_normal(entry.n)
        out = hsc_bridge_residual(m, z, U)
        worst = max(worst, out["residual"])
        hsc_real = out["hsc_real"]
    tol = settings.tol("hsc-complexification-bridge")
    return _identity("hsc-complexification-bridge", entry.name, worst, tol,
                     {"hsc_real_last": hsc_real}, len(pts))


def check_balanced(entry, settings: RunSettings, count: int = 30) -> CheckReport:
    """Balanced detection: both obstructions small (balanced) or large (control).

    Entries without a registered expectation (user metric files) get an
    informational report that always passes.
    """
    m, _ = prepare(entry, settings)
    pts = sample_points(entry, settings, count=count)
    res = hodge.balanced_residual(m, pts, fd_step=settings.fd_step or 1e-3)
    details = {"trace": res["trace"], "top_power": res["top_power"]}
    if entry.is_balanced_expected is None:
        details["balanced_residual"] = res["residual"]
        return _not_applicable("balanced-detection", entry.name,
                               "no balancedness expectation registered", details)
    details["expected_balanced"] = 1.0 if entry.is_balanced_expected else 0.0
    if entry.is_balanced_expected:
        tol = settings.tol("balanced-detection", 1e-5)
        return _identity("balanced-detection", entry.name, res["residual"], tol, details, len(pts))
    tol = settings.tol("balanced-detection", 1e-12)
    return _margin("balanced-detection", entry.name, res["residual"] - 0.1, tol, details, len(pts))


def check_weak_adjoint(entry, settings: RunSettings, q=None) -> CheckReport:
    """Weak trace-adjoint identity for (0,1) test forms (dbar* phi = -i Lambda del phi)."""
    m, u = prepare(entry, settings)
    q = q or default_quadrature(entry, settings)
    fields = _test_scalars(entry, settings, 3)
    worst = 0.0
    for F in fields[:2]:
        phi = hodge.delbar_scalar_form(fields[-1])
        worst = max(worst, hodge.weak_adjoint_check(q, m, phi, F,
                                                    fd_step=settings.fd_step or 1e-3))
    tol = settings.tol("weak-adjoint-trace",
                       1e-8 if entry.period is not None and settings.fd_step is None else 1e-4)
    return _identity("weak-adjoint-trace", entry.name, worst, tol, {}, len(q.nodes))


def check_weak_commutation(entry, settings: RunSettings, q=None) -> CheckReport:
    """Weak form of the adjoint-derivative commutation on balanced metrics."""
    m, u = prepare(entry, settings)
    q = q or default_quadrature(entry, settings)
    fields = _test_scalars(entry, settings, 2)
    worst = 0.0
    for F in fields:
        phi = hodge.delbar_scalar_form(F)
        worst = max(worst, hodge.weak_commutation_check(q, m, u, phi,
                                                        fd_step=settings.fd_step or 1e-3))
    tol = settings.tol("weak-derivative-commutation",
                       1e-8 if entry.period is not None and settings.fd_step is None else 1e-4)
    return _identity("weak-derivative-commutation", entry.name, worst, tol, {}, len(q.nodes))


# -- eigenvalue bound evaluators -----------------------------------------------------------


def li_yau_bound(n: int, K: float, D: float):
    """Exponential-decay lower bound for lambda1 in complex dimension n >= 3.

    Returns (bound, optimal shift a, exponent alpha); at K = 0 the bound
    coincides exactly with the closed form 2 / ((3n-2) e^2 D^2).
    """
    if n < 3:
        raise HermlabError("the diameter-decay bound needs n >= 3")
    if K < 0 or D <= 0:
        raise HermlabError("need K >= 0 and D > 0")
    alpha = 1.0 + math.sqrt(1.0 + 2.0 * (3 * n - 2) * K * D * D)
    bound = math.exp(-alpha) * (alpha ** 2 / (2.0 * (3 * n - 2) * D * D) - K)
    a = 1.0 / (1.0 - math.exp(-alpha))
    if K == 0.0:
        # alpha = 2 makes the general expression collapse to the closed form;
        # assert the coincidence and return the closed form verbatim
        closed = li_yau_zero_ricci_closed_form(n, D)
        if abs(bound - closed) > 1e-14 * closed:
            raise HermlabError("K = 0 closed form does not match the general expression")
        bound = closed
    return bound, a, alpha


def li_yau_zero_ricci_closed_form(n: int, D: float) -> float:
    if n < 3:
        raise HermlabError("the diameter-decay bound needs n >= 3")
    return 2.0 / ((3 * n - 2) * math.e ** 2 * D * D)


def log_gradient_inequality_rhs(n: int, ric_vv: float, P: float, lam: float,
                                a: float, u_val: float, re_pair_pv: float,
                                grad_p_sq: float) -> float:
    """RHS of the trace inequality for P = |del v|^2 (formula evaluator, n >= 3)."""
    if n < 3:
        raise HermlabError("formula stated for n >= 3")
    c = 3.0 * (n - 1.0)
    t = ric_vv + P * P / c
    t += (lam / c - (3.0 * n - 2.0) / c * a * lam / (a + u_val)) * P
    t += grad_p_sq / (4.0 * P)
    t += (2.0 / (n - 1.0)) * ((2.0 - n) * P + 0.5 * lam - 0.5 * a * lam / (a + u_val)) \
        * re_pair_pv / P
    return t


def gradient_peak_bound(n: int, K: float, a: float, lam: float, u_val: float):
    """(sharp bound, relaxed bound) for max P: the relaxed form drops the u-dependence."""
    middle = 3.0 * (n - 1.0) * K + (3.0 * n - 2.0) * a * lam / (a + u_val) - lam
    right = (3.0 * n - 2.0) * (K + a * lam / (a - 1.0))
    return middle, right


# -- bound panel ----------------------------------------------------------------------------


def _not_applicable(name, geometry, reason, details=None) -> CheckReport:
    d = dict(details or {})
    d["applicable"] = 0.0
    d["reason"] = reason
    return CheckReport(name, geometry, "inequality-margin", 0.0, 0.0, True, d, 0)


def check_bounds(entry, settings: RunSettings, extrema=None, spectral_exact=None,
                 spectral_mesh=None) -> list:
    """Panel of eigenvalue lower bounds with the best admissible constants.

    Hypothesis constants: the Lichnerowicz-type bound reads the minimum
    holomorphic Ricci as (2n-1) K over unit directions; the Zhong-Yang bound
    reads it as K directly (both against unit h-length directions, recorded in
    the details); the HSC bound takes K = min HSC.
    """
    reports = []
    name = entry.name
    n = entry.n
    if extrema is None:
        m, _ = prepare(entry, settings)
        pts = sample_points(entry, settings, count=24)
        extrema = curvature_extrema(m, pts, directions=settings.directions,
                                    seed=settings.seed)
    min_ric = extrema.min_hol_ricci
    min_hsc = extrema.min_hsc
    if not entry.has_spectrum:
        for nm in ("lichnerowicz-bound", "zhong-yang-bound", "hsc-bound", "li-yau-bound"):
            reports.append(_not_applicable(nm, name, "no spectrum registered",
                                           {"min_hol_ricci": min_ric, "min_hsc": min_hsc}))
        return reports
    if spectral_exact is None:
        spectral_exact = spectrum(entry, settings.subdivisions)
    lam_sources = [("exact", spectral_exact.lambda1)]
    if spectral_mesh is not None:
        lam_sources.append(("mesh", spectral_mesh.lambda1))
    D = entry.diameter

    for source, lam in lam_sources:
        tol = settings.tol("lichnerowicz-bound",
                           1e-6 if source == "exact" else 0.02 * lam)
        K1 = min_ric / (2.0 * n - 1.0)
        if K1 > 1e-10:
            margin = lam - 2.0 * n * K1
            det = {"lambda1": lam, "lambda1_source": source, "K": K1,
                   "min_hol_ricci": min_ric, "diameter": D}
            equal = abs(margin) <= 1e-6 if source == "exact" else False
            det["equality"] = 1.0 if equal else 0.0
            if equal:
                det["diameter_times_sqrtK"] = D * math.sqrt(K1)
                det["diameter_residual"] = abs(D * math.sqrt(K1) - math.pi)
            reports.append(_margin("lichnerowicz-bound", name, margin, tol, det))
        else:
            reports.append(_not_applicable("lichnerowicz-bound", name,
                                           "needs positive Ricci minimum",
                                           {"min_hol_ricci": min_ric,
                                            "lambda1_source": source}))

        if min_ric >= -1e-8:
            margin = lam - math.pi ** 2 / D ** 2
            reports.append(_margin(
                "zhong-yang-bound", name, margin,
                settings.tol("zhong-yang-bound", 1e-10 if source == "exact" else 0.02 * lam),
                {"lambda1": lam, "lambda1_source": source, "K": max(min_ric, 0.0),
                 "diameter": D, "bound": math.pi ** 2 / D ** 2,
                 "normalization": 1.0},  # unit h-length directions
            ))
        else:
            reports.append(_not_applicable("zhong-yang-bound", name,
                                           "needs nonnegative Ricci",
                                           {"min_hol_ricci": min_ric,
                                            "lambda1_source": source}))

        if min_hsc > 1e-10:
            margin = lam - min_hsc
            reports.append(_margin(
                "hsc-bound", name, margin,
                settings.tol("hsc-bound", 1e-6 if source == "exact" else 0.02 * lam),
                {"lambda1": lam, "lambda1_source": source, "K": min_hsc, "diameter": D},
            ))
        else:
            reports.append(_not_applicable("hsc-bound", name, "needs positive HSC minimum",
                                           {"min_hsc": min_hsc, "lambda1_source": source}))

    if n >= 3:
        bound, a_opt, alpha = li_yau_bound(n, max(-min_ric, 0.0), D)
        reports.append(_margin("li-yau-bound", name,
                               lam_sources[0][1] - bound,
                               settings.tol("li-yau-bound", 1e-10),
                               {"bound": bound, "a": a_opt, "alpha": alpha}))
    else:
        reports.append(_not_applicable("li-yau-bound", name,
                                       "formula-level only (needs n >= 3)",
                                       {"n": float(n)}))
    return reports


def pointwise_profile(entry, settings: RunSettings, points=None) -> list:
    """Per-sample-point scalars for plot export: |del u|^2, Q, p, Bochner residual."""
    if entry.eigenfunction is None or not entry.has_spectrum:
        raise HermlabError(f"{entry.name} has no eigenfunction for profile export")
    m, u = prepare(entry, settings)
    lam = entry.exact_lambda1
    n = entry.n
    pts = points or sample_points(entry, settings, avoid_field=entry.eigenfunction)
    rows = []
    for z in pts:
        jet = metric_jet(m, z, order=2)
        uval = u.value(z)
        du = u.grad(z)
        gsq = hodge.grad_norm_sq_jet(jet, du)
        lhs = -hodge.trace_ddbar_grad_norm(jet, u)
        r = sb_curvature_direct_from_jet(jet)
        ric4 = sb_ricci_traces(r, jet.G)[3]
        U = np.einsum("ik,k->i", jet.G, np.conj(du))
        ric_uu = float(np.real(np.einsum("ij,i,j->", ric4, U, np.conj(U))))
        n10, n01 = hessian_norms(jet, hessians_from_jet(jet, u))
        boch = abs(lhs - (-ric_uu + lam * gsq - n10 - n01)) / (1.0 + abs(lhs) + lam * gsq)
        row = {
            "radius": float(np.max(np.abs(z))),
            "grad_norm_sq": gsq,
            "q_composite": gsq + lam / (4.0 * n) * uval ** 2,
            "p_ratio": gsq / (1.0 - uval ** 2) if uval ** 2 < 1.0 - 1e-9 else float("nan"),
            "bochner_residual": boch,
            "u": uval,
        }
        for i, c in enumerate(z):
            row[f"re_z{i + 1}"] = float(c.real)
            row[f"im_z{i + 1}"] = float(c.imag)
        rows.append(row)
    return rows


# -- suites ---------------------------------------------------------------------------------


def identity_suite(entry, settings: RunSettings) -> list:
    """All identity checks applicable to a geometry."""
    reports = []
    reports.append(check_balanced(entry, settings))
    if entry.is_balanced_expected:
        reports.append(check_mixed_hessian_trace(entry, settings))
        reports.append(check_ricci_route_equivalence(entry, settings))
        reports.append(check_ricci_trace_relations(entry, settings))
        reports.append(check_second_ricci_torsion_relation(entry, settings))
        reports.append(check_ricci_combination(entry, settings))
        reports.append(check_hsc_bridge(entry, settings))
    if entry.eigenfunction is not None and entry.has_spectrum:
        q = default_quadrature(entry, settings)
        reports.append(check_laplacian_identity(entry, settings, q))
        reports.append(check_gradient_bochner(entry, settings))
        reports.append(check_log_gradient_identities(entry, settings))
        reports.append(check_arcsin_trace_identity(entry, settings))
        m, _ = prepare(entry, settings)
        pts = sample_points(entry, settings, count=24)
        ext = curvature_extrema(m, pts, directions=settings.directions, seed=settings.seed)
        reports.append(check_level_set_gradient_bound(entry, settings, extrema=ext))
        reports.append(check_quartic_integral_identity(entry, settings, q))
        reports.append(check_quartic_integral_inequality(entry, settings, q))
        reports.append(check_weak_adjoint(entry, settings, q))
        reports.append(check_weak_commutation(entry, settings, q))
        if entry.name.startswith("fubini-study:1"):
            K = ext.min_hol_ricci / (2.0 * entry.n - 1.0)
            reports.append(check_rigidity_quantities(entry, settings, K))
    return reports


def bound_suite(entry, settings: RunSettings, with_mesh: bool = True) -> list:
    mesh = None
    if with_mesh and entry.name.startswith("fubini-study:1"):
        mesh = sphere_fs_spectrum(entry, settings.subdivisions)
    exact = spectrum(entry, settings.subdivisions) if entry.has_spectrum else None
    return check_bounds(entry, settings, spectral_exact=exact, spectral_mesh=mesh)


def run_suite(entry, settings: RunSettings, which: str = "all") -> list:
    reports = []
    if which in ("identities", "all"):
        reports += identity_suite(entry, settings)
    if which in ("bounds", "all"):
        reports += bound_suite(entry, settings)
    return reports
