"""Form-level operators: Lambda-trace, balanced obstructions, scalar Laplacian,
torsion operators, and quadrature-based inner products on charts.

A (p, q)-form is stored as a full complex array with p holomorphic axes
followed by q antiholomorphic axes, antisymmetric within each block, under the
normalization

    f = (1/(p! q!)) f_{i1..ip kbar1..kbarq} dz^{i1}^..^dz^{ip}^dzbar^{k1}^..^dzbar^{kq}.

The trace operator is ``Lambda f = -i h^{a bbar} iota_bbar iota_a f`` so that
``Lambda omega = n`` and ``Lambda(i ddbar f) = h^{i jbar} d_i d_jbar f``
(the omega-trace of i ddbar f).

All adjoint-operator claims are verified in weak (integrated) form only; no
discrete codifferential is ever built.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import wirtinger as wt
from .charts import MetricField, MetricJet, as_z, metric_jet
from .connections import chern_from_jet, chern_torsion_from_jet
from .errors import IndexCompatibilityError
from .fields import ScalarField


# -- exterior algebra on full antisymmetric arrays -----------------------------


def _alt(arr: np.ndarray, axes) -> np.ndarray:
    """Antisymmetrize arr over the given axes (normalized by 1/k!)."""
    axes = list(axes)
    k = len(axes)
    if k <= 1:
        return arr
    out = np.zeros_like(arr)
    for perm in itertools.permutations(range(k)):
        sign = _perm_sign(perm)
        order = list(range(arr.ndim))
        for slot, src in zip(axes, perm):
            order[slot] = axes[src]
        out += sign * np.transpose(arr, order)
    return out / math.factorial(k)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


@dataclass
class FormField:
    """Bidegree-(p, q) form given by a coefficient function of the chart point."""

    bidegree: tuple
    coeff: Callable
    label: str = "form"

    @property
    def p(self) -> int:
        return self.bidegree[0]

    @property
    def q(self) -> int:
        return self.bidegree[1]

    def at(self, z) -> np.ndarray:
        val = self.coeff(as_z(z))
        return np.asarray(val, dtype=complex)


def wedge_arrays(a: np.ndarray, pa: int, qa: int, b: np.ndarray, pb: int, qb: int):
    """Coefficient array of (a wedge b) in the normalization above."""
    raw = np.tensordot(a, b, axes=0)
    nd_a = pa + qa
    # move b's holomorphic axes next to a's: target layout hol(a) hol(b) ah(a) ah(b)
    order = (
        list(range(pa))
        + [nd_a + t for t in range(pb)]
        + [pa + t for t in range(qa)]
        + [nd_a + pb + t for t in range(qb)]
    )
    raw = np.transpose(raw, order)
    raw = _alt(raw, list(range(pa + pb)))
    raw = _alt(raw, [pa + pb + t for t in range(qa + qb)])
    factor = (
        math.comb(pa + pb, pa)
        * math.comb(qa + qb, qa)
        * ((-1) ** (qa * pb))
    )
    return factor * raw


def wedge(a: FormField, b: FormField) -> FormField:
    pa, qa = a.bidegree
    pb, qb = b.bidegree

    def coeff(z):
        return wedge_arrays(a.at(z), pa, qa, b.at(z), pb, qb)

    return FormField((pa + pb, qa + qb), coeff, label=f"({a.label})^({b.label})")


def iota_hol(arr: np.ndarray, p: int, q: int, a: int) -> np.ndarray:
    """Interior product with d/dz^a (index fixing on the first hol axis)."""
    if p < 1:
        raise IndexCompatibilityError("no holomorphic index to contract")
    return arr[a, ...]


def iota_antihol(arr: np.ndarray, p: int, q: int, b: int) -> np.ndarray:
    """Interior product with d/dzbar^b (sign (-1)^p past the hol block)."""
    if q < 1:
        raise IndexCompatibilityError("no antiholomorphic index to contract")
    idx = (slice(None),) * p + (b,)
    return ((-1) ** p) * arr[idx]


def lambda_trace_array(arr: np.ndarray, p: int, q: int, G: np.ndarray):
    """Lambda f = -i h^{a bbar} iota_bbar iota_a f on a coefficient array."""
    if p < 1 or q < 1:
        raise IndexCompatibilityError("Lambda needs bidegree at least (1,1)")
    n = G.shape[0]
    out = np.zeros(arr.shape[1:p] + arr.shape[p + 1:], dtype=complex)
    sign = (-1) ** (p - 1)
    for a in range(n):
        for b in range(n):
            idx = (a,) + (slice(None),) * (p - 1) + (b,) + (slice(None),) * (q - 1)
            out += G[a, b] * sign * arr[idx]
    return -1j * out


def lambda_trace(m: MetricField, p, f: FormField):
    """Lambda-trace of f at p; scalar for (1,1) input, array otherwise."""
    z = as_z(p)
    G = m.inverse(z)
    out = lambda_trace_array(f.at(z), f.p, f.q, G)
    if out.ndim == 0:
        return complex(out)
    return out


def pointwise_inner(a_arr, b_arr, G: np.ndarray, p: int, q: int) -> complex:
    """<a, b> at a point: metric pairing of (p, q)-forms, conjugate-linear in b."""
    if p == 0 and q == 0:
        return complex(a_arr) * np.conj(complex(b_arr))
    letters = "abcdefghijklmnopqrstuvwx"
    ai, ak = letters[:p], letters[p: p + q]
    bj, bl = letters[p + q: 2 * p + q], letters[2 * p + q: 2 * (p + q)]
    subs = [ai + ak, bj + bl]
    ops = [a_arr, np.conj(b_arr)]
    for t in range(p):
        subs.append(ai[t] + bj[t])
        ops.append(G)
    for t in range(q):
        subs.append(bl[t] + ak[t])
        ops.append(G)
    val = np.einsum(",".join(subs) + "->", *ops)
    return complex(val) / (math.factorial(p) * math.factorial(q))


# -- quadrature ----------------------------------------------------------------


@dataclass
class Quadrature:
    """Nodes and real-coordinate measure weights (dx^1 dy^1 ... dx^n dy^n).

    The volume form det(h) 2^n is applied at evaluation time, so
    ``volume(m) = sum_i w_i det(h(z_i)) 2^n`` must reproduce the geometry's
    known volume within ``vol_tol``.
    """

    nodes: list
    weights: np.ndarray
    label: str
    vol_tol: float = 1e-6

    def volume(self, m: MetricField) -> float:
        n = m.n
        total = 0.0
        for z, w in zip(self.nodes, self.weights):
            total += w * float(np.real(np.linalg.det(m.value(z)))) * (2.0 ** n)
        return total


def torus_quadrature(n: int, period: float = 2.0 * math.pi, per_axis: int = 32) -> Quadrature:
    """Tensor-product rectangle rule; spectrally exact for periodic integrands."""
    ticks = np.arange(per_axis) * (period / per_axis)
    w0 = (period / per_axis) ** (2 * n)
    nodes = []
    for reals in itertools.product(ticks, repeat=2 * n):
        arr = np.array(reals[0::2]) + 1j * np.array(reals[1::2])
        nodes.append(arr)
    return Quadrature(nodes, np.full(len(nodes), w0), label=f"torus-{per_axis}^{2 * n}")


def fs_sphere_quadrature(n_theta: int = 128, n_phi: int = 256) -> Quadrature:
    """Gauss-Legendre (polar angle) x trapezoid (azimuth) under z = tan(theta/2) e^{i phi}.

    Weights are stated in the chart's dx dy measure; combined with the FS
    volume density det(h) * 2 they reproduce the round-sphere measure
    (1/2) sin(theta) dtheta dphi of the radius-1/sqrt(2) sphere.
    """
    x, wgl = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.5 * math.pi * (x + 1.0)
    wtheta = 0.5 * math.pi * wgl
    phis = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    wphi = 2.0 * math.pi / n_phi
    nodes = []
    weights = []
    for t, wt_ in zip(theta, wtheta):
        r = math.tan(0.5 * t)
        jac = r * 0.5 / math.cos(0.5 * t) ** 2  # dx dy = r dr dphi, dr = sec^2(t/2)/2 dtheta
        for ph in phis:
            nodes.append(np.array([r * complex(math.cos(ph), math.sin(ph))]))
            weights.append(wt_ * wphi * jac)
    return Quadrature(nodes, np.asarray(weights), label=f"fs-sphere-{n_theta}x{n_phi}")


def inner_product(q: Quadrature, m: MetricField, a, b) -> complex:
    """(a, b) = integral of <a, b> against the volume form omega^n/n!."""
    fa = as_form(a, m.n)
    fb = as_form(b, m.n)
    if fa.bidegree != fb.bidegree:
        raise IndexCompatibilityError(
            f"bidegree mismatch {fa.bidegree} vs {fb.bidegree} in inner product"
        )
    n = m.n
    total = 0.0 + 0.0j
    for z, w in zip(q.nodes, q.weights):
        H = m.value(z)
        G = np.conj(np.linalg.inv(H))
        dens = float(np.real(np.linalg.det(H))) * (2.0 ** n)
        total += w * dens * pointwise_inner(fa.at(z), fb.at(z), G, fa.p, fa.q)
    return total


def as_form(obj, n: int) -> FormField:
    if isinstance(obj, FormField):
        return obj
    if isinstance(obj, ScalarField):
        return FormField((0, 0), lambda z: np.asarray(obj.value(z), dtype=complex),
                         label=obj.label)
    if callable(obj):
        return FormField((0, 0), lambda z: np.asarray(obj(z), dtype=complex), label="scalar")
    raise IndexCompatibilityError(f"cannot interpret {type(obj)!r} as a form")


# -- metric-derived forms --------------------------------------------------------


def omega_form(m: MetricField) -> FormField:
    return FormField((1, 1), lambda z: 1j * m.value(z), label="omega")


def del_omega_form(m: MetricField) -> FormField:
    def coeff(z):
        d1 = m.d1(z)  # [k,i,j] = d_k h_{i jbar}
        # (del omega)[m, i, k] = i (d_m h_{i kbar} - d_i h_{m kbar})
        return 1j * (d1 - np.transpose(d1, (1, 0, 2)))

    return FormField((2, 1), coeff, label="del(omega)")


def delbar_omega_form(m: MetricField) -> FormField:
    def coeff(z):
        d1b = m.d1_antihol(z)  # [l,i,j] = d_lbar h_{i jbar}
        # (dbar omega)[i, l, k] = -i (d1b[l,i,k] - d1b[k,i,l])
        arr = -1j * (np.transpose(d1b, (1, 0, 2)) - np.transpose(d1b, (1, 2, 0)))
        return arr

    return FormField((1, 2), coeff, label="delbar(omega)")


def omega_power_form(m: MetricField, k: int) -> FormField:
    f = omega_form(m)
    out = f
    for _ in range(k - 1):
        out = wedge(out, f)
    if k == 0:
        return FormField((0, 0), lambda z: np.asarray(1.0 + 0j), label="1")
    return out


# -- field-derived forms ---------------------------------------------------------


def del_scalar_form(u: ScalarField) -> FormField:
    return FormField((1, 0), lambda z: u.grad(z), label=f"del({u.label})")


def delbar_scalar_form(u: ScalarField) -> FormField:
    return FormField((0, 1), lambda z: np.conj(u.grad(z)), label=f"delbar({u.label})")


def ddbar_scalar_form(u: ScalarField) -> FormField:
    """del delbar u as a (1,1)-form: coefficients d_i d_jbar u."""
    return FormField((1, 1), lambda z: u.hess_mix(z), label=f"ddbar({u.label})")


def grad_pair_form(u: ScalarField) -> FormField:
    """del u wedge delbar u, coefficients u_i conj(u_j)."""

    def coeff(z):
        g = u.grad(z)
        return np.einsum("i,j->ij", g, np.conj(g))

    return FormField((1, 1), coeff, label=f"del({u.label})^delbar({u.label})")


def chern_hess_pair_form(m: MetricField, u: ScalarField) -> FormField:
    """{Chern nabla^{1,0} del u, del u}: (1,0)-form h^{j kbar} c_{ij} u_kbar dz^i."""

    def coeff(z):
        jet = metric_jet(m, z, order=1)
        conn = chern_from_jet(jet)
        du = u.grad(z)
        c = u.hess_hol(z) - np.einsum("kij,k->ij", conn.gamma_hol, du)
        return np.einsum("jk,ij,k->i", jet.G, c, np.conj(du))

    return FormField((1, 0), coeff, label="{Cnabla10 du, du}")


def chern_mixed_pair_form(m: MetricField, u: ScalarField) -> FormField:
    """{Chern nabla^{0,1} del u, del u}: (0,1)-form h^{i kbar} (d_jbar d_i u) u_kbar dzbar^j."""

    def coeff(z):
        G = m.inverse(z)
        du = u.grad(z)
        s_chern = np.conj(u.hess_mix(z))  # [j, i] -> d_jbar d_i u
        return np.einsum("ik,ji,k->j", G, s_chern, np.conj(du))

    return FormField((0, 1), coeff, label="{Cnabla01 du, du}")


def torsion_pair_form(m: MetricField, u: ScalarField) -> FormField:
    """Chern-torsion pairing T(U, ., Ubar): (1,0)-form T_{i j lbar} U^i conj(U^l) dz^j."""

    def coeff(z):
        jet = metric_jet(m, z, order=1)
        T = chern_torsion_from_jet(jet)
        lowered = np.einsum("kl,kij->ijl", jet.H, T)
        U = np.einsum("ik,k->i", jet.G, np.conj(u.grad(z)))
        return np.einsum("ijl,i,l->j", lowered, U, np.conj(U))

    return FormField((1, 0), coeff, label="CT(U,.,Ubar)")


def scaled_form(f: FormField, scalar_fn: Callable) -> FormField:
    return FormField(f.bidegree, lambda z: scalar_fn(z) * f.at(z), label=f"g*({f.label})")


def form_sum(*forms) -> FormField:
    deg = forms[0].bidegree
    for f in forms:
        if f.bidegree != deg:
            raise IndexCompatibilityError("cannot add forms of different bidegree")
    return FormField(deg, lambda z: sum(f.at(z) for f in forms), label="sum")


# -- exterior derivatives by finite differences ----------------------------------


def del_form(f: FormField, rel_step: float = wt.DEFAULT_REL_STEP) -> FormField:
    p, q = f.bidegree

    def coeff(z):
        n = len(as_z(z))
        parts = np.stack([wt.d_hol(f.at, as_z(z), k, rel_step) for k in range(n)])
        out = (p + 1) * _alt(parts, list(range(p + 1)))
        return out

    return FormField((p + 1, q), coeff, label=f"del({f.label})")


def delbar_form(f: FormField, rel_step: float = wt.DEFAULT_REL_STEP) -> FormField:
    p, q = f.bidegree

    def coeff(z):
        n = len(as_z(z))
        parts = np.stack([wt.d_antihol(f.at, as_z(z), k, rel_step) for k in range(n)])
        # new antihol axis must sit first within the antihol block
        parts = np.moveaxis(parts, 0, p)
        out = ((-1) ** p) * (q + 1) * _alt(parts, [p + t for t in range(q + 1)])
        return out

    return FormField((p, q + 1), coeff, label=f"delbar({f.label})")


# -- balanced obstructions --------------------------------------------------------


def dbar_star_omega(m: MetricField, p) -> np.ndarray:
    """(1,0)-form components i h^{i jbar} (d_k h_{i jbar} - d_i h_{k jbar})."""
    z = as_z(p)
    G = m.inverse(z)
    d1 = m.d1(z)
    return 1j * (np.einsum("ij,kij->k", G, d1) - np.einsum("ij,ikj->k", G, d1))


def balanced_residual(m: MetricField, points, fd_step: float = wt.DEFAULT_REL_STEP) -> dict:
    """Both balanced obstructions over a point list.

    Returns {'trace': max |dbar* omega|, 'top_power': max coefficient of
    d(omega^{n-1}), 'residual': the larger}.  The two conditions are computed
    and reported separately rather than assuming their equivalence numerically.
    """
    pts = [as_z(p) for p in points]
    trace_res = max(float(np.max(np.abs(dbar_star_omega(m, z)))) for z in pts)
    n = m.n
    if n == 1:
        top_res = 0.0
    else:
        pw = omega_power_form(m, n - 1)
        dpw = del_form(pw, fd_step)
        dbpw = delbar_form(pw, fd_step)
        top_res = 0.0
        for z in pts:
            top_res = max(
                top_res,
                float(np.max(np.abs(dpw.at(z)))),
                float(np.max(np.abs(dbpw.at(z)))),
            )
    return {"trace": trace_res, "top_power": top_res, "residual": max(trace_res, top_res)}


# -- scalar operators --------------------------------------------------------------


def trace_ddbar(m: MetricField, u: ScalarField, p) -> float:
    """tr_omega(i ddbar u) = h^{i jbar} d_i d_jbar u (real for real u)."""
    z = as_z(p)
    G = m.inverse(z)
    return float(np.real(np.einsum("ij,ij->", G, u.hess_mix(z))))


def scalar_laplacian(m: MetricField, u: ScalarField, p) -> float:
    """Laplace-de Rham of u on a balanced metric: -2 tr_omega(i ddbar u)."""
    return -2.0 * trace_ddbar(m, u, p)


def grad_norm_sq(m: MetricField, u: ScalarField, p) -> float:
    """|del u|^2 = h^{i jbar} d_i u d_jbar u."""
    z = as_z(p)
    G = m.inverse(z)
    du = u.grad(z)
    return float(np.real(np.einsum("ij,i,j->", G, du, np.conj(du))))


def grad_norm_sq_jet(jet: MetricJet, du: np.ndarray) -> float:
    return float(np.real(np.einsum("ij,i,j->", jet.G, du, np.conj(du))))


def grad_of_grad_norm(jet: MetricJet, u: ScalarField) -> np.ndarray:
    """d_i |del u|^2 at the jet's point (holomorphic gradient)."""
    z = jet.z
    du = u.grad(z)
    dub = np.conj(du)
    hh = u.hess_hol(z)
    hm = u.hess_mix(z)
    t = np.einsum("iab,a,b->i", jet.dG, du, dub)
    t += np.einsum("ab,ia,b->i", jet.G, hh, dub)
    t += np.einsum("ab,a,ib->i", jet.G, du, hm)
    return t


def trace_ddbar_grad_norm(jet: MetricJet, u: ScalarField) -> float:
    """h^{i jbar} d_i d_jbar |del u|^2 at the jet's point."""
    z = jet.z
    du = u.grad(z)
    dub = np.conj(du)
    hh = u.hess_hol(z)
    hm = u.hess_mix(z)
    t3 = u.third_hhm(z)   # [i, j, k] = d_i d_j d_kbar u
    dju_a = np.conj(hm)       # [j, a] -> d_jbar d_a u
    dju_bbar = np.conj(hh)    # [j, b] -> d_jbar d_bbar u  (= conj d_j d_b u)
    mixed = np.empty((jet.n, jet.n), dtype=complex)
    dG, dGb, d2G, G = jet.dG, jet.dGb, jet.d2G, jet.G
    term = np.einsum("ijab,a,b->ij", d2G, du, dub)
    term += np.einsum("iab,ja,b->ij", dG, dju_a, dub)
    term += np.einsum("iab,a,jb->ij", dG, du, dju_bbar)
    term += np.einsum("jab,ia,b->ij", dGb, hh, dub)
    term += np.einsum("jab,a,ib->ij", dGb, du, hm)
    term += np.einsum("ab,iaj,b->ij", G, t3, dub)
    term += np.einsum("ab,ia,jb->ij", G, hh, dju_bbar)
    term += np.einsum("ab,ja,ib->ij", G, dju_a, hm)
    term += np.einsum("ab,a,jbi->ij", G, du, np.conj(t3))
    return float(np.real(np.einsum("ij,ij->", G, term)))


def lambda_del_delbar_omega(jet: MetricJet) -> np.ndarray:
    """(1,1)-form coefficients of Lambda(del delbar omega) from analytic d2."""
    d2 = jet.d2
    comb = (
        np.einsum("ab,abik->ik", jet.G, d2)
        - np.einsum("ab,akib->ik", jet.G, d2)
        - np.einsum("ab,ibak->ik", jet.G, d2)
        + np.einsum("ab,ikab->ik", jet.G, d2)
    )
    return comb


# -- torsion operator tau ------------------------------------------------------------


def tau_form(m: MetricField, f: FormField) -> FormField:
    """tau f = Lambda(del omega ^ f) - del omega ^ (Lambda f)."""
    dom = del_omega_form(m)

    def coeff(z):
        G = m.inverse(z)
        wf = wedge_arrays(dom.at(z), 2, 1, f.at(z), f.p, f.q)
        first = lambda_trace_array(wf, 2 + f.p, 1 + f.q, G)
        if f.p >= 1 and f.q >= 1:
            lf = lambda_trace_array(f.at(z), f.p, f.q, G)
            second = wedge_arrays(dom.at(z), 2, 1, lf, f.p - 1, f.q - 1)
            return first - second
        return first

    return FormField((f.p + 1, f.q), coeff, label=f"tau({f.label})")


def taubar_form(m: MetricField, f: FormField) -> FormField:
    """taubar f = Lambda(delbar omega ^ f) - delbar omega ^ (Lambda f)."""
    dbom = delbar_omega_form(m)

    def coeff(z):
        G = m.inverse(z)
        wf = wedge_arrays(dbom.at(z), 1, 2, f.at(z), f.p, f.q)
        first = lambda_trace_array(wf, 1 + f.p, 2 + f.q, G)
        if f.p >= 1 and f.q >= 1:
            lf = lambda_trace_array(f.at(z), f.p, f.q, G)
            second = wedge_arrays(dbom.at(z), 1, 2, lf, f.p - 1, f.q - 1)
            return first - second
        return first

    return FormField((f.p, f.q + 1), coeff, label=f"taubar({f.label})")


def tau_forms(m: MetricField, p, f: FormField) -> np.ndarray:
    """Coefficient array of (tau f) at the point p."""
    return tau_form(m, f).at(p)


# -- weak (integrated) checks ----------------------------------------------------


def weak_adjoint_check(q: Quadrature, m: MetricField, phi: FormField, F: ScalarField,
                       fd_step: float = wt.DEFAULT_REL_STEP) -> float:
    """Residual of (dbar* phi, F) = (phi, dbar F) with dbar* phi = -i Lambda(del phi).

    phi is a (0,1) test form; valid on balanced metrics where del* omega = 0.
    """
    dphi = del_form(phi, fd_step)

    def dbar_star_phi(z):
        G = m.inverse(z)
        return -1j * lambda_trace_array(dphi.at(z), 1, 1, G)

    lhs = inner_product(q, m, FormField((0, 0), dbar_star_phi, "dbar*phi"), F)
    rhs = inner_product(q, m, phi, delbar_scalar_form(F))
    return abs(lhs - rhs) / (1.0 + abs(rhs))


def weak_commutation_check(q: Quadrature, m: MetricField, u: ScalarField, phi: FormField,
                           fd_step: float = wt.DEFAULT_REL_STEP) -> float:
    """Weak residual of del* del delbar u = dbar del* del u against a (0,1) test form.

    Tested as (del delbar u, del phi) = (del* del u, dbar* phi), with
    dbar* phi = -i Lambda(del phi) and del* del u = -tr_omega(i ddbar u).
    """
    dphi = del_form(phi, fd_step)

    def dbar_star_phi(z):
        G = m.inverse(z)
        return -1j * lambda_trace_array(dphi.at(z), 1, 1, G)

    lhs = inner_product(q, m, ddbar_scalar_form(u), dphi)
    rhs = inner_product(
        q, m,
        FormField((0, 0), lambda z: np.asarray(-trace_ddbar(m, u, z), dtype=complex), "del*del u"),
        FormField((0, 0), dbar_star_phi, "dbar*phi"),
    )
    return abs(lhs - rhs) / (1.0 + abs(rhs))


def weak_torsion_adjoint_check(q: Quadrature, m: MetricField, u: ScalarField,
                               f: ScalarField, rho: FormField,
                               fd_step: float = wt.DEFAULT_REL_STEP) -> float:
    """Weak residual of the torsion-corrected adjoint identity on f del u ^ delbar u.

    Checks (f del u ^ delbar u, (taubar + dbar) rho) =
    (-f (Del_del u) del u + f {Cnabla^{1,0} del u, del u} + <del f, del u> del u, rho)
    for a (1,0) test form rho.  The conjugate identity (tau + del against (0,1)
    test forms) holds with identical residual for real u, f.
    """
    alpha = scaled_form(grad_pair_form(u), lambda z: f.value(z))
    op_rho = form_sum(taubar_form(m, rho), delbar_form(rho, fd_step))
    lhs = inner_product(q, m, alpha, op_rho)

    hesspair = chern_hess_pair_form(m, u)

    def rhs_coeff(z):
        du = u.grad(z)
        G = m.inverse(z)
        lap_del = -trace_ddbar(m, u, z)  # Del_del u = Del_dbar u on balanced metrics
        fv = f.value(z)
        pair = np.einsum("ij,i,j->", G, f.grad(z), np.conj(du))
        return -fv * lap_del * du + fv * hesspair.at(z) + pair * du

    rhs = inner_product(q, m, FormField((1, 0), rhs_coeff, "rhs"), rho)
    return abs(lhs - rhs) / (1.0 + abs(rhs))


def torsion_pairing_residual(m: MetricField, u: ScalarField, p) -> float:
    """Pointwise residual of the torsion-pairing identity behind the tau-adjoint.

    <del u ^ delbar u, -tau beta> = <i <del u, dbar* omega> delbar u
                                     + conj(CT(U,.,Ubar)), beta>
    with beta = {Cnabla^{0,1} del u, del u}; the dbar* omega term vanishes on
    balanced metrics but is kept for generality.
    """
    z = as_z(p)
    G = m.inverse(z)
    beta = chern_mixed_pair_form(m, u)
    tb = tau_form(m, beta)
    lhs = pointwise_inner(
        grad_pair_form(u).at(z), -tb.at(z), G, 1, 1
    )
    du = u.grad(z)
    dso = dbar_star_omega(m, z)
    scal = np.einsum("ij,i,j->", G, du, np.conj(1j * dso))
    rhs_arr = scal * np.conj(du) + np.conj(torsion_pair_form(m, u).at(z))
    rhs = pointwise_inner(rhs_arr, beta.at(z), G, 0, 1)
    return abs(lhs - rhs) / (1.0 + abs(rhs))
