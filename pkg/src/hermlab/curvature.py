"""Chern and Strominger-Bismut curvature, Ricci traces, torsion bilinears, extrema.

Array conventions (all at a single chart point):

* ``theta[i, j, k, l] = Theta_{i jbar k lbar}`` (Chern curvature, all indices
  lowered with h).
* ``r_sb[i, j, k, l] = R^{SB,C}_{i jbar k lbar}`` with the same layout.
* Ricci traces of r_sb:
    ric1[i,j] = G[k,l] r[i,j,k,l]      ric2[i,j] = G[k,l] r[k,l,i,j]
    ric3[i,j] = G[k,l] r[i,l,k,j]      ric4[i,j] = G[k,l] r[k,j,i,l]
* ``t_circ_tbar[i, j]`` is the torsion bilinear pairing the Chern torsion with
  its conjugate through three metric contractions (a (1,1)-form coefficient,
  no leading i in the stored array).

The *direct* route differentiates the SB coefficients,

    R_{i jbar k}{}^p = -d_jbar Gamma^p_{ik} + d_i Gamma^p_{jbar k}
                       + Gamma^p_{is} Gamma^s_{jbar k} - Gamma^p_{jbar s} Gamma^s_{ik},

and is the normative definition; the balanced-metric relation expressing
R^{SB,C} through Theta and the Chern torsion is the derived identity the two
routes cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import MetricField, MetricJet, as_z, metric_jet
from .errors import HermlabError
from .tensors import ComplexTensor, assert_real, kinds

IMAG_TOL_ANALYTIC = 1e-8
IMAG_TOL_FD = 1e-5


def chern_curvature_from_jet(jet: MetricJet) -> np.ndarray:
    """Theta_{i jbar k lbar} = -d_i d_jbar h_{k lbar} + h^{p qbar} d_jbar h_{p lbar} d_i h_{k qbar}."""
    # d2[i, j, k, l] is exactly d_i d_jbar h_{k lbar} in this layout
    term = np.einsum("pq,jpl,ikq->ijkl", jet.G, jet.d1b, jet.d1)
    return -jet.d2 + term


def chern_curvature(m: MetricField, p) -> np.ndarray:
    return chern_curvature_from_jet(metric_jet(m, p, order=2))


def first_chern_ricci_from_jet(jet: MetricJet) -> np.ndarray:
    """Theta^(1)_{i jbar} = -d_i d_jbar log det h, via trace identities."""
    Hinv = np.linalg.inv(jet.H)
    t1 = np.einsum("ab,jbc,cd,ida->ij", Hinv, jet.d1b, Hinv, jet.d1)
    t2 = np.einsum("ab,ijba->ij", Hinv, jet.d2)
    return t1 - t2


def first_chern_ricci(m: MetricField, p) -> np.ndarray:
    return first_chern_ricci_from_jet(metric_jet(m, p, order=2))


def sb_coefficient_derivatives(jet: MetricJet):
    """(d_abar Gamma^p_{ik}, d_a Gamma^p_{bbar k}) for the SB connection."""
    G, d1, d1b, d2 = jet.G, jet.d1, jet.d1b, jet.d2
    # Gamma^p_{ik} = G[p,l] d1[k,i,l]; d_abar d1[k,i,l] = d2[k,a,i,l]
    dg_hol = np.einsum("apl,kil->apik", jet.dGb, d1) + np.einsum("pl,kail->apik", G, d2)
    # Gamma^p_{bbar k} = G[p,l](d1b[b,k,l] - d1b[l,k,b]);
    # d_a d1b[b,k,l] = d2[a,b,k,l] and d_a d1b[l,k,b] = d2[a,l,k,b]
    bracket = d1b - np.einsum("lkb->bkl", d1b)
    dbracket = d2 - np.einsum("alkb->abkl", d2)
    dg_mixed = np.einsum("apl,bkl->apbk", jet.dG, bracket) + np.einsum("pl,abkl->apbk", G, dbracket)
    return dg_hol, dg_mixed


def sb_curvature_direct_from_jet(jet: MetricJet) -> np.ndarray:
    """R^{SB,C}_{i jbar k lbar} from derivatives of the SB coefficients."""
    from .connections import sb_from_jet

    conn = sb_from_jet(jet)
    dg_hol, dg_mixed = sb_coefficient_derivatives(jet)
    # R_{i jbar k}^p
    r_up = (
        -np.einsum("jpik->ijkp", dg_hol)
        + np.einsum("ipjk->ijkp", dg_mixed)
        + np.einsum("pis,sjk->ijkp", conn.gamma_hol, conn.gamma_mixed)
        - np.einsum("pjs,sik->ijkp", conn.gamma_mixed, conn.gamma_hol)
    )
    return np.einsum("ijkp,pl->ijkl", r_up, jet.H)


def sb_curvature_direct(m: MetricField, p) -> np.ndarray:
    return sb_curvature_direct_from_jet(metric_jet(m, p, order=2))


def sb_curvature_from_chern_from_jet(jet: MetricJet) -> np.ndarray:
    """Balanced-metric route: R^{SB,C} from Theta and the Chern torsion."""
    from .connections import chern_torsion_from_jet

    theta = chern_curvature_from_jet(jet)
    T = chern_torsion_from_jet(jet)  # T^k_{ij}, [k, i, j]
    H, G = jet.H, jet.G
    r = (
        np.einsum("ilkj->ijkl", theta)
        + np.einsum("kjil->ijkl", theta)
        - theta
        + np.einsum("pq,pik,qjl->ijkl", H, T, np.conj(T))
        - np.einsum("pq,ml,ks,mip,sjq->ijkl", G, H, H, T, np.conj(T))
    )
    return r


def sb_curvature_from_chern(m: MetricField, p) -> np.ndarray:
    return sb_curvature_from_chern_from_jet(metric_jet(m, p, order=2))


def torsion_bilinear_from_jet(jet: MetricJet) -> np.ndarray:
    """(T o Tbar)[i, j]: three-contraction pairing of the Chern torsion with itself."""
    from .connections import chern_torsion_from_jet

    T = chern_torsion_from_jet(jet)
    return np.einsum("pq,st,kj,il,ksp,ltq->ij", jet.G, jet.G, jet.H, jet.H, T, np.conj(T))


def sb_ricci_traces(r: np.ndarray, G: np.ndarray):
    ric1 = np.einsum("kl,ijkl->ij", G, r)
    ric2 = np.einsum("kl,klij->ij", G, r)
    ric3 = np.einsum("kl,ilkj->ij", G, r)
    ric4 = np.einsum("kl,kjil->ij", G, r)
    return ric1, ric2, ric3, ric4


@dataclass(frozen=True)
class CurvatureBundle:
    """All curvature data of a metric at one point."""

    point: np.ndarray
    theta: ComplexTensor
    theta_ric1: ComplexTensor
    r_sb: ComplexTensor
    ric_sb: tuple  # four (n, n) ComplexTensors
    t_circ_tbar: ComplexTensor

    @property
    def ric4_matrix(self) -> np.ndarray:
        return self.ric_sb[3].data


def curvature_bundle(m: MetricField, p, route: str = "direct") -> CurvatureBundle:
    jet = metric_jet(m, p, order=2)
    theta = chern_curvature_from_jet(jet)
    ric1c = first_chern_ricci_from_jet(jet)
    if route == "direct":
        r = sb_curvature_direct_from_jet(jet)
    elif route == "relation":
        r = sb_curvature_from_chern_from_jet(jet)
    else:
        raise ValueError("route must be 'direct' or 'relation'")
    rics = sb_ricci_traces(r, jet.G)
    tt = torsion_bilinear_from_jet(jet)
    k4 = kinds("hl", "al", "hl", "al")
    k2 = kinds("hl", "al")
    return CurvatureBundle(
        point=as_z(p),
        theta=ComplexTensor(theta, k4),
        theta_ric1=ComplexTensor(ric1c, k2),
        r_sb=ComplexTensor(r, k4),
        ric_sb=tuple(ComplexTensor(x, k2) for x in rics),
        t_circ_tbar=ComplexTensor(tt, k2),
    )


def holomorphic_ricci(m: MetricField, p, W, imag_tol: float = IMAG_TOL_ANALYTIC) -> float:
    """Ric^{SB,C}(W, Wbar) = R^{SB(4)}_{i jbar} W^i conj(W^j) for a (1,0)-vector W."""
    W = np.asarray(W, dtype=complex)
    if float(np.max(np.abs(W))) == 0.0:
        raise HermlabError("direction vector must be nonzero")
    jet = metric_jet(m, p, order=2)
    r = sb_curvature_direct_from_jet(jet)
    ric4 = sb_ricci_traces(r, jet.G)[3]
    val = np.einsum("ij,i,j->", ric4, W, np.conj(W))
    return assert_real(val, imag_tol, "holomorphic Ricci")


def hsc_sb(m: MetricField, p, W, imag_tol: float = IMAG_TOL_ANALYTIC) -> float:
    """Holomorphic sectional curvature R^{SB,C}(W,Wbar,W,Wbar) / h(W,Wbar)^2."""
    W = np.asarray(W, dtype=complex)
    if float(np.max(np.abs(W))) == 0.0:
        raise HermlabError("direction vector must be nonzero")
    jet = metric_jet(m, p, order=2)
    r = sb_curvature_direct_from_jet(jet)
    num = np.einsum("ijkl,i,j,k,l->", r, W, np.conj(W), W, np.conj(W))
    den = np.einsum("ij,i,j->", jet.H, W, np.conj(W))
    return assert_real(num, imag_tol, "HSC numerator") / assert_real(den, imag_tol, "norm") ** 2


def ricci_combination_residual(m: MetricField, p, W) -> float:
    """|Ric^{SB,C}(W,Wbar) - (2 Ric1 - Ric2 - T o Tbar)(W,Wbar)| (balanced identity)."""
    jet = metric_jet(m, p, order=2)
    r = sb_curvature_direct_from_jet(jet)
    ric1, ric2, _, ric4 = sb_ricci_traces(r, jet.G)
    tt = torsion_bilinear_from_jet(jet)
    W = np.asarray(W, dtype=complex)
    lhs = np.einsum("ij,i,j->", ric4, W, np.conj(W))
    rhs = np.einsum("ij,i,j->", 2.0 * ric1 - ric2 - tt, W, np.conj(W))
    return float(abs(lhs - rhs))


def sb_curvature_two_zero_from_jet(jet: MetricJet, d2hol: np.ndarray) -> np.ndarray:
    """r20[i,j,k,l] = g(R(d_i, d_j) d_k, d_lbar): the (2,0) part of the SB curvature."""
    from .connections import sb_from_jet

    conn = sb_from_jet(jet)
    # d_a Gamma^p_{bk} = dG[a,p,l] d1[k,b,l] + G[p,l] d2hol[a,k,b,l]
    dg = np.einsum("apl,kbl->apbk", jet.dG, jet.d1) + np.einsum("pl,akbl->apbk", jet.G, d2hol)
    g = conn.gamma_hol
    r_up = (
        np.einsum("ipjk->ijkp", dg)
        - np.einsum("jpik->ijkp", dg)
        + np.einsum("pis,sjk->ijkp", g, g)
        - np.einsum("pjs,sik->ijkp", g, g)
    )
    return np.einsum("ijkp,pl->ijkl", r_up, jet.H)


def sb_curvature_zero_two_from_jet(jet: MetricJet, d2hol: np.ndarray) -> np.ndarray:
    """r02[i,j,k,l] = g(R(d_ibar, d_jbar) d_k, d_lbar): the (0,2) part."""
    from .connections import sb_from_jet

    conn = sb_from_jet(jet)
    gm = conn.gamma_mixed
    br = jet.d1b - np.einsum("tkb->bkt", jet.d1b)
    # d_abar d_bbar h_{k tbar} = conj(d_a d_b h_{t kbar})
    dbr = np.conj(np.einsum("abtk->abkt", d2hol)) - np.conj(np.einsum("atbk->abkt", d2hol))
    dg = np.einsum("apt,bkt->apbk", jet.dGb, br) + np.einsum("pt,abkt->apbk", jet.G, dbr)
    r_up = (
        np.einsum("ipjk->ijkp", dg)
        - np.einsum("jpik->ijkp", dg)
        + np.einsum("pis,sjk->ijkp", gm, gm)
        - np.einsum("pjs,sik->ijkp", gm, gm)
    )
    return np.einsum("ijkp,pl->ijkl", r_up, jet.H)


def real_sb_curvature(m: MetricField, p, w1, w2, w3, w4) -> float:
    """R^{SB,R}(W1, W2, W3, W4) for real tangent vectors Wt = wt + conj(wt).

    Each Wt is passed by its (1,0)-part components wt.  Evaluated by expanding
    every slot into (1,0)/(0,1) parts through the complexified tensor; the
    connection preserves types, so only mixed third/fourth slots contribute.
    """
    jet = metric_jet(m, p, order=2)
    d2hol = m.d2_hol(p)
    r = sb_curvature_direct_from_jet(jet)
    r20 = sb_curvature_two_zero_from_jet(jet, d2hol)
    r02 = sb_curvature_zero_two_from_jet(jet, d2hol)
    rbar = -np.conj(np.einsum("jikl->ijkl", r))   # g(R(d_i, d_jbar) d_kbar, d_l)
    r20b = np.conj(r02)                           # g(R(d_i, d_j) d_kbar, d_l)
    r02b = np.conj(r20)                           # g(R(d_ibar, d_jbar) d_kbar, d_l)
    c = np.conj
    w1 = np.asarray(w1, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    w3 = np.asarray(w3, dtype=complex)
    w4 = np.asarray(w4, dtype=complex)
    total = 0.0 + 0.0j
    for (wa, wb, sgn) in ((w1, w2, 1.0), (w2, w1, -1.0)):
        total += sgn * np.einsum("ijkl,i,j,k,l->", r, wa, c(wb), w3, c(w4))
        total += sgn * np.einsum("ijkl,i,j,k,l->", rbar, wa, c(wb), c(w3), w4)
    total += np.einsum("ijkl,i,j,k,l->", r20, w1, w2, w3, c(w4))
    total += np.einsum("ijkl,i,j,k,l->", r20b, w1, w2, c(w3), w4)
    total += np.einsum("ijkl,i,j,k,l->", r02, c(w1), c(w2), w3, c(w4))
    total += np.einsum("ijkl,i,j,k,l->", r02b, c(w1), c(w2), c(w3), w4)
    return assert_real(total, 1e-7, "real curvature value")


def hsc_bridge_residual(m: MetricField, p, U) -> dict:
    """Residual of R^{SB,R}(JX,X,X,JX) = 4 R^{SB,C}(U,Ubar,U,Ubar) with X = U + Ubar.

    Returns the residual, the real-tensor HSC (1.16 normalization
    R(JX,X,X,JX)/g(X,X)^2 with g(X,X) = 2 h(U,Ubar)), and the complex HSC.
    """
    U = np.asarray(U, dtype=complex)
    jet = metric_jet(m, p, order=2)
    r = sb_curvature_direct_from_jet(jet)
    rc = float(np.real(np.einsum("ijkl,i,j,k,l->", r, U, np.conj(U), U, np.conj(U))))
    real_val = real_sb_curvature(m, p, 1j * U, U, U, 1j * U)
    hU = float(np.real(np.einsum("ij,i,j->", jet.H, U, np.conj(U))))
    scale = 1.0 + abs(rc)
    return {
        "residual": abs(real_val - 4.0 * rc) / scale,
        "hsc_real": real_val / (2.0 * hU) ** 2,
        "hsc_complex": rc / hU ** 2,
    }


@dataclass(frozen=True)
class CurvatureExtrema:
    min_hol_ricci: float
    min_hsc: float
    sample_count: int
    argmin_ricci_point: np.ndarray
    argmin_ricci_direction: np.ndarray
    argmin_hsc_point: np.ndarray
    argmin_hsc_direction: np.ndarray
    sampled_min_ricci: float
    sampled_min_hsc: float


def _unit(jetH: np.ndarray, W: np.ndarray) -> np.ndarray:
    nrm = np.sqrt(float(np.real(np.einsum("ij,i,j->", jetH, W, np.conj(W)))))
    return W / nrm


def _hsc_value(r: np.ndarray, H: np.ndarray, W: np.ndarray) -> float:
    num = np.einsum("ijkl,i,j,k,l->", r, W, np.conj(W), W, np.conj(W))
    den = np.einsum("ij,i,j->", H, W, np.conj(W))
    return float(np.real(num)) / float(np.real(den)) ** 2


def _hsc_gradient(r: np.ndarray, H: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Wirtinger gradient of HSC with respect to conj(W) (steepest direction)."""
    num = np.einsum("ijkl,i,j,k,l->", r, W, np.conj(W), W, np.conj(W)).real
    den = np.einsum("ij,i,j->", H, W, np.conj(W)).real
    dnum = np.einsum("imkl,i,k,l->m", r, W, W, np.conj(W)) + np.einsum(
        "ijkm,i,j,k->m", r, W, np.conj(W), W
    )
    dden = np.einsum("im,i->m", H, W)
    return (dnum * den ** 2 - num * 2.0 * den * dden) / den ** 4


def curvature_extrema(
    m: MetricField,
    points,
    directions: int = 64,
    seed: int = 0,
    refine_steps: int = 20,
    refine_step_size: float = 0.1,
    imag_tol: float = IMAG_TOL_ANALYTIC,
) -> CurvatureExtrema:
    """Minimum holomorphic Ricci and HSC over sample points and unit directions.

    The Ricci minimum at a point is the smallest eigenvalue of the Hermitian
    pencil (Ric4, h); that eigen-route is the primary value.  Random unit
    directions plus projected gradient descent (on the best four) provide the
    sampling cross-check for both quantities, and are the primary route for
    the quartic HSC form.  Deterministic for a fixed seed.
    """
    import scipy.linalg as sla

    rng = np.random.default_rng(seed)
    points = [as_z(p) for p in points]
    best_ric = np.inf
    best_hsc = np.inf
    samp_ric = np.inf
    samp_hsc = np.inf
    arg_ric = (points[0], np.ones(m.n, dtype=complex))
    arg_hsc = (points[0], np.ones(m.n, dtype=complex))
    for z in points:
        jet = metric_jet(m, z, order=2)
        r = sb_curvature_direct_from_jet(jet)
        ric4 = sb_ricci_traces(r, jet.G)[3]
        ric4 = 0.5 * (ric4 + ric4.conj().T)
        vals, vecs = sla.eigh(ric4, 0.5 * (jet.H + jet.H.conj().T))
        if vals[0] < best_ric:
            best_ric = float(vals[0])
            arg_ric = (z, _unit(jet.H, vecs[:, 0]))
        dirs = rng.standard_normal((directions, m.n)) + 1j * rng.standard_normal((directions, m.n))
        ric_samples = []
        hsc_samples = []
        for W in dirs:
            Wu = _unit(jet.H, W)
            ric_samples.append(float(np.real(np.einsum("ij,i,j->", ric4, Wu, np.conj(Wu)))))
            hsc_samples.append(_hsc_value(r, jet.H, Wu))
        samp_ric = min(samp_ric, min(ric_samples))
        order = np.argsort(hsc_samples)
        for idx in order[:4]:
            W = _unit(jet.H, dirs[idx])
            for _ in range(refine_steps):
                g = _hsc_gradient(r, jet.H, W)
                W = _unit(jet.H, W - refine_step_size * g)
            v = _hsc_value(r, jet.H, W)
            if v < best_hsc:
                best_hsc = v
                arg_hsc = (z, W)
        samp_hsc = min(samp_hsc, min(hsc_samples))
    return CurvatureExtrema(
        min_hol_ricci=best_ric,
        min_hsc=best_hsc,
        sample_count=len(points),
        argmin_ricci_point=arg_ric[0],
        argmin_ricci_direction=arg_ric[1],
        argmin_hsc_point=arg_hsc[0],
        argmin_hsc_direction=arg_hsc[1],
        sampled_min_ricci=samp_ric,
        sampled_min_hsc=min(samp_hsc, best_hsc),
    )
