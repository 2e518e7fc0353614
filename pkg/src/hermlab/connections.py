"""Chern and Strominger-Bismut connection coefficients, torsions, and Hessians.

Index conventions (first lower index is the differentiation direction):

* ``gamma_hol[k, i, j]``:   nabla_{d/dz^i} d/dz^j = Gamma^k_{ij} d/dz^k
* ``gamma_mixed[k, i, j]``: nabla_{d/dzbar^i} d/dz^j = Gamma^k_{ibar j} d/dz^k

Chern:  Gamma^k_{ij} = h^{k lbar} d_i h_{j lbar}, mixed part zero.
SB:     Gamma^k_{ij} = h^{k lbar} d_j h_{i lbar}  (the Chern transpose), and
        Gamma^k_{ibar j} = h^{k lbar} (d_ibar h_{j lbar} - d_lbar h_{j ibar}).

Hessians of a real scalar u:

* ``t[i, j]    = d_i d_j u - Gamma^k_{ij} d_k u``            (SB (1,0)-Hessian)
* ``s[i, j]    = s_{i jbar} = conj(d_ibar d_j u - Gamma^k_{ibar j} d_k u)``
  i.e. the mixed Hessian in (hol, antihol) slot order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import MetricField, MetricJet, metric_jet
from .fields import ScalarField


@dataclass(frozen=True)
class ConnectionCoefficients:
    kind: str  # "chern" | "strominger-bismut"
    gamma_hol: np.ndarray
    gamma_mixed: np.ndarray

    @property
    def n(self) -> int:
        return self.gamma_hol.shape[0]


@dataclass(frozen=True)
class TorsionTensor:
    """t[k, i, j] = T^k_{ij}, antisymmetric in (i, j); lowered[i, j, l] = h_{k lbar} T^k_{ij}."""

    t: np.ndarray
    lowered: np.ndarray


@dataclass(frozen=True)
class HessianPair:
    t_hol: np.ndarray   # t_{ij}
    s_mix: np.ndarray   # s_{i jbar}

    @property
    def s_bar_hol(self) -> np.ndarray:
        """s_{ibar j} arrangement (conjugate of the stored s_{i jbar})."""
        return np.conj(self.s_mix)


def chern_from_jet(jet: MetricJet) -> ConnectionCoefficients:
    gamma = np.einsum("kl,ijl->kij", jet.G, jet.d1)
    return ConnectionCoefficients("chern", gamma, np.zeros_like(gamma))


def sb_from_jet(jet: MetricJet) -> ConnectionCoefficients:
    chern = np.einsum("kl,ijl->kij", jet.G, jet.d1)
    gamma_hol = np.swapaxes(chern, 1, 2)  # SB Gamma^k_{ij} = Chern Gamma^k_{ji}
    gamma_mixed = np.einsum("kl,ijl->kij", jet.G, jet.d1b) - np.einsum(
        "kl,lji->kij", jet.G, jet.d1b
    )
    return ConnectionCoefficients("strominger-bismut", gamma_hol, gamma_mixed)


def chern_connection(m: MetricField, p) -> ConnectionCoefficients:
    return chern_from_jet(metric_jet(m, p, order=1))


def sb_connection(m: MetricField, p) -> ConnectionCoefficients:
    return sb_from_jet(metric_jet(m, p, order=1))


def torsion(conn: ConnectionCoefficients, m: MetricField, p) -> TorsionTensor:
    """T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}, plus the metric-lowered form."""
    t = conn.gamma_hol - np.swapaxes(conn.gamma_hol, 1, 2)
    H = m.value(p)
    lowered = np.einsum("kl,kij->ijl", H, t)
    return TorsionTensor(t=t, lowered=lowered)


def chern_torsion_from_jet(jet: MetricJet) -> np.ndarray:
    """T^k_{ij} of the Chern connection directly from metric derivatives."""
    g = np.einsum("kl,ijl->kij", jet.G, jet.d1)
    return g - np.swapaxes(g, 1, 2)


def hessians(m: MetricField, u: ScalarField, p) -> HessianPair:
    jet = metric_jet(m, p, order=1)
    return hessians_from_jet(jet, u)


def hessians_from_jet(jet: MetricJet, u: ScalarField) -> HessianPair:
    z = jet.z
    conn = sb_from_jet(jet)
    du = u.grad(z)
    t = u.hess_hol(z) - np.einsum("kij,k->ij", conn.gamma_hol, du)
    # d_ibar d_j u = conj(d_i d_jbar u) for real u
    s_bar_hol = np.conj(u.hess_mix(z)) - np.einsum("kij,k->ij", conn.gamma_mixed, du)
    return HessianPair(t_hol=t, s_mix=np.conj(s_bar_hol))


def hessian_norms(jet: MetricJet, pair: HessianPair):
    """(|SB nabla^{1,0} d u|^2, |SB nabla^{0,1} d u|^2) at the jet's point."""
    G = jet.G
    t = pair.t_hol
    n10 = np.einsum("ij,kl,ik,jl->", G, G, t, np.conj(t))
    s = pair.s_mix            # s_{i lbar}
    sb = np.conj(s)           # s_{ibar l} indexed [i, l]
    n01 = np.einsum("ij,kl,jk,il->", G, G, sb, s)
    return float(np.real(n10)), float(np.real(n01))


def sb_transpose_deviation(m: MetricField, p) -> float:
    """Max |SBGamma^k_{ij} - CGamma^k_{ji}| (should vanish identically)."""
    jet = metric_jet(m, p, order=1)
    c = chern_from_jet(jet).gamma_hol
    s = sb_from_jet(jet).gamma_hol
    return float(np.max(np.abs(s - np.swapaxes(c, 1, 2))))


def metric_compatibility_residual(m: MetricField, p) -> float:
    """Reconstruction error of d_i h_{j lbar} from the Chern coefficients."""
    jet = metric_jet(m, p, order=1)
    c = chern_from_jet(jet).gamma_hol
    rebuilt = np.einsum("kl,kij->ijl", jet.H, c)
    scale = max(float(np.max(np.abs(jet.d1))), 1.0)
    return float(np.max(np.abs(rebuilt - jet.d1))) / scale
