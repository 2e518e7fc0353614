"""Coordinate charts, metric fields with derivative access, and the geometry catalogue.

Conventions (documented and tested):

* The background Riemannian metric is Euclidean exactly when ``h = (1/2) I``;
  the fundamental form is ``omega = i h_{i jbar} dz^i wedge dzbar^j``.
* Volume form: ``omega^n / n! = det(h) * 2^n dx^1 dy^1 ... dx^n dy^n``.
* ``|du|^2_g = 2 h^{i jbar} d_i u d_jbar u``, i.e. twice the (1,0)-gradient norm.

Metric derivative arrays (all produced here, analytic when registered,
4th-order finite differences otherwise):

* ``d1[k, i, j]      = d h_{i jbar} / dz^k``
* ``d2[k, l, i, j]   = d^2 h_{i jbar} / dz^k dzbar^l``
* ``d3[k, m, l, i, j]= d^3 h_{i jbar} / dz^k dz^m dzbar^l``

Antiholomorphic first derivatives follow from Hermiticity:
``d h_{i jbar} / dzbar^k = conj(d h_{j ibar} / dz^k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import wirtinger as wt
from .errors import DomainError, SingularMetricError
from .tensors import HermitianMatrix, ComplexTensor, inverse_metric_array, kinds


@dataclass(frozen=True)
class ChartPoint:
    """A point in a holomorphic coordinate chart."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(complex(c) for c in self.coords))
        if not all(np.isfinite(c.real) and np.isfinite(c.imag) for c in self.coords):
            raise DomainError("chart point has non-finite coordinates")

    @property
    def z(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    @property
    def n(self) -> int:
        return len(self.coords)


def as_z(p) -> np.ndarray:
    if isinstance(p, ChartPoint):
        return p.z
    return np.asarray(p, dtype=complex).reshape(-1)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in the underlying real coordinates (x1, y1, ..., xn, yn)."""

    lo: tuple
    hi: tuple

    def contains(self, z, margin: float = 0.0) -> bool:
        z = as_z(z)
        reals = np.empty(2 * len(z))
        reals[0::2] = z.real
        reals[1::2] = z.imag
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return bool(np.all(reals >= lo + margin) and np.all(reals <= hi - margin))

    @staticmethod
    def cube(n: int, half_width: float, center: float = 0.0) -> "Box":
        lo = tuple([center - half_width] * (2 * n))
        hi = tuple([center + half_width] * (2 * n))
        return Box(lo, hi)


@dataclass(frozen=True)
class AnalyticDerivatives:
    """Closed-form metric derivatives. Any member may be None (then FD is used).

    d2_hol[k, m, i, j] = d_k d_m h_{i jbar} (pure holomorphic second derivative;
    only the real-curvature bridge needs it).
    """

    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    d3: Optional[Callable] = None
    d2_hol: Optional[Callable] = None


class MetricField:
    """A Hermitian metric on a chart with derivative access up to third order."""

    def __init__(self, n, eval_fn, label="metric", domain=None, analytic=None,
                 fd_step=wt.DEFAULT_REL_STEP):
        self.n = int(n)
        self._eval = eval_fn
        self.label = label
        self.domain = domain if domain is not None else Box.cube(n, 1e6)
        self.analytic = analytic
        self.fd_step = float(fd_step)

    # -- evaluation ---------------------------------------------------------

    def value(self, p) -> np.ndarray:
        """Metric value H[i, j] = h_{i jbar}, symmetrized."""
        z = as_z(p)
        H = np.asarray(self._eval(z), dtype=complex)
        return 0.5 * (H + H.conj().T)

    def matrix(self, p) -> HermitianMatrix:
        return HermitianMatrix(self.value(p), atol=1e-9)

    def inverse(self, p) -> np.ndarray:
        """G[i, j] = h^{i jbar}; raises SingularMetricError off the PD cone."""
        return inverse_metric_array(self.value(p))

    # -- derivatives --------------------------------------------------------

    def _require_inside(self, z, order: int):
        margin = 0.0 if self._has_analytic(order) else wt.stencil_radius(z, self.fd_step, order)
        if not self.domain.contains(z, margin=margin):
            raise DomainError(
                f"point {z} (with stencil radius {margin:.2e}) leaves domain of {self.label}"
            )

    def _has_analytic(self, order: int) -> bool:
        if self.analytic is None:
            return False
        return getattr(self.analytic, f"d{order}") is not None

    def d1(self, p) -> np.ndarray:
        z = as_z(p)
        self._require_inside(z, 1)
        if self._has_analytic(1):
            return np.asarray(self.analytic.d1(z), dtype=complex)
        return np.array([wt.d_hol(self._eval, z, k, self.fd_step) for k in range(self.n)])

    def d1_antihol(self, p) -> np.ndarray:
        """d1b[k, i, j] = d h_{i jbar} / dzbar^k, from Hermiticity of h."""
        d1 = self.d1(p)
        return np.conj(np.swapaxes(d1, 1, 2))

    def d2(self, p) -> np.ndarray:
        z = as_z(p)
        self._require_inside(z, 2)
        if self._has_analytic(2):
            return np.asarray(self.analytic.d2(z), dtype=complex)
        n = self.n
        out = np.empty((n, n, n, n), dtype=complex)
        for k in range(n):
            for l in range(n):
                out[k, l] = wt.d2_mixed(self._eval, z, k, l, self.fd_step)
        return out

    def d3(self, p) -> np.ndarray:
        z = as_z(p)
        self._require_inside(z, 3)
        if self._has_analytic(3):
            return np.asarray(self.analytic.d3(z), dtype=complex)
        n = self.n
        out = np.empty((n, n, n, n, n), dtype=complex)
        for k in range(n):
            for m in range(n):
                for l in range(n):
                    out[k, m, l] = wt.d3_hhm(self._eval, z, k, m, l, self.fd_step)
        return out

    def d2_hol(self, p) -> np.ndarray:
        """d2h[k, m, i, j] = d_k d_m h_{i jbar} (pure holomorphic)."""
        z = as_z(p)
        self._require_inside(z, 2)
        if self.analytic is not None and self.analytic.d2_hol is not None:
            return np.asarray(self.analytic.d2_hol(z), dtype=complex)
        n = self.n
        out = np.empty((n, n, n, n), dtype=complex)
        for k in range(n):
            for mm in range(k, n):
                out[k, mm] = wt.d2_hol(self._eval, z, k, mm, self.fd_step)
                out[mm, k] = out[k, mm]
        return out

    def with_fd(self, step: float) -> "MetricField":
        """Copy of this field with analytic derivatives stripped (FD regime)."""
        return MetricField(self.n, self._eval, label=f"{self.label}[fd={step:g}]",
                           domain=self.domain, analytic=None, fd_step=step)

    def scaled(self, c: float) -> "MetricField":
        """Metric multiplied by a positive constant (for covariance checks)."""
        base_eval = self._eval
        analytic = None
        if self.analytic is not None:
            def scale_fn(fn):
                return None if fn is None else (lambda z: c * np.asarray(fn(z)))
            analytic = AnalyticDerivatives(
                d1=scale_fn(self.analytic.d1),
                d2=scale_fn(self.analytic.d2),
                d3=scale_fn(self.analytic.d3),
            )
        return MetricField(self.n, lambda z: c * np.asarray(base_eval(z)),
                           label=f"{c:g}*{self.label}", domain=self.domain,
                           analytic=analytic, fd_step=self.fd_step)

    def fd_vs_analytic_deviation(self, p, order: int) -> float:
        """Max relative deviation between FD and analytic derivatives at p."""
        if not self._has_analytic(order):
            raise ValueError("no analytic derivatives registered")
        fd = self.with_fd(self.fd_step)
        a = getattr(self, f"d{order}")(p)
        b = getattr(fd, f"d{order}")(p)
        scale = max(float(np.max(np.abs(a))), 1.0)
        return float(np.max(np.abs(a - b))) / scale


# -- per-point jet cache ------------------------------------------------------


@dataclass
class MetricJet:
    """All metric data needed by the connection/curvature layer at one point."""

    z: np.ndarray
    H: np.ndarray          # h_{i jbar}
    G: np.ndarray          # h^{i jbar}
    d1: np.ndarray         # [k,i,j] = d_k h_{i jbar}
    d1b: np.ndarray        # [k,i,j] = d_kbar h_{i jbar}
    d2: Optional[np.ndarray] = None   # [k,l,i,j] = d_k d_lbar h_{i jbar}
    _dG: Optional[np.ndarray] = None
    _d2G: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.H.shape[0]

    @property
    def dG(self) -> np.ndarray:
        """dG[k, a, b] = d h^{a bbar} / dz^k."""
        if self._dG is None:
            # From G_{ab} H_{cb} = delta: dG = -G . (d_k H)^T . G  in G-index layout.
            self._dG = -np.einsum("as,kcs,cb->kab", self.G, self.d1, self.G)
        return self._dG

    @property
    def dGb(self) -> np.ndarray:
        """dGb[k, a, b] = d h^{a bbar} / dzbar^k = conj(dG[k, b, a])."""
        return np.conj(np.swapaxes(self.dG, 1, 2))

    @property
    def d2G(self) -> np.ndarray:
        """d2G[k, l, a, b] = d^2 h^{a bbar} / dz^k dzbar^l."""
        if self._d2G is None:
            if self.d2 is None:
                raise ValueError("jet was built without second derivatives")
            # d_lbar of dG[k,a,b] = -d_lbar(G[a,s] d1[k,c,s] G[c,b]), product rule
            t1 = -np.einsum("las,kcs,cb->klab", self.dGb, self.d1, self.G)
            t2 = -np.einsum("as,klcs,cb->klab", self.G, self.d2, self.G)
            t3 = -np.einsum("as,kcs,lcb->klab", self.G, self.d1, self.dGb)
            self._d2G = t1 + t2 + t3
        return self._d2G


def metric_jet(m: MetricField, p, order: int = 2) -> MetricJet:
    z = as_z(p)
    H = m.value(z)
    G = inverse_metric_array(H)
    d1 = m.d1(z)
    d1b = np.conj(np.swapaxes(d1, 1, 2))
    d2 = m.d2(z) if order >= 2 else None
    return MetricJet(z=z, H=H, G=G, d1=d1, d1b=d1b, d2=d2)


# -- metric_derivatives public op ----------------------------------------------


@dataclass(frozen=True)
class MetricDerivativeStack:
    """Tagged derivative tensors of a metric at a point."""

    d1: ComplexTensor            # d_k h_{i jbar}
    d1_antihol: ComplexTensor    # d_kbar h_{i jbar}
    d2: Optional[ComplexTensor] = None
    d3: Optional[ComplexTensor] = None


def metric_derivatives(m: MetricField, p, order: int = 2) -> MetricDerivativeStack:
    """Derivative stack of h at p up to the requested order (1..3)."""
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    d1 = ComplexTensor(m.d1(p), kinds("hl", "hl", "al"))
    d1b = ComplexTensor(m.d1_antihol(p), kinds("al", "hl", "al"))
    d2 = d3 = None
    if order >= 2:
        d2 = ComplexTensor(m.d2(p), kinds("hl", "al", "hl", "al"))
    if order >= 3:
        d3 = ComplexTensor(m.d3(p), kinds("hl", "hl", "al", "hl", "al"))
    return MetricDerivativeStack(d1=d1, d1_antihol=d1b, d2=d2, d3=d3)


# -- catalogue entries ---------------------------------------------------------


@dataclass
class GeometryCatalogueEntry:
    name: str
    metric: MetricField
    is_balanced_expected: bool
    is_kahler_expected: bool
    diameter: Optional[float] = None
    exact_lambda1: Optional[float] = None
    eigenfunction: Optional[object] = None
    sample_box: Optional[Box] = None     # where identity checks draw points
    period: Optional[float] = None       # torus lattice period, if applicable
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.metric.n

    @property
    def has_spectrum(self) -> bool:
        return self.exact_lambda1 is not None


def fubini_study(n: int) -> GeometryCatalogueEntry:
    """Fubini-Study metric on the inhomogeneous chart of complex projective n-space.

    h_{i jbar} = delta_{ij}/(1+|z|^2) - zbar^i z^j/(1+|z|^2)^2, all derivatives
    in closed form.  For n = 1 the entry carries the exact spectral data of the
    round two-sphere of radius 1/sqrt(2): lambda_1 = 4, diameter pi/sqrt(2),
    ground eigenfunction (1-|z|^2)/(1+|z|^2).
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    eye = np.eye(n, dtype=complex)

    def h_eval(z):
        s = float(np.real(np.vdot(z, z)))
        zb = np.conj(z)
        return eye / (1.0 + s) - np.outer(zb, z) / (1.0 + s) ** 2

    def h_d1(z):
        s = float(np.real(np.vdot(z, z)))
        zb = np.conj(z)
        q2 = (1.0 + s) ** -2
        q3 = (1.0 + s) ** -3
        # d1[k,i,j] = -d_ij zb_k q2 - d_kj zb_i q2 + 2 zb_i z_j zb_k q3
        t = -np.einsum("ij,k->kij", eye, zb) * q2
        t += -np.einsum("kj,i->kij", eye, zb) * q2
        t += 2.0 * np.einsum("i,j,k->kij", zb, z, zb) * q3
        return t

    def h_d2(z):
        s = float(np.real(np.vdot(z, z)))
        zb = np.conj(z)
        q2 = (1.0 + s) ** -2
        q3 = (1.0 + s) ** -3
        q4 = (1.0 + s) ** -4
        t = -(np.einsum("ij,kl->klij", eye, eye) + np.einsum("kj,il->klij", eye, eye)) * q2
        t += 2.0 * (
            np.einsum("ij,k,l->klij", eye, zb, z)
            + np.einsum("kj,i,l->klij", eye, zb, z)
            + np.einsum("il,j,k->klij", eye, z, zb)
            + np.einsum("kl,i,j->klij", eye, zb, z)
        ) * q3
        t += -6.0 * np.einsum("i,j,k,l->klij", zb, z, zb, z) * q4
        return t

    def h_d2hol(z):
        s = float(np.real(np.vdot(z, z)))
        zb = np.conj(z)
        q3 = (1.0 + s) ** -3
        q4 = (1.0 + s) ** -4
        t = 2.0 * (
            np.einsum("ij,k,m->kmij", eye, zb, zb)
            + np.einsum("kj,i,m->kmij", eye, zb, zb)
            + np.einsum("jm,i,k->kmij", eye, zb, zb)
        ) * q3
        t += -6.0 * np.einsum("i,j,k,m->kmij", zb, z, zb, zb) * q4
        return t

    def h_d3(z):
        s = float(np.real(np.vdot(z, z)))
        zb = np.conj(z)
        q3 = (1.0 + s) ** -3
        q4 = (1.0 + s) ** -4
        q5 = (1.0 + s) ** -5
        dd = eye
        t = 2.0 * (
            np.einsum("ij,kl,m->kmlij", dd, dd, zb)
            + np.einsum("kj,il,m->kmlij", dd, dd, zb)
            + np.einsum("ij,lm,k->kmlij", dd, dd, zb)
            + np.einsum("kj,lm,i->kmlij", dd, dd, zb)
            + np.einsum("il,jm,k->kmlij", dd, dd, zb)
            + np.einsum("kl,jm,i->kmlij", dd, dd, zb)
        ) * q3
        t += -6.0 * (
            np.einsum("ij,k,l,m->kmlij", dd, zb, z, zb)
            + np.einsum("kj,i,l,m->kmlij", dd, zb, z, zb)
            + np.einsum("il,j,k,m->kmlij", dd, z, zb, zb)
            + np.einsum("kl,i,j,m->kmlij", dd, zb, z, zb)
            + np.einsum("jm,i,k,l->kmlij", dd, zb, zb, z)
            + np.einsum("lm,i,j,k->kmlij", dd, zb, z, zb)
        ) * q4
        t += 24.0 * np.einsum("i,j,k,l,m->kmlij", zb, z, zb, z, zb) * q5
        return t

    metric = MetricField(
        n,
        h_eval,
        label=f"fubini-study:{n}",
        domain=Box.cube(n, 1e4),
        analytic=AnalyticDerivatives(d1=h_d1, d2=h_d2, d3=h_d3, d2_hol=h_d2hol),
    )
    entry = GeometryCatalogueEntry(
        name=f"fubini-study:{n}",
        metric=metric,
        is_balanced_expected=True,
        is_kahler_expected=True,
        sample_box=Box.cube(n, 2.0),
    )
    if n == 1:
        from .fields import fs_ground_eigenfunction

        entry.diameter = math.pi / math.sqrt(2.0)
        entry.exact_lambda1 = 4.0
        entry.eigenfunction = fs_ground_eigenfunction()
    return entry


def flat_torus(n: int, period: float = 2.0 * math.pi) -> GeometryCatalogueEntry:
    """Flat torus (R^{2n} mod period * Z^{2n}) with h = (1/2) I (Euclidean g)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    half = 0.5 * np.eye(n)
    zero1 = np.zeros((n, n, n), dtype=complex)
    zero2 = np.zeros((n, n, n, n), dtype=complex)
    zero3 = np.zeros((n, n, n, n, n), dtype=complex)
    metric = MetricField(
        n,
        lambda z: half,
        label=f"flat-torus:{n}",
        domain=Box.cube(n, 1e6),
        analytic=AnalyticDerivatives(d1=lambda z: zero1, d2=lambda z: zero2, d3=lambda z: zero3,
                                     d2_hol=lambda z: zero2),
    )
    from .fields import torus_cosine

    k0 = 2.0 * math.pi / period
    entry = GeometryCatalogueEntry(
        name=f"flat-torus:{n}" if period == 2.0 * math.pi else f"flat-torus:{n}@{period:g}",
        metric=metric,
        is_balanced_expected=True,
        is_kahler_expected=True,
        diameter=0.5 * period * math.sqrt(2.0 * n),
        exact_lambda1=k0 ** 2,
        eigenfunction=torus_cosine(n, axis=0, wave=k0),
        sample_box=Box(tuple([0.0] * (2 * n)), tuple([period] * (2 * n))),
        period=period,
    )
    return entry


def iwasawa() -> GeometryCatalogueEntry:
    """Standard balanced non-Kahler metric on the Iwasawa threefold chart.

    omega = i (dz1^dz1b + dz2^dz2b + phi^phib) with phi = dz3 - z1 dz2, i.e.
    h11b = 1, h22b = 1+|z1|^2, h23b = -z1, h32b = -z1b, h33b = 1.
    """
    n = 3

    def h_eval(z):
        a = z[0]
        H = np.eye(3, dtype=complex)
        H[1, 1] = 1.0 + (a * np.conj(a)).real
        H[1, 2] = -a
        H[2, 1] = -np.conj(a)
        return H

    def h_d1(z):
        a = z[0]
        t = np.zeros((3, 3, 3), dtype=complex)
        t[0, 1, 1] = np.conj(a)   # d_1 h_{2 2bar}
        t[0, 1, 2] = -1.0         # d_1 h_{2 3bar}
        return t

    def h_d2(z):
        t = np.zeros((3, 3, 3, 3), dtype=complex)
        t[0, 0, 1, 1] = 1.0       # d_1 d_1bar h_{2 2bar}
        return t

    def h_d3(z):
        return np.zeros((3, 3, 3, 3, 3), dtype=complex)

    metric = MetricField(
        n,
        h_eval,
        label="iwasawa",
        domain=Box.cube(n, 1e4),
        analytic=AnalyticDerivatives(d1=h_d1, d2=h_d2, d3=h_d3,
                                     d2_hol=lambda z: np.zeros((3, 3, 3, 3), dtype=complex)),
    )
    return GeometryCatalogueEntry(
        name="iwasawa",
        metric=metric,
        is_balanced_expected=True,
        is_kahler_expected=False,
        sample_box=Box.cube(n, 1.0),
    )


def nonbalanced_example() -> GeometryCatalogueEntry:
    """Negative control: h = (1/2) e^{|z1|^2} I on C^2 is conformally flat but not balanced."""
    n = 2
    eye = np.eye(n)

    def h_eval(z):
        s1 = (z[0] * np.conj(z[0])).real
        return 0.5 * math.exp(s1) * eye

    def h_d1(z):
        s1 = (z[0] * np.conj(z[0])).real
        t = np.zeros((n, n, n), dtype=complex)
        t[0] = 0.5 * np.conj(z[0]) * math.exp(s1) * eye
        return t

    def h_d2(z):
        s1 = (z[0] * np.conj(z[0])).real
        t = np.zeros((n, n, n, n), dtype=complex)
        t[0, 0] = 0.5 * (1.0 + s1) * math.exp(s1) * eye
        return t

    def h_d3(z):
        s1 = (z[0] * np.conj(z[0])).real
        t = np.zeros((n, n, n, n, n), dtype=complex)
        t[0, 0, 0] = 0.5 * np.conj(z[0]) * (2.0 + s1) * math.exp(s1) * eye
        return t

    def h_d2hol(z):
        s1 = (z[0] * np.conj(z[0])).real
        t = np.zeros((n, n, n, n), dtype=complex)
        t[0, 0] = 0.5 * np.conj(z[0]) ** 2 * math.exp(s1) * eye
        return t

    metric = MetricField(
        n,
        h_eval,
        label="nonbalanced",
        domain=Box.cube(n, 50.0),
        analytic=AnalyticDerivatives(d1=h_d1, d2=h_d2, d3=h_d3, d2_hol=h_d2hol),
    )
    return GeometryCatalogueEntry(
        name="nonbalanced",
        metric=metric,
        is_balanced_expected=False,
        is_kahler_expected=False,
        sample_box=Box.cube(n, 1.5),
    )


def catalogue_names():
    return ["fubini-study:<n>", "flat-torus:<n>", "iwasawa", "nonbalanced"]


def load_catalogue(name: str) -> GeometryCatalogueEntry:
    """Resolve a CLI geometry name to a catalogue entry."""
    from .errors import ConfigError

    name = name.strip()
    if name == "iwasawa":
        return iwasawa()
    if name == "nonbalanced":
        return nonbalanced_example()
    for prefix, ctor in (("fubini-study", fubini_study), ("flat-torus", flat_torus)):
        if name == prefix:
            return ctor(1)
        if name.startswith(prefix + ":"):
            tail = name[len(prefix) + 1:]
            try:
                if "@" in tail and prefix == "flat-torus":
                    dim_s, per_s = tail.split("@", 1)
                    return flat_torus(int(dim_s), period=float(per_s))
                return ctor(int(tail))
            except ValueError as exc:
                raise ConfigError(f"bad geometry parameter in {name!r}") from exc
    raise ConfigError(f"unknown geometry {name!r}; known: {catalogue_names()}")


def halton_points(box: Box, count: int, seed: int, margin: float = 0.0) -> list:
    """Deterministic low-discrepancy points inside a real-coordinate box."""
    from scipy.stats import qmc

    lo = np.asarray(box.lo) + margin
    hi = np.asarray(box.hi) - margin
    sampler = qmc.Halton(d=len(lo), scramble=True, seed=seed)
    raw = sampler.random(count)
    pts = qmc.scale(raw, lo, hi)
    out = []
    for row in pts:
        out.append(row[0::2] + 1j * row[1::2])
    return out
