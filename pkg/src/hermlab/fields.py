"""Real scalar fields on charts with derivative jets up to third order.

A field exposes, at a chart point z (complex array of length n):

* ``value(z)``      -- real number
* ``grad(z)``       -- d_i u, shape (n,)
* ``hess_hol(z)``   -- d_i d_j u, shape (n, n)
* ``hess_mix(z)``   -- d_i d_jbar u, shape (n, n)
* ``third_hhm(z)``  -- d_i d_j d_kbar u, shape (n, n, n)

Antiholomorphic counterparts follow from reality of u by conjugation
(e.g. d_ibar u = conj(d_i u), d_i d_jbar d_kbar u = conj(d_j d_k d_ibar u)).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import wirtinger as wt


class ScalarField:
    """Base: finite-difference jets on top of value(); subclasses override."""

    label = "scalar"
    analytic_order = 0  # highest derivative order available in closed form

    def __init__(self, n: int, fd_step: float = wt.DEFAULT_REL_STEP):
        self.n = int(n)
        self.fd_step = float(fd_step)

    def value(self, z) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def _value_c(self, z) -> complex:
        return complex(self.value(z))

    def grad(self, z) -> np.ndarray:
        return np.array([wt.d_hol(self._value_c, z, k, self.fd_step) for k in range(self.n)])

    def hess_hol(self, z) -> np.ndarray:
        n = self.n
        out = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                out[i, j] = wt.d2_hol(self._value_c, z, i, j, self.fd_step)
                out[j, i] = out[i, j]
        return out

    def hess_mix(self, z) -> np.ndarray:
        n = self.n
        out = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                out[i, j] = wt.d2_mixed(self._value_c, z, i, j, self.fd_step)
        return out

    def third_hhm(self, z) -> np.ndarray:
        n = self.n
        out = np.empty((n, n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                for k in range(n):
                    out[i, j, k] = wt.d3_hhm(self._value_c, z, i, j, k, self.fd_step)
                    out[j, i, k] = out[i, j, k]
        return out

    def with_fd(self, step: float) -> "ScalarField":
        """FD-jet view of this field (used by refinement/convergence checks)."""
        return FunctionField(self.n, self.value, label=f"{self.label}[fd={step:g}]", fd_step=step)


class FunctionField(ScalarField):
    """Wraps a plain value callable; all jets by finite differences."""

    def __init__(self, n, fn: Callable, label="function", fd_step=wt.DEFAULT_REL_STEP):
        super().__init__(n, fd_step)
        self._fn = fn
        self.label = label

    def value(self, z):
        return float(np.real(self._fn(np.asarray(z, dtype=complex))))


class ConstantField(ScalarField):
    analytic_order = 3

    def __init__(self, n, c: float):
        super().__init__(n)
        self.c = float(c)
        self.label = f"const:{c:g}"

    def value(self, z):
        return self.c

    def grad(self, z):
        return np.zeros(self.n, dtype=complex)

    def hess_hol(self, z):
        return np.zeros((self.n, self.n), dtype=complex)

    def hess_mix(self, z):
        return np.zeros((self.n, self.n), dtype=complex)

    def third_hhm(self, z):
        return np.zeros((self.n, self.n, self.n), dtype=complex)


class TorusCosine(ScalarField):
    """u = cos(sum_a k_a x^a + phase) on a flat-torus chart, exact jets.

    Each d/dz^a multiplies by k_a/2 and advances the phase by pi/2 (cos ->
    -sin -> -cos -> sin); d/dzbar^a does the same since x^a = (z^a+zbar^a)/2.
    """

    analytic_order = 3

    def __init__(self, n, kvec, phase: float = 0.0):
        super().__init__(n)
        self.kvec = np.asarray(kvec, dtype=float)
        self.phase = float(phase)
        self.label = f"cos(k.x), k={tuple(self.kvec)}"

    def _w(self, z):
        x = np.real(np.asarray(z))
        return float(self.kvec @ x + self.phase)

    def _trig(self, z, order):
        # order-th derivative of cos at w
        w = self._w(z)
        return math.cos(w + 0.5 * math.pi * order)

    def value(self, z):
        return self._trig(z, 0)

    def grad(self, z):
        return (0.5 * self.kvec) * self._trig(z, 1)

    def hess_hol(self, z):
        f = self._trig(z, 2)
        k2 = 0.5 * self.kvec
        return np.einsum("i,j->ij", k2, k2) * f + 0j

    def hess_mix(self, z):
        return self.hess_hol(z)

    def third_hhm(self, z):
        f = self._trig(z, 3)
        k2 = 0.5 * self.kvec
        return np.einsum("i,j,k->ijk", k2, k2, k2) * f + 0j


def torus_cosine(n: int, axis: int = 0, wave: float = 1.0) -> TorusCosine:
    kvec = np.zeros(n)
    kvec[axis] = wave
    return TorusCosine(n, kvec)


class FSGround(ScalarField):
    """u = (1-|z|^2)/(1+|z|^2) on the n=1 Fubini-Study chart, exact jets."""

    analytic_order = 3
    label = "fs-ground"

    def __init__(self):
        super().__init__(1)

    def value(self, z):
        s = (z[0] * np.conj(z[0])).real
        return (1.0 - s) / (1.0 + s)

    def grad(self, z):
        s = (z[0] * np.conj(z[0])).real
        return np.array([-2.0 * np.conj(z[0]) / (1.0 + s) ** 2])

    def hess_hol(self, z):
        s = (z[0] * np.conj(z[0])).real
        return np.array([[4.0 * np.conj(z[0]) ** 2 / (1.0 + s) ** 3]])

    def hess_mix(self, z):
        a = z[0]
        s = (a * np.conj(a)).real
        v = -2.0 / (1.0 + s) ** 2 + 4.0 * s / (1.0 + s) ** 3
        return np.array([[v + 0j]])

    def third_hhm(self, z):
        a = z[0]
        ab = np.conj(a)
        s = (a * ab).real
        v = 8.0 * ab / (1.0 + s) ** 3 - 12.0 * ab ** 2 * a / (1.0 + s) ** 4
        return np.array([[[v]]])


def fs_ground_eigenfunction() -> FSGround:
    return FSGround()


class FSCoordinate(ScalarField):
    """First spherical-harmonic fields on the FS chart: 2x/(1+|z|^2) or 2y/(1+|z|^2)."""

    analytic_order = 3

    def __init__(self, which: str = "x"):
        super().__init__(1)
        self.which = which
        self.label = f"fs-l1-{which}"

    def value(self, z):
        a = z[0]
        s = (a * np.conj(a)).real
        if self.which == "x":
            return float(((a + np.conj(a)) / (1.0 + s)).real)
        return float((-1j * (a - np.conj(a)) / (1.0 + s)).real)

    def grad(self, z):
        a = z[0]
        ab = np.conj(a)
        s = (a * ab).real
        if self.which == "x":
            return np.array([(1.0 - ab ** 2) / (1.0 + s) ** 2])
        return np.array([-1j * (1.0 + ab ** 2) / (1.0 + s) ** 2])

    def hess_hol(self, z):
        a = z[0]
        ab = np.conj(a)
        s = (a * ab).real
        if self.which == "x":
            v = -2.0 * ab * (1.0 - ab ** 2) / (1.0 + s) ** 3
        else:
            v = 2j * ab * (1.0 + ab ** 2) / (1.0 + s) ** 3
        return np.array([[v]])

    def hess_mix(self, z):
        a = z[0]
        ab = np.conj(a)
        s = (a * ab).real
        if self.which == "x":
            v = -2.0 * ab / (1.0 + s) ** 2 - 2.0 * a * (1.0 - ab ** 2) / (1.0 + s) ** 3
        else:
            v = -1j * (2.0 * ab / (1.0 + s) ** 2 - 2.0 * a * (1.0 + ab ** 2) / (1.0 + s) ** 3)
        return np.array([[v]])

    def third_hhm(self, z):
        a = z[0]
        ab = np.conj(a)
        s = (a * ab).real
        if self.which == "x":
            v = (-2.0 * (1.0 - 3.0 * ab ** 2) / (1.0 + s) ** 3
                 + 6.0 * a * ab * (1.0 - ab ** 2) / (1.0 + s) ** 4)
        else:
            v = (2j * (1.0 + 3.0 * ab ** 2) / (1.0 + s) ** 3
                 - 6j * a * ab * (1.0 + ab ** 2) / (1.0 + s) ** 4)
        return np.array([[[v]]])


class PolyField(ScalarField):
    """Real polynomial in (z, zbar): sum of c * prod z^alpha * prod zbar^beta terms.

    ``terms`` maps ((alpha_1..alpha_n), (beta_1..beta_n)) -> complex coefficient.
    Reality is the caller's job (include conjugate term pairs).
    """

    analytic_order = 3

    def __init__(self, n, terms: dict, label="poly"):
        super().__init__(n)
        self.terms = {(tuple(a), tuple(b)): complex(c) for (a, b), c in terms.items()}
        self.label = label

    @staticmethod
    def _mono(z, alpha, beta):
        return np.prod(z ** np.array(alpha)) * np.prod(np.conj(z) ** np.array(beta))

    def _eval_terms(self, z, dh=(), dah=()):
        """Evaluate after formally applying d/dz^i for i in dh and d/dzbar^j in dah."""
        total = 0.0 + 0j
        for (alpha, beta), c in self.terms.items():
            a = list(alpha)
            b = list(beta)
            coef = c
            ok = True
            for i in dh:
                if a[i] == 0:
                    ok = False
                    break
                coef *= a[i]
                a[i] -= 1
            if not ok:
                continue
            for j in dah:
                if b[j] == 0:
                    ok = False
                    break
                coef *= b[j]
                b[j] -= 1
            if not ok:
                continue
            total += coef * self._mono(np.asarray(z, dtype=complex), a, b)
        return total

    def value(self, z):
        return float(np.real(self._eval_terms(z)))

    def grad(self, z):
        return np.array([self._eval_terms(z, dh=(i,)) for i in range(self.n)])

    def hess_hol(self, z):
        return np.array([[self._eval_terms(z, dh=(i, j)) for j in range(self.n)]
                         for i in range(self.n)])

    def hess_mix(self, z):
        return np.array([[self._eval_terms(z, dh=(i,), dah=(j,)) for j in range(self.n)]
                         for i in range(self.n)])

    def third_hhm(self, z):
        n = self.n
        out = np.empty((n, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    out[i, j, k] = self._eval_terms(z, dh=(i, j), dah=(k,))
        return out


def real_part_field(n: int, axis: int, label=None) -> PolyField:
    """u = Re z^axis."""
    a = tuple(1 if i == axis else 0 for i in range(n))
    zero = tuple([0] * n)
    return PolyField(n, {(a, zero): 0.5, (zero, a): 0.5},
                     label=label or f"re-z{axis + 1}")


class LogShift(ScalarField):
    """v = log(a + u) for a scalar field u with jets, a + u > 0 where evaluated."""

    def __init__(self, base: ScalarField, a: float):
        super().__init__(base.n, base.fd_step)
        if a <= 1.0:
            raise ValueError("shift must satisfy a > 1 for normalized eigenfunctions")
        self.base = base
        self.a = float(a)
        self.label = f"log({a:g}+{base.label})"
        self.analytic_order = base.analytic_order

    def value(self, z):
        return math.log(self.a + self.base.value(z))

    def grad(self, z):
        w = self.a + self.base.value(z)
        return self.base.grad(z) / w

    def hess_hol(self, z):
        w = self.a + self.base.value(z)
        g = self.base.grad(z)
        return self.base.hess_hol(z) / w - np.einsum("i,j->ij", g, g) / w ** 2

    def hess_mix(self, z):
        w = self.a + self.base.value(z)
        g = self.base.grad(z)
        gb = np.conj(g)
        return self.base.hess_mix(z) / w - np.einsum("i,j->ij", g, gb) / w ** 2

    def third_hhm(self, z):
        w = self.a + self.base.value(z)
        g = self.base.grad(z)
        gb = np.conj(g)
        hh = self.base.hess_hol(z)
        hm = self.base.hess_mix(z)
        t = self.base.third_hhm(z) / w
        t -= (np.einsum("ij,k->ijk", hh, gb)
              + np.einsum("ik,j->ijk", hm, g)
              + np.einsum("jk,i->ijk", hm, g)) / w ** 2
        t += 2.0 * np.einsum("i,j,k->ijk", g, g, gb) / w ** 3
        return t


class AffineField(ScalarField):
    """y = (u - shift) / scale; jets scale linearly."""

    def __init__(self, base: ScalarField, shift: float, scale: float):
        super().__init__(base.n, base.fd_step)
        self.base = base
        self.shift = float(shift)
        self.scale = float(scale)
        self.label = f"({base.label}-{shift:g})/{scale:g}"
        self.analytic_order = base.analytic_order

    def value(self, z):
        return (self.base.value(z) - self.shift) / self.scale

    def grad(self, z):
        return self.base.grad(z) / self.scale

    def hess_hol(self, z):
        return self.base.hess_hol(z) / self.scale

    def hess_mix(self, z):
        return self.base.hess_mix(z) / self.scale

    def third_hhm(self, z):
        return self.base.third_hhm(z) / self.scale
