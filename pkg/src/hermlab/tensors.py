"""Dense complex multi-index tensors with holomorphy/variance tags.

Conventions used throughout the library:

* A Hermitian metric value is the matrix ``H[i, j] = h_{i jbar}``.
* The inverse-metric array is ``G[i, j] = h^{i jbar}``, the *conjugate* of the
  matrix inverse of ``H`` (equivalently its transpose, since the inverse of a
  Hermitian matrix is Hermitian).  It satisfies ``sum_j G[i, j] H[k, j] =
  delta_{ik}`` and ``sum_i G[i, j] H[i, l] = delta_{jl}``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.linalg import LinAlgError

from .errors import IndexCompatibilityError, SingularMetricError


class IndexKind(enum.Enum):
    HOL_LOWER = "hol-lower"
    HOL_UPPER = "hol-upper"
    AH_LOWER = "antihol-lower"
    AH_UPPER = "antihol-upper"

    @property
    def holomorphy(self) -> str:
        return "hol" if self in (IndexKind.HOL_LOWER, IndexKind.HOL_UPPER) else "antihol"

    @property
    def variance(self) -> str:
        return "upper" if self in (IndexKind.HOL_UPPER, IndexKind.AH_UPPER) else "lower"

    def dual(self) -> "IndexKind":
        return {
            IndexKind.HOL_LOWER: IndexKind.HOL_UPPER,
            IndexKind.HOL_UPPER: IndexKind.HOL_LOWER,
            IndexKind.AH_LOWER: IndexKind.AH_UPPER,
            IndexKind.AH_UPPER: IndexKind.AH_LOWER,
        }[self]


@dataclass(frozen=True)
class ComplexTensor:
    """Row-major dense complex tensor; one IndexKind tag per axis."""

    data: np.ndarray
    kinds: tuple

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", arr)
        kinds = tuple(IndexKind(k) for k in self.kinds)
        object.__setattr__(self, "kinds", kinds)
        if arr.ndim != len(kinds):
            raise IndexCompatibilityError(
                f"tensor rank {arr.ndim} does not match {len(kinds)} index kinds"
            )

    @property
    def dims(self) -> tuple:
        return self.data.shape

    @property
    def rank(self) -> int:
        return self.data.ndim


def contract(a: ComplexTensor, b: ComplexTensor, pairs) -> ComplexTensor:
    """Contract paired axes of a and b (same holomorphy, opposite variance)."""
    pairs = list(pairs)
    a_axes = [p[0] for p in pairs]
    b_axes = [p[1] for p in pairs]
    for ia, ib in pairs:
        ka, kb = a.kinds[ia], b.kinds[ib]
        if a.dims[ia] != b.dims[ib]:
            raise IndexCompatibilityError(
                f"extent mismatch {a.dims[ia]} vs {b.dims[ib]} on pair ({ia},{ib})"
            )
        if kb is not ka.dual():
            raise IndexCompatibilityError(
                f"kind mismatch: cannot contract {ka.value} with {kb.value}"
            )
    data = np.tensordot(a.data, b.data, axes=(a_axes, b_axes))
    kinds = tuple(k for i, k in enumerate(a.kinds) if i not in a_axes) + tuple(
        k for i, k in enumerate(b.kinds) if i not in b_axes
    )
    return ComplexTensor(data, kinds)


def max_abs(a) -> float:
    """Max modulus over entries; 0 for empty tensors."""
    arr = a.data if isinstance(a, ComplexTensor) else np.asarray(a)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


class HermitianMatrix:
    """n x n Hermitian matrix, symmetrized on construction.

    Construction fails if the anti-Hermitian deviation exceeds ``atol``
    (defaults to 1e-12 absolute, scaled by the entry magnitude to absorb
    finite-difference noise on large-entry metrics).
    """

    def __init__(self, entries, atol: float = 1e-12):
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise IndexCompatibilityError("HermitianMatrix needs a square matrix")
        dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
        scale = 1.0 + (float(np.max(np.abs(a))) if a.size else 0.0)
        if dev > atol * scale:
            raise IndexCompatibilityError(
                f"matrix is not Hermitian: deviation {dev:.3e} exceeds {atol:.1e}*{scale:.3e}"
            )
        self.entries = 0.5 * (a + a.conj().T)
        self.n = a.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def is_positive_definite(self) -> bool:
        try:
            np.linalg.cholesky(self.entries)
        except LinAlgError:
            return False
        return True


def hermitian_inverse(H) -> HermitianMatrix:
    """Inverse of a Hermitian positive-definite matrix via Cholesky.

    The factorization doubles as the positive-definiteness check: any
    non-positive pivot raises SingularMetricError.
    """
    A = H.entries if isinstance(H, HermitianMatrix) else HermitianMatrix(H).entries
    try:
        L = np.linalg.cholesky(A)
    except LinAlgError as exc:
        raise SingularMetricError("matrix is not positive-definite") from exc
    Linv = np.linalg.inv(L)
    inv = Linv.conj().T @ Linv
    inv = 0.5 * (inv + inv.conj().T)
    return HermitianMatrix(inv)


def inverse_metric_array(H: np.ndarray) -> np.ndarray:
    """Return G with G[i, j] = h^{i jbar} for the metric value H[i, j] = h_{i jbar}."""
    Hs = 0.5 * (np.asarray(H, dtype=complex) + np.asarray(H, dtype=complex).conj().T)
    inv = hermitian_inverse(HermitianMatrix(Hs, atol=1e-9)).entries
    return inv.conj()


def assert_real(value, tol: float, what: str = "value") -> float:
    """Return the real part, raising if imaginary leakage exceeds tol."""
    v = complex(value)
    scale = 1.0 + abs(v)
    if abs(v.imag) > tol * scale:
        raise ArithmeticError(f"{what} has imaginary leakage {v.imag:.3e} (tol {tol:.1e})")
    return v.real


def identity_deviation(H: np.ndarray, R: np.ndarray) -> float:
    n = H.shape[0]
    return float(np.max(np.abs(H @ R - np.eye(n))))


def kinds(*names) -> tuple:
    """Shorthand: kinds('hl','hu','al','au') -> tuple of IndexKind."""
    table = {
        "hl": IndexKind.HOL_LOWER,
        "hu": IndexKind.HOL_UPPER,
        "al": IndexKind.AH_LOWER,
        "au": IndexKind.AH_UPPER,
    }
    return tuple(table[n] for n in names)
