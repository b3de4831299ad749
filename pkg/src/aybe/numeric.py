"""Shared arithmetic: truncated Taylor jets, exact rational matrices, guarded solves.

Jets carry plain Taylor coefficients ``c_0 .. c_D`` of ``f(z0 + t)``.  The
normalized derivative ``nabla = -1/(2 pi i) d/dz`` is applied only when a
derivative is extracted (:func:`derivative_from_jet`).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

TWO_PI_I = 2j * math.pi
NABLA_FACTOR = -1.0 / TWO_PI_I

Rational = Fraction

DEFAULT_COND_LIMIT = 1e12


class SingularSystem(ValueError):
    """Raised when a linear system is singular or too ill-conditioned to trust."""

    def __init__(self, message: str, cond: float = math.inf):
        super().__init__(message)
        self.cond = cond


class Jet:
    """Truncated power series ``sum_k c_k t^k + O(t^(D+1))`` with complex coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Sequence[complex] | np.ndarray):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("jet needs a non-empty 1-d coefficient sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("jet coefficients must be finite")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, value: complex, order: int) -> "Jet":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return self._c.size - 1

    @property
    def value(self) -> complex:
        return complex(self._c[0])

    def __len__(self) -> int:
        return self._c.size

    def __getitem__(self, k: int) -> complex:
        return complex(self._c[k])

    def __repr__(self) -> str:
        return f"Jet({list(self._c)!r})"

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError(f"jet order mismatch: {self.order} vs {other.order}")
            return other
        return Jet.constant(complex(other), self.order)

    def __add__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return Jet(self._c + self._coerce(other)._c)
        c = self._c.copy()
        c[0] += other
        return Jet(c)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(-self._c)

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return Jet(self._c * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return jet_div(self, other)
        return Jet(self._c / complex(other))

    def __rtruediv__(self, other) -> "Jet":
        return jet_div(Jet.constant(complex(other), self.order), self)


def jet_lift(z0: complex, order: int) -> Jet:
    """Jet of the identity map ``z -> z`` at ``z0``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    c = np.zeros(order + 1, dtype=complex)
    c[0] = z0
    if order >= 1:
        c[1] = 1.0
    return Jet(c)


def _same_order(a: Jet, b: Jet) -> None:
    if a.order != b.order:
        raise ValueError(f"jet order mismatch: {a.order} vs {b.order}")


def jet_mul(a: Jet, b: Jet) -> Jet:
    _same_order(a, b)
    return Jet(np.convolve(a.coeffs, b.coeffs)[: a.order + 1])


def jet_div(a: Jet, b: Jet) -> Jet:
    _same_order(a, b)
    bc = b.coeffs
    if bc[0] == 0:
        raise ZeroDivisionError("jet division by a series with vanishing constant term")
    ac = a.coeffs
    q = np.zeros_like(ac)
    for k in range(ac.size):
        q[k] = (ac[k] - np.dot(bc[1 : k + 1], q[k - 1 :: -1][:k])) / bc[0]
    return Jet(q)


def jet_exp(a: Jet) -> Jet:
    ac = a.coeffs
    e = np.zeros_like(ac)
    e[0] = np.exp(ac[0])
    j = np.arange(ac.size)
    for k in range(1, ac.size):
        e[k] = np.dot(j[1 : k + 1] * ac[1 : k + 1], e[k - 1 :: -1][:k]) / k
    return Jet(e)


def sincos_series(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Taylor coefficients of ``sin(f)`` and ``cos(f)`` for a batch of series.

    ``f`` has shape ``(..., D+1)``; the recurrences run along the last axis.
    """
    f = np.asarray(f, dtype=complex)
    s = np.zeros_like(f)
    c = np.zeros_like(f)
    s[..., 0] = np.sin(f[..., 0])
    c[..., 0] = np.cos(f[..., 0])
    D = f.shape[-1] - 1
    jf = np.arange(D + 1) * f
    for k in range(1, D + 1):
        # k s_k = sum_j j f_j c_{k-j};  k c_k = -sum_j j f_j s_{k-j}
        w = jf[..., 1 : k + 1]
        s[..., k] = np.sum(w * c[..., k - 1 :: -1][..., :k], axis=-1) / k
        c[..., k] = -np.sum(w * s[..., k - 1 :: -1][..., :k], axis=-1) / k
    return s, c


def jet_sin(a: Jet) -> Jet:
    return Jet(sincos_series(a.coeffs)[0])


def jet_cos(a: Jet) -> Jet:
    return Jet(sincos_series(a.coeffs)[1])


def derivative_from_jet(a: Jet, k: int) -> complex:
    """``nabla^k f`` at the expansion point, ``nabla = -1/(2 pi i) d/dz``."""
    if k < 0 or k > a.order:
        raise ValueError(f"derivative order {k} outside jet order {a.order}")
    return complex(NABLA_FACTOR**k * math.factorial(k) * a.coeffs[k])


def plain_derivative_from_jet(a: Jet, k: int) -> complex:
    """``d^k f / dz^k`` at the expansion point (``nabla^k = (-1/(2 pi i))^k d^k``)."""
    if k < 0 or k > a.order:
        raise ValueError(f"derivative order {k} outside jet order {a.order}")
    return complex(math.factorial(k) * a.coeffs[k])


def nabla_values(a: Jet) -> np.ndarray:
    """Vector ``[nabla^0 f, ..., nabla^D f]`` at the expansion point."""
    k = np.arange(a.order + 1)
    fact = np.array([math.factorial(int(i)) for i in k], dtype=float)
    return NABLA_FACTOR**k * fact * a.coeffs


def linear_solve(A: np.ndarray, rhs: np.ndarray, cond_limit: float = DEFAULT_COND_LIMIT) -> np.ndarray:
    """Solve ``A X = rhs`` by LU with partial pivoting after a condition check.

    Raises :class:`SingularSystem` when ``cond(A)`` exceeds ``cond_limit``.
    """
    A = np.asarray(A, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"linear_solve needs a square matrix, got shape {A.shape}")
    if rhs.shape[0] != A.shape[0]:
        raise ValueError("right-hand side has incompatible leading dimension")
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularSystem(f"matrix condition number {cond:.3g} exceeds {cond_limit:.3g}", cond)
    return np.linalg.solve(A, rhs)


# exact rational matrices, stored as numpy object arrays of Fraction


def rational_zeros(rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    out = np.empty((rows, cols), dtype=object)
    out.fill(Fraction(0))
    return out


def rational_identity(n: int) -> np.ndarray:
    out = rational_zeros(n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def rational_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError("rational_matmul: inner dimensions differ")
    out = rational_zeros(a.shape[0], b.shape[1])
    # skip zero entries; the matrices here are very sparse
    nz_b = [[(k, b[k, j]) for k in range(b.shape[0]) if b[k, j] != 0] for j in range(b.shape[1])]
    for i in range(a.shape[0]):
        row = a[i]
        for j, col in enumerate(nz_b):
            acc = Fraction(0)
            for k, bkj in col:
                aik = row[k]
                if aik:
                    acc += aik * bkj
            out[i, j] = acc
    return out


def rational_is_zero(a: np.ndarray) -> bool:
    return all(x == 0 for x in a.flat)


def to_complex_array(a: np.ndarray) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in a], dtype=complex)
