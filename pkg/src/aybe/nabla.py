"""Exact polynomials in ``nabla`` and the nilpotent matrix ``N`` of the Jordan construction.

For ``n >= 1`` let ``a_k = (-1)^k / k``, ``A_0`` the strictly lower triangular
Toeplitz matrix with subdiagonals ``a_1, ..., a_{n-1}`` and ``A_k = -a_k * 1``.
``N`` is the ``n^2 x n^2`` block upper triangular Toeplitz matrix with block
``(p, p+i)`` equal to ``A_i``.  ``N^(2n-1) = 0``, so ``exp(nabla N)`` is a
matrix of polynomials in ``nabla`` of degree at most ``2n - 2`` and

    nabla_{k,l} = e^t_{n(n-k-1)+l+1} exp(nabla N) e_{n(n-1)+1}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .numeric import (
    Jet,
    nabla_values,
    rational_identity,
    rational_is_zero,
    rational_matmul,
    rational_zeros,
)

_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
_UNICODE_FRACTIONS = {
    Fraction(1, 2): "½",
    Fraction(1, 3): "⅓",
    Fraction(2, 3): "⅔",
    Fraction(1, 4): "¼",
    Fraction(3, 4): "¾",
    Fraction(1, 6): "⅙",
    Fraction(5, 6): "⅚",
    Fraction(1, 8): "⅛",
}


@dataclass(frozen=True)
class NablaPoly:
    """``sum_r coeffs[r] nabla^r`` with exact rational coefficients (trailing zeros trimmed)."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, r: int, coeff=1) -> "NablaPoly":
        return cls((0,) * r + (Fraction(coeff),))

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def coeff(self, r: int) -> Fraction:
        return self.coeffs[r] if 0 <= r < len(self.coeffs) else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "NablaPoly") -> "NablaPoly":
        m = max(len(self.coeffs), len(other.coeffs))
        return NablaPoly(tuple(self.coeff(r) + other.coeff(r) for r in range(m)))

    def __neg__(self) -> "NablaPoly":
        return NablaPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "NablaPoly") -> "NablaPoly":
        return self + (-other)

    def __mul__(self, other) -> "NablaPoly":
        if isinstance(other, NablaPoly):
            if not self or not other:
                return NablaPoly()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return NablaPoly(tuple(out))
        f = Fraction(other)
        return NablaPoly(tuple(c * f for c in self.coeffs))

    __rmul__ = __mul__

    def apply(self, f: Jet) -> complex:
        """Value of ``P(nabla) f`` at the jet's expansion point."""
        if self.degree > f.order:
            raise ValueError(f"jet order {f.order} too small for nabla-degree {self.degree}")
        if not self:
            return 0j
        w = np.array([float(c) for c in self.coeffs])
        return complex(np.dot(w, nabla_values(f)[: len(w)]))

    def as_array(self, length: int) -> np.ndarray:
        if self.degree >= length:
            raise ValueError("array too short for this polynomial")
        out = np.zeros(length)
        out[: len(self.coeffs)] = [float(c) for c in self.coeffs]
        return out

    def render(self, fmt: str = "text") -> str:
        """Human-readable form: ``text`` (``-½∇ + ½∇²``), ``ascii`` or ``latex``."""
        if not self:
            return "0"
        parts = []
        for r, c in enumerate(self.coeffs):
            if c == 0:
                continue
            parts.append((c < 0, _render_term(abs(c), r, fmt)))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __str__(self) -> str:
        return self.render("text")


def _render_term(c: Fraction, r: int, fmt: str) -> str:
    if fmt == "latex":
        op = "" if r == 0 else ("\\nabla" if r == 1 else f"\\nabla^{{{r}}}")
        if c == 1:
            num = "1" if r == 0 else ""
        elif c.denominator == 1:
            num = str(c.numerator)
        else:
            num = f"\\frac{{{c.numerator}}}{{{c.denominator}}}"
        return num + op
    if fmt == "ascii":
        op = "" if r == 0 else ("D" if r == 1 else f"D^{r}")
        num = "1" if (c == 1 and r == 0) else ("" if c == 1 else str(c))
        return num + ("*" if num and op else "") + op
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    op = "" if r == 0 else ("∇" if r == 1 else "∇" + str(r).translate(_SUPERSCRIPT))
    if c == 1:
        num = "1" if r == 0 else ""
    else:
        num = _UNICODE_FRACTIONS.get(c, str(c))
    return num + op


def _a(k: int) -> Fraction:
    return Fraction((-1) ** k, k)


def _A0(n: int) -> np.ndarray:
    A = rational_zeros(n)
    for i in range(n):
        for j in range(i):
            A[i, j] = _a(i - j)
    return A


def _A(n: int, k: int) -> np.ndarray:
    if k == 0:
        return _A0(n)
    return rational_identity(n) * (-_a(k))


@lru_cache(maxsize=None)
def _build_N_cached(n: int) -> np.ndarray:
    N = rational_zeros(n * n)
    blocks = [_A(n, k) for k in range(n)]
    for p in range(n):
        for i in range(n - p):
            q = p + i
            N[p * n : (p + 1) * n, q * n : (q + 1) * n] = blocks[i]
    N.setflags(write=False)
    return N


def build_N(n: int) -> np.ndarray:
    """The exact nilpotent ``n^2 x n^2`` matrix ``N`` (object array of Fraction)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _build_N_cached(n).copy()


@lru_cache(maxsize=None)
def _N_powers(n: int) -> tuple[np.ndarray, ...]:
    """``(N^0, N^1, ..., N^(2n-1))``."""
    N = _build_N_cached(n)
    powers = [rational_identity(n * n)]
    for _ in range(2 * n - 1):
        powers.append(rational_matmul(powers[-1], N))
    for p in powers:
        p.setflags(write=False)
    return tuple(powers)


def N_power(n: int, r: int) -> np.ndarray:
    if r < 2 * n:
        return _N_powers(n)[r].copy()
    return rational_zeros(n * n)


def nilpotency_index_check(n: int) -> bool:
    """``N^(2n-1) == 0`` exactly and, for ``n >= 2``, ``N^(2n-2) != 0``."""
    powers = _N_powers(n)
    if not rational_is_zero(powers[2 * n - 1]):
        return False
    if n >= 2 and rational_is_zero(powers[2 * n - 2]):
        return False
    return True


@lru_cache(maxsize=None)
def _exp_nabla_N(n: int) -> tuple[tuple[NablaPoly, ...], ...]:
    powers = _N_powers(n)
    size = n * n
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            coeffs = tuple(powers[r][i, j] / math.factorial(r) for r in range(2 * n - 1))
            row.append(NablaPoly(coeffs))
        rows.append(tuple(row))
    return tuple(rows)


def exp_nabla_N(n: int) -> list[list[NablaPoly]]:
    """``sum_{r=0}^{2n-2} N^r nabla^r / r!`` as an ``n^2 x n^2`` grid of :class:`NablaPoly`."""
    return [list(row) for row in _exp_nabla_N(n)]


def nabla_kl(n: int, k: int, l: int) -> NablaPoly:
    if not (0 <= k < n and 0 <= l < n):
        raise IndexError(f"nabla_kl needs 0 <= k, l <= {n - 1}, got ({k}, {l})")
    # 1-based e^t_{n(n-k-1)+l+1} and e_{n(n-1)+1}
    return _exp_nabla_N(n)[n * (n - k - 1) + l][n * (n - 1)]


def symbolic_table(n: int) -> dict[tuple[int, int], NablaPoly]:
    """All ``nabla_{k,l}``, ``0 <= k, l < n``."""
    return {(k, l): nabla_kl(n, k, l) for k in range(n) for l in range(n)}


def render_table(n: int, fmt: str = "text") -> str:
    table = symbolic_table(n)
    if fmt == "latex":
        lines = ["\\begin{array}{c|" + "c" * n + "}", "k \\backslash l & " + " & ".join(str(l) for l in range(n)) + " \\\\ \\hline"]
        for k in range(n):
            lines.append(f"{k} & " + " & ".join(table[k, l].render("latex") for l in range(n)) + " \\\\")
        lines.append("\\end{array}")
        return "\n".join(lines)
    lines = []
    for (k, l), p in table.items():
        lines.append(f"nabla[{k},{l}] = {p.render(fmt)}")
    return "\n".join(lines)


def decreasing_sequences(i: int, k: int):
    """``S_i^k``: strictly decreasing ``(s_0, ..., s_k)`` with ``s_0 = i`` and ``s_k = 0``."""
    if k == 0:
        if i == 0:
            yield (0,)
        return
    if i < k:
        return
    for middle in itertools.combinations(range(i - 1, 0, -1), k - 1):
        yield (i,) + middle + (0,)


def n_power_block(n: int, i: int, r: int) -> np.ndarray:
    """Block ``(0, i)`` of ``N^r`` from the binomial/decreasing-sequence formula."""
    if not 0 <= i < n:
        raise IndexError("block index out of range")
    A0 = _A0(n)
    A0_pows = [rational_identity(n)]
    for _ in range(r):
        A0_pows.append(rational_matmul(A0_pows[-1], A0))
    out = rational_zeros(n)
    for k in range(r + 1):
        acc = rational_zeros(n)
        for s in decreasing_sequences(i, k):
            prod = rational_identity(n)
            for t in range(k):
                prod = rational_matmul(prod, _A(n, s[t] - s[t + 1]))
            acc = acc + prod
        if rational_is_zero(acc):
            continue
        out = out + rational_matmul(A0_pows[r - k], acc) * math.comb(r, k)
    return out
