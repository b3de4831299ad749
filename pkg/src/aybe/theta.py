"""First and third Jacobi theta functions evaluated on jets.

Conventions (``q = exp(pi i tau)``)::

    theta1(z) = 2 q^(1/4) sum_{n>=0} (-1)^n q^(n(n+1)) sin((2n+1) pi z)
    theta3(z) = 1 + 2 sum_{n>=1} q^(n^2) cos(2 pi n z)

Quasi-periodicity used for argument reduction::

    theta1(z + 1) = -theta1(z),  theta1(z + tau) = -exp(-pi i tau - 2 pi i z) theta1(z)
    theta3(z + 1) =  theta3(z),  theta3(z + tau) =  exp(-pi i tau - 2 pi i z) theta3(z)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .numeric import Jet, jet_exp, jet_lift, sincos_series

PI = math.pi


class SeriesTruncationError(RuntimeError):
    """The q-series tail bound could not be met within ``max_terms``."""


def _terms_needed(abs_q: float, exponent, eps: float, max_terms: int) -> int:
    for N in range(1, max_terms + 1):
        if abs_q ** exponent(N) < eps:
            return N
    raise SeriesTruncationError(
        f"|q| = {abs_q:.6g}: tail bound {eps:g} not reached within {max_terms} terms"
    )


@dataclass(frozen=True)
class TorusParam:
    """Modular parameter ``tau`` with a frozen q-series truncation.

    ``terms1`` counts the theta1 terms ``n = 0 .. terms1-1``; ``terms3`` the
    theta3 terms ``n = 1 .. terms3``.  Both are chosen so the first dropped
    term stays below ``trunc_eps`` everywhere in the reduced strip
    ``|Im z| <= Im(tau)/2``, with one extra term of headroom for derivatives.
    Passing ``terms`` forces both counts (used to probe truncation).
    """

    tau: complex
    trunc_eps: float = 1e-16
    max_terms: int = 64
    terms: int | None = None
    q: complex = field(init=False, repr=False, compare=False)
    terms1: int = field(init=False, repr=False, compare=False)
    terms3: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tau = complex(self.tau)
        object.__setattr__(self, "tau", tau)
        if not tau.imag > 0:
            raise ValueError(f"tau must lie in the upper half-plane, got {tau}")
        if not self.trunc_eps > 0:
            raise ValueError("trunc_eps must be positive")
        q = cmath.exp(1j * PI * tau)
        object.__setattr__(self, "q", q)
        if self.terms is not None:
            n1 = n3 = int(self.terms)
        else:
            aq = abs(q)
            # first dropped theta1 term ~ |q|^(N(N+1)) e^((2N+1) pi Im(tau)/2) = |q|^(N^2 - 1/2)
            n1 = _terms_needed(aq, lambda N: N * N - 0.5, self.trunc_eps, self.max_terms) + 1
            # first dropped theta3 term ~ |q|^((N+1)^2 - (N+1)) = |q|^(N(N+1))
            n3 = _terms_needed(aq, lambda N: N * (N + 1), self.trunc_eps, self.max_terms) + 1
            if max(n1, n3) > self.max_terms:
                raise SeriesTruncationError(f"tau = {tau}: more than {self.max_terms} terms required")
        object.__setattr__(self, "terms1", n1)
        object.__setattr__(self, "terms3", n3)

    @property
    def half_period(self) -> complex:
        """``(tau + 1)/2``, the zero of theta3 in the fundamental cell."""
        return (self.tau + 1) / 2


def _lattice_shift(z: complex, tp: TorusParam) -> tuple[int, int]:
    m = round(z.imag / tp.tau.imag)
    k = round((z - m * tp.tau).real)
    return m, k


def reduce_argument(z: complex, tp: TorusParam, which: int = 1) -> tuple[complex, complex, complex]:
    """Move ``z`` to ``z_red = z - m tau - k`` with ``|Im z_red| <= Im(tau)/2``.

    Returns ``(z_red, factor_log, sign)`` with
    ``theta(z) = sign * exp(factor_log) * theta(z_red)``, where
    ``factor_log = -pi i m^2 tau - 2 pi i m z_red``.  The sign is
    ``(-1)^(m+k)`` for ``which=1`` and ``1`` for ``which=3``.
    """
    if which not in (1, 3):
        raise ValueError("which must be 1 or 3")
    z = complex(z)
    m, k = _lattice_shift(z, tp)
    z_red = z - m * tp.tau - k
    factor_log = -1j * PI * m * m * tp.tau - 2j * PI * m * z_red
    sign = -1.0 if which == 1 and (m + k) % 2 else 1.0
    return z_red, factor_log, complex(sign)


def _as_jet(z) -> Jet:
    return z if isinstance(z, Jet) else jet_lift(complex(z), 0)


def _reduced(z: Jet, tp: TorusParam, which: int) -> tuple[Jet, Jet | None, float]:
    m, k = _lattice_shift(z.value, tp)
    zr = z - (m * tp.tau + k) if (m or k) else z
    sign = -1.0 if which == 1 and (m + k) % 2 else 1.0
    if m == 0:
        return zr, None, sign
    log_jet = zr * (-2j * PI * m) + (-1j * PI * m * m * tp.tau)
    return zr, jet_exp(log_jet), sign


def _theta1_series(z: Jet, tp: TorusParam, terms: int) -> Jet:
    n = np.arange(terms)
    freq = (2 * n + 1) * PI
    weights = 2 * np.exp(1j * PI * tp.tau * (n * (n + 1) + 0.25)) * (-1.0) ** n
    s, _ = sincos_series(freq[:, None] * z.coeffs[None, :])
    return Jet(weights @ s)


def _theta3_series(z: Jet, tp: TorusParam, terms: int) -> Jet:
    n = np.arange(1, terms + 1)
    weights = 2 * np.exp(1j * PI * tp.tau * n * n)
    _, c = sincos_series((2 * PI * n)[:, None] * z.coeffs[None, :])
    out = weights @ c
    out[0] += 1.0
    return Jet(out)


def theta1(z, tp: TorusParam) -> Jet:
    """Jet of theta1 at ``z`` (a :class:`Jet` or a plain complex number)."""
    z = _as_jet(z)
    zr, factor, sign = _reduced(z, tp, 1)
    out = _theta1_series(zr, tp, tp.terms1)
    if factor is not None:
        out = out * factor
    return out * sign if sign != 1 else out


def theta3(z, tp: TorusParam) -> Jet:
    """Jet of theta3 at ``z`` (a :class:`Jet` or a plain complex number)."""
    z = _as_jet(z)
    zr, factor, _ = _reduced(z, tp, 3)
    out = _theta3_series(zr, tp, tp.terms3)
    return out * factor if factor is not None else out


def theta1_value(z: complex, tp: TorusParam) -> complex:
    return theta1(z, tp).value


def theta3_value(z: complex, tp: TorusParam) -> complex:
    return theta3(z, tp).value


@lru_cache(maxsize=256)
def theta1_prime0(tp: TorusParam) -> complex:
    """``d theta1/dz`` at ``z = 0``."""
    return theta1(jet_lift(0.0, 1), tp)[1]


def theta_relation_check(z: complex, tp: TorusParam) -> complex:
    """Residual of ``theta3(z + (tau+1)/2) = i exp(-pi i (z + tau/4)) theta1(z)``."""
    lhs = theta3_value(z + tp.half_period, tp)
    rhs = 1j * cmath.exp(-1j * PI * (z + tp.tau / 4)) * theta1_value(z, tp)
    return lhs - rhs
