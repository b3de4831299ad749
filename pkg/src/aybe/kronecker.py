"""The Kronecker function and its trigonometric and rational degenerations.

``sigma(u, x) = theta1'(0) theta1(u + x) / (theta1(u) theta1(x))`` has a simple
pole with residue 1 at ``u = 0`` and satisfies Fay's identity

    sigma(u, x) sigma(u+v, y) = sigma(u+v, x+y) sigma(-v, x) + sigma(v, y) sigma(u, x+y).

The degenerations are ``cot(u) + cot(x)`` and ``1/u + 1/x``.

Derivatives are always taken in the first argument.  Jets carry plain Taylor
coefficients; use :func:`aybe.numeric.derivative_from_jet` for
``nabla^k = (-1/(2 pi i))^k d^k/du^k`` and
:func:`aybe.numeric.plain_derivative_from_jet` for ``d^k/du^k``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Union

from .numeric import Jet, jet_cos, jet_lift, jet_sin, plain_derivative_from_jet
from .theta import TorusParam, theta1, theta1_prime0

POLE_RTOL = 1e-10


class SingularInput(ValueError):
    """An evaluation point sits on (or numerically at) a pole."""

    def __init__(self, message: str, point: complex | None = None):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class Elliptic:
    tp: TorusParam


@dataclass(frozen=True)
class Trigonometric:
    pass


@dataclass(frozen=True)
class Rational:
    pass


KroneckerKind = Union[Elliptic, Trigonometric, Rational]


def _check(value: complex, scale: float, what: str, point: complex) -> None:
    if abs(value) < POLE_RTOL * scale:
        raise SingularInput(f"{what} vanishes at {point} (pole of the Kronecker function)", point)


def sigma_jet(kind: KroneckerKind, u: complex, x: complex, order: int) -> Jet:
    """Jet in ``u`` of the Kronecker function (or degeneration) at ``(u, x)``."""
    u = complex(u)
    x = complex(x)
    tu = jet_lift(u, order)
    if isinstance(kind, Elliptic):
        tp = kind.tp
        d0 = theta1_prime0(tp)
        num = theta1(tu + x, tp)
        den_u = theta1(tu, tp)
        den_x = theta1(x, tp).value
        _check(den_u.value, abs(d0), "theta1(u)", u)
        _check(den_x, abs(d0), "theta1(x)", x)
        return num * (d0 / den_x) / den_u
    if isinstance(kind, Trigonometric):
        su = jet_sin(tu)
        _check(su.value, 1.0, "sin(u)", u)
        sx = cmath.sin(x)
        _check(sx, 1.0, "sin(x)", x)
        return jet_cos(tu) / su + cmath.cos(x) / sx
    if isinstance(kind, Rational):
        _check(u, 1.0, "u", u)
        _check(x, 1.0, "x", x)
        return 1.0 / tu + 1.0 / x
    raise TypeError(f"unknown Kronecker kind {kind!r}")


def sigma(kind: KroneckerKind, u: complex, x: complex) -> complex:
    return sigma_jet(kind, u, x, 0).value


def sigma_derivatives(kind: KroneckerKind, u: complex, x: complex, order: int) -> list[complex]:
    """``[sigma, d sigma/du, ..., d^order sigma/du^order]`` (plain derivatives)."""
    j = sigma_jet(kind, u, x, order)
    return [plain_derivative_from_jet(j, k) for k in range(order + 1)]


def fay_residual(kind: KroneckerKind, u: complex, v: complex, x: complex, y: complex) -> complex:
    s = lambda a, b: sigma(kind, a, b)  # noqa: E731
    lhs = s(u, x) * s(u + v, y)
    rhs = s(u + v, x + y) * s(-v, x) + s(v, y) * s(u, x + y)
    return lhs - rhs


def sigma_derivative_identity_residual(tp: TorusParam, u: complex, v: complex, x: complex, y: complex) -> complex:
    """LHS - RHS of the quadratic identity for ``sigma'`` and ``sigma''`` (plain ``d/du``).

    ``s'(u,x+y) s'(v,y) - s'(u,x) s'(u+v,y) - s'(-v,x) s'(u+v,x+y)
    = s(u,x) s''(u+v,y) - s(-v,x) s''(u+v,x+y)``
    """
    kind = Elliptic(tp)
    d = lambda a, b: sigma_derivatives(kind, a, b, 2)  # noqa: E731
    s_u_xy = d(u, x + y)
    s_v_y = d(v, y)
    s_u_x = d(u, x)
    s_uv_y = d(u + v, y)
    s_mv_x = d(-v, x)
    s_uv_xy = d(u + v, x + y)
    lhs = s_u_xy[1] * s_v_y[1] - s_u_x[1] * s_uv_y[1] - s_mv_x[1] * s_uv_xy[1]
    rhs = s_u_x[0] * s_uv_y[2] - s_mv_x[0] * s_uv_xy[2]
    return lhs - rhs


def fay_relative_residual(kind: KroneckerKind, u, v, x, y) -> float:
    """``|LHS - RHS|`` over the largest of the three products."""
    s = lambda a, b: sigma(kind, a, b)  # noqa: E731
    terms = [s(u, x) * s(u + v, y), s(u + v, x + y) * s(-v, x), s(v, y) * s(u, x + y)]
    return abs(terms[0] - terms[1] - terms[2]) / max(abs(t) for t in terms)


def sigma_derivative_identity_relative(tp: TorusParam, u, v, x, y) -> float:
    """Relative form of :func:`sigma_derivative_identity_residual` (largest of the seven products)."""
    kind = Elliptic(tp)
    d = lambda a, b: sigma_derivatives(kind, a, b, 2)  # noqa: E731
    s_u_xy, s_v_y, s_u_x = d(u, x + y), d(v, y), d(u, x)
    s_uv_y, s_mv_x, s_uv_xy = d(u + v, y), d(-v, x), d(u + v, x + y)
    terms = [
        s_u_xy[1] * s_v_y[1],
        -s_u_x[1] * s_uv_y[1],
        -s_mv_x[1] * s_uv_xy[1],
        -s_u_x[0] * s_uv_y[2],
        s_mv_x[0] * s_uv_xy[2],
    ]
    return abs(sum(terms)) / max(abs(t) for t in terms)
