"""Direct construction of ``r_B`` from the space of twisted-periodic matrix functions.

For ``v`` and a base point ``y1``,

    Sol = { Phi holomorphic : Phi(z+1) = Phi(z),  Phi(z+tau) B = e(z) B Phi(z) },
    e(z) = -exp(-2 pi i (z + v - y1 + tau)),

has dimension ``n^2``.  With ``res(Phi) = Phi(y1)`` and
``ev(Phi) = Phi(y1 + y) / theta3(y + (tau+1)/2)`` the tensor ``r_B(v, y)`` is
``can^-1(ev o res^-1)``.  That tensor equals the closed forms divided by
``c = i theta1'(0) exp(-pi i tau/4)``; :func:`r_from_solspace` multiplies by
``c`` so the two are directly comparable.

Every element is stored as grids of coefficients against derivatives of
shifted theta3 functions,

    Phi(z) = sum_shift sum_r C_shift[:, :, r] nabla^r theta3(z + v - y1 + (tau+1)/2 - shift),

so evaluation, membership checks and linear combinations share one form.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .bspec import BSpec, jordan_block
from .numeric import jet_lift, linear_solve, nabla_values
from .nabla import N_power
from .tensors import MatTensor, from_linear_map
from .theta import TorusParam, theta1_prime0, theta3, theta3_value


def normalization_constant(tp: TorusParam) -> complex:
    """``c = i theta1'(0) exp(-pi i tau / 4)``; closed form = ``c`` x Sol-space tensor."""
    return 1j * theta1_prime0(tp) * cmath.exp(-1j * math.pi * tp.tau / 4)


def e_factor(z: complex, v: complex, tp: TorusParam, y1: complex = 0.0) -> complex:
    return -cmath.exp(-2j * math.pi * (z + v - y1 + tp.tau))


class SolElement:
    """A matrix function in ``Sol_{B, v, y1, tau}`` (see module docstring)."""

    __slots__ = ("n", "v", "y1", "tp", "terms")

    def __init__(self, n: int, v: complex, tp: TorusParam, terms: dict[complex, np.ndarray], y1: complex = 0.0):
        self.n = n
        self.v = complex(v)
        self.y1 = complex(y1)
        self.tp = tp
        clean = {}
        for shift, C in terms.items():
            C = np.asarray(C, dtype=complex)
            if C.ndim != 3 or C.shape[:2] != (n, n):
                raise ValueError("coefficient grids must have shape (n, n, R)")
            clean[complex(shift)] = C
        self.terms = clean

    def _compatible(self, other: "SolElement") -> None:
        if (self.n, self.v, self.y1, self.tp) != (other.n, other.v, other.y1, other.tp):
            raise ValueError("Sol elements live in different spaces")

    def __add__(self, other: "SolElement") -> "SolElement":
        self._compatible(other)
        out = dict(self.terms)
        for shift, C in other.terms.items():
            if shift in out:
                A = out[shift]
                R = max(A.shape[2], C.shape[2])
                acc = np.zeros((self.n, self.n, R), dtype=complex)
                acc[:, :, : A.shape[2]] += A
                acc[:, :, : C.shape[2]] += C
                out[shift] = acc
            else:
                out[shift] = C
        return SolElement(self.n, self.v, self.tp, out, self.y1)

    def __mul__(self, scalar: complex) -> "SolElement":
        return SolElement(self.n, self.v, self.tp, {s: C * scalar for s, C in self.terms.items()}, self.y1)

    __rmul__ = __mul__

    def sandwich(self, L: np.ndarray, R: np.ndarray) -> "SolElement":
        """``z -> L Phi(z) R``."""
        return SolElement(
            self.n, self.v, self.tp, {s: np.einsum("ij,jkr,kl->ilr", L, C, R) for s, C in self.terms.items()}, self.y1
        )

    def conjugated(self, S: np.ndarray) -> "SolElement":
        """``S^-1 Phi S``: maps ``Sol_B`` onto ``Sol_{S^-1 B S}``."""
        S = np.asarray(S, dtype=complex)
        return self.sandwich(np.linalg.inv(S), S)

    def __call__(self, z: complex) -> np.ndarray:
        base = self.v - self.y1 + self.tp.half_period
        out = np.zeros((self.n, self.n), dtype=complex)
        for shift, C in self.terms.items():
            R = C.shape[2]
            vals = nabla_values(theta3(jet_lift(z + base - shift, R - 1), self.tp))
            out += C @ vals
        return out


def membership_residual(phi: SolElement, B: np.ndarray, z: complex) -> float:
    """Relative defect of both functional equations at ``z``."""
    B = np.asarray(B, dtype=complex)
    tp = phi.tp
    p0 = phi(z)
    scale0 = max(np.max(np.abs(p0)), 1e-300)
    periodic = np.max(np.abs(phi(z + 1) - p0)) / scale0
    lhs = phi(z + tp.tau) @ B
    rhs = e_factor(z, phi.v, tp, phi.y1) * (B @ p0)
    scale = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1e-300)
    return float(max(periodic, np.max(np.abs(lhs - rhs)) / scale))


# bases


def sol_generator_U(n: int, v: complex, tp: TorusParam, y1: complex = 0.0) -> SolElement:
    """``U_{k,l} = e^t_{n(k-1)+l} exp(nabla N) theta3_v e_{n(n-1)+1}``."""
    R = 2 * n - 1
    C = np.zeros((n, n, R), dtype=complex)
    col = n * (n - 1)
    for r in range(R):
        P = N_power(n, r)
        f = math.factorial(r)
        for k in range(n):
            for l in range(n):
                C[k, l, r] = complex(P[n * k + l, col]) / f
    return SolElement(n, v, tp, {0j: C}, y1)


def sol_basis_jordan(n: int, v: complex, tp: TorusParam, y1: complex = 0.0) -> dict[tuple[int, int], SolElement]:
    """``F_{ij} = K^(n-i) U K^(j-1)`` keyed by 1-based ``(i, j)``; ``K = J_n(0)``."""
    U = sol_generator_U(n, v, tp, y1)
    K = np.eye(n, k=1)
    out = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            out[i, j] = U.sandwich(np.linalg.matrix_power(K, n - i), np.linalg.matrix_power(K, j - 1))
    return out


def sol_basis_diagonal(lambdas, v: complex, tp: TorusParam, y1: complex = 0.0) -> dict[tuple[int, int], SolElement]:
    """``E_{kl} theta3(z + v + (tau+1)/2 - lambda_kl)`` keyed by 1-based ``(k, l)``."""
    lambdas = [complex(x) for x in lambdas]
    n = len(lambdas)
    out = {}
    for k in range(n):
        for l in range(n):
            C = np.zeros((n, n, 1), dtype=complex)
            C[k, l, 0] = 1.0
            out[k + 1, l + 1] = SolElement(n, v, tp, {lambdas[k] - lambdas[l]: C}, y1)
    return out


def unipotent_log(U: np.ndarray) -> np.ndarray:
    """``log U`` for unipotent ``U`` (finite series in ``U - 1``)."""
    m = U.shape[0]
    X = U - np.eye(m)
    out = np.zeros_like(X, dtype=complex)
    P = np.eye(m, dtype=complex)
    for k in range(1, m + 1):
        P = P @ X
        if not np.any(P):
            break
        out += (-1) ** (k + 1) * P / k
    return out


def pair_generators(Jp: np.ndarray, Jq: np.ndarray, lam_pq: complex) -> np.ndarray:
    """Coefficients ``G[t, s, r]`` with ``vec Phi_s = sum_r G[:, s, r] nabla^r g``.

    Solutions of ``Phi(z+tau) Jq = e(z) Jp Phi(z)`` for single-eigenvalue blocks
    with ``eig(Jp) / eig(Jq) = exp(2 pi i lam_pq)``: writing
    ``Jp (x) Jq^-T = exp(2 pi i lam_pq) exp(M)`` with nilpotent ``M``, the
    functions ``exp(nabla M) g(z) u`` with ``g(z) = theta3(z + v - y1 + (tau+1)/2 - lam_pq)``
    span the space.  ``vec`` is row-major.
    """
    mp, mq = Jp.shape[0], Jq.shape[0]
    K = np.kron(Jp, np.linalg.inv(Jq).T)
    ratio = cmath.exp(2j * math.pi * lam_pq)
    M = unipotent_log(K / ratio)
    size = mp * mq
    R = mp + mq - 1
    G = np.zeros((size, size, R), dtype=complex)
    P = np.eye(size, dtype=complex)
    for r in range(R):
        G[:, :, r] = P / math.factorial(r)
        P = P @ M
    return G


def sol_basis_spec(spec: BSpec, v: complex, tp: TorusParam, y1: complex = 0.0) -> list[SolElement]:
    """A basis of ``Sol_B`` for ``B = S^-1 J S`` assembled block pair by block pair."""
    n = spec.n
    mats = [jordan_block(size, cmath.exp(2j * math.pi * lam)) for lam, size in spec.blocks]
    offs = spec.offsets
    basis = []
    for p, (lam_p, mp) in enumerate(spec.blocks):
        for q, (lam_q, mq) in enumerate(spec.blocks):
            lam_pq = lam_p - lam_q
            G = pair_generators(mats[p], mats[q], lam_pq)
            for s in range(mp * mq):
                C = np.zeros((n, n, G.shape[2]), dtype=complex)
                C[offs[p] : offs[p] + mp, offs[q] : offs[q] + mq, :] = G[:, s, :].reshape(mp, mq, -1)
                basis.append(SolElement(n, v, tp, {lam_pq: C}, y1))
    if spec.is_identity_conjugator:
        return basis
    return [phi.conjugated(spec.S) for phi in basis]


# res / ev


def _vec(M: np.ndarray) -> np.ndarray:
    return M.reshape(-1)


def res0_matrix(basis, y1: complex | None = None) -> np.ndarray:
    """Columns ``vec Phi_s(y1)`` (row-major vec, ``y1`` defaults to the elements' base point)."""
    basis = list(basis.values()) if isinstance(basis, dict) else list(basis)
    y1 = basis[0].y1 if y1 is None else y1
    return np.stack([_vec(phi(y1)) for phi in basis], axis=1)


def ev_y_matrix(basis, y: complex, tp: TorusParam) -> np.ndarray:
    """Columns ``vec Phi_s(y1 + y) / theta3(y + (tau+1)/2)``."""
    basis = list(basis.values()) if isinstance(basis, dict) else list(basis)
    y1 = basis[0].y1
    norm = theta3_value(y + tp.half_period, tp)
    if abs(norm) < 1e-12:
        from .kronecker import SingularInput

        raise SingularInput(f"evaluation normalization vanishes at y = {y}", y)
    return np.stack([_vec(phi(y1 + y)) for phi in basis], axis=1) / norm


def _basis_for(source, v: complex, tp: TorusParam, y1: complex):
    if isinstance(source, (int, np.integer)):
        return list(sol_basis_jordan(int(source), v, tp, y1).values())
    if isinstance(source, BSpec):
        return sol_basis_spec(source, v, tp, y1)
    if isinstance(source, np.ndarray):
        return sol_basis_spec(BSpec.from_matrix(source), v, tp, y1)
    raise TypeError(f"cannot build a Sol basis from {type(source).__name__}")


def linear_map_from_basis(basis, y: complex, tp: TorusParam) -> np.ndarray:
    """``ev_y o res^-1`` in the row-major basis of Mat_n (unnormalized)."""
    R = res0_matrix(basis)
    E = ev_y_matrix(basis, y, tp)
    # E R^-1 = (R^-T E^T)^T
    return linear_solve(R.T, E.T).T


def r_from_solspace(source, v: complex, y: complex, tp: TorusParam, y1: complex = 0.0) -> MatTensor:
    """``c * can^-1(ev_y o res0^-1)``; ``source`` is a Jordan size, a BSpec, a matrix or a basis."""
    if isinstance(source, (list, tuple, dict)):
        basis = list(source.values()) if isinstance(source, dict) else list(source)
    else:
        basis = _basis_for(source, v, tp, y1)
    n = basis[0].n
    return from_linear_map(linear_map_from_basis(basis, y, tp), n) * normalization_constant(tp)


def pair_block_map(mp: int, mq: int, lam_pq: complex, v: complex, y: complex, tp: TorusParam) -> np.ndarray:
    """Normalized ``ev o res^-1`` on an ``(mp x mq)`` block pair ``mu_p J_mp(1)``, ``mu_q J_mq(1)``.

    Only ``mu_p / mu_q = exp(2 pi i lam_pq)`` matters.  Returns the local matrix in the
    row-major basis of ``mp x mq`` matrices, already multiplied by ``c``.
    """
    ratio = cmath.exp(2j * math.pi * lam_pq)
    G = pair_generators(ratio * jordan_block(mp, 1.0), jordan_block(mq, 1.0), lam_pq)
    basis = []
    for s in range(mp * mq):
        # embed the rectangular block in a square carrier of size max(mp, mq)
        m = max(mp, mq)
        C = np.zeros((m, m, G.shape[2]), dtype=complex)
        C[:mp, :mq, :] = G[:, s, :].reshape(mp, mq, -1)
        basis.append(SolElement(m, v, tp, {lam_pq: C}))
    R = np.stack([phi(0.0)[:mp, :mq].reshape(-1) for phi in basis], axis=1)
    norm = theta3_value(y + tp.half_period, tp)
    E = np.stack([phi(y)[:mp, :mq].reshape(-1) for phi in basis], axis=1) / norm
    return linear_solve(R.T, E.T).T * normalization_constant(tp)


# path-combinatorial inverse of res0 (Jordan block only)


def _sw_paths(start: tuple[int, int], end: tuple[int, int]):
    """Chains ``start = (a0, b0), ..., end`` with ``a`` non-decreasing, ``b`` non-increasing, no repeats."""
    if start == end:
        yield (start,)
        return
    a0, b0 = start
    a1, b1 = end
    for a in range(a0, a1 + 1):
        for b in range(b0, b1 - 1, -1):
            if (a, b) == start:
                continue
            for tail in _sw_paths((a, b), end):
                yield (start,) + tail


def res0_inverse_paths(n: int, a: int, b: int, v: complex, tp: TorusParam) -> SolElement:
    """``gamma^{a,b}`` with ``res0(gamma^{a,b}) = e_{a,b}`` from explicit path sums (1-based ``a, b``)."""
    if not (1 <= a <= n and 1 <= b <= n):
        raise IndexError("a, b must lie in 1..n")
    F = sol_basis_jordan(n, v, tp)
    F0 = {key: phi(0.0) for key, phi in F.items()}
    t0 = theta3_value(v + tp.half_period, tp)
    gamma = None
    for p in range(1, a + 1):
        for q in range(b, n + 1):
            eta = 0j
            for path in _sw_paths((p, q), (a, b)):
                chi = len(path) - 1
                w = (-1) ** chi / t0 ** (chi + 1)
                for s in range(chi):
                    (al, be), (al1, be1) = path[s], path[s + 1]
                    w *= F0[al1, be1][al - 1, be - 1]
                eta += w
            term = F[p, q] * eta
            gamma = term if gamma is None else gamma + term
    return gamma


def count_sw_paths(start: tuple[int, int], end: tuple[int, int]) -> int:
    return sum(1 for _ in _sw_paths(start, end))


__all__ = [
    "SolElement",
    "count_sw_paths",
    "e_factor",
    "ev_y_matrix",
    "linear_map_from_basis",
    "membership_residual",
    "normalization_constant",
    "pair_block_map",
    "pair_generators",
    "r_from_solspace",
    "res0_inverse_paths",
    "res0_matrix",
    "sol_basis_diagonal",
    "sol_basis_jordan",
    "sol_basis_spec",
    "sol_generator_U",
    "unipotent_log",
]

