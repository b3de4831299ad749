"""Closed-form elliptic solutions ``r_B(v, y)``.

The global constant ``exp(pi i tau/4) / (i theta1'(0))`` is dropped; it does not
affect any of the quadratic identities.  Sol-space output must be multiplied by
``c`` (see :func:`aybe.solspace.normalization_constant`) to compare.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .bspec import BSpec
from .kronecker import Elliptic, sigma, sigma_jet
from .nabla import symbolic_table
from .numeric import nabla_values
from .solspace import pair_block_map
from .tensors import MatTensor
from .theta import TorusParam


def r_diagonal(lambdas, v: complex, y: complex, tp: TorusParam) -> MatTensor:
    """``sum_{k,l} sigma(v - lambda_kl, y) e_{l,k} (x) e_{k,l}``."""
    lambdas = [complex(x) for x in lambdas]
    n = len(lambdas)
    kind = Elliptic(tp)
    arr = np.zeros((n, n, n, n), dtype=complex)
    for k in range(n):
        for l in range(n):
            arr[l, k, k, l] = sigma(kind, v - (lambdas[k] - lambdas[l]), y)
    return MatTensor(arr)


def jordan_coefficients(n: int, v: complex, y: complex, tp: TorusParam) -> dict[tuple[int, int], complex]:
    """``nabla_{k,l} sigma(v, y)`` for ``0 <= k, l < n``."""
    jet = sigma_jet(Elliptic(tp), v, y, 2 * n - 2)
    nab = nabla_values(jet)
    out = {}
    for (k, l), poly in symbolic_table(n).items():
        out[k, l] = complex(sum(float(c) * nab[r] for r, c in enumerate(poly.coeffs)))
    return out


def r_jordan(n: int, v: complex, y: complex, tp: TorusParam) -> MatTensor:
    """``sum_{k,l} nabla_{k,l} sigma(v,y) sum_{i<=n-l, j<=n-k} e_{i,j+k} (x) e_{j,i+l}``."""
    coef = jordan_coefficients(n, v, y, tp)
    arr = np.zeros((n, n, n, n), dtype=complex)
    for (k, l), value in coef.items():
        for i in range(n - l):
            for j in range(n - k):
                arr[i, j + k, j, i + l] += value
    return MatTensor(arr)


def _scaled_gauge(spec: BSpec) -> np.ndarray:
    """``S_g`` with ``J_m(mu) = S_g^-1 (mu J_m(1)) S_g`` blockwise, ``S_g = diag(mu^-i)``."""
    d = []
    for lam, size in spec.blocks:
        mu = cmath.exp(2j * math.pi * lam)
        d.extend(mu ** (-i) for i in range(size))
    return np.diag(np.array(d, dtype=complex))


def r_general(spec: BSpec, v: complex, y: complex, tp: TorusParam) -> MatTensor:
    """Solution for ``B = S^-1 J S`` assembled from block pairs, then gauged.

    Each pair of blocks ``(p, q)`` contributes the coefficients of
    ``e_{b,a} (x) e_{c,d}`` with ``a, c`` in block ``p`` and ``b, d`` in block
    ``q``.  Equal sizes use the Jordan closed form at ``v - lambda_pq``; unequal
    sizes use the Sol-space construction restricted to the pair.
    """
    n = spec.n
    sizes = [size for _, size in spec.blocks]
    if all(s == 1 for s in sizes) and spec.is_identity_conjugator:
        return r_diagonal([lam for lam, _ in spec.blocks], v, y, tp)
    offs = spec.offsets
    arr = np.zeros((n, n, n, n), dtype=complex)
    for p, (lam_p, mp) in enumerate(spec.blocks):
        for q, (lam_q, mq) in enumerate(spec.blocks):
            lam_pq = lam_p - lam_q
            if mp == mq:
                local = r_jordan(mp, v - lam_pq, y, tp).coeff
            else:
                M = pair_block_map(mp, mq, lam_pq, v, y, tp)
                # M[(c,d),(a,b)] on mp x mq matrices -> local[b, a, c, d]
                local = M.reshape(mp, mq, mp, mq).transpose(3, 2, 0, 1)
            sp = slice(offs[p], offs[p] + mp)
            sq = slice(offs[q], offs[q] + mq)
            arr[sq, sp, sp, sq] = local
    t = MatTensor(arr)
    S_total = _scaled_gauge(spec) @ spec.S
    if np.array_equal(S_total, np.eye(n)):
        return t
    return t.gauge(S_total)


def r_for(spec: BSpec, v: complex, y: complex, tp: TorusParam) -> MatTensor:
    """Dispatch to the most specific closed form."""
    if spec.is_identity_conjugator and len(spec.blocks) == 1 and spec.blocks[0][0] == 0:
        return r_jordan(spec.n, v, y, tp)
    return r_general(spec, v, y, tp)


__all__ = ["jordan_coefficients", "r_diagonal", "r_for", "r_general", "r_jordan"]

