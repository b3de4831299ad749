"""Mat_n(C) (x) Mat_n(C), its embeddings into the triple product, and the map ``can``.

A :class:`MatTensor` stores the coefficient of ``e_{a,b} (x) e_{c,d}`` at
``coeff[a, b, c, d]`` (zero-based), i.e. a flat row-major ``n^4`` layout.
Triple tensors are plain ``(n^3, n^3)`` complex arrays acting on
``(C^n)^{(x)3}`` with ``kron`` ordering (factor 1 most significant).
"""

from __future__ import annotations

import numpy as np


class MatTensor:
    __slots__ = ("n", "coeff")

    def __init__(self, coeff: np.ndarray):
        c = np.array(coeff, dtype=complex)
        if c.ndim != 4 or len(set(c.shape)) != 1:
            raise ValueError(f"MatTensor needs an (n, n, n, n) array, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("MatTensor coefficients must be finite")
        c.setflags(write=False)
        self.n = c.shape[0]
        self.coeff = c

    @classmethod
    def zeros(cls, n: int) -> "MatTensor":
        return cls(np.zeros((n, n, n, n), dtype=complex))

    @classmethod
    def simple(cls, X: np.ndarray, Y: np.ndarray) -> "MatTensor":
        """The simple tensor ``X (x) Y``."""
        return cls(np.einsum("ab,cd->abcd", np.asarray(X, complex), np.asarray(Y, complex)))

    @classmethod
    def unit(cls, n: int, a: int, b: int, c: int, d: int, value: complex = 1.0) -> "MatTensor":
        arr = np.zeros((n, n, n, n), dtype=complex)
        arr[a, b, c, d] = value
        return cls(arr)

    def __repr__(self) -> str:
        return f"MatTensor(n={self.n}, nnz={int(np.count_nonzero(self.coeff))})"

    def __add__(self, other: "MatTensor") -> "MatTensor":
        _check_n(self, other)
        return MatTensor(self.coeff + other.coeff)

    def __sub__(self, other: "MatTensor") -> "MatTensor":
        _check_n(self, other)
        return MatTensor(self.coeff - other.coeff)

    def __neg__(self) -> "MatTensor":
        return MatTensor(-self.coeff)

    def __mul__(self, scalar: complex) -> "MatTensor":
        return MatTensor(self.coeff * complex(scalar))

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeff))) if self.coeff.size else 0.0

    def gauge(self, S: np.ndarray) -> "MatTensor":
        """``(S^-1 (x) S^-1) t (S (x) S)``."""
        S = np.asarray(S, dtype=complex)
        Si = np.linalg.inv(S)
        return MatTensor(np.einsum("ia,abcd,bj,kc,dl->ijkl", Si, self.coeff, S, Si, S, optimize=True))

    def to_records(self) -> list[dict]:
        """Lexicographically sorted ``{a, b, c, d, re, im}`` records with 1-based indices."""
        n = self.n
        out = []
        for idx in np.ndindex(n, n, n, n):
            z = self.coeff[idx]
            out.append(
                {"a": idx[0] + 1, "b": idx[1] + 1, "c": idx[2] + 1, "d": idx[3] + 1, "re": float(z.real), "im": float(z.imag)}
            )
        return out

    @classmethod
    def from_records(cls, records: list[dict], n: int | None = None) -> "MatTensor":
        if n is None:
            n = max(max(r["a"], r["b"], r["c"], r["d"]) for r in records)
        arr = np.zeros((n, n, n, n), dtype=complex)
        for r in records:
            arr[r["a"] - 1, r["b"] - 1, r["c"] - 1, r["d"] - 1] = complex(r["re"], r["im"])
        return cls(arr)


def _check_n(a: MatTensor, b: MatTensor) -> None:
    if a.n != b.n:
        raise ValueError(f"tensor size mismatch: n={a.n} vs n={b.n}")


def identity_tensor(n: int) -> MatTensor:
    """``sum_{a,b} e_{a,b} (x) e_{b,a}``; ``can`` sends it to the identity of Mat_n."""
    arr = np.zeros((n, n, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            arr[a, b, b, a] = 1.0
    return MatTensor(arr)


def one_one(n: int) -> MatTensor:
    """``1 (x) 1``."""
    I = np.eye(n)
    return MatTensor.simple(I, I)


def flip(t: MatTensor) -> MatTensor:
    """``rho(X (x) Y) = Y (x) X``."""
    return MatTensor(t.coeff.transpose(2, 3, 0, 1))


def _pair_operator(t: MatTensor) -> np.ndarray:
    n = t.n
    return t.coeff.transpose(0, 2, 1, 3).reshape(n * n, n * n)


def embed(t: MatTensor, slot: int | str) -> np.ndarray:
    """Image of ``t`` under ``rho_12``, ``rho_13`` or ``rho_23`` as an ``(n^3, n^3)`` operator."""
    slot = str(slot)
    n = t.n
    I = np.eye(n)
    if slot == "12":
        return np.kron(_pair_operator(t), I)
    if slot == "23":
        return np.kron(I, _pair_operator(t))
    if slot == "13":
        op = np.einsum("abcd,jk->ajcbkd", t.coeff, I)
        return op.reshape(n**3, n**3)
    raise ValueError(f"slot must be one of 12, 13, 23; got {slot!r}")


def triple_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ValueError(f"triple tensor shape mismatch: {a.shape} vs {b.shape}")
    return a @ b


def triple_sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ValueError(f"triple tensor shape mismatch: {a.shape} vs {b.shape}")
    return a - b


def triple_norm(a: np.ndarray) -> float:
    """Entrywise max modulus."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def to_linear_map(t: MatTensor) -> np.ndarray:
    """Matrix of ``Z -> sum Tr(X Z) Y`` in the row-major basis ``{e_ab}`` of Mat_n.

    Entry ``[(c,d), (a,b)]`` is the coefficient of ``e_{b,a} (x) e_{c,d}``.
    """
    n = t.n
    return t.coeff.transpose(2, 3, 1, 0).reshape(n * n, n * n)


def from_linear_map(m: np.ndarray, n: int | None = None) -> MatTensor:
    """Inverse of :func:`to_linear_map`."""
    m = np.asarray(m, dtype=complex)
    if n is None:
        n = int(round(np.sqrt(m.shape[0])))
    if m.shape != (n * n, n * n):
        raise ValueError(f"expected an ({n*n}, {n*n}) matrix, got {m.shape}")
    return MatTensor(m.reshape(n, n, n, n).transpose(3, 2, 0, 1))


def nondegenerate(t: MatTensor, tol: float) -> bool:
    return abs(np.linalg.det(to_linear_map(t))) > tol
