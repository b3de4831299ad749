"""Input matrices ``B`` given as a conjugator and Jordan data, plus the singular set.

A :class:`BSpec` with conjugator ``S`` and blocks ``(lambda_p, m_p)`` denotes

    B = S^-1 J S,   J = J_{m_1}(exp(2 pi i lambda_1)) (+) ... (+) J_{m_t}(exp(2 pi i lambda_t)),

so that ``r_B = (S^-1 (x) S^-1) r_J (S (x) S)``.

JSON form::

    {"n": 3, "S": [[{"re": 1, "im": 0}, ...], ...],
     "blocks": [{"lambda": {"re": 0.0, "im": 0.0}, "size": 2}, ...]}

``S`` is optional and defaults to the identity.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .theta import TorusParam

S_COND_LIMIT = 1e8
EIGEN_GAP = 1e-6


class BSpecError(ValueError):
    """Malformed or unusable matrix specification."""


def jordan_block(size: int, mu: complex) -> np.ndarray:
    return mu * np.eye(size, dtype=complex) + np.eye(size, k=1, dtype=complex)


def complex_to_json(z: complex) -> dict:
    z = complex(z)
    return {"re": float(z.real), "im": float(z.imag)}


def complex_from_json(obj) -> complex:
    if isinstance(obj, dict):
        try:
            return complex(float(obj["re"]), float(obj.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise BSpecError(f"bad complex number {obj!r}") from exc
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    raise BSpecError(f"complex numbers must be {{'re': .., 'im': ..}} objects, got {obj!r}")


def log_eigenvalue(mu: complex) -> complex:
    """``lambda = log(mu) / (2 pi i)`` on the branch ``Re(lambda) in [0, 1)``."""
    if mu == 0:
        raise BSpecError("B must be invertible (zero eigenvalue)")
    lam = cmath.log(mu) / (2j * math.pi)
    re = lam.real - math.floor(lam.real)
    if re >= 1.0:
        re -= 1.0
    return complex(re, lam.imag)


@dataclass(frozen=True)
class BSpec:
    n: int
    blocks: tuple[tuple[complex, int], ...]
    S: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        blocks = tuple((complex(lam), int(size)) for lam, size in self.blocks)
        if not blocks:
            raise BSpecError("at least one Jordan block is required")
        if any(size < 1 for _, size in blocks):
            raise BSpecError("block sizes must be positive")
        if sum(size for _, size in blocks) != self.n:
            raise BSpecError(f"block sizes sum to {sum(s for _, s in blocks)}, expected n = {self.n}")
        object.__setattr__(self, "blocks", blocks)
        S = np.eye(self.n, dtype=complex) if self.S is None else np.array(self.S, dtype=complex)
        if S.shape != (self.n, self.n):
            raise BSpecError(f"conjugator must be {self.n}x{self.n}, got {S.shape}")
        cond = np.linalg.cond(S)
        if not np.isfinite(cond) or cond > S_COND_LIMIT:
            raise BSpecError(f"conjugator is singular or ill-conditioned (cond = {cond:.3g})")
        S.setflags(write=False)
        object.__setattr__(self, "S", S)

    # constructors

    @classmethod
    def jordan(cls, n: int, lam: complex = 0.0) -> "BSpec":
        return cls(n, ((lam, n),))

    @classmethod
    def diagonal(cls, lambdas) -> "BSpec":
        lambdas = [complex(x) for x in lambdas]
        return cls(len(lambdas), tuple((lam, 1) for lam in lambdas))

    @classmethod
    def from_matrix(cls, B: np.ndarray, gap: float = EIGEN_GAP) -> "BSpec":
        """Diagonalize ``B`` when its eigenvalues are separated by more than ``gap``.

        Jordan structure is never guessed: a matrix with clustered eigenvalues
        is rejected and must be given as explicit Jordan data.
        """
        B = np.asarray(B, dtype=complex)
        n = B.shape[0]
        mu, P = np.linalg.eig(B)
        for i in range(n):
            for j in range(i):
                if abs(mu[i] - mu[j]) <= gap:
                    raise BSpecError("eigenvalues closer than the gap; pass Jordan data explicitly")
        # B = P D P^-1 = S^-1 D S with S = P^-1
        return cls(n, tuple((log_eigenvalue(m), 1) for m in mu), np.linalg.inv(P))

    def with_conjugator(self, S: np.ndarray) -> "BSpec":
        """Spec of ``S^-1 B S``."""
        return BSpec(self.n, self.blocks, self.S @ np.asarray(S, dtype=complex))

    # derived data

    @property
    def is_identity_conjugator(self) -> bool:
        return bool(np.array_equal(self.S, np.eye(self.n)))

    @property
    def offsets(self) -> list[int]:
        out, acc = [], 0
        for _, size in self.blocks:
            out.append(acc)
            acc += size
        return out

    def jordan_matrix(self) -> np.ndarray:
        J = np.zeros((self.n, self.n), dtype=complex)
        for (lam, size), off in zip(self.blocks, self.offsets):
            J[off : off + size, off : off + size] = jordan_block(size, cmath.exp(2j * math.pi * lam))
        return J

    def matrix(self) -> np.ndarray:
        return np.linalg.solve(self.S, self.jordan_matrix() @ self.S)

    def singular_set(self, tp: TorusParam) -> "SigmaLattice":
        lams = [lam for lam, _ in self.blocks]
        reps = sorted({lp - lq for lp in lams for lq in lams}, key=lambda z: (z.real, z.imag))
        return SigmaLattice(tuple(reps), tp.tau)

    # serialization

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "S": [[complex_to_json(z) for z in row] for row in self.S],
            "blocks": [{"lambda": complex_to_json(lam), "size": size} for lam, size in self.blocks],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BSpec":
        if not isinstance(obj, dict):
            raise BSpecError("BSpec JSON must be an object")
        unknown = set(obj) - {"n", "S", "blocks"}
        if unknown:
            raise BSpecError(f"unknown BSpec fields: {sorted(unknown)}")
        try:
            n = obj["n"]
            blocks_raw = obj["blocks"]
        except KeyError as exc:
            raise BSpecError(f"missing BSpec field {exc}") from exc
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise BSpecError("'n' must be a positive integer")
        if not isinstance(blocks_raw, list):
            raise BSpecError("'blocks' must be a list")
        blocks = []
        for b in blocks_raw:
            if not isinstance(b, dict) or "lambda" not in b or "size" not in b:
                raise BSpecError(f"bad block {b!r}")
            size = b["size"]
            if not isinstance(size, int) or isinstance(size, bool):
                raise BSpecError(f"block size must be an integer, got {size!r}")
            blocks.append((complex_from_json(b["lambda"]), size))
        S = None
        if obj.get("S") is not None:
            rows = obj["S"]
            if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
                raise BSpecError("'S' must be a list of rows")
            S = np.array([[complex_from_json(z) for z in row] for row in rows], dtype=complex)
        return cls(n, tuple(blocks), S)

    @classmethod
    def load(cls, path: str | Path) -> "BSpec":
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise BSpecError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_json(obj)


@dataclass(frozen=True)
class SigmaLattice:
    """``Sigma_B = {lambda - lambda'} + Lambda``, kept as representatives plus ``tau``."""

    reps: tuple[complex, ...]
    tau: complex

    def distance(self, z: complex) -> float:
        """Distance from ``z`` to the set, in the flat lattice metric."""
        return min(lattice_distance(complex(z) - r, self.tau) for r in self.reps)


def lattice_distance(z: complex, tau: complex) -> float:
    """Distance from ``z`` to ``Z + tau Z``."""
    b = z.imag / tau.imag
    a = (z - b * tau).real
    a -= round(a)
    b -= round(b)
    return min(abs((a + da) + (b + db) * tau) for da in (-1, 0, 1) for db in (-1, 0, 1))
