"""Residuals of the identities satisfied by the constructed tensors, and a seeded suite runner.

Kronecker-function values grow exponentially across a fundamental domain, so
every identity residual is reported relative to its largest term::

    ||LHS - RHS|| / max(||term_1||, ..., ||term_k||)

with ``||.||`` the entrywise max modulus.  Pass ``relative=False`` for the raw
``||LHS - RHS||``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bspec import BSpec, SigmaLattice, complex_from_json, complex_to_json, lattice_distance
from .builder import r_diagonal, r_general, r_jordan
from .kronecker import SingularInput
from .numeric import SingularSystem
from .solspace import r_from_solspace
from .tensors import MatTensor, embed, flip, nondegenerate, to_linear_map, triple_norm
from .theta import TorusParam

RFun = Callable[[complex, complex], MatTensor]

MIN_EXCLUSION = 1e-3
NONDEGENERACY_TOL = 1e-8
IDENTITIES = ("aybe", "dual", "unitarity", "aybe4", "nondegeneracy")


def _ratio(diff: float, terms: list[float], relative: bool) -> float:
    if not relative:
        return diff
    scale = max(terms)
    return diff / scale if scale > 0 else diff


def aybe_residual(rfun: RFun, u, v, x, y, relative: bool = True) -> float:
    """``r12(u,x) r23(u+v,y) - r13(u+v,x+y) r12(-v,x) - r23(v,y) r13(u,x+y)``."""
    lhs = embed(rfun(u, x), 12) @ embed(rfun(u + v, y), 23)
    t1 = embed(rfun(u + v, x + y), 13) @ embed(rfun(-v, x), 12)
    t2 = embed(rfun(v, y), 23) @ embed(rfun(u, x + y), 13)
    return _ratio(triple_norm(lhs - t1 - t2), [triple_norm(lhs), triple_norm(t1), triple_norm(t2)], relative)


def dual_residual(rfun: RFun, u, v, x, y, relative: bool = True) -> float:
    """``r23(v,y) r12(u+v,x) - r12(u,x) r13(v,x+y) - r13(u+v,x+y) r23(-u,y)``."""
    lhs = embed(rfun(v, y), 23) @ embed(rfun(u + v, x), 12)
    t1 = embed(rfun(u, x), 12) @ embed(rfun(v, x + y), 13)
    t2 = embed(rfun(u + v, x + y), 13) @ embed(rfun(-u, y), 23)
    return _ratio(triple_norm(lhs - t1 - t2), [triple_norm(lhs), triple_norm(t1), triple_norm(t2)], relative)


def unitarity_residual(rfun: RFun, u, x, relative: bool = True) -> float:
    """``||r(-u,-x) + flip(r(u,x))||``."""
    a = rfun(-u, -x)
    b = flip(rfun(u, x))
    return _ratio((a + b).max_abs(), [a.max_abs(), b.max_abs()], relative)


def four_point(rfun: RFun) -> Callable[[complex, complex, complex, complex], MatTensor]:
    """``r(v_i, v_j; y_k, y_l) = r(v_i - v_j, y_l - y_k)``."""

    def r4(vi, vj, yk, yl):
        if yl == yk:
            raise SingularInput("coincident evaluation points", yk)
        return rfun(vi - vj, yl - yk)

    return r4


def aybe4_residual(rfun: RFun, v1, v2, v3, y1, y2, y3, relative: bool = True) -> float:
    r4 = four_point(rfun)
    lhs = embed(r4(v1, v2, y1, y2), 12) @ embed(r4(v1, v3, y2, y3), 23)
    t1 = embed(r4(v1, v3, y1, y3), 13) @ embed(r4(v3, v2, y1, y2), 12)
    t2 = embed(r4(v2, v3, y2, y3), 23) @ embed(r4(v1, v2, y1, y3), 13)
    return _ratio(triple_norm(lhs - t1 - t2), [triple_norm(lhs), triple_norm(t1), triple_norm(t2)], relative)


def gauge_residual(spec: BSpec, S: np.ndarray, v, y, tp: TorusParam, relative: bool = True) -> float:
    """``r_{S^-1 B S}`` from its own Sol space versus ``(S^-1 (x) S^-1) r_B (S (x) S)``."""
    S = np.asarray(S, dtype=complex)
    direct = r_from_solspace(spec.with_conjugator(S), v, y, tp)
    moved = r_from_solspace(spec, v, y, tp).gauge(S)
    return _ratio((direct - moved).max_abs(), [direct.max_abs(), moved.max_abs()], relative)


# sampling


@dataclass(frozen=True)
class SamplePlan:
    """Seeded uniform sampling over ``a + b tau``, ``(a, b)`` in ``box``.

    Points closer than ``exclusion_radius`` (never less than ``MIN_EXCLUSION``)
    to the relevant singular sets are rejected and counted.
    """

    count: int = 50
    seed: int = 0
    exclusion_radius: float = 1e-2
    box: tuple[tuple[float, float], tuple[float, float]] = ((0.05, 0.95), (0.05, 0.95))
    max_attempts: int = 200

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be non-negative")
        if not self.exclusion_radius > 0:
            raise ValueError("exclusion_radius must be positive")

    @property
    def effective_radius(self) -> float:
        return max(self.exclusion_radius, MIN_EXCLUSION)


# variables per identity; spectral combinations avoid Sigma_B, positional ones avoid Lambda
_ARITY = {"aybe": 4, "dual": 4, "unitarity": 2, "aybe4": 6, "nondegeneracy": 2, "pair": 2}


def _constraints(identity: str, p):
    if identity in ("aybe", "dual"):
        u, v, x, y = p
        return [u, v, u + v], [x, y, x + y]
    if identity in ("unitarity", "pair"):
        u, x = p
        return [u], [x]
    if identity == "nondegeneracy":
        v, y = p
        # sigma(v - lambda, y) vanishes on v + y in Sigma_B
        return [v, v + y], [y]
    if identity == "aybe4":
        v1, v2, v3, y1, y2, y3 = p
        return [v1 - v2, v1 - v3, v2 - v3], [y2 - y1, y3 - y2, y3 - y1]
    raise ValueError(f"unknown identity {identity!r}")


@dataclass
class Samples:
    points: list[tuple[complex, ...]]
    rejected: int
    exhausted: bool = False


def admissible(identity: str, p, sigma_set: SigmaLattice, tau: complex, radius: float) -> bool:
    spectral, positional = _constraints(identity, p)
    return all(sigma_set.distance(s) >= radius for s in spectral) and all(
        lattice_distance(complex(z), tau) >= radius for z in positional
    )


def draw_samples(plan: SamplePlan, identity: str, sigma_set: SigmaLattice, tau: complex) -> Samples:
    rng = np.random.default_rng(plan.seed)
    k = _ARITY[identity]
    (a0, a1), (b0, b1) = plan.box
    radius = plan.effective_radius
    points, rejected = [], 0
    attempts = 0
    while len(points) < plan.count:
        if attempts >= plan.max_attempts * max(plan.count, 1):
            return Samples(points, rejected, exhausted=True)
        attempts += 1
        a = rng.uniform(a0, a1, size=k)
        b = rng.uniform(b0, b1, size=k)
        p = tuple(complex(a[i]) + complex(b[i]) * tau for i in range(k))
        if admissible(identity, p, sigma_set, tau, radius):
            points.append(p)
        else:
            rejected += 1
    return Samples(points, rejected)


# configurations


def tolerance_for(n: int, identity: str = "") -> float:
    if identity == "gauge" or n >= 4:
        return 1e-8
    if n == 1:
        return 1e-10
    return 1e-9


@dataclass
class Config:
    """One solution family to verify.

    ``family`` is ``diagonal`` (``lambdas``), ``jordan`` (``n``) or ``general``
    (``spec``).  ``perturb`` adds ``delta`` to one 1-based coefficient of every
    tensor produced, which must make the identities fail.
    """

    name: str
    family: str
    tau: complex = 1j
    n: int | None = None
    lambdas: tuple[complex, ...] = ()
    spec: BSpec | None = None
    identities: tuple[str, ...] = ("aybe", "dual", "unitarity")
    tolerance: float | None = None
    perturb: dict | None = None
    trunc_eps: float = 1e-16
    tp: TorusParam = field(init=False, repr=False)

    def __post_init__(self):
        self.tp = TorusParam(complex(self.tau), trunc_eps=self.trunc_eps)
        if self.family == "diagonal":
            self.lambdas = tuple(complex(x) for x in self.lambdas)
            if not self.lambdas:
                raise ValueError(f"{self.name}: diagonal family needs lambdas")
            self.n = len(self.lambdas)
            self.spec = BSpec.diagonal(self.lambdas)
        elif self.family == "jordan":
            if not self.n or self.n < 1:
                raise ValueError(f"{self.name}: jordan family needs n >= 1")
            self.spec = BSpec.jordan(self.n)
        elif self.family == "general":
            if self.spec is None:
                raise ValueError(f"{self.name}: general family needs a spec")
            self.n = self.spec.n
        else:
            raise ValueError(f"{self.name}: unknown family {self.family!r}")
        bad = set(self.identities) - set(IDENTITIES)
        if bad:
            raise ValueError(f"{self.name}: unknown identities {sorted(bad)}")

    def rfun(self) -> RFun:
        tp = self.tp
        if self.family == "diagonal":
            base = lambda v, y: r_diagonal(self.lambdas, v, y, tp)  # noqa: E731
        elif self.family == "jordan":
            base = lambda v, y: r_jordan(self.n, v, y, tp)  # noqa: E731
        else:
            base = lambda v, y: r_general(self.spec, v, y, tp)  # noqa: E731
        if not self.perturb:
            return base
        idx = tuple(int(self.perturb[key]) - 1 for key in "abcd")
        delta = complex(self.perturb.get("delta", 1e-3))
        n = self.n

        def perturbed(v, y):
            t = base(v, y)
            return t + MatTensor.unit(n, *idx, value=delta)

        return perturbed

    def tol(self, identity: str) -> float:
        return self.tolerance if self.tolerance is not None else tolerance_for(self.n, identity)

    def describe(self) -> dict:
        out = {"name": self.name, "family": self.family, "n": self.n, "tau": complex_to_json(self.tau)}
        if self.family == "diagonal":
            out["lambdas"] = [complex_to_json(x) for x in self.lambdas]
        if self.family == "general":
            out["spec"] = self.spec.to_json()
        if self.perturb:
            out["perturb"] = self.perturb
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Config":
        known = {"name", "family", "tau", "n", "lambdas", "spec", "identities", "tolerance", "perturb", "trunc_eps"}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kw = dict(obj)
        if "tau" in kw:
            kw["tau"] = complex_from_json(kw["tau"])
        if "lambdas" in kw:
            kw["lambdas"] = tuple(complex_from_json(x) for x in kw["lambdas"])
        if "spec" in kw:
            kw["spec"] = BSpec.from_json(kw["spec"])
        if "identities" in kw:
            kw["identities"] = tuple(kw["identities"])
        kw.setdefault("name", f"{kw.get('family')}-{kw.get('n', len(kw.get('lambdas', ())))}")
        return cls(**kw)


def default_configs(tau: complex = 1j) -> list[Config]:
    return [
        Config("diagonal-1", "diagonal", tau, lambdas=(0,)),
        Config("diagonal-2", "diagonal", tau, lambdas=(0, 0.3)),
        Config("diagonal-3", "diagonal", tau, lambdas=(0, 0.3, 0.1 + 0.2j)),
        Config("jordan-1", "jordan", tau, n=1),
        Config("jordan-2", "jordan", tau, n=2),
        Config("jordan-3", "jordan", tau, n=3),
    ]


# running


def _evaluate(identity: str, rfun: RFun, p) -> float:
    if identity == "aybe":
        return aybe_residual(rfun, *p)
    if identity == "dual":
        return dual_residual(rfun, *p)
    if identity == "unitarity":
        return unitarity_residual(rfun, *p)
    if identity == "aybe4":
        return aybe4_residual(rfun, *p)
    if identity == "nondegeneracy":
        return abs(np.linalg.det(to_linear_map(rfun(*p))))
    raise ValueError(identity)


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass
class Report:
    plan: SamplePlan
    summaries: list[dict]
    rows: list[dict]

    @property
    def passed(self) -> bool:
        return all(s["passed"] for s in self.summaries)

    def failures(self) -> list[dict]:
        return [s for s in self.summaries if not s["passed"]]

    def to_json(self) -> str:
        obj = {
            "plan": {
                "count": self.plan.count,
                "seed": self.plan.seed,
                "exclusion_radius": self.plan.exclusion_radius,
                "effective_radius": self.plan.effective_radius,
                "box": [list(self.plan.box[0]), list(self.plan.box[1])],
            },
            "passed": self.passed,
            "summaries": self.summaries,
            "rows": self.rows,
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["identity", "config", "sample", "inputs", "residual", "status"])
        for r in self.rows:
            inputs = ";".join(f"{_fmt(z['re'])}{'+' if z['im'] >= 0 else '-'}{_fmt(abs(z['im']))}i" for z in r["inputs"])
            w.writerow([r["identity"], r["config"], r["sample"], inputs, _fmt(r["residual"]) if r["residual"] is not None else "", r["status"]])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = []
        for s in self.summaries:
            mark = "PASS" if s["passed"] else "FAIL"
            bound = "min" if s["identity"] == "nondegeneracy" else "max"
            lines.append(
                f"{mark} {s['config']:<16} {s['identity']:<14} {bound}={s['worst']:.3e} tol={s['tolerance']:.1e} "
                f"samples={s['samples']} rejected={s['rejected']} singular={s['singular']}"
            )
        return "\n".join(lines)


def run_suite(plan: SamplePlan, configs: list[Config]) -> Report:
    """Evaluate every identity of every config on the plan's samples; failures are data."""
    summaries, rows = [], []
    for config in configs:
        rfun = config.rfun()
        sigma_set = config.spec.singular_set(config.tp)
        for identity in config.identities:
            samples = draw_samples(plan, identity, sigma_set, config.tp.tau)
            values, singular = [], 0
            for i, p in enumerate(samples.points):
                row = {"identity": identity, "config": config.name, "sample": i, "inputs": [complex_to_json(z) for z in p]}
                try:
                    val = _evaluate(identity, rfun, p)
                    row["residual"], row["status"] = float(val), "ok"
                    values.append(float(val))
                except (SingularInput, SingularSystem) as exc:
                    row["residual"], row["status"] = None, f"singular: {exc}"
                    singular += 1
                rows.append(row)
            if identity == "nondegeneracy":
                tol = NONDEGENERACY_TOL
                worst = min(values) if values else None
                ok = bool(values) and worst > tol
            else:
                tol = config.tol(identity)
                worst = max(values) if values else None
                ok = bool(values) and worst < tol
            ok = ok and not samples.exhausted
            summaries.append(
                {
                    "config": config.name,
                    "identity": identity,
                    "samples": len(values),
                    "rejected": samples.rejected,
                    "singular": singular,
                    "exhausted": samples.exhausted,
                    "worst": worst,
                    "mean": float(np.mean(values)) if values else None,
                    "tolerance": tol,
                    "passed": ok,
                    "description": config.describe(),
                }
            )
    return Report(plan, summaries, rows)


__all__ = [
    "Config",
    "IDENTITIES",
    "MIN_EXCLUSION",
    "Report",
    "SamplePlan",
    "admissible",
    "aybe4_residual",
    "aybe_residual",
    "default_configs",
    "draw_samples",
    "dual_residual",
    "four_point",
    "gauge_residual",
    "nondegenerate",
    "run_suite",
    "tolerance_for",
    "unitarity_residual",
]
