"""Solver-agnostic mixed-integer model container."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

LinExpr = dict[str, float]


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "binary" | "continuous"
    lb: float
    ub: float
    symbol: str


@dataclass(frozen=True)
class LinearConstraint:
    tag: str
    coeffs: tuple[tuple[str, float], ...]
    sense: str  # "<=" | "==" | ">="
    rhs: float

    def activity(self, values: Mapping[str, float]) -> float:
        return math.fsum(c * values[v] for v, c in self.coeffs)

    def residual(self, values: Mapping[str, float]) -> float:
        """Amount of violation (0 when satisfied)."""
        a = self.activity(values)
        if self.sense == "<=":
            return max(0.0, a - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - a)
        return abs(a - self.rhs)


@dataclass(frozen=True)
class Affine:
    coeffs: tuple[tuple[str, float], ...]
    const: float = 0.0

    def value(self, values: Mapping[str, float]) -> float:
        return math.fsum([self.const] + [c * values[v] for v, c in self.coeffs])


@dataclass(frozen=True)
class ConeConstraint:
    """``‖terms‖₂ ≤ bound`` with affine terms and bound."""

    tag: str
    terms: tuple[Affine, ...]
    bound: Affine

    def residual(self, values: Mapping[str, float]) -> float:
        lhs = math.hypot(*(t.value(values) for t in self.terms))
        return max(0.0, lhs - self.bound.value(values))


def affine(coeffs: Mapping[str, float], const: float = 0.0) -> Affine:
    return Affine(tuple((k, float(v)) for k, v in coeffs.items() if v != 0), float(const))


@dataclass
class MilpModel:
    """Variables, tagged constraints and a maximisation objective.

    ``symbol_index`` maps a readable symbol instance such as ``α(1,4)`` or
    ``λ(1,4)@1,k=d1`` to the variable name carrying it. ``meta`` holds
    builder context (the state, candidate sets, big-M values) needed to map
    a solution back to a plan.
    """

    name: str = "model"
    variables: dict[str, Variable] = field(default_factory=dict)
    constraints: list[LinearConstraint] = field(default_factory=list)
    cones: list[ConeConstraint] = field(default_factory=list)
    objective: LinExpr = field(default_factory=dict)
    objective_constant: float = 0.0
    symbol_index: dict[str, str] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add_var(self, name: str, kind: str = "continuous", lb: float = 0.0,
                ub: float = math.inf, symbol: str | None = None) -> str:
        if name in self.variables:
            raise ValueError(f"duplicate variable {name}")
        if kind == "binary":
            lb, ub = max(lb, 0.0), min(ub, 1.0)
        self.variables[name] = Variable(name, kind, float(lb), float(ub), symbol or name)
        self.symbol_index[symbol or name] = name
        return name

    def add(self, tag: str, coeffs: Mapping[str, float], sense: str, rhs: float = 0.0) -> None:
        if sense not in ("<=", "==", ">="):
            raise ValueError(f"bad sense {sense}")
        terms = []
        for v, c in coeffs.items():
            if v not in self.variables:
                raise KeyError(f"unknown variable {v} in {tag}")
            if c != 0:
                terms.append((v, float(c)))
        self.constraints.append(LinearConstraint(tag, tuple(terms), sense, float(rhs)))

    def add_cone(self, tag: str, terms: list[Affine], bound: Affine) -> None:
        for a in [*terms, bound]:
            for v, _ in a.coeffs:
                if v not in self.variables:
                    raise KeyError(f"unknown variable {v} in {tag}")
        self.cones.append(ConeConstraint(tag, tuple(terms), bound))

    def set_objective(self, coeffs: Mapping[str, float], constant: float = 0.0) -> None:
        self.objective = {k: float(v) for k, v in coeffs.items() if v != 0}
        self.objective_constant = float(constant)

    def objective_value(self, values: Mapping[str, float]) -> float:
        return math.fsum([self.objective_constant] + [c * values[v] for v, c in self.objective.items()])

    def stats(self) -> dict[str, int]:
        counts = Counter(c.tag for c in self.constraints)
        counts.update(c.tag for c in self.cones)
        kinds = Counter(v.kind for v in self.variables.values())
        return {
            "variables": len(self.variables),
            "binary": kinds.get("binary", 0),
            "continuous": kinds.get("continuous", 0),
            **{f"con:{t}": n for t, n in sorted(counts.items())},
        }

    def violations(self, values: Mapping[str, float], tol: float = 1e-6) -> list[tuple[str, float]]:
        """(tag, residual) for every constraint or bound violated beyond ``tol``."""
        out = []
        for v in self.variables.values():
            x = values[v.name]
            if x < v.lb - tol or x > v.ub + tol:
                out.append((f"bound:{v.name}", max(v.lb - x, x - v.ub)))
        for c in self.constraints:
            r = c.residual(values)
            if r > tol:
                out.append((c.tag, r))
        for c in self.cones:
            r = c.residual(values)
            if r > tol:
                out.append((c.tag, r))
        return out

    def dump(self) -> str:
        """Deterministic text listing: VAR lines sorted by name, CON lines by tag."""
        lines = []
        for name in sorted(self.variables):
            v = self.variables[name]
            lines.append(f"VAR {v.name} {v.kind} {_num(v.lb)} {_num(v.ub)} {v.symbol}")
        cons = sorted(
            self.constraints,
            key=lambda c: (c.tag, tuple(sorted(c.coeffs)), c.sense, c.rhs),
        )
        for c in cons:
            body = " ".join(f"{_num(k)} {v}" for v, k in sorted(c.coeffs))
            lines.append(f"CON {c.tag} {c.sense} {_num(c.rhs)} {body}".rstrip())
        for c in sorted(self.cones, key=lambda c: (c.tag, repr(c.terms))):
            terms = " | ".join(_aff(t) for t in c.terms)
            lines.append(f"SOC {c.tag} [{terms}] <= {_aff(c.bound)}")
        obj = " ".join(f"{_num(k)} {v}" for v, k in sorted(self.objective.items()))
        lines.append(f"OBJ max {_num(self.objective_constant)} {obj}".rstrip())
        return "\n".join(lines) + "\n"


def _num(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _aff(a: Affine) -> str:
    return " ".join([_num(a.const)] + [f"{_num(k)} {v}" for v, k in sorted(a.coeffs)])
