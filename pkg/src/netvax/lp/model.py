"""Sampled infection-minimization LP construction.

Variables (fixed ordering, which the rounding procedures rely on):

* ``x(t, i)`` at index ``t * n + i`` — infection indicator of node i on
  topology t;
* ``I(j)`` at index ``s * n + j`` — vaccination indicator of node j.

The objective minimizes the weighted infected count over topologies.  For
every live edge (j -> i) of topology t, infection propagates unless i is
vaccinated: ``x(t, i) >= x(t, j) - I(i)``.  Seeds are pinned infected and
unvaccinatable, and the vaccination total is capped by the budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import ParameterError
from ..spread import ProblemInstance
from ..util import fmt_float

LESS_EQUAL = "<="
GREATER_EQUAL = ">="
EQUAL = "="


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: tuple[tuple[int, float], ...]
    relation: str
    rhs: float


@dataclass(frozen=True, eq=False)
class LpModel:
    num_vars: int
    objective: tuple[float, ...]
    constraints: tuple[LinearConstraint, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    integral: frozenset[int]
    var_meta: tuple[str, ...]
    n: int
    s: int
    budget: int

    def x_index(self, t: int, i: int) -> int:
        return t * self.n + i

    def i_index(self, j: int) -> int:
        return self.s * self.n + j

    def i_values(self, values) -> np.ndarray:
        """Slice the vaccination-indicator block out of a solution vector."""
        values = np.asarray(values)
        return values[self.s * self.n : self.s * self.n + self.n]

    def equivalent(self, other: "LpModel") -> bool:
        return (
            self.num_vars == other.num_vars
            and self.objective == other.objective
            and self.constraints == other.constraints
            and self.lower == other.lower
            and self.upper == other.upper
            and self.integral == other.integral
            and self.var_meta == other.var_meta
        )


@dataclass(frozen=True)
class LpSolution:
    status: str  # optimal | infeasible | capacity
    values: tuple[float, ...]
    objective: float


def build_model(
    instance: ProblemInstance, relaxed: bool, pinned_ones: Iterable[int] = ()
) -> LpModel:
    """Assemble the LP/BLP for an instance.

    ``relaxed`` drops the integrality marks on the vaccination variables.
    ``pinned_ones`` adds I(c) = 1 equality rows, used by iterative rounding.
    """
    s = len(instance.topologies)
    if s == 0:
        raise ParameterError("cannot build a model over an empty topology set")
    n = instance.n
    infected = sorted(instance.infected)
    weights = instance.topologies.weights()
    num_vars = n * s + n

    objective = [0.0] * num_vars
    for t in range(s):
        w = float(weights[t])
        base = t * n
        for i in range(n):
            objective[base + i] = w

    var_meta = []
    for t in range(s):
        var_meta.extend(f"x[t={t},i={i}]" for i in range(n))
    var_meta.extend(f"I[{j}]" for j in range(n))

    i_base = n * s
    constraints: list[LinearConstraint] = []
    for t, topo in enumerate(instance.topologies):
        base = t * n
        for (j, i) in topo.live_edges:
            # x(t,i) >= x(t,j) - I(i)  <=>  x(t,j) - x(t,i) - I(i) <= 0
            constraints.append(
                LinearConstraint(
                    coeffs=((base + j, 1.0), (base + i, -1.0), (i_base + i, -1.0)),
                    relation=LESS_EQUAL,
                    rhs=0.0,
                )
            )
    for t in range(s):
        base = t * n
        for i in infected:
            constraints.append(LinearConstraint(((base + i, 1.0),), EQUAL, 1.0))
    for i in infected:
        constraints.append(LinearConstraint(((i_base + i, 1.0),), EQUAL, 0.0))
    for c in pinned_ones:
        c = int(c)
        if c in instance.infected:
            raise ParameterError(f"cannot pin infected node {c} to vaccinated")
        constraints.append(LinearConstraint(((i_base + c, 1.0),), EQUAL, 1.0))
    budget_coeffs = tuple(
        (i_base + j, 1.0) for j in range(n) if j not in instance.infected
    )
    constraints.append(LinearConstraint(budget_coeffs, LESS_EQUAL, float(instance.k)))

    integral = frozenset() if relaxed else frozenset(i_base + j for j in range(n))
    return LpModel(
        num_vars=num_vars,
        objective=tuple(objective),
        constraints=tuple(constraints),
        lower=tuple([0.0] * num_vars),
        upper=tuple([1.0] * num_vars),
        integral=integral,
        var_meta=tuple(var_meta),
        n=n,
        s=s,
        budget=instance.k,
    )


def verify_solution(
    model: LpModel, values, con_tol: float = 1e-6, bound_tol: float = 1e-9
) -> list[str]:
    """Residual feasibility check, independent of whichever solver produced values."""
    values = np.asarray(values, dtype=float)
    problems = []
    if len(values) != model.num_vars:
        return [f"expected {model.num_vars} values, got {len(values)}"]
    for idx, (v, lo, hi) in enumerate(zip(values, model.lower, model.upper)):
        if v < lo - bound_tol or v > hi + bound_tol:
            problems.append(f"{model.var_meta[idx]} = {v!r} outside [{lo}, {hi}]")
    for ci, con in enumerate(model.constraints):
        lhs = sum(coef * values[var] for var, coef in con.coeffs)
        if con.relation == LESS_EQUAL and lhs > con.rhs + con_tol:
            problems.append(f"constraint {ci}: {lhs!r} > {con.rhs!r}")
        elif con.relation == GREATER_EQUAL and lhs < con.rhs - con_tol:
            problems.append(f"constraint {ci}: {lhs!r} < {con.rhs!r}")
        elif con.relation == EQUAL and abs(lhs - con.rhs) > con_tol:
            problems.append(f"constraint {ci}: {lhs!r} != {con.rhs!r}")
    return problems


def write_lp_file(model: LpModel, path) -> None:
    """Dump in the industry LP text layout for cross-checks with other solvers."""
    names = [meta.replace("[", "_").replace("]", "").replace(",", "_").replace("=", "") for meta in model.var_meta]

    def term(coef: float, name: str, first: bool) -> str:
        sign = "-" if coef < 0 else ("" if first else "+")
        mag = abs(coef)
        return f"{sign} {fmt_float(mag)} {name}" if not first else f"{sign}{fmt_float(mag)} {name}"

    lines = ["Minimize", " obj:"]
    parts = []
    for idx, coef in enumerate(model.objective):
        if coef != 0.0:
            parts.append(term(coef, names[idx], first=not parts))
    lines[-1] += " " + " ".join(parts) if parts else " 0"
    lines.append("Subject To")
    rel_text = {LESS_EQUAL: "<=", GREATER_EQUAL: ">=", EQUAL: "="}
    for ci, con in enumerate(model.constraints):
        parts = []
        for var, coef in con.coeffs:
            parts.append(term(coef, names[var], first=not parts))
        lines.append(f" c{ci}: {' '.join(parts)} {rel_text[con.relation]} {fmt_float(con.rhs)}")
    lines.append("Bounds")
    for idx in range(model.num_vars):
        lines.append(f" {fmt_float(model.lower[idx])} <= {names[idx]} <= {fmt_float(model.upper[idx])}")
    if model.integral:
        lines.append("Binary")
        lines.append(" " + " ".join(names[idx] for idx in sorted(model.integral)))
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
