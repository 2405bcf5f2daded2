"""Causalization and fixed-step simulation of bound models.

This is the internal stand-in for an external Modelica tool: a bound
model is statically checked, each algebraic equation is matched to one
unknown it can be solved for, equations are ordered by dependency, and
the resulting plan is integrated with forward Euler on the input trace's
time grid. Models that fail any static or runtime check are rejected,
which is exactly how non-simulatable candidates are discovered.

Static rejection is deliberately at least as strict as the constraint
validator: a mapping that violates C0 through C4 never simulates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

from construct import mexpr
from construct.container import Trace
from construct.errors import ConstructError
from construct.model import BoundModel

GRID_RTOL = 1e-9


class SimError(ConstructError):
    pass


class CausalizeError(SimError):
    pass


class DuplicateBinding(CausalizeError):
    pass


class IllTypedModel(CausalizeError):
    pass


class InvalidStateVariable(CausalizeError):
    pass


class UnusedInput(CausalizeError):
    pass


class UnbalancedSystem(CausalizeError):
    def __init__(self, n_eq: int, n_unknowns: int):
        self.n_eq = n_eq
        self.n_unknowns = n_unknowns
        super().__init__(f"{n_eq} algebraic equations for {n_unknowns} unknowns")


class StructurallySingular(CausalizeError):
    pass


class AlgebraicLoop(CausalizeError):
    def __init__(self, members):
        self.members = tuple(members)
        super().__init__(f"algebraic loop through {', '.join(self.members)}")


class NotIsolatable(CausalizeError):
    def __init__(self, eq_index: int):
        self.eq_index = eq_index
        super().__init__(f"equation {eq_index}: matched unknown cannot be isolated")


class MultipleOccurrence(CausalizeError):
    def __init__(self, name: str, eq_index: int):
        self.name = name
        self.eq_index = eq_index
        super().__init__(f"equation {eq_index}: {name!r} occurs more than once")


class SimulateError(SimError):
    pass


class DivisionByZero(SimulateError):
    def __init__(self, t: float, eq: str):
        super().__init__(f"division by zero at t={t} in {eq}")


class NonFiniteValue(SimulateError):
    def __init__(self, t: float, name: str):
        super().__init__(f"non-finite value for {name!r} at t={t}")


class MissingInput(SimulateError):
    def __init__(self, name: str):
        super().__init__(f"input trace lacks column {name!r}")


class NonUniformGrid(SimulateError):
    pass


@total_ordering
@dataclass(frozen=True)
class Fitness:
    """Either a finite MSE or Invalid; Invalid orders worse than any
    finite value."""

    mse: float | None  # None encodes Invalid

    @classmethod
    def finite(cls, mse: float) -> "Fitness":
        if not (math.isfinite(mse) and mse >= 0.0):
            raise ValueError(f"not a valid MSE: {mse}")
        return cls(mse)

    @classmethod
    def invalid(cls) -> "Fitness":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.mse is not None

    def sort_key(self):
        return (0, self.mse) if self.mse is not None else (1, 0.0)

    def __lt__(self, other: "Fitness") -> bool:
        return self.sort_key() < other.sort_key()


INVALID = Fitness.invalid()


@dataclass(frozen=True)
class SimPlan:
    state_vars: tuple  # of (name, start, rhs expression), in model order
    algebraic_order: tuple  # of (equation index, solved name, expression)
    param_env: dict
    input_names: frozenset
    warnings: tuple = ()

    @property
    def solved_names(self) -> frozenset:
        return frozenset(n for _, n, _ in self.algebraic_order) \
            | frozenset(n for n, _, _ in self.state_vars)


# ---------------------------------------------------------------------------
# Static typing of a bound model
# ---------------------------------------------------------------------------

def _typecheck(b: BoundModel) -> None:
    vtypes = {v.name: v.vtype for v in b.variable_table.variables}

    def ty(e) -> str:
        if isinstance(e, mexpr.Const):
            return "Boolean" if isinstance(e.value, bool) else "Real"
        if isinstance(e, mexpr.Sym):
            return vtypes[e.ref]
        if isinstance(e, mexpr.Der):
            if vtypes[e.ref] != "Real":
                raise IllTypedModel(f"der() of non-Real variable {e.ref!r}")
            return "Real"
        if isinstance(e, mexpr.Unary):
            want = "Real" if e.op == "neg" else "Boolean"
            if ty(e.operand) != want:
                raise IllTypedModel(f"{e.op} applied to non-{want} operand")
            return want
        if isinstance(e, (mexpr.Min, mexpr.Max)):
            if ty(e.left) != "Real" or ty(e.right) != "Real":
                raise IllTypedModel("min/max over non-Real operands")
            return "Real"
        if isinstance(e, mexpr.Abs):
            if ty(e.operand) != "Real":
                raise IllTypedModel("abs of non-Real operand")
            return "Real"
        if isinstance(e, mexpr.If):
            if ty(e.cond) != "Boolean":
                raise IllTypedModel("conditional on non-Boolean condition")
            t1, t2 = ty(e.then), ty(e.orelse)
            if t1 != t2:
                raise IllTypedModel(f"conditional branches differ: {t1} vs {t2}")
            return t1
        if isinstance(e, mexpr.Binary):
            lt, rt = ty(e.left), ty(e.right)
            if e.op in mexpr.NUMERIC_BINOPS:
                if lt != "Real" or rt != "Real":
                    raise IllTypedModel(f"{e.op} over {lt}/{rt} operands")
                return "Real"
            if e.op in mexpr.LOGIC_BINOPS:
                if lt != "Boolean" or rt != "Boolean":
                    raise IllTypedModel(f"{e.op} over {lt}/{rt} operands")
                return "Boolean"
            if lt != rt:
                raise IllTypedModel(f"comparison of {lt} with {rt}")
            if e.op not in ("eq", "ne") and lt == "Boolean":
                raise IllTypedModel("ordering comparison of Booleans")
            return "Boolean"
        raise TypeError(f"not a ModelExpr: {e!r}")

    for lhs, rhs in b.equations:
        if ty(lhs) != ty(rhs):
            raise IllTypedModel("equation sides have different types")


# ---------------------------------------------------------------------------
# Isolation (symbolic inversion along the path to the unknown)
# ---------------------------------------------------------------------------

def _contains(e, name) -> bool:
    return name in mexpr.refs(e)


def isolate_expression(lhs, rhs, name):
    """Solve ``lhs = rhs`` for name, which must occur exactly once.
    Returns the isolated expression or None when the path is not
    invertible (only +, -, *, / and unary minus invert)."""
    if _contains(lhs, name):
        expr, target = lhs, rhs
    else:
        expr, target = rhs, lhs
    while True:
        if isinstance(expr, mexpr.Sym) and expr.ref == name:
            return target
        if isinstance(expr, mexpr.Unary) and expr.op == "neg":
            expr, target = expr.operand, mexpr.Unary("neg", target)
            continue
        if isinstance(expr, mexpr.Binary) and expr.op in mexpr.NUMERIC_BINOPS:
            a, b = expr.left, expr.right
            in_left = _contains(a, name)
            if expr.op == "add":
                expr, target = (a, mexpr.Binary("sub", target, b)) if in_left \
                    else (b, mexpr.Binary("sub", target, a))
            elif expr.op == "sub":
                expr, target = (a, mexpr.Binary("add", target, b)) if in_left \
                    else (b, mexpr.Binary("sub", a, target))
            elif expr.op == "mul":
                expr, target = (a, mexpr.Binary("div", target, b)) if in_left \
                    else (b, mexpr.Binary("div", target, a))
            else:  # div
                expr, target = (a, mexpr.Binary("mul", target, b)) if in_left \
                    else (b, mexpr.Binary("div", a, target))
            continue
        return None


def _max_matching(edges: dict, n_eq: int, unknowns: list) -> dict:
    """Augmenting-path bipartite matching; returns {unknown: eq_index}."""
    matched: dict = {}

    def augment(eq: int, visited: set) -> bool:
        for u in edges.get(eq, ()):
            if u in visited:
                continue
            visited.add(u)
            if u not in matched or augment(matched[u], visited):
                matched[u] = eq
                return True
        return False

    for eq in range(n_eq):
        augment(eq, set())
    return matched


# ---------------------------------------------------------------------------
# Causalization
# ---------------------------------------------------------------------------

def causalize(b: BoundModel) -> SimPlan:
    """Build an executable plan from a bound model, or reject it.

    State equations bind their state directly. The remaining equations
    are matched one-to-one to the remaining unknowns, where a match
    requires the unknown to occur exactly once and be isolatable;
    matched equations are then ordered topologically.
    """
    if len(set(b.bindings)) != len(b.bindings):
        dupes = sorted({n for n in b.bindings if b.bindings.count(n) > 1})
        raise DuplicateBinding(f"variables bound to several slots: {', '.join(dupes)}")

    _typecheck(b)

    table = b.variable_table
    causality = {v.name: v.causality for v in table.variables}
    warnings: list = []

    state_eqs = []
    algebraic = []
    state_names: list = []
    for lhs, rhs in b.equations:
        if isinstance(lhs, mexpr.Der):
            name = lhs.ref
            if causality[name] not in ("output", "local"):
                raise InvalidStateVariable(
                    f"der() of {causality[name]} variable {name!r}")
            if name in state_names:
                raise CausalizeError(f"two state equations for {name!r}")
            state_names.append(name)
            state_eqs.append((name, rhs))
        else:
            algebraic.append((lhs, rhs))

    occurring: set = set()
    for lhs, rhs in b.equations:
        occurring.update(mexpr.refs(lhs))
        occurring.update(mexpr.refs(rhs))

    inputs = [v.name for v in table.variables if v.causality == "input"]
    for name in inputs:
        if name not in occurring:
            raise UnusedInput(name)

    outputs = [v.name for v in table.variables if v.causality == "output"]
    unknown_pool = {n for n in occurring
                    if causality[n] in ("output", "local")} | set(outputs)
    to_solve = sorted(unknown_pool - set(state_names))

    if len(algebraic) != len(to_solve):
        raise UnbalancedSystem(len(algebraic), len(to_solve))

    # Edges pair an equation with an unknown it can actually be solved
    # for: one occurrence, invertible path.
    edges: dict = {}
    counts: list = []
    for i, (lhs, rhs) in enumerate(algebraic):
        names = mexpr.refs(lhs) + mexpr.refs(rhs)
        count = {n: names.count(n) for n in names}
        counts.append(count)
        usable = []
        for u in to_solve:
            if count.get(u, 0) == 1 and isolate_expression(lhs, rhs, u) is not None:
                usable.append(u)
        edges[i] = usable

    matched = _max_matching(edges, len(algebraic), to_solve)
    if len(matched) != len(to_solve):
        _diagnose_matching_failure(algebraic, to_solve, counts)

    solved = {eq: u for u, eq in matched.items()}
    iso_exprs = {}
    for i, (lhs, rhs) in enumerate(algebraic):
        iso_exprs[i] = isolate_expression(lhs, rhs, solved[i])

    # Topological order: an equation may only use unknowns solved earlier.
    solved_names = set(solved.values())
    deps = {i: {u for u in mexpr.refs(iso_exprs[i])
                if u in solved_names and u != solved[i]}
            for i in solved}
    order: list = []
    placed: set = set()
    remaining = sorted(solved)
    while remaining:
        progress = [i for i in remaining if deps[i] <= placed]
        if not progress:
            raise AlgebraicLoop(sorted({solved[i] for i in remaining}))
        for i in progress:
            order.append(i)
            placed.add(solved[i])
        done = set(progress)
        remaining = [i for i in remaining if i not in done]

    param_env = {}
    for v in table.variables:
        if v.causality == "parameter":
            param_env[v.name] = _as_real(v.start)

    starts = {v.name: v.start for v in table.variables}
    state_vars = []
    for name, rhs in state_eqs:
        start = starts.get(name)
        if start is None:
            warnings.append(f"state {name!r} has no start value, using 0.0")
            start = 0.0
        state_vars.append((name, _as_real(start), rhs))

    algebraic_order = tuple((i, solved[i], iso_exprs[i]) for i in order)
    return SimPlan(tuple(state_vars), algebraic_order, param_env,
                   frozenset(inputs), tuple(warnings))


def _as_real(value) -> float:
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    return float(value)


def _diagnose_matching_failure(algebraic, to_solve, counts) -> None:
    """Distinguish the reason no perfect matching exists."""
    once = {i: [u for u in to_solve if counts[i].get(u, 0) == 1]
            for i in range(len(algebraic))}
    if len(_max_matching(once, len(algebraic), to_solve)) == len(to_solve):
        matched = _max_matching(once, len(algebraic), to_solve)
        for u, i in sorted(matched.items(), key=lambda kv: kv[1]):
            lhs, rhs = algebraic[i]
            if isolate_expression(lhs, rhs, u) is None:
                raise NotIsolatable(i)
        raise NotIsolatable(0)
    any_occ = {i: [u for u in to_solve if counts[i].get(u, 0) >= 1]
               for i in range(len(algebraic))}
    if len(_max_matching(any_occ, len(algebraic), to_solve)) == len(to_solve):
        for i in range(len(algebraic)):
            for u in to_solve:
                if counts[i].get(u, 0) > 1:
                    raise MultipleOccurrence(u, i)
    raise StructurallySingular(
        f"no perfect matching between {len(algebraic)} equations and "
        f"{len(to_solve)} unknowns")


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

def simulate(plan: SimPlan, inputs: Trace, outputs_of_interest) -> Trace:
    """Forward Euler on the trace grid: read inputs (zero-order hold),
    evaluate algebraic equations, record outputs, advance states."""
    for name in sorted(plan.input_names):
        if name not in inputs.columns:
            raise MissingInput(name)
    for name in sorted(outputs_of_interest):
        if name not in plan.solved_names:
            raise SimulateError(f"output {name!r} is not computed by the plan")

    times = inputs.times
    h = times[1] - times[0]
    for a, t in zip(times, times[1:]):
        if abs((t - a) - h) > GRID_RTOL * abs(h):
            raise NonUniformGrid(f"non-uniform sample spacing near t={t}")

    env = dict(plan.param_env)
    for name, start, _ in plan.state_vars:
        env[name] = start

    out_names = sorted(outputs_of_interest)
    recorded = {n: [] for n in out_names}
    n = len(times)
    for k in range(n):
        t = times[k]
        for name in plan.input_names:
            env[name] = inputs.columns[name][k]
        for eq_index, name, expr in plan.algebraic_order:
            try:
                value = mexpr.eval_expr(expr, env)
            except ZeroDivisionError:
                raise DivisionByZero(t, f"equation {eq_index}") from None
            if not math.isfinite(value):
                raise NonFiniteValue(t, name)
            env[name] = value
        for name in out_names:
            recorded[name].append(env[name])
        if k + 1 < n:
            ders = []
            for name, _, rhs in plan.state_vars:
                try:
                    ders.append(mexpr.eval_expr(rhs, env))
                except ZeroDivisionError:
                    raise DivisionByZero(t, f"der({name})") from None
            for (name, _, _), d in zip(plan.state_vars, ders):
                nxt = env[name] + h * d
                if not math.isfinite(nxt):
                    raise NonFiniteValue(t, name)
                env[name] = nxt

    return Trace(times, {name: tuple(vals) for name, vals in recorded.items()})


def fitness(candidate: BoundModel, inputs: Trace, reference: Trace) -> Fitness:
    """Mean squared output distance against the reference; any causalize
    or simulate failure folds into Invalid."""
    outputs = [v.name for v in candidate.variable_table.variables
               if v.causality == "output"]
    for name in outputs:
        if name not in reference.columns:
            raise ValueError(f"reference trace lacks output column {name!r}")
    try:
        plan = causalize(candidate)
        result = simulate(plan, inputs, outputs)
    except SimError:
        return INVALID
    if len(result.times) != len(reference.times):
        raise ValueError("reference and simulation grids differ in length")
    sq = []
    for name in outputs:
        ys = result.columns[name]
        rs = reference.columns[name]
        sq.extend((y - r) * (y - r) for y, r in zip(ys, rs))
    return Fitness.finite(math.fsum(sq) / len(sq))
