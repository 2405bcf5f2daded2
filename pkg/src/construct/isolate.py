"""Localization and normalization of math primitives in decompiled code.

Decompilers distort arithmetic: divisions by constants come back as
multiplications by reciprocals, clamps are lowered to min/max chains or
branch ladders, and sign folds turn ``b - a`` into ``-(a - b)``. The
rules here undo the common distortions:

    R1  e * c        ->  e / round(1/c)   when 1/c is (nearly) a small integer
    R2  clamp forms  ->  canonical fmin(fmax(e, lo), hi)
    R3  -(a - b)     ->  b - a

Rules run innermost-first, left to right, to a fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from construct import cparse
from construct.cparse import (
    Assign, Binary, Call, CodeUnit, Decl, Deref, Ident, If, RealLit, Return,
    Ternary, Unary,
)
from construct.errors import ConstructError

REWRITE_CAP = 100


class IsolateError(ConstructError):
    pass


class NoStepFunction(IsolateError):
    pass


class AmbiguousStepFunction(IsolateError):
    def __init__(self, candidates):
        self.candidates = tuple(candidates)
        super().__init__(f"multiple step-function candidates: {', '.join(candidates)}")


class NoDerefBase(IsolateError):
    pass


class DivergingRewrite(IsolateError):
    pass


@dataclass(frozen=True)
class RuleConfig:
    reciprocal_tolerance: float = 1e-9
    reciprocal_max_denominator: int = 1000
    step_function_name: str | None = None
    step_param_name: str | None = None

    def __post_init__(self):
        if not self.reciprocal_tolerance > 0:
            raise ValueError("reciprocal_tolerance must be positive")
        if self.reciprocal_max_denominator < 2:
            raise ValueError("reciprocal_max_denominator must be >= 2")


def load_rule_config(text: str) -> RuleConfig:
    """Read a flat key/value settings file (toml-style subset).

    Recognized keys: reciprocal_tolerance, reciprocal_max_denominator,
    step_function, step_param. Lines starting with # are comments.
    """
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise IsolateError(f"rules file line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip().strip('"').strip("'")
        if key == "reciprocal_tolerance":
            kwargs["reciprocal_tolerance"] = float(value)
        elif key == "reciprocal_max_denominator":
            kwargs["reciprocal_max_denominator"] = int(value)
        elif key == "step_function":
            kwargs["step_function_name"] = value
        elif key == "step_param":
            kwargs["step_param_name"] = value
        else:
            raise IsolateError(f"rules file line {lineno}: unknown key {key!r}")
    return RuleConfig(**kwargs)


@dataclass(frozen=True)
class StepBody:
    """The body of the identified step function.

    base_pointer is the parameter used as the dereference base, and
    step_symbol names the communication step size passed into the
    function.
    """

    statements: tuple
    step_symbol: str
    base_pointer: str
    params: tuple = ()
    locals_: tuple = field(default=())


def _assigns_deref(stmts) -> bool:
    for s in stmts:
        if isinstance(s, Assign) and isinstance(s.target, Deref):
            return True
        if isinstance(s, If) and (_assigns_deref(s.then) or _assigns_deref(s.orelse)):
            return True
    return False


def _deref_bases(stmts, bases: set) -> None:
    def visit(e):
        if isinstance(e, Deref):
            bases.add(e.base)
        return e

    for s in stmts:
        if isinstance(s, Assign):
            cparse.map_expr(visit, s.target)
            cparse.map_expr(visit, s.value)
        elif isinstance(s, Decl) and s.init is not None:
            cparse.map_expr(visit, s.init)
        elif isinstance(s, If):
            cparse.map_expr(visit, s.cond)
            _deref_bases(s.then, bases)
            _deref_bases(s.orelse, bases)
        elif isinstance(s, Return) and s.value is not None:
            cparse.map_expr(visit, s.value)


def _collect_locals(stmts) -> tuple:
    names = []
    for s in stmts:
        if isinstance(s, Decl):
            names.append(s.name)
        elif isinstance(s, If):
            names.extend(_collect_locals(s.then))
            names.extend(_collect_locals(s.orelse))
    return tuple(names)


def isolate_step_function(unit: CodeUnit, cfg: RuleConfig = RuleConfig()) -> StepBody:
    """Select the step function and identify its base pointer and step
    symbol.

    Without a configured name, the step function is the single function
    whose body assigns at least one dereferenced slot.
    """
    if cfg.step_function_name is not None:
        matches = [f for f in unit.functions if f.name == cfg.step_function_name]
        if not matches:
            raise NoStepFunction(f"no function named {cfg.step_function_name!r}")
        fn = matches[0]
        if not _assigns_deref(fn.body):
            raise NoStepFunction(f"{fn.name!r} assigns no dereferenced slots")
    else:
        candidates = [f for f in unit.functions if _assigns_deref(f.body)]
        if not candidates:
            raise NoStepFunction("no function assigns a dereferenced slot")
        if len(candidates) > 1:
            raise AmbiguousStepFunction([f.name for f in candidates])
        fn = candidates[0]

    bases: set = set()
    _deref_bases(fn.body, bases)
    param_names = [n for _, n in fn.params]
    if len(bases) != 1 or not bases <= set(param_names):
        raise NoDerefBase(
            f"{fn.name!r}: expected exactly one parameter used as dereference base, "
            f"got {sorted(bases)}")
    base = next(iter(bases))

    if cfg.step_param_name is not None:
        if cfg.step_param_name not in param_names:
            raise NoStepFunction(
                f"{fn.name!r} has no parameter {cfg.step_param_name!r}")
        step = cfg.step_param_name
    else:
        others = [n for n in param_names if n != base]
        if len(param_names) < 2 or not others:
            raise NoStepFunction(
                f"{fn.name!r}: cannot infer the step-size parameter")
        step = param_names[1] if param_names[1] != base else others[0]

    return StepBody(fn.body, step_symbol=step, base_pointer=base,
                    params=tuple(param_names), locals_=_collect_locals(fn.body))


# ---------------------------------------------------------------------------
# Rewrite rules
# ---------------------------------------------------------------------------

def _rule_reciprocal(e, cfg: RuleConfig):
    # R1: e * c  ->  e / n for n = round(1/c), 2 <= n <= max_denominator
    if not (isinstance(e, Binary) and e.op == "mul"):
        return None
    for operand, other in ((e.right, e.left), (e.left, e.right)):
        if isinstance(operand, RealLit) and operand.value != 0.0:
            recip = 1.0 / operand.value
            n = round(recip)
            if 2 <= n <= cfg.reciprocal_max_denominator and \
                    abs(recip - n) <= cfg.reciprocal_tolerance * abs(n):
                return Binary("div", other, RealLit(float(n)))
    return None


def _rule_clamp(e, cfg: RuleConfig):
    # R2 (expression form): fmax(fmin(e, hi), lo) -> fmin(fmax(e, lo), hi)
    if isinstance(e, Call) and e.callee in ("fmax", "fmaxf"):
        inner = e.args[0]
        if isinstance(inner, Call) and inner.callee in ("fmin", "fminf"):
            expr, hi = inner.args
            lo = e.args[1]
            return Call("fmin", (Call("fmax", (expr, lo)), hi))
    return None


def _rule_neg_sub(e, cfg: RuleConfig):
    # R3: -(a - b) -> b - a
    if isinstance(e, Unary) and e.op == "neg":
        inner = e.operand
        if isinstance(inner, Binary) and inner.op == "sub":
            return Binary("sub", inner.right, inner.left)
    return None


_EXPR_RULES = (_rule_reciprocal, _rule_clamp, _rule_neg_sub)


def _rewrite_expr(e, cfg: RuleConfig):
    """One innermost-first pass; returns (expr, changed)."""
    changed = False

    if isinstance(e, Unary):
        operand, c = _rewrite_expr(e.operand, cfg)
        if c:
            e, changed = Unary(e.op, operand), True
    elif isinstance(e, Binary):
        left, cl = _rewrite_expr(e.left, cfg)
        right, cr = _rewrite_expr(e.right, cfg)
        if cl or cr:
            e, changed = Binary(e.op, left, right), True
    elif isinstance(e, Ternary):
        cond, cc = _rewrite_expr(e.cond, cfg)
        then, ct = _rewrite_expr(e.then, cfg)
        orelse, ce = _rewrite_expr(e.orelse, cfg)
        if cc or ct or ce:
            e, changed = Ternary(cond, then, orelse), True
    elif isinstance(e, Call):
        args = []
        any_c = False
        for a in e.args:
            na, c = _rewrite_expr(a, cfg)
            args.append(na)
            any_c = any_c or c
        if any_c:
            e, changed = Call(e.callee, tuple(args)), True

    for rule in _EXPR_RULES:
        out = rule(e, cfg)
        if out is not None:
            return out, True
    return e, changed


def _normalize_expr(e, cfg: RuleConfig, line: int):
    for _ in range(REWRITE_CAP):
        e, changed = _rewrite_expr(e, cfg)
        if not changed:
            return e
    raise DivergingRewrite(f"rewriting did not converge (line {line})")


def _match_clamp_chain(s, cfg: RuleConfig):
    # R2 (statement form): the lowered branch ladder
    #   if (x < lo) { t = lo; } else { if (x > hi) { t = hi; } else { t = x; } }
    # becomes t = fmin(fmax(x, lo), hi). Comparisons may be strict or not.
    if not (isinstance(s, If) and isinstance(s.cond, Binary)):
        return None
    if len(s.then) != 1 or len(s.orelse) != 1:
        return None
    outer_then, outer_else = s.then[0], s.orelse[0]
    if not (isinstance(outer_then, Assign) and isinstance(outer_else, If)):
        return None
    inner = outer_else
    if not (isinstance(inner.cond, Binary) and len(inner.then) == 1
            and len(inner.orelse) == 1):
        return None
    inner_then, inner_else = inner.then[0], inner.orelse[0]
    if not (isinstance(inner_then, Assign) and isinstance(inner_else, Assign)):
        return None

    target = outer_then.target
    if inner_then.target != target or inner_else.target != target:
        return None
    if s.cond.op not in ("lt", "le") or inner.cond.op not in ("gt", "ge"):
        return None
    x, lo = s.cond.left, s.cond.right
    x2, hi = inner.cond.left, inner.cond.right
    if x != x2 or inner_else.value != x:
        return None
    if outer_then.value != lo or inner_then.value != hi:
        return None
    clamp = Call("fmin", (Call("fmax", (x, lo)), hi))
    return Assign(target, clamp, line=s.line)


def _normalize_stmts(stmts, cfg: RuleConfig):
    out = []
    for s in stmts:
        if isinstance(s, If):
            folded = _match_clamp_chain(s, cfg)
            if folded is not None:
                s = folded
        if isinstance(s, Assign):
            out.append(Assign(s.target, _normalize_expr(s.value, cfg, s.line), line=s.line))
        elif isinstance(s, Decl):
            init = None if s.init is None else _normalize_expr(s.init, cfg, s.line)
            out.append(Decl(s.ctype, s.name, init, line=s.line))
        elif isinstance(s, If):
            out.append(If(_normalize_expr(s.cond, cfg, s.line),
                          _normalize_stmts(s.then, cfg),
                          _normalize_stmts(s.orelse, cfg), line=s.line))
        elif isinstance(s, Return):
            value = None if s.value is None else _normalize_expr(s.value, cfg, s.line)
            out.append(Return(value, line=s.line))
        else:
            out.append(s)
    return tuple(out)


def normalize_primitives(body: StepBody, cfg: RuleConfig = RuleConfig()) -> StepBody:
    """Apply R1, R2, R3 to a fixpoint. Idempotent; preserves semantics
    under real arithmetic within the rule tolerances."""
    return replace(body, statements=_normalize_stmts(body.statements, cfg))
