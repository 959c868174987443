"""Arithmetic circuits: data model, validation, metrics and evaluation.

A circuit is an ordered list of ``(gate_id, rhs)`` pairs.  Declaration order
is the topological order: every gate referenced by a right-hand side must be
declared earlier.  Constants are restricted to -1, 0 and 1; the only richer
right-hand side is :class:`MonoMul` (``coeff * prod x_i^e_i * B``), used by
powerful skew circuits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Union

from .errors import (
    BadConstant,
    BadModulus,
    DuplicateId,
    ForwardReference,
    MissingOutput,
    NotPositive,
    NotVariableFree,
    TooLarge,
    UnboundVariable,
    UndeclaredGate,
)
from .poly import MultiPoly


@dataclass(frozen=True, slots=True)
class Const:
    value: int


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Add:
    left: str
    right: str


@dataclass(frozen=True, slots=True)
class Mul:
    left: str
    right: str


@dataclass(frozen=True, slots=True)
class MonoMul:
    """``coeff * prod(x**e for x, e in powers) * operand``."""

    coeff: int
    powers: tuple[tuple[str, int], ...]
    operand: str


Rhs = Union[Const, Var, Add, Mul, MonoMul]
INPUT_TYPES = (Const, Var)


def children(rhs: Rhs) -> tuple[str, ...]:
    if isinstance(rhs, (Add, Mul)):
        return (rhs.left, rhs.right)
    if isinstance(rhs, MonoMul):
        return (rhs.operand,)
    return ()


@dataclass(frozen=True)
class Circuit:
    gates: tuple[tuple[str, Rhs], ...]
    output: str

    def __post_init__(self) -> None:
        if not isinstance(self.gates, tuple):
            object.__setattr__(self, "gates", tuple(tuple(g) for g in self.gates))

    @cached_property
    def rhs(self) -> dict[str, Rhs]:
        return dict(self.gates)

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[tuple[str, Rhs]]:
        return iter(self.gates)

    def is_input(self, gate: str) -> bool:
        return isinstance(self.rhs[gate], INPUT_TYPES)

    def variables(self) -> list[str]:
        """Variable names in order of first occurrence."""
        seen: dict[str, None] = {}
        for _, r in self.gates:
            if isinstance(r, Var):
                seen.setdefault(r.name)
            elif isinstance(r, MonoMul):
                for v, _ in r.powers:
                    seen.setdefault(v)
        return list(seen)

    def mul_gates(self) -> list[str]:
        return [g for g, r in self.gates if isinstance(r, (Mul, MonoMul))]

    def with_output(self, output: str) -> Circuit:
        return Circuit(self.gates, output)


# ---------------------------------------------------------------------------
# Construction helpers


class CircuitBuilder:
    """Incremental construction with fresh-id generation and sugar for
    n-ary sums/products (desugared into binary gates)."""

    def __init__(self, prefix: str = "_g", reserved: Iterable[str] = ()) -> None:
        self._gates: list[tuple[str, Rhs]] = []
        self._taken: set[str] = set(reserved)
        self._declared: set[str] = set()
        self._prefix = prefix
        self._counter = itertools.count()

    def fresh(self) -> str:
        while True:
            name = f"{self._prefix}{next(self._counter)}"
            if name not in self._taken:
                return name

    def gate(self, rhs: Rhs, ident: str | None = None) -> str:
        if ident is None:
            ident = self.fresh()
        elif ident in self._declared:
            raise DuplicateId(f"gate {ident!r} declared twice", ident)
        self._taken.add(ident)
        self._declared.add(ident)
        self._gates.append((ident, rhs))
        return ident

    def const(self, value: int, ident: str | None = None) -> str:
        return self.gate(Const(value), ident)

    def var(self, name: str, ident: str | None = None) -> str:
        return self.gate(Var(name), ident)

    def add(self, a: str, b: str, ident: str | None = None) -> str:
        return self.gate(Add(a, b), ident)

    def mul(self, a: str, b: str, ident: str | None = None) -> str:
        return self.gate(Mul(a, b), ident)

    def sum(self, items: list[str], ident: str | None = None) -> str:
        """Left-nested sum; the last binary gate gets ``ident``."""
        if not items:
            return self.const(0, ident)
        if len(items) == 1:
            return self.add(items[0], self.const(0), ident) if ident else items[0]
        acc = items[0]
        for k, x in enumerate(items[1:]):
            last = k == len(items) - 2
            acc = self.add(acc, x, ident if last else None)
        return acc

    def product(self, items: list[str], ident: str | None = None) -> str:
        if not items:
            return self.const(1, ident)
        if len(items) == 1:
            return self.mul(items[0], self.const(1), ident) if ident else items[0]
        acc = items[0]
        for k, x in enumerate(items[1:]):
            last = k == len(items) - 2
            acc = self.mul(acc, x, ident if last else None)
        return acc

    def __len__(self) -> int:
        return len(self._gates)

    def build(self, output: str) -> Circuit:
        return Circuit(tuple(self._gates), output)


# ---------------------------------------------------------------------------
# Validation


def validate(c: Circuit) -> None:
    """Raise the first violated invariant; return ``None`` if ``c`` is valid."""
    seen: set[str] = set()
    all_ids = {g for g, _ in c.gates}
    for gid, rhs in c.gates:
        if gid in seen:
            raise DuplicateId(f"gate {gid!r} declared twice", gid)
        if isinstance(rhs, Const) and rhs.value not in (-1, 0, 1):
            raise BadConstant(f"gate {gid!r} has constant {rhs.value}; allowed are -1, 0, 1", gid)
        if isinstance(rhs, MonoMul) and any(e < 0 for _, e in rhs.powers):
            raise BadConstant(f"gate {gid!r} has a negative exponent", gid)
        for ch in children(rhs):
            if ch not in all_ids:
                raise UndeclaredGate(f"gate {gid!r} references undeclared {ch!r}", gid)
            if ch not in seen:
                raise ForwardReference(f"gate {gid!r} references {ch!r} before its declaration", gid)
        seen.add(gid)
    if c.output not in seen:
        raise MissingOutput(f"output gate {c.output!r} is not declared", c.output)


def is_valid(c: Circuit) -> bool:
    try:
        validate(c)
    except Exception:
        return False
    return True


# ---------------------------------------------------------------------------
# Metrics


@dataclass(frozen=True)
class CircuitMetrics:
    depth: int
    mdepth: int
    formal_degree: int
    is_positive: bool
    is_skew: bool
    is_variable_free: bool
    is_addition: bool


@dataclass(frozen=True)
class GateMetrics:
    depth: dict[str, int] = field(repr=False)
    mdepth: dict[str, int] = field(repr=False)
    degree: dict[str, int] = field(repr=False)


def gate_metrics(c: Circuit) -> GateMetrics:
    depth: dict[str, int] = {}
    mdepth: dict[str, int] = {}
    degree: dict[str, int] = {}
    for g, r in c.gates:
        if isinstance(r, INPUT_TYPES):
            depth[g], mdepth[g], degree[g] = 1, 0, 1
        elif isinstance(r, Add):
            depth[g] = 1 + max(depth[r.left], depth[r.right])
            mdepth[g] = max(mdepth[r.left], mdepth[r.right])
            degree[g] = max(degree[r.left], degree[r.right])
        elif isinstance(r, Mul):
            depth[g] = 1 + max(depth[r.left], depth[r.right])
            mdepth[g] = 1 + max(mdepth[r.left], mdepth[r.right])
            degree[g] = degree[r.left] + degree[r.right]
        else:
            depth[g] = 1 + depth[r.operand]
            mdepth[g] = 1 + mdepth[r.operand]
            degree[g] = degree[r.operand] + sum(e for _, e in r.powers)
    return GateMetrics(depth, mdepth, degree)


def is_positive(c: Circuit) -> bool:
    return not any(
        (isinstance(r, Const) and r.value < 0) or (isinstance(r, MonoMul) and r.coeff < 0)
        for _, r in c.gates
    )


def is_variable_free(c: Circuit) -> bool:
    return not any(
        isinstance(r, Var) or (isinstance(r, MonoMul) and any(e for _, e in r.powers))
        for _, r in c.gates
    )


def is_skew(c: Circuit) -> bool:
    for _, r in c.gates:
        if isinstance(r, MonoMul):
            return False
        if isinstance(r, Mul) and not (c.is_input(r.left) or c.is_input(r.right)):
            return False
    return True


def is_powerful_skew(c: Circuit) -> bool:
    """Skew, except that multiplications may also be :class:`MonoMul` gates."""
    return all(
        not isinstance(r, Mul) or c.is_input(r.left) or c.is_input(r.right)
        for _, r in c.gates
    )


def is_addition(c: Circuit) -> bool:
    return is_positive(c) and not any(isinstance(r, (Mul, MonoMul)) for _, r in c.gates)


def metrics(c: Circuit) -> CircuitMetrics:
    validate(c)
    gm = gate_metrics(c)
    s = c.output
    return CircuitMetrics(
        depth=gm.depth[s],
        mdepth=gm.mdepth[s],
        formal_degree=gm.degree[s],
        is_positive=is_positive(c),
        is_skew=is_skew(c),
        is_variable_free=is_variable_free(c),
        is_addition=is_addition(c),
    )


# ---------------------------------------------------------------------------
# Evaluation


def _sweep(c: Circuit, leaf: Callable[[Rhs], object], add, mul, mono) -> dict[str, object]:
    val: dict[str, object] = {}
    for g, r in c.gates:
        if isinstance(r, Add):
            val[g] = add(val[r.left], val[r.right])
        elif isinstance(r, Mul):
            val[g] = mul(val[r.left], val[r.right])
        elif isinstance(r, MonoMul):
            val[g] = mono(r, val[r.operand])
        else:
            val[g] = leaf(r)
    return val


def _lookup(assignment: Mapping[str, object], name: str):
    try:
        return assignment[name]
    except KeyError:
        raise UnboundVariable(f"variable {name!r} is not bound") from None


def eval_gates(c: Circuit, assignment: Mapping[str, object] | None = None, one=1) -> dict[str, object]:
    """Value of every gate over any commutative ring (``one`` is its unit)."""
    assignment = assignment or {}

    def leaf(r):
        return one * r.value if isinstance(r, Const) else _lookup(assignment, r.name)

    def mono(r: MonoMul, b):
        acc = b * r.coeff
        for v, e in r.powers:
            acc = acc * _lookup(assignment, v) ** e
        return acc

    return _sweep(c, leaf, lambda a, b: a + b, lambda a, b: a * b, mono)


def eval_int(c: Circuit, assignment: Mapping[str, int] | None = None) -> int:
    """Exact integer value of the output gate (one bottom-up sweep)."""
    validate(c)
    return eval_gates(c, assignment)[c.output]


def eval_mod(c: Circuit, assignment: Mapping[str, int] | None, m: int) -> int:
    """Output value reduced mod ``m``; every intermediate is kept in [0, m)."""
    if m < 2:
        raise BadModulus(f"modulus must be >= 2, got {m}")
    validate(c)
    assignment = assignment or {}

    def leaf(r):
        return r.value % m if isinstance(r, Const) else _lookup(assignment, r.name) % m

    def mono(r: MonoMul, b):
        acc = b * r.coeff % m
        for v, e in r.powers:
            acc = acc * pow(_lookup(assignment, v), e, m) % m
        return acc

    vals = _sweep(c, leaf, lambda a, b: (a + b) % m, lambda a, b: a * b % m, mono)
    return vals[c.output]


@dataclass(frozen=True)
class PolyLimits:
    max_terms: int = 10**6


def eval_poly(
    c: Circuit,
    limits: PolyLimits = PolyLimits(),
    variables: list[str] | None = None,
    modulus: int | None = None,
) -> MultiPoly:
    """Fully expanded polynomial of the output gate.

    Raises :class:`TooLarge` as soon as any gate's polynomial exceeds
    ``limits.max_terms`` monomials.
    """
    return eval_poly_gates(c, limits, variables, modulus)[c.output]


def eval_poly_gates(
    c: Circuit,
    limits: PolyLimits = PolyLimits(),
    variables: list[str] | None = None,
    modulus: int | None = None,
) -> dict[str, MultiPoly]:
    validate(c)
    names = list(variables) if variables is not None else sorted(c.variables())
    index = {v: i for i, v in enumerate(names)}
    k = len(names)
    for v in c.variables():
        if v not in index:
            raise UnboundVariable(f"variable {v!r} not in the requested variable list")

    def check(p: MultiPoly) -> MultiPoly:
        if len(p) > limits.max_terms:
            raise TooLarge(f"polynomial exceeds {limits.max_terms} terms")
        return p

    def leaf(r):
        if isinstance(r, Const):
            return MultiPoly.constant(r.value, k, modulus, names)
        return MultiPoly.variable(index[r.name], k, modulus, names)

    def mono(r: MonoMul, b: MultiPoly):
        e = [0] * k
        for v, x in r.powers:
            e[index[v]] += x
        m = MultiPoly({tuple(e): r.coeff}, k, modulus, names)
        return check(m * b)

    def mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
        if len(a) * len(b) > limits.max_terms * 4 and len(a) > 1 and len(b) > 1:
            raise TooLarge(f"product of {len(a)} x {len(b)} terms exceeds budget")
        return check(a * b)

    return _sweep(c, leaf, lambda a, b: check(a + b), mul, mono)


# ---------------------------------------------------------------------------
# Path counting


def _require_counting_input(c: Circuit) -> None:
    validate(c)
    if not is_positive(c):
        raise NotPositive("circuit contains the constant -1")
    if not is_variable_free(c):
        raise NotVariableFree("circuit contains variables")
    if any(isinstance(r, MonoMul) for _, r in c.gates):
        raise NotVariableFree("powerful multiplication gates are not supported")


def count_accepting_paths(c: Circuit) -> int:
    """Number of accepting runs of the pushdown machine that, with gate A on
    top, pops 1-gates, rejects on 0-gates, replaces a sum by one operand
    (nondeterministically) and a product by both operands.

    ``runs(A)`` counts computations that start with ``A`` on top and end
    once ``A`` has been consumed; runs of a stack ``A w`` factor as
    ``runs(A) * runs(w)``, so the count is memoised per gate.
    """
    _require_counting_input(c)
    runs: dict[str, int] = {}
    for g, r in c.gates:
        if isinstance(r, Const):
            runs[g] = 1 if r.value == 1 else 0
        elif isinstance(r, Add):
            runs[g] = runs[r.left] + runs[r.right]
        else:
            runs[g] = runs[r.left] * runs[r.right]
    return runs[c.output]


def enumerate_accepting_runs(c: Circuit, limit: int = 10**6) -> Iterator[list[tuple[str, ...]]]:
    """Explicitly simulate the machine; yields each accepting run as its
    sequence of stack configurations.  Intended for tiny circuits only."""
    _require_counting_input(c)
    rhs = c.rhs
    produced = 0
    # Depth-first over configurations; each stack entry carries its trace.
    pending: list[tuple[tuple[str, ...], list[tuple[str, ...]]]] = [((c.output,), [(c.output,)])]
    while pending:
        stack, trace = pending.pop()
        top, rest = stack[0], stack[1:]
        r = rhs[top]
        if isinstance(r, Const):
            if r.value == 0:
                continue
            if not rest:
                produced += 1
                if produced > limit:
                    raise TooLarge("too many accepting runs to enumerate")
                yield trace + [()]
                continue
            pending.append((rest, trace + [rest]))
        elif isinstance(r, Add):
            for ch in (r.right, r.left):
                nxt = (ch,) + rest
                pending.append((nxt, trace + [nxt]))
        else:
            nxt = (r.left, r.right) + rest
            pending.append((nxt, trace + [nxt]))


# ---------------------------------------------------------------------------
# Graph utilities


def reachable(c: Circuit, roots: Iterable[str] | None = None) -> set[str]:
    """Gates that some root depends on (roots included)."""
    rhs = c.rhs
    pending = list(roots) if roots is not None else [c.output]
    seen: set[str] = set()
    while pending:
        g = pending.pop()
        if g in seen:
            continue
        seen.add(g)
        pending.extend(children(rhs[g]))
    return seen


def prune(c: Circuit) -> Circuit:
    """Drop gates the output does not depend on."""
    keep = reachable(c)
    if len(keep) == len(c.gates):
        return c
    return Circuit(tuple((g, r) for g, r in c.gates if g in keep), c.output)


def substitute(c: Circuit, assignment: Mapping[str, int]) -> Circuit:
    """Replace variables by constants in {-1, 0, 1}."""
    gates = []
    for g, r in c.gates:
        if isinstance(r, Var) and r.name in assignment:
            v = assignment[r.name]
            if v not in (-1, 0, 1):
                raise BadConstant(f"cannot substitute {v} for {r.name}", g)
            r = Const(v)
        gates.append((g, r))
    return Circuit(tuple(gates), c.output)
