"""Value-preserving transformations between circuits and SLPs.

The passes form two pipelines:

* UT_d SLP -> integer circuit -> pair of positive circuits -> pair of
  addition circuits, which decides the SLP's identity question by comparing
  two path counts;
* circuit pair -> UT_{d+1} SLP and skew circuit -> G_a SLP, which go the
  other way and encode arithmetic as group words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .circuit import (
    Add,
    Circuit,
    CircuitBuilder,
    Const,
    MonoMul,
    Mul,
    Var,
    children,
    gate_metrics,
    is_positive,
    is_powerful_skew,
    is_skew,
    prune,
    validate,
)
from .errors import (
    BadLetter,
    BadPartition,
    DegreeMismatch,
    NotPositive,
    NotPowerfulSkew,
    NotSkew,
    NotVariableFree,
    ScheduleTooShort,
)
from .matrices import GroupAlphabet, Ga_base, parse_ut_letter, ut_letter
from .slp import Slp, SlpBuilder, Terminal, prune_slp, validate_slp


def _free_prefix(taken: Iterable[str], base: str) -> str:
    """A prefix that no existing id starts with, so fresh names never clash."""
    taken = list(taken)
    prefix = base
    while any(t.startswith(prefix) for t in taken):
        prefix += "_"
    return prefix


# ---------------------------------------------------------------------------
# Partitioned circuits


@dataclass(frozen=True)
class PartitionedCircuit:
    """A circuit with its multiplication gates split into classes V_1..V_d.

    ``classes[k]`` holds V_{k+1}.  The partition is structure-preserving when
    every multiplication gate below a gate of V_j lies in some V_i, i < j.
    """

    circuit: Circuit
    classes: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", tuple(frozenset(v) for v in self.classes))

    @property
    def d(self) -> int:
        return len(self.classes)

    def class_of(self) -> dict[str, int]:
        return {g: k + 1 for k, vs in enumerate(self.classes) for g in vs}

    def to_lists(self) -> list[list[str]]:
        order = {g: n for n, (g, _) in enumerate(self.circuit.gates)}
        return [sorted(vs, key=order.__getitem__) for vs in self.classes]


def check_partition(pc: PartitionedCircuit) -> None:
    """Raise :class:`BadPartition` unless the classes partition the Mul gates
    and the partition is structure-preserving."""
    c = pc.circuit
    rhs = c.rhs
    cls: dict[str, int] = {}
    for k, vs in enumerate(pc.classes, start=1):
        for g in vs:
            if g in cls:
                raise BadPartition(f"gate {g!r} is in classes V_{cls[g]} and V_{k}")
            if not isinstance(rhs.get(g), Mul):
                raise BadPartition(f"{g!r} in V_{k} is not a multiplication gate")
            cls[g] = k
    # below[g]: the largest class of a Mul gate in the cone of g (0 if none).
    below: dict[str, int] = {}
    for g, r in c.gates:
        under = max((below[ch] for ch in children(r)), default=0)
        if isinstance(r, Mul):
            if g not in cls:
                raise BadPartition(f"multiplication gate {g!r} is in no class")
            if under >= cls[g]:
                raise BadPartition(
                    f"gate {g!r} in V_{cls[g]} lies above a gate of V_{under}; "
                    "partition is not structure-preserving"
                )
            under = cls[g]
        elif isinstance(r, MonoMul):
            raise BadPartition(f"gate {g!r} is a powerful multiplication gate")
        below[g] = under


def is_structure_preserving(pc: PartitionedCircuit) -> bool:
    try:
        check_partition(pc)
    except BadPartition:
        return False
    return True


# ---------------------------------------------------------------------------
# Subtraction elimination


def _split_gate(g: str) -> tuple[str, str]:
    return f"{g}/1", f"{g}/2"


def _eliminate(c: Circuit, cls: Mapping[str, int]):
    validate(c)
    b = CircuitBuilder(prefix=_free_prefix(c.ids, "_e"))
    new_cls: dict[str, int] = {}
    for g, r in c.gates:
        g1, g2 = _split_gate(g)
        if isinstance(r, Const):
            if r.value == -1:
                b.const(0, g1)
                b.const(1, g2)
            else:
                b.const(r.value, g1)
                b.const(0, g2)
        elif isinstance(r, Var):
            b.var(r.name, g1)
            b.const(0, g2)
        elif isinstance(r, Add):
            (l1, l2), (r1, r2) = _split_gate(r.left), _split_gate(r.right)
            b.add(l1, r1, g1)
            b.add(l2, r2, g2)
        elif isinstance(r, Mul):
            (l1, l2), (r1, r2) = _split_gate(r.left), _split_gate(r.right)
            prods = [b.mul(l1, r1), b.mul(l2, r2), b.mul(l1, r2), b.mul(l2, r1)]
            if g in cls:
                for p in prods:
                    new_cls[p] = cls[g]
            b.add(prods[0], prods[1], g1)
            b.add(prods[2], prods[3], g2)
        else:
            o1, o2 = _split_gate(r.operand)
            coeff = abs(r.coeff)
            if r.coeff < 0:
                o1, o2 = o2, o1
            b.gate(MonoMul(coeff, r.powers, o1), g1)
            b.gate(MonoMul(coeff, r.powers, o2), g2)
    out1, out2 = _split_gate(c.output)
    c1 = prune(b.build(out1))
    c2 = prune(b.build(out2))
    return c1, c2, new_cls


def eliminate_subtraction(c: Circuit) -> tuple[Circuit, Circuit]:
    """Two circuits without the constant -1 whose difference equals ``c``.

    Every gate A becomes a pair (A/1, A/2) with val(A) = val(A/1) - val(A/2);
    a product splits as (B1 C1 + B2 C2, B1 C2 + B2 C1).
    """
    c1, c2, _ = _eliminate(c, {})
    return c1, c2


def eliminate_subtraction_partitioned(
    pc: PartitionedCircuit,
) -> tuple[PartitionedCircuit, PartitionedCircuit]:
    """As :func:`eliminate_subtraction`; each new product inherits the class
    of the product it came from."""
    c1, c2, cls = _eliminate(pc.circuit, pc.class_of())
    d = pc.d

    def classes_for(c: Circuit) -> tuple[frozenset[str], ...]:
        buckets: list[set[str]] = [set() for _ in range(d)]
        for g in c.mul_gates():
            buckets[cls[g] - 1].add(g)
        return tuple(frozenset(v) for v in buckets)

    return PartitionedCircuit(c1, classes_for(c1)), PartitionedCircuit(c2, classes_for(c2))


# ---------------------------------------------------------------------------
# UT_d SLP -> circuit


def entry_gate(var: str, i: int, j: int) -> str:
    """Name of the gate holding entry (i, j) of the matrix of ``var``."""
    return f"{var}[{i},{j}]"


def slp_to_circuit(g: Slp, d: int) -> PartitionedCircuit:
    """A variable-free circuit whose value is the sum of squares of the
    strictly upper entries of val(g) in UT_d(Z).

    The value is 0 exactly when g evaluates to the identity.  Gate
    ``entry_gate(A, i, j)`` computes entry (i, j) of val(A).  Products
    B[i,k]*C[k,j] go to class j - i and the output squares to class d.
    """
    validate_slp(g)
    if d < 2:
        raise BadLetter("UT_d needs d >= 2")
    taken = [entry_gate(v, 1, 2) for v, _ in g.rules]
    b = CircuitBuilder(prefix=_free_prefix(taken + ["T"], "_c"))
    classes: list[set[str]] = [set() for _ in range(d)]
    pairs = [(i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1)]
    for var, rhs in g.rules:
        if isinstance(rhs, Terminal):
            k, m, sign = parse_ut_letter(rhs.letter)
            if m > d:
                raise BadLetter(f"letter {rhs.letter!r} is not an element of UT_{d}")
            for i, j in pairs:
                b.const(sign if (i, j) == (k, m) else 0, entry_gate(var, i, j))
            continue
        B, C = rhs.left, rhs.right
        for i, j in pairs:
            terms = [entry_gate(B, i, j), entry_gate(C, i, j)]
            for k in range(i + 1, j):
                p = b.mul(entry_gate(B, i, k), entry_gate(C, k, j))
                classes[j - i - 1].add(p)
                terms.append(p)
            b.sum(terms, entry_gate(var, i, j))
    squares = []
    for i, j in pairs:
        s = entry_gate(g.start, i, j)
        sq = b.mul(s, s)
        classes[d - 1].add(sq)
        squares.append(sq)
    out = b.sum(squares, _free_prefix(taken, "T"))
    return PartitionedCircuit(b.build(out), tuple(frozenset(v) for v in classes))


# ---------------------------------------------------------------------------
# Multiplication-depth reduction


def _require_counting_circuit(c: Circuit) -> None:
    validate(c)
    for g, r in c.gates:
        if isinstance(r, Var):
            raise NotVariableFree(f"gate {g!r} is the variable {r.name}")
        if isinstance(r, MonoMul):
            raise NotVariableFree(f"gate {g!r} is a powerful multiplication gate")
        if isinstance(r, Const) and r.value == -1:
            raise NotPositive(f"gate {g!r} is the constant -1")


def canonical_constants(c: Circuit) -> tuple[Circuit, str, str]:
    """Rewrite ``c`` so that exactly one gate holds 0 and one holds 1.

    Returns the new circuit and the ids of the 0 and 1 gates, which come
    first in declaration order.
    """
    zero = _free_prefix(c.ids, "_zero")
    one = _free_prefix(c.ids, "_one")
    target = {}
    for g, r in c.gates:
        if isinstance(r, Const):
            target[g] = zero if r.value == 0 else one
    gates: list[tuple[str, object]] = [(zero, Const(0)), (one, Const(1))]
    for g, r in c.gates:
        if g in target:
            continue
        if isinstance(r, (Add, Mul)):
            r = type(r)(target.get(r.left, r.left), target.get(r.right, r.right))
        gates.append((g, r))
    out = target.get(c.output, c.output)
    return Circuit(tuple(gates), out), zero, one


def reduce_mdepth_once(pc: PartitionedCircuit, copy_all: bool = False) -> PartitionedCircuit:
    """Remove the multiplication gates of V_1 without changing the value.

    For the i-th gate A_i = B_i * C_i of V_1, a copy of the circuit is made in
    which the 1-gate is replaced by C_i and copies of products are 0; then
    A_i becomes B_i^(i) + 0.  Counting paths, B_i^(i) = val(B_i) * val(C_i).
    Classes shift down by one.

    With ``copy_all`` every gate is copied.  Otherwise only gates lying on an
    addition-only path from 1 to B_i are copied (the others are 0 in the copy)
    and sums with a zero copy collapse onto the other summand.
    """
    c = pc.circuit
    _require_counting_circuit(c)
    check_partition(pc)
    if pc.d == 0:
        return pc
    c, zero, one = canonical_constants(c)
    rhs = c.rhs
    v1 = pc.classes[0]
    b = CircuitBuilder(prefix=_free_prefix(c.ids, "_r"), reserved=c.ids)

    # Gates whose addition-only cone contains the 1-gate.
    lit: set[str] = set()
    if not copy_all:
        for g, r in c.gates:
            if g == one or (isinstance(r, Add) and (r.left in lit or r.right in lit)):
                lit.add(g)

    for g, r in c.gates:
        if g not in v1:
            b.gate(r, g)
            continue
        copy: dict[str, str] = {}
        if copy_all:
            for h, s in c.gates:
                if h == one:
                    copy[h] = b.add(r.right, zero)
                elif isinstance(s, Add):
                    copy[h] = b.add(copy[s.left], copy[s.right])
                else:
                    copy[h] = b.const(0)
        else:
            for h in _lit_cone(c, r.left, lit):
                if h == one:
                    copy[h] = r.right
                    continue
                s = rhs[h]
                left, right = copy.get(s.left), copy.get(s.right)
                copy[h] = b.add(left, right) if left and right else (left or right)
        b.add(copy.get(r.left, zero), zero, g)
    classes = pc.classes[1:]
    return PartitionedCircuit(b.build(c.output), classes)


def _lit_cone(c: Circuit, root: str, lit: set[str]) -> list[str]:
    """Gates of ``lit`` reachable from ``root`` through addition gates, in
    declaration order."""
    rhs = c.rhs
    seen: set[str] = set()
    pending = [root] if root in lit else []
    while pending:
        h = pending.pop()
        if h in seen:
            continue
        seen.add(h)
        r = rhs[h]
        if isinstance(r, Add):
            pending.extend(x for x in (r.left, r.right) if x in lit)
    order = {g: n for n, g in enumerate(c.ids)}
    return sorted(seen, key=order.__getitem__)


def to_addition_circuit(pc: PartitionedCircuit, copy_all: bool = False) -> Circuit:
    """Apply :func:`reduce_mdepth_once` once per class; the result has no
    multiplication gates and the same value."""
    for _ in range(pc.d):
        pc = reduce_mdepth_once(pc, copy_all=copy_all)
    _require_counting_circuit(pc.circuit)
    if pc.circuit.mul_gates():
        raise BadPartition("multiplication gates remain after reducing every class")
    return prune(pc.circuit)


# ---------------------------------------------------------------------------
# Circuit pair -> UT_{d+1} SLP


@dataclass(frozen=True)
class DegreeAnnotatedCircuit:
    """A positive circuit labelled with formal degrees in which every
    addition gate has children of its own degree."""

    circuit: Circuit
    degree: Mapping[str, int]
    padding: frozenset[str] = field(default_factory=frozenset)

    @property
    def formal_degree(self) -> int:
        return self.degree[self.circuit.output]

    def check(self) -> None:
        actual = gate_metrics(self.circuit).degree
        if dict(self.degree) != actual:
            raise DegreeMismatch("degree labels disagree with recomputed formal degrees")
        for g, r in self.circuit.gates:
            if isinstance(r, Add) and not (actual[r.left] == actual[r.right] == actual[g]):
                raise DegreeMismatch(f"addition gate {g!r} has children of unequal degree")


def degree_normalize(
    c1: Circuit, c2: Circuit
) -> tuple[DegreeAnnotatedCircuit, DegreeAnnotatedCircuit]:
    """Pad with multiplications by 1 so both outputs share a formal degree
    and every addition gate has equal-degree children."""
    for c in (c1, c2):
        validate(c)
        if not is_positive(c):
            raise NotPositive("degree normalization needs positive circuits")
        if any(isinstance(r, MonoMul) for _, r in c.gates):
            raise NotPositive("powerful multiplication gates are not supported here")
    target = max(gate_metrics(c1).degree[c1.output], gate_metrics(c2).degree[c2.output])
    return _pad(c1, target), _pad(c2, target)


def _pad(c: Circuit, target: int) -> DegreeAnnotatedCircuit:
    deg = gate_metrics(c).degree
    pad_prefix = _free_prefix(c.ids, "pad")
    b = CircuitBuilder(prefix=pad_prefix, reserved=c.ids)
    new_deg = dict(deg)
    padded: dict[tuple[str, int], str] = {}
    one: list[str] = []

    def lift(g: str, k: int) -> str:
        """A gate with the value of g and degree deg(g) + k."""
        if k == 0:
            return g
        if (g, k) in padded:
            return padded[(g, k)]
        if not one:
            one.append(b.const(1))
            new_deg[one[0]] = 1
        below = lift(g, k - 1)
        p = b.mul(below, one[0])
        new_deg[p] = new_deg[below] + 1
        padded[(g, k)] = p
        return p

    for g, r in c.gates:
        if isinstance(r, Add):
            dl, dr = deg[r.left], deg[r.right]
            top = max(dl, dr)
            r = Add(lift(r.left, top - dl), lift(r.right, top - dr))
        b.gate(r, g)
    out = lift(c.output, target - deg[c.output])
    circuit = b.build(out)
    pads = frozenset(g for g, _ in circuit.gates if g.startswith(pad_prefix))
    ann = DegreeAnnotatedCircuit(circuit, {g: new_deg[g] for g in circuit.ids}, pads)
    return ann


def _ut_var(tag: str, gate: str, i: int, j: int, b: int) -> str:
    return f"{tag}{gate}[{i},{j}]^{b:+d}"


def circuit_pair_to_ut_slp(a1: DegreeAnnotatedCircuit, a2: DegreeAnnotatedCircuit) -> Slp:
    """An SLP over the generators of UT_{d+1}(Z) with value T_{1,d+1}^(v1 - v2),
    where d is the common formal degree and v1, v2 the circuit values.

    Variable A[i,j]^b (j - i = deg A) derives T_{i,j}^(b * val(A)); a product
    gate is the commutator of its children's matrices.
    """
    if a1.formal_degree != a2.formal_degree:
        raise DegreeMismatch(
            f"formal degrees differ: {a1.formal_degree} and {a2.formal_degree}"
        )
    for a in (a1, a2):
        a.check()
        for g, r in a.circuit.gates:
            if isinstance(r, Var):
                raise NotVariableFree(f"gate {g!r} is the variable {r.name}")
            if isinstance(r, Const) and r.value == -1:
                raise NotPositive(f"gate {g!r} is the constant -1")
    d = a1.formal_degree
    dim = d + 1
    b = SlpBuilder(prefix="_u", empty_letter=ut_letter(1))
    names: dict[tuple[str, str, int, int], str] = {}

    def encode(tag: str, a: DegreeAnnotatedCircuit) -> None:
        deg = a.degree
        for g, r in a.circuit.gates:
            k = deg[g]
            for i in range(1, dim - k + 1):
                j = i + k
                for s in (1, -1):
                    name = _ut_var(tag, g, i, j, s)
                    if isinstance(r, Const):
                        if r.value == 0:
                            names[(tag, g, i, s)] = b.identity()
                        else:
                            names[(tag, g, i, s)] = b.terminal(ut_letter(i, s))
                        continue
                    if isinstance(r, Add):
                        parts = [names[(tag, r.left, i, s)], names[(tag, r.right, i, s)]]
                    else:
                        m = i + deg[r.left]
                        bp, bm = names[(tag, r.left, i, 1)], names[(tag, r.left, i, -1)]
                        cp, cm = names[(tag, r.right, m, 1)], names[(tag, r.right, m, -1)]
                        parts = [bm, cm, bp, cp] if s == 1 else [cm, bm, cp, bp]
                    names[(tag, g, i, s)] = b.word(parts, name)

    encode("L:", a1)
    encode("R:", a2)
    left = names[("L:", a1.circuit.output, 1, 1)]
    right = names[("R:", a2.circuit.output, 1, -1)]
    top = b.concat(left, right, "S")
    return prune_slp(b.build(top))


# ---------------------------------------------------------------------------
# Skew circuits -> G_a SLPs


@dataclass(frozen=True)
class ExponentSchedule:
    """Exponent E_x for every circuit variable x; the variable is then
    evaluated at alpha_x = a^(E_x)."""

    exponents: Mapping[str, int]

    @classmethod
    def paper(cls, c: Circuit) -> ExponentSchedule:
        """E_i = 2^(i * n^2) for the i-th variable (sorted by name), n = gate count.

        These points are far enough apart that a nonzero skew polynomial
        cannot vanish there, at the price of astronomically large numbers.
        """
        n = len(c.gates)
        return cls({x: 1 << (i * n * n) for i, x in enumerate(c.variables(), start=1)})

    @classmethod
    def test(cls, values: Mapping[str, int]) -> ExponentSchedule:
        return cls(dict(values))

    def exponent(self, var: str) -> int:
        try:
            return self.exponents[var]
        except KeyError:
            raise ScheduleTooShort(f"schedule has no exponent for variable {var!r}") from None

    def point(self, a) -> dict[str, object]:
        return {x: a ** e for x, e in self.exponents.items()}

    def is_increasing(self, order: Sequence[str]) -> bool:
        es = [self.exponents[x] for x in order]
        return all(x < y for x, y in zip(es, es[1:]))


def _check_schedule(c: Circuit, sched: ExponentSchedule) -> None:
    for x in c.variables():
        sched.exponent(x)


class _GaEncoder:
    """Shared machinery for the skew and powerful-skew encoders."""

    def __init__(self, c: Circuit, alph: GroupAlphabet, sched: ExponentSchedule) -> None:
        for a in ("g", "h"):
            if a not in alph:
                raise BadLetter(f"alphabet has no letter {a!r}")
        self.c = c
        self.sched = sched
        self.b = SlpBuilder(prefix=_free_prefix(c.ids, "_s"), empty_letter="h")
        self.val: dict[str, str] = {}

    def conjugate(self, exponent: int, inner: str, name: str | None) -> str:
        """g^e . inner . g^-e (just ``inner`` when e = 0)."""
        if exponent == 0:
            return inner if name is None else self.b.alias(inner, name)
        up = self.b.letter_power("g", exponent)
        down = self.b.inverse(up)
        return self.b.word([up, inner, down], name)

    def leaf(self, g: str, r) -> None:
        b = self.b
        if isinstance(r, Const):
            if r.value == 0:
                self.val[g] = b.alias(b.identity(), g)
            else:
                self.val[g] = b.alias(b.terminal("h" if r.value == 1 else "h^-1"), g)
        else:
            self.val[g] = self.conjugate(self.sched.exponent(r.name), b.terminal("h"), g)

    def scaled(self, g: str, factor: str, operand: str) -> None:
        """Gate g = factor * operand where ``factor`` is an input gate."""
        f = self.c.rhs[factor]
        inner = self.val[operand]
        b = self.b
        if isinstance(f, Var):
            self.val[g] = self.conjugate(self.sched.exponent(f.name), inner, g)
        elif f.value == 0:
            self.val[g] = b.alias(b.identity(), g)
        elif f.value == 1:
            self.val[g] = b.alias(inner, g)
        else:
            self.val[g] = b.alias(b.inverse(inner), g)

    def add(self, g: str, r: Add) -> None:
        self.val[g] = self.b.concat(self.val[r.left], self.val[r.right], g)

    def result(self) -> Slp:
        return self.b.build(self.val[self.c.output])


def _skew_factor(c: Circuit, r: Mul) -> tuple[str, str] | None:
    """(input operand, other operand), preferring a variable as the factor."""
    rhs = c.rhs
    left_in = isinstance(rhs[r.left], (Const, Var))
    right_in = isinstance(rhs[r.right], (Const, Var))
    if left_in and (isinstance(rhs[r.left], Var) or not right_in):
        return r.left, r.right
    if right_in:
        return r.right, r.left
    return None


def skew_to_group_slp(c: Circuit, alph: GroupAlphabet, sched: ExponentSchedule) -> Slp:
    """Encode a skew circuit as an SLP over g, h and their inverses.

    Gate A derives [[1, p_A(alpha)], [0, 1]] where p_A is the polynomial
    computed at A and alpha_x = a^(E_x): constants become Id, h or h^-1,
    sums become concatenation, and x * B becomes g^E B g^-E.
    """
    validate(c)
    if not is_skew(c):
        raise NotSkew("some multiplication gate has no input-gate operand")
    _check_schedule(c, sched)
    enc = _GaEncoder(c, alph, sched)
    for g, r in c.gates:
        if isinstance(r, (Const, Var)):
            enc.leaf(g, r)
        elif isinstance(r, Add):
            enc.add(g, r)
        else:
            factor, operand = _skew_factor(c, r)
            enc.scaled(g, factor, operand)
    return enc.result()


def expand_powerful(c: Circuit) -> Circuit:
    """Rewrite every ``coeff * M * B`` with coefficient 1.

    ``coeff * B`` becomes a doubling-and-adding sum of copies of B (times -1
    for negative coefficients), so the monomial gate itself has coefficient 1.
    """
    validate(c)
    b = CircuitBuilder(prefix=_free_prefix(c.ids, "_k"), reserved=c.ids)
    for g, r in c.gates:
        if not isinstance(r, MonoMul) or r.coeff == 1:
            b.gate(r, g)
            continue
        if r.coeff == 0:
            b.const(0, g)
            continue
        inner = _scale(b, r.operand, abs(r.coeff))
        if r.coeff < 0:
            inner = b.mul(b.const(-1), inner)
        b.gate(MonoMul(1, r.powers, inner), g)
    return b.build(c.output)


def _scale(b: CircuitBuilder, g: str, k: int) -> str:
    """A gate computing k * val(g) for k >= 1 using O(log k) additions."""
    acc = None
    power = g
    while True:
        if k & 1:
            acc = power if acc is None else b.add(acc, power)
        k >>= 1
        if not k:
            return acc
        power = b.add(power, power)


normalize_coefficients = expand_powerful


def powerful_skew_to_group_slp(
    c: Circuit, alph: GroupAlphabet, sched: ExponentSchedule
) -> Slp:
    """Like :func:`skew_to_group_slp`, with ``prod x_i^e_i * B`` encoded as
    conjugation of B by g^(sum_i e_i E_i)."""
    validate(c)
    if not is_powerful_skew(c):
        raise NotPowerfulSkew("some multiplication gate is neither skew nor a monomial product")
    c = expand_powerful(c)
    _check_schedule(c, sched)
    for _, r in c.gates:
        if isinstance(r, MonoMul):
            for x, _e in r.powers:
                sched.exponent(x)
    enc = _GaEncoder(c, alph, sched)
    for g, r in c.gates:
        if isinstance(r, (Const, Var)):
            enc.leaf(g, r)
        elif isinstance(r, Add):
            enc.add(g, r)
        elif isinstance(r, Mul):
            factor, operand = _skew_factor(c, r)
            enc.scaled(g, factor, operand)
        else:
            total = sum(e * sched.exponent(x) for x, e in r.powers)
            enc.val[g] = enc.conjugate(total, enc.val[r.operand], g)
    return enc.result()


def schedule_point(alph: GroupAlphabet, sched: ExponentSchedule) -> dict[str, object]:
    """The evaluation point alpha_x = a^(E_x) for the alphabet's base a."""
    return sched.point(Ga_base(alph))
