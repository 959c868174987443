"""Seeded random instances for tests, demos and the ``gen`` subcommand.

Every generator takes an explicit seed and builds its own
:class:`random.Random`, so the same arguments always give the same instance.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable

from .circuit import Add, Circuit, CircuitBuilder, Const, MonoMul, Mul, Var
from .errors import BadKind
from .matrices import ut_letter
from .slp import Slp, SlpBuilder


def _pick(rng: random.Random, pool: list[str]) -> str:
    # Favour recent gates so that depth grows with size.
    if len(pool) > 3 and rng.random() < 0.6:
        return rng.choice(pool[-3:])
    return rng.choice(pool)


def random_circuit(
    size: int,
    seed: int,
    nvars: int = 3,
    constants: tuple[int, ...] = (-1, 0, 1),
    mul_rate: float = 0.4,
) -> Circuit:
    """A random circuit with ``size`` gates over ``x1..x{nvars}``."""
    rng = random.Random(seed)
    b = CircuitBuilder(prefix="g")
    pool: list[str] = []
    n_inputs = max(1, min(size, rng.randint(2, 4) + nvars // 2))
    for k in range(n_inputs):
        if nvars and (k < nvars or rng.random() < 0.5):
            pool.append(b.var(f"x{rng.randint(1, nvars)}"))
        else:
            pool.append(b.const(rng.choice(constants)))
    while len(pool) < size:
        l, r = _pick(rng, pool), _pick(rng, pool)
        pool.append(b.mul(l, r) if rng.random() < mul_rate else b.add(l, r))
    return b.build(pool[-1])


def random_positive_circuit(size: int, seed: int, mul_rate: float = 0.3) -> Circuit:
    """Variable-free, constants 0 and 1 only."""
    return random_circuit(size, seed, nvars=0, constants=(0, 1, 1), mul_rate=mul_rate)


def random_addition_circuit(size: int, seed: int) -> Circuit:
    return random_circuit(size, seed, nvars=0, constants=(0, 1, 1), mul_rate=0.0)


def random_skew_circuit(size: int, seed: int, nvars: int = 3, mul_rate: float = 0.4) -> Circuit:
    """Every product has an input gate (variable or constant) as one operand."""
    rng = random.Random(seed)
    b = CircuitBuilder(prefix="g")
    inputs: list[str] = []
    pool: list[str] = []
    n_inputs = max(1, min(size, nvars + rng.randint(1, 2)))
    for k in range(n_inputs):
        if nvars and (k < nvars or rng.random() < 0.5):
            g = b.var(f"x{(k % nvars) + 1 if k < nvars else rng.randint(1, nvars)}")
        else:
            g = b.const(rng.choice((-1, 0, 1)))
        inputs.append(g)
        pool.append(g)
    while len(pool) < size:
        other = _pick(rng, pool)
        if rng.random() < mul_rate:
            factor = rng.choice(inputs)
            pair = (factor, other) if rng.random() < 0.5 else (other, factor)
            pool.append(b.mul(*pair))
        else:
            pool.append(b.add(other, _pick(rng, pool)))
    return b.build(pool[-1])


def random_powerful_circuit(
    size: int, seed: int, nvars: int = 3, max_exp: int = 3, max_coeff: int = 3
) -> Circuit:
    """Skew circuit whose products may be ``coeff * prod x_i^e_i * B``."""
    rng = random.Random(seed)
    base = random_skew_circuit(size, seed, nvars)
    b = CircuitBuilder(prefix="m", reserved=base.ids)
    names = [f"x{i}" for i in range(1, nvars + 1)]
    for g, r in base.gates:
        if isinstance(r, Mul) and names and rng.random() < 0.5:
            operand = r.right if isinstance(base.rhs[r.left], (Const, Var)) else r.left
            k = rng.randint(0, min(2, len(names)))
            chosen = sorted(rng.sample(names, k))
            powers = tuple((x, rng.randint(0, max_exp)) for x in chosen)
            coeff = rng.randint(-max_coeff, max_coeff)
            b.gate(MonoMul(coeff, powers, operand), g)
        else:
            b.gate(r, g)
    return b.build(base.output)


def _random_ut_slp_into(b: SlpBuilder, rng: random.Random, d: int, size: int) -> str:
    pool: list[str] = []
    n_terms = min(size, rng.randint(1, 2 * (d - 1)))
    for _ in range(n_terms):
        pool.append(b.terminal(ut_letter(rng.randint(1, d - 1), rng.choice((1, -1)))))
    for _ in range(size - n_terms):
        pool.append(b.concat(_pick(rng, pool), _pick(rng, pool)))
    return pool[-1]


def random_ut_slp(d: int, size: int, seed: int) -> Slp:
    """A random SLP over the generators of UT_d(Z) with ``size`` rules."""
    rng = random.Random(seed)
    b = SlpBuilder(prefix="A", empty_letter=ut_letter(1))
    return b.build(_random_ut_slp_into(b, rng, d, max(1, size)))


def identity_ut_slp(d: int, size: int, seed: int) -> Slp:
    """A random SLP over UT_d(Z) that evaluates to the identity.

    Either ``W W^-1`` or a commutator nested d - 1 times (UT_d is nilpotent
    of class d - 1, so such commutators vanish).
    """
    rng = random.Random(seed)
    b = SlpBuilder(prefix="A", empty_letter=ut_letter(1))
    if d == 2 or rng.random() < 0.4:
        w = _random_ut_slp_into(b, rng, d, max(1, size // 2))
        return b.build(b.concat(w, b.inverse(w)))
    part = max(1, size // (2 * d))
    acc = _random_ut_slp_into(b, rng, d, part)
    for _ in range(d - 1):
        y = _random_ut_slp_into(b, rng, d, part)
        acc = b.word([b.inverse(acc), b.inverse(y), acc, y])
    return b.build(acc)


def _ut_kind(size: int, seed: int, d: int = 3, **_: object) -> Slp:
    return random_ut_slp(d, size, seed)


GENERATORS: dict[str, Callable[..., Circuit | Slp]] = {
    "slp-ut": _ut_kind,
    "circuit": lambda size, seed, vars=3, **_: random_circuit(size, seed, nvars=vars),
    "skew": lambda size, seed, vars=3, **_: random_skew_circuit(size, seed, nvars=vars),
    "powerful": lambda size, seed, vars=3, **_: random_powerful_circuit(size, seed, nvars=vars),
    "addition": lambda size, seed, **_: random_addition_circuit(size, seed),
    "positive": lambda size, seed, **_: random_positive_circuit(size, seed),
}


def gen_instance(kind: str, size: int, seed: int, **options: int) -> Circuit | Slp:
    """Dispatch on ``kind``; options are ``d`` (for slp-ut) and ``vars``."""
    try:
        make = GENERATORS[kind]
    except KeyError:
        raise BadKind(f"unknown kind {kind!r}; choose from {', '.join(GENERATORS)}") from None
    return make(size, seed, **options)


def all_positive_circuits(max_gates: int):
    """Every positive variable-free circuit with at most ``max_gates`` gates,
    up to gate naming, whose output is the last gate and whose gates all feed
    the output.  Inputs come first; children are unordered pairs."""
    for n in range(1, max_gates + 1):
        for n_in in range(1, n + 1):
            yield from _enumerate(n, n_in)


def _enumerate(n: int, n_in: int):
    names = [f"g{k}" for k in range(n)]
    for consts in itertools.combinations_with_replacement((0, 1), n_in):
        prefix = [(names[k], Const(v)) for k, v in enumerate(consts)]

        def extend(gates: list, k: int):
            if k == n:
                c = Circuit(tuple(gates), names[n - 1])
                used = {ch for _, r in gates for ch in _kids(r)}
                if all(g in used for g, _ in gates[:-1]):
                    yield c
                return
            for i in range(k):
                for j in range(i, k):
                    for op in (Add, Mul):
                        gates.append((names[k], op(names[i], names[j])))
                        yield from extend(gates, k + 1)
                        gates.pop()

        yield from extend(list(prefix), n_in)


def _kids(r) -> tuple[str, ...]:
    if isinstance(r, (Add, Mul)):
        return (r.left, r.right)
    return ()
