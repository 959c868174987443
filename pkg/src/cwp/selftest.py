"""Built-in oracle checks behind ``cwp selftest``.

Each check compares two independent computations on seeded random
instances and prints one ``PASS``/``FAIL`` line.
"""

from __future__ import annotations

import random
import sys
import time
from typing import Callable, TextIO

from .circuit import count_accepting_paths, eval_int, eval_poly_gates, metrics
from .generators import (
    identity_ut_slp,
    random_circuit,
    random_positive_circuit,
    random_skew_circuit,
    random_ut_slp,
)
from .matrices import commutator, make_Ga_alphabet, ut_alphabet, ut_elementary
from .passes import (
    ExponentSchedule,
    circuit_pair_to_ut_slp,
    degree_normalize,
    eliminate_subtraction,
    schedule_point,
    skew_to_group_slp,
)
from .poly import MultiPoly, iterated_multiply
from .slp import eval_matrices, eval_matrix
from .solvers import (
    ModularSolverParams,
    solve_linear_modular,
    solve_ut_exact,
    solve_ut_via_addition_circuits,
)


def _subtraction(n: int, rng: random.Random) -> bool:
    for k in range(n):
        c = random_circuit(rng.randint(2, 30), rng.getrandbits(32))
        c1, c2 = eliminate_subtraction(c)
        for _ in range(3):
            point = {x: rng.randint(-5, 5) for x in c.variables()}
            if eval_int(c1, point) - eval_int(c2, point) != eval_int(c, point):
                return False
    return True


def _paths(n: int, rng: random.Random) -> bool:
    return all(
        count_accepting_paths(c) == eval_int(c)
        for c in (random_positive_circuit(rng.randint(1, 15), rng.getrandbits(32)) for _ in range(n))
    )


def _commutators(n: int, rng: random.Random) -> bool:
    for _ in range(n):
        d = rng.randint(3, 5)
        i, j, k = sorted(rng.sample(range(1, d + 1), 3))
        a, b = rng.randint(-20, 20), rng.randint(-20, 20)
        if commutator(ut_elementary(d, i, j, a), ut_elementary(d, j, k, b)) != ut_elementary(d, i, k, a * b):
            return False
    return True


def _ut_solvers(n: int, rng: random.Random) -> bool:
    for k in range(n):
        d = rng.randint(2, 4)
        make = identity_ut_slp if k % 2 else random_ut_slp
        g = make(d, rng.randint(2, 15), rng.getrandbits(32))
        if solve_ut_exact(g, d).is_identity != solve_ut_via_addition_circuits(g, d).is_identity:
            return False
    return True


def _ut_encoding(n: int, rng: random.Random) -> bool:
    for _ in range(n):
        c1 = random_positive_circuit(rng.randint(1, 8), rng.getrandbits(32))
        c2 = random_positive_circuit(rng.randint(1, 8), rng.getrandbits(32))
        if metrics(c1).formal_degree > 6 or metrics(c2).formal_degree > 6:
            continue
        a1, a2 = degree_normalize(c1, c2)
        d = a1.formal_degree
        m = eval_matrix(circuit_pair_to_ut_slp(a1, a2), ut_alphabet(d + 1))
        if m != ut_elementary(d + 1, 1, d + 1, eval_int(c1) - eval_int(c2)):
            return False
    return True


def _skew_encoding(n: int, rng: random.Random) -> bool:
    for _ in range(n):
        c = random_skew_circuit(rng.randint(1, 10), rng.getrandbits(32), nvars=2)
        alph = make_Ga_alphabet(rng.choice([2, "sqrt2"]))
        sched = ExponentSchedule.test({x: rng.randint(0, 3) for x in c.variables()})
        point = schedule_point(alph, sched)
        names = sorted(c.variables())
        polys = eval_poly_gates(c, variables=names)
        mats = eval_matrices(skew_to_group_slp(c, alph, sched), alph)
        one = alph["g"].rows[1][1]
        for gate, p in polys.items():
            expected = p.evaluate([point[x] for x in names], one=one * 1)
            m = mats[gate]
            if m.rows[0][1] != expected or m.rows[0][0] != 1 or m.rows[1][0] != 0:
                return False
    return True


def _modular(n: int, rng: random.Random) -> bool:
    params = ModularSolverParams(prime_bits=31, trials=4, rng_seed=rng.getrandbits(32))
    for k in range(n):
        d = rng.randint(2, 4)
        g = identity_ut_slp(d, rng.randint(2, 12), rng.getrandbits(32))
        if not solve_linear_modular(g, ut_alphabet(d), params).is_identity:
            return False
    return True


def _kronecker(n: int, rng: random.Random) -> bool:
    for _ in range(n):
        k = rng.randint(1, 3)
        ps = [
            MultiPoly(
                {tuple(rng.randint(0, 3) for _ in range(k)): rng.randint(-5, 5) for _ in range(3)}, k
            )
            for _ in range(rng.randint(1, 4))
        ]
        naive = ps[0]
        for p in ps[1:]:
            naive = naive * p
        if iterated_multiply(ps) != naive:
            return False
    return True


CHECKS: list[tuple[str, Callable[[int, random.Random], bool], int]] = [
    ("subtraction elimination preserves values", _subtraction, 40),
    ("path counts equal circuit values", _paths, 40),
    ("commutators multiply exponents", _commutators, 200),
    ("UT solvers agree", _ut_solvers, 30),
    ("circuit pair encodes value difference", _ut_encoding, 30),
    ("skew encoding matches polynomial values", _skew_encoding, 20),
    ("modular solver accepts identities", _modular, 20),
    ("Kronecker multiplication matches naive product", _kronecker, 40),
]


def run_selftest(seed: int = 0, quick: bool = False, out: TextIO = sys.stdout) -> bool:
    ok = True
    for name, check, n in CHECKS:
        rng = random.Random(f"{seed}/{name}")
        start = time.perf_counter()
        try:
            passed = check(max(2, n // 4) if quick else n, rng)
            note = ""
        except Exception as e:  # a crash is a failure, reported with its type
            passed, note = False, f" ({type(e).__name__}: {e})"
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {name} [{time.perf_counter() - start:.2f}s]{note}", file=out)
    return ok
