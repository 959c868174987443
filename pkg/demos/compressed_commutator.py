"""Decide a compressed commutator identity in UT(3, Z) three ways.

The word [T(1,2)^N, T(2,3)^N] T(1,3)^(-N^2) with N = 2^k is the identity,
but its expansion has length about 2^(2k+1).  The SLP built here has
O(k) rules, and every solver works on it without expanding.

    python demos/compressed_commutator.py 40
"""

from __future__ import annotations

import sys
import time

from cwp.matrices import ut_alphabet, ut_letter
from cwp.slp import SlpBuilder, word_length
from cwp.solvers import (
    ModularSolverParams,
    solve_linear_modular,
    solve_ut_exact,
    solve_ut_via_addition_circuits,
)


def commutator_slp(k: int, defect: int = 0):
    n = 2**k
    b = SlpBuilder()
    x = b.letter_power(ut_letter(1), n)
    y = b.letter_power(ut_letter(2), n)
    z = b.letter_power(ut_letter(1, -1, 3), n * n + defect)
    return b.build(b.word([b.inverse(x), b.inverse(y), x, y, z]))


def timed(label: str, solve) -> None:
    start = time.perf_counter()
    verdict = solve()
    print(f"  {label:<22} {verdict}  ({time.perf_counter() - start:.3f}s)")


def main() -> None:
    k = int(sys.argv[1]) if len(sys.argv) > 1 else 40
    for defect in (0, 1):
        g = commutator_slp(k, defect)
        print(f"k={k} defect={defect}: {g.size} rules, expanded length {word_length(g)}")
        timed("exact", lambda: solve_ut_exact(g, 3))
        params = ModularSolverParams(prime_bits=61, trials=10, rng_seed=1)
        timed("modular", lambda: solve_linear_modular(g, ut_alphabet(3), params))
        if k <= 12:
            timed("addition circuits", lambda: solve_ut_via_addition_circuits(g, 3))


if __name__ == "__main__":
    main()
