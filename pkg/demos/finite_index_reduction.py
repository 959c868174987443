"""Word problem in a group via a finite-index subgroup.

G = <t> is infinite cyclic with t = [[1, 1], [0, 1]], and H = <u> with
u = t^2 has index 2.  The coset system in data/z2_cosets.json records how
t permutes the two cosets and which word in u each step contributes.
reduce_finite_index turns an SLP over t into an SLP over u (or reports
that the element lies outside H), and the result is decided in UT(2, Z).

    python demos/finite_index_reduction.py
"""

from __future__ import annotations

import json
from pathlib import Path

from cwp.matrices import GroupAlphabet, Matrix
from cwp.slp import SlpBuilder, eval_matrix
from cwp.solvers import CosetSystem, NotInSubgroup, reduce_finite_index, solve_nilpotent_pipeline, verify_coset_system

DATA = Path(__file__).with_name("data")


def main() -> None:
    cosets = CosetSystem.from_json(json.loads((DATA / "z2_cosets.json").read_text()))
    t = GroupAlphabet.from_generators({"t": Matrix([[1, 1], [0, 1]])})
    u = GroupAlphabet.from_generators({"u": Matrix([[1, 2], [0, 1]])}, "ut:2")
    verify_coset_system(cosets, t, u)

    for exponent in (2**50, 2**50 + 1):
        b = SlpBuilder()
        g = b.build(b.letter_power("t", exponent))
        reduced = reduce_finite_index(g, cosets)
        if isinstance(reduced, NotInSubgroup):
            print(f"t^{exponent}: {reduced}")
        else:
            print(f"t^{exponent}: {g.size} rules -> {reduced.size} rules over u, "
                  f"value {eval_matrix(reduced, u).rows}")
        print(f"  identity? {solve_nilpotent_pipeline(g, cosets, u)}")

    b = SlpBuilder()
    x = b.letter_power("t", 3**30)
    g = b.build(b.concat(x, b.inverse(x)))
    print(f"t^(3^30) t^-(3^30): {solve_nilpotent_pipeline(g, cosets, u)}")


if __name__ == "__main__":
    main()
