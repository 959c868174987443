from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwp.circuit import Add, Circuit, Const, Mul, Var
from cwp.errors import BadLetter, BadParams, InconsistentCosetSystem, UnknownLetter
from cwp.generators import identity_ut_slp, random_circuit, random_ut_slp
from cwp.matrices import GroupAlphabet, Matrix, make_Ga_alphabet, ut_alphabet, ut_letter
from cwp.passes import ExponentSchedule, skew_to_group_slp
from cwp.slp import SlpBuilder, eval_matrix, expand, power_slp, slp_from_word
from cwp.solvers import (
    AcceptsIdentity,
    CosetSystem,
    IsIdentity,
    ModularSolverParams,
    NotIdentity,
    NotInSubgroup,
    RejectsWithPrime,
    coset_permutations,
    pit_schwartz_zippel,
    prime_count_lower_bound,
    random_prime,
    reduce_finite_index,
    residual_error_bound,
    solve_exact,
    solve_linear_modular,
    solve_nilpotent_pipeline,
    solve_ut_exact,
    solve_ut_via_addition_circuits,
    verdict_to_json,
    verify_coset_system,
)

COMMUTATOR = [ut_letter(1), ut_letter(2), ut_letter(1, -1), ut_letter(2, -1), ut_letter(1, -1, 3)]


def sentinel() -> object:
    b = SlpBuilder(empty_letter=ut_letter(1))
    return b.build(b.identity())


class TestExact:
    def test_commutator(self):
        assert solve_ut_exact(slp_from_word(COMMUTATOR), 3) == IsIdentity()

    def test_big_power(self):
        v = solve_ut_exact(power_slp(ut_letter(1), 2**40), 2)
        assert v == NotIdentity(entry=(1, 2), value=2**40)

    def test_sentinel(self):
        assert solve_ut_exact(sentinel(), 2).is_identity

    def test_witness_is_first_in_row_major_order(self):
        g = slp_from_word([ut_letter(2), ut_letter(1, 1, 3)])
        assert solve_ut_exact(g, 3).entry == (1, 3)

    def test_letter_outside_dimension(self):
        with pytest.raises(BadLetter):
            solve_ut_exact(slp_from_word([ut_letter(3)]), 3)

    def test_general_alphabet(self):
        alph = make_Ga_alphabet(2)
        assert solve_exact(slp_from_word(["g", "h", "g^-1", "h^-1", "h", "g", "h^-1", "g^-1"]), alph).is_identity
        v = solve_exact(slp_from_word(["g", "h", "g^-1"]), alph)
        assert v.entry == (1, 2) and v.value == 2


class TestAdditionCircuits:
    def test_identity_values_equal(self):
        v = solve_ut_via_addition_circuits(slp_from_word(COMMUTATOR), 3)
        assert v.is_identity and v.values[0] == v.values[1]

    def test_single_generator(self):
        v = solve_ut_via_addition_circuits(slp_from_word([ut_letter(1)]), 2)
        assert isinstance(v, NotIdentity) and v.values == (1, 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 4), st.integers(1, 15), st.integers(0, 10**6))
    def test_agrees_with_exact(self, d, size, seed):
        make = identity_ut_slp if seed % 3 == 0 else random_ut_slp
        g = make(d, size, seed)
        assert solve_ut_via_addition_circuits(g, d).is_identity == solve_ut_exact(g, d).is_identity


class TestModular:
    def test_identity_always_accepted(self):
        for seed in range(20):
            g = identity_ut_slp(3, 12, seed)
            v = solve_linear_modular(g, ut_alphabet(3), ModularSolverParams(prime_bits=8, trials=10, rng_seed=seed))
            assert isinstance(v, AcceptsIdentity) and v.error_bound is not None

    def test_big_power_rejected(self):
        v = solve_linear_modular(power_slp(ut_letter(1), 2**40), ut_alphabet(2),
                                 ModularSolverParams(prime_bits=61, trials=5))
        assert isinstance(v, RejectsWithPrime)
        assert v.p.bit_length() == 61 and v.residue == 2**40 % v.p and v.trial == 0

    def test_separating_schedule_zero_polynomial(self):
        c = Circuit(
            (("X", Var("x1")), ("M", Const(-1)), ("N", Mul("M", "X")), ("S", Add("X", "N"))), "S"
        )
        for base in (2, "sqrt2"):
            alph = make_Ga_alphabet(base)
            g = skew_to_group_slp(c, alph, ExponentSchedule.paper(c))
            v = solve_linear_modular(g, alph, ModularSolverParams(prime_bits=31, trials=4))
            assert v.is_identity and v.error_bound is None

    def test_separating_schedule_nonzero_polynomial(self):
        c = Circuit((("X", Var("x1")), ("Y", Var("x2")), ("S", Add("X", "Y"))), "S")
        alph = make_Ga_alphabet("sqrt2")
        g = skew_to_group_slp(c, alph, ExponentSchedule.paper(c))
        assert not solve_linear_modular(g, alph, ModularSolverParams(prime_bits=31, trials=4)).is_identity

    def test_jobs_do_not_change_the_verdict(self):
        g = random_ut_slp(3, 14, 5)
        one = solve_linear_modular(g, ut_alphabet(3), ModularSolverParams(prime_bits=16, trials=6, rng_seed=3))
        two = solve_linear_modular(g, ut_alphabet(3), ModularSolverParams(prime_bits=16, trials=6, rng_seed=3, jobs=2))
        assert one == two

    def test_bad_params(self):
        for kw in ({"prime_bits": 7}, {"trials": 0}, {"jobs": 0}):
            with pytest.raises(BadParams):
                ModularSolverParams(**kw)

    def test_unknown_letter(self):
        with pytest.raises(BadLetter):
            solve_linear_modular(slp_from_word(["q"]), ut_alphabet(2))

    def test_random_prime(self):
        rng = random.Random(1)
        for bits in (8, 31, 61):
            p = random_prime(bits, rng, avoid=[2, 3])
            assert p.bit_length() == bits

    def test_error_bound(self):
        assert prime_count_lower_bound(31) > 2**31 / 31 / 2
        b = residual_error_bound(100, 31, 8)
        assert 0 < b < 1e-50
        assert residual_error_bound(10**12, 8, 1) == 1.0


class TestPit:
    def test_zero_and_nonzero(self):
        zero = Circuit((("X", Var("x")), ("M", Const(-1)), ("N", Mul("M", "X")), ("S", Add("X", "N"))), "S")
        assert pit_schwartz_zippel(zero, trials=5).is_zero
        r = pit_schwartz_zippel(random_circuit(10, 2), trials=5)
        assert not r.is_zero and r.value


def z_mod_2() -> tuple[CosetSystem, GroupAlphabet, GroupAlphabet]:
    cs = CosetSystem.from_json({
        "index": 2, "reps": ["", "t"], "action": {"t": [2, 1]},
        "rewrite": {"t|1|2": "", "t|2|1": "u"},
    })
    g = GroupAlphabet.from_generators({"t": Matrix([[1, 1], [0, 1]])})
    h = GroupAlphabet.from_generators({"u": Matrix([[1, 2], [0, 1]])})
    return cs, g, h


def dihedral() -> tuple[CosetSystem, GroupAlphabet, GroupAlphabet]:
    cs = CosetSystem.from_json({
        "index": 2, "reps": ["", "r"], "action": {"t": [1, 2], "r": [2, 1]},
        "rewrite": {"t|1|1": "u", "t|2|2": "u^-1", "r|1|2": "", "r|2|1": ""},
    })
    g = GroupAlphabet.from_generators({"t": Matrix([[1, 1], [0, 1]]), "r": Matrix([[-1, 0], [0, 1]])})
    h = GroupAlphabet.from_generators({"u": Matrix([[1, 1], [0, 1]])})
    return cs, g, h


class TestFiniteIndex:
    def test_odd_word(self):
        cs, _, _ = z_mod_2()
        assert reduce_finite_index(slp_from_word(["t"]), cs) == NotInSubgroup(coset=2)

    def test_t_to_the_fourth(self):
        cs, _, h = z_mod_2()
        out = reduce_finite_index(slp_from_word(["t"] * 4), cs)
        assert expand(out) == ["u", "u"]
        assert not eval_matrix(out, h).is_identity()

    def test_inverse_pair(self):
        cs, _, h = z_mod_2()
        out = reduce_finite_index(slp_from_word(["t", "t^-1"]), cs)
        assert eval_matrix(out, h).is_identity()

    def test_derived_inverse_entries(self):
        cs, g, h = z_mod_2()
        assert cs.action["t^-1"] == (2, 1)
        assert cs.rewrite[("t^-1", 1, 2)] == ("u^-1",)
        verify_coset_system(cs, g, h)

    def test_compressed_input(self):
        cs, _, h = z_mod_2()
        out = reduce_finite_index(power_slp("t", 2**30), cs)
        assert eval_matrix(out, h) == Matrix([[1, 2**30], [0, 1]])
        assert out.size <= 4 * 31

    def test_coset_permutations(self):
        cs, _, _ = dihedral()
        perms = coset_permutations(slp_from_word(["r", "t", "r"]), cs)
        assert perms[max(perms)] in {(1, 2), (2, 1)}

    def test_inconsistent_systems(self):
        with pytest.raises(InconsistentCosetSystem):
            CosetSystem.from_json({"index": 2, "reps": ["", "t"], "action": {"t": [1, 1]}, "rewrite": {}})
        with pytest.raises(InconsistentCosetSystem):
            CosetSystem.from_json({"index": 2, "reps": ["", "t"], "action": {"t": [2, 1]},
                                   "rewrite": {"t|1|2": ""}})
        with pytest.raises(InconsistentCosetSystem):
            CosetSystem.from_json({"index": 2, "reps": ["t", ""], "action": {"t": [2, 1]},
                                   "rewrite": {"t|1|2": "", "t|2|1": "u"}})
        cs, g, _ = z_mod_2()
        wrong = GroupAlphabet.from_generators({"u": Matrix([[1, 3], [0, 1]])})
        with pytest.raises(InconsistentCosetSystem):
            verify_coset_system(cs, g, wrong)
        with pytest.raises(InconsistentCosetSystem):
            CosetSystem.from_json({"index": 2})

    def test_unknown_letter(self):
        cs, _, _ = z_mod_2()
        with pytest.raises(UnknownLetter):
            reduce_finite_index(slp_from_word(["s"]), cs)

    def test_json_roundtrip(self):
        cs, _, _ = dihedral()
        assert CosetSystem.from_json(cs.to_json()) == cs

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.sampled_from(["t", "t^-1", "r", "r^-1"]), min_size=1, max_size=200))
    def test_dihedral_matches_brute_force(self, word):
        cs, g_alph, h_alph = dihedral()
        g = slp_from_word(word)
        value = g_alph.word_value(word)
        out = reduce_finite_index(g, cs)
        if value.entry(1, 1) == -1:
            assert out == NotInSubgroup(coset=2)
        else:
            assert eval_matrix(out, h_alph) == value


class TestPipeline:
    def test_trivial_quotient(self):
        letters = [ut_letter(1), ut_letter(2)]
        cs = CosetSystem(
            index=1, reps=((),), action={a: (1,) for a in letters},
            rewrite={(a, 1, 1): (a,) for a in letters},
        )
        for seed in range(10):
            g = random_ut_slp(3, 10, seed) if seed % 2 else identity_ut_slp(3, 10, seed)
            via = solve_nilpotent_pipeline(g, cs, ut_alphabet(3))
            assert via == solve_ut_exact(g, 3)

    def test_dihedral(self):
        cs, _, _ = dihedral()
        embed = GroupAlphabet.from_generators({"u": Matrix([[1, 1], [0, 1]])}, "ut:2")
        assert solve_nilpotent_pipeline(slp_from_word(["r", "r"]), cs, embed).is_identity
        v = solve_nilpotent_pipeline(slp_from_word(["r"]), cs, embed)
        assert v == NotIdentity(coset=2)
        v = solve_nilpotent_pipeline(slp_from_word(["r", "t", "r", "t", "t"]), cs, embed)
        assert v.entry == (1, 2) and v.value == 1


def test_verdict_json():
    assert verdict_to_json(NotIdentity(entry=(1, 2), value=5)) == {
        "verdict": "NotIdentity", "identity": False, "entry": [1, 2], "value": 5
    }
    assert verdict_to_json(IsIdentity())["identity"] is True
