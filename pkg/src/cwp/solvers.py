"""Decision procedures for the compressed word problem.

* exact evaluation (any alphabet, in particular UT_d(Z));
* the addition-circuit route for UT_d(Z), which reduces the question to
  comparing two path counts;
* a one-sided randomized test that evaluates modulo random primes;
* rewriting an SLP over G into one over a finite-index normal subgroup H.
"""

from __future__ import annotations

import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from sympy import isprime

from .circuit import Circuit, eval_int, eval_mod, gate_metrics, validate
from .errors import (
    BadLetter,
    BadParams,
    InconsistentCosetSystem,
    UnknownLetter,
)
from .matrices import GroupAlphabet, Matrix, QuadInt, inverse_letter, parse_ut_letter, ut_alphabet
from .passes import eliminate_subtraction_partitioned, slp_to_circuit, to_addition_circuit
from .slp import Concat, Slp, SlpBuilder, Terminal, eval_matrix, eval_matrix_mod, validate_slp, word_length


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class IsIdentity:
    values: tuple[int, int] | None = None

    is_identity = True


@dataclass(frozen=True)
class NotIdentity:
    """``entry`` is a 1-based position where the matrix differs from the
    identity, ``value`` the entry there.  The addition-circuit route reports
    the two unequal path counts in ``values`` instead; a nontrivial coset
    is reported in ``coset``."""

    entry: tuple[int, int] | None = None
    value: object = None
    values: tuple[int, int] | None = None
    coset: int | None = None

    is_identity = False


@dataclass(frozen=True)
class AcceptsIdentity:
    """No trial found a witness.  ``error_bound`` bounds the probability
    of this answer for a non-identity input, when such a bound is known."""

    trials: int
    prime_bits: int
    error_bound: float | None = None

    is_identity = True


@dataclass(frozen=True)
class RejectsWithPrime:
    p: int
    trial: int
    entry: tuple[int, int]
    residue: object

    is_identity = False


@dataclass(frozen=True)
class NotInSubgroup:
    coset: int

    is_identity = False


Verdict = Union[IsIdentity, NotIdentity, AcceptsIdentity, RejectsWithPrime, NotInSubgroup]


def verdict_to_json(v: Verdict) -> dict:
    out: dict = {"verdict": type(v).__name__, "identity": v.is_identity}
    for k, x in vars(v).items():
        if x is None:
            continue
        out[k] = _jsonable(x)
    return out


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    if isinstance(x, (QuadInt, Fraction)):
        return str(x)
    return x


# ---------------------------------------------------------------------------
# Exact solvers


def _first_difference(m: Matrix) -> tuple[tuple[int, int], object] | None:
    for i, row in enumerate(m.rows):
        for j, x in enumerate(row):
            if x != (1 if i == j else 0):
                return (i + 1, j + 1), x
    return None


def _check_ut_letters(g: Slp, d: int) -> None:
    for a in sorted(g.terminals()):
        _, j, _ = parse_ut_letter(a)
        if j > d:
            raise BadLetter(f"letter {a!r} is not an element of UT_{d}")


def solve_exact(g: Slp, alph: GroupAlphabet) -> IsIdentity | NotIdentity:
    """Evaluate exactly; the witness is the first entry (row-major) that
    differs from the identity matrix."""
    validate_slp(g)
    diff = _first_difference(eval_matrix(g, alph))
    if diff is None:
        return IsIdentity()
    return NotIdentity(entry=diff[0], value=diff[1])


def solve_ut_exact(g: Slp, d: int) -> IsIdentity | NotIdentity:
    validate_slp(g)
    _check_ut_letters(g, d)
    return solve_exact(g, ut_alphabet(d))


def addition_circuits_for(g: Slp, d: int) -> tuple[Circuit, Circuit]:
    """Two addition circuits whose values agree iff g is the identity in UT_d."""
    validate_slp(g)
    _check_ut_letters(g, d)
    pc = slp_to_circuit(g, d)
    p1, p2 = eliminate_subtraction_partitioned(pc)
    return to_addition_circuit(p1), to_addition_circuit(p2)


def solve_ut_via_addition_circuits(g: Slp, d: int) -> IsIdentity | NotIdentity:
    a1, a2 = addition_circuits_for(g, d)
    v1, v2 = eval_int(a1), eval_int(a2)
    if v1 == v2:
        return IsIdentity(values=(v1, v2))
    return NotIdentity(values=(v1, v2))


# ---------------------------------------------------------------------------
# Modular one-sided solver


@dataclass(frozen=True)
class ModularSolverParams:
    prime_bits: int = 61
    trials: int = 20
    rng_seed: int = 0
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.prime_bits < 8:
            raise BadParams(f"prime_bits must be >= 8, got {self.prime_bits}")
        if self.trials < 1:
            raise BadParams(f"trials must be >= 1, got {self.trials}")
        if self.jobs < 1:
            raise BadParams(f"jobs must be >= 1, got {self.jobs}")


def random_prime(bits: int, rng: random.Random, avoid: Sequence[int] = ()) -> int:
    """A uniformly chosen prime with exactly ``bits`` bits not dividing any
    of ``avoid``."""
    while True:
        p = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if isprime(p) and all(a % p for a in avoid):
            return p


def _denominators(alph: GroupAlphabet) -> list[int]:
    out = set()
    for m in alph.interpretation.values():
        for row in m.rows:
            for x in row:
                if isinstance(x, Fraction) and x.denominator != 1:
                    out.add(x.denominator)
    return sorted(out)


def _is_identity_residue(m: Matrix) -> bool:
    return all(
        x == (1 if i == j else 0) for i, row in enumerate(m.rows) for j, x in enumerate(row)
    )


def _trial(g: Slp, alph: GroupAlphabet, bits: int, seed: int, trial: int):
    rng = random.Random(f"{seed}/{trial}")
    p = random_prime(bits, rng, _denominators(alph))
    m = eval_matrix_mod(g, alph, p)
    if _is_identity_residue(m):
        return None
    diff = _first_difference(m)
    return RejectsWithPrime(p=p, trial=trial, entry=diff[0], residue=diff[1])


def prime_count_lower_bound(bits: int) -> float:
    """A lower bound on the number of primes with exactly ``bits`` bits,
    from pi(x) > x / ln x (x >= 17) and pi(x) < 1.25506 x / ln x."""
    hi = 2.0**bits
    lo = 2.0 ** (bits - 1)
    return hi / math.log(hi) - 1.25506 * lo / math.log(lo)


def residual_error_bound(bitlen: int, prime_bits: int, trials: int) -> float:
    """Probability that every trial misses a nonzero integer of at most
    ``bitlen`` bits: it has fewer than bitlen/(prime_bits - 1) prime factors
    of ``prime_bits`` bits, out of the primes the sampler draws from."""
    per_trial = min(1.0, (bitlen / (prime_bits - 1)) / prime_count_lower_bound(prime_bits))
    return per_trial**trials


def ut_entry_bitlen(g: Slp, d: int) -> int:
    """Bit length bound for entries of val(g) in UT_d: |entry| <= (L+1)^d."""
    return d * (word_length(g) + 1).bit_length()


def solve_linear_modular(
    g: Slp,
    alph: GroupAlphabet,
    params: ModularSolverParams = ModularSolverParams(),
    bitlen: int | None = None,
) -> AcceptsIdentity | RejectsWithPrime:
    """Evaluate modulo random primes; reject on the first non-identity residue.

    Identity inputs are always accepted.  Trial k draws its prime from a
    generator seeded by ``(rng_seed, k)``, so the verdict does not depend on
    ``params.jobs``.  ``bitlen`` bounds the size of a witnessing entry; for
    UT_d alphabets it is derived automatically.
    """
    validate_slp(g)
    for a in g.terminals():
        if a not in alph:
            raise BadLetter(f"letter {a!r} has no interpretation")
    if bitlen is None and alph.name.startswith("ut:"):
        bitlen = ut_entry_bitlen(g, alph.dim)
    bound = None if bitlen is None else residual_error_bound(bitlen, params.prime_bits, params.trials)
    trials = range(params.trials)
    args = (g, alph, params.prime_bits, params.rng_seed)
    if params.jobs == 1:
        for t in trials:
            r = _trial(*args, t)
            if r is not None:
                return r
    else:
        with ProcessPoolExecutor(max_workers=params.jobs) as pool:
            results = list(pool.map(_trial, *zip(*[(*args, t) for t in trials])))
        for r in results:
            if r is not None:
                return r
    return AcceptsIdentity(trials=params.trials, prime_bits=params.prime_bits, error_bound=bound)


# ---------------------------------------------------------------------------
# Polynomial identity testing by random evaluation


@dataclass(frozen=True)
class PitResult:
    is_zero: bool
    prime: int | None = None
    point: Mapping[str, int] | None = None
    value: int | None = None
    error_bound: float | None = None


def pit_schwartz_zippel(
    c: Circuit, trials: int = 20, prime_bits: int = 61, seed: int = 0
) -> PitResult:
    """Evaluate at random points modulo random primes.

    A nonzero value proves the polynomial is nonzero.  If all trials vanish
    the polynomial is declared zero; for a nonzero polynomial of formal
    degree D this happens with probability at most (D / 2^(bits-1) + q)^trials,
    where q is the chance the prime divides every coefficient (ignored in
    the reported bound).
    """
    validate(c)
    if prime_bits < 8 or trials < 1:
        raise BadParams("need prime_bits >= 8 and trials >= 1")
    names = c.variables()
    deg = gate_metrics(c).degree[c.output]
    for t in range(trials):
        rng = random.Random(f"{seed}/{t}")
        p = random_prime(prime_bits, rng)
        point = {x: rng.randrange(p) for x in names}
        v = eval_mod(c, point, p)
        if v:
            return PitResult(False, p, point, v)
    per = min(1.0, deg / 2.0 ** (prime_bits - 1))
    return PitResult(True, error_bound=per**trials)


# ---------------------------------------------------------------------------
# Finite-index subgroups


def parse_word(w: str | Sequence[str]) -> tuple[str, ...]:
    """Words are lists of letters or whitespace-separated strings."""
    if isinstance(w, str):
        return tuple(w.split())
    return tuple(w)


def _compose(first: Sequence[int], then: Sequence[int]) -> tuple[int, ...]:
    """Apply ``first`` then ``then`` (1-based images)."""
    return tuple(then[i - 1] for i in first)


def _invert(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, j in enumerate(perm, start=1):
        inv[j - 1] = i
    return tuple(inv)


@dataclass(frozen=True)
class CosetSystem:
    """Cosets H g_1, ..., H g_n of a normal subgroup H of finite index.

    ``action[a][i-1] = j`` means H g_i a = H g_j, and ``rewrite[(a, i, j)]``
    is a word over the generators of H equal to g_i a g_j^-1.  Inverse
    letters are derived when absent.  ``reps[0]`` must be the empty word.
    """

    index: int
    reps: tuple[tuple[str, ...], ...]
    action: Mapping[str, tuple[int, ...]]
    rewrite: Mapping[tuple[str, int, int], tuple[str, ...]]
    subgroup_letters: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        n = self.index
        action = {a: tuple(p) for a, p in self.action.items()}
        rewrite = {k: tuple(w) for k, w in self.rewrite.items()}
        for a, perm in list(action.items()):
            if sorted(perm) != list(range(1, n + 1)):
                raise InconsistentCosetSystem(f"action of {a!r} is not a permutation of 1..{n}")
        for a in list(action):
            inv = inverse_letter(a)
            if inv in action:
                if action[inv] != _invert(action[a]):
                    raise InconsistentCosetSystem(f"actions of {a!r} and {inv!r} are not inverse")
            else:
                action[inv] = _invert(action[a])
        for a in list(action):
            inv = inverse_letter(a)
            for i in range(1, n + 1):
                j = action[a][i - 1]
                if (a, i, j) not in rewrite and (inv, j, i) in rewrite:
                    rewrite[(a, i, j)] = tuple(inverse_letter(x) for x in reversed(rewrite[(inv, j, i)]))
        object.__setattr__(self, "action", action)
        object.__setattr__(self, "rewrite", rewrite)
        object.__setattr__(self, "reps", tuple(tuple(r) for r in self.reps))
        letters = self.subgroup_letters or tuple(
            sorted({x.removesuffix("^-1") for w in rewrite.values() for x in w})
        )
        object.__setattr__(self, "subgroup_letters", tuple(letters))
        self.check()

    def check(self) -> None:
        n = self.index
        if n < 1:
            raise InconsistentCosetSystem("index must be positive")
        if len(self.reps) != n:
            raise InconsistentCosetSystem(f"expected {n} representatives, got {len(self.reps)}")
        if self.reps[0]:
            raise InconsistentCosetSystem("the first representative must be the empty word")
        for i, rep in enumerate(self.reps, start=1):
            if self.coset_of_word(rep) != i:
                raise InconsistentCosetSystem(f"representative {i} does not lie in coset {i}")
        for a, perm in self.action.items():
            for i in range(1, n + 1):
                if (a, i, perm[i - 1]) not in self.rewrite:
                    raise InconsistentCosetSystem(
                        f"no rewrite word for letter {a!r} from coset {i} to {perm[i - 1]}"
                    )
        for a, i, j in self.rewrite:
            if a not in self.action or self.action[a][i - 1] != j:
                raise InconsistentCosetSystem(f"rewrite entry {a}|{i}|{j} disagrees with the action")

    def coset_of_word(self, word: Sequence[str]) -> int:
        c = 1
        for a in word:
            try:
                c = self.action[a][c - 1]
            except KeyError:
                raise UnknownLetter(f"letter {a!r} has no coset action") from None
        return c

    @classmethod
    def from_json(cls, data: Mapping) -> CosetSystem:
        try:
            rewrite = {}
            for key, w in data["rewrite"].items():
                a, i, j = key.split("|")
                rewrite[(a, int(i), int(j))] = parse_word(w)
            return cls(
                index=int(data["index"]),
                reps=tuple(parse_word(r) for r in data["reps"]),
                action={a: tuple(int(x) for x in p) for a, p in data["action"].items()},
                rewrite=rewrite,
                subgroup_letters=tuple(data.get("subgroup_letters", ())),
            )
        except (KeyError, ValueError, TypeError, AttributeError) as e:
            raise InconsistentCosetSystem(f"malformed coset system: {e}") from None

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "reps": [" ".join(r) for r in self.reps],
            "action": {a: list(p) for a, p in self.action.items() if not a.endswith("^-1")},
            "rewrite": {
                f"{a}|{i}|{j}": " ".join(w)
                for (a, i, j), w in self.rewrite.items()
                if not a.endswith("^-1")
            },
            "subgroup_letters": list(self.subgroup_letters),
        }

    @classmethod
    def loads(cls, text: str) -> CosetSystem:
        return cls.from_json(json.loads(text))


def verify_coset_system(cs: CosetSystem, g_alph: GroupAlphabet, h_alph: GroupAlphabet) -> None:
    """Check every rewrite word against matrix interpretations of G and H:
    w_{a,i,j} must equal g_i a g_j^-1."""
    reps = [g_alph.word_value(r) for r in cs.reps]
    for (a, i, j), w in cs.rewrite.items():
        lhs = h_alph.word_value(w)
        rhs = reps[i - 1] @ g_alph[a] @ reps[j - 1].inverse()
        if lhs != rhs:
            raise InconsistentCosetSystem(f"rewrite word for {a}|{i}|{j} has the wrong value")


def coset_permutations(g: Slp, cs: CosetSystem) -> dict[str, tuple[int, ...]]:
    """The permutation of cosets induced by every SLP variable."""
    perms: dict[str, tuple[int, ...]] = {}
    for v, r in g.rules:
        if isinstance(r, Terminal):
            if r.letter not in cs.action:
                raise UnknownLetter(f"letter {r.letter!r} has no coset action")
            perms[v] = cs.action[r.letter]
        else:
            perms[v] = _compose(perms[r.left], perms[r.right])
    return perms


def reduce_finite_index(g: Slp, cs: CosetSystem) -> NotInSubgroup | Slp:
    """Either the nontrivial coset of val(g), or an SLP over the generators
    of H with the same value.

    Variable ``[i,A,j]`` of the result derives g_i val(A) g_j^-1 where
    j is the coset reached from i by reading val(A).
    """
    validate_slp(g)
    perms = coset_permutations(g, cs)
    end = perms[g.start][0]
    if end != 1:
        return NotInSubgroup(coset=end)
    needed: dict[str, set[int]] = {v: set() for v, _ in g.rules}
    needed[g.start].add(1)
    rhs = g.rhs
    for v, _ in reversed(g.rules):
        r = rhs[v]
        if isinstance(r, Concat) and needed[v]:
            needed[r.left] |= needed[v]
            needed[r.right] |= {perms[r.left][i - 1] for i in needed[v]}
    sentinel = cs.subgroup_letters[0] if cs.subgroup_letters else None
    b = SlpBuilder(prefix="_h", empty_letter=sentinel)
    names: dict[tuple[str, int], str] = {}
    for v, r in g.rules:
        for i in sorted(needed[v]):
            j = perms[v][i - 1]
            name = f"[{i},{v},{j}]"
            if isinstance(r, Terminal):
                word = cs.rewrite[(r.letter, i, j)]
                if not word:
                    if sentinel is None:
                        raise InconsistentCosetSystem("subgroup has no generators to build the empty word")
                    names[(v, i)] = b.identity()
                elif len(word) == 1:
                    names[(v, i)] = b.terminal(word[0], name)
                else:
                    names[(v, i)] = b.word([b.terminal(x) for x in word], name)
            else:
                k = perms[r.left][i - 1]
                left, right = names[(r.left, i)], names[(r.right, k)]
                if left == b.identity_var:
                    names[(v, i)] = right
                elif right == b.identity_var:
                    names[(v, i)] = left
                else:
                    names[(v, i)] = b.concat(left, right, name)
    return b.build(names[(g.start, 1)])


def solve_nilpotent_pipeline(
    g: Slp, cs: CosetSystem, embed: GroupAlphabet
) -> IsIdentity | NotIdentity:
    """Decide val(g) = 1 in G from the coset action and an exact embedding
    of the finite-index subgroup H (e.g. into UT_d(Z))."""
    reduced = reduce_finite_index(g, cs)
    if isinstance(reduced, NotInSubgroup):
        return NotIdentity(coset=reduced.coset)
    return solve_exact(reduced, embed)
