"""Straight-line programs over group alphabets.

An SLP is an ordered list of rules ``A -> a`` (a letter) or ``A -> B C``
where B and C are declared before A.  The start variable derives a single
word, possibly of length exponential in the number of rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

from .errors import (
    BadModulus,
    DuplicateId,
    ForwardReference,
    MissingStart,
    TooLong,
    UnknownLetter,
)
from .matrices import GroupAlphabet, Matrix, inverse_letter


@dataclass(frozen=True, slots=True)
class Terminal:
    letter: str


@dataclass(frozen=True, slots=True)
class Concat:
    left: str
    right: str


SlpRhs = Terminal | Concat


@dataclass(frozen=True)
class Slp:
    rules: tuple[tuple[str, SlpRhs], ...]
    start: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))

    @cached_property
    def rhs(self) -> dict[str, SlpRhs]:
        return dict(self.rules)

    @property
    def size(self) -> int:
        return len(self.rules)

    def terminals(self) -> set[str]:
        return {r.letter for _, r in self.rules if isinstance(r, Terminal)}

    def with_start(self, start: str) -> Slp:
        return Slp(self.rules, start)


def validate_slp(g: Slp) -> None:
    """Raise a ``ValidationError`` unless every reference points backwards,
    ids are unique and the start variable is declared."""
    seen: set[str] = set()
    for ident, rhs in g.rules:
        if ident in seen:
            raise DuplicateId(f"variable {ident!r} declared twice", ident)
        if isinstance(rhs, Concat):
            for child in (rhs.left, rhs.right):
                if child not in seen:
                    raise ForwardReference(
                        f"{ident!r} refers to {child!r}, which is not declared before it", ident
                    )
        seen.add(ident)
    if g.start not in seen:
        raise MissingStart(f"start variable {g.start!r} is not declared", g.start)


def lengths(g: Slp) -> dict[str, int]:
    out: dict[str, int] = {}
    for ident, rhs in g.rules:
        out[ident] = 1 if isinstance(rhs, Terminal) else out[rhs.left] + out[rhs.right]
    return out


def word_length(g: Slp) -> int:
    return lengths(g)[g.start]


def iter_word(g: Slp, var: str | None = None) -> Iterator[str]:
    """Yield the letters of the derived word left to right (no recursion)."""
    rhs = g.rhs
    stack = [g.start if var is None else var]
    while stack:
        r = rhs[stack.pop()]
        if isinstance(r, Terminal):
            yield r.letter
        else:
            stack.append(r.right)
            stack.append(r.left)


def expand(g: Slp, max_len: int = 10**6) -> list[str]:
    n = word_length(g)
    if n > max_len:
        raise TooLong(n, max_len)
    return list(iter_word(g))


def _check_letters(g: Slp, alph: GroupAlphabet) -> None:
    for a in sorted(g.terminals()):
        if a not in alph:
            raise UnknownLetter(f"letter {a!r} has no interpretation in {alph.name or 'the alphabet'}")


def eval_matrices(g: Slp, alph: GroupAlphabet) -> dict[str, Matrix]:
    """Matrix value of every variable, one product per concatenation rule."""
    _check_letters(g, alph)
    vals: dict[str, Matrix] = {}
    for ident, rhs in g.rules:
        if isinstance(rhs, Terminal):
            vals[ident] = alph[rhs.letter]
        else:
            vals[ident] = vals[rhs.left] @ vals[rhs.right]
    return vals


def eval_matrix(g: Slp, alph: GroupAlphabet) -> Matrix:
    return eval_matrices(g, alph)[g.start]


def eval_matrix_mod(g: Slp, alph: GroupAlphabet, p: int) -> Matrix:
    """Evaluate with every entry reduced mod ``p`` after each product.

    Entries in Z[sqrt2] are reduced coefficientwise, i.e. computed in
    (Z/p)[x]/(x^2 - 2).
    """
    if not isinstance(p, int) or p < 2:
        raise BadModulus(f"modulus must be an integer >= 2, got {p!r}")
    _check_letters(g, alph)
    letters = {a: alph[a].mod(p) for a in g.terminals()}
    vals: dict[str, Matrix] = {}
    for ident, rhs in g.rules:
        if isinstance(rhs, Terminal):
            vals[ident] = letters[rhs.letter]
        else:
            vals[ident] = vals[rhs.left].mul_mod(vals[rhs.right], p)
    return vals[g.start]


def word_value(word: Sequence[str], alph: GroupAlphabet) -> Matrix:
    return alph.word_value(word)


# ---------------------------------------------------------------------------
# Construction


@dataclass
class SlpBuilder:
    """Incrementally assemble an SLP with memoised terminals and powers.

    ``empty_letter`` is the letter used for the identity sentinel
    ``a . a^-1`` whenever an empty word is needed.
    """

    prefix: str = "X"
    empty_letter: str | None = None
    rules: list[tuple[str, SlpRhs]] = field(default_factory=list)
    _declared: set[str] = field(default_factory=set)
    _terminals: dict[str, str] = field(default_factory=dict)
    _inverse: dict[str, str] = field(default_factory=dict)
    _powers: dict[tuple[str, int], str] = field(default_factory=dict)
    _counter: int = 0
    _identity: str | None = None

    def fresh(self) -> str:
        while True:
            self._counter += 1
            name = f"{self.prefix}{self._counter}"
            if name not in self._declared:
                return name

    def _add(self, ident: str | None, rhs: SlpRhs) -> str:
        ident = ident or self.fresh()
        if ident in self._declared:
            raise DuplicateId(f"variable {ident!r} declared twice", ident)
        self._declared.add(ident)
        self.rules.append((ident, rhs))
        return ident

    def terminal(self, letter: str, ident: str | None = None) -> str:
        if ident is None and letter in self._terminals:
            return self._terminals[letter]
        v = self._add(ident, Terminal(letter))
        self._terminals.setdefault(letter, v)
        return v

    def concat(self, left: str, right: str, ident: str | None = None) -> str:
        return self._add(ident, Concat(left, right))

    def alias(self, var: str, ident: str) -> str:
        """Give ``ident`` the same value as ``var`` (one extra rule)."""
        return self.concat(var, self.identity(), ident)

    def word(self, items: Sequence[str], ident: str | None = None) -> str:
        """Concatenate variables left to right; the last rule gets ``ident``."""
        if not items:
            return self.identity() if ident is None else self.alias(self.identity(), ident)
        if len(items) == 1:
            return items[0] if ident is None else self.alias(items[0], ident)
        acc = items[0]
        for k, v in enumerate(items[1:], start=2):
            acc = self.concat(acc, v, ident if k == len(items) else None)
        return acc

    @property
    def identity_var(self) -> str | None:
        """The identity sentinel, if one has been emitted."""
        return self._identity

    def identity(self) -> str:
        """A variable deriving ``a a^-1`` for the configured letter."""
        if self._identity is None:
            if self.empty_letter is None:
                raise ValueError("builder has no letter for the identity sentinel")
            a = self.terminal(self.empty_letter)
            b = self.terminal(inverse_letter(self.empty_letter))
            self._identity = self.concat(a, b)
        return self._identity

    def power(self, var: str, e: int) -> str:
        """A variable deriving ``val(var)^e`` by iterated squaring (e >= 0)."""
        if e < 0:
            raise ValueError("exponent must be nonnegative")
        if e == 0:
            return self.identity()
        key = (var, e)
        if key in self._powers:
            return self._powers[key]
        squares = [var]
        for k in range(1, e.bit_length()):
            sk = self._powers.get((var, 1 << k))
            if sk is None:
                sk = self.concat(squares[-1], squares[-1])
                self._powers[(var, 1 << k)] = sk
            squares.append(sk)
        acc = None
        for k in range(e.bit_length()):
            if e >> k & 1:
                acc = squares[k] if acc is None else self.concat(acc, squares[k])
        self._powers[key] = acc
        return acc

    def letter_power(self, letter: str, e: int) -> str:
        """``letter^e`` for any integer e (negative powers use the inverse letter)."""
        if e < 0:
            letter, e = inverse_letter(letter), -e
        if e == 0:
            return self.identity()
        return self.power(self.terminal(letter), e)

    def inverse(self, var: str) -> str:
        """A variable deriving the formal inverse of ``val(var)``.

        Rules for the inverse are emitted bottom-up for every variable in
        the cone of ``var`` not yet inverted.
        """
        if var in self._inverse:
            return self._inverse[var]
        rhs = dict(self.rules)
        order: list[str] = []
        stack = [(var, False)]
        seen: set[str] = set()
        while stack:
            v, done = stack.pop()
            if done:
                order.append(v)
                continue
            if v in seen or v in self._inverse:
                continue
            seen.add(v)
            stack.append((v, True))
            r = rhs[v]
            if isinstance(r, Concat):
                stack.append((r.left, False))
                stack.append((r.right, False))
        for v in order:
            r = rhs[v]
            if isinstance(r, Terminal):
                inv = self.terminal(inverse_letter(r.letter))
            else:
                inv = self.concat(self._inverse[r.right], self._inverse[r.left])
            self._inverse[v] = inv
        return self._inverse[var]

    def build(self, start: str) -> Slp:
        return Slp(tuple(self.rules), start)


def power_slp(letter: str, e: int, prefix: str = "P") -> Slp:
    """An SLP for ``letter^e`` with at most ``2*floor(log2 e) + 1`` rules.

    For ``e == 0`` the result is the two-letter word ``letter letter^-1``.
    """
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    b = SlpBuilder(prefix=prefix, empty_letter=letter)
    if e == 0:
        return b.build(b.identity())
    return b.build(b.power(b.terminal(letter), e))


def slp_from_word(word: Sequence[str], prefix: str = "W") -> Slp:
    """A left-leaning SLP for an explicit nonempty word."""
    if not word:
        raise ValueError("the empty word has no SLP; use power_slp(letter, 0)")
    b = SlpBuilder(prefix=prefix)
    return b.build(b.word([b.terminal(a) for a in word]))


def rename(g: Slp, mapping: Mapping[str, str]) -> Slp:
    def r(v: str) -> str:
        return mapping.get(v, v)

    rules = tuple(
        (r(i), rhs if isinstance(rhs, Terminal) else Concat(r(rhs.left), r(rhs.right)))
        for i, rhs in g.rules
    )
    return Slp(rules, r(g.start))


def prune_slp(g: Slp) -> Slp:
    """Drop rules not reachable from the start variable."""
    live = {g.start}
    for ident, r in reversed(g.rules):
        if ident in live and isinstance(r, Concat):
            live.add(r.left)
            live.add(r.right)
    return Slp(tuple((i, r) for i, r in g.rules if i in live), g.start)
