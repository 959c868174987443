"""Exact matrix arithmetic for UT_d(Z) and the 2x2 groups G_a.

Entries are Python ints, :class:`fractions.Fraction` (inverse of g_a for an
integer base a), or :class:`QuadInt` (elements u + v*sqrt(2)).  Nothing is
ever converted to floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import BadBase, BadIndex, BadLetter, BadModulus, DimensionMismatch, NotInvertible


# ---------------------------------------------------------------------------
# Z[sqrt 2]


@dataclass(frozen=True, slots=True)
class QuadInt:
    """``u + v*sqrt(2)`` with integer u, v."""

    u: int
    v: int = 0

    @staticmethod
    def _lift(x) -> QuadInt | None:
        if isinstance(x, QuadInt):
            return x
        if isinstance(x, int):
            return QuadInt(x, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadInt(self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self) -> QuadInt:
        return QuadInt(-self.u, -self.v)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadInt(self.u - o.u, self.v - o.v)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadInt(self.u * o.u + 2 * self.v * o.v, self.u * o.v + self.v * o.u)

    __rmul__ = __mul__

    def __mod__(self, m: int) -> QuadInt:
        return QuadInt(self.u % m, self.v % m)

    def conj(self) -> QuadInt:
        return QuadInt(self.u, -self.v)

    def norm(self) -> int:
        return self.u * self.u - 2 * self.v * self.v

    def is_unit(self) -> bool:
        return self.norm() in (1, -1)

    def inverse(self) -> QuadInt:
        n = self.norm()
        if n == 1:
            return self.conj()
        if n == -1:
            return -self.conj()
        raise NotInvertible(f"{self} is not a unit of Z[sqrt2]")

    def __pow__(self, n: int) -> QuadInt:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = QuadInt(1, 0)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.u == o.u and self.v == o.v

    def __hash__(self) -> int:
        return hash(self.u) if self.v == 0 else hash((self.u, self.v))

    def __bool__(self) -> bool:
        return bool(self.u or self.v)

    def __str__(self) -> str:
        return f"{self.u}{self.v:+d}*sqrt2"


ONE_PLUS_SQRT2 = QuadInt(1, 1)


def _ring_inverse(x):
    if isinstance(x, QuadInt):
        return x.inverse()
    if isinstance(x, int):
        if x in (1, -1):
            return x
        return Fraction(1, x) if x else _raise_not_invertible(x)
    if isinstance(x, Fraction):
        return 1 / x if x else _raise_not_invertible(x)
    raise NotInvertible(f"cannot invert {x!r}")


def _raise_not_invertible(x):
    raise NotInvertible(f"{x!r} is not invertible")


def to_residue(x, p: int):
    """Image of an exact entry in Z/p (or (Z/p)[sqrt 2] for QuadInt)."""
    if isinstance(x, QuadInt):
        return x % p
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise BadModulus(f"{p} divides the denominator of {x}")
        return x.numerator * pow(x.denominator, -1, p) % p
    return x % p


def _simplify(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


# ---------------------------------------------------------------------------
# Matrices


class Matrix:
    """Immutable square matrix over a commutative ring (entries 0-based)."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]) -> None:
        rows = tuple(tuple(_simplify(x) for x in r) for r in rows)
        if any(len(r) != len(rows) for r in rows):
            raise DimensionMismatch("matrix is not square")
        self.rows = rows

    @classmethod
    def _trusted(cls, rows):
        m = object.__new__(cls)
        m.rows = rows
        return m

    @classmethod
    def identity(cls, d: int, one=1) -> Matrix:
        z = one * 0
        return cls._trusted(tuple(tuple(one if i == j else z for j in range(d)) for i in range(d)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        return self.rows[i][j]

    def entry(self, i: int, j: int):
        """1-based access, matching the usual matrix notation."""
        return self.rows[i - 1][j - 1]

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    def _result_class(self, other: Matrix):
        return type(self) if type(self) is type(other) else Matrix

    def _product_rows(self, other: Matrix, m: int | None = None):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimensions {self.dim} and {other.dim} differ")
        cols = list(zip(*other.rows))
        if m is None:
            return tuple(
                tuple(_dot(r, c) for c in cols) for r in self.rows
            )
        return tuple(tuple(_dot(r, c) % m for c in cols) for r in self.rows)

    def __matmul__(self, other: Matrix) -> Matrix:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._result_class(other)._trusted(self._product_rows(other))

    def mul_mod(self, other: Matrix, m: int) -> Matrix:
        return Matrix._trusted(self._product_rows(other, m))

    def mod(self, p: int) -> Matrix:
        return Matrix._trusted(tuple(tuple(to_residue(x, p) for x in r) for r in self.rows))

    def is_identity(self) -> bool:
        return all(
            x == (1 if i == j else 0)
            for i, r in enumerate(self.rows)
            for j, x in enumerate(r)
        )

    def inverse(self) -> Matrix:
        if self.is_unitriangular():
            return type(self)._trusted(_unitriangular_inverse(self.rows))
        if self.dim == 1:
            return type(self)._trusted(((_ring_inverse(self.rows[0][0]),),))
        if self.dim == 2:
            (a, b), (c, d) = self.rows
            det = a * d - b * c
            inv = _ring_inverse(det)
            rows = ((d * inv, -b * inv), (-c * inv, a * inv))
            return type(self)._trusted(tuple(tuple(_simplify(x) for x in r) for r in rows))
        raise NotInvertible("inverse implemented for unitriangular and 2x2 matrices only")

    def __pow__(self, n: int) -> Matrix:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        one = 1
        result = type(self)._trusted(Matrix.identity(self.dim, one).rows)
        while n:
            if n & 1:
                result = result @ base
            n >>= 1
            if n:
                base = base @ base
        return result

    def is_unitriangular(self) -> bool:
        return all(
            (x == 1) if i == j else (x == 0 if i > j else True)
            for i, r in enumerate(self.rows)
            for j, x in enumerate(r)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({[list(map(str, r)) for r in self.rows]})"

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "]"


def _dot(r, c):
    acc = 0
    for a, b in zip(r, c):
        if a and b:
            acc = acc + a * b
    return acc


def _unitriangular_inverse(rows):
    # Back substitution on the strictly upper part, column by column.
    d = len(rows)
    inv = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    for j in range(d):
        for i in range(j - 1, -1, -1):
            acc = 0
            for k in range(i + 1, j + 1):
                if rows[i][k] and inv[k][j]:
                    acc = acc + rows[i][k] * inv[k][j]
            inv[i][j] = -acc
    return tuple(tuple(r) for r in inv)


class UTMatrix(Matrix):
    """Unitriangular integer matrix."""

    __slots__ = ()

    def __init__(self, rows: Iterable[Iterable[int]]) -> None:
        super().__init__(rows)
        for i, r in enumerate(self.rows):
            for j, x in enumerate(r):
                if not isinstance(x, int):
                    raise ValueError(f"entry ({i + 1},{j + 1}) is not an integer")
        if not self.is_unitriangular():
            raise ValueError("matrix is not unitriangular")

    @classmethod
    def identity(cls, d: int, one=1) -> UTMatrix:
        return cls._trusted(Matrix.identity(d).rows)


class QuadMatrix(Matrix):
    """2x2 matrix over Z[sqrt 2]."""

    __slots__ = ()

    def __init__(self, rows) -> None:
        rows = [[x if isinstance(x, QuadInt) else QuadInt(x) for x in r] for r in rows]
        super().__init__(rows)
        if self.dim != 2:
            raise DimensionMismatch("QuadMatrix is 2x2")

    @classmethod
    def _trusted(cls, rows):
        return super()._trusted(
            tuple(tuple(x if isinstance(x, QuadInt) else QuadInt(x) for x in r) for r in rows)
        )

    @classmethod
    def identity(cls, d: int = 2, one=QuadInt(1)) -> QuadMatrix:
        return cls._trusted(Matrix.identity(2, QuadInt(1)).rows)

    def det(self) -> QuadInt:
        (a, b), (c, d) = self.rows
        return a * d - b * c

    def inverse(self) -> QuadMatrix:
        det = self.det()
        if not det.is_unit():
            raise NotInvertible(f"determinant {det} is not a unit")
        inv = det.inverse()
        (a, b), (c, d) = self.rows
        return QuadMatrix._trusted(((d * inv, -b * inv), (-c * inv, a * inv)))

    def __pow__(self, n: int) -> QuadMatrix:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = QuadMatrix.identity()
        while n:
            if n & 1:
                result = result @ base
            n >>= 1
            if n:
                base = base @ base
        return result


def quad_mat_mul(a: QuadMatrix, b: QuadMatrix) -> QuadMatrix:
    return a @ b


def quad_mat_inv(a: QuadMatrix) -> QuadMatrix:
    return a.inverse()


# ---------------------------------------------------------------------------
# UT_d(Z)


def ut_elementary(d: int, i: int, j: int, power: int = 1) -> UTMatrix:
    """``T_{i,j}^power`` in dimension ``d`` (1-based, i < j)."""
    if not (1 <= i < j <= d):
        raise BadIndex(f"need 1 <= i < j <= d, got i={i}, j={j}, d={d}")
    rows = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
    rows[i - 1][j - 1] = power
    return UTMatrix._trusted(tuple(tuple(r) for r in rows))


def ut_generator(d: int, i: int, sign: int = 1) -> UTMatrix:
    """``T_{i,i+1}^sign``."""
    if sign not in (1, -1):
        raise BadIndex(f"sign must be +1 or -1, got {sign}")
    if not (1 <= i < d):
        raise BadIndex(f"need 1 <= i < d, got i={i}, d={d}")
    return ut_elementary(d, i, i + 1, sign)


def ut_mul(a: UTMatrix, b: UTMatrix) -> UTMatrix:
    return a @ b


def ut_inv(a: UTMatrix) -> UTMatrix:
    return a.inverse()


def commutator(x: Matrix, y: Matrix) -> Matrix:
    """``x^-1 y^-1 x y``."""
    if x.dim != y.dim:
        raise DimensionMismatch(f"dimensions {x.dim} and {y.dim} differ")
    return x.inverse() @ y.inverse() @ x @ y


# ---------------------------------------------------------------------------
# Alphabets: letters with inverse partners and a matrix interpretation


def inverse_letter(letter: str) -> str:
    return letter[:-3] if letter.endswith("^-1") else letter + "^-1"


def invert_word(word: Sequence[str]) -> list[str]:
    return [inverse_letter(a) for a in reversed(word)]


@dataclass(frozen=True)
class GroupAlphabet:
    """Letters (each paired with ``letter^-1``) interpreted as matrices.

    The pairing is checked eagerly: ``M(a) @ M(a^-1)`` must be the identity.
    """

    interpretation: Mapping[str, Matrix]
    name: str = ""

    def __post_init__(self) -> None:
        interp = dict(self.interpretation)
        object.__setattr__(self, "interpretation", interp)
        dims = {m.dim for m in interp.values()}
        if len(dims) > 1:
            raise DimensionMismatch(f"letters have different dimensions {sorted(dims)}")
        for a, m in interp.items():
            inv = inverse_letter(a)
            if inv not in interp:
                raise BadLetter(f"letter {a!r} has no inverse partner {inv!r}")
            if not (m @ interp[inv]).is_identity():
                raise BadLetter(f"interpretation of {inv!r} is not the inverse of {a!r}")

    @classmethod
    def from_generators(cls, gens: Mapping[str, Matrix], name: str = "") -> GroupAlphabet:
        interp = {}
        for a, m in gens.items():
            interp[a] = m
            interp.setdefault(inverse_letter(a), m.inverse())
        return cls(interp, name)

    @property
    def letters(self) -> list[str]:
        return list(self.interpretation)

    @property
    def dim(self) -> int:
        return next(iter(self.interpretation.values())).dim

    def __contains__(self, letter: str) -> bool:
        return letter in self.interpretation

    def __getitem__(self, letter: str) -> Matrix:
        try:
            return self.interpretation[letter]
        except KeyError:
            raise BadLetter(f"letter {letter!r} is not in alphabet {self.name or ''}".rstrip()) from None

    def identity(self) -> Matrix:
        first = next(iter(self.interpretation.values()))
        one = QuadInt(1) if isinstance(first, QuadMatrix) else 1
        return type(first).identity(first.dim, one) if isinstance(first, (UTMatrix, QuadMatrix)) \
            else Matrix.identity(first.dim, one)

    def word_value(self, word: Iterable[str]) -> Matrix:
        acc = self.identity()
        for a in word:
            acc = acc @ self[a]
        return acc


_UT_LETTER = re.compile(r"^T\((\d+),(\d+)\)(\^-1)?$")


def ut_letter(i: int, sign: int = 1, j: int | None = None) -> str:
    """Letter for ``T_{i,j}^sign``; ``j`` defaults to ``i + 1`` (a generator)."""
    j = i + 1 if j is None else j
    return f"T({i},{j})" + ("" if sign > 0 else "^-1")


def parse_ut_letter(letter: str) -> tuple[int, int, int]:
    """``"T(1,3)^-1"`` -> ``(1, 3, -1)``."""
    m = _UT_LETTER.match(letter)
    if not m or not 1 <= int(m.group(1)) < int(m.group(2)):
        raise BadLetter(f"{letter!r} is not an elementary matrix T(i,j), i < j, or its inverse")
    return int(m.group(1)), int(m.group(2)), (-1 if m.group(3) else 1)


def ut_alphabet(d: int) -> GroupAlphabet:
    """Letters T(i,j)^(+-1) for 1 <= i < j <= d, interpreted in UT_d(Z).

    The generators Gamma_d are the letters with j = i + 1; the others are
    accepted as a convenience for writing relations.
    """
    if d < 2:
        raise BadIndex("UT_d needs d >= 2 to have generators")
    interp = {}
    for i in range(1, d):
        for j in range(i + 1, d + 1):
            interp[ut_letter(i, 1, j)] = ut_elementary(d, i, j, 1)
            interp[ut_letter(i, -1, j)] = ut_elementary(d, i, j, -1)
    return GroupAlphabet(interp, f"ut:{d}")


def make_Ga_alphabet(a) -> GroupAlphabet:
    """Letters g, h (and inverses) for ``g_a = diag(a, 1)`` and ``h = T_{1,2}``.

    ``a`` is an integer >= 2 or ``ONE_PLUS_SQRT2`` (also accepted as the
    string ``"sqrt2"``).  For integer ``a`` the inverse of ``g_a`` has the
    rational entry ``1/a``.
    """
    if isinstance(a, str):
        if a in ("sqrt2", "1+sqrt2"):
            a = ONE_PLUS_SQRT2
        else:
            raise BadBase(f"unknown base {a!r}")
    if isinstance(a, QuadInt):
        if a != ONE_PLUS_SQRT2:
            raise BadBase("only a = 1+sqrt2 is supported among quadratic bases")
        g = QuadMatrix([[a, 0], [0, 1]])
        h = QuadMatrix([[1, 1], [0, 1]])
        return GroupAlphabet.from_generators({"g": g, "h": h}, "ga:sqrt2")
    if not isinstance(a, int) or a < 2:
        raise BadBase(f"integer base must be >= 2, got {a!r}")
    g = Matrix([[a, 0], [0, 1]])
    h = Matrix([[1, 1], [0, 1]])
    return GroupAlphabet.from_generators({"g": g, "h": h}, f"ga:int{a}")


def Ga_base(alph: GroupAlphabet):
    """The base ``a`` of a G_a alphabet (an int or ``ONE_PLUS_SQRT2``)."""
    return alph["g"].rows[0][0]


def alphabet_for(name: str) -> GroupAlphabet:
    """Parse ``ut:d``, ``ga:intN`` or ``ga:sqrt2``."""
    kind, _, arg = name.partition(":")
    if kind == "ut" and arg.isdigit():
        return ut_alphabet(int(arg))
    if kind == "ga":
        if arg == "sqrt2":
            return make_Ga_alphabet(ONE_PLUS_SQRT2)
        if arg.startswith("int") and arg[3:].isdigit():
            return make_Ga_alphabet(int(arg[3:]))
    raise BadBase(f"unknown group {name!r}; expected ut:d, ga:intN or ga:sqrt2")


# ---------------------------------------------------------------------------
# The commutator subgroup of G_{1+sqrt2}


def Ga_commutator(s: int, t: int, a=ONE_PLUS_SQRT2) -> Matrix:
    """``g^s h^t g^-s h^-t`` in G_a."""
    alph = make_Ga_alphabet(a)
    g, h = alph["g"], alph["h"]
    return (g ** s) @ (h ** t) @ (g ** -s) @ (h ** -t)


def commutator_coordinates(s: int, t: int) -> tuple[int, int]:
    """Integers ``(c1, c2)`` with ``t*((1+sqrt2)^s - 1) = 2*c1 + sqrt2*c2``,
    so that ``g^s h^t g^-s h^-t = v^c1 u^c2`` for ``v = T_{1,2}^2`` and
    ``u = [[1, sqrt2], [0, 1]]``.  Binomial expansion of the power."""
    if s >= 0:
        c1 = sum(t * comb(s, 2 * i) * 2 ** (i - 1) for i in range(1, s // 2 + 1))
        c2 = sum(t * comb(s, 2 * i - 1) * 2 ** (i - 1) for i in range(1, (s + 1) // 2 + 1))
        return c1, c2
    n = -s
    parity = n % 2
    c1 = -parity * t + sum(
        t * comb(n, 2 * i) * 2 ** (i - 1) * (-1) ** (n - 2 * i) for i in range(1, n // 2 + 1)
    )
    c2 = sum(
        t * comb(n, 2 * i - 1) * 2 ** (i - 1) * (-1) ** (n - (2 * i - 1))
        for i in range(1, (n + 1) // 2 + 1)
    )
    return c1, c2


U_SQRT2 = QuadMatrix([[1, QuadInt(0, 1)], [0, 1]])
V_TWO = QuadMatrix([[1, 2], [0, 1]])
