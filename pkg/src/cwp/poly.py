"""Sparse polynomials over Z or F_p, Kronecker substitution, and the
triangular (D + U) product expansion.

Multivariate polynomials are dictionaries from exponent tuples to nonzero
coefficients.  The univariate backend is sparse as well, because Kronecker
images have huge degree but few terms.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import (
    ExponentTooLarge,
    NotMonic,
    NotMonicInY,
    NotTriangular,
    RingMismatch,
    ZeroDivisor,
)

Exponents = tuple[int, ...]


def _ring_str(modulus: int | None) -> str:
    return "Z" if modulus is None else f"F_{modulus}"


# Products of large dense operands are computed by packing the coefficients
# into one big integer per operand (evaluation at 2^B for a digit width B that
# no product coefficient can overflow) and letting the interpreter's integer
# multiplication do the convolution.  Below this many term pairs the plain
# double loop is faster.
_PACKED_MIN_PAIRS = 1024


def _packed_product(a: Mapping[int, int], b: Mapping[int, int], modulus: int | None) -> dict[int, int] | None:
    """Coefficients of the product of two sparse univariate polynomials, or
    ``None`` when the operands are too small or too sparse for packing to pay."""
    if len(a) * len(b) < _PACKED_MIN_PAIRS:
        return None
    la, lb = max(a) + 1, max(b) + 1
    if la + lb > 8 * (len(a) + len(b)):
        return None
    bound = max(abs(c) for c in a.values()) * max(abs(c) for c in b.values()) * min(len(a), len(b))
    width = (bound.bit_length() + 2 + 7) // 8  # bytes per digit, one spare sign bit
    half = 1 << (8 * width - 1)
    pad = half.to_bytes(width, "little")

    def pack(coeffs: Mapping[int, int], length: int) -> int:
        # Every digit is stored with +half so that the bytes stay nonnegative;
        # the bias is removed again as one integer.
        buf = bytearray(pad * length)
        for e, c in coeffs.items():
            buf[e * width:(e + 1) * width] = (c + half).to_bytes(width, "little")
        return int.from_bytes(buf, "little") - int.from_bytes(pad * length, "little")

    length = la + lb - 1
    product = pack(a, la) * pack(b, lb) + int.from_bytes(pad * length, "little")
    raw = memoryview(product.to_bytes(length * width, "little"))
    out: dict[int, int] = {}
    for e in range(length):
        c = int.from_bytes(raw[e * width:(e + 1) * width], "little") - half
        if modulus is not None:
            c %= modulus
        if c:
            out[e] = c
    return out


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables over Z (``modulus=None``) or Z/p.

    Instances are treated as immutable.  ``names`` is display metadata only;
    arithmetic keeps the left operand's names.
    """

    __slots__ = ("nvars", "terms", "modulus", "names")

    def __init__(
        self,
        terms: Mapping[Exponents, int] | None = None,
        nvars: int = 0,
        modulus: int | None = None,
        names: Sequence[str] | None = None,
    ) -> None:
        clean: dict[Exponents, int] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent vector {exps} has length != {nvars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if modulus is not None:
                c %= modulus
            if c:
                clean[exps] = clean.get(exps, 0) + c
        if modulus is not None:
            clean = {e: c % modulus for e, c in clean.items() if c % modulus}
        self.terms = clean
        self.nvars = nvars
        self.modulus = modulus
        self.names = tuple(names) if names is not None else None

    # -- constructors -------------------------------------------------

    @classmethod
    def _raw(cls, terms, nvars, modulus, names=None) -> MultiPoly:
        # Trusted path: terms already canonical.
        p = cls.__new__(cls)
        p.terms = terms
        p.nvars = nvars
        p.modulus = modulus
        p.names = names
        return p

    @classmethod
    def zero(cls, nvars: int, modulus: int | None = None, names=None) -> MultiPoly:
        return cls._raw({}, nvars, modulus, tuple(names) if names else None)

    @classmethod
    def constant(cls, c: int, nvars: int, modulus: int | None = None, names=None) -> MultiPoly:
        return cls({(0,) * nvars: c}, nvars, modulus, names)

    @classmethod
    def variable(cls, i: int, nvars: int, modulus: int | None = None, names=None) -> MultiPoly:
        """The polynomial ``x_{i+1}`` (``i`` is 0-based)."""
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars, modulus, names)

    @classmethod
    def from_terms(cls, rows: Iterable[Sequence[int]], nvars: int | None = None,
                   modulus: int | None = None) -> MultiPoly:
        """Build from the text format ``[[coeff, n1, ..., nk], ...]``."""
        rows = [list(r) for r in rows]
        if nvars is None:
            nvars = len(rows[0]) - 1 if rows else 0
        acc: dict[Exponents, int] = {}
        for r in rows:
            exps = tuple(r[1:])
            acc[exps] = acc.get(exps, 0) + r[0]
        return cls(acc, nvars, modulus)

    def to_terms(self) -> list[list[int]]:
        return [[self.terms[e], *e] for e in sorted(self.terms)]

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def degree_in(self, i: int) -> int:
        """Max exponent of variable ``i`` (0-based); -1 for the zero polynomial."""
        return max((e[i] for e in self.terms), default=-1)

    def max_degree(self) -> int:
        """Largest exponent of any single variable (0 for constants and zero)."""
        return max((max(e, default=0) for e in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def evaluate(self, point: Sequence, one=1):
        """Evaluate at ``point`` in any commutative ring containing Z.

        ``one`` is the ring's unit, used so the zero polynomial evaluates to
        a ring element of the right type.
        """
        if len(point) != self.nvars:
            raise ValueError("point has wrong length")
        total = one * 0
        powers: list[dict[int, object]] = [{} for _ in range(self.nvars)]
        for exps, c in self.terms.items():
            term = one * c
            for i, e in enumerate(exps):
                if e:
                    cache = powers[i]
                    if e not in cache:
                        cache[e] = point[i] ** e
                    term = term * cache[e]
            total = total + term
        if self.modulus is not None:
            total = total % self.modulus
        return total

    # -- arithmetic ---------------------------------------------------

    def _check(self, other: MultiPoly) -> None:
        if self.nvars != other.nvars:
            raise RingMismatch(f"{self.nvars} vs {other.nvars} variables")
        if self.modulus != other.modulus:
            raise RingMismatch(
                f"coefficient rings differ: {_ring_str(self.modulus)} vs {_ring_str(other.modulus)}"
            )

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return MultiPoly.constant(other, self.nvars, self.modulus)
        return NotImplemented

    def __add__(self, other) -> MultiPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        m = self.modulus
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if m is not None:
                v %= m
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(out, self.nvars, m, self.names)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        m = self.modulus
        if m is None:
            out = {e: -c for e, c in self.terms.items()}
        else:
            out = {e: (-c) % m for e, c in self.terms.items()}
        return MultiPoly._raw(out, self.nvars, m, self.names)

    def __sub__(self, other) -> MultiPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> MultiPoly:
        return (-self) + other

    def __mul__(self, other) -> MultiPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = self.modulus
        packed = self._packed_mul(other)
        if packed is not None:
            return packed
        out: dict[Exponents, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        if m is None:
            out = {e: c for e, c in out.items() if c}
        else:
            out = {e: c % m for e, c in out.items() if c % m}
        return MultiPoly._raw(out, self.nvars, m, self.names)

    __rmul__ = __mul__

    def _packed_mul(self, other: MultiPoly) -> MultiPoly | None:
        """Dense product through a mixed-radix index, or ``None`` if sparse."""
        if len(self.terms) * len(other.terms) < _PACKED_MIN_PAIRS:
            return None
        radix = [self.degree_in(j) + other.degree_in(j) + 1 for j in range(self.nvars)]
        place = []
        acc = 1
        for r in radix:
            place.append(acc)
            acc *= r

        def index(terms: Mapping[Exponents, int]) -> dict[int, int]:
            return {sum(e * w for e, w in zip(exps, place)): c for exps, c in terms.items()}

        coeffs = _packed_product(index(self.terms), index(other.terms), self.modulus)
        if coeffs is None:
            return None
        out: dict[Exponents, int] = {}
        for i, c in coeffs.items():
            exps = []
            for r in radix:
                i, e = divmod(i, r)
                exps.append(e)
            out[tuple(exps)] = c
        return MultiPoly._raw(out, self.nvars, self.modulus, self.names)

    def __pow__(self, n: int) -> MultiPoly:
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(1, self.nvars, self.modulus, self.names)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = MultiPoly.constant(other, self.nvars, self.modulus)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.modulus == other.modulus
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.nvars, self.modulus, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"MultiPoly({self.to_terms()!r}, nvars={self.nvars}, modulus={self.modulus})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.names or tuple(f"x{i + 1}" for i in range(self.nvars))
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Univariate backend


class UniPoly:
    """Sparse univariate polynomial ``{exponent: coeff}`` over Z or Z/p."""

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs: Mapping[int, int] | Sequence[int] | None = None,
                 modulus: int | None = None) -> None:
        if coeffs is None:
            items: Iterable[tuple[int, int]] = ()
        elif isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        out: dict[int, int] = {}
        for e, c in items:
            if e < 0:
                raise ValueError("negative exponent")
            out[e] = out.get(e, 0) + c
        if modulus is None:
            out = {e: c for e, c in out.items() if c}
        else:
            out = {e: c % modulus for e, c in out.items() if c % modulus}
        self.coeffs = out
        self.modulus = modulus

    @classmethod
    def _raw(cls, coeffs: dict[int, int], modulus: int | None) -> UniPoly:
        p = cls.__new__(cls)
        p.coeffs = coeffs
        p.modulus = modulus
        return p

    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def leading_coefficient(self) -> int:
        return self.coeffs[self.degree()] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __mul__(self, other: UniPoly) -> UniPoly:
        if self.modulus != other.modulus:
            raise RingMismatch("univariate coefficient rings differ")
        m = self.modulus
        packed = _packed_product(self.coeffs, other.coeffs, m) if self.coeffs and other.coeffs else None
        if packed is not None:
            return UniPoly._raw(packed, m)
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        if m is None:
            out = {e: c for e, c in out.items() if c}
        else:
            out = {e: c % m for e, c in out.items() if c % m}
        return UniPoly._raw(out, m)

    def __add__(self, other: UniPoly) -> UniPoly:
        if self.modulus != other.modulus:
            raise RingMismatch("univariate coefficient rings differ")
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return UniPoly(out, self.modulus)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.modulus == other.modulus and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.modulus, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        return f"UniPoly({dict(sorted(self.coeffs.items()))!r}, modulus={self.modulus})"


def uni_mul_many(polys: Sequence[UniPoly]) -> UniPoly:
    if not polys:
        raise ValueError("empty product")
    # Multiply smallest first to keep intermediates small.
    heap = [(len(p.coeffs), i, p) for i, p in enumerate(polys)]
    heapq.heapify(heap)
    counter = len(polys)
    while len(heap) > 1:
        _, _, a = heapq.heappop(heap)
        _, _, b = heapq.heappop(heap)
        c = a * b
        heapq.heappush(heap, (len(c.coeffs), counter, c))
        counter += 1
    return heap[0][2]


def uni_divrem(s: UniPoly, t: UniPoly) -> tuple[UniPoly, UniPoly]:
    """Euclidean division by a monic ``t``: returns ``(q, r)`` with ``s = q*t + r``."""
    if s.modulus != t.modulus:
        raise RingMismatch("univariate coefficient rings differ")
    if t.is_zero():
        raise ZeroDivisor("division by the zero polynomial")
    m = s.modulus
    n = t.degree()
    if t.coeffs[n] != 1:
        raise NotMonic(f"leading coefficient {t.coeffs[n]} != 1")
    tail = [(e - n, c) for e, c in t.coeffs.items() if e != n]
    rem = dict(s.coeffs)
    heap = [-e for e in rem if e >= n]
    heapq.heapify(heap)
    quot: dict[int, int] = {}
    while heap:
        e = -heapq.heappop(heap)
        c = rem.pop(e, 0)
        if m is not None:
            c %= m
        if not c:
            continue
        while heap and heap[0] == -e:
            heapq.heappop(heap)
        shift = e - n
        quot[shift] = c
        for de, tc in tail:
            k = shift + de + n
            old = rem.get(k)
            v = (old or 0) - c * tc
            if m is not None:
                v %= m
            if v:
                rem[k] = v
                if old is None and k >= n:
                    heapq.heappush(heap, -k)
            elif old is not None:
                del rem[k]
    return UniPoly(quot, m), UniPoly(rem, m)


# ---------------------------------------------------------------------------
# Kronecker substitution


def kronecker_map(p: MultiPoly, d: int) -> UniPoly:
    """Substitute ``x_{i+1} -> z^(d^i)``; requires every exponent < ``d``."""
    if d < 2:
        raise ValueError("Kronecker base must be >= 2")
    out: dict[int, int] = {}
    for exps, c in p.terms.items():
        n = 0
        for e in reversed(exps):
            if e >= d:
                raise ExponentTooLarge(f"exponent {e} >= base {d}")
            n = n * d + e
        out[n] = c
    return UniPoly._raw(out, p.modulus)


def kronecker_unmap(q: UniPoly, d: int, k: int) -> MultiPoly:
    """Inverse of :func:`kronecker_map`: digit ``i`` of N in base ``d`` is ``n_{i+1}``."""
    terms: dict[Exponents, int] = {}
    for n, c in q.coeffs.items():
        digits = []
        for _ in range(k):
            n, r = divmod(n, d)
            digits.append(r)
        if n:
            raise ExponentTooLarge(f"z-exponent does not fit {k} digits in base {d}")
        terms[tuple(digits)] = c
    return MultiPoly._raw(terms, k, q.modulus)


def iterated_multiply(ps: Sequence[MultiPoly]) -> MultiPoly:
    """Product of ``ps`` through a single Kronecker image.

    The base is one more than the largest possible per-variable degree of
    the product, so the image of the product unpacks unambiguously.
    """
    if not ps:
        raise ValueError("iterated_multiply needs at least one factor")
    k, m = ps[0].nvars, ps[0].modulus
    for p in ps[1:]:
        ps[0]._check(p)
    if any(p.is_zero() for p in ps):
        return MultiPoly.zero(k, m, ps[0].names)
    d = max((sum(p.degree_in(j) for p in ps) for j in range(k)), default=0)
    base = max(d + 1, 2)
    images = [kronecker_map(p, base) for p in ps]
    product = kronecker_unmap(uni_mul_many(images), base, k)
    product.names = ps[0].names
    return product


def y_leading(t: MultiPoly) -> tuple[int, MultiPoly]:
    """``(m, c)`` where ``c(x)*y^m`` is the leading term in the last variable y."""
    m = t.degree_in(t.nvars - 1)
    k = t.nvars - 1
    coeff = {e[:k]: c for e, c in t.terms.items() if e[k] == m}
    return m, MultiPoly._raw(coeff, k, t.modulus)


def divrem_base(s: MultiPoly, t: MultiPoly) -> int:
    """Kronecker base used by :func:`divrem_multivar`.

    With ``d`` the largest single-variable degree in ``s`` and ``t``, every
    coefficient of the quotient has per-variable degree <= d^2 and every
    coefficient of the remainder <= d^2 + d, hence base ``d^2 + d + 1``.
    """
    d = max(s.max_degree(), t.max_degree())
    return max(d * d + d + 1, 2)


def divrem_multivar(s: MultiPoly, t: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Divide in ``R[x_1..x_k][y]`` (y = last variable) by ``t`` monic in y.

    Returns ``(q, r)`` with ``s = q*t + r`` and ``deg_y(r) < deg_y(t)``.
    """
    s._check(t)
    if t.is_zero():
        raise ZeroDivisor("division by the zero polynomial")
    if t.nvars == 0:
        raise ValueError("need at least the distinguished variable y")
    _, lead = y_leading(t)
    if not (lead.is_constant() and lead.constant_term() == 1):
        raise NotMonicInY(f"leading y-coefficient of divisor is {lead}, not 1")
    base = divrem_base(s, t)
    k = s.nvars
    q_img, r_img = uni_divrem(kronecker_map(s, base), kronecker_map(t, base))
    q = kronecker_unmap(q_img, base, k)
    r = kronecker_unmap(r_img, base, k)
    q.names = r.names = s.names
    return q, r


# ---------------------------------------------------------------------------
# Triangular matrices over MultiPoly


@dataclass(frozen=True)
class TriPolyMatrix:
    """Upper-triangular ``dim x dim`` matrix with MultiPoly entries."""

    entries: tuple[tuple[MultiPoly, ...], ...]

    def __post_init__(self) -> None:
        d = len(self.entries)
        if any(len(row) != d for row in self.entries):
            raise ValueError("matrix must be square")
        if d:
            first = self.entries[0][0]
            for row in self.entries:
                for e in row:
                    first._check(e)
        for i in range(d):
            for j in range(i):
                if not self.entries[i][j].is_zero():
                    raise NotTriangular(f"entry ({i + 1},{j + 1}) below the diagonal is nonzero")

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def nvars(self) -> int:
        return self.entries[0][0].nvars

    @property
    def modulus(self) -> int | None:
        return self.entries[0][0].modulus

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[MultiPoly]]) -> TriPolyMatrix:
        return cls(tuple(tuple(r) for r in rows))

    def diagonal(self) -> tuple[MultiPoly, ...]:
        return tuple(self.entries[i][i] for i in range(self.dim))

    def strict_upper(self) -> tuple[tuple[MultiPoly, ...], ...]:
        z = MultiPoly.zero(self.nvars, self.modulus)
        return tuple(
            tuple(self.entries[i][j] if j > i else z for j in range(self.dim))
            for i in range(self.dim)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriPolyMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)


def _scale_rows(diag: Sequence[MultiPoly], mat: list[list[MultiPoly]]) -> list[list[MultiPoly]]:
    return [[diag[i] * x if x else x for x in row] for i, row in enumerate(mat)]


def _add_upper(acc: list[list[UniPoly]] | None, mat: list[list[UniPoly]]) -> list[list[UniPoly]]:
    """``acc + mat`` on the upper triangle, reusing ``acc``; ``None`` is zero."""
    if acc is None:
        return [list(row) for row in mat]
    d = len(mat)
    for i in range(d):
        for j in range(i, d):
            if mat[i][j]:
                acc[i][j] = acc[i][j] + mat[i][j]
    return acc


def _scale_cols(mat: list[list[UniPoly]], diag: Sequence[UniPoly]) -> list[list[UniPoly]]:
    return [[x * diag[j] if x else x for j, x in enumerate(row)] for row in mat]


def _mul_strict_upper(mat: list[list[UniPoly]], upper, zero: UniPoly) -> list[list[UniPoly]]:
    d = len(mat)
    out = [[zero] * d for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            acc = zero
            for k in range(i, j):
                a, b = mat[i][k], upper[k][j]
                if a and b:
                    acc = acc + a * b
            out[i][j] = acc
    return out


def triangular_product_expansion(
    ms: Sequence[TriPolyMatrix], q: MultiPoly | None = None
) -> TriPolyMatrix:
    """Product ``M_1 ... M_n`` via the expansion of ``prod (D_i + U_i)``.

    Only summands with at most ``dim - 1`` strictly-upper factors survive.
    Each summand is ``D_{1,m1-1} U_m1 D_{m1+1,m2-1} ... U_ml D_{ml+1,n}``
    where the diagonal runs ``D_{u,v}`` come from a precomputed table.
    Summands are enumerated by the positions of their U factors.  Partial
    summands with the same number of U factors and the same last position
    have identical continuations, so they are added up before being
    extended.  That takes O(d n^2) matrix steps instead of one per summand.

    Entries are moved through one Kronecker substitution up front, so the
    expansion runs on univariate polynomials and is unpacked at the end.
    If ``q`` is given, every entry of the result is reduced modulo ``q``
    (monic in the last variable).
    """
    if not ms:
        raise ValueError("empty product")
    d = ms[0].dim
    nvars, modulus = ms[0].nvars, ms[0].modulus
    for mtx in ms:
        if mtx.dim != d:
            raise ValueError("matrices must share one dimension")
        ms[0].entries[0][0]._check(mtx.entries[0][0])
    n = len(ms)

    # Per-variable degree of any summand is at most the sum over factors of
    # the factor's largest entry degree, so this base keeps digits apart.
    bound = max(
        (sum(max(0, *(x.degree_in(j) for row in m.entries for x in row)) for m in ms) for j in range(nvars)),
        default=0,
    )
    base = max(bound + 1, 2)

    def image(x: MultiPoly) -> UniPoly:
        return kronecker_map(x, base)

    zero = UniPoly._raw({}, modulus)
    one = UniPoly._raw({0: 1}, modulus)
    diags = [tuple(image(x) for x in m.diagonal()) for m in ms]
    uppers = [tuple(tuple(image(x) for x in row) for row in m.strict_upper()) for m in ms]

    # runs[(u, v)] = D_u * ... * D_v (1-based, inclusive); runs[(u, u-1)] = identity.
    runs: dict[tuple[int, int], tuple[UniPoly, ...]] = {}
    for u in range(1, n + 2):
        cur = (one,) * d
        runs[(u, u - 1)] = cur
        for v in range(u, n + 1):
            cur = tuple(a * b for a, b in zip(cur, diags[v - 1]))
            runs[(u, v)] = cur

    # level[m] is the sum of every prefix D_{1,m1-1} U_m1 ... U_ml with l U
    # factors, the last at position m (m = 0 stands for the empty prefix).
    # Prefixes with equal (l, m) share all continuations, so they are summed
    # before being extended; tails[m] gathers level[m] over all l.
    tails: list[list[list[UniPoly]] | None] = [None] * (n + 1)
    level: dict[int, list[list[UniPoly]]] = {0: [[one if i == j else zero for j in range(d)] for i in range(d)]}
    for used in range(d):
        for last, prefix in level.items():
            tails[last] = _add_upper(tails[last], prefix)
        if used == d - 1:
            break
        nxt_level: dict[int, list[list[UniPoly]]] = {}
        for last, prefix in level.items():
            for m in range(last + 1, n + 1):
                nxt = _scale_cols(prefix, runs[(last + 1, m - 1)])
                nxt = _mul_strict_upper(nxt, uppers[m - 1], zero)
                if any(x for row in nxt for x in row):
                    nxt_level[m] = _add_upper(nxt_level.get(m), nxt)
        level = nxt_level

    total = [[zero] * d for _ in range(d)]
    for m, acc in enumerate(tails):
        if acc is None:
            continue
        for i, row in enumerate(_scale_cols(acc, runs[(m + 1, n)])):
            for j in range(i, d):
                if row[j]:
                    total[i][j] = total[i][j] + row[j]

    entries = [[kronecker_unmap(x, base, nvars) for x in row] for row in total]
    if q is not None:
        entries = [[divrem_multivar(x, q)[1] if x else x for x in row] for row in entries]
    return TriPolyMatrix(tuple(tuple(row) for row in entries))


def count_expansion_summands(n: int, d: int) -> int:
    """Number of summands with at most ``d - 1`` strictly-upper factors."""
    return sum(comb(n, l) for l in range(d))
