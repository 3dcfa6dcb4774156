"""Intersection arrays and the quantities that follow from them by rational arithmetic."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence


class ArrayError(ValueError):
    pass


class DomainError(ValueError):
    """A parameter outside the domain an operation is defined on."""


class ShapeError(ArrayError):
    pass


class NegativeA(ArrayError):
    pass


class BadC1(ArrayError):
    pass


class ArrayParseError(ArrayError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class Verdict(NamedTuple):
    passed: bool
    witness: str = ""


@dataclass(frozen=True)
class IntersectionArray:
    """The array {b_0,...,b_{D-1}; c_1,...,c_D}.

    Only shape, positivity, c_1 = 1 and a_i >= 0 are enforced here; the
    monotonicity conditions live in :func:`basic_valid` so that filters can be
    exercised on arrays a real graph could never have.
    """

    b: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(x) for x in self.b)
        c = tuple(int(x) for x in self.c)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        if len(b) != len(c) or not b:
            raise ShapeError(f"need equal nonzero lengths, got {len(b)} and {len(c)}")
        if any(x < 1 for x in b + c):
            raise ShapeError("entries must be positive integers")
        if c[0] != 1:
            raise BadC1(f"c_1 must be 1, got {c[0]}")
        for i, ai in enumerate(self.a):
            if ai < 0:
                raise NegativeA(f"a_{i} = {ai} < 0")

    @classmethod
    def parse(cls, text: str) -> "IntersectionArray":
        return parse_array(text)

    @property
    def D(self) -> int:
        return len(self.b)

    @property
    def k(self) -> int:
        return self.b[0]

    def b_(self, i: int) -> int:
        """b_i with b_D = 0 (and 0 outside 0..D)."""
        return self.b[i] if 0 <= i < self.D else 0

    def c_(self, i: int) -> int:
        """c_i with c_0 = 0 (and 0 outside 0..D)."""
        return self.c[i - 1] if 1 <= i <= self.D else 0

    def a_(self, i: int) -> int:
        return self.a[i] if 0 <= i <= self.D else 0

    @cached_property
    def a(self) -> tuple[int, ...]:
        k = self.k
        return tuple(k - self.b_(i) - self.c_(i) for i in range(self.D + 1))

    def __str__(self) -> str:
        return ",".join(map(str, self.b)) + ";" + ",".join(map(str, self.c))

    def braces(self) -> str:
        return "{" + str(self) + "}"

    def sort_key(self) -> tuple:
        return (self.D, self.k) + self.b[1:] + self.c[1:]


def new_array(b: Sequence[int], c: Sequence[int]) -> IntersectionArray:
    return IntersectionArray(tuple(b), tuple(c))


_NUM = re.compile(r"[0-9]+")


def parse_array(text: str) -> IntersectionArray:
    """Parse the canonical "b0,b1,...;c1,...,cD" form (ASCII digits, no spaces)."""
    pos = 0
    halves: list[list[int]] = [[], []]
    part = 0
    n = len(text)
    if n == 0:
        raise ArrayParseError("empty array string", 0)
    while True:
        m = _NUM.match(text, pos)
        if m is None:
            raise ArrayParseError("expected a number", pos)
        halves[part].append(int(m.group()))
        pos = m.end()
        if pos == n:
            break
        ch = text[pos]
        if ch == ",":
            pos += 1
        elif ch == ";" and part == 0:
            part = 1
            pos += 1
        else:
            raise ArrayParseError(f"unexpected character {ch!r}", pos)
    if part == 0:
        raise ArrayParseError("missing ';'", n)
    return IntersectionArray(tuple(halves[0]), tuple(halves[1]))


@dataclass(frozen=True)
class DerivedCounts:
    k: int
    a: tuple[int, ...]
    kseq: tuple[Fraction, ...]
    v: Fraction


def derived_counts(arr: IntersectionArray) -> DerivedCounts:
    kseq = [Fraction(1)]
    for i in range(1, arr.D + 1):
        kseq.append(kseq[-1] * arr.b_(i - 1) / arr.c_(i))
    return DerivedCounts(arr.k, arr.a, tuple(kseq), sum(kseq, Fraction(0)))


# --- distance polynomials ---------------------------------------------------
# Polynomials are lists of Fractions, lowest degree first.


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                out[i + j] += x * y
    return out


def _psub(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)]


def _pscale(p, s):
    return [x * s for x in p]


def _pmod(p, m):
    """Remainder of p modulo m (m has nonzero leading coefficient)."""
    p = list(p)
    dm = len(m) - 1
    lead = m[-1]
    for top in range(len(p) - 1, dm - 1, -1):
        f = p[top] / lead
        if f:
            for j in range(dm + 1):
                p[top - dm + j] -= f * m[j]
    return p[:dm] if len(p) > dm else p


def distance_polynomials(arr: IntersectionArray) -> list[list[Fraction]]:
    """v_0..v_{D+1}; v_i(A) = A_i and v_{D+1} is a multiple of the minimal polynomial."""
    vs = [[Fraction(1)], [Fraction(0), Fraction(1)]]
    for i in range(1, arr.D + 1):
        xv = [Fraction(0)] + vs[i]
        nxt = _psub(_psub(xv, _pscale(vs[i], arr.a_(i))), _pscale(vs[i - 1], arr.b_(i - 1)))
        # For i = D there is no c_{D+1}; keep the unscaled polynomial as the modulus.
        vs.append(_pscale(nxt, Fraction(1, arr.c_(i + 1))) if i < arr.D else nxt)
    return vs


@dataclass(frozen=True)
class PNumberTensor:
    D: int
    entries: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def __call__(self, i: int, j: int, h: int) -> Fraction:
        return self.entries[i][j][h]

    def items(self):
        r = range(self.D + 1)
        for i in r:
            for j in r:
                for h in r:
                    yield (i, j, h), self.entries[i][j][h]


def p_numbers(arr: IntersectionArray) -> PNumberTensor:
    """All p^i_{jh} from v_j v_h = sum_i p^i_{jh} v_i modulo the minimal polynomial."""
    D = arr.D
    vs = distance_polynomials(arr)
    modulus = vs[D + 1]
    basis = vs[: D + 1]
    table = [[[Fraction(0)] * (D + 1) for _ in range(D + 1)] for _ in range(D + 1)]
    for j in range(D + 1):
        for h in range(j, D + 1):
            rem = _pmod(_pmul(basis[j], basis[h]), modulus)
            rem = rem + [Fraction(0)] * (D + 1 - len(rem))
            # back-substitute in the triangular basis v_D, ..., v_0
            for i in range(D, -1, -1):
                coef = rem[i] / basis[i][i]
                table[i][j][h] = table[i][h][j] = coef
                if coef:
                    for t in range(i + 1):
                        rem[t] -= coef * basis[i][t]
    return PNumberTensor(D, tuple(tuple(tuple(row) for row in plane) for plane in table))


# --- pattern predicates -------------------------------------------------------


def is_taylor(arr: IntersectionArray) -> bool:
    return arr.D == 3 and arr.b[2] == 1 and arr.c[2] == arr.k and arr.b[1] == arr.c[1]


def is_bipartite_array(arr: IntersectionArray) -> bool:
    return all(x == 0 for x in arr.a[1:])


def is_antipodal_d3_cover(arr: IntersectionArray) -> int | None:
    """Cover index r = k_3 + 1 for the D = 3 antipodal pattern, else None."""
    if arr.D != 3 or arr.b[2] != 1 or arr.c[2] != arr.k:
        return None
    b1, c2 = arr.b[1], arr.c[1]
    if b1 % c2:
        return None
    return b1 // c2 + 1


def basic_valid(arr: IntersectionArray) -> Verdict:
    b, c, D = arr.b, arr.c, arr.D
    if D > 1 and not b[0] > b[1]:
        return Verdict(False, f"b_0={b[0]} <= b_1={b[1]}")
    for i in range(1, D - 1):
        if b[i] < b[i + 1]:
            return Verdict(False, f"b_{i}={b[i]} < b_{i + 1}={b[i + 1]}")
    for i in range(D - 1):
        if c[i] > c[i + 1]:
            return Verdict(False, f"c_{i + 1}={c[i]} > c_{i + 2}={c[i + 1]}")
    for i in range(D):
        for j in range(1, D - i + 1):
            if arr.b_(i) < arr.c_(j):
                return Verdict(False, f"b_{i}={arr.b_(i)} < c_{j}={arr.c_(j)}")
    return Verdict(True)
