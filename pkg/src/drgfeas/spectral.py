"""Exact eigenvalue machinery for the tridiagonal intersection matrix.

Eigenvalues are either integers (found by a divisor test on the monic
characteristic polynomial) or irrational roots isolated by Sturm sequences.
Everything downstream is either exact or a certified enclosure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, total_ordering
from typing import Callable, NamedTuple, Sequence

from . import poly as P
from .arrays import IntersectionArray, derived_counts

CERT_WIDTH = Fraction(1, 10**6)


class RepeatedRoot(ArithmeticError):
    """The characteristic polynomial is not square-free."""


class UndecidedError(ArithmeticError):
    pass


# --- rational interval arithmetic -------------------------------------------


class Interval(NamedTuple):
    lo: Fraction
    hi: Fraction

    @classmethod
    def point(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def integers(self) -> range:
        return range(math.ceil(self.lo), math.floor(self.hi) + 1)

    def _coerce(self, other) -> "Interval":
        return other if isinstance(other, Interval) else Interval.point(other)

    def __add__(self, other):
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __float__(self):
        return float(self.mid())


def interval_eval(p, iv: Interval) -> Interval:
    acc = Interval.point(0)
    for coef in reversed(p):
        acc = acc * iv + coef
    return acc


# --- algebraic scalars ---------------------------------------------------------


@total_ordering
@dataclass(frozen=True, eq=False)
class AlgebraicScalar:
    """An exact real: a rational, or the unique root of ``poly`` in (lo, hi].

    ``poly`` is a square-free integer polynomial without rational roots, so
    interval endpoints are never roots and bisection by sign is sound.
    """

    rational: Fraction | None = None
    poly: tuple[int, ...] = ()
    lo: Fraction = Fraction(0)
    hi: Fraction = Fraction(0)

    @classmethod
    def of(cls, x) -> "AlgebraicScalar":
        x = Fraction(x)
        return cls(rational=x, lo=x, hi=x)

    @classmethod
    def root(cls, poly, lo, hi) -> "AlgebraicScalar":
        return cls(None, tuple(poly), Fraction(lo), Fraction(hi))

    @property
    def is_rational(self) -> bool:
        return self.rational is not None

    @property
    def is_integer(self) -> bool:
        return self.rational is not None and self.rational.denominator == 1

    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    def refine(self, width) -> "AlgebraicScalar":
        if self.is_rational or self.hi - self.lo <= width:
            return self
        lo, span = self.lo, self.hi - self.lo
        steps = 0
        while span / 2**steps > width:
            steps += 1
        # bisect y in (0, 1] for q(y) = p(lo + span*y) at dyadic points t / 2^steps,
        # scaled so that every evaluation is an integer computation
        q = P.content_free(P.taylor_shift_scale(self.poly, lo, span))
        d = len(q) - 1
        t_lo, t_hi = 0, 1 << steps

        def sgn(t):
            acc = 0
            for i in range(d, -1, -1):
                acc = acc * t + q[i] * (1 << (steps * (d - i)))
            return acc > 0

        s_hi = sgn(t_hi)
        while t_hi - t_lo > 1:
            mid = (t_lo + t_hi) // 2
            if sgn(mid) == s_hi:
                t_hi = mid
            else:
                t_lo = mid
        unit = span / (1 << steps)
        return AlgebraicScalar.root(self.poly, lo + unit * t_lo, lo + unit * t_hi)

    def __float__(self) -> float:
        if self.is_rational:
            return float(self.rational)
        return float(self.refine(Fraction(1, 2**60)).interval().mid())

    def to_sympy(self):
        import sympy as sp

        if self.is_rational:
            return sp.Rational(self.rational.numerator, self.rational.denominator)
        x = sp.Symbol("x")
        expr = sum(c * x**i for i, c in enumerate(self.poly))
        below = P.count_roots(P.sturm_chain(list(self.poly)), -_root_bound(self.poly), self.lo)
        return sp.CRootOf(sp.Poly(expr, x), below)

    def sign(self) -> int:
        if self.is_rational:
            return (self.rational > 0) - (self.rational < 0)
        return compare_sign(lambda t: t, [self])

    def _cmp(self, other) -> int:
        other = other if isinstance(other, AlgebraicScalar) else AlgebraicScalar.of(other)
        if self.is_rational and other.is_rational:
            return (self.rational > other.rational) - (self.rational < other.rational)
        return compare_sign(lambda s, t: s - t, [self, other])

    def __eq__(self, other):
        if not isinstance(other, (AlgebraicScalar, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other):
        if not isinstance(other, (AlgebraicScalar, int, Fraction)):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self):
        return hash(self.rational) if self.is_rational else hash(self.poly)

    def __repr__(self):
        if self.is_rational:
            return f"AlgebraicScalar({self.rational})"
        return f"AlgebraicScalar(root of {list(self.poly)} in ({self.lo}, {self.hi}] ~ {float(self):.12g})"

    def to_json(self) -> dict:
        if self.is_rational:
            return {"value": str(self.rational), "decimal": f"{float(self.rational):.12g}", "exact": True}
        return {"decimal": f"{float(self):.12g}", "exact": False, "minimal_polynomial": _minpoly(self)}


def _root_bound(p) -> Fraction:
    lead = abs(p[-1])
    return 1 + Fraction(max(abs(c) for c in p[:-1]), lead) if len(p) > 1 else Fraction(1)


def _minpoly(x: AlgebraicScalar) -> list[int]:
    """The irreducible factor of ``x.poly`` vanishing at x, as integer coefficients."""
    import sympy as sp

    t = sp.Symbol("t")
    _, factors = sp.factor_list(sp.Poly(list(reversed(x.poly)), t))
    for f, _mult in factors:
        coeffs = [int(c) for c in reversed(f.all_coeffs())]
        if P.count_roots(P.sturm_chain(coeffs), x.lo, x.hi) == 1:
            return P.primitive(coeffs)
    raise ArithmeticError("no factor vanishes on the isolating interval")


def compare_sign(fn: Callable, scalars: Sequence[AlgebraicScalar], max_bits: int = 160) -> int:
    """Exact sign of ``fn(*scalars)`` where fn uses only + - * / on its arguments.

    Intervals are refined until the enclosure excludes zero; if it never does,
    zero is confirmed symbolically.
    """
    width = Fraction(1, 2**20)
    while True:
        scalars = [s.refine(width) for s in scalars]
        try:
            enc = fn(*[s.interval() if not s.is_rational else Interval.point(s.rational) for s in scalars])
        except ZeroDivisionError:
            enc = None
        if isinstance(enc, Interval):
            if enc.lo > 0:
                return 1
            if enc.hi < 0:
                return -1
        elif enc is not None:
            enc = Fraction(enc)
            return (enc > 0) - (enc < 0)
        if width < Fraction(1, 2**max_bits):
            break
        width = width * width if width > Fraction(1, 2**80) else width / 2**40
    import sympy as sp

    val = fn(*[s.to_sympy() for s in scalars])
    if sp.minimal_polynomial(val, sp.Symbol("t")) == sp.Symbol("t"):
        return 0
    raise UndecidedError("could not separate value from zero")


# --- polynomials in a single algebraic scalar -----------------------------------


@dataclass(frozen=True)
class ScalarPoly:
    """The value f(theta) for a rational polynomial f; used for u_i(theta) and friends."""

    coeffs: tuple[Fraction, ...]
    theta: AlgebraicScalar

    def _reduced(self):
        if self.theta.is_rational:
            return list(self.coeffs)
        return P.rem(list(self.coeffs), list(self.theta.poly))

    @cached_property
    def exact(self) -> Fraction | None:
        if self.theta.is_rational:
            return Fraction(P.evaluate(list(self.coeffs), self.theta.rational))
        r = self._reduced()
        if P.degree(r) <= 0:
            return Fraction(r[0]) if r else Fraction(0)
        return None

    def is_zero(self) -> bool:
        if self.exact is not None:
            return self.exact == 0
        g = P.poly_gcd(self._reduced(), list(self.theta.poly))
        if P.degree(g) <= 0:
            return False
        # the isolating interval holds exactly one root of theta.poly, hence at most one of g
        return P.count_roots(P.sturm_chain(g), self.theta.lo, self.theta.hi) > 0

    def sign(self) -> int:
        if self.exact is not None:
            return (self.exact > 0) - (self.exact < 0)
        if self.is_zero():
            return 0
        width = Fraction(1, 2**20)
        f = self._reduced()
        while True:
            enc = interval_eval(f, self.theta.refine(width).interval())
            if enc.lo > 0:
                return 1
            if enc.hi < 0:
                return -1
            width /= 2**20

    def enclose(self, width) -> Interval:
        if self.exact is not None:
            return Interval.point(self.exact)
        f = self._reduced()
        w = Fraction(width)
        while True:
            enc = interval_eval(f, self.theta.refine(w).interval())
            if enc.width <= width:
                return enc
            w /= 2**10

    def __float__(self):
        if self.exact is not None:
            return float(self.exact)
        return float(self.enclose(Fraction(1, 2**50)).mid())

    def __repr__(self):
        return f"ScalarPoly({float(self):.12g})"


def _sign_of(x) -> int:
    if hasattr(x, "sign"):
        return x.sign()
    return (x > 0) - (x < 0)


# --- operations -----------------------------------------------------------------


def char_poly(arr: IntersectionArray) -> list[int]:
    """det(xI - T) for the (D+1)x(D+1) tridiagonal matrix with rows (c_i, a_i, b_i)."""
    prev = [1]
    cur = [-arr.a_(0), 1]
    for i in range(1, arr.D + 1):
        nxt = P.sub(P.mul([-arr.a_(i), 1], cur), P.scale(prev, arr.b_(i - 1) * arr.c_(i)))
        prev, cur = cur, nxt
    return cur


def eigenvalues(arr: IntersectionArray) -> list[AlgebraicScalar]:
    """The D+1 distinct eigenvalues, descending."""
    cp = char_poly(arr)
    if P.degree(P.poly_gcd(cp, P.derivative(cp))) > 0:
        raise RepeatedRoot(f"characteristic polynomial of {arr} has a repeated root")
    k = arr.k
    roots: list[AlgebraicScalar] = []
    rest = cp
    for r in range(k, -k - 1, -1):
        c0 = rest[0]
        if (r == 0 and c0 == 0) or (r != 0 and c0 % r == 0 and P.evaluate(rest, r) == 0):
            roots.append(AlgebraicScalar.of(r))
            rest = [int(x) for x in P.deflate(rest, r)]
            if len(rest) == 1:
                break
    if P.degree(rest) > 0:
        rest = P.primitive(rest)
        for lo, hi in P.isolate_roots(rest, Fraction(-k - 1), Fraction(k + 1)):
            roots.append(AlgebraicScalar.root(rest, lo, hi))
    if len(roots) != arr.D + 1:
        raise RepeatedRoot(f"expected {arr.D + 1} real eigenvalues, found {len(roots)}")
    return sorted(roots, reverse=True)


class StandardSequence(NamedTuple):
    values: tuple
    terminal_holds: bool


def _sequence_polys(arr: IntersectionArray) -> list[list[Fraction]]:
    """u_0..u_D as rational polynomials in theta."""
    us = [[Fraction(1)], [Fraction(0), Fraction(1, arr.k)]]
    for i in range(1, arr.D):
        nxt = P.sub(P.mul([Fraction(-arr.a_(i)), Fraction(1)], us[i]), P.scale(us[i - 1], arr.c_(i)))
        us.append(P.scale(nxt, Fraction(1, arr.b_(i))))
    return us[: arr.D + 1]


def standard_sequence(arr: IntersectionArray, theta) -> StandardSequence:
    if not isinstance(theta, AlgebraicScalar):
        theta = AlgebraicScalar.of(theta)
    polys = _sequence_polys(arr)
    D = arr.D
    resid = P.sub(
        P.add(P.scale(polys[D - 1], arr.c_(D)) if D >= 1 else [0], P.scale(polys[D], arr.a_(D))),
        P.mul([0, 1], polys[D]),
    )
    if theta.is_rational:
        vals = tuple(Fraction(P.evaluate(p, theta.rational)) for p in polys)
        holds = P.evaluate(resid, theta.rational) == 0
    else:
        vals = tuple(ScalarPoly(tuple(Fraction(c) for c in p), theta) for p in polys)
        holds = ScalarPoly(tuple(Fraction(c) for c in resid), theta).is_zero()
    return StandardSequence(vals, holds)


@dataclass(frozen=True)
class CertifiedValue:
    """Enclosure of an irrational-path quantity; ``exact`` is set once proven."""

    lo: Fraction
    hi: Fraction
    exact: Fraction | None = None

    def __float__(self):
        return float(self.exact) if self.exact is not None else float((self.lo + self.hi) / 2)


def _norm_poly(arr: IntersectionArray) -> list[Fraction]:
    """sum_i k_i u_i(theta)^2 as a polynomial in theta."""
    kseq = derived_counts(arr).kseq
    acc = [Fraction(0)]
    for ki, u in zip(kseq, _sequence_polys(arr)):
        acc = P.add(acc, P.scale(P.mul(u, u), ki))
    return acc


def multiplicity(arr: IntersectionArray, theta: AlgebraicScalar, width=CERT_WIDTH):
    """m = v / sum k_i u_i(theta)^2; Fraction when theta is rational, else CertifiedValue.

    On the irrational path an integer candidate inside the enclosure is
    confirmed exactly (v - n*S(theta) == 0) before ``exact`` is set.
    """
    v = derived_counts(arr).v
    S = ScalarPoly(tuple(_norm_poly(arr)), theta)
    if S.exact is not None:
        return v / S.exact
    w = Fraction(width)
    while True:
        s_enc = S.enclose(w / (v + 1) / 4)
        if s_enc.lo <= 0:
            w /= 2**10
            continue
        m_enc = Interval.point(v) / s_enc
        if m_enc.width < width:
            break
        w /= 2**10
    exact = None
    ints = list(m_enc.integers())
    if len(ints) == 1:
        n = ints[0]
        diff = P.sub([v], P.scale(list(S.coeffs), n))
        if ScalarPoly(tuple(Fraction(c) for c in diff), theta).is_zero():
            exact = Fraction(n)
    return CertifiedValue(m_enc.lo, m_enc.hi, exact)


def multiplicities(arr: IntersectionArray) -> list:
    return [multiplicity(arr, th) for th in eigenvalues(arr)]


def integral_value(m) -> int | None:
    """The integer a multiplicity provably equals, else None."""
    if isinstance(m, CertifiedValue):
        m = m.exact
    if m is None or m.denominator != 1:
        return None
    return int(m)


def sign_changes(u: Sequence) -> int:
    signs = [s for s in (_sign_of(x) for x in u) if s]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def interlacing_check(outer: Sequence, inner: Sequence) -> bool:
    """theta_{n-m+i}(outer) <= theta_i(inner) <= theta_i(outer), both sorted descending."""
    n, m = len(outer), len(inner)
    if m > n:
        return False
    return all(outer[n - m + i] <= inner[i] <= outer[i] for i in range(m))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[AlgebraicScalar, ...]
    multiplicities: tuple
    standard_sequences: tuple[tuple, ...]

    @property
    def D(self) -> int:
        return len(self.eigenvalues) - 1

    @property
    def all_rational(self) -> bool:
        return all(t.is_rational for t in self.eigenvalues)

    def integer_multiplicities(self) -> list[int | None]:
        return [integral_value(m) for m in self.multiplicities]


def spectrum(arr: IntersectionArray) -> Spectrum:
    evs = eigenvalues(arr)
    seqs = tuple(standard_sequence(arr, th).values for th in evs)
    mults = tuple(multiplicity(arr, th) for th in evs)
    return Spectrum(tuple(evs), mults, seqs)
