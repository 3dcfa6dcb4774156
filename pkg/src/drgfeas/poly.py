"""Small exact polynomial toolkit: coefficient lists, lowest degree first."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Poly = list  # of int or Fraction


def trim(p: Sequence) -> list:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    p = trim(p)
    return -1 if p == [0] else len(p) - 1


def add(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])


def mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                out[i + j] += x * y
    return trim(out)


def scale(p, s):
    return trim([x * s for x in p])


def evaluate(p, x):
    acc = 0
    for coef in reversed(p):
        acc = acc * x + coef
    return acc


def taylor_shift_scale(p, a, h):
    """Coefficients of q(y) = p(a + h*y)."""
    out = [Fraction(0)]
    for coef in reversed(list(p)):
        out = add(mul(out, [Fraction(a), Fraction(h)]), [coef])
    return out


def derivative(p):
    return trim([i * p[i] for i in range(1, len(p))] or [0])


def divmod_poly(p, q):
    """Quotient and remainder over the rationals."""
    p = [Fraction(x) for x in trim(p)]
    q = trim(q)
    dq = len(q) - 1
    if dq < 0 or q == [0]:
        raise ZeroDivisionError("polynomial division by zero")
    lead = Fraction(q[-1])
    if len(p) - 1 < dq:
        return [Fraction(0)], trim(p)
    quot = [Fraction(0)] * (len(p) - dq)
    for top in range(len(p) - 1, dq - 1, -1):
        f = p[top] / lead
        quot[top - dq] = f
        if f:
            for j in range(dq + 1):
                p[top - dq + j] -= f * q[j]
    return trim(quot), trim(p[:dq] or [Fraction(0)])


def rem(p, q):
    return divmod_poly(p, q)[1]


def content_free(p):
    """Scale by a positive rational to coprime integers; signs are preserved."""
    p = [Fraction(x) for x in trim(p)]
    if p == [0]:
        return [0]
    den = 1
    for x in p:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in p]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints]


def primitive(p):
    """Scale a rational polynomial to coprime integers with positive leading coefficient."""
    p = [Fraction(x) for x in trim(p)]
    if p == [0]:
        return [0]
    den = 1
    for x in p:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in p]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    if ints[-1] < 0:
        ints = [-x for x in ints]
    return ints


def poly_gcd(p, q):
    """Monic-free gcd, returned as a primitive integer polynomial."""
    a, b = trim(p), trim(q)
    while b != [0] and degree(b) >= 0:
        a, b = b, rem(a, b)
    return primitive(a)


def square_free(p):
    g = poly_gcd(p, derivative(p))
    if degree(g) <= 0:
        return primitive(p)
    return primitive(divmod_poly(p, g)[0])


def divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def integer_roots(p, bound: int | None = None) -> list[int]:
    """Integer roots of an integer polynomial (rational roots of a monic one)."""
    p = trim(p)
    roots = []
    # strip x = 0 factors first so the constant term is nonzero
    while len(p) > 1 and p[0] == 0:
        if 0 not in roots:
            roots.append(0)
        p = p[1:]
    if len(p) <= 1:
        return sorted(roots)
    cands = divisors(p[0])
    for d in cands:
        if bound is not None and d > bound:
            break
        for r in (d, -d):
            if evaluate(p, r) == 0:
                roots.append(r)
    return sorted(set(roots))


def deflate(p, r):
    """Divide out (x - r) exactly."""
    q, remainder = divmod_poly(p, [-r, 1])
    assert remainder == [0], "not a root"
    return q


# --- Sturm sequences ---------------------------------------------------------


def sturm_chain(p) -> list[list]:
    chain = [content_free(p), content_free(derivative(p))]
    while degree(chain[-1]) > 0:
        r = rem(chain[-2], chain[-1])
        if r == [0] or degree(r) < 0:
            break
        chain.append(scale(content_free(r), -1))
    return chain


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_variations(chain, x) -> int:
    signs = [s for s in (_sign(evaluate(q, x)) for q in chain) if s]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_roots(chain, lo, hi) -> int:
    """Number of distinct real roots in (lo, hi]."""
    return sign_variations(chain, lo) - sign_variations(chain, hi)


def isolate_roots(p, lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (l, h], each holding exactly one root of square-free p, in increasing order."""
    chain = sturm_chain(p)
    out = []
    stack = [(Fraction(lo), Fraction(hi), count_roots(chain, lo, hi))]
    while stack:
        l, h, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append((l, h))
            continue
        m = (l + h) / 2
        nl = count_roots(chain, l, m)
        stack.append((m, h, n - nl))
        stack.append((l, m, nl))
    return sorted(out)
