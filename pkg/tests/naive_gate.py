"""Reference feasibility gate and D = 3 enumerator used only by the tests.

Nothing here imports drgfeas.  Spectra come from sympy (exact roots of the
factored characteristic polynomial), multiplicities are decided by exact
polynomial remainders, Krein parameters use the closed triple-product formula,
and each filter is written out from its statement.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
import sympy as sp

X = sp.Symbol("x")
DIGITS = 60
KREIN_TOL = mpmath.mpf("1e-8")


class Naive:
    def __init__(self, b, c):
        self.b = list(b)
        self.c = list(c)
        self.D = len(b)
        self.k = b[0]
        bb = self.b + [0]
        cc = [0] + self.c
        self.bb, self.cc = bb, cc
        self.a = [self.k - bb[i] - cc[i] for i in range(self.D + 1)]
        ks = [Fraction(1)]
        for i in range(1, self.D + 1):
            ks.append(ks[-1] * bb[i - 1] / cc[i])
        self.ks = ks
        self.v = sum(ks)

    def matrix(self):
        """L[i][j] = p^i_{1j}: row i lists neighbours of a vertex at distance i."""
        n = self.D + 1
        L = [[0] * n for _ in range(n)]
        for i in range(n):
            if i > 0:
                L[i][i - 1] = self.cc[i]
            L[i][i] = self.a[i]
            if i < self.D:
                L[i][i + 1] = self.bb[i]
        return L


# --- intersection numbers ------------------------------------------------------


def pnumbers(arr: Naive):
    """p[i][j][h] = p^i_{jh} via B_{j+1} = (B_1 B_j - b_{j-1} B_{j-1} - a_j B_j) / c_{j+1},
    with (B_j)[i][h] = p^i_{jh}."""
    n = arr.D + 1
    B1 = [[Fraction(x) for x in row] for row in arr.matrix()]
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    Bs = [ident, B1]

    def mm(P, Q):
        return [[sum(P[i][t] * Q[t][j] for t in range(n)) for j in range(n)] for i in range(n)]

    for j in range(1, arr.D):
        prod = mm(Bs[j], B1)
        nxt = [
            [(prod[i][h] - arr.bb[j - 1] * Bs[j - 1][i][h] - arr.a[j] * Bs[j][i][h]) / arr.cc[j + 1] for h in range(n)]
            for i in range(n)
        ]
        Bs.append(nxt)
    return [[[Bs[j][i][h] for h in range(n)] for j in range(n)] for i in range(n)]


# --- spectrum ---------------------------------------------------------------------


def sign_of(expr) -> int:
    """Exact sign of a real algebraic sympy expression."""
    val = sp.N(expr, DIGITS)
    if abs(val) > sp.Float(10) ** (-40):
        return 1 if val > 0 else -1
    if sp.minimal_polynomial(expr, X) == X:
        return 0
    raise ArithmeticError(f"cannot decide the sign of {expr}")


def _u_polys(arr: Naive):
    us = [sp.Integer(1), X / arr.k]
    for i in range(1, arr.D):
        us.append(sp.expand(((X - arr.a[i]) * us[i] - arr.cc[i] * us[i - 1]) / arr.bb[i]))
    return us[: arr.D + 1]


class Spec:
    """Eigenvalues (descending, sympy), multiplicities (Fraction or None if irrational)."""

    def __init__(self, thetas, mults, us):
        self.thetas = thetas
        self.mults = mults
        self.us = us


def spectrum(arr: Naive):
    """None when the characteristic polynomial has a repeated root."""
    M = sp.Matrix(arr.matrix())
    cp = sp.Poly(M.charpoly(X).as_expr(), X)
    _, factors = sp.factor_list(cp)
    if any(mult > 1 for _, mult in factors):
        return None
    upolys = _u_polys(arr)
    S = sp.Poly(sum(sp.Rational(ki.numerator, ki.denominator) * u**2 for ki, u in zip(arr.ks, upolys)), X)
    v = sp.Rational(arr.v.numerator, arr.v.denominator)
    pairs = []
    for f, _ in factors:
        r = S.rem(f)
        m = v / r.as_expr() if r.degree() <= 0 else None
        for root in f.all_roots():
            pairs.append((root, m))
    pairs.sort(key=lambda p: sp.N(p[0], DIGITS), reverse=True)
    thetas = [p[0] for p in pairs]
    mults = [None if p[1] is None else Fraction(int(p[1].p), int(p[1].q)) for p in pairs]
    us = [[u.subs(X, t) for u in upolys] for t in thetas]
    return Spec(thetas, mults, us)


def krein_closed_form(arr: Naive, spec: Spec):
    """q^l_ij = (m_i m_j / v) sum_d k_d u_d(t_i) u_d(t_j) u_d(t_l), numerically at DIGITS."""
    n = arr.D + 1
    mpmath.mp.dps = DIGITS
    U = [[mpmath.mpf(str(sp.N(x, DIGITS + 10))) for x in row] for row in spec.us]
    m = [mpmath.mpf(x.numerator) / x.denominator for x in spec.mults]
    ks = [mpmath.mpf(x.numerator) / x.denominator for x in arr.ks]
    v = mpmath.mpf(arr.v.numerator) / arr.v.denominator
    q = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                s = mpmath.fsum(ks[d] * U[i][d] * U[j][d] * U[l][d] for d in range(n))
                q[(i, j, l)] = m[i] * m[j] / v * s
    return q


def krein_exact(arr: Naive, spec: Spec):
    """Same formula in exact rationals; only for rational spectra."""
    n = arr.D + 1
    U = [[Fraction(int(sp.Rational(x).p), int(sp.Rational(x).q)) for x in row] for row in spec.us]
    q = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                s = sum(arr.ks[d] * U[i][d] * U[j][d] * U[l][d] for d in range(n))
                q[(i, j, l)] = spec.mults[i] * spec.mults[j] / arr.v * s
    return q


# --- the gate ---------------------------------------------------------------------------


def _core_integrality(arr):
    if any(x.denominator != 1 for x in arr.ks):
        return False
    p = pnumbers(arr)
    n = arr.D + 1
    return all(p[i][j][h].denominator == 1 and p[i][j][h] >= 0 for i in range(n) for j in range(n) for h in range(n))


def _core_parity(arr):
    return all((ki * ai).denominator == 1 and (ki * ai).numerator % 2 == 0 for ki, ai in zip(arr.ks, arr.a))


def _core_multiplicities(arr, spec):
    if spec is None:
        return False
    if any(m is None or m.denominator != 1 or m < 1 for m in spec.mults):
        return False
    return sum(spec.mults) == arr.v


def _core_krein(arr, spec):
    if all(t.is_Rational for t in spec.thetas):
        return all(q >= 0 for q in krein_exact(arr, spec).values())
    return all(q >= -KREIN_TOL for q in krein_closed_form(arr, spec).values())


def _monotone(arr):
    b, c, D = arr.bb, arr.cc, arr.D
    if D > 1 and b[0] <= b[1]:
        return False
    if any(b[i] < b[i + 1] for i in range(1, D - 1)):
        return False
    if any(c[i] > c[i + 1] for i in range(1, D)):
        return False
    return all(b[i] >= c[j] for i in range(D) for j in range(1, D + 1) if i + j <= D)


def _lemma8(arr):
    return arr.D < 3 or 3 * arr.b[1] >= arr.k + 1


def _local(arr):
    return arr.D < 2 or 2 * (arr.a[1] + 1) - (arr.c[1] - 1) <= arr.k


def _prop0(arr):
    a, D = arr.a, arr.D
    if D < 3 or a[1] <= 0:
        return True
    for i in range(1, D):
        if a[i] + a[i + 1] < a[1]:
            return False
        if a[i] + a[i + 1] == a[1]:
            if not (i == D - 1 and a[D] == 0 and a[D - 1] == a[1] and arr.bb[D - 1] == 1):
                return False
    return True


def _bipartite(arr):
    return all(x == 0 for x in arr.a[1:])


def _taylor(arr):
    return arr.D == 3 and arr.b[2] == 1 and arr.c[2] == arr.k and arr.b[1] == arr.c[1]


def _prop3(arr):
    if arr.D < 3:
        return True
    if 2 * arr.c[1] > arr.k or 2 * arr.b[2] > arr.ks[3]:
        return arr.D == 3 and (_bipartite(arr) or _taylor(arr))
    return True


def _lemma7(arr):
    if arr.D < 3:
        return True
    if 2 * arr.a[1] >= arr.k - 2 and arr.c[1] >= 2:
        return arr.D == 3 and arr.b[2] < arr.c[1]
    return True


def _c2_1_div(arr):
    return arr.D < 2 or arr.c[1] != 1 or arr.k % (arr.a[1] + 1) == 0


def _a2_min(arr):
    return arr.D < 3 or arr.a[1] == 0 or arr.a[2] >= min(arr.b[2], arr.c[1])


def _c3_c2(arr):
    return arr.D < 4 or arr.c[1] < 2 or 2 * arr.c[2] >= 3 * arr.c[1]


def _lemma9(arr, spec):
    if arr.D != 3 or arr.a[3] != 0:
        return True
    t = spec.thetas
    b2 = arr.b[2]
    return sign_of(t[1]) > 0 and sign_of(t[2] + 1) <= 0 and sign_of(t[2] + b2) >= 0 and sign_of(t[3] + b2) <= 0


def _lemma12(arr, spec):
    if arr.D < 3:
        return True
    for i in range(1, arr.D + 1):
        if 2 * spec.mults[i] < arr.k:
            t = spec.thetas[i]
            if i not in (1, arr.D) or not t.is_Integer:
                return False
            q = int(t) + 1
            if q == 0 or arr.b[1] % q:
                return False
    return True


def _lemma13(arr, spec):
    if arr.D < 3:
        return True
    t, D, b1 = spec.thetas, arr.D, arr.b[1]
    if spec.mults[1] <= arr.k - 2 and sign_of(t[2] + 1 + b1 / (t[1] + 1)) < 0:
        return False
    if spec.mults[D] <= arr.k - 2 and sign_of(-1 - b1 / (t[D] + 1) - t[D - 1]) < 0:
        return False
    return True


def _theta1_min(arr, spec):
    if arr.D < 3:
        return True
    a1, a3, k = arr.a[1], arr.a[3], arr.k
    t1 = spec.thetas[1]
    return sign_of(t1 - a3) >= 0 or sign_of(t1 - (a1 + sp.sqrt(a1 * a1 + 4 * k)) / 2) >= 0


def _theta2_d4(arr, spec):
    return arr.D < 4 or sign_of(spec.thetas[2]) >= 0


CHEAP = (_monotone, _lemma8, _local, _prop0, _prop3, _lemma7, _c2_1_div, _a2_min, _c3_c2)
SPECTRAL = (_lemma9, _lemma12, _lemma13, _theta1_min, _theta2_d4)


@lru_cache(maxsize=None)
def naive_feasible(b: tuple, c: tuple) -> bool:
    """Core conditions plus every default filter."""
    arr = Naive(b, c)
    if not _core_integrality(arr) or not _core_parity(arr):
        return False
    if not all(f(arr) for f in CHEAP):
        return False
    spec = spectrum(arr)
    if not _core_multiplicities(arr, spec):
        return False
    if not all(f(arr, spec) for f in SPECTRAL):
        return False
    return _core_krein(arr, spec)


def naive_core_feasible(b: tuple, c: tuple) -> bool:
    """Only the four core conditions."""
    arr = Naive(b, c)
    if not _core_integrality(arr) or not _core_parity(arr):
        return False
    spec = spectrum(arr)
    return _core_multiplicities(arr, spec) and _core_krein(arr, spec)


# --- vectorized D = 3 box enumeration ----------------------------------------------------


def _multiplicity_screen(k, b1, b2, c2, c3, v):
    """Float screen: m_i = v * w_0^2 for the unit eigenvector w of the symmetrized matrix.

    Drops a candidate only when some m_i is clearly not a positive integer;
    nearly repeated eigenvalues pass through untouched.
    """
    n = len(b1)
    if n == 0:
        return np.zeros(0, dtype=bool)
    f = np.float64
    S = np.zeros((n, 4, 4))
    S[:, 1, 1] = k - b1 - 1
    S[:, 2, 2] = k - b2 - c2
    S[:, 3, 3] = k - c3
    for i, off in enumerate((np.full(n, f(k)), (b1 * c2).astype(f), (b2 * c3).astype(f))):
        S[:, i, i + 1] = S[:, i + 1, i] = np.sqrt(off)
    vals, vecs = np.linalg.eigh(S)
    m = v.astype(f)[:, None] * vecs[:, 0, :] ** 2
    close = np.abs(m - np.rint(m)) <= 1e-6 * np.maximum(m, 1.0)
    good = np.all(close & (m > 0.5), axis=1)
    return good | (np.min(np.diff(vals, axis=1), axis=1) < 1e-3)


def naive_enumerate_d3(kmax: int, kmin: int = 2) -> list[str]:
    """Every feasible D = 3 array with kmin <= k <= kmax, as "b0,b1,b2;1,c2,c3" strings."""
    found = []
    for k in range(max(kmin, 2), kmax + 1):
        g = np.arange(1, k + 1, dtype=np.int64)
        B1, C2, C3 = (x.ravel() for x in np.meshgrid(g[:-1], g, g, indexing="ij"))
        for x2 in range(1, k):
            keep = (x2 + C2 <= k) & (k * B1 % C2 == 0)
            b1, c2, c3 = B1[keep], C2[keep], C3[keep]
            k2 = k * b1 // c2
            keep = k2 * x2 % c3 == 0
            b1, c2, c3, k2 = b1[keep], c2[keep], c3[keep], k2[keep]
            k3 = k2 * x2 // c3
            a1, a2, a3 = k - b1 - 1, k - x2 - c2, k - c3
            keep = (k * a1 % 2 == 0) & (k2 * a2 % 2 == 0) & (k3 * a3 % 2 == 0)
            # two p-numbers whose integrality is cheap to state
            keep &= (b1 * x2 % c2 == 0) & (b1 * a2 % c2 == 0)
            b1, c2, c3, k2, k3 = b1[keep], c2[keep], c3[keep], k2[keep], k3[keep]
            b2 = np.full(len(b1), x2, dtype=np.int64)
            keep = _multiplicity_screen(k, b1, b2, c2, c3, 1 + k + k2 + k3)
            for x1, y2, y3 in zip(b1[keep], c2[keep], c3[keep]):
                b = (k, int(x1), x2)
                c = (1, int(y2), int(y3))
                if naive_feasible(b, c):
                    found.append(b + c)
    found.sort(key=lambda t: (t[0], t[1], t[2], t[4], t[5]))
    return [f"{t[0]},{t[1]},{t[2]};{t[3]},{t[4]},{t[5]}" for t in found]
