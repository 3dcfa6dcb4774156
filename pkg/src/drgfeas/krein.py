"""Krein parameters and the Delsarte clique bound."""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv, libmp

from .arrays import DerivedCounts, Verdict
from .spectral import AlgebraicScalar, Interval, Spectrum, compare_sign, integral_value

KREIN_TOL = Fraction(1, 10**8)
_PREC_STEPS = (64, 128, 256, 512)
# mpmath's interval context keeps precision as global state
_IV_LOCK = threading.Lock()


@contextmanager
def _iv_prec(bits: int):
    with _IV_LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = saved


class SingularSystem(ArithmeticError):
    pass


@dataclass(frozen=True)
class KreinTensor:
    """q^k_{ij}; Fractions on the exact path, (lo, hi) enclosures otherwise."""

    D: int
    entries: tuple  # entries[i][j][k]
    exact: bool

    def __call__(self, i: int, j: int, k: int):
        return self.entries[i][j][k]

    def items(self):
        r = range(self.D + 1)
        for i in r:
            for j in r:
                for k in r:
                    yield (i, j, k), self.entries[i][j][k]


def _inverse_fraction(M):
    """Gauss-Jordan inverse over the rationals."""
    n = len(M)
    A = [list(row) + [Fraction(int(r == c)) for c in range(n)] for r, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise SingularSystem("Krein system is singular")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def _mult_value(m):
    n = integral_value(m)
    if n is not None:
        return Fraction(n)
    if isinstance(m, Fraction):
        return m
    return Fraction(float(m))


def krein_parameters(spec: Spectrum, counts: DerivedCounts) -> KreinTensor:
    """Solve, for every (i, j), the (D+1)-square system obtained by evaluating
    E_i o E_j = (1/v) sum_k q^k_ij E_k on each distance class d.

    The (x, y) entry of E_i for d(x, y) = d is (m_i / v) u_d(theta_i).
    """
    D = spec.D
    v = counts.v
    mults = [_mult_value(m) for m in spec.multiplicities]
    if spec.all_rational:
        U = [[Fraction(x) for x in seq] for seq in spec.standard_sequences]  # U[i][d]
        E = [[mults[i] / v * U[i][d] for d in range(D + 1)] for i in range(D + 1)]
        M = [[E[kk][d] / v for kk in range(D + 1)] for d in range(D + 1)]
        Minv = _inverse_fraction(M)
        table = [[[None] * (D + 1) for _ in range(D + 1)] for _ in range(D + 1)]
        for i in range(D + 1):
            for j in range(i, D + 1):
                rhs = [E[i][d] * E[j][d] for d in range(D + 1)]
                for kk in range(D + 1):
                    table[i][j][kk] = table[j][i][kk] = sum(x * y for x, y in zip(Minv[kk], rhs))
        return KreinTensor(D, _freeze(table), True)
    return _krein_certified(spec, v, mults)


def _freeze(table):
    return tuple(tuple(tuple(row) for row in plane) for plane in table)


def _to_iv(x):
    if isinstance(x, Interval):
        lo, hi = x
        a = iv.mpf(lo.numerator) / lo.denominator
        b = iv.mpf(hi.numerator) / hi.denominator
        return iv.mpf([a.a, b.b])
    x = Fraction(x)
    return iv.mpf(x.numerator) / x.denominator


def _krein_certified(spec: Spectrum, v: Fraction, mults) -> KreinTensor:
    D = spec.D
    n = D + 1
    for prec in _PREC_STEPS:
        width = Fraction(1, 2 ** (prec - 16))
        with _iv_prec(prec):
            U = []
            for seq in spec.standard_sequences:
                U.append([_to_iv(x.enclose(width) if hasattr(x, "enclose") else x) for x in seq])
            vv = _to_iv(v)
            E = [[_to_iv(mults[i]) / vv * U[i][d] for d in range(n)] for i in range(n)]
            M = iv.matrix([[E[kk][d] / vv for kk in range(n)] for d in range(n)])
            try:
                # one inverse serves every (i, j) right-hand side
                Minv = iv.inverse(M)
            except ZeroDivisionError:
                continue
            table = [[[None] * n for _ in range(n)] for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    rhs = [E[i][d] * E[j][d] for d in range(n)]
                    for kk in range(n):
                        val = sum((Minv[kk, d] * rhs[d] for d in range(1, n)), Minv[kk, 0] * rhs[0])
                        enc = tuple(Fraction(*map(int, libmp.to_rational(e))) for e in val._mpi_)
                        table[i][j][kk] = table[j][i][kk] = enc
        if all(_decided(enc) for plane in table for row in plane for enc in row):
            return KreinTensor(D, _freeze(table), False)
    raise SingularSystem("could not certify Krein parameters")


def _decided(enc) -> bool:
    lo, hi = enc
    return lo > 0 or hi < 0 or (-KREIN_TOL <= lo and hi <= KREIN_TOL)


def krein_nonneg(q: KreinTensor, tol=None) -> Verdict:
    """Every q^k_ij >= -tol; tol defaults to 0 (exact) or 1e-8 (certified)."""
    if tol is None:
        tol = 0 if q.exact else KREIN_TOL
    tol = Fraction(tol)
    for (i, j, kk), val in q.items():
        if q.exact:
            bad = val < -tol
            shown = val
        else:
            lo, hi = val
            # an enclosure entirely below -tol is a certified violation;
            # one straddling -tol cannot occur for a tensor built by krein_parameters
            bad = hi < -tol
            shown = f"~{float((lo + hi) / 2):.6g}"
        if bad:
            return Verdict(False, f"q^{kk}_{i}{j} = {shown} < 0")
    return Verdict(True)


def delsarte_clique_size(spec: Spectrum) -> AlgebraicScalar | Fraction:
    """1 - k / theta_D; exact when theta_D is rational."""
    k = spec.eigenvalues[0]
    th = spec.eigenvalues[-1]
    if th.is_rational:
        return 1 - k.rational / th.rational
    return _DelsarteValue(k.rational, th)


@dataclass(frozen=True)
class _DelsarteValue:
    k: Fraction
    theta: AlgebraicScalar

    def __float__(self):
        return 1 - float(self.k) / float(self.theta)

    def compare(self, x) -> int:
        """Sign of (1 - k/theta_D) - x."""
        x = Fraction(x)
        return compare_sign(lambda t: 1 - self.k / t - x, [self.theta])
