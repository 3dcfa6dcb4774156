"""The feasibility gate: four core conditions plus named, individually toggleable filters."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, NamedTuple

from .arrays import (
    DomainError,
    IntersectionArray,
    Verdict,
    basic_valid,
    derived_counts,
    is_bipartite_array,
    is_taylor,
    p_numbers,
)
from .krein import krein_nonneg, krein_parameters
from .spectral import (
    AlgebraicScalar,
    CertifiedValue,
    RepeatedRoot,
    Spectrum,
    compare_sign,
    integral_value,
    spectrum,
)

CORE_CHECKS = ("integrality", "multiplicities", "parity", "krein")

ANCHORS = {
    "integrality": "all k_i integral; all p^i_jh integral and nonnegative",
    "multiplicities": "all multiplicities positive integers summing to v",
    "parity": "k_i a_i even for every i",
    "krein": "all Krein parameters nonnegative",
    "lemma_pre": "k = b_0 > b_1 >= ... ; 1 = c_1 <= c_2 <= ... ; b_i >= c_j when i + j <= D",
    "lemma8": "D >= 3 implies b_1 >= k/3 + 1/3",
    "local": "D >= 2 implies 2(a_1 + 1) - (c_2 - 1) <= k",
    "prop0": "D >= 3, a_1 > 0: a_i + a_{i+1} >= a_1, equality only at i = D-1 with a_D = 0, a_{D-1} = a_1, b_{D-1} = 1",
    "prop3": "c_2 > k/2 or b_2 > k_3/2 forces D = 3 and a bipartite or Taylor array",
    "lemma7": "a_1 >= k/2 - 1 and c_2 >= 2 force D = 3 and b_2 < c_2",
    "lemma9": "D = 3, a_3 = 0: theta_1 > 0 > -1 >= theta_2 >= -b_2 >= theta_3",
    "lemma12": "multiplicity < k/2 only for theta_1 or theta_D, integral, with (theta + 1) | b_1",
    "lemma13": "multiplicity <= k - 2 bounds theta_2 (via theta_1) or theta_{D-1} (via theta_D) by -1 - b_1/(theta + 1)",
    "c2_1_div": "c_2 = 1 implies (a_1 + 1) | k",
    "a2_min": "a_1 > 0 and D >= 3 imply a_2 >= min(b_2, c_2)",
    "theta1_min": "D >= 3 implies theta_1 >= min((a_1 + sqrt(a_1^2 + 4k))/2, a_3)",
    "c3_c2": "D >= 4 and c_2 >= 2 imply c_3 >= 3c_2/2",
    "theta2_d4": "D >= 4 implies theta_2 >= 0",
}


@dataclass(frozen=True)
class FilterConfig:
    """Optional filters; the four core conditions always run."""

    lemma_pre: bool = True
    lemma8: bool = True
    local: bool = True
    prop0: bool = True
    prop3: bool = True
    lemma7: bool = True
    lemma9: bool = True
    lemma12: bool = True
    lemma13: bool = True
    c2_1_div: bool = True
    a2_min: bool = True
    theta1_min: bool = True
    c3_c2: bool = True
    theta2_d4: bool = True

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def core_only(cls) -> "FilterConfig":
        return cls(**{n: False for n in cls.names()})

    def enabled(self) -> tuple[str, ...]:
        return tuple(n for n in self.names() if getattr(self, n))

    def replace(self, **changes) -> "FilterConfig":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_CONFIG = FilterConfig()


class Check(NamedTuple):
    name: str
    passed: bool
    witness: str
    anchor: str


# --- lazily computed context ------------------------------------------------------


class _Context:
    def __init__(self, arr: IntersectionArray):
        self.arr = arr

    @cached_property
    def counts(self):
        return derived_counts(self.arr)

    @cached_property
    def pnums(self):
        return p_numbers(self.arr)

    @cached_property
    def spectrum(self) -> Spectrum | None:
        try:
            return spectrum(self.arr)
        except RepeatedRoot:
            return None

    def m(self, i: int) -> Fraction:
        m = self.spectrum.multiplicities[i]
        if isinstance(m, CertifiedValue):
            return m.exact if m.exact is not None else (m.lo + m.hi) / 2
        return m


# --- core conditions --------------------------------------------------------------


def check_integrality(ctx: _Context) -> Verdict:
    for i, ki in enumerate(ctx.counts.kseq):
        if ki.denominator != 1:
            return Verdict(False, f"k_{i} = {ki}")
    # a negative count is the more telling witness, so report the most negative first
    items = list(ctx.pnums.items())
    (i, j, h), p = min(items, key=lambda it: it[1])
    if p < 0:
        return Verdict(False, f"p^{i}_{j}{h} = {p}")
    for (i, j, h), p in items:
        if p.denominator != 1:
            return Verdict(False, f"p^{i}_{j}{h} = {p}")
    return Verdict(True)


def check_multiplicities(ctx: _Context) -> Verdict:
    spec = ctx.spectrum
    if spec is None:
        return Verdict(False, "repeated eigenvalue")
    total = 0
    for i, m in enumerate(spec.multiplicities):
        n = integral_value(m)
        if n is None or n < 1:
            return Verdict(False, f"m_{i} = {_fmt(m)}")
        total += n
    if total != ctx.counts.v:
        return Verdict(False, f"sum of multiplicities {total} != v = {ctx.counts.v}")
    return Verdict(True)


def check_parity(ctx: _Context) -> Verdict:
    for i, (ki, ai) in enumerate(zip(ctx.counts.kseq, ctx.arr.a)):
        prod = ki * ai
        if prod.denominator != 1 or prod.numerator % 2:
            return Verdict(False, f"k_{i} a_{i} = {prod}")
    return Verdict(True)


def check_krein(ctx: _Context) -> Verdict:
    if ctx.spectrum is None:
        return Verdict(False, "not computable: repeated eigenvalue")
    return krein_nonneg(krein_parameters(ctx.spectrum, ctx.counts))


def _fmt(m) -> str:
    if isinstance(m, CertifiedValue):
        return f"~{float(m):.9g}"
    return str(m)


# --- named filters ----------------------------------------------------------------


def filter_lemma_pre(ctx: _Context) -> Verdict:
    return basic_valid(ctx.arr)


def filter_lemma8(ctx: _Context) -> Verdict:
    arr = ctx.arr
    if arr.D >= 3 and 3 * arr.b[1] < arr.k + 1:
        return Verdict(False, f"b_1 = {arr.b[1]} < (k+1)/3 = {Fraction(arr.k + 1, 3)}")
    return Verdict(True)


def filter_local(ctx: _Context) -> Verdict:
    arr = ctx.arr
    if arr.D >= 2:
        lhs = 2 * (arr.a[1] + 1) - (arr.c[1] - 1)
        if lhs > arr.k:
            return Verdict(False, f"2(a_1+1)-(c_2-1) = {lhs} > k = {arr.k}")
    return Verdict(True)


def filter_prop0(ctx: _Context) -> Verdict:
    arr = ctx.arr
    a, D = arr.a, arr.D
    if D < 3 or a[1] == 0:
        return Verdict(True)
    for i in range(1, D):
        s = a[i] + a[i + 1]
        if s < a[1]:
            return Verdict(False, f"a_{i}+a_{i + 1} = {s} < a_1 = {a[1]}")
        if s == a[1] and not (i == D - 1 and a[D] == 0 and a[D - 1] == a[1] and arr.b[D - 1] == 1):
            return Verdict(False, f"a_{i}+a_{i + 1} = a_1 without the terminal equality pattern")
    return Verdict(True)


def filter_prop3(ctx: _Context) -> Verdict:
    arr = ctx.arr
    if arr.D < 3:
        return Verdict(True)
    k3 = ctx.counts.kseq[3]
    if 2 * arr.c[1] > arr.k or 2 * arr.b[2] > k3:
        if not (arr.D == 3 and (is_bipartite_array(arr) or is_taylor(arr))):
            return Verdict(False, f"c_2 = {arr.c[1]}, b_2 = {arr.b[2]}, k_3 = {k3} but not D=3 bipartite/Taylor")
    return Verdict(True)


def filter_lemma7(ctx: _Context) -> Verdict:
    arr = ctx.arr
    if arr.D >= 3 and 2 * arr.a[1] >= arr.k - 2 and arr.c[1] >= 2:
        if arr.D != 3 or not arr.b[2] < arr.c[1]:
            return Verdict(False, f"D = {arr.D}, b_2 = {arr.b[2]}, c_2 = {arr.c[1]}")
    return Verdict(True)


def _need_spectrum(fn):
    def wrapped(ctx: _Context) -> Verdict:
        if ctx.spectrum is None:
            return Verdict(True, "not evaluated: repeated eigenvalue")
        return fn(ctx, ctx.spectrum.eigenvalues)

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


@_need_spectrum
def filter_lemma9(ctx: _Context, th) -> Verdict:
    arr = ctx.arr
    if arr.D != 3 or arr.a[3] != 0:
        return Verdict(True)
    b2 = arr.b[2]
    ok = th[1] > 0 and th[2] <= -1 and th[2] >= -b2 and th[3] <= -b2
    if not ok:
        return Verdict(False, f"theta = ({float(th[1]):.6g}, {float(th[2]):.6g}, {float(th[3]):.6g}), b_2 = {b2}")
    return Verdict(True)


@_need_spectrum
def filter_lemma12(ctx: _Context, th) -> Verdict:
    arr = ctx.arr
    D = arr.D
    if D < 3:
        return Verdict(True)
    half_k = Fraction(arr.k, 2)
    for i in range(1, D + 1):
        if ctx.m(i) < half_k:
            t = th[i]
            if i not in (1, D):
                return Verdict(False, f"m_{i} = {_fmt(ctx.spectrum.multiplicities[i])} < k/2 at theta_{i}")
            if not t.is_integer:
                return Verdict(False, f"theta_{i} ~ {float(t):.6g} not integral with m_{i} < k/2")
            q = int(t.rational) + 1
            if q == 0 or arr.b[1] % q:
                return Verdict(False, f"theta_{i} + 1 = {q} does not divide b_1 = {arr.b[1]}")
    return Verdict(True)


@_need_spectrum
def filter_lemma13(ctx: _Context, th) -> Verdict:
    arr = ctx.arr
    D, k, b1 = arr.D, arr.k, arr.b_(1)
    if D < 3:
        return Verdict(True)
    if ctx.m(1) <= k - 2:
        # theta_2 - (-1 - b1/(theta_1 + 1)) >= 0
        if compare_sign(lambda t1, t2: t2 + 1 + b1 / (t1 + 1), [th[1], th[2]]) < 0:
            return Verdict(False, f"theta_2 ~ {float(th[2]):.6g} < -1 - b_1/(theta_1+1)")
    if ctx.m(D) <= k - 2:
        if compare_sign(lambda tD, tD1: -1 - b1 / (tD + 1) - tD1, [th[D], th[D - 1]]) < 0:
            return Verdict(False, f"theta_{D - 1} ~ {float(th[D - 1]):.6g} > -1 - b_1/(theta_D+1)")
    return Verdict(True)


def filter_c2_1_div(ctx: _Context) -> Verdict:
    arr = ctx.arr
    if arr.D >= 2 and arr.c[1] == 1 and arr.k % (arr.a[1] + 1):
        return Verdict(False, f"a_1 + 1 = {arr.a[1] + 1} does not divide k = {arr.k}")
    return Verdict(True)


def filter_a2_min(ctx: _Context) -> Verdict:
    arr = ctx.arr
    if arr.D >= 3 and arr.a[1] > 0 and arr.a[2] < min(arr.b[2], arr.c[1]):
        return Verdict(False, f"a_2 = {arr.a[2]} < min(b_2, c_2) = {min(arr.b[2], arr.c[1])}")
    return Verdict(True)


def _at_least_larger_root(theta: AlgebraicScalar, a1: int, k: int) -> bool:
    """theta >= (a1 + sqrt(a1^2 + 4k))/2, decided exactly."""
    if compare_sign(lambda t: 2 * t - a1, [theta]) < 0:
        return False
    return compare_sign(lambda t: t * t - a1 * t - k, [theta]) >= 0


@_need_spectrum
def filter_theta1_min(ctx: _Context, th) -> Verdict:
    arr = ctx.arr
    if arr.D < 3:
        return Verdict(True)
    a1, a3 = arr.a[1], arr.a[3]
    if th[1] >= a3 or _at_least_larger_root(th[1], a1, arr.k):
        return Verdict(True)
    return Verdict(False, f"theta_1 ~ {float(th[1]):.6g} below min((a_1+sqrt(a_1^2+4k))/2, a_3 = {a3})")


def filter_c3_c2(ctx: _Context) -> Verdict:
    arr = ctx.arr
    if arr.D >= 4 and arr.c[1] >= 2 and 2 * arr.c[2] < 3 * arr.c[1]:
        return Verdict(False, f"c_3 = {arr.c[2]} < 3c_2/2 = {Fraction(3 * arr.c[1], 2)}")
    return Verdict(True)


@_need_spectrum
def filter_theta2_d4(ctx: _Context, th) -> Verdict:
    if ctx.arr.D >= 4 and th[2] < 0:
        return Verdict(False, f"theta_2 ~ {float(th[2]):.6g} < 0")
    return Verdict(True)


CORE: dict[str, Callable[[_Context], Verdict]] = {
    "integrality": check_integrality,
    "multiplicities": check_multiplicities,
    "parity": check_parity,
    "krein": check_krein,
}

FILTERS: dict[str, Callable[[_Context], Verdict]] = {
    "lemma_pre": filter_lemma_pre,
    "lemma8": filter_lemma8,
    "local": filter_local,
    "prop0": filter_prop0,
    "prop3": filter_prop3,
    "lemma7": filter_lemma7,
    "lemma9": filter_lemma9,
    "lemma12": filter_lemma12,
    "lemma13": filter_lemma13,
    "c2_1_div": filter_c2_1_div,
    "a2_min": filter_a2_min,
    "theta1_min": filter_theta1_min,
    "c3_c2": filter_c3_c2,
    "theta2_d4": filter_theta2_d4,
}

# Cheap-to-expensive order used by the short-circuiting verdict.
_STAGED = (
    ("integrality_k", None),
    ("parity", None),
    ("lemma_pre", "lemma_pre"),
    ("lemma8", "lemma8"),
    ("local", "local"),
    ("prop0", "prop0"),
    ("prop3", "prop3"),
    ("lemma7", "lemma7"),
    ("c2_1_div", "c2_1_div"),
    ("a2_min", "a2_min"),
    ("c3_c2", "c3_c2"),
    ("integrality", None),
    ("multiplicities", None),
    ("lemma9", "lemma9"),
    ("lemma12", "lemma12"),
    ("lemma13", "lemma13"),
    ("theta1_min", "theta1_min"),
    ("theta2_d4", "theta2_d4"),
    ("krein", None),
)


@dataclass
class FeasibilityReport:
    array: IntersectionArray
    checks: list[Check]
    config: FilterConfig
    spectrum: Spectrum | None = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        return "feasible" if self.feasible else "infeasible"

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        out = {
            "array": str(self.array),
            "verdict": self.verdict,
            "checks": [{"name": c.name, "pass": c.passed, "witness": c.witness} for c in self.checks],
            "config": self.config.to_json(),
            "spectrum": None,
            "multiplicities": None,
        }
        if self.spectrum is not None:
            out["spectrum"] = [t.to_json() for t in self.spectrum.eigenvalues]
            out["multiplicities"] = [
                int(n) if (n := integral_value(m)) is not None else _fmt(m) for m in self.spectrum.multiplicities
            ]
        return out


def gate(arr: IntersectionArray, cfg: FilterConfig = DEFAULT_CONFIG) -> FeasibilityReport:
    """Full report: every core condition, then every enabled filter, in a fixed order."""
    ctx = _Context(arr)
    checks = []
    for name, fn in CORE.items():
        res = fn(ctx)
        checks.append(Check(name, res.passed, res.witness, ANCHORS[name]))
    for name in cfg.enabled():
        res = FILTERS[name](ctx)
        checks.append(Check(name, res.passed, res.witness, ANCHORS[name]))
    return FeasibilityReport(arr, checks, cfg, ctx.spectrum)


def _k_integral(ctx: _Context) -> Verdict:
    arr = ctx.arr
    ki = 1
    for i in range(1, arr.D + 1):
        num = ki * arr.b_(i - 1)
        if num % arr.c_(i):
            return Verdict(False, f"k_{i} not integral")
        ki = num // arr.c_(i)
    return Verdict(True)


def first_failure(arr: IntersectionArray, cfg: FilterConfig = DEFAULT_CONFIG) -> str | None:
    """Name of the first failing check in cheap-to-expensive order, or None if feasible."""
    ctx = _Context(arr)
    for name, flag in _STAGED:
        if flag is not None and not getattr(cfg, flag):
            continue
        if name == "integrality_k":
            res = _k_integral(ctx)
        elif flag is None:
            res = CORE[name](ctx)
        else:
            res = FILTERS[name](ctx)
        if not res.passed:
            return name
    return None


def is_feasible(arr: IntersectionArray, cfg: FilterConfig = DEFAULT_CONFIG) -> bool:
    """Verdict of :func:`gate` without building the full report."""
    return first_failure(arr, cfg) is None


# --- auxiliary checks ---------------------------------------------------------------


class ConjectureResult(NamedTuple):
    holds: bool
    witness: str = ""


def conjecture_a_check(arr: IntersectionArray) -> ConjectureResult:
    """-1 - b_1/(theta_3 + 1) >= theta_2 >= -1 - b_1/(theta_1 + 1) for a D = 3 array."""
    if arr.D != 3:
        raise DomainError("conjecture check needs diameter 3")
    th = spectrum(arr).eigenvalues
    b1 = arr.b[1]
    left = compare_sign(lambda t3, t2: -1 - b1 / (t3 + 1) - t2, [th[3], th[2]])
    if left < 0:
        return ConjectureResult(False, f"theta_2 ~ {float(th[2]):.9g} > -1 - b_1/(theta_3+1)")
    right = compare_sign(lambda t2, t1: t2 + 1 + b1 / (t1 + 1), [th[2], th[1]])
    if right < 0:
        return ConjectureResult(False, f"theta_2 ~ {float(th[2]):.9g} < -1 - b_1/(theta_1+1)")
    return ConjectureResult(True)


def kappa(eps) -> Fraction:
    """Valency threshold (40/eps^2 - 1)(40/eps^2 + 2)/2."""
    eps = Fraction(eps)
    if eps <= 0 or eps > 2:
        raise DomainError(f"epsilon must lie in (0, 2], got {eps}")
    t = 40 / eps**2
    return (t - 1) * (t + 2) / 2
