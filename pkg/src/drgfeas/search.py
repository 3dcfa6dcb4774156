"""Exhaustive enumeration of intersection arrays and the reproduction runs built on it.

The diameter-three enumerator walks (k, b1, c2, b2) in Python and vectorizes
over c3 with numpy.  Cheap integer conditions that the gate would reject anyway
(k_i and p-number integrality, parity, and the non-spectral filters switched on
in the config) are applied as masks before any candidate reaches the exact gate.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .arrays import DomainError, IntersectionArray, derived_counts, is_bipartite_array, is_taylor
from .constraints import Constraint, Expr, eval_q
from .feasibility import DEFAULT_CONFIG, FilterConfig, conjecture_a_check, first_failure, gate, kappa
from .spectral import integral_value, spectrum

# variables bound at each loop level of the D = 3 walk
_LEVELS = (
    frozenset({"k", "D", "b1", "a1"}),
    frozenset({"c2", "k2"}),
    frozenset({"b2", "a2"}),
    frozenset({"c3", "a3", "k3", "v"}),
)


@dataclass(frozen=True)
class SearchSpec:
    name: str = "custom"
    D: int = 3
    kmin: int = 2
    kmax: int = 6
    constraints: tuple[str, ...] = ()
    # an expression in k, b1, b2, c2 that must be an eigenvalue; lets c3 be solved for
    eigenvalue_target: str | None = None
    config: FilterConfig = DEFAULT_CONFIG
    # batched float screen on multiplicities ahead of the exact gate (D = 3 walk only)
    float_prefilter: bool = True

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for text in self.constraints:
            Constraint(text)
        if self.eigenvalue_target is not None:
            expr = Expr(self.eigenvalue_target)
            if not expr.names <= {"k", "b1", "b2", "c2", "a1", "a2", "k2"}:
                raise DomainError("eigenvalue target may only use k, b1, b2, c2, a1, a2, k2")
        if self.D < 1:
            raise DomainError(f"diameter must be positive, got {self.D}")

    def with_range(self, kmin: int | None = None, kmax: int | None = None) -> "SearchSpec":
        return _replace(self, kmin=self.kmin if kmin is None else kmin, kmax=self.kmax if kmax is None else kmax)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "D": self.D,
            "k_range": [self.kmin, self.kmax],
            "constraints": list(self.constraints),
            "eigenvalue_target": self.eigenvalue_target,
            "config": self.config.to_json(),
            "float_prefilter": self.float_prefilter,
        }


def _replace(spec: SearchSpec, **kw) -> SearchSpec:
    return dataclasses.replace(spec, **kw)


COUNTER_KEYS = ("generated", "structurally_valid", "gated", "survivors")


@dataclass
class SearchResult:
    spec: SearchSpec
    survivors: list[IntersectionArray]
    counters: dict
    wall_time: float = 0.0
    reports: dict = field(default_factory=dict, repr=False)

    def arrays(self) -> list[str]:
        return [str(a) for a in self.survivors]

    def report(self, arr: IntersectionArray) -> dict:
        """Full gate report for a survivor, computed on first use."""
        key = str(arr)
        if key not in self.reports:
            self.reports[key] = gate(arr, self.spec.config).to_json()
        return self.reports[key]

    def jsonl_lines(self) -> list[str]:
        return [json.dumps(self.report(a), sort_keys=True) for a in self.survivors]

    def summary(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "survivors": self.arrays(),
            "counters": self.counters,
            "wall_time_s": round(self.wall_time, 3),
        }

    def write(self, path) -> None:
        """Survivors as JSONL at ``path`` and the summary next to it."""
        from pathlib import Path

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(line + "\n" for line in self.jsonl_lines()))
        path.with_suffix(".summary.json").write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")


def _sort_key(arr: IntersectionArray):
    # (k, b1, b2, c2, c3) for D = 3; the same idea for other diameters
    return (arr.D, arr.k) + arr.b[1:] + arr.c[1:]


def _empty_counters() -> dict:
    out = {k: 0 for k in COUNTER_KEYS}
    out["pruned"] = {}
    out["gate_failures"] = {}
    return out


def _merge(total: dict, part: dict) -> None:
    for key in COUNTER_KEYS:
        total[key] += part[key]
    for group in ("pruned", "gate_failures"):
        for name, n in part[group].items():
            total[group][name] = total[group].get(name, 0) + n


def _bump(counters: dict, group: str, name: str, n: int = 1) -> None:
    if n:
        counters[group][name] = counters[group].get(name, 0) + n


# --- constraint bookkeeping -------------------------------------------------------


@lru_cache(maxsize=64)
def _split_constraints(texts: tuple[str, ...]):
    """Constraints grouped by the first D = 3 loop level at which they can be evaluated."""
    levels: list[list[Constraint]] = [[] for _ in _LEVELS]
    spectral, late = [], []
    for text in texts:
        c = Constraint(text)
        if c.spectral:
            spectral.append(c)
            continue
        seen: frozenset = frozenset()
        for lvl, names in enumerate(_LEVELS):
            seen = seen | names
            if c.names <= seen:
                levels[lvl].append(c)
                break
        else:
            late.append(c)
    return [tuple(x) for x in levels], tuple(spectral), tuple(late)


def array_env(arr: IntersectionArray) -> dict:
    counts = derived_counts(arr)
    env: dict = {"k": arr.k, "D": arr.D, "v": counts.v}
    for i in range(1, arr.D + 1):
        env[f"b{i}"] = arr.b_(i)
        env[f"c{i}"] = arr.c_(i)
        env[f"a{i}"] = arr.a_(i)
        env[f"k{i}"] = counts.kseq[i]
    env["b0"] = arr.k
    return env


def constraint_failures(spec: SearchSpec, arr: IntersectionArray) -> list[str]:
    """Non-spectral constraints of ``spec`` that ``arr`` violates."""
    env = array_env(arr)
    out = []
    for text in spec.constraints:
        c = Constraint(text)
        if c.spectral:
            continue
        missing = c.names - env.keys()
        if missing or not c.holds(env):
            out.append(text)
    return out


def spectral_failures(spec: SearchSpec, arr: IntersectionArray, spec_=None) -> list[str]:
    """Spectral constraints violated by an array whose multiplicities are integral."""
    sp = spec_ or spectrum(arr)
    env = array_env(arr)
    thetas = {}
    for i, (t, m) in enumerate(zip(sp.eigenvalues, sp.multiplicities)):
        thetas[f"theta{i}"] = t
        n = integral_value(m)
        env[f"m{i}"] = Fraction(n) if n is not None else Fraction(float(m))
    out = []
    for text in spec.constraints:
        c = Constraint(text)
        if c.spectral and not c.holds_spectral(env, thetas):
            out.append(text)
    return out


# --- the exact stage ----------------------------------------------------------------


def _finish(spec: SearchSpec, arrays: Iterable[IntersectionArray], counters: dict, survivors: list):
    spectral_cons = any(Constraint(t).spectral for t in spec.constraints)
    for arr in arrays:
        counters["gated"] += 1
        fail = first_failure(arr, spec.config)
        if fail is not None:
            _bump(counters, "gate_failures", fail)
            continue
        if spectral_cons and spectral_failures(spec, arr):
            _bump(counters, "pruned", "spectral_constraints")
            continue
        survivors.append(arr)


# --- float multiplicity prefilter ---------------------------------------------------

_MULT_RTOL = 1e-6
_GAP_MIN = 1e-3


def _float_multiplicity_mask(k, b1, b2, c2, c3, k2, k3, v) -> np.ndarray:
    """False where some multiplicity is certainly not a positive integer.

    Uses a batched symmetric eigensolve.  Candidates with nearly repeated
    eigenvalues are passed through to the exact stage untouched.
    """
    n = len(b1)
    if n == 0:
        return np.zeros(0, dtype=bool)
    f = np.float64
    a1 = (k - b1 - 1).astype(f)
    a2 = (k - b2 - c2).astype(f)
    a3 = (k - c3).astype(f)
    T = np.zeros((n, 4, 4))
    T[:, 1, 1], T[:, 2, 2], T[:, 3, 3] = a1, a2, a3
    off = [np.full(n, math.sqrt(k)), np.sqrt((b1 * c2).astype(f)), np.sqrt((b2 * c3).astype(f))]
    for i, o in enumerate(off):
        T[:, i, i + 1] = T[:, i + 1, i] = o
    th = np.linalg.eigvalsh(T)  # ascending, (n, 4)
    gap = np.min(np.diff(th, axis=1), axis=1)
    kf, b1f, b2f, c2f = f(k), b1.astype(f), b2.astype(f), c2.astype(f)
    u1 = th / kf
    u2 = ((th - a1[:, None]) * u1 - 1) / b1f[:, None]
    u3 = ((th - a2[:, None]) * u2 - c2f[:, None] * u1) / b2f[:, None]
    S = 1 + kf * u1**2 + k2.astype(f)[:, None] * u2**2 + k3.astype(f)[:, None] * u3**2
    m = v.astype(f)[:, None] / S
    near = np.abs(m - np.rint(m)) <= _MULT_RTOL * np.maximum(1.0, m)
    ok = np.all(near & (m > 0.5), axis=1)
    return ok | (gap < _GAP_MIN)


# --- D = 3 enumeration for one valency ---------------------------------------------


def _pnumbers_ok(k, b1, b2, c2, c3, a1, a2, a3):
    """Integrality and nonnegativity of every p^i_jh with 2 <= j, h <= 3 (the rest are a, b, c)."""
    X = a2 + a3 - a1
    C = b1 * c3 - b1 * k - b2 * c3 - c3 * c3 + c3 * k + c3
    c2c3 = c2 * c3
    pairs = (
        (b1 * a2, c2),  # p^1_22
        (b1 * b2, c2),  # p^1_23
        (b1 * b2 * a3, c2c3),  # p^1_33
        (-(b1 * b2 - b1 * k - b2 * b2 - 2 * b2 * c2 - b2 * c3 + b2 * k + b2 - c2 * c2 + c2 * k + c2), c2),  # p^2_22
        (b2 * X, c2),  # p^2_23
        (-b2 * C, c2c3),  # p^2_33
        (c3 * X, c2),  # p^3_22
        (-C, c2),  # p^3_23
        (
            b1 * b2 * k + b1 * c3 * c3 - b1 * c3 * k - b2 * c3 * c3 + c2 * c3 * c3 - c2 * c3 * k - c2 * c3
            - c3**3 + c3 * c3 * k + c3 * c3,
            c2c3,
        ),  # p^3_33
    )
    ok = np.ones(np.shape(b2), dtype=bool)
    for num, den in pairs:
        ok &= (num % den == 0) & (num >= 0)
    return ok


def _search_k(spec: SearchSpec, k: int):
    cfg = spec.config
    levels, spectral_cons, late = _split_constraints(spec.constraints)
    counters = _empty_counters()
    target = Expr(spec.eigenvalue_target) if spec.eigenvalue_target else None

    B1, C2, B2 = [], [], []
    b1_lo = max(1, -(-(k + 1) // 3)) if cfg.lemma8 else 1
    for b1 in range(b1_lo, k):
        a1 = k - b1 - 1
        if (k * a1) % 2:
            continue
        env = {"k": k, "D": 3, "b1": b1, "a1": a1}
        if not all(c.holds(env) for c in levels[0]):
            continue
        c2_hi = min(b1, k - 1) if cfg.lemma_pre else k - 1
        for c2 in range(1, c2_hi + 1):
            if (k * b1) % c2:
                continue
            if cfg.local and 2 * (a1 + 1) - (c2 - 1) > k:
                continue
            if cfg.c2_1_div and c2 == 1 and k % (a1 + 1):
                continue
            # 2c2 > k needs a bipartite (a1 = 0) or Taylor (b1 = c2) array
            if cfg.prop3 and 2 * c2 > k and a1 > 0 and b1 != c2:
                continue
            env["c2"], env["k2"] = c2, k * b1 // c2
            if not all(c.holds(env) for c in levels[1]):
                continue
            # p^1_23 = b1 b2 / c2 integral
            step = c2 // math.gcd(c2, b1)
            b2_hi = k - c2
            if cfg.lemma_pre:
                b2_hi = min(b2_hi, b1)
            if cfg.lemma7 and 2 * a1 >= k - 2 and c2 >= 2:
                b2_hi = min(b2_hi, c2 - 1)
            n = len(range(step, b2_hi + 1, step))
            if n:
                B1.append(np.full(n, b1, dtype=np.int64))
                C2.append(np.full(n, c2, dtype=np.int64))
                B2.append(np.arange(step, b2_hi + 1, step, dtype=np.int64))
    if not B1:
        return [], counters
    b1, c2, b2 = np.concatenate(B1), np.concatenate(C2), np.concatenate(B2)
    a1 = k - b1 - 1
    a2 = k - b2 - c2
    k2 = k * b1 // c2
    ok = (b1 * a2) % c2 == 0
    ok &= (k2 * a2) % 2 == 0
    pos = a1 > 0
    if cfg.prop0:
        ok &= ~pos | (a2 > 0)
    if cfg.a2_min:
        ok &= ~pos | (a2 >= np.minimum(b2, c2))
    env3 = {"k": k, "D": 3, "b1": b1, "a1": a1, "c2": c2, "k2": k2, "b2": b2, "a2": a2}
    for c in levels[2]:
        ok &= c.mask(env3)
    b1, c2, b2, a1, a2, k2 = (x[ok] for x in (b1, c2, b2, a1, a2, k2))

    # pair each (b1, c2, b2) with its admissible c3 values
    if target is not None:
        qi, c3 = _solve_c3(target, k, b1, b2, c2, a1, a2, k2, cfg.lemma_pre)
    else:
        qi, c3 = _all_c3(k, b2, c2, k2, cfg.lemma_pre)
    b1, c2, b2, a1, a2, k2 = (x[qi] for x in (b1, c2, b2, a1, a2, k2))
    counters["generated"] = len(c3)

    a3 = k - c3
    k3 = k2 * b2 // c3
    v = 1 + k + k2 + k3
    ok = _pnumbers_ok(k, b1, b2, c2, c3, a1, a2, a3)
    ok &= (k3 * a3) % 2 == 0
    bip = (a1 == 0) & (a2 == 0) & (a3 == 0)
    tay = (b2 == 1) & (c3 == k) & (b1 == c2)
    pos = a1 > 0
    if cfg.prop0:
        s = a2 + a3
        ok &= ~pos | (s > a1) | ((s == a1) & (a3 == 0) & (a2 == a1) & (b2 == 1))
    if cfg.prop3:
        ok &= ~((2 * c2 > k) | (2 * b2 > k3)) | bip | tay
    env4 = dict(env3, b1=b1, a1=a1, c2=c2, k2=k2, b2=b2, a2=a2, c3=c3, a3=a3, k3=k3, v=v)
    for c in levels[3] + late:
        ok &= c.mask(env4)
    counters["structurally_valid"] = int(ok.sum())
    _bump(counters, "pruned", "structural", len(c3) - counters["structurally_valid"])

    sel = np.nonzero(ok)[0]
    if spec.float_prefilter:
        fm = _float_multiplicity_mask(k, b1[sel], b2[sel], c2[sel], c3[sel], k2[sel], k3[sel], v[sel])
        _bump(counters, "pruned", "float_multiplicity", int((~fm).sum()))
        sel = sel[fm]
    cands = [IntersectionArray((k, int(b1[i]), int(b2[i])), (1, int(c2[i]), int(c3[i]))) for i in sel]
    survivors: list[IntersectionArray] = []
    _finish(spec, cands, counters, survivors)
    counters["survivors"] = len(survivors)
    return survivors, counters


def _all_c3(k, b2, c2, k2, monotone: bool):
    qi_parts, c3_parts = [], []
    n = k2 * b2
    c3_lo = int(c2.min()) if (monotone and len(c2)) else 1
    idx = np.arange(len(b2))
    for c3 in range(c3_lo, k + 1):
        m = n % c3 == 0
        if monotone:
            m &= c2 <= c3
        hit = idx[m]
        if len(hit):
            qi_parts.append(hit)
            c3_parts.append(np.full(len(hit), c3, dtype=np.int64))
    if not qi_parts:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    qi, c3 = np.concatenate(qi_parts), np.concatenate(c3_parts)
    order = np.lexsort((c3, qi))
    return qi[order], c3[order]


def _solve_c3(target: Expr, k, b1, b2, c2, a1, a2, k2, monotone: bool):
    """c3 values for which theta = target is an eigenvalue.

    With u the standard sequence at theta, the last row of the intersection
    matrix gives c3 (u2 - u3) = (theta - k) u3; scaled numerators avoid division.
    """
    t = eval_q(target, {"k": k, "b1": b1, "b2": b2, "c2": c2, "a1": a1, "a2": a2, "k2": k2})
    p = np.broadcast_to(np.asarray(t.num, dtype=np.int64), b2.shape)
    q = np.broadcast_to(np.asarray(t.den, dtype=np.int64), b2.shape)
    # a rational eigenvalue of a monic integer polynomial is an integer
    integral = p % q == 0
    p, q = p // np.where(integral, q, 1), np.ones_like(q)
    N2 = (p - a1) * p - k
    N3 = (p - a2) * N2 - c2 * p * b1
    num = (p - k) * N3
    den = N2 * b2 - N3
    free = integral & (den == 0) & (num == 0)
    good = integral & (den != 0)
    safe = np.where(good, den, 1)
    c3 = np.where(good, num // safe, 0)
    good &= num % safe == 0
    c3_lo = np.where(monotone, c2, 1)
    good &= (c3 >= c3_lo) & (c3 <= k)
    good &= (k2 * b2) % np.where(good, c3, 1) == 0
    idx = np.arange(len(b2))
    qi, c3v = idx[good], c3[good]
    if free.any():
        fq, fc = _all_c3(k, b2[free], c2[free], k2[free], monotone)
        qi = np.concatenate([qi, idx[free][fq]])
        c3v = np.concatenate([c3v, fc])
    order = np.lexsort((c3v, qi))
    return qi[order], c3v[order].astype(np.int64)


# --- drivers -------------------------------------------------------------------------


def _run(spec: SearchSpec, worker, jobs: int = 1) -> SearchResult:
    t0 = time.perf_counter()
    ks = list(range(max(spec.kmin, 1), spec.kmax + 1))
    if jobs > 1 and len(ks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            # largest valencies first so the slow units start early
            order = sorted(ks, reverse=True)
            parts = dict(zip(order, pool.map(worker, [spec] * len(order), order)))
        outs = [parts[k] for k in ks]
    else:
        outs = [worker(spec, k) for k in ks]
    counters = _empty_counters()
    survivors: list[IntersectionArray] = []
    for surv, cnt in outs:
        survivors.extend(surv)
        _merge(counters, cnt)
    survivors.sort(key=_sort_key)
    counters["pruned"] = dict(sorted(counters["pruned"].items()))
    counters["gate_failures"] = dict(sorted(counters["gate_failures"].items()))
    return SearchResult(spec, survivors, counters, time.perf_counter() - t0)


def enumerate_d3(spec: SearchSpec, jobs: int = 1) -> SearchResult:
    """Pruned search over diameter-three arrays with kmin <= k <= kmax."""
    if spec.D != 3:
        raise DomainError("enumerate_d3 needs D = 3")
    return _run(spec, _search_k, jobs)


# --- unpruned reference loop -------------------------------------------------------


def _recurrence_pnumbers_ok(k, b1, b2, c2, c3) -> np.ndarray:
    """Integrality and nonnegativity of every p^h_ji, from the intersection matrices.

    L1 is the matrix of multiplication by A on the basis A_0..A_3; the
    three-term recurrence gives L2 = N2/c2 and L3 = N3/(c2 c3) with N2, N3
    integral.  Independent of the closed forms used by the pruned search.
    """
    n = len(b1)
    a1, a2, a3 = k - b1 - 1, k - b2 - c2, k - c3
    L1 = np.zeros((n, 4, 4), dtype=np.int64)
    L1[:, 1, 0] = 1
    L1[:, 0, 1], L1[:, 1, 1], L1[:, 2, 1] = k, a1, c2
    L1[:, 1, 2], L1[:, 2, 2], L1[:, 3, 2] = b1, a2, c3
    L1[:, 2, 3], L1[:, 3, 3] = b2, a3
    eye = np.eye(4, dtype=np.int64)
    N2 = L1 @ L1 - a1[:, None, None] * L1 - k * eye
    N3 = L1 @ N2 - (b1 * c2)[:, None, None] * L1 - a2[:, None, None] * N2
    d2 = c2[:, None, None]
    d3 = (c2 * c3)[:, None, None]
    ok = np.all((N2 % d2 == 0) & (N2 >= 0), axis=(1, 2))
    return ok & np.all((N3 % d3 == 0) & (N3 >= 0), axis=(1, 2))


def _unpruned_k(spec: SearchSpec, k: int):
    """Every (b1, b2, c2, c3) in the box with all a_i >= 0, screened by exact integrality only."""
    counters = _empty_counters()
    if k < 2:
        return [], counters
    r = np.arange(1, k + 1, dtype=np.int64)
    b1, c2, c3 = (x.ravel() for x in np.meshgrid(r[: k - 1], r, r, indexing="ij"))
    cons = [Constraint(t) for t in spec.constraints if not Constraint(t).spectral]
    survivors: list[IntersectionArray] = []
    found: list[IntersectionArray] = []
    for b2 in range(1, k):
        counters["generated"] += len(b1)
        m = (b2 + c2 <= k) & ((k * b1) % c2 == 0)
        B1, C2, C3 = b1[m], c2[m], c3[m]
        K2 = k * B1 // C2
        m = (K2 * b2) % C3 == 0
        B1, C2, C3, K2 = B1[m], C2[m], C3[m], K2[m]
        B2 = np.full(len(B1), b2, dtype=np.int64)
        m = _recurrence_pnumbers_ok(k, B1, B2, C2, C3)
        B1, B2, C2, C3, K2 = B1[m], B2[m], C2[m], C3[m], K2[m]
        K3 = K2 * b2 // C3
        V = 1 + k + K2 + K3
        env = {
            "k": k, "D": 3, "b1": B1, "a1": k - B1 - 1, "c2": C2, "k2": K2,
            "b2": B2, "a2": k - B2 - C2, "c3": C3, "a3": k - C3, "k3": K3, "v": V,
        }
        ok = np.ones(len(B1), dtype=bool)
        for c in cons:
            ok &= c.mask(env)
        counters["structurally_valid"] += int(ok.sum())
        if spec.float_prefilter:
            fm = _float_multiplicity_mask(k, B1[ok], B2[ok], C2[ok], C3[ok], K2[ok], K3[ok], V[ok])
            _bump(counters, "pruned", "float_multiplicity", int((~fm).sum()))
            ok[ok] = fm
        for x, y, z in zip(B1[ok], C2[ok], C3[ok]):
            found.append(IntersectionArray((k, int(x), b2), (1, int(y), int(z))))
    _bump(counters, "pruned", "structural", counters["generated"] - counters["structurally_valid"])
    _finish(spec, found, counters, survivors)
    counters["survivors"] = len(survivors)
    return survivors, counters


def enumerate_d3_unpruned(spec: SearchSpec, jobs: int = 1) -> SearchResult:
    """Brute-force counterpart of :func:`enumerate_d3`; slow, for cross-checking."""
    if spec.D != 3:
        raise DomainError("enumerate_d3_unpruned needs D = 3")
    return _run(spec, _unpruned_k, jobs)


# --- small-diameter generic enumeration -------------------------------------------


def _generic_k(spec: SearchSpec, k: int):
    D = spec.D
    monotone = spec.config.lemma_pre
    cons = [Constraint(t) for t in spec.constraints if not Constraint(t).spectral]
    counters = _empty_counters()
    found: list[IntersectionArray] = []
    if k < 2 and D > 1:
        return [], counters
    env: dict = {"k": k, "D": D, "b0": k, "c1": 1, "k1": k, f"a{D}": k - 1}

    def rec(b: list[int], c: list[int], kprev: Fraction, bound: frozenset, pending: list):
        i = len(b)  # choose b_i, then c_{i+1}
        if i == D:
            counters["generated"] += 1
            env["v"] = 1 + sum(env[f"k{j}"] for j in range(1, D + 1))
            if all(cc.names <= env.keys() and cc.holds(env) for cc in pending):
                found.append(IntersectionArray(tuple(b), tuple(c)))
            return
        b_hi = k - c[-1]
        if monotone:
            b_hi = min(b_hi, b[-1] - 1 if i == 1 else b[-1])
        for bi in range(1, b_hi + 1):
            env[f"b{i}"], env[f"a{i}"] = bi, k - bi - c[-1]
            last = i + 1 == D
            c_hi = k if last else k - 1
            for cn in range(c[-1] if monotone else 1, c_hi + 1):
                knext = kprev * bi / cn
                if knext.denominator != 1:
                    continue
                nb, nc = b + [bi], c + [cn]
                if monotone and not _lemma_pre_partial(nb, nc, D):
                    continue
                env[f"c{i + 1}"], env[f"k{i + 1}"] = cn, knext
                names = {f"b{i}", f"a{i}", f"c{i + 1}", f"k{i + 1}"}
                if last:
                    env[f"a{D}"] = k - cn
                    names.add(f"a{D}")
                nbound = bound | names
                still = []
                for cc in pending:
                    if cc.names <= nbound:
                        if not cc.holds(env):
                            break
                    else:
                        still.append(cc)
                else:
                    rec(nb, nc, knext, nbound, still)

    rec([k], [1], Fraction(k), frozenset({"k", "D", "b0", "c1", "k1"} | ({"a1"} if D == 1 else set())), cons)
    counters["structurally_valid"] = len(found)
    survivors: list[IntersectionArray] = []
    _finish(spec, found, counters, survivors)
    counters["survivors"] = len(survivors)
    return survivors, counters


def _lemma_pre_partial(b: list[int], c: list[int], D: int) -> bool:
    """Monotonicity and b_i >= c_j (i + j <= D) on the entries chosen so far."""
    for i in range(1, len(b)):
        if b[i] > b[i - 1] or (i == 1 and b[1] >= b[0]):
            return False
    for j in range(1, len(c)):
        if c[j] < c[j - 1]:
            return False
    for i in range(len(b)):
        for j in range(1, len(c) + 1):
            if i + j <= D and b[i] < c[j - 1]:
                return False
    return True


def enumerate_generic(spec: SearchSpec, jobs: int = 1) -> SearchResult:
    """Plain recursive search for 1 <= D <= 5 (k_i integrality and monotonicity pruning only)."""
    if not 1 <= spec.D <= 5:
        raise DomainError(f"generic enumeration supports 1 <= D <= 5, got {spec.D}")
    return _run(spec, _generic_k, jobs)


def enumerate_arrays(spec: SearchSpec, jobs: int = 1) -> SearchResult:
    return enumerate_d3(spec, jobs) if spec.D == 3 else enumerate_generic(spec, jobs)


# --- the reproduction runs ---------------------------------------------------------

S1_SPEC = SearchSpec(
    name="s1",
    kmin=3,
    kmax=95,
    constraints=("b1 == 2*c2", "b2 == 1", "c3 == k", "6*c2 > k", "a1 >= k/2 - 1", "c2 >= 2"),
)
S2_SPEC = SearchSpec(
    name="s2",
    kmin=3,
    kmax=945,
    constraints=("a1 >= k/2 - 1", "6*c2 > k", "a3 != 0", "c2 >= 2"),
)
S3_SPEC = SearchSpec(
    name="s3",
    kmin=5,
    kmax=80,
    constraints=(
        "k2 <= 3*k/2",
        "a1 > 0",
        "a1 < k/2 - 1",
        "3*c2 > k",
        "2*c2 <= k",
        "3*b2 < k",
        "a1 >= k/4 - 1",
        "4*a3 >= k",
        "v <= 7*k/2",
        "m1 >= k/2",
    ),
)
S4_SPEC = SearchSpec(
    name="s4",
    kmin=3,
    kmax=1127,
    constraints=(
        "k2 <= 3*k/2",
        "a1 > 0",
        "a1 < k/2 - 1",
        "3*c2 > k",
        "2*c2 <= k",
        "theta1 == b1/2 - 1",
        "m1 < k/2",
    ),
    eigenvalue_target="b1/2 - 1",
)

EXPECTED = {
    "s1": [],
    "s2": ["12,6,2;1,4,9", "21,10,3;1,6,15"],
    "s3": [],
    "s4": [],
}


def reproduce_s1(kmax: int | None = None, jobs: int = 1) -> SearchResult:
    return enumerate_d3(S1_SPEC.with_range(kmax=kmax), jobs)


def reproduce_s2(kmax: int | None = None, jobs: int = 1) -> SearchResult:
    return enumerate_d3(S2_SPEC.with_range(kmax=kmax), jobs)


def reproduce_s3(kmax: int | None = None, jobs: int = 1) -> SearchResult:
    return enumerate_d3(S3_SPEC.with_range(kmax=kmax), jobs)


def reproduce_s4(kmax: int | None = None, jobs: int = 1) -> SearchResult:
    return enumerate_d3(S4_SPEC.with_range(kmax=kmax), jobs)


@dataclass
class Theorem6Result:
    epsilon: Fraction
    kappa: Fraction
    k_range: tuple[int, int]
    vacuous: bool
    survivors: list[IntersectionArray]
    violations: list[IntersectionArray]
    counters: dict
    # outside the theorem's hypothesis k >= kappa; informative only
    below_kappa: list[IntersectionArray] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "epsilon": str(self.epsilon),
            "kappa": str(self.kappa),
            "k_range": list(self.k_range),
            "vacuous": self.vacuous,
            "survivors": [str(a) for a in self.survivors],
            "violations": [str(a) for a in self.violations],
            "below_kappa": [str(a) for a in self.below_kappa],
            "counters": self.counters,
        }


def theorem6_exception(arr: IntersectionArray) -> bool:
    """True if arr is one of the allowed outcomes: D = 3 and bipartite or Taylor."""
    return arr.D == 3 and (is_bipartite_array(arr) or is_taylor(arr))


def verify_theorem6(eps, kmax: int, kmin: int | None = None, jobs: int = 1) -> Theorem6Result:
    """Feasible arrays with 3 <= D <= 5, k in [max(3, kappa), kmax] and k2 <= (2 - eps)k.

    ``kmin`` overrides the lower end of the valency range.  Survivors below
    kappa(eps) that are not bipartite or Taylor fall outside the theorem and
    are listed under ``below_kappa`` rather than as violations.
    """
    eps = Fraction(eps)
    kap = kappa(eps)
    lo = max(3, math.ceil(kap)) if kmin is None else max(3, kmin)
    counters = _empty_counters()
    survivors: list[IntersectionArray] = []
    bound = f"k2 <= ({(2 - eps).numerator}*k)/{(2 - eps).denominator}"
    # k2 <= (2 - eps)k <= 0 is impossible once eps >= 2
    vacuous = lo > kmax or eps >= 2
    if not vacuous:
        for D in (3, 4, 5):
            spec = SearchSpec(name="theorem6", D=D, kmin=lo, kmax=kmax, constraints=(bound,))
            res = enumerate_arrays(spec, jobs)
            survivors.extend(res.survivors)
            _merge(counters, res.counters)
    survivors.sort(key=_sort_key)
    others = [a for a in survivors if not theorem6_exception(a)]
    violations = [a for a in others if a.k >= kap]
    below = [a for a in others if a.k < kap]
    return Theorem6Result(eps, kap, (lo, kmax), vacuous, survivors, violations, counters, below)


@dataclass
class ConjectureAResult:
    kmax: int
    checked: list[IntersectionArray]
    violations: list[tuple[IntersectionArray, str]]

    def to_json(self) -> dict:
        return {
            "kmax": self.kmax,
            "checked": [str(a) for a in self.checked],
            "violations": [{"array": str(a), "witness": w} for a, w in self.violations],
        }


def verify_conjecture_a(kmax: int, jobs: int = 1) -> ConjectureAResult:
    if kmax < 3:
        raise DomainError("kmax must be at least 3")
    res = enumerate_d3(SearchSpec(name="conjecture-a", kmin=2, kmax=kmax), jobs)
    bad = []
    for arr in res.survivors:
        r = conjecture_a_check(arr)
        if not r.holds:
            bad.append((arr, r.witness))
    return ConjectureAResult(kmax, res.survivors, bad)
