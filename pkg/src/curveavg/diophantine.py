"""Exact counting of the Diophantine systems attached to a curve.

Three families of counters live here:

* generic counters for the homogeneous system (equal sums of curve
  points) and its inhomogeneous version with a nonzero target, by brute
  enumeration or by hashing half-sums (meet in the middle);
* a maximizer over nonzero targets, organised as a pairwise-difference
  reduction grouped by the first coordinate so that desk-scale instances
  (k = 3, N = 64 on the moment curve, ~1e9 pairs) stay in memory;
* divisor-factorization counters that execute the factorised form of the
  one-, two- and three-equation systems exactly, cell by cell, with
  every candidate verified against the original equations.

All counts are exact integers; hash keys are full tuples of
arbitrary-precision integers, never reduced residues.
"""
from __future__ import annotations

import dataclasses
import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

from .curves import Curve, Point, curve_to_text
from .polynomials import ALL_INTEGERS, IntPoly, divisors, integer_roots, poly_to_text

DEFAULT_TUPLE_BUDGET = 10_000_000
DEFAULT_PAIR_BUDGET = 4_000_000_000
_GROUP_CHUNK = 1 << 25  # max pair entries materialised per reduction batch


class BudgetExceeded(RuntimeError):
    """A counting request exceeded its configured enumeration budget."""


@dataclasses.dataclass
class CountRecord:
    """One exact count with its provenance."""

    curve: str
    mode: str
    s_or_k: int
    N: int
    z: tuple[int, ...] | None
    count: int
    method: str
    elapsed: float = 0.0
    outside_hypothesis: bool = False
    cached: bool = False

    def json_dict(self, include_elapsed: bool = False) -> dict:
        d = {
            "curve": self.curve,
            "mode": self.mode,
            "s_or_k": self.s_or_k,
            "N": self.N,
            "z": list(self.z) if self.z is not None else None,
            "count": str(self.count),
            "method": self.method,
            "outside_hypothesis": self.outside_hypothesis,
            "cached": self.cached,
        }
        if include_elapsed:
            d["elapsed"] = self.elapsed
        return d


@lru_cache(maxsize=None)
def _divisor_list(a: int) -> tuple[int, ...]:
    return tuple(divisors(a))


def signed_divisors(z: int) -> list[int]:
    """All d (both signs) with d | z, ascending by |d| then sign."""
    out = []
    for d in _divisor_list(abs(z)):
        out.append(d)
        out.append(-d)
    return out


def ordered_factorizations(z: int, parts: int) -> list[tuple[int, ...]]:
    """All ordered signed integer tuples with the given product.

    parts is 2 or 3; the enumeration order is deterministic.
    """
    if z == 0:
        raise ValueError("0 admits no finite factorization list")
    if parts == 2:
        return [(d, z // d) for d in signed_divisors(z)]
    if parts == 3:
        out = []
        for d1 in signed_divisors(z):
            rest = z // d1
            for d2 in signed_divisors(rest):
                out.append((d1, d2, rest // d2))
        return out
    raise ValueError("parts must be 2 or 3")


# ----------------------------------------------------------------------
# multivariate helper polynomials (difference quotients)
# ----------------------------------------------------------------------

class MPoly:
    """Sparse multivariate integer polynomial: exponent tuple -> coefficient."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean: dict[tuple[int, ...], int] = {}
        if terms:
            for e, c in dict(terms).items():
                if c:
                    clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def constant(cls, nvars: int, c: int) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def from_unipoly(cls, p: IntPoly, nvars: int, var: int) -> "MPoly":
        acc = cls.constant(nvars, 0)
        v = cls.variable(nvars, var)
        for c in reversed(p.coeffs):
            acc = acc * v + c
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, MPoly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items()))))

    def __add__(self, other):
        if isinstance(other, int):
            other = MPoly.constant(self.nvars, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MPoly(self.nvars, out)

    def __sub__(self, other):
        if isinstance(other, int):
            other = MPoly.constant(self.nvars, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) - c
        return MPoly(self.nvars, out)

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return MPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, 0) + c1 * c2
        return MPoly(self.nvars, out)

    __radd__ = __add__
    __rmul__ = __mul__

    def __call__(self, *point: int) -> int:
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= x ** k
            total += v
        return total

    def substitute(self, assign: dict[int, int]) -> "MPoly":
        """Fix some variables to integers (exponents of fixed vars go to 0)."""
        out: dict[tuple[int, ...], int] = {}
        for e, c in self.terms.items():
            v = c
            e2 = list(e)
            for i, x in assign.items():
                if e[i]:
                    v *= x ** e[i]
                e2[i] = 0
            key = tuple(e2)
            out[key] = out.get(key, 0) + v
        return MPoly(self.nvars, out)

    def to_unipoly(self, var: int) -> IntPoly:
        coeffs: dict[int, int] = {}
        for e, c in self.terms.items():
            if any(k and i != var for i, k in enumerate(e)):
                raise ValueError("polynomial is not univariate in the requested variable")
            coeffs[e[var]] = coeffs.get(e[var], 0) + c
        out = [0] * (max(coeffs, default=0) + 1)
        for k, c in coeffs.items():
            out[k] = c
        return IntPoly(out)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def abs_bound_on_box(self, hi: int) -> int:
        """Upper bound for |value| when every variable lies in [-hi, hi]."""
        return sum(abs(c) * hi ** sum(e) for e, c in self.terms.items())


def _divide_linear_difference(g: MPoly, a: int, b: int) -> MPoly:
    """Exact quotient h with g = (V_a - V_b) * h; raises on a remainder."""
    nv = g.nvars
    by_deg: dict[int, dict[tuple[int, ...], int]] = {}
    for e, c in g.terms.items():
        k = e[a]
        e0 = e[:a] + (0,) + e[a + 1:]
        by_deg.setdefault(k, {})[e0] = by_deg.setdefault(k, {}).get(e0, 0) + c
    if not by_deg:
        return MPoly(nv)
    dmax = max(by_deg)
    coeffs = [MPoly(nv, by_deg.get(k, {})) for k in range(dmax + 1)]
    vb = MPoly.variable(nv, b)
    quot: list[MPoly] = [MPoly(nv)] * dmax
    h = coeffs[dmax]
    for k in range(dmax - 1, -1, -1):
        quot[k] = h
        h = coeffs[k] + vb * h
    if h.terms:
        raise ArithmeticError("nonzero remainder dividing by a linear difference")
    out: dict[tuple[int, ...], int] = {}
    for k, hk in enumerate(quot):
        for e, c in hk.terms.items():
            e2 = list(e)
            e2[a] += k
            key = tuple(e2)
            out[key] = out.get(key, 0) + c
    return MPoly(nv, out)


@dataclasses.dataclass(frozen=True)
class DifferenceQuotient:
    """The certified quotients behind the factorization counters.

    q2(X, Y) satisfies P(X) - P(Y) = q2 (X - Y); q3(X, Y, Z) satisfies
    P(X) - P(Y) + P(Z) - P(X - Y + Z) = q3 (X - Y)(Y - Z).
    """

    source: IntPoly
    q2: MPoly
    q3: MPoly

    def q2_at(self, x: int, y: int) -> int:
        return self.q2(x, y)

    def q3_at(self, x: int, y: int, z: int) -> int:
        return self.q3(x, y, z)


_DQ_CACHE: dict[tuple[int, ...], DifferenceQuotient] = {}


def difference_quotient(p: IntPoly) -> DifferenceQuotient:
    """Build and certify both quotients of p (requires deg p >= 2)."""
    if p.degree < 2:
        raise ValueError("difference quotients need deg P >= 2")
    cached = _DQ_CACHE.get(p.coeffs)
    if cached is not None:
        return cached
    px2 = MPoly.from_unipoly(p, 2, 0)
    py2 = MPoly.from_unipoly(p, 2, 1)
    q2 = _divide_linear_difference(px2 - py2, 0, 1)

    px = MPoly.from_unipoly(p, 3, 0)
    py = MPoly.from_unipoly(p, 3, 1)
    pz = MPoly.from_unipoly(p, 3, 2)
    w = MPoly.variable(3, 0) - MPoly.variable(3, 1) + MPoly.variable(3, 2)
    pw = MPoly.constant(3, 0)
    for c in reversed(p.coeffs):
        pw = pw * w + c
    g = px - py + pz - pw
    q3 = _divide_linear_difference(_divide_linear_difference(g, 0, 1), 1, 2)

    grid = range(-(p.degree + 2), p.degree + 3)
    for x, y in itertools.product(grid, repeat=2):
        if p(x) - p(y) != q2(x, y) * (x - y):
            raise ArithmeticError("q2 identity failed on the certification grid")
    for x, y, z in itertools.product(grid, repeat=3):
        if p(x) - p(y) + p(z) - p(x - y + z) != q3(x, y, z) * (x - y) * (y - z):
            raise ArithmeticError("q3 identity failed on the certification grid")
    for n in grid:
        if q2.substitute({0: n}).to_unipoly(1).is_constant():
            raise ArithmeticError(f"q2({n}, Y) is constant")

    dq = DifferenceQuotient(p, q2, q3)
    _DQ_CACHE[p.coeffs] = dq
    return dq


# ----------------------------------------------------------------------
# generic counters
# ----------------------------------------------------------------------

def _tuple_add(a: Point, b: Point) -> Point:
    return tuple(x + y for x, y in zip(a, b))


def _tuple_sub(a: Point, b: Point) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def _ordered_sums(gs: list[Point], k: int, firsts=None):
    """Yield the sum of gamma values over every ordered k-tuple."""
    outer = firsts if firsts is not None else gs
    if k == 1:
        yield from outer
        return
    for g0 in outer:
        for rest in _ordered_sums(gs, k - 1):
            yield _tuple_add(g0, rest)


def half_sum_counts(c: Curve, k: int, N: int, threads: int = 1) -> dict[Point, int]:
    """Multiset of sums of k curve points, as value -> multiplicity."""
    gs = [c(n) for n in range(1, N + 1)]

    def chunk_counts(sub: list[Point]) -> dict[Point, int]:
        out: dict[Point, int] = {}
        for v in _ordered_sums(gs, k, firsts=sub):
            out[v] = out.get(v, 0) + 1
        return out

    if threads <= 1 or len(gs) < 2:
        return chunk_counts(gs)
    parts = [gs[i::threads] for i in range(threads)]
    merged: dict[Point, int] = {}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for sub in pool.map(chunk_counts, parts):
            for v, cnt in sub.items():
                merged[v] = merged.get(v, 0) + cnt
    return merged


def _weighted_half_sums(c: Curve, k: int, N: int) -> dict[Point, int]:
    """Same multiset as half_sum_counts, built from sorted combinations."""
    gs = [c(n) for n in range(1, N + 1)]
    kfact = math.factorial(k)
    out: dict[Point, int] = {}
    for combo in itertools.combinations_with_replacement(range(N), k):
        weight = kfact
        for _, grp in itertools.groupby(combo):
            weight //= math.factorial(sum(1 for _ in grp))
        total = gs[combo[0]]
        for idx in combo[1:]:
            total = _tuple_add(total, gs[idx])
        out[total] = out.get(total, 0) + weight
    return out


def count_homogeneous(c: Curve, s: int, N: int, method: str = "mitm",
                      budget: int = DEFAULT_TUPLE_BUDGET,
                      threads: int = 1) -> CountRecord:
    """Exact number of solutions of equal k-fold sums in [1,N]^{2s}."""
    c.require_separated()
    if s < 1 or N < 1:
        raise ValueError("s and N must be >= 1")
    t0 = time.perf_counter()
    if method == "brute":
        if N ** (2 * s) > budget:
            raise BudgetExceeded(f"brute needs N^(2s) = {N ** (2 * s)} > budget {budget}")
        gs = [c(n) for n in range(1, N + 1)]
        sums = list(_ordered_sums(gs, s))

        def chunk(vals: list[Point]) -> int:
            return sum(1 for a in vals for b in sums if a == b)

        if threads <= 1:
            count = chunk(sums)
        else:
            parts = [sums[i::threads] for i in range(threads)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                count = sum(pool.map(chunk, parts))
    elif method == "mitm":
        if N ** s > budget:
            raise BudgetExceeded(f"mitm needs N^s = {N ** s} > budget {budget}")
        table = half_sum_counts(c, s, N, threads)
        count = sum(v * v for v in table.values())
    else:
        raise ValueError(f"unknown method {method!r}")
    return CountRecord(curve_to_text(c), "homogeneous", s, N, None, count,
                       method, time.perf_counter() - t0)


def count_inhomogeneous(c: Curve, k: int, N: int, z: Point, method: str = "mitm",
                        budget: int = DEFAULT_TUPLE_BUDGET,
                        threads: int = 1) -> CountRecord:
    """Exact number of tuples with sum difference equal to the target z."""
    c.require_separated()
    if k < 1 or N < 1:
        raise ValueError("k and N must be >= 1")
    z = tuple(int(v) for v in z)
    if len(z) != c.dimension:
        raise ValueError(f"target dimension {len(z)} != curve dimension {c.dimension}")
    t0 = time.perf_counter()
    if method == "brute":
        if N ** (2 * k) > budget:
            raise BudgetExceeded(f"brute needs N^(2k) = {N ** (2 * k)} > budget {budget}")
        gs = [c(n) for n in range(1, N + 1)]
        sums = list(_ordered_sums(gs, k))
        count = sum(1 for a in sums for b in sums if _tuple_sub(a, b) == z)
    elif method == "mitm":
        if N ** k > budget:
            raise BudgetExceeded(f"mitm needs N^k = {N ** k} > budget {budget}")
        table = half_sum_counts(c, k, N, threads)
        count = 0
        for w, r in table.items():
            r2 = table.get(_tuple_add(w, z))
            if r2:
                count += r * r2
    else:
        raise ValueError(f"unknown method {method!r}")
    return CountRecord(curve_to_text(c), "inhomogeneous", k, N, z, count,
                       method, time.perf_counter() - t0)


# ----------------------------------------------------------------------
# maximum over nonzero targets
# ----------------------------------------------------------------------

def _canonical_sign(z: Point) -> Point:
    for v in z:
        if v > 0:
            return z
        if v < 0:
            return tuple(-x for x in z)
    return z


def _max_inhom_dict(sums: dict[Point, int], pair_budget: int) -> tuple[Point, int]:
    items = sorted(sums.items())
    T = len(items)
    if T * (T - 1) // 2 > pair_budget:
        raise BudgetExceeded("pairwise reduction exceeds the pair budget")
    acc: dict[Point, int] = {}
    for i in range(T):
        pi, ri = items[i]
        for j in range(i + 1, T):
            pj, rj = items[j]
            zz = _canonical_sign(_tuple_sub(pi, pj))
            acc[zz] = acc.get(zz, 0) + ri * rj
    if not acc:
        raise ValueError("no nonzero target is attained")
    best = max(acc.values())
    witness = min(z for z, cnt in acc.items() if cnt == best)
    return witness, best


def _max_inhom_grouped(sums: dict[Point, int], pair_budget: int) -> tuple[Point, int]:
    """Exact max multiplicity over nonzero differences of the half-sum multiset.

    Pairs are grouped by the difference of first coordinates; within a
    group the remaining coordinates are packed into one integer code, and
    a sort/segmented-sum finds the heaviest difference.  This keeps the
    k = 3, N = 64 moment-curve case (~1e9 pairs) to a few hundred MB.
    """
    keys = sorted(sums)
    T = len(keys)
    d = len(keys[0])
    if T * (T - 1) // 2 > pair_budget:
        raise BudgetExceeded("pairwise reduction exceeds the pair budget")

    spans = []
    for i in range(1, d):
        vals = [p[i] for p in keys]
        spans.append(max(vals) - min(vals))
    radices = [2 * s + 1 for s in spans]

    def encode(p: Point) -> int:
        code = 0
        for i in range(1, d):
            code = code * radices[i - 1] + p[i]
        return code

    wmax = max(sums.values())
    wbits = (wmax * wmax).bit_length()
    span_code = 1
    for r in radices:
        span_code *= r
    if span_code << wbits >= 1 << 62:
        return _max_inhom_dict(sums, min(pair_budget, 4_000_000))

    q = np.array([encode(p) for p in keys], dtype=np.int64)
    r = np.array([sums[p] for p in keys], dtype=np.int64)
    firsts = [p[0] for p in keys]

    slices: dict[int, slice] = {}
    start = 0
    for val, grp in itertools.groupby(firsts):
        n = sum(1 for _ in grp)
        slices[val] = slice(start, start + n)
        start += n
    class_vals = sorted(slices)

    deltas = sorted({a - b for a in class_vals for b in class_vals if a >= b})
    wmask = (1 << wbits) - 1

    def reduce_packed(parts: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        allp = np.concatenate(parts)
        allp.sort()
        codes = allp >> wbits
        starts = np.concatenate(([0], np.flatnonzero(codes[1:] != codes[:-1]) + 1))
        wsum = np.add.reduceat(allp & wmask, starts)
        return codes[starts], wsum

    best_count = -1
    best_delta = 0
    best_code = 0
    for delta in deltas:
        if d == 1 and delta == 0:
            continue
        parts: list[np.ndarray] = []
        reduced: list[tuple[np.ndarray, np.ndarray]] = []
        pending = 0
        for ca in class_vals:
            cb = ca - delta
            sb = slices.get(cb)
            if sb is None:
                continue
            sa = slices[ca]
            if delta == 0:
                m = sa.stop - sa.start
                if m < 2:
                    continue
                iu, ju = np.triu_indices(m, k=1)
                dq = np.abs(q[sa][iu] - q[sa][ju])
                w = r[sa][iu] * r[sa][ju]
            else:
                dq = (q[sa][:, None] - q[sb][None, :]).ravel()
                w = (r[sa][:, None] * r[sb][None, :]).ravel()
            parts.append((dq << wbits) | w)
            pending += parts[-1].size
            if pending >= _GROUP_CHUNK:
                reduced.append(reduce_packed(parts))
                parts, pending = [], 0
        if parts:
            reduced.append(reduce_packed(parts))
        if not reduced:
            continue
        if len(reduced) == 1:
            codes, wsum = reduced[0]
        else:
            merged = [np.concatenate([c for c, _ in reduced]),
                      np.concatenate([w for _, w in reduced])]
            order = np.argsort(merged[0], kind="stable")
            codes0 = merged[0][order]
            w0 = merged[1][order]
            starts = np.concatenate(([0], np.flatnonzero(codes0[1:] != codes0[:-1]) + 1))
            codes = codes0[starts]
            wsum = np.add.reduceat(w0, starts)
        i = int(np.argmax(wsum))
        cnt = int(wsum[i])
        if cnt > best_count:
            best_count = cnt
            best_delta = delta
            best_code = int(codes[i])

    if best_count < 0:
        raise ValueError("no nonzero target is attained")

    rest: list[int] = []
    rem = best_code
    for radix in reversed(radices):
        half = (radix - 1) // 2
        zi = ((rem + half) % radix) - half
        rest.append(zi)
        rem = (rem - zi) // radix
    z = (best_delta, *reversed(rest))
    return _canonical_sign(z), best_count


def max_inhomogeneous(c: Curve, k: int, N: int,
                      budget: int = DEFAULT_TUPLE_BUDGET,
                      pair_budget: int = DEFAULT_PAIR_BUDGET,
                      threads: int = 1) -> tuple[Point, int]:
    """Maximize the inhomogeneous count over all nonzero attained targets.

    Returns (z*, count); counts are exact and the scan order makes the
    witness deterministic.  The count is symmetric under z -> -z, so the
    witness is reported with its first nonzero coordinate positive.
    """
    c.require_separated()
    if k < 1 or N < 1:
        raise ValueError("k and N must be >= 1")
    if N ** k > budget:
        raise BudgetExceeded(f"needs N^k = {N ** k} > budget {budget}")
    sums = _weighted_half_sums(c, k, N)
    if len(sums) < 2:
        raise ValueError("no nonzero target is attained")
    if len(sums) * (len(sums) - 1) // 2 <= 500_000:
        return _max_inhom_dict(sums, pair_budget)
    return _max_inhom_grouped(sums, pair_budget)


def max_inhomogeneous_record(c: Curve, k: int, N: int, **kw) -> CountRecord:
    t0 = time.perf_counter()
    z, count = max_inhomogeneous(c, k, N, **kw)
    return CountRecord(curve_to_text(c), "max-inhomogeneous", k, N, z, count,
                       "mitm", time.perf_counter() - t0)


# ----------------------------------------------------------------------
# factorization counters (one, two and three equations)
# ----------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class FactorCell:
    """One (u, t) cell of the three-equation counter."""

    u: int
    t: int
    M: int
    factorization: tuple[int, ...]


def lemma3_cell_value(u: int, t: int, z1: int, z2: int, z3: int) -> int:
    """M = 3t[u^2 - z2 - (u-z1)^2] + 2(z3 + (u-z1)^3 - u^3)."""
    return 3 * t * (u * u - z2 - (u - z1) ** 2) + 2 * (z3 + (u - z1) ** 3 - u ** 3)


def count_lemma1(P: IntPoly, z: int, N: int, slack: int = 4) -> CountRecord:
    """Count P(n) - P(m) = z on [1,N]^2 through signed factorizations of z.

    For each d2 | z the substitution m = n - d2 turns the equation into
    Q(n, n - d2) = z/d2 with Q the first difference quotient, a
    non-constant univariate polynomial whose integer roots are found by
    divisor trial.  Every root is verified against the original equation.
    """
    if P.degree < 2:
        raise ValueError("deg P >= 2 required")
    if z == 0:
        raise ValueError("the target must be nonzero")
    if N < 1:
        raise ValueError("N must be >= 1")
    t0 = time.perf_counter()
    count = 0
    for d2 in signed_divisors(z):
        lo, hi = max(1, 1 + d2), min(N, N + d2)
        if lo > hi:
            continue
        d1 = z // d2
        shifted = P.compose(IntPoly((-d2, 1)))
        g = (P - shifted).scale_divide(d2) - d1
        roots = integer_roots(g, lo, hi)
        if roots == ALL_INTEGERS:
            count += hi - lo + 1
            continue
        for n in roots:
            if P(n) - P(n - d2) == z:
                count += 1
    rec = CountRecord(poly_to_text(P), "lemma1", 1, N, (z,), count, "lemma1",
                      time.perf_counter() - t0)
    rec.outside_hypothesis = abs(z) > slack * N ** P.degree
    return rec


def count_lemma2(P: IntPoly, z1: int, z2: int, N: int, slack: int = 4) -> CountRecord:
    """Count the linear+polynomial pair of equations in four variables.

    Enumerates w = n1 - m1 + n2 (so m2 = w - z1 is forced), reduces to
    q3(n1, m1, n2) (n1 - m1)(m1 - n2) = R(w), and splits on R(w): nonzero
    values are factored through the divisor bound, zero values are
    handled by the three vanishing branches.  Candidates are always
    verified against the original system before being counted.
    """
    if P.degree < 2:
        raise ValueError("deg P >= 2 required")
    if z1 == 0 and z2 == 0:
        raise ValueError("the target must be nonzero")
    if N < 1:
        raise ValueError("N must be >= 1")
    t0 = time.perf_counter()
    dq = difference_quotient(P)
    q3 = dq.q3
    q3_terms = tuple((c, e[0], e[1], e[2]) for e, c in sorted(q3.terms.items()))
    qmax = q3.abs_bound_on_box(N)

    def q3_at(x: int, y: int, zz: int) -> int:
        return sum(c * x ** i * y ** j * zz ** k for c, i, j, k in q3_terms)

    def verified(n1: int, m1: int, n2: int, m2: int) -> bool:
        return (n1 - m1 + n2 - m2 == z1
                and P(n1) - P(m1) + P(n2) - P(m2) == z2)

    total = 0
    for w in range(max(2 - N, z1 + 1), min(2 * N - 1, z1 + N) + 1):
        m2 = w - z1
        R = z2 - (P(w) - P(m2))
        sols: set[tuple[int, int, int, int]] = set()
        if R != 0:
            for d2 in signed_divisors(R):
                if not w - N <= d2 <= w - 1:
                    continue
                n2 = w - d2
                rest = R // d2
                for d3 in signed_divisors(rest):
                    n1 = w + d3
                    if not 1 <= n1 <= N:
                        continue
                    m1 = w - d2 + d3
                    if not 1 <= m1 <= N:
                        continue
                    d1 = rest // d3
                    if abs(d1) > qmax:
                        continue
                    if q3_at(n1, m1, n2) != d1:
                        continue
                    if verified(n1, m1, n2, m2):
                        sols.add((n1, m1, n2, m2))
        else:
            if 1 <= w <= N:
                for a in range(1, N + 1):
                    sols.add((a, a, w, m2))   # n1 = m1
                    sols.add((w, a, a, m2))   # m1 = n2
            for n1 in range(1, N + 1):
                for m1 in range(1, N + 1):
                    n2 = w - n1 + m1
                    if 1 <= n2 <= N and q3_at(n1, m1, n2) == 0:
                        sols.add((n1, m1, n2, m2))
            sols = {s for s in sols if verified(*s)}
        total += len(sols)
    rec = CountRecord(poly_to_text(P), "lemma2", 2, N, (z1, z2), total, "lemma2",
                      time.perf_counter() - t0)
    rec.outside_hypothesis = abs(z1) > slack * N or abs(z2) > slack * N ** P.degree
    return rec


def count_lemma3(z1: int, z2: int, z3: int, N: int, slack: int = 4,
                 cells: list[FactorCell] | None = None) -> CountRecord:
    """Count the three-equation system on the moment curve in [1,N]^6.

    Follows the factorised proof cell by cell: enumerate u = n1 - m1 + n2
    and t = m2 + m3 (then n3 = t - u + z1 is forced), factor the cell
    constant M = 6 d1 d2 d3 when nonzero, then resolve the quadratic step
    2 d4 d5 = 2 d2 d3 + u^2 - z2 - (u - z1)^2 or its vanishing branches.
    M = 0 cells fall back to constrained enumeration over (m1, m2).
    Every candidate is verified against the original three equations.
    """
    if z1 == 0 and z2 == 0 and z3 == 0:
        raise ValueError("the target must be nonzero")
    if N < 1:
        raise ValueError("N must be >= 1")
    t0 = time.perf_counter()

    def verified(n1, m1, n2, m2, m3, n3) -> bool:
        if not all(1 <= v <= N for v in (n1, m1, n2, m2, m3, n3)):
            return False
        return (n1 - m1 + n2 - m2 + n3 - m3 == z1
                and n1 ** 2 - m1 ** 2 + n2 ** 2 - m2 ** 2 + n3 ** 2 - m3 ** 2 == z2
                and n1 ** 3 - m1 ** 3 + n2 ** 3 - m2 ** 3 + n3 ** 3 - m3 ** 3 == z3)

    total = 0
    for u in range(2 - N, 2 * N):
        A = u * u - z2 - (u - z1) ** 2
        B = 2 * (z3 + (u - z1) ** 3 - u ** 3)
        for t in range(2, 2 * N + 1):
            n3 = t - u + z1
            if not 1 <= n3 <= N:
                continue
            M = 3 * t * A + B
            sols: set[tuple[int, ...]] = set()
            witness_fact: tuple[int, ...] = ()
            if M != 0:
                if M % 6 == 0:
                    v = M // 6
                    for d2 in signed_divisors(v):
                        if not u - N <= d2 <= u - 1:
                            continue
                        n2 = u - d2
                        rest = v // d2
                        for d3 in signed_divisors(rest):
                            n1 = u + d3
                            if not 1 <= n1 <= N:
                                continue
                            m1 = u - d2 + d3
                            if not 1 <= m1 <= N:
                                continue
                            d1 = rest // d3
                            if d1 != 2 * u + d3 - d2 - t:
                                continue
                            rhs2 = 2 * d2 * d3 + A
                            if rhs2 != 0:
                                if rhs2 % 2:
                                    continue
                                h = rhs2 // 2
                                for d4 in signed_divisors(h):
                                    d5 = h // d4
                                    m2v, m3v = n3 + d4, n3 - d5
                                    cand = (n1, m1, n2, m2v, m3v, n3)
                                    if m2v + m3v == t and verified(*cand):
                                        sols.add(cand)
                                        if not witness_fact:
                                            witness_fact = (d1, d2, d3, d4, d5)
                            else:
                                for m2v, m3v in ((n3, t - n3), (t - n3, n3)):
                                    cand = (n1, m1, n2, m2v, m3v, n3)
                                    if verified(*cand):
                                        sols.add(cand)
                                        if not witness_fact:
                                            witness_fact = (d1, d2, d3)
            else:
                for m1 in range(1, N + 1):
                    s1 = u + m1  # n1 + n2
                    for m2v in range(1, N + 1):
                        m3v = t - m2v
                        if not 1 <= m3v <= N:
                            continue
                        s2 = z2 + m2v ** 2 - n3 ** 2 + m3v ** 2 + m1 ** 2
                        disc = 2 * s2 - s1 * s1  # (n1 - n2)^2
                        if disc < 0:
                            continue
                        root = math.isqrt(disc)
                        if root * root != disc:
                            continue
                        for diff in {root, -root}:
                            if (s1 + diff) % 2:
                                continue
                            n1 = (s1 + diff) // 2
                            n2 = s1 - n1
                            cand = (n1, m1, n2, m2v, m3v, n3)
                            if verified(*cand):
                                sols.add(cand)
            total += len(sols)
            if cells is not None:
                cells.append(FactorCell(u, t, M, witness_fact))
    rec = CountRecord("n,n^2,n^3", "lemma3", 3, N, (z1, z2, z3), total, "lemma3",
                      time.perf_counter() - t0)
    rec.outside_hypothesis = (abs(z1) > slack * N or abs(z2) > slack * N ** 2
                              or abs(z3) > slack * N ** 3)
    return rec
