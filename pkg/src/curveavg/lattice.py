"""Finite subsets of Z^d, finitely supported rational functions, and the
averaging operators along a curve together with their adjoints.

Conventions follow the forward-average definition: the average at x sums
f(x - gamma(n)), the adjoint sums f(y + gamma(n)).  Function values are
exact rationals; only norms with non-integer exponent go through floats.
"""
from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

from .curves import AffineTransform, Curve, Point
from .polynomials import IntPoly


class DimensionError(ValueError):
    pass


def _check_dim(d1: int, d2: int) -> None:
    if d1 != d2:
        raise DimensionError(f"dimension mismatch: {d1} vs {d2}")


def _add(x: Point, y: Point) -> Point:
    return tuple(a + b for a, b in zip(x, y))


def _sub(x: Point, y: Point) -> Point:
    return tuple(a - b for a, b in zip(x, y))


@dataclasses.dataclass(frozen=True, init=False)
class SparseSet:
    """A finite subset of Z^d with exact cardinality."""

    points: frozenset[Point]
    dimension: int

    def __init__(self, points, dimension: int | None = None):
        pts = frozenset(tuple(p) for p in points)
        if pts:
            dims = {len(p) for p in pts}
            if len(dims) != 1:
                raise DimensionError(f"mixed point dimensions {sorted(dims)}")
            d = dims.pop()
            if dimension is not None and dimension != d:
                raise DimensionError(f"declared dimension {dimension} != {d}")
        else:
            if dimension is None:
                raise DimensionError("empty set needs an explicit dimension")
            d = dimension
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dimension", d)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p: Point) -> bool:
        return p in self.points

    def __iter__(self):
        return iter(self.points)

    def sorted_points(self) -> list[Point]:
        return sorted(self.points)

    def indicator(self) -> "SparseFunction":
        return SparseFunction({p: Fraction(1) for p in self.points}, self.dimension)

    def translate(self, v: Point) -> "SparseSet":
        return SparseSet((_add(p, v) for p in self.points), self.dimension)


@dataclasses.dataclass(frozen=True, init=False)
class SparseFunction:
    """Finitely supported map Z^d -> Q; zero entries are never stored."""

    values: tuple[tuple[Point, Fraction], ...]
    dimension: int

    def __init__(self, values, dimension: int | None = None):
        items = dict(values)
        clean = {tuple(p): Fraction(v) for p, v in items.items() if v != 0}
        if clean:
            dims = {len(p) for p in clean}
            if len(dims) != 1:
                raise DimensionError(f"mixed point dimensions {sorted(dims)}")
            d = dims.pop()
            if dimension is not None and dimension != d:
                raise DimensionError(f"declared dimension {dimension} != {d}")
        else:
            if dimension is None:
                raise DimensionError("zero function needs an explicit dimension")
            d = dimension
        object.__setattr__(self, "values", tuple(sorted(clean.items())))
        object.__setattr__(self, "dimension", d)
        object.__setattr__(self, "_map", clean)

    def as_dict(self) -> dict[Point, Fraction]:
        return dict(self._map)

    def __getitem__(self, p: Point) -> Fraction:
        return self._map.get(p, Fraction(0))

    def support(self) -> frozenset[Point]:
        return frozenset(p for p, _ in self.values)

    def __len__(self) -> int:
        return len(self.values)

    def mass(self) -> Fraction:
        return sum((v for _, v in self.values), Fraction(0))

    def scale(self, k) -> "SparseFunction":
        kk = Fraction(k)
        return SparseFunction({p: v * kk for p, v in self.values}, self.dimension)

    def __add__(self, other: "SparseFunction") -> "SparseFunction":
        _check_dim(self.dimension, other.dimension)
        out = dict(self.values)
        for p, v in other.values:
            out[p] = out.get(p, Fraction(0)) + v
        return SparseFunction(out, self.dimension)

    def compose_transform(self, t: AffineTransform) -> "SparseFunction":
        """f o T for an invertible lattice map T: (f o T)(y) = f(T y)."""
        tinv = t.inverse()
        return SparseFunction(
            {tinv.apply_point(p): v for p, v in self.values}, self.dimension
        )

    def residue_slices(self, a: int) -> list["SparseFunction"]:
        """Split along coordinate 1 by residue mod |a|: g_r(s, y) = f(a s + r, y)."""
        if a == 0:
            raise ValueError("dilation factor must be nonzero")
        out: list[dict[Point, Fraction]] = [dict() for _ in range(abs(a))]
        for p, v in self.values:
            r = p[0] % abs(a)
            s = (p[0] - r) // a
            out[r][(s,) + p[1:]] = v
        return [SparseFunction(d, self.dimension) for d in out]


def zero_function(d: int) -> SparseFunction:
    return SparseFunction({}, d)


def gamma_points(c: Curve, N: int) -> list[Point]:
    """gamma(1), ..., gamma(N)."""
    return [c(n) for n in range(1, N + 1)]


# -- operators --------------------------------------------------------

def average(c: Curve, N: int, f: SparseFunction) -> SparseFunction:
    """A_N f(x) = (1/N) sum_{n<=N} f(x - gamma(n)), exactly."""
    return _translate_sum(c, N, f, Fraction(1, N), forward=True)


def average_unnormalized(c: Curve, N: int, f: SparseFunction) -> SparseFunction:
    """The un-normalised average: N times average()."""
    return _translate_sum(c, N, f, Fraction(1), forward=True)


def adjoint_unnormalized(c: Curve, N: int, f: SparseFunction) -> SparseFunction:
    """Adjoint of the un-normalised average: sums f(y + gamma(n))."""
    return _translate_sum(c, N, f, Fraction(1), forward=False)


def _translate_sum(c: Curve, N: int, f: SparseFunction, weight: Fraction,
                   forward: bool) -> SparseFunction:
    if N < 1:
        raise ValueError("N must be >= 1")
    c.require_separated()
    _check_dim(c.dimension, f.dimension)
    out: dict[Point, Fraction] = {}
    for g in gamma_points(c, N):
        for p, v in f.values:
            q = _add(p, g) if forward else _sub(p, g)
            out[q] = out.get(q, Fraction(0)) + v * weight
    return SparseFunction(out, f.dimension)


@dataclasses.dataclass(frozen=True)
class RestrictedSequence:
    """The value set of a non-constant polynomial with positive leading term."""

    generator: IntPoly

    def __post_init__(self):
        if self.generator.is_constant():
            raise ValueError("generator must be non-constant")
        if self.generator.leading <= 0:
            raise ValueError("generator needs a positive leading coefficient")

    def values_upto(self, N: int) -> list[int]:
        """Sorted, deduplicated values of the generator inside [1, N]."""
        bound = 1 + N + sum(abs(cc) for cc in self.generator.coeffs)
        hits = {
            v for n in range(-bound, bound + 1)
            if 1 <= (v := self.generator(n)) <= N
        }
        return sorted(hits)


def restricted_average(c: Curve, seq: RestrictedSequence, N: int,
                       f: SparseFunction) -> SparseFunction:
    """(1/|X_N|) sum over m in X_N of f(x - gamma(m))."""
    c.require_separated()
    _check_dim(c.dimension, f.dimension)
    values = seq.values_upto(N)
    if not values:
        raise ValueError("restricted sequence has no values in [1, N]")
    w = Fraction(1, len(values))
    out: dict[Point, Fraction] = {}
    for m in values:
        g = c(m)
        for p, v in f.values:
            q = _add(p, g)
            out[q] = out.get(q, Fraction(0)) + v * w
    return SparseFunction(out, f.dimension)


def pairing(f: SparseFunction, g: SparseFunction) -> Fraction:
    """<f, g> = sum over the common support, exact."""
    _check_dim(f.dimension, g.dimension)
    small, large = (f, g) if len(f) <= len(g) else (g, f)
    ld = large._map
    total = Fraction(0)
    for p, v in small.values:
        w = ld.get(p)
        if w is not None:
            total += v * w
    return total


def power_sum(f: SparseFunction, q: int) -> Fraction:
    """sum |f|^q for integer q >= 1, exact."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return sum((abs(v) ** q for _, v in f.values), Fraction(0))


def lq_norm(f: SparseFunction, q) -> float:
    """(sum |f|^q)^(1/q); q = math.inf gives the max norm.

    Exact rational power sums feed the root for integer q; fractional q
    goes through floats (relative accuracy well under 1e-12 at desk
    scale).
    """
    if q == math.inf:
        return max((abs(float(v)) for _, v in f.values), default=0.0)
    qf = Fraction(q)
    if qf < 1:
        raise ValueError("q must be >= 1 (or inf)")
    if qf.denominator == 1:
        s = power_sum(f, int(qf))
        return float(s) ** (1.0 / int(qf))
    s = sum(abs(float(v)) ** float(qf) for _, v in f.values)
    return s ** (1.0 / float(qf))


def correlation_count(E: SparseSet, F: SparseSet, c: Curve, N: int) -> int:
    """#{(x, n) in F x [1,N] : x - gamma(n) in E} = <unnorm avg 1_E, 1_F>."""
    c.require_separated()
    _check_dim(E.dimension, c.dimension)
    _check_dim(F.dimension, c.dimension)
    gs = gamma_points(c, N)
    pts = E.points
    return sum(1 for x in F.points for g in gs if _sub(x, g) in pts)


def alpha_beta(E: SparseSet, F: SparseSet, c: Curve, N: int) -> tuple[Fraction, Fraction]:
    """alpha = <unnorm avg 1_E, 1_F>/|F| and beta = <adjoint 1_F, 1_E>/|E|.

    Both are computed from the single exact pair count, so the identity
    alpha |F| = beta |E| holds by construction.
    """
    if not len(E) or not len(F):
        raise ValueError("E and F must be nonempty")
    cnt = correlation_count(E, F, c, N)
    return Fraction(cnt, len(F)), Fraction(cnt, len(E))


# -- file formats ------------------------------------------------------

def parse_point(line: str) -> Point:
    return tuple(int(tok) for tok in line.split())


def read_set(lines, dimension: int | None = None) -> SparseSet:
    """One point per line, d integers separated by whitespace, '#' comments."""
    pts = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if line:
            pts.append(parse_point(line))
    return SparseSet(pts, dimension)


def write_set(E: SparseSet) -> str:
    return "\n".join(" ".join(str(v) for v in p) for p in E.sorted_points()) + "\n"


def read_function(lines, dimension: int | None = None) -> SparseFunction:
    """One entry per line: d integers then a rational value like 3/4."""
    vals: dict[Point, Fraction] = {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        p = tuple(int(t) for t in toks[:-1])
        vals[p] = vals.get(p, Fraction(0)) + Fraction(toks[-1])
    return SparseFunction(vals, dimension)


def write_function(f: SparseFunction) -> str:
    rows = [
        " ".join(str(v) for v in p) + f" {val.numerator}/{val.denominator}"
        for p, val in f.values
    ]
    return "\n".join(rows) + "\n"
