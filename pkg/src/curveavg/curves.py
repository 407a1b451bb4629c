"""Polynomial curves in Z^d with separated component degrees.

A curve is a tuple of non-constant integer polynomials whose degrees
strictly increase.  Integer dilations, integer shears and translations
act on curves componentwise; shears may transiently break degree
separation, which is why an unchecked constructor exists.  Every
operator/counting entry point revalidates separation.
"""
from __future__ import annotations

import dataclasses
from typing import NamedTuple, Union

from .polynomials import IntPoly, parse_poly, poly_to_text

Point = tuple[int, ...]


class CurveError(ValueError):
    pass


class TransformError(ValueError):
    pass


@dataclasses.dataclass(frozen=True, init=False)
class Curve:
    """gamma(n) = (P_1(n), ..., P_d(n)) with deg P_1 < ... < deg P_d."""

    components: tuple[IntPoly, ...]

    def __init__(self, components, *, _checked: bool = True):
        comps = tuple(components)
        if not comps:
            raise CurveError("a curve needs at least one component")
        for p in comps:
            if p.is_constant():
                raise CurveError(f"constant component {p!s}")
        if _checked:
            degs = [p.degree for p in comps]
            if any(a >= b for a, b in zip(degs, degs[1:])):
                raise CurveError(f"component degrees {degs} are not strictly increasing")
        object.__setattr__(self, "components", comps)

    @classmethod
    def unchecked(cls, components) -> "Curve":
        """Skip the degree-separation check (transform intermediates only)."""
        return cls(components, _checked=False)

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def total_degree(self) -> int:
        """D = sum of the component degrees."""
        return sum(p.degree for p in self.components)

    @property
    def degrees_separated(self) -> bool:
        degs = [p.degree for p in self.components]
        return all(a < b for a, b in zip(degs, degs[1:]))

    def require_separated(self) -> None:
        if not self.degrees_separated:
            raise CurveError("curve degrees are not separated")

    def __call__(self, n: int) -> Point:
        return tuple(p(n) for p in self.components)

    def is_injective_on(self, n_max: int) -> bool:
        seen = set()
        for n in range(1, n_max + 1):
            v = self(n)
            if v in seen:
                return False
            seen.add(v)
        return True

    def __repr__(self) -> str:
        return f"Curve({curve_to_text(self)!r})"


def moment_curve(d: int) -> Curve:
    """(n, n^2, ..., n^d)."""
    return Curve(tuple(IntPoly([0] * k + [1]) for k in range(1, d + 1)))


def parse_curve(text: str) -> Curve:
    """Comma-separated polynomial expressions, e.g. ``n,n^2,n^3``."""
    parts = text.split(",")
    return Curve(tuple(parse_poly(p) for p in parts))


def curve_to_text(c: Curve) -> str:
    return ",".join(poly_to_text(p) for p in c.components)


def eval_curve(c: Curve, n: int) -> Point:
    return c(n)


def total_degree(c: Curve) -> int:
    return c.total_degree


# -- affine transforms ------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Dilation:
    factors: tuple[int, ...]

    def __post_init__(self):
        if any(a == 0 for a in self.factors):
            raise TransformError("dilation factors must be nonzero")


@dataclasses.dataclass(frozen=True)
class Shear:
    """x_j -> x_j - b * x_k (1-based coordinates, j != k)."""

    j: int
    k: int
    b: int

    def __post_init__(self):
        if self.j == self.k:
            raise TransformError("shear indices must be distinct")


@dataclasses.dataclass(frozen=True)
class Translation:
    vector: tuple[int, ...]


Step = Union[Dilation, Shear, Translation]


@dataclasses.dataclass(frozen=True)
class AffineTransform:
    """Ordered composition of dilations, shears and translations.

    Steps apply left to right: steps[0] acts first.
    """

    steps: tuple[Step, ...] = ()

    @classmethod
    def identity(cls) -> "AffineTransform":
        return cls(())

    @classmethod
    def dilation(cls, *factors: int) -> "AffineTransform":
        return cls((Dilation(tuple(factors)),))

    @classmethod
    def shear(cls, j: int, k: int, b: int) -> "AffineTransform":
        return cls((Shear(j, k, b),))

    @classmethod
    def translation(cls, *vector: int) -> "AffineTransform":
        return cls((Translation(tuple(vector)),))

    def then(self, other: "AffineTransform") -> "AffineTransform":
        return AffineTransform(self.steps + other.steps)

    def apply_point(self, x: Point) -> Point:
        for step in self.steps:
            x = _step_point(step, x)
        return x

    def is_lattice_bijection(self) -> bool:
        """True when the map is invertible over Z^d (all dilation factors +-1)."""
        return all(
            not isinstance(s, Dilation) or all(a in (1, -1) for a in s.factors)
            for s in self.steps
        )

    def inverse(self) -> "AffineTransform":
        if not self.is_lattice_bijection():
            raise TransformError("transform is not invertible over the lattice")
        inv: list[Step] = []
        for step in reversed(self.steps):
            if isinstance(step, Dilation):
                inv.append(step)  # factors are +-1, self-inverse
            elif isinstance(step, Shear):
                inv.append(Shear(step.j, step.k, -step.b))
            else:
                inv.append(Translation(tuple(-v for v in step.vector)))
        return AffineTransform(tuple(inv))


def _step_point(step: Step, x: Point) -> Point:
    if isinstance(step, Dilation):
        if len(step.factors) != len(x):
            raise TransformError("dilation dimension mismatch")
        return tuple(a * v for a, v in zip(step.factors, x))
    if isinstance(step, Shear):
        d = len(x)
        if not (1 <= step.j <= d and 1 <= step.k <= d):
            raise TransformError("shear index out of range")
        out = list(x)
        out[step.j - 1] -= step.b * x[step.k - 1]
        return tuple(out)
    if len(step.vector) != len(x):
        raise TransformError("translation dimension mismatch")
    return tuple(v + t for v, t in zip(x, step.vector))


def _step_curve(step: Step, comps: list[IntPoly]) -> list[IntPoly]:
    if isinstance(step, Dilation):
        if len(step.factors) != len(comps):
            raise TransformError("dilation dimension mismatch")
        return [p * a for p, a in zip(comps, step.factors)]
    if isinstance(step, Shear):
        d = len(comps)
        if not (1 <= step.j <= d and 1 <= step.k <= d):
            raise TransformError("shear index out of range")
        out = list(comps)
        out[step.j - 1] = comps[step.j - 1] - comps[step.k - 1] * step.b
        return out
    if len(step.vector) != len(comps):
        raise TransformError("translation dimension mismatch")
    return [p + t for p, t in zip(comps, step.vector)]


def apply_transform(c: Curve, t: AffineTransform) -> Curve:
    """Transform a curve componentwise.

    The result may lose degree separation (it is returned unchecked and
    flagged via ``degrees_separated``); a component collapsing to a
    constant is an error.
    """
    comps = list(c.components)
    for step in t.steps:
        comps = _step_curve(step, comps)
        for p in comps:
            if p.is_constant():
                raise TransformError("transform produces a constant component")
    return Curve.unchecked(tuple(comps))


def project(c: Curve, coords) -> Curve:
    """Keep the selected (1-based) coordinates; subsets stay separated."""
    idx = sorted(set(coords))
    if not idx:
        raise CurveError("empty coordinate selection")
    if idx[0] < 1 or idx[-1] > c.dimension:
        raise CurveError("projection index out of range")
    return Curve(tuple(c.components[i - 1] for i in idx))


class ReductionResult(NamedTuple):
    curve: Curve
    transform: AffineTransform
    diagnostics: tuple[str, ...]


def reduce_canonical(c: Curve) -> ReductionResult:
    """Shear a linear first component out of the later ones.

    When P_1 = a*n + b, every later component whose linear coefficient is
    exactly divisible by a gets the corresponding integer shear.  The
    shears used are recorded so the reduction can be replayed.  If an
    elimination would collapse a component to a constant, the input is
    returned unchanged with a diagnostic.
    """
    p1 = c.components[0]
    if p1.degree != 1 or c.dimension == 1:
        return ReductionResult(c, AffineTransform.identity(), ())
    a = p1.coeffs[1]
    steps: list[Step] = []
    comps = list(c.components)
    for j in range(2, c.dimension + 1):
        pj = comps[j - 1]
        lin = pj.coeffs[1] if pj.degree >= 1 else 0
        if lin == 0 or lin % a != 0:
            continue
        b = lin // a
        candidate = pj - p1 * b
        if candidate.is_constant():
            return ReductionResult(
                c, AffineTransform.identity(),
                (f"constant component after shear at coordinate {j}",),
            )
        comps[j - 1] = candidate
        steps.append(Shear(j, 1, b))
    if not steps:
        return ReductionResult(c, AffineTransform.identity(), ())
    reduced = Curve.unchecked(tuple(comps))
    return ReductionResult(reduced, AffineTransform(tuple(steps)), ())
