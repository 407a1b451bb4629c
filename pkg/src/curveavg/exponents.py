"""Exact exponent pairs (1/p, 1/q) and the scaling-region geometry.

The admissible range q >= p splits into a supercritical triangle, its
boundary (two critical lines meeting at the critical vertex) and the
subcritical remainder.  Classification is exact rational arithmetic;
floats appear only in the conjectured constant itself.
"""
from __future__ import annotations

import dataclasses
from fractions import Fraction

from .curves import Curve

RegionName = str

OUTSIDE = "outside"
SUPERCRITICAL = "supercritical"
CRITICAL_BOUNDARY = "critical_boundary"
SUBCRITICAL = "subcritical"


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclasses.dataclass(frozen=True, init=False)
class ExponentPair:
    """(1/p, 1/q) with exact rational entries in [0, 1]."""

    inv_p: Fraction
    inv_q: Fraction

    def __init__(self, inv_p, inv_q):
        ip, iq = _as_fraction(inv_p), _as_fraction(inv_q)
        for name, v in (("1/p", ip), ("1/q", iq)):
            if not 0 <= v <= 1:
                raise ValueError(f"{name} = {v} outside [0, 1]")
        object.__setattr__(self, "inv_p", ip)
        object.__setattr__(self, "inv_q", iq)

    @classmethod
    def from_p_q(cls, p, q) -> "ExponentPair":
        return cls(1 / _as_fraction(p), 1 / _as_fraction(q))

    @property
    def inv_r(self) -> Fraction:
        """1/r := 1/p - 1/q, always recomputed."""
        return self.inv_p - self.inv_q

    @property
    def inv_p_dual(self) -> Fraction:
        return 1 - self.inv_p

    @property
    def inv_q_dual(self) -> Fraction:
        return 1 - self.inv_q

    def dual(self) -> "ExponentPair":
        """The point (1/q', 1/p')."""
        return ExponentPair(self.inv_q_dual, self.inv_p_dual)


def critical_exponent(c: Curve) -> Fraction:
    """p_c = 2 - 1/D for total degree D."""
    D = c.total_degree
    if D < 1:
        raise ValueError("total degree must be >= 1")
    return 2 - Fraction(1, D)


def critical_vertex(D: int) -> tuple[Fraction, Fraction]:
    """(1/p_c, 1/p_c') = (D/(2D-1), (D-1)/(2D-1))."""
    return Fraction(D, 2 * D - 1), Fraction(D - 1, 2 * D - 1)


def classify_by_degree(D: int, e: ExponentPair) -> RegionName:
    ip, iq = e.inv_p, e.inv_q
    if iq > ip:
        return OUTSIDE
    lhs1, rhs1 = D * iq, (D - 1) * ip
    lhs2, rhs2 = D * (1 - ip), (D - 1) * (1 - iq)
    if lhs1 > rhs1 and lhs2 > rhs2:
        return SUPERCRITICAL
    if lhs1 == rhs1 or lhs2 == rhs2:
        return CRITICAL_BOUNDARY
    return SUBCRITICAL


def classify_exponents(c: Curve, e: ExponentPair) -> RegionName:
    """Exact region of (1/p, 1/q) for the curve's total degree."""
    return classify_by_degree(c.total_degree, e)


def dominant_term(D: int, e: ExponentPair) -> str:
    """Which of the three conjectured powers of N decays slowest.

    Ties are reported joined by '=', smallest exponent first by the
    fixed order curve/delta-dual/dirac-dual.
    """
    terms = [
        (D * e.inv_r, "N^-D(1/p-1/q)"),
        (1 - e.inv_q, "N^-1/q'"),
        (e.inv_p, "N^-1/p"),
    ]
    best = min(t[0] for t in terms)
    return "=".join(name for v, name in terms if v == best)


def conjectured_constant(c: Curve, e: ExponentPair, N: int) -> float:
    """N^{-D(1/p-1/q)} + N^{-1/q'} + N^{-1/p}."""
    if N < 1:
        raise ValueError("N must be >= 1")
    D = c.total_degree
    return (
        float(N) ** float(-D * e.inv_r)
        + float(N) ** float(-(1 - e.inv_q))
        + float(N) ** float(-e.inv_p)
    )
