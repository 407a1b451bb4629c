"""Exact univariate integer polynomials.

A polynomial is stored as a tuple of arbitrary-precision integer
coefficients ``(c0, c1, ..., cd)`` in ascending powers of the variable
``n``.  The zero polynomial is the empty tuple; trailing zeros are
trimmed on construction, so equal polynomials compare equal.  All
arithmetic is exact.
"""
from __future__ import annotations

import dataclasses
import itertools
import re
from math import isqrt


class PolyParseError(ValueError):
    """Malformed polynomial text; carries the failing position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclasses.dataclass(frozen=True, init=False)
class IntPoly:
    """Dense integer polynomial in one variable ``n``.

    >>> IntPoly((0, -1, 0, 2))
    IntPoly('2n^3-n')
    """

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: tuple[int, ...] | list[int] = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    # -- structure ----------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree of the leading term; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def leading(self) -> int:
        if not self.coeffs:
            return 0
        return self.coeffs[-1]

    def constant_term(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: IntPoly | int) -> IntPoly:
        o = other.coeffs if isinstance(other, IntPoly) else (other,)
        return IntPoly([a + b for a, b in itertools.zip_longest(self.coeffs, o, fillvalue=0)])

    def __sub__(self, other: IntPoly | int) -> IntPoly:
        o = other.coeffs if isinstance(other, IntPoly) else (other,)
        return IntPoly([a - b for a, b in itertools.zip_longest(self.coeffs, o, fillvalue=0)])

    def __neg__(self) -> IntPoly:
        return IntPoly([-c for c in self.coeffs])

    def __mul__(self, other: IntPoly | int) -> IntPoly:
        if isinstance(other, int):
            return IntPoly([c * other for c in self.coeffs])
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __radd__ = __add__
    __rmul__ = __mul__

    def __call__(self, n: int) -> int:
        """Evaluate at an integer by Horner's scheme, exactly."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def compose(self, inner: IntPoly) -> IntPoly:
        """Exact substitution: returns self(inner(n))."""
        acc = IntPoly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def scale_divide(self, k: int) -> IntPoly:
        """Divide every coefficient by k; raises if not exactly divisible."""
        if k == 0:
            raise ZeroDivisionError("division of polynomial by zero")
        out = []
        for c in self.coeffs:
            q, r = divmod(c, k)
            if r:
                raise ValueError(f"coefficient {c} not divisible by {k}")
            out.append(q)
        return IntPoly(out)

    def __repr__(self) -> str:
        return f"IntPoly({poly_to_text(self)!r})"

    def __str__(self) -> str:
        return poly_to_text(self)


def poly_to_text(p: IntPoly) -> str:
    """Print in the CLI grammar, highest power first, e.g. ``2n^3-n+5``."""
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else ("+" if parts else "")
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            var = "n" if i == 1 else f"n^{i}"
            body = var if mag == 1 else f"{mag}{var}"
        parts.append(sign + body)
    return "".join(parts)


_TERM_RE = re.compile(r"(?P<coeff>\d+)?(?:\s*\*?\s*(?P<var>n)(?:\s*\^\s*(?P<exp>\d+))?)?")


def parse_poly(text: str) -> IntPoly:
    """Parse a sum of signed monomials in ``n``, e.g. ``2n^3-n+5``.

    Raises PolyParseError (with position) on anything else.
    """
    s = text
    i = 0
    coeffs: dict[int, int] = {}
    saw_term = False
    while True:
        while i < len(s) and s[i].isspace():
            i += 1
        if i >= len(s):
            break
        sign = 1
        if s[i] in "+-":
            if not saw_term and s[i] == "+":
                pass
            sign = -1 if s[i] == "-" else 1
            i += 1
            while i < len(s) and s[i].isspace():
                i += 1
            if i >= len(s):
                raise PolyParseError("dangling sign", i)
        elif saw_term:
            raise PolyParseError("expected '+' or '-' between terms", i)
        m = _TERM_RE.match(s, i)
        if m is None or (m.group("coeff") is None and m.group("var") is None):
            raise PolyParseError("expected a monomial", i)
        coeff = int(m.group("coeff")) if m.group("coeff") else 1
        if m.group("var"):
            exp = int(m.group("exp")) if m.group("exp") else 1
        else:
            exp = 0
        coeffs[exp] = coeffs.get(exp, 0) + sign * coeff
        i = m.end()
        saw_term = True
    if not saw_term:
        raise PolyParseError("empty polynomial", 0)
    out = [0] * (max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return IntPoly(out)


def divisors(z: int) -> list[int]:
    """Sorted positive divisors of |z|, by trial division up to sqrt."""
    if z == 0:
        raise ValueError("0 has no divisor list")
    z = abs(z)
    small, large = [], []
    d = 1
    r = isqrt(z)
    while d <= r:
        if z % d == 0:
            small.append(d)
            q = z // d
            if q != d:
                large.append(q)
        d += 1
    return small + large[::-1]


ALL_INTEGERS = "all"


def integer_roots(p: IntPoly, lo: int, hi: int):
    """Integer roots of p in [lo, hi].

    Returns the sentinel ALL_INTEGERS when p is identically zero (every
    point of the interval is a root), otherwise a sorted list.  Nonzero
    candidates must divide the trailing nonzero coefficient, which keeps
    the search exact without any floating point.
    """
    if p.is_zero():
        return ALL_INTEGERS
    val = 0
    while val < len(p.coeffs) and p.coeffs[val] == 0:
        val += 1
    roots = []
    if val > 0 and lo <= 0 <= hi:
        roots.append(0)
    c0 = p.coeffs[val]
    if val == len(p.coeffs) - 1:
        # monomial c0 * n^val: only root is 0, handled above
        return sorted(roots)
    for d in divisors(c0):
        for r in (d, -d):
            if lo <= r <= hi and p(r) == 0:
                roots.append(r)
    return sorted(set(roots))
