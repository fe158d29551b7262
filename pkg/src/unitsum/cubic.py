"""Exact arithmetic in the cyclic cubic orders Z[alpha] with
alpha^3 = (a-1) alpha^2 + (a+2) alpha + 1, one order per integer a.

All three roots of the defining polynomial are real and irrational; the
largest is taken as alpha.  alpha and its conjugate -1 - 1/alpha generate
enough units that three of their monomials sum to 3, and feeding that
identity to the generic rewrite engine turns any element into a unit sum
with every coefficient at most 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from . import engine
from .engine import Representation, UnitGroupBasis, UnitRelation
from .errors import ParamsMismatch, RelationBroken

Interval = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class CubicParams:
    """The integer parameter selecting one order of the family."""

    a: int

    def __post_init__(self):
        object.__setattr__(self, "a", int(self.a))


def _norm_coord(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    if isinstance(c, (int, Fraction)):
        return c
    return int(c)


@dataclass(frozen=True, eq=False)
class CubicElement:
    """c0 + c1 alpha + c2 alpha^2 with exact coordinates.

    Ring elements carry int coordinates; Fractions appear only in
    intermediate inverse computations and collapse back to ints for
    units.  Compares equal to plain numbers when c1 = c2 = 0.
    """

    params: CubicParams
    c0: object
    c1: object
    c2: object

    def __eq__(self, other):
        if isinstance(other, CubicElement):
            if other.params != self.params:
                return NotImplemented
            return self.coords == other.coords
        if isinstance(other, (int, Fraction)):
            return self.c1 == 0 and self.c2 == 0 and self.c0 == other
        return NotImplemented

    def __hash__(self):
        if self.c1 == 0 and self.c2 == 0:
            return hash(self.c0)
        return hash((self.params.a, self.coords))

    def __post_init__(self):
        object.__setattr__(self, "c0", _norm_coord(self.c0))
        object.__setattr__(self, "c1", _norm_coord(self.c1))
        object.__setattr__(self, "c2", _norm_coord(self.c2))

    def _coerce(self, other) -> "CubicElement":
        if isinstance(other, CubicElement):
            if other.params != self.params:
                raise ParamsMismatch(
                    f"cannot combine a = {self.params.a} with a = {other.params.a}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CubicElement(self.params, other, 0, 0)
        return NotImplemented

    @property
    def coords(self):
        return (self.c0, self.c1, self.c2)

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coords)

    def __bool__(self) -> bool:
        return any(self.coords)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CubicElement(
            self.params, self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2
        )

    __radd__ = __add__

    def __neg__(self):
        return CubicElement(self.params, -self.c0, -self.c1, -self.c2)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CubicElement(
                self.params, self.c0 * other, self.c1 * other, self.c2 * other
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a = self.params.a
        c0, c1, c2 = self.coords
        d0, d1, d2 = other.coords
        e0 = c0 * d0
        e1 = c0 * d1 + c1 * d0
        e2 = c0 * d2 + c1 * d1 + c2 * d0
        e3 = c1 * d2 + c2 * d1
        e4 = c2 * d2
        k1 = a - 1
        k2 = a + 2
        # alpha^3 = k1 alpha^2 + k2 alpha + 1, alpha^4 follows by one more pass
        return CubicElement(
            self.params,
            e0 + e3 + e4 * k1,
            e1 + e3 * k2 + e4 * (k1 * k2 + 1),
            e2 + e3 * k1 + e4 * (k1 * k1 + k2),
        )

    __rmul__ = __mul__

    def inverse(self) -> "CubicElement":
        """Multiplicative inverse via the extended Euclidean algorithm in
        Q[X] modulo the defining polynomial."""
        if not self:
            raise ZeroDivisionError("zero has no inverse")
        a = self.params.a
        minpoly = [Fraction(-1), Fraction(-(a + 2)), Fraction(-(a - 1)), Fraction(1)]
        elem = _poly_trim([Fraction(c) for c in self.coords])
        old_r, r = elem, minpoly
        old_u, u = [Fraction(1)], []
        while r:
            quo, rem = _poly_divmod(old_r, r)
            old_r, r = r, rem
            old_u, u = u, _poly_sub(old_u, _poly_mul(quo, u))
        # old_r is a nonzero constant: the defining polynomial is
        # irreducible over Q (it has no rational roots for any integer a)
        scale = 1 / old_r[0]
        inv = [c * scale for c in old_u]
        inv += [Fraction(0)] * (3 - len(inv))
        return CubicElement(self.params, inv[0], inv[1], inv[2])

    def __pow__(self, e: int) -> "CubicElement":
        if e < 0:
            return self.inverse() ** (-e)
        result = CubicElement(self.params, 1, 0, 0)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __repr__(self):
        return f"CubicElement(a={self.params.a}, {self.c0}, {self.c1}, {self.c2})"


def _poly_trim(p: List[Fraction]) -> List[Fraction]:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_sub(p, q):
    n = max(len(p), len(q))
    p = p + [Fraction(0)] * (n - len(p))
    q = q + [Fraction(0)] * (n - len(q))
    return _poly_trim([x - y for x, y in zip(p, q)])


def _poly_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod(num, den):
    num = list(num)
    quo = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1] / lead
        quo[k] = c
        if c:
            for idx, d in enumerate(den):
                num[k + idx] -= c * d
    return _poly_trim(quo), _poly_trim(num)


def one(params: CubicParams) -> CubicElement:
    return CubicElement(params, 1, 0, 0)


def alpha(params: CubicParams) -> CubicElement:
    return CubicElement(params, 0, 1, 0)


@lru_cache(maxsize=None)
def _alpha_inverse(params: CubicParams) -> CubicElement:
    # constant term -1 makes this exact: alpha * (alpha^2 - (a-1) alpha - (a+2)) = 1
    a = params.a
    return CubicElement(params, -(a + 2), -(a - 1), 1)


def alpha2(params: CubicParams) -> CubicElement:
    """The conjugate -1 - 1/alpha, with integer coordinates (a+1, a-1, -1)."""
    a = params.a
    return CubicElement(params, a + 1, a - 1, -1)


@lru_cache(maxsize=None)
def _alpha2_inverse(params: CubicParams) -> CubicElement:
    inv = alpha2(params).inverse()
    if not inv.is_integral:
        raise RelationBroken(f"conjugate unit inverse is not integral for a = {params.a}")
    return inv


def mul(u: CubicElement, v: CubicElement) -> CubicElement:
    """Exact product (function form of CubicElement.__mul__)."""
    return u * v


@lru_cache(maxsize=None)
def unit_monomial(i: int, j: int, params: CubicParams) -> CubicElement:
    """alpha^i * conjugate^j for any integer exponents; always integral."""
    g1 = alpha(params) if i >= 0 else _alpha_inverse(params)
    g2 = alpha2(params) if j >= 0 else _alpha2_inverse(params)
    out = g1 ** abs(i) * g2 ** abs(j)
    if not out.is_integral:
        raise RelationBroken(f"unit monomial ({i},{j}) is not integral for a = {params.a}")
    return out


@dataclass(frozen=True)
class UnitMonomial:
    """A unit exponent pair together with its evaluated element."""

    i: int
    j: int
    value: CubicElement

    @classmethod
    def of(cls, i: int, j: int, params: CubicParams) -> "UnitMonomial":
        return cls(i, j, unit_monomial(i, j, params))


@lru_cache(maxsize=None)
def three_relation(params: CubicParams) -> UnitRelation:
    """The identity u1 + u2 + u3 = 3 over the unit monomials with
    exponents (1,2), (-2,-1), (1,-1); validated exactly before use.

    The three units are alpha^2 + (2-a) alpha - a,
    -2 alpha^2 + (2a-1) alpha + (a+4) and alpha^2 - (a+1) alpha - 1;
    their coordinates cancel columnwise to (3, 0, 0) for every a.
    """
    a = params.a
    u1 = unit_monomial(1, 2, params)
    u2 = unit_monomial(-2, -1, params)
    u3 = unit_monomial(1, -1, params)
    expected = (
        CubicElement(params, -a, 2 - a, 1),
        CubicElement(params, a + 4, 2 * a - 1, -2),
        CubicElement(params, -1, -a - 1, 1),
    )
    if (u1, u2, u3) != expected or u1 + u2 + u3 != CubicElement(params, 3, 0, 0):
        raise RelationBroken(f"three-unit identity failed for a = {a}")
    return UnitRelation(n=3, terms=((0, (1, 2)), (0, (-2, -1)), (0, (1, -1))))


def _poly_at(a: int, x: Fraction) -> Fraction:
    return ((x - (a - 1)) * x - (a + 2)) * x - 1


_ROOT_CACHE: Dict[int, List[Interval]] = {}


def _isolate(a: int) -> List[Interval]:
    bound = 2 + max(abs(a - 1), abs(a + 2))
    step = Fraction(1)
    while True:
        intervals = []
        x = Fraction(-bound)
        fx = _poly_at(a, x)
        while x < bound and len(intervals) < 3:
            y = x + step
            fy = _poly_at(a, y)
            # grid points are rational, hence never roots
            if (fx < 0) != (fy < 0):
                intervals.append((x, y))
            x, fx = y, fy
        if len(intervals) == 3:
            return intervals
        step /= 2


def real_roots(params: CubicParams, precision_bits: int = 64) -> Tuple[Interval, Interval, Interval]:
    """Three disjoint rational enclosures of the roots, ascending; the
    last one is alpha.  Enclosures shrink monotonically as precision
    grows and are cached per parameter."""
    a = params.a
    state = _ROOT_CACHE.get(a)
    if state is None:
        state = _ROOT_CACHE[a] = _isolate(a)
    target = Fraction(1, 1 << precision_bits)
    for idx, (lo, hi) in enumerate(state):
        if hi - lo <= target:
            continue
        neg_at_lo = _poly_at(a, lo) < 0
        while hi - lo > target:
            mid = (lo + hi) / 2
            if (_poly_at(a, mid) < 0) == neg_at_lo:
                lo = mid
            else:
                hi = mid
        state[idx] = (lo, hi)
    return tuple(state)


@lru_cache(maxsize=None)
def cubic_basis(params: CubicParams) -> UnitGroupBasis:
    """Engine basis with units (alpha, conjugate) over this order.

    The conjugate's absolute value is derived from the alpha enclosure
    through |conjugate| = 1 + 1/alpha, so one root refinement serves both
    hooks.
    """

    def alpha_iv(bits: int) -> Interval:
        b = bits
        lo, hi = real_roots(params, b)[-1]
        while lo <= 0:
            b += 16
            lo, hi = real_roots(params, b)[-1]
        return (lo, hi)

    def abs_alpha(bits: int) -> Interval:
        return alpha_iv(bits)

    def abs_conj(bits: int) -> Interval:
        lo, hi = alpha_iv(bits + 32)
        return (1 + 1 / hi, 1 + 1 / lo)

    return UnitGroupBasis(
        K=2,
        zeta_kind="minus_one",
        etas=(one(params),),
        epsilons=(alpha(params), alpha2(params)),
        abs_val=(abs_alpha, abs_conj),
        tag=f"cubic(a={params.a})",
    )


def cubic_evaluator(params: CubicParams):
    """Evaluation hook for engine.evaluate over a cubic basis."""

    def ev(k: int, ell: int, x) -> CubicElement:
        value = unit_monomial(x[0], x[1], params)
        return -value if k else value

    return ev


def represent_unit_sums(beta: CubicElement, policy: Optional[engine.ReductionPolicy] = None) -> Representation:
    """Unit-sum representation of beta with every coefficient at most 2.

    Coordinates seed the sign layers at exponents (0,0), (1,0), (2,0),
    which are themselves unit monomials, and the three-unit relation
    drives the rewrite.  Round-trip evaluation is exact.
    """
    if not beta.is_integral:
        raise ValueError("representation requires integer coordinates")
    params = beta.params
    basis = cubic_basis(params)
    seeds = {}
    for t, c in enumerate(beta.coords):
        if c:
            seeds[(0 if c > 0 else 1, 1, (t, 0))] = abs(c)
    rep = Representation(basis, seeds)
    if not rep:
        return rep
    return engine.reduce(rep, three_relation(params), policy)


def element_to_json(elem: CubicElement) -> dict:
    return {
        "a": str(elem.params.a),
        "coords": [str(c) for c in elem.coords],
    }


def element_from_json(data: dict) -> CubicElement:
    params = CubicParams(int(data["a"]))
    c0, c1, c2 = (int(c) for c in data["coords"])
    return CubicElement(params, c0, c1, c2)
