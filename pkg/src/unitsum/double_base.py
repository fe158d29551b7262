"""Signed and extended signed double-base digit expansions.

An expansion writes an integer (or a p-power-times-q-power denominator
rational) as sum d * p^i * q^j with digits d in {-1, 1} over distinct
exponent pairs.  Conversion works by seeding the p-adic digits of the
value on a grid and repeatedly trading two copies of p^i q^j for the two
terms of a base-pair relation, a direct instance of the generic
unit-sum rewrite with n = 2.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

from . import relations as _relations
from .engine import UnitGroupBasis, UnitRelation
from .errors import InvalidExpansion, NoRelationFound, RelationInvalid

Term = Tuple[int, int, int]


@dataclass(frozen=True)
class BasePair:
    """Two coprime distinct integer bases, both at least 2."""

    p: int
    q: int

    def __post_init__(self):
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))
        if self.p < 2 or self.q < 2:
            raise ValueError("bases must be at least 2")
        if self.p == self.q:
            raise ValueError("bases must be distinct")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("bases must be coprime")


def _canonical_terms(terms, allow_negative_exponents: bool) -> Tuple[Term, ...]:
    seen = set()
    clean = []
    for d, i, j in terms:
        d, i, j = int(d), int(i), int(j)
        if d not in (-1, 1):
            raise InvalidExpansion(f"digit {d} at ({i},{j}) is not -1 or 1")
        if not allow_negative_exponents and (i < 0 or j < 0):
            raise InvalidExpansion(f"negative exponent at ({i},{j})")
        if (i, j) in seen:
            raise InvalidExpansion(f"duplicate exponent pair ({i},{j})")
        seen.add((i, j))
        clean.append((d, i, j))
    clean.sort(key=lambda t: (t[1], t[2]), reverse=True)
    return tuple(clean)


@dataclass(frozen=True)
class SignedExpansion:
    """sum d * p^i * q^j with d in {-1,1}, i, j >= 0, distinct (i, j).

    Terms are kept in descending lexicographic (i, j) order.
    """

    base: BasePair
    terms: Tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "terms", _canonical_terms(self.terms, allow_negative_exponents=False)
        )


@dataclass(frozen=True)
class ExtendedExpansion:
    """Like SignedExpansion but exponents may be any integers."""

    base: BasePair
    terms: Tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "terms", _canonical_terms(self.terms, allow_negative_exponents=True)
        )


@dataclass(frozen=True)
class PQRational:
    """A rational num / (p^a_p * q^a_q) in lowest terms over the base pair."""

    base: BasePair
    num: int
    a_p: int
    a_q: int

    def __post_init__(self):
        num, ap, aq = int(self.num), int(self.a_p), int(self.a_q)
        if ap < 0 or aq < 0:
            raise ValueError("denominator exponents must be nonnegative")
        p, q = self.base.p, self.base.q
        if num == 0:
            ap = aq = 0
        while ap and num % p == 0:
            num //= p
            ap -= 1
        while aq and num % q == 0:
            num //= q
            aq -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "a_p", ap)
        object.__setattr__(self, "a_q", aq)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.base.p ** self.a_p * self.base.q ** self.a_q)


def pq_rational(x: Fraction, base: BasePair) -> PQRational:
    """Factor a fraction's denominator into base powers.

    Raises ValueError when the denominator has a factor foreign to both
    bases.
    """
    x = Fraction(x)
    den = x.denominator
    ap = aq = 0
    while den % base.p == 0:
        den //= base.p
        ap += 1
    while den % base.q == 0:
        den //= base.q
        aq += 1
    if den != 1:
        raise ValueError(f"denominator factor {den} is not a product of base powers")
    return PQRational(base, x.numerator, ap, aq)


def p_adic_digits(n: int, p: int) -> List[int]:
    """Base-p digits of n >= 0, least significant first; 0 gives []."""
    if n < 0:
        raise ValueError("digits are defined for nonnegative integers")
    if p < 2:
        raise ValueError("base must be at least 2")
    out = []
    while n:
        n, r = divmod(n, p)
        out.append(r)
    return out


def balanced_ternary(n: int) -> List[int]:
    """Digits in {-1,0,1} with n = sum digit * 3^index, least significant
    first.  Works for either sign; 0 gives []."""
    out = []
    while n:
        r = n % 3
        if r == 2:
            out.append(-1)
            n = (n + 1) // 3
        else:
            out.append(r)
            n //= 3
    return out


def greedy_seed(v: int, base: BasePair) -> List[Term]:
    """Seed terms by repeatedly subtracting the signed base power closest
    to the remainder.

    Candidate powers are limited to at most twice the remainder; ties
    prefer the smaller power, then smaller i, then smaller j.  Repeat
    picks accumulate, so coefficients may leave {-1,1}.  Terms come out
    in first-touch order with zero nets dropped.
    """
    p, q = base.p, base.q
    order: List[Tuple[int, int]] = []
    acc = {}
    r = v
    while r:
        lim = 2 * abs(r)
        best = None
        pi = 1
        i = 0
        while pi <= lim:
            m = pi
            j = 0
            while m <= lim:
                for s in (1, -1):
                    cand = (abs(r - s * m), m, i, j, s)
                    if best is None or cand[:4] < best[:4]:
                        best = cand
                m *= q
                j += 1
            pi *= p
            i += 1
        _, m, i, j, s = best
        r -= s * m
        if (i, j) not in acc:
            acc[(i, j)] = 0
            order.append((i, j))
        acc[(i, j)] += s
    return [(acc[ij], ij[0], ij[1]) for ij in order if acc[ij]]


def _claim_reduce(grid: dict, credits, on_step=None) -> int:
    """Drive every grid coefficient into {-1,0,1}.

    grid maps (i, j) to a signed net coefficient.  A site with |a| >= 2 is
    fired t = |a| // 2 times at once: 2t copies move through the credit
    list ((di, dj, c) meaning a gain of c at the shifted site per fired
    pair).  Sites fire in ascending (j, i) order.  Exactly one credit must
    stay in layer (dj == 0) and the rest must raise j, which makes the
    per-layer mass drop on every fire and guarantees termination.  Returns
    the number of fired pairs.
    """
    if not any(dj == 0 for _, dj, _ in credits) or any(dj < 0 for _, dj, _ in credits):
        raise RelationInvalid("credits must keep one term in layer and raise the rest")
    if sum(1 for _, dj, _ in credits if dj == 0) != 1:
        raise RelationInvalid("exactly one in-layer credit is required")
    steps = 0
    heap = [(j, i) for (i, j), a in grid.items() if abs(a) >= 2]
    heapq.heapify(heap)
    while heap:
        j, i = heapq.heappop(heap)
        a = grid.get((i, j), 0)
        if abs(a) < 2:
            continue
        s = 1 if a > 0 else -1
        t = abs(a) // 2
        rem = a - s * 2 * t
        if rem:
            grid[(i, j)] = rem
        else:
            del grid[(i, j)]
        steps += t
        if on_step is not None:
            on_step((i, j), t)
        for di, dj, c in credits:
            site = (i + di, j + dj)
            old = grid.get(site, 0)
            nv = old + s * c * t
            if nv:
                grid[site] = nv
            else:
                grid.pop(site, None)
            if abs(old) < 2 <= abs(nv):
                heapq.heappush(heap, (site[1], site[0]))
    return steps


def _plain_credits(rel: "_relations.PlainRelation"):
    # 2 p^i q^j = sign p^(i+x) q^j - sign p^i q^(j+y)
    return ((rel.x, 0, rel.sign), (0, rel.y, -rel.sign))


def _extended_credits(rel: "_relations.ExtendedRelation"):
    # 2 p^i q^j = p^(i+a) q^(j+b) + sign p^(i+c) q^(j+d)
    return ((rel.a, rel.b, 1), (rel.c, rel.d, rel.sign))


def expand_claim(v: int, base: BasePair, rel, on_step=None) -> Tuple[SignedExpansion, int]:
    """Expand v >= 0 by seeding its p-adic digits and reducing with a
    plain relation.  Returns (expansion, fired pair count).  The count is
    at most (w^2 - w) / 2 for w the seeded digit sum."""
    if v < 0:
        raise ValueError("expand_claim takes a nonnegative integer")
    if not _relations.verify_relation(base, rel):
        raise RelationInvalid(f"{rel} is not a valid relation for {base}")
    grid = {(i, 0): d for i, d in enumerate(p_adic_digits(v, base.p)) if d}
    steps = _claim_reduce(grid, _plain_credits(rel), on_step)
    terms = [(a, i, j) for (i, j), a in grid.items() if a]
    return (SignedExpansion(base, terms), steps)


@dataclass(frozen=True)
class ExpandStats:
    """expand output plus the bookkeeping the benchmarks report."""

    expansion: "SignedExpansion | ExtendedExpansion"
    steps: int
    w_init: int
    relation: object = None


def _single_base_terms(v: int, b: int, axis: int) -> Optional[List[Term]]:
    # Expansions that need only one base: powers of 2 via plain binary
    # digits, powers of 3 via balanced ternary.
    if b == 2:
        digits = [(1, e) for e, d in enumerate(p_adic_digits(abs(v), 2)) if d]
        if v < 0:
            digits = [(-d, e) for d, e in digits]
    elif b == 3:
        digits = [(d, e) for e, d in enumerate(balanced_ternary(v)) if d]
    else:
        return None
    if axis == 0:
        return [(d, e, 0) for d, e in digits]
    return [(d, 0, e) for d, e in digits]


def expand_with_stats(
    v: int,
    base: BasePair,
    search_bound: int = 64,
    seed_method: str = "padic",
    on_step=None,
) -> ExpandStats:
    """expand, but also reporting steps, the seeded digit sum and the
    relation used (None on the single-base paths)."""
    if seed_method not in ("padic", "greedy"):
        raise ValueError("seed_method must be 'padic' or 'greedy'")
    w_init = sum(p_adic_digits(abs(v), base.p))
    if v == 0:
        return ExpandStats(SignedExpansion(base, ()), 0, 0)
    for b, axis in ((base.p, 0), (base.q, 1)):
        terms = _single_base_terms(v, b, axis)
        if terms is not None:
            return ExpandStats(SignedExpansion(base, terms), 0, w_init)
    rel = _relations.find_plain_relation(base, search_bound)
    if rel is None:
        raise NoRelationFound(
            f"no plain relation for ({base.p},{base.q}) with exponents up to {search_bound}"
        )
    sign = 1 if v > 0 else -1
    if seed_method == "greedy":
        grid = {}
        for d, i, j in greedy_seed(abs(v), base):
            grid[(i, j)] = d
        steps = _claim_reduce(grid, _plain_credits(rel), on_step)
        terms = [(a, i, j) for (i, j), a in grid.items() if a]
        expansion = SignedExpansion(base, terms)
    else:
        expansion, steps = expand_claim(abs(v), base, rel, on_step)
    if sign < 0:
        expansion = flip(expansion)
    return ExpandStats(expansion, steps, w_init, rel)


def expand(v: int, base: BasePair, search_bound: int = 64, seed_method: str = "padic") -> SignedExpansion:
    """Signed double-base expansion of any integer.

    Values of either sign are handled (negation flips every digit).  When
    one base is 2 or 3 a single-base digit expansion is used directly, in
    the order p = 2, p = 3, q = 2, q = 3; otherwise a plain base-pair
    relation within search_bound drives the digit reduction and
    NoRelationFound is raised when there is none.
    """
    return expand_with_stats(v, base, search_bound, seed_method).expansion


def flip(exp):
    """Negate an expansion digitwise."""
    cls = type(exp)
    return cls(exp.base, tuple((-d, i, j) for d, i, j in exp.terms))


def expand_extended(x: PQRational, base: BasePair, search_bound: int = 64, on_step=None) -> ExtendedExpansion:
    """Extended expansion of num / (p^a_p q^a_q).

    The numerator's p-adic digits are reduced with the best relation in
    reach (plain ones first, then single-base-inverse ones); the final
    exponents are shifted down by (a_p, a_q).  Relations whose inverse
    powers live on the q side run through the p <-> q mirror image of the
    whole computation.
    """
    if x.base != base:
        raise ValueError("rational and expansion base pairs differ")
    if x.num == 0:
        return ExtendedExpansion(base, ())
    rel = _relations.find_extended_relation(base, search_bound)
    if rel is None:
        raise NoRelationFound(
            f"no relation for ({base.p},{base.q}) with exponents up to {search_bound}"
        )
    mirrored = rel.form == "q_inverse"
    if mirrored:
        work_base = BasePair(base.q, base.p)
        work_rel = _relations.ExtendedRelation(
            rel.b, rel.a, rel.d, rel.c, rel.sign, "p_inverse"
        )
    else:
        work_base = base
        work_rel = rel
    grid = {(i, 0): d for i, d in enumerate(p_adic_digits(abs(x.num), work_base.p)) if d}
    _claim_reduce(grid, _extended_credits(work_rel), on_step)
    sign = 1 if x.num > 0 else -1
    terms = []
    for (i, j), a in grid.items():
        if not a:
            continue
        if mirrored:
            i, j = j, i
        terms.append((sign * a, i - x.a_p, j - x.a_q))
    return ExtendedExpansion(base, terms)


def evaluate_expansion(exp):
    """Exact value: an int for SignedExpansion, a Fraction for
    ExtendedExpansion."""
    p, q = exp.base.p, exp.base.q
    if isinstance(exp, SignedExpansion):
        return sum(d * p ** i * q ** j for d, i, j in exp.terms)
    total = Fraction(0)
    for d, i, j in exp.terms:
        total += d * Fraction(p) ** i * Fraction(q) ** j
    return total


def weight(exp) -> int:
    """Number of nonzero digits."""
    return len(exp.terms)


def height(x) -> float:
    """max(log|n|, log d, 1) for x = n/d in lowest terms; height(0) = 1."""
    x = Fraction(x)
    vals = [1.0]
    if x.numerator:
        vals.append(math.log(abs(x.numerator)))
    if x.denominator > 1:
        vals.append(math.log(x.denominator))
    return max(vals)


@lru_cache(maxsize=None)
def rational_basis(p: int, q: int) -> UnitGroupBasis:
    """Order-two-sign basis whose units are the integer bases p and q.

    abs_val hooks return exact point intervals, so downstream interval
    arithmetic degenerates to exact rational arithmetic.
    """
    base = BasePair(p, q)

    def point(v):
        return lambda bits: (Fraction(v), Fraction(v))

    return UnitGroupBasis(
        K=2,
        zeta_kind="minus_one",
        etas=(1,),
        epsilons=(base.p, base.q),
        abs_val=(point(base.p), point(base.q)),
        tag=f"rational({p},{q})",
    )


def rational_evaluator(base: BasePair) -> Callable:
    """Evaluation hook for engine.evaluate over a rational basis."""

    def ev(k: int, ell: int, x: Sequence[int]) -> Fraction:
        return (-1) ** k * Fraction(base.p) ** x[0] * Fraction(base.q) ** x[1]

    return ev


def to_unit_relation(rel, base: BasePair) -> UnitRelation:
    """Encode a plain relation as an engine relation with n = 2.

    2 = sign (p^x - q^y) becomes one term on each sign layer.
    """
    if not _relations.verify_relation(base, rel):
        raise RelationInvalid(f"{rel} is not a valid relation for {base}")
    if rel.sign == 1:
        terms = ((0, (rel.x, 0)), (1, (0, rel.y)))
    else:
        terms = ((0, (0, rel.y)), (1, (rel.x, 0)))
    return UnitRelation(n=2, terms=terms)


def expansion_to_json(exp) -> dict:
    """JSON-ready dict; big integers ride as decimal strings."""
    value = evaluate_expansion(exp)
    if isinstance(exp, SignedExpansion):
        kind, value_str = "signed", str(value)
    else:
        kind = "extended"
        value_str = (
            str(value.numerator)
            if value.denominator == 1
            else f"{value.numerator}/{value.denominator}"
        )
    return {
        "kind": kind,
        "p": str(exp.base.p),
        "q": str(exp.base.q),
        "value": value_str,
        "terms": [{"d": d, "i": str(i), "j": str(j)} for d, i, j in exp.terms],
    }


def expansion_from_json(data: dict):
    """Parse the expansion schema back; returns (expansion, claimed value).

    The claimed value is whatever the document asserts, as a Fraction; it
    is not rechecked here.
    """
    try:
        kind = data["kind"]
        base = BasePair(int(data["p"]), int(data["q"]))
        terms = [(int(t["d"]), int(t["i"]), int(t["j"])) for t in data["terms"]]
        claimed = Fraction(data["value"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidExpansion(f"malformed expansion document: {exc}") from None
    if kind == "signed":
        return (SignedExpansion(base, terms), claimed)
    if kind == "extended":
        return (ExtendedExpansion(base, terms), claimed)
    raise InvalidExpansion(f"unknown expansion kind {kind!r}")
