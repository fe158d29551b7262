"""Base-pair relations with right-hand side 2, and modular certificates
that no such relation exists.

A plain relation writes 2 = sign * (p^x - q^y).  An extended relation
allows negative exponents, 2 = p^a q^b + sign * p^c q^d, which covers
the plain shape plus the single-base-inverse shapes 2 = (q^b -+ 1) p^-a
and its p <-> q mirror.  An obstruction certificate is a modulus whose
power residues of p and q never differ by 2 or -2, ruling every plain
relation out at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Tuple

if TYPE_CHECKING:  # pragma: no cover
    from .double_base import BasePair

_FORM_RANK = {"plain": 0, "p_inverse": 1, "q_inverse": 2}


@dataclass(frozen=True)
class PlainRelation:
    """2 = sign * (p^x - q^y) with nonnegative exponents."""

    x: int
    y: int
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be -1 or 1")
        if self.x < 0 or self.y < 0:
            raise ValueError("exponents must be nonnegative")


@dataclass(frozen=True)
class ExtendedRelation:
    """2 = p^a q^b + sign * p^c q^d with the positive term written first.

    form tags where the inverse powers sit: 'plain' (none), 'p_inverse'
    (denominator a power of p), 'q_inverse' (its mirror image).
    """

    a: int
    b: int
    c: int
    d: int
    sign: int
    form: str

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be -1 or 1")
        if self.form not in _FORM_RANK:
            raise ValueError(f"unknown form {self.form!r}")

    @property
    def exponent_sum(self) -> int:
        return abs(self.a) + abs(self.b) + abs(self.c) + abs(self.d)


@dataclass(frozen=True)
class ObstructionCertificate:
    """Modulus m with the full multiplicative orbits of p and q mod m
    (exponents >= 1) whose pairwise differences avoid 2 and -2 mod m.

    For bases other than 3 this proves 2 = |p^x - q^y| has no solutions
    with x, y >= 0: exponents >= 1 are blocked mod m, and a zero exponent
    would force the other base to be exactly 3.
    """

    p: int
    q: int
    modulus: int
    p_orbit: Tuple[int, ...]
    q_orbit: Tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "q": str(self.q),
            "modulus": str(self.modulus),
            "p_orbit": [str(r) for r in self.p_orbit],
            "q_orbit": [str(r) for r in self.q_orbit],
        }


def verify_relation(base: "BasePair", rel) -> bool:
    """Exact check that a relation's identity holds for this base pair."""
    p, q = base.p, base.q
    if isinstance(rel, PlainRelation):
        return rel.sign * (p ** rel.x - q ** rel.y) == 2
    if isinstance(rel, ExtendedRelation):
        P, Q = Fraction(p), Fraction(q)
        return P ** rel.a * Q ** rel.b + rel.sign * P ** rel.c * Q ** rel.d == 2
    return False


def find_plain_relation(base: "BasePair", max_exp: int = 64) -> Optional[PlainRelation]:
    """Smallest plain relation, minimizing x + y and then x.

    Exponents range over [1, max_exp]; zero exponents are excluded so the
    relation always mixes both bases.  Returns None when the box is empty
    of solutions.
    """
    if max_exp < 1:
        raise ValueError("max_exp must be at least 1")
    p, q = base.p, base.q
    p_pow = {0: 1}
    q_pow = {0: 1}
    for e in range(1, max_exp + 1):
        p_pow[e] = p_pow[e - 1] * p
        q_pow[e] = q_pow[e - 1] * q
    for total in range(2, 2 * max_exp + 1):
        for x in range(max(1, total - max_exp), min(max_exp, total - 1) + 1):
            y = total - x
            diff = p_pow[x] - q_pow[y]
            if diff == 2:
                return PlainRelation(x, y, 1)
            if diff == -2:
                return PlainRelation(x, y, -1)
    return None


def _exact_log(value: int, b: int) -> Optional[int]:
    # exponent e >= 1 with b^e == value, else None
    if value < b:
        return None
    e = 0
    while value % b == 0:
        value //= b
        e += 1
    return e if value == 1 else None


def find_extended_relation(base: "BasePair", max_exp: int = 64) -> Optional[ExtendedRelation]:
    """Best relation allowing negative exponents.

    Candidates are ranked by total absolute exponent sum, then by form
    (plain before p_inverse before q_inverse), then by field tuple.  The
    inverse-form search solves 2 u^a = s + v^b exactly for s in {1, -1}.
    """
    p, q = base.p, base.q
    candidates = []
    plain = find_plain_relation(base, max_exp)
    if plain is not None:
        if plain.sign == 1:
            candidates.append(ExtendedRelation(plain.x, 0, 0, plain.y, -1, "plain"))
        else:
            candidates.append(ExtendedRelation(0, plain.y, plain.x, 0, -1, "plain"))
    for u, v, form in ((p, q, "p_inverse"), (q, p, "q_inverse")):
        ua = 1
        for a in range(1, max_exp + 1):
            ua *= u
            for s in (1, -1):
                b = _exact_log(2 * ua - s, v)
                if b is None or b > max_exp:
                    continue
                # 2 = s * u^-a + u^-a v^b, positive term first
                if form == "p_inverse":
                    candidates.append(ExtendedRelation(-a, b, -a, 0, s, form))
                else:
                    candidates.append(ExtendedRelation(b, -a, 0, -a, s, form))
    if not candidates:
        return None
    return min(
        candidates,
        key=lambda r: (
            r.exponent_sum,
            _FORM_RANK[r.form],
            (r.a, r.b, r.c, r.d, r.sign),
        ),
    )


def _orbit(g: int, m: int) -> Tuple[int, ...]:
    """Sorted set {g^x mod m : x >= 1}; finite since residues cycle."""
    seen = set()
    r = g % m
    while r not in seen:
        seen.add(r)
        r = (r * g) % m
    return tuple(sorted(seen))


def _orbits_obstruct(p_orbit, q_orbit, m: int) -> bool:
    forbidden = {2 % m, (-2) % m}
    return all((u - v) % m not in forbidden for u in p_orbit for v in q_orbit)


def certificate_at(base: "BasePair", m: int) -> Optional[ObstructionCertificate]:
    """Certificate at a specific modulus, or None if m does not work.

    Base pairs containing 3 never certify: 2 = |3^1 - q^0| is a genuine
    solution, so no modulus can rule everything out.
    """
    if m < 2:
        raise ValueError("modulus must be at least 2")
    p, q = base.p, base.q
    if p == 3 or q == 3:
        return None
    p_orbit = _orbit(p, m)
    q_orbit = _orbit(q, m)
    if _orbits_obstruct(p_orbit, q_orbit, m):
        return ObstructionCertificate(p, q, m, p_orbit, q_orbit)
    return None


def find_obstruction(base: "BasePair", max_modulus: int = 1000) -> Optional[ObstructionCertificate]:
    """First certificate along the scan order p, q, 2, 3, ..., max_modulus.

    The bases themselves come first: reducing mod p collapses the whole
    p-orbit to 0, which is the tidiest certificate when it works and the
    one matching hand calculations.
    """
    p, q = base.p, base.q
    if p == 3 or q == 3:
        return None
    tried = set()
    for m in [p, q] + list(range(2, max_modulus + 1)):
        if m < 2 or m in tried:
            continue
        tried.add(m)
        cert = certificate_at(base, m)
        if cert is not None:
            return cert
    return None
