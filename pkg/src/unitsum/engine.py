"""Replacement-step machinery for unit-sum representations.

A representation stores sparse nonnegative coefficients indexed by
(sign layer k, generator index l, exponent vector x); its value is
sum a * zeta^k * eta_l * eps^x, computed exactly by whichever ring
instantiates the basis.  The central rewrite replaces n copies of a
unit with the I units of a fixed relation, and `reduce` iterates that
rewrite until every coefficient is below n.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Mapping, Optional, Tuple

from .errors import (
    BasisMismatch,
    EmptySide,
    IterationCapExceeded,
    NotAGap,
    TargetTooSmall,
)

Interval = Tuple[Fraction, Fraction]
Index = Tuple[int, int, Tuple[int, ...]]

# Exponent coordinates are packed into 42-bit fields during reduction so
# heap keys are plain integers whose numeric order equals the lexicographic
# order on (k, l, x).
_COORD_BITS = 42
_COORD_BASE = 1 << (_COORD_BITS - 1)
_COORD_MASK = (1 << _COORD_BITS) - 1


def log2_enclosure(value: Interval, bits: int) -> Interval:
    """Certified base-2 logarithm of a positive interval.

    The result has width about 2^-bits plus the width of the input.
    """
    lo, hi = value
    if lo <= 0:
        raise ValueError("logarithm requires a certified positive interval")
    return (_log2_point(lo, bits, upper=False), _log2_point(hi, bits, upper=True))


def _log2_point(f: Fraction, bits: int, upper: bool) -> Fraction:
    # One-sided log2 bound by repeated squaring of an integer mantissa.
    if bits < 1:
        raise ValueError("bits must be positive")
    e = 0
    while f >= 2:
        f /= 2
        e += 1
    while f < 1:
        f *= 2
        e -= 1
    guard = 2 * bits + 32
    num, den = f.numerator, f.denominator
    if upper:
        m = -((-num << guard) // den)
    else:
        m = (num << guard) // den
    two = 2 << guard
    acc = 0
    for _ in range(bits):
        m = m * m
        m = -((-m) >> guard) if upper else (m >> guard)
        acc <<= 1
        if m >= two:
            m = -((-m) >> 1) if upper else (m >> 1)
            acc |= 1
    return e + Fraction(acc + (1 if upper else 0), 1 << bits)


@dataclass(frozen=True, eq=False)
class UnitGroupBasis:
    """Ambient data for representations.

    K is the order of the sign root zeta (only zeta = -1, K = 2 is
    supported); etas and epsilons carry the generator and unit values of
    the instantiating ring.  abs_val holds one hook per epsilon mapping a
    bit count to a certified (lo, hi) Fraction enclosure of |eps_m|;
    abs_log holds the matching log2 enclosure hooks and is derived from
    abs_val when not supplied.  Bases compare by identity.
    """

    K: int
    zeta_kind: str
    etas: tuple
    epsilons: tuple
    abs_val: tuple
    abs_log: tuple = ()
    tag: str = ""

    def __post_init__(self):
        if self.zeta_kind != "minus_one" or self.K != 2:
            raise ValueError("only the order-two sign layer (zeta = -1) is supported")
        if not self.etas or not self.epsilons:
            raise ValueError("basis needs at least one eta and one epsilon")
        if len(self.abs_val) != len(self.epsilons):
            raise ValueError("one abs_val hook per epsilon required")
        if not self.abs_log:
            derived = tuple(
                (lambda hook: lambda bits: log2_enclosure(hook(bits + 8), bits))(h)
                for h in self.abs_val
            )
            object.__setattr__(self, "abs_log", derived)

    @property
    def L(self) -> int:
        return len(self.etas)

    @property
    def M(self) -> int:
        return len(self.epsilons)


@dataclass(frozen=True)
class UnitRelation:
    """A verified identity n = sum_i zeta^{k_i} eps^{r_i}.

    terms lists (k_i, r_i) pairs; the instantiating module is responsible
    for checking that the sum really equals n in its ring.
    """

    n: int
    terms: Tuple[Tuple[int, Tuple[int, ...]], ...]

    def __post_init__(self):
        terms = tuple((int(k), tuple(int(c) for c in r)) for k, r in self.terms)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "n", int(self.n))
        if self.n < 2:
            raise ValueError("right-hand side must be at least 2")
        if not (self.n >= self.I >= 2):
            raise ValueError("term count must lie in [2, n]")
        if all(k == 0 and not any(r) for k, r in terms):
            raise ValueError("the all-ones relation is not allowed")
        if len({len(r) for _, r in terms}) != 1:
            raise ValueError("terms must share one exponent dimension")

    @property
    def I(self) -> int:
        return len(self.terms)

    @property
    def r_max(self) -> int:
        """Largest absolute exponent entry; bounds support drift per step."""
        return max(abs(c) for _, r in self.terms for c in r) if self.terms else 0


class Representation:
    """Sparse nonnegative coefficient map over a basis.

    Zero coefficients are never stored.  steps is a bookkeeping counter
    carried along by the rewrite operations; it does not take part in
    equality.
    """

    __slots__ = ("basis", "_coeffs", "steps", "_bbox")

    def __init__(self, basis: UnitGroupBasis, coeffs: Optional[Mapping] = None, steps: int = 0):
        self.basis = basis
        K, L, M = basis.K, basis.L, basis.M
        clean = {}
        for key, a in (coeffs or {}).items():
            k, ell, x = key
            x = tuple(int(c) for c in x)
            if not (0 <= k < K and 1 <= ell <= L and len(x) == M):
                raise ValueError(f"index {key!r} does not fit the basis")
            a = int(a)
            if a < 0:
                raise ValueError("coefficients must be nonnegative")
            if a:
                clean[(int(k), int(ell), x)] = a
        self._coeffs = clean
        self.steps = int(steps)
        self._bbox = None

    @property
    def coeffs(self):
        return MappingProxyType(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    @property
    def bbox(self):
        """Componentwise exponent hull as ((lo, hi), ...); None when empty."""
        if not self._coeffs:
            return None
        if self._bbox is None:
            M = self.basis.M
            cols = [[x[m] for _, _, x in self._coeffs] for m in range(M)]
            self._bbox = tuple((min(col), max(col)) for col in cols)
        return self._bbox

    def __eq__(self, other) -> bool:
        if not isinstance(other, Representation):
            return NotImplemented
        return self.basis is other.basis and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((id(self.basis), frozenset(self._coeffs.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}:{v}" for k, v in sorted(self._coeffs.items()))
        return f"Representation({{{body}}}, steps={self.steps})"


@dataclass(frozen=True)
class BoundParams:
    """Inputs of the theoretical step-count recurrences."""

    M: int
    K: int
    L: int
    r: int
    w: int

    def __post_init__(self):
        if min(self.M, self.K, self.L, self.w) < 1 or self.r < 0:
            raise ValueError("require M, K, L, w >= 1 and r >= 0")


@dataclass(frozen=True)
class ReductionPolicy:
    """Tuning for reduce.

    max_steps caps the total rewrite count (a batched rewrite may overshoot
    the cap by at most one batch before the error fires).  Gap checks run
    every gap_check_interval batches; a support gap wider than
    gap_factor * r_max * weight triggers a split.  on_step, when given,
    receives (index, multiplicity) for every batch of rewrites at a site.
    """

    max_steps: int = 1_000_000
    split_gaps: bool = True
    gap_check_interval: int = 4096
    gap_factor: int = 4
    on_step: Optional[Callable[[Index, int], None]] = None

    def gap_threshold(self, w: int, r_max: int) -> int:
        return self.gap_factor * r_max * max(w, 1)


def total_weight(rep: Representation) -> int:
    """Sum of all stored coefficients."""
    return sum(rep._coeffs.values())


def _check_relation(basis: UnitGroupBasis, rel: UnitRelation) -> None:
    for k, r in rel.terms:
        if not (0 <= k < basis.K) or len(r) != basis.M:
            raise BasisMismatch("relation terms do not fit the basis")


def replacement_step(rep: Representation, rel: UnitRelation, target) -> Representation:
    """Apply one rewrite at target: coefficient drops by n, each relation
    term gains 1 at its shifted index.  Value is preserved exactly; total
    weight changes by I - n."""
    _check_relation(rep.basis, rel)
    k, ell, x = target
    target = (k, ell, tuple(x))
    have = rep._coeffs.get(target, 0)
    if have < rel.n:
        raise TargetTooSmall(f"coefficient {have} at {target} is below n = {rel.n}")
    out = dict(rep._coeffs)
    if have == rel.n:
        del out[target]
    else:
        out[target] = have - rel.n
    K = rep.basis.K
    for ki, r in rel.terms:
        nk = ((k + ki) % K, ell, tuple(a + b for a, b in zip(target[2], r)))
        out[nk] = out.get(nk, 0) + 1
    return Representation(rep.basis, out, steps=rep.steps + 1)


def monotone_quantity(rep: Representation, precision_bits: int = 64) -> Interval:
    """Certified enclosure of sum a * prod |eps_m|^(2 x_m).

    Exact (zero-width) whenever the abs_val hooks return point intervals,
    as they do for integer bases.  Strictly increases under every rewrite
    drawn from a valid relation.
    """
    basis = rep.basis
    abs_ivs = [basis.abs_val[m](precision_bits) for m in range(basis.M)]
    for lo, hi in abs_ivs:
        if lo <= 0:
            raise ValueError("abs_val hooks must certify positivity")
    cache = {}

    def coord_pow(m: int, e: int) -> Interval:
        got = cache.get((m, e))
        if got is None:
            lo, hi = abs_ivs[m]
            if e >= 0:
                got = (lo ** e, hi ** e)
            else:
                got = (1 / hi ** (-e), 1 / lo ** (-e))
            cache[(m, e)] = got
        return got

    lo_total = Fraction(0)
    hi_total = Fraction(0)
    for (k, ell, x), a in rep._coeffs.items():
        flo = Fraction(1)
        fhi = Fraction(1)
        for m, e in enumerate(x):
            plo, phi = coord_pow(m, 2 * e)
            flo *= plo
            fhi *= phi
        lo_total += a * flo
        hi_total += a * fhi
    return (lo_total, hi_total)


def split_at_gap(rep: Representation, coord: int, cut: int, gap_width: int = 1):
    """Split at coordinate coord (1-based): left keeps x_coord <= cut.

    The band (cut, cut + gap_width] must be free of support; both sides
    must be nonempty.
    """
    if not (1 <= coord <= rep.basis.M):
        raise ValueError(f"coord must lie in [1, {rep.basis.M}]")
    if gap_width < 1:
        raise ValueError("gap_width must be at least 1")
    m = coord - 1
    left, right = {}, {}
    for key, a in rep._coeffs.items():
        xm = key[2][m]
        if cut < xm <= cut + gap_width:
            raise NotAGap(f"support point {key} lies in the excluded band")
        (left if xm <= cut else right)[key] = a
    if not left or not right:
        raise EmptySide("both sides of a split must carry support")
    return (Representation(rep.basis, left), Representation(rep.basis, right))


def merge(rep1: Representation, rep2: Representation):
    """Coefficientwise sum.  Returns (merged, overlapped); overlapped is
    True when the supports intersected, in which case callers may want to
    re-run reduce."""
    if rep1.basis is not rep2.basis:
        raise BasisMismatch("cannot merge representations over different bases")
    out = dict(rep1._coeffs)
    overlapped = False
    for key, a in rep2._coeffs.items():
        if key in out:
            overlapped = True
            out[key] += a
        else:
            out[key] = a
    return (Representation(rep1.basis, out, steps=rep1.steps + rep2.steps), overlapped)


def evaluate(rep: Representation, evaluator):
    """Exact value of the representation.

    evaluator(k, ell, x) must return the ring element zeta^k * eta_ell *
    eps^x; terms are accumulated in sorted index order.  The empty
    representation evaluates to 0.
    """
    total = None
    for key in sorted(rep._coeffs):
        k, ell, x = key
        term = evaluator(k, ell, x) * rep._coeffs[key]
        total = term if total is None else total + term
    return 0 if total is None else total


def bounds_f_T(params: BoundParams):
    """Exact values (f(w), T(w)) of the theoretical recurrences.

    f(1) = 0 and T(1) = K*L; for larger w,
    T(w) = (w + 2(w-1) f(w-1))^(M w) * K^w * L^w and
    f(w) = T(w) r + f(w-1).  Documentary only; reduce never consults these
    (they explode well before w = 10).
    """
    f = 0
    T = params.K * params.L
    for w in range(2, params.w + 1):
        T = (w + 2 * (w - 1) * f) ** (params.M * w) * params.K ** w * params.L ** w
        f = T * params.r + f
    return (f, T)


def _normalized(coeffs: dict, basis: UnitGroupBasis) -> dict:
    # Opposite sign layers at the same (l, x) cancel exactly.
    out = dict(coeffs)
    for key in [key for key in out if key[0] == 0]:
        _, ell, x = key
        mate = (1, ell, x)
        a = out.get(key, 0)
        b = out.get(mate, 0)
        if a and b:
            c = min(a, b)
            if a > c:
                out[key] = a - c
            else:
                out.pop(key, None)
            if b > c:
                out[mate] = b - c
            else:
                out.pop(mate, None)
    return out


class _StepCounter:
    __slots__ = ("steps",)

    def __init__(self):
        self.steps = 0


def reduce(rep: Representation, rel: UnitRelation, policy: Optional[ReductionPolicy] = None) -> Representation:
    """Rewrite until every coefficient lies in [1, n-1].

    Targets are processed in lexicographic (k, l, x) order with batching;
    the stabilization is order-independent, so the final state and the
    total step count match one-at-a-time lexicographic targeting.  Wide
    support gaps are split off, reduced independently and merged back
    (coinciding indices summed, reduction resumed).  The output carries
    the total rewrite count in .steps.  Raises IterationCapExceeded, with
    no partial result, if policy.max_steps is hit.
    """
    policy = policy or ReductionPolicy()
    _check_relation(rep.basis, rel)
    coeffs = _normalized(rep._coeffs, rep.basis)
    counter = _StepCounter()
    out = _stabilize(coeffs, rep.basis, rel, policy, counter)
    return Representation(rep.basis, out, steps=counter.steps)


def _stabilize(coeffs: dict, basis: UnitGroupBasis, rel: UnitRelation, policy: ReductionPolicy, counter: _StepCounter) -> dict:
    if not coeffs:
        return {}
    n = rel.n
    K, L, M = basis.K, basis.L, basis.M
    shift = _COORD_BITS * M
    xmask = (1 << shift) - 1
    span = _COORD_BASE - max(1, rel.r_max) * (policy.max_steps + 1)
    if span <= 0 or any(abs(c) >= span for _, _, x in coeffs for c in x):
        raise ValueError("exponents too large for the packed reduction")

    def pack(key) -> int:
        k, ell, x = key
        p = k * L + (ell - 1)
        for c in x:
            p = (p << _COORD_BITS) | (c + _COORD_BASE)
        return p

    def unpack(p: int) -> Index:
        xs = []
        for _ in range(M):
            xs.append((p & _COORD_MASK) - _COORD_BASE)
            p >>= _COORD_BITS
        k, rem = divmod(p, L)
        return (k, rem + 1, tuple(reversed(xs)))

    packed_terms = []
    for ki, r in rel.terms:
        d = 0
        for c in r:
            d = (d << _COORD_BITS) + c
        packed_terms.append((ki, d))

    on_step = policy.on_step
    interval = max(1, policy.gap_check_interval)
    dI = rel.I - n

    def find_cut(pdict: dict, weight: int):
        th = policy.gap_threshold(weight, rel.r_max)
        for m in range(M):
            off = _COORD_BITS * (M - 1 - m)
            vals = {(key >> off) & _COORD_MASK for key in pdict}
            if max(vals) - min(vals) <= th:
                continue
            ordered = sorted(vals)
            for a, b in zip(ordered, ordered[1:]):
                if b - a > th:
                    return (m, a - _COORD_BASE)
        return None

    def loop(pdict: dict) -> dict:
        weight = sum(pdict.values())
        heap = [key for key, c in pdict.items() if c >= n]
        heapq.heapify(heap)
        batches = 0
        while heap:
            key = heapq.heappop(heap)
            c = pdict.get(key, 0)
            if c < n:
                continue
            t = c // n
            rem = c - n * t
            if rem:
                pdict[key] = rem
            else:
                del pdict[key]
            counter.steps += t
            if counter.steps > policy.max_steps:
                raise IterationCapExceeded(
                    f"reduction exceeded {policy.max_steps} replacement steps"
                )
            weight += t * dI
            if on_step is not None:
                on_step(unpack(key), t)
            top = key >> shift
            xpart = key & xmask
            if L == 1:
                for ki, d in packed_terms:
                    nk = (((top + ki) % K) << shift) | (xpart + d)
                    old = pdict.get(nk, 0)
                    nv = old + t
                    pdict[nk] = nv
                    if old < n <= nv:
                        heapq.heappush(heap, nk)
            else:
                k0, rem0 = divmod(top, L)
                ntop_base = rem0
                for ki, d in packed_terms:
                    nk = ((((k0 + ki) % K) * L + ntop_base) << shift) | (xpart + d)
                    old = pdict.get(nk, 0)
                    nv = old + t
                    pdict[nk] = nv
                    if old < n <= nv:
                        heapq.heappush(heap, nk)
            batches += 1
            if policy.split_gaps and batches % interval == 0 and len(pdict) > 1:
                cut = find_cut(pdict, weight)
                if cut is not None:
                    m, cval = cut
                    off = _COORD_BITS * (M - 1 - m)
                    bound = cval + _COORD_BASE
                    left, right = {}, {}
                    for pk, a in pdict.items():
                        (left if ((pk >> off) & _COORD_MASK) <= bound else right)[pk] = a
                    left = loop(left)
                    right = loop(right)
                    for pk, a in right.items():
                        left[pk] = left.get(pk, 0) + a
                    pdict = left
                    heap = [pk for pk, cc in pdict.items() if cc >= n]
                    heapq.heapify(heap)
        return pdict

    done = loop({pack(key): a for key, a in coeffs.items()})
    return {unpack(p): a for p, a in done.items()}
