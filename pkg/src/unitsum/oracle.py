"""Brute-force ground truth at desk scale.

min_weight_bruteforce finds a provably minimal-weight expansion inside a
declared exponent box by iterative deepening; sweep_verify runs the
expansion pipeline over a range and independently rechecks every
property the converter promises.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .double_base import (
    BasePair,
    SignedExpansion,
    evaluate_expansion,
    expand_with_stats,
    weight,
)
from .errors import BudgetExceeded, VerificationFailed


@dataclass(frozen=True)
class WeightWitness:
    """A minimal expansion: no strictly lighter one exists in the box."""

    weight: int
    expansion: SignedExpansion


def _ceil_log(v: int, b: int) -> int:
    e = 0
    t = 1
    while t < v:
        t *= b
        e += 1
    return e


def default_box(v: int, base: BasePair) -> Tuple[int, int]:
    """Exponent box (I_max, J_max) sized a little past |v| in each base."""
    v = abs(v)
    if v < 2:
        return (2, 2)
    return (_ceil_log(v, base.p) + 2, _ceil_log(v, base.q) + 2)


class _Budget:
    __slots__ = ("left",)

    def __init__(self, nodes: int):
        self.left = nodes

    def spend(self, amount: int = 1):
        self.left -= amount
        if self.left < 0:
            raise BudgetExceeded("brute-force node budget exhausted")


def _dfs(target: int, slots, idx: int, left: int, chosen: list, budget: _Budget) -> bool:
    if left == 0:
        return target == 0
    for k in range(idx, len(slots) - left + 1):
        m, i, j = slots[k]
        # slots are sorted by decreasing magnitude, so once even `left`
        # copies of the current magnitude cannot reach the target, no
        # later slot can either
        if abs(target) > left * m:
            return False
        budget.spend()
        for s in (1, -1):
            chosen.append((s, i, j))
            if _dfs(target - s * m, slots, k + 1, left - 1, chosen, budget):
                return True
            chosen.pop()
    return False


def _meet_in_middle(target: int, slots, t: int, budget: _Budget) -> Optional[List[Tuple[int, int, int]]]:
    half = len(slots) // 2
    first, second = slots[:half], slots[half:]
    for ta in range(max(0, t - len(second)), min(t, len(first)) + 1):
        tb = t - ta
        table = {}
        for combo in itertools.combinations(range(len(first)), ta):
            for signs in itertools.product((1, -1), repeat=ta):
                budget.spend()
                s = sum(sg * first[k][0] for sg, k in zip(signs, combo))
                if s not in table:
                    table[s] = [(sg, first[k][1], first[k][2]) for sg, k in zip(signs, combo)]
        for combo in itertools.combinations(range(len(second)), tb):
            for signs in itertools.product((1, -1), repeat=tb):
                budget.spend()
                s = sum(sg * second[k][0] for sg, k in zip(signs, combo))
                hit = table.get(target - s)
                if hit is not None:
                    return hit + [
                        (sg, second[k][1], second[k][2]) for sg, k in zip(signs, combo)
                    ]
    return None


def min_weight_bruteforce(
    v: int,
    base: BasePair,
    max_weight: int,
    exp_box: Optional[Tuple[int, int]] = None,
    node_budget: int = 20_000_000,
) -> Optional[WeightWitness]:
    """Lightest expansion of v using exponents i <= I_max, j <= J_max.

    Iterative deepening over the weight makes the first hit minimal
    within the box.  Direct search handles weights up to 4; beyond that
    the subset sums of two slot halves meet in the middle.  Returns None
    when no expansion of weight <= max_weight fits in the box; raises
    BudgetExceeded when the node budget runs out first.
    """
    i_max, j_max = exp_box if exp_box is not None else default_box(v, base)
    slots = [
        (base.p ** i * base.q ** j, i, j)
        for i in range(i_max + 1)
        for j in range(j_max + 1)
    ]
    slots.sort(key=lambda s: (-s[0], s[1], s[2]))
    budget = _Budget(node_budget)
    for t in range(max_weight + 1):
        terms: Optional[List[Tuple[int, int, int]]]
        if t == 0:
            terms = [] if v == 0 else None
        elif t <= 4:
            chosen: list = []
            terms = chosen if _dfs(v, slots, 0, t, chosen, budget) else None
        else:
            terms = _meet_in_middle(v, slots, t, budget)
        if terms is not None:
            expansion = SignedExpansion(base, terms)
            if evaluate_expansion(expansion) != v:
                raise VerificationFailed(f"oracle witness for {v} does not evaluate back")
            return WeightWitness(t, expansion)
    return None


@dataclass(frozen=True)
class SweepReport:
    """Outcome of a verification sweep; rows feed the CSV interface."""

    lo: int
    hi: int
    base: BasePair
    count: int
    max_steps: int
    max_weight: int
    rows: Tuple[tuple, ...]

    CSV_HEADER = "v,status,weight_algo,weight_oracle,steps,w_init"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for row in self.rows:
            lines.append(",".join(str(c) for c in row))
        return "\n".join(lines) + "\n"


def sweep_verify(
    lo: int,
    hi: int,
    base: BasePair,
    search_bound: int = 64,
    oracle_max_weight: Optional[int] = None,
) -> SweepReport:
    """Expand every v in [lo, hi] and recheck all promised properties.

    For each value: digits lie in {-1,1} at distinct exponent pairs (the
    expansion type enforces this on construction), the expansion
    evaluates back to v exactly, and the rewrite count stays within
    (w^2 - w) / 2 for w the seeded digit sum.  With oracle_max_weight
    set, the brute-force witness is computed as well and must not beat
    the converter silently: witness weight <= converter weight and the
    witness must evaluate to v.  The first failure aborts with the
    offending v in the error message.
    """
    rows = []
    max_steps = 0
    max_w = 0
    for v in range(lo, hi + 1):
        stats = expand_with_stats(v, base, search_bound)
        exp = stats.expansion
        if evaluate_expansion(exp) != v:
            raise VerificationFailed(f"round trip failed at v = {v}")
        bound = (stats.w_init * stats.w_init - stats.w_init) // 2
        if stats.steps > bound:
            raise VerificationFailed(
                f"step count {stats.steps} exceeds bound {bound} at v = {v}"
            )
        w_oracle: object = ""
        if oracle_max_weight is not None:
            witness = min_weight_bruteforce(v, base, oracle_max_weight)
            if witness is None:
                raise VerificationFailed(f"oracle found no expansion for v = {v}")
            if witness.weight > weight(exp):
                raise VerificationFailed(
                    f"oracle witness heavier than converter output at v = {v}"
                )
            w_oracle = witness.weight
        rows.append((v, "ok", weight(exp), w_oracle, stats.steps, stats.w_init))
        max_steps = max(max_steps, stats.steps)
        max_w = max(max_w, weight(exp))
    return SweepReport(lo, hi, base, len(rows), max_steps, max_w, tuple(rows))
