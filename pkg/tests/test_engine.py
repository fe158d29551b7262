"""Core rewrite engine: representations, the replacement step, reduce,
splitting, and the certified numeric helpers."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from unitsum import (
    BasisMismatch,
    BoundParams,
    EmptySide,
    IterationCapExceeded,
    NotAGap,
    PlainRelation,
    ReductionPolicy,
    Representation,
    TargetTooSmall,
    UnitRelation,
    bounds_f_T,
    evaluate,
    log2_enclosure,
    merge,
    monotone_quantity,
    rational_basis,
    rational_evaluator,
    reduce,
    replacement_step,
    split_at_gap,
    to_unit_relation,
    total_weight,
)
from unitsum.double_base import BasePair

BASE = rational_basis(5, 23)
PAIR = BasePair(5, 23)
REL = to_unit_relation(PlainRelation(2, 1, 1), PAIR)
EVAL = rational_evaluator(PAIR)


def rep_of(coeffs):
    return Representation(BASE, coeffs)


# ---------------------------------------------------------------- basics


def test_basis_shape():
    assert BASE.K == 2
    assert BASE.L == 1
    assert BASE.M == 2


def test_relation_shape():
    assert REL.n == 2
    assert REL.I == 2
    assert REL.r_max == 2


def test_relation_rejects_underdetermined():
    with pytest.raises(ValueError):
        UnitRelation(n=1, terms=((0, (1, 0)), (1, (0, 1))))
    with pytest.raises(ValueError):
        UnitRelation(n=2, terms=((0, (1, 0)),))
    # more terms than n is not a valid replacement
    with pytest.raises(ValueError):
        UnitRelation(n=2, terms=((0, (1, 0)), (0, (0, 1)), (1, (1, 1))))


def test_relation_rejects_mixed_dimensions():
    with pytest.raises(ValueError):
        UnitRelation(n=2, terms=((0, (1, 0)), (1, (0, 1, 0))))


def test_representation_validates_indices():
    with pytest.raises(ValueError):
        rep_of({(2, 1, (0, 0)): 1})  # k out of range
    with pytest.raises(ValueError):
        rep_of({(0, 0, (0, 0)): 1})  # ell out of range
    with pytest.raises(ValueError):
        rep_of({(0, 1, (0,)): 1})  # wrong exponent arity
    with pytest.raises(ValueError):
        rep_of({(0, 1, (0, 0)): -1})


def test_representation_drops_zeros_and_is_readonly():
    r = rep_of({(0, 1, (0, 0)): 1, (0, 1, (1, 0)): 0})
    assert len(r) == 1
    with pytest.raises(TypeError):
        r.coeffs[(0, 1, (0, 0))] = 5


def test_representation_equality_ignores_step_counter():
    a = Representation(BASE, {(0, 1, (0, 0)): 1}, steps=0)
    b = Representation(BASE, {(0, 1, (0, 0)): 1}, steps=7)
    assert a == b
    assert hash(a) == hash(b)


def test_empty_representation_is_zero():
    r = rep_of({})
    assert not r
    assert evaluate(r, EVAL) == 0
    assert total_weight(r) == 0
    assert r.bbox is None


def test_bbox_is_coordinatewise_hull():
    r = rep_of({(0, 1, (0, 5)): 1, (1, 1, (3, -2)): 2})
    assert r.bbox == ((0, 3), (-2, 5))


# ------------------------------------------------------ replacement step


def test_replacement_step_once():
    r = rep_of({(0, 1, (0, 0)): 4})
    out = replacement_step(r, REL, (0, 1, (0, 0)))
    assert dict(out.coeffs) == {
        (0, 1, (0, 0)): 2,
        (0, 1, (2, 0)): 1,
        (1, 1, (0, 1)): 1,
    }
    assert out.steps == 1
    assert evaluate(out, EVAL) == 4


def test_replacement_step_weight_change_is_I_minus_n():
    r = rep_of({(0, 1, (0, 0)): 4})
    out = replacement_step(r, REL, (0, 1, (0, 0)))
    assert total_weight(out) - total_weight(r) == REL.I - REL.n


def test_replacement_step_needs_a_big_enough_coefficient():
    r = rep_of({(0, 1, (0, 0)): 1})
    with pytest.raises(TargetTooSmall):
        replacement_step(r, REL, (0, 1, (0, 0)))
    with pytest.raises(TargetTooSmall):
        replacement_step(r, REL, (0, 1, (9, 9)))


def test_basis_mismatch_is_detected():
    other = rational_basis(3, 5)
    r = Representation(other, {(0, 1, (0, 0)): 4})
    with pytest.raises(BasisMismatch):
        merge(rep_of({(0, 1, (0, 0)): 1}), r)
    # a relation whose terms cannot fit the basis shape is rejected too
    bad = UnitRelation(n=2, terms=((0, (1, 0, 0)), (1, (0, 1, 0))))
    with pytest.raises(BasisMismatch):
        replacement_step(rep_of({(0, 1, (0, 0)): 4}), bad, (0, 1, (0, 0)))
    with pytest.raises(BasisMismatch):
        reduce(rep_of({(0, 1, (0, 0)): 4}), bad)


# ----------------------------------------------------------------- reduce


def test_reduce_of_four():
    """Worked example: 4 units over (5,23) reduce in exactly 5 steps."""
    out = reduce(rep_of({(0, 1, (0, 0)): 4}), REL)
    assert out.steps == 5
    assert dict(out.coeffs) == {
        (0, 1, (4, 0)): 1,
        (1, 1, (4, 1)): 1,
        (0, 1, (2, 2)): 1,
        (0, 1, (0, 2)): 1,
    }
    assert evaluate(out, EVAL) == 4


def test_reduce_bounds_every_coefficient():
    seed = rep_of({(0, 1, (0, 0)): 1000, (1, 1, (1, 1)): 313})
    out = reduce(seed, REL)
    assert all(1 <= a < REL.n for a in out.coeffs.values())
    assert evaluate(out, EVAL) == evaluate(seed, EVAL) == 1000 - 313 * 115


def test_reduce_empty_is_noop():
    out = reduce(rep_of({}), REL)
    assert not out
    assert out.steps == 0


def test_reduce_cancels_opposite_layers_first():
    # 3 - 1 at the same exponent collapses to 2 before any rewriting
    r = rep_of({(0, 1, (0, 0)): 3, (1, 1, (0, 0)): 1})
    out = reduce(r, REL)
    assert evaluate(out, EVAL) == 2
    assert out.steps == 1  # single replacement of the netted 2


def test_reduce_step_cap():
    policy = ReductionPolicy(max_steps=3)
    with pytest.raises(IterationCapExceeded):
        reduce(rep_of({(0, 1, (0, 0)): 1000}), REL, policy)


def test_reduce_step_cap_leaves_input_untouched():
    r = rep_of({(0, 1, (0, 0)): 1000})
    before = dict(r.coeffs)
    with pytest.raises(IterationCapExceeded):
        reduce(r, REL, ReductionPolicy(max_steps=3))
    assert dict(r.coeffs) == before


def test_reduce_on_step_ledger_matches_counter():
    events = []
    policy = ReductionPolicy(on_step=lambda idx, t: events.append((idx, t)))
    out = reduce(rep_of({(0, 1, (0, 0)): 4}), REL, policy)
    assert sum(t for _, t in events) == out.steps == 5
    assert all(t >= 1 for _, t in events)


def test_reduce_far_apart_clusters_agree_with_unsplit_run():
    """Two widely separated clusters trigger the split path; the result
    must be identical to the plain run."""
    seed = {(0, 1, (0, 0)): 9, (0, 1, (900, 0)): 7, (1, 1, (900, 3)): 4}
    fast = reduce(
        rep_of(seed),
        REL,
        ReductionPolicy(split_gaps=True, gap_check_interval=1),
    )
    slow = reduce(rep_of(seed), REL, ReductionPolicy(split_gaps=False))
    assert fast == slow
    assert fast.steps == slow.steps
    assert evaluate(fast, EVAL) == evaluate(rep_of(seed), EVAL)


@given(
    st.dictionaries(
        st.tuples(
            st.integers(0, 1),
            st.just(1),
            st.tuples(st.integers(0, 6), st.integers(0, 6)),
        ),
        st.integers(1, 60),
        max_size=8,
    )
)
def test_reduce_preserves_value_and_bounds_coefficients(coeffs):
    r = rep_of(coeffs)
    out = reduce(r, REL)
    assert evaluate(out, EVAL) == evaluate(r, EVAL)
    assert all(1 <= a < REL.n for a in out.coeffs.values())


@given(
    st.dictionaries(
        st.tuples(
            st.integers(0, 1),
            st.just(1),
            st.tuples(st.integers(0, 5), st.integers(0, 5)),
        ),
        st.integers(1, 40),
        min_size=1,
        max_size=6,
    )
)
def test_reduce_strictly_raises_the_monotone_quantity(coeffs):
    # sign layers at the same exponent net out before any rewriting, and
    # that netting may lower the quantity; rewriting itself only raises it
    netted = {}
    for (k, ell, x), a in coeffs.items():
        netted[(ell, x)] = netted.get((ell, x), 0) + (a if k == 0 else -a)
    start = rep_of(
        {(0 if c > 0 else 1, ell, x): abs(c) for (ell, x), c in netted.items() if c}
    )
    out = reduce(start, REL)
    q0 = monotone_quantity(start)
    q1 = monotone_quantity(out)
    # rational bases give exact point intervals
    assert q0[0] == q0[1] and q1[0] == q1[1]
    if out.steps > 0:
        assert q1[0] > q0[0]
    else:
        assert q1[0] >= q0[0]


# ------------------------------------------------------------ split/merge


GAPPY = {(0, 1, (0, 0)): 1, (0, 1, (1, 3)): 1, (0, 1, (10, 1)): 1}


def test_split_then_merge_round_trips():
    r = rep_of(GAPPY)
    low, high = split_at_gap(r, 1, 1)
    assert dict(low.coeffs) == {(0, 1, (0, 0)): 1, (0, 1, (1, 3)): 1}
    assert dict(high.coeffs) == {(0, 1, (10, 1)): 1}
    back, overlapped = merge(low, high)
    assert not overlapped
    assert back == r


def test_split_honors_gap_width():
    r = rep_of(GAPPY)
    low, high = split_at_gap(r, 1, 1, gap_width=8)
    assert len(low) == 2 and len(high) == 1
    with pytest.raises(NotAGap):
        split_at_gap(r, 1, 1, gap_width=9)


def test_split_rejects_occupied_band():
    with pytest.raises(NotAGap):
        split_at_gap(rep_of(GAPPY), 1, 0)


def test_split_rejects_empty_side():
    with pytest.raises(EmptySide):
        split_at_gap(rep_of(GAPPY), 1, 100)


def test_split_second_coordinate():
    low, high = split_at_gap(rep_of(GAPPY), 2, 1)
    assert dict(high.coeffs) == {(0, 1, (1, 3)): 1}


def test_merge_flags_overlap():
    a = rep_of({(0, 1, (0, 0)): 1})
    b = rep_of({(0, 1, (0, 0)): 2, (0, 1, (1, 0)): 1})
    out, overlapped = merge(a, b)
    assert overlapped
    assert out.coeffs[(0, 1, (0, 0))] == 3


# -------------------------------------------------------- numeric helpers


def test_monotone_quantity_point_values():
    assert monotone_quantity(rep_of({(0, 1, (0, 0)): 2})) == (2, 2)
    two_terms = rep_of({(0, 1, (2, 0)): 1, (1, 1, (0, 1)): 1})
    assert monotone_quantity(two_terms) == (1154, 1154)


def test_monotone_quantity_counts_weight_not_sign():
    # same exponents on opposite layers contribute alike
    a = monotone_quantity(rep_of({(0, 1, (3, 1)): 2}))
    b = monotone_quantity(rep_of({(1, 1, (3, 1)): 2}))
    assert a == b


def test_log2_enclosure_exact_powers():
    lo, hi = log2_enclosure((Fraction(8), Fraction(8)), 32)
    assert lo <= 3 <= hi
    assert hi - lo <= Fraction(1, 2**30)
    lo, hi = log2_enclosure((Fraction(1, 2), Fraction(1, 2)), 32)
    assert lo <= -1 <= hi


def test_log2_enclosure_narrows_with_precision():
    iv = (Fraction(10), Fraction(10))
    w1 = (lambda t: t[1] - t[0])(log2_enclosure(iv, 16))
    w2 = (lambda t: t[1] - t[0])(log2_enclosure(iv, 48))
    assert w2 < w1


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1000))
def test_log2_enclosure_brackets_float_log(x):
    import math

    lo, hi = log2_enclosure((x, x), 40)
    ref = math.log2(x)
    assert float(lo) - 1e-6 <= ref <= float(hi) + 1e-6


# ----------------------------------------------------------------- bounds


def test_bound_base_cases():
    f, T = bounds_f_T(BoundParams(M=2, K=2, L=1, r=2, w=1))
    assert f == 0
    assert T == 2 * 1


def test_bound_recurrence_weight_two():
    f, T = bounds_f_T(BoundParams(M=2, K=2, L=1, r=2, w=2))
    assert T == (2 + 2 * 1 * 0) ** 4 * 2**2 * 1**2 == 64
    assert f == 64 * 2 + 0 == 128


def test_bound_recurrence_chains():
    p3 = BoundParams(M=2, K=2, L=1, r=2, w=3)
    f2, T2 = bounds_f_T(BoundParams(M=2, K=2, L=1, r=2, w=2))
    f3, T3 = bounds_f_T(p3)
    assert T3 == (3 + 2 * 2 * f2) ** 6 * 2**3
    assert f3 == T3 * 2 + f2
