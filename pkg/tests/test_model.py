"""Status lattice and restriction algebra."""

import itertools

import pytest
from hypothesis import given, strategies as st

from svsp.model import (
    BaseKind,
    Bound,
    KindMismatch,
    NumericRange,
    Status,
    StringLength,
    UNRESTRICTED,
    normalize_int_range,
    restriction_admits,
    restriction_contains,
    restriction_is_empty,
    restriction_text,
    status_at_least,
)

WINDOW = range(-50, 51)


def admitted_ints(r):
    """Independent membership oracle over the test window."""
    return {v for v in WINDOW if restriction_admits(r, v)}


# --- status lattice ---------------------------------------------------------


def test_status_order_examples():
    assert status_at_least(Status.KNOWN, Status.DEFINED)
    assert not status_at_least(Status.ALLOCATED, Status.DEFINED)
    assert status_at_least(Status.UNALLOCATED, Status.UNALLOCATED)


def test_status_antisymmetry_and_transitivity():
    statuses = list(Status)
    for a, b in itertools.product(statuses, repeat=2):
        both = status_at_least(a, b) and status_at_least(b, a)
        assert both == (a == b)
    for a, b, c in itertools.product(statuses, repeat=3):
        if status_at_least(a, b) and status_at_least(b, c):
            assert status_at_least(a, c)


def test_status_chain():
    assert Status.UNALLOCATED < Status.ALLOCATED < Status.DEFINED < Status.KNOWN


# --- admits -----------------------------------------------------------------


def test_admits_inclusive_upper():
    r = NumericRange(Bound(0), Bound(10))
    assert restriction_admits(r, 10)


def test_admits_strict_bound_excludes_endpoint():
    r = NumericRange(lower=Bound(0, inclusive=False))
    assert not restriction_admits(r, 0)
    assert restriction_admits(r, 1)


def test_admits_string_length():
    r = StringLength(max=8)
    assert restriction_admits(r, "station1")
    assert not restriction_admits(r, "station001")


def test_admits_kind_mismatch_raises():
    with pytest.raises(KindMismatch):
        restriction_admits(NumericRange(Bound(0), None), "abc")
    with pytest.raises(KindMismatch):
        restriction_admits(StringLength(0, 5), 3)


def test_unrestricted_admits_everything():
    for v in (0, -3, 2.5, "hello", ""):
        assert restriction_admits(UNRESTRICTED, v)


# --- containment ------------------------------------------------------------


def test_contains_interval():
    outer = NumericRange(Bound(0), Bound(10))
    inner = NumericRange(Bound(2), Bound(5))
    assert restriction_contains(outer, inner, BaseKind.INT)
    assert restriction_contains(outer, inner, BaseKind.REAL)


def test_strict_outer_does_not_contain_inclusive_inner():
    outer = NumericRange(lower=Bound(0, inclusive=False))
    inner = NumericRange(lower=Bound(0, inclusive=True))
    assert not restriction_contains(outer, inner, BaseKind.REAL)
    # over the integers 0 is also admitted only by the inner range
    assert not restriction_contains(outer, inner, BaseKind.INT)


def test_int_strict_bound_matches_brute_force():
    # oracle: memberships over -50..50 agree, so containment must hold
    outer = NumericRange(lower=Bound(4, inclusive=True))
    inner = NumericRange(lower=Bound(3, inclusive=False))
    assert admitted_ints(inner) <= admitted_ints(outer)
    assert restriction_contains(outer, inner, BaseKind.INT) is True
    # the same pair over the reals is a proper miss (3.5 is inside only inner)
    assert restriction_contains(outer, inner, BaseKind.REAL) is False


def test_string_length_containment():
    assert restriction_contains(StringLength(0, 10), StringLength(2, 8), BaseKind.STRING)
    assert not restriction_contains(StringLength(2, 8), StringLength(0, 8), BaseKind.STRING)
    assert restriction_contains(StringLength(0, None), StringLength(5, 5), BaseKind.STRING)


def test_unrestricted_containment():
    r = NumericRange(Bound(0), Bound(1))
    assert restriction_contains(UNRESTRICTED, r, BaseKind.REAL)
    assert not restriction_contains(r, UNRESTRICTED, BaseKind.REAL)
    # a bound-free range is an equivalent full range
    assert restriction_contains(NumericRange(), UNRESTRICTED, BaseKind.REAL)
    assert restriction_contains(StringLength(0, None), UNRESTRICTED, BaseKind.STRING)


def test_contains_variant_mismatch_raises():
    with pytest.raises(KindMismatch):
        restriction_contains(NumericRange(), StringLength(), BaseKind.INT)
    with pytest.raises(KindMismatch):
        restriction_contains(NumericRange(), NumericRange(), BaseKind.STRING)


def test_empty_inner_contained_everywhere():
    empty = NumericRange(Bound(5), Bound(4))
    assert restriction_is_empty(empty, BaseKind.INT)
    assert restriction_contains(NumericRange(Bound(0), Bound(1)), empty, BaseKind.INT)


# --- point-restriction agreement and partial order --------------------------

bounds = st.one_of(st.none(), st.builds(Bound, st.integers(-20, 20), st.booleans()))
int_ranges = st.builds(NumericRange, bounds, bounds)


@given(int_ranges, st.integers(-30, 30))
def test_point_restriction_agrees_with_admits(r, v):
    point = NumericRange(Bound(v), Bound(v))
    assert restriction_contains(r, point, BaseKind.INT) == restriction_admits(r, v)


@given(int_ranges)
def test_contains_reflexive(r):
    assert restriction_contains(r, r, BaseKind.INT)
    assert restriction_contains(r, r, BaseKind.REAL)


@given(int_ranges, int_ranges, int_ranges)
def test_contains_transitive(a, b, c):
    if restriction_contains(a, b, BaseKind.INT) and restriction_contains(b, c, BaseKind.INT):
        assert restriction_contains(a, c, BaseKind.INT)


@given(int_ranges, int_ranges)
def test_contains_agrees_with_membership_window(outer, inner):
    # bounds live in -20..20, so any disagreement is visible in -50..50
    expected = admitted_ints(inner) <= admitted_ints(outer)
    assert restriction_contains(outer, inner, BaseKind.INT) == expected


@given(int_ranges)
def test_int_normalization_inclusive_and_set_preserving(r):
    n = normalize_int_range(r)
    assert n.lower is None or n.lower.inclusive
    assert n.upper is None or n.upper.inclusive
    assert admitted_ints(n) == admitted_ints(r)


def test_fractional_bounds_normalize_inward():
    r = NumericRange(Bound(3.5, inclusive=False), Bound(7.5, inclusive=True))
    n = normalize_int_range(r)
    assert (n.lower.value, n.upper.value) == (4, 7)
    assert admitted_ints(n) == admitted_ints(r)


# --- canonical text ---------------------------------------------------------


def test_restriction_text():
    assert restriction_text(NumericRange(Bound(0.0), None)) == "value >= 0.0"
    assert restriction_text(NumericRange(Bound(1), Bound(8))) == "1 <= value <= 8"
    assert restriction_text(NumericRange(Bound(0, False), Bound(1.5))) == "0 < value <= 1.5"
    assert restriction_text(StringLength(1, 16)) == "length >= 1, length <= 16"
    assert restriction_text(StringLength(0, 32)) == "length <= 32"
    assert restriction_text(UNRESTRICTED) == "unrestricted"
