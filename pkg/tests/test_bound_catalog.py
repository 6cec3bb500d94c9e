from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from foliage.bound_catalog import (
    AUXILIARY,
    CATALOG,
    ImageData,
    InvariantRecord,
    MapKind,
    Surd,
    castelnuovo_bound,
    clifford_check,
    clifford_status,
    compare,
    evaluate_bounds,
    minimal_degree_check,
)
from foliage.errors import InputError

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=9)
CATALOG_REL = {b.id: b.relation for b in CATALOG}


def birational(vol, pg, cls="unknown", flags=(), image=None):
    return InvariantRecord(vol, pg, MapKind("generically_finite", deg_phi=1), cls, frozenset(flags), image=image)


def test_canonical_degree_equality_on_base_change_example():
    rec = InvariantRecord(10, 7, MapKind("generically_finite", deg_phi=2))
    r = evaluate_bounds(rec).get("canonical_degree")
    assert r.status == "equality"
    assert r.lhs == 2 and r.rhs == Surd(2)
    assert r.note


def test_k3_double_plane_equality():
    r = evaluate_bounds(birational(18, 11, "k3")).get("birational_not_ruled")
    assert (r.lhs, r.rhs.a, r.status) == (18, 16 + 2, "equality")


def test_general_type_cover_equality_with_radical():
    rec = birational(81, 39, "general_type", {"is_12_surface"})
    r = evaluate_bounds(rec).get("birational_general_type_not_10")
    # 74 + (sqrt(289) - 3)/2 = 81
    assert r.rhs == Surd(81)
    assert r.status == "equality"


def test_irrational_right_hand_side_strict():
    rec = birational(80, 38, "general_type")
    r = evaluate_bounds(rec).get("birational_general_type_not_10")
    assert not r.rhs.is_rational
    assert r.status == "holds"
    assert r.to_json()["rhs"] == {"a": "141/2", "b": "1/2", "radicand": 281}


def test_noether_bound_on_trivial_record():
    r = evaluate_bounds(InvariantRecord(1, 2)).get("noether")
    assert r.status == "holds" and r.lhs == 1 and r.rhs == Surd(0)


def test_noether_equality_note_only_on_equality():
    eq = evaluate_bounds(InvariantRecord(1, 3)).get("noether")
    strict = evaluate_bounds(InvariantRecord(2, 3)).get("noether")
    assert eq.status == "equality" and eq.note
    assert strict.note is None


def test_same_fibration_genus_two_slope():
    mk = MapKind("fibration", d=2, g_F=2, g_B=0)
    r = evaluate_bounds(InvariantRecord(8, 4, mk)).get("fibration_same_foliation")
    assert r.rhs == Surd(Fraction(8, 3) * 3)
    assert r.status == "equality"
    assert evaluate_bounds(InvariantRecord(7, 4, mk)).get("fibration_same_foliation").status == "violated"


def test_negative_radicand_not_applicable():
    r = evaluate_bounds(birational(2, 3, "general_type")).get("birational_general_type")
    assert not r.applicable and r.note == "radicand negative"


def test_integrable_bound_needs_integrable_reduced_not_ruled():
    base = dict(vol=4, pg=4, surface_class="general_type")
    assert evaluate_bounds(InvariantRecord(**base, integrable=True)).get("integrable_not_ruled").applicable
    assert not evaluate_bounds(InvariantRecord(**base, integrable=False)).get("integrable_not_ruled").applicable
    assert not evaluate_bounds(InvariantRecord(**base, integrable=True, reduced=False)).get(
        "integrable_not_ruled"
    ).applicable


def test_catalog_ids_unique():
    ids = [b.id for b in CATALOG + AUXILIARY]
    assert len(ids) == len(set(ids))
    assert len(CATALOG) == 19


def test_auxiliary_included_on_request():
    rec = birational(81, 39, "general_type", image=ImageData(81, 38, "general_type"))
    plain = evaluate_bounds(rec)
    full = evaluate_bounds(rec, include_auxiliary=True)
    assert len(full.results) == len(plain.results) + len(AUXILIARY)
    assert full.get("image_general_type_not_10_scaled").status == "equality"


@pytest.mark.parametrize(
    "kw",
    [
        dict(vol=0, pg=3),
        dict(vol=1, pg=-1),
        dict(vol=1, pg=2, surface_class="elliptic"),
        dict(vol=1, pg=2, special_flags={"is_99_surface"}),
        dict(vol=1, pg=2, map_kind=MapKind("generically_finite", deg_phi=1)),
        dict(vol=1, pg=1, map_kind=MapKind("fibration", d=1, g_F=2, g_B=3)),
    ],
)
def test_inconsistent_records_rejected(kw):
    with pytest.raises(InputError):
        InvariantRecord(**kw)


def test_record_json_roundtrip():
    rec = birational(Fraction(81), 39, "general_type", {"is_12_surface"}, ImageData(81, 38, "general_type"))
    assert InvariantRecord.from_json(rec.to_json()) == rec


def test_castelnuovo_examples():
    assert castelnuovo_bound(6, 4) == 4
    assert castelnuovo_bound(4, 5) == 0
    assert castelnuovo_bound(8, 5) == 5
    with pytest.raises(InputError):
        castelnuovo_bound(3, 2)


def test_clifford():
    for N in range(2, 9):
        assert clifford_check(2 * (N - 1), N)
        assert clifford_status(2 * (N - 1), N) == "equality"
    assert clifford_status(3, 3) == "violated"


def test_minimal_degree_check():
    assert minimal_degree_check(4, 5)["status"] == "minimal_degree"
    k3 = minimal_degree_check(8, 5)
    assert k3["k3_threshold"] and k3["status"] == "holds"
    assert minimal_degree_check(1, 3)["status"] == "violated"
    # (1,2)-surface image: degree 81 in P^38
    assert minimal_degree_check(81, 38)["general_type"]["status"] == "equality"
    with pytest.raises(InputError):
        minimal_degree_check(1, 2)


@given(fracs, fracs, fracs, st.integers(0, 200))
def test_surd_comparison_matches_sympy(q, a, b, n):
    s = Surd(a, b, n)
    exact = sympy.Rational(a.numerator, a.denominator) + sympy.Rational(b.numerator, b.denominator) * sympy.sqrt(n)
    diff = sympy.Rational(q.numerator, q.denominator) - exact
    expected = 0 if diff == 0 else (1 if diff > 0 else -1)
    assert compare(q, s) == expected


@given(st.integers(0, 30), fracs, fracs)
def test_perfect_square_radicand_folds(k, a, b):
    s = Surd(a, b, k * k)
    assert s.is_rational
    assert s == Surd(a + b * k)


@given(st.integers(3, 60), st.fractions(min_value=1, max_value=200, max_denominator=6), st.fractions(0, 50, max_denominator=6))
def test_lower_bounds_monotone_in_vol(pg, vol, extra):
    kinds = [
        (MapKind("generically_finite", deg_phi=1), "general_type"),
        (MapKind("generically_finite", deg_phi=2), "k3"),
        (MapKind("fibration", d=2, g_F=2, g_B=0), "unknown"),
        (MapKind("fibration", d=1, g_F=2, g_B=2, fiber_h0_one=True), "general_type"),
    ]
    order = {"violated": 0, "equality": 1, "holds": 2}
    for mk, cls in kinds:
        lo = evaluate_bounds(InvariantRecord(vol, pg, mk, cls, integrable=True))
        hi = evaluate_bounds(InvariantRecord(vol + extra, pg, mk, cls, integrable=True))
        for r1, r2 in zip(lo.results, hi.results):
            if r1.applicable and r1.lhs is not None and CATALOG_REL[r1.bound_id] == ">=":
                assert order[r2.status] >= order[r1.status]

