from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from foliage.errors import InputError
from foliage.surface_lattice import (
    BundledClass,
    DivClass,
    SurfaceLattice,
    abstract_surface,
    arithmetic_genus,
    blow_up,
    chi_of_class,
    finite_cover,
    h0_closed_form,
    hirzebruch,
    intersect,
    make_surface,
    product_ruled,
    projective_plane,
)

coef = st.integers(-7, 7)
surfaces = st.one_of(
    st.just(projective_plane()),
    st.integers(0, 4).map(hirzebruch),
    st.integers(0, 4).map(product_ruled),
)


@st.composite
def classes_on(draw, L, n=1):
    return [DivClass([draw(coef) for _ in range(L.rank)], L) for _ in range(n)]


def test_canonical_squares():
    assert hirzebruch(2).canonical.square() == 8
    for b in range(5):
        assert product_ruled(b).canonical.square() == 8 - 8 * b
    assert projective_plane().canonical.square() == 9
    assert blow_up(projective_plane(), 1).canonical.square() == 8


def test_make_surface_dispatch():
    assert make_surface("hirzebruch", 3).gram == hirzebruch(3).gram
    with pytest.raises(InputError):
        make_surface("torus")
    with pytest.raises(InputError):
        abstract_surface(["a", "b"], [[0, 1], [2, 0]], [0, 0], 1)


def test_basic_pairings():
    L = hirzebruch(1)
    assert intersect(L.make(C0=1, G=1), L.cls("G")) == 1
    # g=2, n=1 pieces of the fibred example: (C0 + 3/2 G)^2 = 2
    assert L.make(C0=1, G=Fraction(3, 2)).square() == 2
    for m in range(1, 5):
        Y = product_ruled(3)
        assert Y.make(A=2 * m, Bf=1).square() == 4 * m


def test_lattice_mismatch_rejected():
    with pytest.raises(InputError):
        hirzebruch(1).cls("G").dot(hirzebruch(2).cls("G"))


def test_blow_up_zero_is_identity():
    F0 = hirzebruch(0)
    assert blow_up(F0, 0) is F0


def test_bundled_blow_up_keeps_aggregate():
    L = blow_up(projective_plane(), 5, bundled=True)
    E = L.cls("E[5]")
    assert E.square() == -5
    assert L.canonical.square() == 4
    b = BundledClass(E, 5)
    assert b.unit_square() == -1
    assert b.unit_dot(L.canonical) == -1


def test_k3_double_plane():
    P2 = projective_plane()
    S = finite_cover(P2, 2, P2.make(H=3))
    assert S.canonical.is_zero()
    assert S.chi == 2


def test_hirzebruch_double_cover_chi():
    F2 = hirzebruch(2)
    S = finite_cover(F2, 2, F2.make(C0=3, G=5))
    assert S.chi == 3


def test_cover_rejects_degree_one():
    P2 = projective_plane()
    with pytest.raises(InputError):
        finite_cover(P2, 1, P2.make(H=1))


def test_chi_examples():
    L = abstract_surface(["E", "F"], [[-1, 1], [1, 0]], [2, 1], 3)
    for d, expected in [(2, 39), (3, 58), (4, 81)]:
        D = L.make(E=2 * d + 5, F=2 * d + 5)
        assert chi_of_class(L, D) == expected == 2 * d * d + 9 * d + 13
    assert chi_of_class(L, L.zero()) == 3
    P2 = projective_plane()
    assert chi_of_class(P2, P2.canonical) == 1


def test_h0_examples():
    P2 = projective_plane()
    assert h0_closed_form(P2, P2.make(H=3)) == 10
    assert h0_closed_form(P2, P2.make(H=-1)) == 0
    for n in range(1, 6):
        F = hirzebruch(n)
        assert h0_closed_form(F, F.make(G=n - 1)) == n
    for d in range(1, 8):
        total = h0_closed_form(P2, P2.make(H=d + 2)) + h0_closed_form(P2, P2.make(H=d - 1))
        assert total == d * d + 4 * d + 6
    assert h0_closed_form(product_ruled(1), product_ruled(1).make(A=1)) is None


def test_json_roundtrip():
    L = finite_cover(hirzebruch(2), 2, hirzebruch(2).make(C0=3, G=5), [("E", {"E": -1})])
    assert SurfaceLattice.from_json(L.to_json()) == L


@given(surfaces, st.data())
def test_pairing_symmetric_and_bilinear(L, data):
    a, b, c = data.draw(classes_on(L, 3))
    k = data.draw(coef)
    assert a.dot(b) == b.dot(a)
    assert (a + k * b).dot(c) == a.dot(c) + k * b.dot(c)


@given(surfaces, st.integers(1, 4), st.data())
def test_blow_up_pullback_orthogonal(L, count, data):
    a, b = data.draw(classes_on(L, 2))
    B = blow_up(L, count)
    pa, pb = B.pullback(a), B.pullback(b)
    assert pa.dot(pb) == a.dot(b)
    for i in range(1, count + 1):
        assert B.cls(f"E{i}").dot(pa) == 0
    assert B.canonical.square() == L.canonical.square() - count


@given(surfaces, st.integers(2, 5), st.data())
def test_cover_scales_pairing(L, e, data):
    a, b, h = data.draw(classes_on(L, 3))
    S = finite_cover(L, e, h)
    assert S.pullback(a).dot(S.pullback(b)) == e * a.dot(b)


@given(surfaces, st.data())
def test_riemann_roch_serre_symmetry(L, data):
    (D,) = data.draw(classes_on(L))
    assert chi_of_class(L, D) == chi_of_class(L, L.canonical - D)


@given(surfaces, st.data())
def test_adjunction_genus_is_integral(L, data):
    (C,) = data.draw(classes_on(L))
    assert arithmetic_genus(C).denominator == 1
