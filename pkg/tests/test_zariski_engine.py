from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from foliage.errors import DecompositionFailure, InputError
from foliage.foliation_model import CurveRecord, FoliatedSurface
from foliage.gallery import build_example
from foliage.numeric_kernel import solve_linear_system
from foliage.surface_lattice import abstract_surface
from foliage.zariski_engine import (
    ChainSpec,
    chain_negative_part,
    check_decomposition,
    detect_f_chains,
    is_negative_definite,
    zariski_decompose,
    zariski_oracle,
)


def _lattice(gram_curves, name="T"):
    n = len(gram_curves)
    basis = ["H"] + [f"C{i}" for i in range(1, n + 1)]
    gram = [[1] + [0] * n] + [[0] + list(row) for row in gram_curves]
    return abstract_surface(basis, gram, [0] * (n + 1), 1, name)


def test_nef_class_untouched():
    L = _lattice([[-2]])
    D = 3 * L.cls("H")
    res = zariski_decompose(D, [("C1", L.cls("C1"))])
    assert res.N_coeffs == {} and res.P == D and res.volume == 9


def test_single_minus_two_curve_half():
    L = _lattice([[-2]])
    C = L.cls("C1")
    D = L.cls("H") + Fraction(1, 2) * C  # D.C = -1
    assert D.dot(C) == -1
    res = zariski_decompose(D, [("C1", C)])
    assert res.N_coeffs == {"C1": Fraction(1, 2)}
    assert zariski_oracle(D, [("C1", C)]).N_coeffs == res.N_coeffs
    assert check_decomposition(D, res, [("C1", C)]) == []


def test_positive_semidefinite_support_fails():
    L = abstract_surface(["A", "C"], [[0, 1], [1, 0]], [-2, -2], 1)
    D = -L.cls("A")
    with pytest.raises(DecompositionFailure) as exc:
        zariski_decompose(D, [("C", L.cls("C"))])
    assert exc.value.exit_code == 3


def test_negative_definite_check():
    assert is_negative_definite([[-2, 1], [1, -2]])
    assert not is_negative_definite([[-1, 1], [1, -1]])
    assert not is_negative_definite([[0]])


def test_chain_examples():
    assert chain_negative_part(ChainSpec([2], [-1])) == [Fraction(1, 2)]
    assert chain_negative_part(ChainSpec([2, 2], [-1, 0])) == [Fraction(2, 3), Fraction(1, 3)]
    assert chain_negative_part(ChainSpec([3, 2, 4], [0, 0, 0])) == [0, 0, 0]
    with pytest.raises(InputError):
        ChainSpec([1], [-1])


@pytest.mark.parametrize("r", range(1, 9))
def test_chain_closed_form_for_minus_two_strings(r):
    y = chain_negative_part(ChainSpec([2] * r, [-1] + [0] * (r - 1)))
    assert y == [Fraction(r + 1 - j, r + 1) for j in range(1, r + 1)]
    assert all(a > b for a, b in zip(y, y[1:]))


@st.composite
def negative_sets(draw):
    n = draw(st.integers(1, 6))
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = -draw(st.integers(1, 5))
        for j in range(i + 1, n):
            M[i][j] = M[j][i] = draw(st.integers(0, 1))
    assume(is_negative_definite(M))
    a = draw(st.integers(0, 4))
    b = [draw(st.integers(0, 4)) for _ in range(n)]
    return M, a, b


@settings(max_examples=80, deadline=None)
@given(negative_sets())
def test_iteration_matches_subset_oracle(data):
    M, a, b = data
    L = _lattice(M)
    cands = [(f"C{i}", L.cls(f"C{i}")) for i in range(1, len(M) + 1)]
    D = L.make(H=a, **{f"C{i}": v for i, v in enumerate(b, 1)})
    res = zariski_decompose(D, cands)
    ref = zariski_oracle(D, cands)
    assert res.N_coeffs == ref.N_coeffs
    assert res.P == ref.P
    assert check_decomposition(D, res, cands) == []
    assert res.iterations <= len(cands)
    # support only grows, listed in the order it was added
    assert set(res.support_order) == set(res.N_coeffs)
    for lab in res.N_coeffs:
        assert res.P.dot(L.cls(lab)) == 0


@pytest.mark.parametrize("g,n", [(2, 2), (3, 2), (2, 4), (4, 2)])
def test_fibred_example_negative_part(g, n):
    case = build_example("ex6_4", {"g": g, "n": n})
    res = zariski_decompose(case.model.kf, case.candidates)
    assert res.N_coeffs == {"Ta": Fraction(1, 2), "Tb": Fraction(1, 2)}
    assert res.volume == 2 * (g - 1) * g * n
    assert check_decomposition(case.model.kf, res, case.candidates) == []


def test_exceptional_family_chains():
    g, m = 2, 3
    case = build_example("ex6_5", {"gB": 2, "m": m, "g": g})
    chains = detect_f_chains(case.model)
    assert len(chains) == 2 * m * (2 * g + 1)
    assert all(c.length == 1 and c.self_intersections == (2,) for c in chains)
    assert {chain_negative_part(c)[0] for c in chains} == {Fraction(1, 2)}


def _chain_model(squares, zs, kf_dots, pairings):
    n = len(squares)
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = squares[i]
    for i, j in pairings:
        M[i][j] = M[j][i] = 1
    basis = ["H"] + [f"C{i}" for i in range(1, n + 1)]
    gram = [[1] + [0] * n] + [[0] + row for row in M]
    # K.C = -2 - C^2 keeps isolated curves rational
    L = abstract_surface(basis, gram, [0] + [Fraction(-2 - s, s) for s in squares], 1)
    x = solve_linear_system(M, kf_dots)
    kf = L.make(**{f"C{i}": v for i, v in enumerate(x, 1)})
    curves = [
        CurveRecord(f"C{i}", L.cls(f"C{i}"), invariant=True, rational_smooth=True, declared_Z=z)
        for i, z in enumerate(zs, 1)
    ]
    return FoliatedSurface(L, kf, curves)


def test_minus_one_curve_excluded_from_chains():
    FS = _chain_model([-1], [1], [-1], [])
    assert detect_f_chains(FS) == []


def test_two_curve_chain_detected():
    FS = _chain_model([-2, -2], [1, 2], [-1, 0], [(0, 1)])
    chains = detect_f_chains(FS)
    assert len(chains) == 1
    assert chains[0].labels == ("C1", "C2")
    assert chain_negative_part(chains[0]) == [Fraction(2, 3), Fraction(1, 3)]
