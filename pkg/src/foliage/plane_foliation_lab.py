"""Polynomial vector fields on the projective plane.

A foliation is stored as its affine field v = A d/dx + B d/dy.  Points at
infinity are handled in two further charts: (u, w) = (1/x, y/x) for
[1:w:0] and (s, t) = (x/y, 1/y) for the single point [0:1:0].

Common zeros are found by shearing y -> y + c x so that both polynomials
have constant leading x-coefficient, eliminating x with a resultant and
factoring the eliminant over the coefficient field.  The x-coordinate of a
root comes from the first subresultant, which also certifies that the shear
separates the points.  Linear factors (and quadratic ones over Q) give exact
points; other factors give numerical locations, but the classification of
those points is still decided exactly by arithmetic modulo the factor.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath
import sympy

from .errors import BoundedReductionError, InputError
from .numeric_kernel import (
    BiPoly,
    QuadExt,
    X,
    Y,
    determinant,
    field_sqrt,
    fmt_rational,
    parse_rational,
    poly_divides,
    rational_sqrt,
    resultant_eliminate,
    squarefree_part,
)

__all__ = [
    "REDUCED",
    "SADDLE_NODE",
    "NON_REDUCED",
    "DICRITICAL",
    "Point",
    "PlaneFoliation",
    "SingularityReport",
    "BlowUpResult",
    "ReductionNode",
    "ReductionReport",
    "find_singularities",
    "classify_singularity",
    "classify_matrix",
    "classify_formal",
    "is_invariant_curve",
    "tangency",
    "blow_up_singularity",
    "reduce_singularities",
    "reduce_local",
    "common_zeros",
    "singularity_count",
    "depth_cap_from_env",
    "double_cover_local_field",
    "family_field",
    "family_field_sympy",
    "family_axis_quotients",
    "family_generic_points_numeric",
    "scalar_to_json",
    "scalar_from_json",
]

REDUCED = "reduced_nondegenerate"
SADDLE_NODE = "saddle_node"
NON_REDUCED = "non_reduced"
DICRITICAL = "dicritical_after_blowup"

DEFAULT_DEPTH_CAP = 16
_DPS = 50
_SHEARS = [Fraction(v) for v in (0, 1, -1, 2, -2, 3, -3)] + [Fraction(1, 2), Fraction(-1, 2), Fraction(1, 3), 5, 7]
_YS = sympy.Symbol("y")


# ------------------------------------------------------------------ scalars

def _field_of(values) -> int | None:
    ms = {v.m for v in values if isinstance(v, QuadExt) and v.b != 0}
    if len(ms) > 1:
        raise InputError(f"scalars from several quadratic fields: {sorted(ms)}")
    return ms.pop() if ms else None


def _norm(v):
    """Collapse a QuadExt with zero irrational part to a Fraction."""
    if isinstance(v, QuadExt) and v.b == 0:
        return Fraction(v.a)
    return v


def scalar_to_json(v):
    v = _norm(v)
    if isinstance(v, QuadExt):
        return {"a": fmt_rational(v.a), "b": fmt_rational(v.b), "m": v.m}
    if isinstance(v, (Fraction, int)):
        return fmt_rational(Fraction(v))
    if isinstance(v, mpmath.mpc):
        return {"re": mpmath.nstr(v.real, 20), "im": mpmath.nstr(v.imag, 20)}
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 20)
    if isinstance(v, sympy.Basic):
        return str(v)
    raise InputError(f"cannot serialise scalar {v!r}")


def scalar_from_json(v):
    if isinstance(v, Mapping):
        try:
            return _norm(QuadExt(parse_rational(str(v["a"])), parse_rational(str(v["b"])), int(v["m"])))
        except KeyError as exc:
            raise InputError(f"quadratic scalar missing {exc.args[0]!r}") from exc
    if isinstance(v, bool):
        raise InputError("boolean is not a scalar")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return parse_rational(v)
    raise InputError(f"unsupported scalar {v!r}")


def _to_mp(v):
    if isinstance(v, QuadExt):
        return v.to_mpmath()
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return v


def _is_pos_rational(v) -> bool:
    v = _norm(v)
    return isinstance(v, Fraction) and v > 0


def _abs_ge_one(q) -> bool:
    return abs(_to_mp(q)) >= 1


# ------------------------------------------------------------------- points

@dataclass(frozen=True)
class Point:
    """A point in one of the three charts.  Numerical points carry an error bound."""

    x: object
    y: object
    chart: str = "affine"
    exact: bool = True
    error: object = None

    def projective(self):
        if self.chart == "affine":
            return (self.x, self.y, 1)
        if self.chart == "infinity":
            return (1, self.y, self.x)
        return (self.x, 1, self.y)

    def to_json(self) -> dict:
        out = {"chart": self.chart, "x": scalar_to_json(self.x), "y": scalar_to_json(self.y), "exact": self.exact}
        if self.error is not None:
            out["error"] = mpmath.nstr(self.error, 5)
        return out

    def sort_key(self):
        order = {"affine": 0, "infinity": 1, "infinity_y": 2}[self.chart]
        if self.exact:
            return (order, 0, float(_to_mp(self.x)), float(_to_mp(self.y)), str(self.x), str(self.y))
        x, y = mpmath.mpc(self.x), mpmath.mpc(self.y)
        return (order, 1, float(x.real), float(x.imag), float(y.real), float(y.imag))


# ---------------------------------------------------------------- the field

def _saturate(P: BiPoly, Q: BiPoly, var: int) -> tuple[BiPoly, BiPoly]:
    ks = [p.min_power(var) for p in (P, Q) if not p.is_zero()]
    k = min(ks) if ks else 0
    if k == 0:
        return P, Q
    return (P.divide_by_power(var, k) if P else P), (Q.divide_by_power(var, k) if Q else Q)


def _chart_poly(P: BiPoly, e: int, chart: str) -> BiPoly:
    """u^e P(1/u, w/u) in the chart (u, w), or t^e P(s/t, 1/t) in (s, t)."""
    out = {}
    for (i, j), c in P.terms.items():
        if chart == "infinity":
            out[(e - i - j, j)] = c
        else:
            out[(i, e - i - j)] = c
    return BiPoly(out)


def _sympy_gcd_is_constant(A: BiPoly, B: BiPoly, m: int | None) -> bool:
    xs, ys = sympy.symbols("x y")
    kw = {"extension": sympy.sqrt(m)} if m else {}
    g = sympy.gcd(A.to_sympy(xs, ys), B.to_sympy(xs, ys), **kw)
    return sympy.Poly(g, xs, ys).total_degree() == 0


class PlaneFoliation:
    """Affine vector field A d/dx + B d/dy with coefficients in Q or one Q(sqrt m)."""

    def __init__(self, A: BiPoly, B: BiPoly, check_saturated: bool = True):
        if A.is_zero() and B.is_zero():
            raise InputError("the zero field defines no foliation")
        self.A = A
        self.B = B
        self.ext = _field_of(list(A.terms.values()) + list(B.terms.values()))
        if check_saturated and not A.is_zero() and not B.is_zero():
            if not _sympy_gcd_is_constant(A, B, self.ext):
                raise InputError("field is not saturated: A and B share a factor")
        if check_saturated and (A.is_zero() or B.is_zero()):
            other = B if A.is_zero() else A
            if not other.is_constant():
                raise InputError("field is not saturated: one component vanishes identically")
        self.e = max(A.degree, B.degree)
        top = X * B.homogeneous_part(self.e) - Y * A.homogeneous_part(self.e)
        self.degree = self.e - 1 if top.is_zero() else self.e

    def __eq__(self, other):
        return isinstance(other, PlaneFoliation) and self.A == other.A and self.B == other.B

    def __hash__(self):
        return hash((self.A, self.B))

    def __repr__(self):
        return f"PlaneFoliation(A={self.A}, B={self.B}, degree={self.degree})"

    @property
    def line_at_infinity_invariant(self) -> bool:
        return self.degree == self.e

    def chart_field(self, chart: str) -> tuple[BiPoly, BiPoly]:
        """Saturated local field in chart ``affine``, ``infinity`` or ``infinity_y``."""
        if chart == "affine":
            return self.A, self.B
        At, Bt = _chart_poly(self.A, self.e, chart), _chart_poly(self.B, self.e, chart)
        if chart == "infinity":
            U = -(X * At)
            W = Bt - Y * At
            return _saturate(U, W, 0)
        if chart == "infinity_y":
            S = At - X * Bt
            T = -(Y * Bt)
            return _saturate(S, T, 1)
        raise InputError(f"unknown chart {chart!r}")

    def to_json(self) -> dict:
        def enc(p):
            return [[i, j, scalar_to_json(c)] for i, j, c in p.to_triples()]

        out = {"A": enc(self.A), "B": enc(self.B)}
        if self.ext:
            out["ext"] = self.ext
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "PlaneFoliation":
        def dec(key):
            try:
                triples = data[key]
            except KeyError as exc:
                raise InputError(f"field JSON missing {key!r}") from exc
            out = []
            for t in triples:
                if len(t) != 3:
                    raise InputError(f"term {t!r} is not an [i, j, coeff] triple")
                i, j, c = t
                c = scalar_from_json(c)
                if isinstance(c, QuadExt) and "ext" in data and c.m != int(data["ext"]):
                    raise InputError("coefficient field differs from the declared extension")
                out.append((int(i), int(j), c))
            return BiPoly.from_triples(out)

        return cls(dec("A"), dec("B"))


# --------------------------------------------------------- common zeros

def _dom(m):
    return sympy.QQ.algebraic_field(sympy.sqrt(m)) if m else sympy.QQ


def _sym(c):
    c = _norm(c)
    if isinstance(c, QuadExt):
        return c.to_sympy()
    c = Fraction(c)
    return sympy.Rational(c.numerator, c.denominator)


def _upoly(coeffs: Sequence, m) -> sympy.Poly:
    """Univariate sympy Poly in y from a low-to-high coefficient list."""
    expr = sum((_sym(c) * _YS ** k for k, c in enumerate(coeffs)), sympy.Integer(0))
    return sympy.Poly(expr, _YS, domain=_dom(m))


def _from_sympy(expr, m):
    expr = sympy.nsimplify(sympy.expand(sympy.radsimp(expr)))
    if expr.is_Rational:
        return Fraction(int(expr.p), int(expr.q))
    if not m:
        raise InputError(f"value {expr} is not rational")
    r = sympy.sqrt(m)
    b = sympy.expand(expr).coeff(r)
    a = sympy.expand(expr - b * r)
    if not (a.is_Rational and b.is_Rational):
        raise InputError(f"value {expr} is not in Q(sqrt {m})")
    return _norm(QuadExt(Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)), m))


def _horner(coeffs: Sequence, v):
    out = 0
    for c in reversed(coeffs):
        out = out * v + c
    return out


def _coeffs_in_x(P: BiPoly, at, deg: int) -> list:
    out = [Fraction(0)] * (deg + 1)
    for (i, j), c in P.terms.items():
        out[i] = out[i] + c * (at ** j)
    return out


def _interp(nodes, values) -> list:
    n = len(nodes)
    dd = list(values)
    for level in range(1, n):
        for k in range(n - 1, level - 1, -1):
            dd[k] = (dd[k] - dd[k - 1]) / (nodes[k] - nodes[k - level])
    coeffs = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        shifted = [Fraction(0)] + coeffs[:-1]
        coeffs = [s - nodes[k] * c for s, c in zip(shifted, coeffs)]
        coeffs[0] = coeffs[0] + dd[k]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _first_subresultant(P: BiPoly, Q: BiPoly) -> tuple[list, list]:
    """Coefficients (in y) of S_1 = s11(y) x + s10(y) for P, Q with constant x-leading terms."""
    n, m = P.degree, Q.degree
    if min(n, m) == 1:
        lin = P if n == 1 else Q
        s11 = [lin.coeff(1, 0)]
        s10 = [Fraction(0)] * (lin.degree_in(1) + 1)
        for (i, j), c in lin.terms.items():
            if i == 0:
                s10[j] = c
        return s11, s10
    size = n + m - 2
    bound = size * max(n, m)
    nodes = [Fraction(k) for k in range(bound + 1)]
    v11, v10 = [], []
    for t in nodes:
        f = _coeffs_in_x(P, t, n)[::-1]
        g = _coeffs_in_x(Q, t, m)[::-1]
        rows = []
        for k in range(m - 1):
            rows.append([Fraction(0)] * k + f + [Fraction(0)] * (size - n - k))
        for k in range(n - 1):
            rows.append([Fraction(0)] * k + g + [Fraction(0)] * (size - m - k))
        # columns are x^size .. x^0; keep x^size .. x^2 and append x^1 or x^0
        head = [r[: size - 1] for r in rows]
        v11.append(determinant([h + [r[size - 1]] for h, r in zip(head, rows)]))
        v10.append(determinant([h + [r[size]] for h, r in zip(head, rows)]))
    return _interp(nodes, v11), _interp(nodes, v10)


def _utrim(a: list) -> list:
    a = [_norm(v) for v in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _uscale(a: list, c) -> list:
    return _utrim([v * c for v in a])


def _uadd(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return _utrim([(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)])


def _umul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u == 0:
            continue
        for j, v in enumerate(b):
            out[i + j] = out[i + j] + u * v
    return _utrim(out)


def _udivmod(a: list, h: list):
    a, h = _utrim(list(a)), _utrim(list(h))
    q = [Fraction(0)] * max(len(a) - len(h) + 1, 1)
    lead = h[-1]
    while len(a) >= len(h):
        f = a[-1] / lead
        k = len(a) - len(h)
        q[k] = f
        for i, v in enumerate(h):
            a[i + k] = a[i + k] - f * v
        a = _utrim(a)
        if not a:
            break
    return _utrim(q), a


def _urem(a: list, h: list) -> list:
    return _udivmod(a, h)[1]


def _uinv(a: list, h: list) -> list:
    """Inverse of a modulo h by the extended Euclidean algorithm."""
    r0, r1 = _utrim(list(h)), _utrim(list(a))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _udivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _uadd(s0, _uscale(_umul(q, s1), -1))
    if not r1:
        raise InputError("element is not invertible modulo the factor")
    return _urem(_uscale(s1, 1 / r1[0]), h)


def _eval_mod(P: BiPoly, xk: list, yk: list, h: list) -> list:
    """P(x(y), y(y)) reduced modulo h."""
    xp, yp = {0: [Fraction(1)]}, {0: [Fraction(1)]}

    def power(cache, base, k):
        if k not in cache:
            cache[k] = _urem(_umul(power(cache, base, k - 1), base), h)
        return cache[k]

    out = []
    for (i, j), c in P.terms.items():
        out = _uadd(out, _uscale(_umul(power(xp, xk, i), power(yp, yk, j)), c))
    return _urem(out, h)


@dataclass
class _Zero:
    x: object
    y: object
    mult: int
    exact: bool
    error: object = None
    # algebraic data for exact classification of numerical points
    h: list | None = None
    xexpr: list | None = None
    shear: Fraction = Fraction(0)
    m: int | None = None
    root_index: int = 0


def _roots_of_factor(h: sympy.Poly, m):
    """Exact roots (list) when h has degree 1, or degree 2 over Q; else None."""
    cs = [_from_sympy(c, m) for c in h.all_coeffs()]
    if len(cs) == 2:
        return [-cs[1] / cs[0]]
    if len(cs) == 3 and not m:
        a, b, c = cs
        disc = b * b - 4 * a * c
        s, r = squarefree_part(disc.numerator * disc.denominator)
        r = Fraction(r, disc.denominator)
        root = QuadExt(0, r, s) if s != 1 else r
        return [_norm((-b + root) / (2 * a)), _norm((-b - root) / (2 * a))]
    return None


def _fiber_root(P: BiPoly, Q: BiPoly, y0):
    """The unique common root in x of P(x, y0) and Q(x, y0), or None if there are several."""
    m = _field_of([y0] + list(P.terms.values()) + list(Q.terms.values()))
    xs = sympy.Symbol("x")
    dom = _dom(m)

    def restrict(p):
        cs = _coeffs_in_x(p, y0, p.degree_in(0))
        return sympy.Poly(sum((_sym(v) * xs ** k for k, v in enumerate(cs)), sympy.Integer(0)), xs, domain=dom)

    g = restrict(P).gcd(restrict(Q))
    g = g.quo(g.gcd(g.diff(xs)))
    if g.degree() != 1:
        return None
    a, b = g.all_coeffs()
    return _from_sympy(-b / a, m)


def common_zeros(P: BiPoly, Q: BiPoly) -> list:
    """All affine common zeros of P and Q with intersection multiplicities."""
    if P.is_zero() or Q.is_zero():
        other = Q if P.is_zero() else P
        if other.is_zero() or not other.is_constant():
            raise InputError("common zero set is not finite")
        return []
    if P.is_constant() or Q.is_constant():
        return []
    m = _field_of(list(P.terms.values()) + list(Q.terms.values()))
    for c in _SHEARS:
        shear_x = X
        shear_y = Y + X * c
        Ps, Qs = P.compose(shear_x, shear_y), Q.compose(shear_x, shear_y)
        if Ps.coeff(Ps.degree, 0) == 0 or Qs.coeff(Qs.degree, 0) == 0:
            continue
        res = resultant_eliminate(Ps, Qs, "x")
        if res.is_zero():
            raise InputError("common zero set is not finite (shared factor)")
        s11, s10 = _first_subresultant(Ps, Qs)
        p11, p10 = _upoly(s11, m), _upoly(s10, m)
        rp = _upoly(res.univariate(1), m)
        _, factors = rp.factor_list()
        zeros = []
        separated = True
        for h, mult in factors:
            exact = _roots_of_factor(h, m)
            if exact is not None:
                for y0 in exact:
                    x0 = _fiber_root(Ps, Qs, y0)
                    if x0 is None:
                        separated = False
                        break
                    zeros.append(_Zero(x0, _norm(y0 + c * x0), mult, True))
                if not separated:
                    break
                continue
            if not h.gcd(p11).is_ground:
                separated = False
                break
            hk = [_from_sympy(v, m) for v in reversed(h.all_coeffs())]
            xk = _urem(_umul(_uscale(s10, -1), _uinv(_urem(s11, hk), hk)), hk)
            x_is_zero = not xk
            with mpmath.workdps(_DPS):
                hc = [_to_mp(v) for v in reversed(hk)]
                roots, err = mpmath.polyroots(hc, maxsteps=200, extraprec=200, error=True)
                for k, y0 in enumerate(roots):
                    x0 = mpmath.mpf(0) if x_is_zero else -_horner([_to_mp(v) for v in s10], y0) / _horner(
                        [_to_mp(v) for v in s11], y0
                    )
                    zeros.append(
                        _Zero(x0, y0 + _to_mp(c) * x0, mult, False, err, hk, xk, c, m, k)
                    )
        return zeros
    raise InputError("no separating shear found for the common zero set")


# ------------------------------------------------------------ classification

@dataclass(frozen=True)
class SingularityReport:
    location: Point
    multiplicity: int | None = None
    eigenvalues: tuple | None = None
    quotient: object = None
    classification: str | None = None
    certainty: str | None = None

    @property
    def is_reduced(self) -> bool:
        return self.classification in (REDUCED, SADDLE_NODE)

    def to_json(self) -> dict:
        out = {"location": self.location.to_json()}
        if self.multiplicity is not None:
            out["multiplicity"] = self.multiplicity
        if self.eigenvalues is not None:
            out["eigenvalues"] = [scalar_to_json(v) for v in self.eigenvalues]
        if self.quotient is not None:
            out["quotient"] = scalar_to_json(self.quotient)
        if self.classification is not None:
            out["classification"] = self.classification
            out["certainty"] = self.certainty
        return out


def _trace_det(A: BiPoly, B: BiPoly):
    Ax, Ay, Bx, By = A.dx(), A.dy(), B.dx(), B.dy()
    return Ax + By, Ax * By - Ay * Bx


def _normalize_quotient(l1, l2):
    """l1/l2 or its reciprocal, whichever has modulus >= 1.

    On the unit circle 1/q is the conjugate of q; take the one in the upper half plane.
    """
    q = l1 / l2
    z = mpmath.mpc(_to_mp(q))
    with mpmath.workdps(_DPS):
        if abs(abs(z) - 1) < mpmath.mpf(10) ** -(_DPS - 10):
            return q if z.imag >= 0 else l2 / l1
    return q if _abs_ge_one(q) else l2 / l1


def classify_matrix(T, D):
    """Classification from the exact trace and determinant of Dv.

    Returns (eigenvalues, quotient, classification).  Eigenvalues lying
    outside the coefficient field are returned as mpmath approximations;
    in that case the quotient cannot be a positive rational.
    """
    T, D = _norm(T), _norm(D)
    if D == 0:
        if T == 0:
            return (Fraction(0), Fraction(0)), None, NON_REDUCED
        return (T, Fraction(0)), Fraction(0), SADDLE_NODE
    m = _field_of([T, D])
    disc = _norm(T * T - 4 * D)
    if m is None:
        sq = rational_sqrt(disc)
        if sq is None:
            s, r = squarefree_part(disc.numerator * disc.denominator)
            if s > 1:
                sq = QuadExt(0, Fraction(r, disc.denominator), s)
    else:
        sq = field_sqrt(disc, m)
    if sq is None:
        with mpmath.workdps(_DPS):
            r = mpmath.sqrt(_to_mp(disc))
            l1, l2 = (_to_mp(T) + r) / 2, (_to_mp(T) - r) / 2
            return (l1, l2), _normalize_quotient(l1, l2), REDUCED
    l1, l2 = _norm((T + sq) / 2), _norm((T - sq) / 2)
    q = _norm(_normalize_quotient(l1, l2))
    return (l1, l2), q, NON_REDUCED if _is_pos_rational(q) else REDUCED


def _classify_numeric(T, D, tol=mpmath.mpf(10) ** -25):
    """Numerical ladder with continued-fraction rational detection."""
    with mpmath.workdps(_DPS):
        T, D = mpmath.mpmathify(T), mpmath.mpmathify(D)
        scale = max(abs(T), abs(D), mpmath.mpf(1))
        if abs(D) < tol * scale:
            if abs(T) < tol * scale:
                return (mpmath.mpf(0), mpmath.mpf(0)), None, NON_REDUCED
            return (T, mpmath.mpf(0)), mpmath.mpf(0), SADDLE_NODE
        r = mpmath.sqrt(T * T - 4 * D)
        l1, l2 = (T + r) / 2, (T - r) / 2
        q = _normalize_quotient(l1, l2)
        qc = mpmath.mpc(q)
        if abs(qc.imag) < tol * abs(qc):
            guess = Fraction(str(mpmath.nstr(qc.real, 40))).limit_denominator(10 ** 6)
            if guess > 0 and abs(qc.real - mpmath.mpf(guess.numerator) / guess.denominator) < tol * abs(qc):
                return (l1, l2), q, NON_REDUCED
        return (l1, l2), q, REDUCED


def _classify_algebraic(z: _Zero, A: BiPoly, B: BiPoly):
    """Exact decision at a point given by an irreducible factor h of the eliminant.

    With T, D the trace and determinant of Dv, the quotient q is a positive
    rational exactly when r = T^2/D is a rational number with r >= 4 and
    r(r - 4) a rational square, since r = (1 + q)^2 / q.  T and D are
    reduced modulo h, so this holds for every root of h at once.
    """
    T, D = _trace_det(A, B)
    yk = _uadd([Fraction(0), Fraction(1)], _uscale(z.xexpr, z.shear))
    Tr, Dr = _eval_mod(T, z.xexpr, yk, z.h), _eval_mod(D, z.xexpr, yk, z.h)
    with mpmath.workdps(_DPS):
        x, y = mpmath.mpmathify(z.x), mpmath.mpmathify(z.y)
        Tn, Dn = T(x, y), D(x, y)
        if not Dr:
            if not Tr:
                return (mpmath.mpf(0), mpmath.mpf(0)), None, NON_REDUCED
            return (Tn, mpmath.mpf(0)), mpmath.mpf(0), SADDLE_NODE
        r = mpmath.sqrt(Tn * Tn - 4 * Dn)
        l1, l2 = (Tn + r) / 2, (Tn - r) / 2
        q = _normalize_quotient(l1, l2)
    rr = _urem(_umul(_umul(Tr, Tr), _uinv(Dr, z.h)), z.h)
    verdict = REDUCED
    if len(rr) <= 1:
        c = _norm(rr[0]) if rr else Fraction(0)
        if isinstance(c, Fraction) and c >= 4 and rational_sqrt(c * (c - 4)) is not None:
            verdict = NON_REDUCED
    return (l1, l2), q, verdict


def classify_singularity(F: PlaneFoliation, p, chart: str = "affine") -> SingularityReport:
    """Classify the singular point ``p`` (a Point or a pair of coordinates)."""
    if not isinstance(p, Point):
        p = Point(p[0], p[1], chart, exact=not any(isinstance(v, (mpmath.mpf, mpmath.mpc)) for v in p))
    A, B = F.chart_field(p.chart)
    return _classify_at(A, B, p)


def _classify_at(A: BiPoly, B: BiPoly, p: Point, mult=None) -> SingularityReport:
    T, D = _trace_det(A, B)
    if p.exact:
        if A(p.x, p.y) != 0 or B(p.x, p.y) != 0:
            raise InputError("point is not a zero of the field")
        eig, q, cls_ = classify_matrix(T(p.x, p.y), D(p.x, p.y))
        return SingularityReport(p, mult, eig, q, cls_, "exact")
    with mpmath.workdps(_DPS):
        x, y = mpmath.mpmathify(p.x), mpmath.mpmathify(p.y)
        size = max(abs(A(x, y)), abs(B(x, y)))
        if size > mpmath.mpf(10) ** -20:
            raise InputError("point is not (numerically) a zero of the field")
        eig, q, cls_ = _classify_numeric(T(x, y), D(x, y))
    return SingularityReport(p, mult, eig, q, cls_, "numerical")


def classify_formal(J):
    """Eigenvalue quotient of a 2x2 sympy matrix with formal (transcendental) parameters.

    Returns (lambda1, lambda2, quotient, classification); the quotient is a
    positive rational only when it simplifies to a positive rational constant.
    """
    J = sympy.Matrix(J)
    a, b, c, d = J[0, 0], J[0, 1], J[1, 0], J[1, 1]
    T, D = sympy.simplify(a + d), sympy.simplify(a * d - b * c)
    if D == 0:
        return (T, sympy.Integer(0), sympy.Integer(0), NON_REDUCED if T == 0 else SADDLE_NODE)
    if sympy.simplify(b * c) == 0:
        l1, l2 = a, d
    else:
        r = sympy.sqrt(T ** 2 - 4 * D)
        l1, l2 = (T + r) / 2, (T - r) / 2
    q = sympy.simplify(l1 / l2)
    verdict = NON_REDUCED if (q.is_Rational and q > 0) else REDUCED
    return l1, l2, q, verdict


# ----------------------------------------------------------- singularities

def _chart_zeros(A: BiPoly, B: BiPoly, chart: str) -> list:
    zs = common_zeros(A, B)
    if chart == "infinity":
        zs = [z for z in zs if (z.x == 0 if z.exact else not z.xexpr)]
    elif chart == "infinity_y":
        zs = [z for z in zs if z.exact and z.x == 0 and z.y == 0]
    return zs


def find_singularities(F: PlaneFoliation, classify: bool = True) -> list:
    """Singular points in all three charts with multiplicities.

    Their multiplicities add up to d^2 + d + 1.
    """
    out = []
    for chart in ("affine", "infinity", "infinity_y"):
        A, B = F.chart_field(chart)
        for z in _chart_zeros(A, B, chart):
            pt = Point(z.x, z.y, chart, z.exact, z.error)
            if not classify:
                out.append(SingularityReport(pt, z.mult))
            elif z.exact:
                out.append(_classify_at(A, B, pt, z.mult))
            else:
                eig, q, cls_ = _classify_algebraic(z, A, B)
                out.append(SingularityReport(pt, z.mult, eig, q, cls_, "exact"))
    return sorted(out, key=lambda r: r.location.sort_key())


def singularity_count(F: PlaneFoliation) -> int:
    return sum(r.multiplicity for r in find_singularities(F, classify=False))


# ------------------------------------------------------- invariance, tangency

def is_invariant_curve(F: PlaneFoliation, f: BiPoly, chart: str = "affine") -> bool:
    """f divides v(f) = A f_x + B f_y (in the given chart's local field)."""
    if f.is_constant():
        raise InputError("curve equation must be non-constant")
    A, B = F.chart_field(chart)
    return poly_divides(f, A * f.dx() + B * f.dy())


def _curve_in_chart(f: BiPoly, chart: str) -> BiPoly:
    if chart == "affine":
        return f
    g = _chart_poly(f, f.degree, chart)
    return g


def _irreducible_factors(f: BiPoly, m) -> list:
    xs, ys = sympy.symbols("x y")
    kw = {"extension": sympy.sqrt(m)} if m else {}
    _, facs = sympy.factor_list(f.to_sympy(xs, ys), xs, ys, **kw)
    out = []
    for g, _ in facs:
        poly = sympy.Poly(g, xs, ys)
        terms = {}
        for (i, j), c in poly.terms():
            terms[(i, j)] = _from_sympy(c, m)
        out.append(BiPoly(terms))
    return out


def tangency(F: PlaneFoliation, f: BiPoly) -> int:
    """Total tangency order of the projective closure of {f = 0} with F."""
    if f.is_constant():
        raise InputError("curve equation must be non-constant")
    m = _field_of(list(F.A.terms.values()) + list(F.B.terms.values()) + list(f.terms.values()))
    for g in _irreducible_factors(f, m):
        if is_invariant_curve(F, g):
            raise InputError("curve has an invariant component; tangency is undefined")
    total = 0
    for chart in ("affine", "infinity", "infinity_y"):
        A, B = F.chart_field(chart)
        fc = _curve_in_chart(f, chart)
        if fc.is_constant():
            continue
        vf = A * fc.dx() + B * fc.dy()
        if vf.is_zero():
            raise InputError("curve is invariant in a chart at infinity")
        for z in _chart_zeros(fc, vf, chart):
            total += z.mult
    return total


# ---------------------------------------------------------------- blow-ups

@dataclass(frozen=True)
class BlowUpResult:
    x_chart: tuple
    y_chart: tuple
    exceptional_invariant: bool
    kf_coefficient: int
    multiplicity: int

    @property
    def dicritical(self) -> bool:
        return not self.exceptional_invariant


def _order(p: BiPoly) -> int:
    return min((i + j for i, j in p.terms), default=10 ** 9)


def blow_up_singularity(A: BiPoly, B: BiPoly) -> BlowUpResult:
    """Blow up the origin of the local field A d/dx + B d/dy.

    The x-chart is (x, t) with y = t x, the y-chart is (s, y) with x = s y.
    The pulled-back field is multiplied by the chart coordinate and divided by
    the largest common power l of it; the exceptional curve then carries the
    coefficient 1 - l in K_F.
    """
    if A.is_zero() and B.is_zero():
        raise InputError("zero field")
    nu = min(_order(A), _order(B))
    An, Bn = A.homogeneous_part(nu), B.homogeneous_part(nu)
    dicritical = (X * Bn - Y * An).is_zero()
    # x-chart
    Ax, Bx = A.compose(X, X * Y), B.compose(X, X * Y)
    P1, P2 = X * Ax, Bx - Y * Ax
    # y-chart
    Ay, By = A.compose(X * Y, Y), B.compose(X * Y, Y)
    Q1, Q2 = Ay - X * By, Y * By
    l = nu + 1 if dicritical else nu
    if (P2 and P2.min_power(0) < l) or (P1 and P1.min_power(0) < l):
        raise InputError("singularity is not isolated")
    xc = tuple(p.divide_by_power(0, l) if p else p for p in (P1, P2))
    yc = tuple(p.divide_by_power(1, l) if p else p for p in (Q1, Q2))
    return BlowUpResult(xc, yc, not dicritical, 1 - l, nu)


@dataclass
class ReductionNode:
    chart: str
    point: Point
    report: SingularityReport | None
    depth: int
    multiplicity: int | None = None
    dicritical: bool | None = None
    kf_coefficient: int | None = None
    children: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "chart": self.chart,
            "point": self.point.to_json(),
            "depth": self.depth,
            "classification": self.report.classification if self.report else None,
        }
        if self.report is not None and self.report.quotient is not None:
            out["quotient"] = scalar_to_json(self.report.quotient)
        if self.kf_coefficient is not None:
            out["blown_up"] = True
            out["nu"] = self.multiplicity
            out["dicritical"] = self.dicritical
            out["kf_coefficient"] = self.kf_coefficient
            out["children"] = [c.to_json() for c in self.children]
        return out

    def blowups(self) -> int:
        return (1 if self.kf_coefficient is not None else 0) + sum(c.blowups() for c in self.children)

    def leaves(self) -> list:
        if self.kf_coefficient is None:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def coefficients(self) -> list:
        own = [self.kf_coefficient] if self.kf_coefficient is not None else []
        return own + [v for c in self.children for v in c.coefficients()]


@dataclass
class ReductionReport:
    roots: list

    @property
    def blowups(self) -> int:
        return sum(r.blowups() for r in self.roots)

    @property
    def final_singularities(self) -> list:
        return [leaf for r in self.roots for leaf in r.leaves()]

    @property
    def kf_coefficients(self) -> list:
        return [v for r in self.roots for v in r.coefficients()]

    @property
    def all_reduced(self) -> bool:
        return all(leaf.report is not None and leaf.report.is_reduced for leaf in self.final_singularities)

    def to_json(self) -> dict:
        return {
            "blowups": self.blowups,
            "kf_coefficients": self.kf_coefficients,
            "all_reduced": self.all_reduced,
            "tree": [r.to_json() for r in self.roots],
        }


def _exceptional_points(bu: BlowUpResult) -> list:
    """Singular points on the exceptional curve: x = 0 in the x-chart plus the y-chart origin."""
    out = []
    for chart, (P, Q) in (("x", bu.x_chart), ("y", bu.y_chart)):
        for z in common_zeros(P, Q):
            if chart == "x":
                on_e = z.x == 0 if z.exact else not z.xexpr
            else:
                on_e = z.exact and z.x == 0 and z.y == 0
            if on_e:
                out.append((chart, z, P, Q))
    return out


def _reduce_node(A, B, chart, pt, report, depth, cap) -> ReductionNode:
    node = ReductionNode(chart, pt, report, depth)
    if report.is_reduced:
        return node
    if depth >= cap:
        raise BoundedReductionError(
            f"reduction depth cap {cap} reached", partial=node.to_json()
        )
    if not pt.exact:
        raise BoundedReductionError("non-reduced point with numerical location", partial=node.to_json())
    At, Bt = A.translate(pt.x, pt.y), B.translate(pt.x, pt.y)
    bu = blow_up_singularity(At, Bt)
    node.multiplicity = bu.multiplicity
    node.dicritical = bu.dicritical
    node.kf_coefficient = bu.kf_coefficient
    for sub, z, P, Q in _exceptional_points(bu):
        spt = Point(z.x, z.y, f"E{depth + 1}{sub}", z.exact, z.error)
        if z.exact:
            rep = _classify_at(P, Q, spt, z.mult)
        else:
            eig, q, cls_ = _classify_algebraic(z, P, Q)
            rep = SingularityReport(spt, z.mult, eig, q, cls_, "exact")
        try:
            node.children.append(_reduce_node(P, Q, spt.chart, spt, rep, depth + 1, cap))
        except BoundedReductionError as exc:
            node.children.append(ReductionNode(spt.chart, spt, rep, depth + 1))
            raise BoundedReductionError(exc.message, partial=node.to_json()) from exc
    node.children.sort(key=lambda c: c.point.sort_key() if c.point.chart in ("affine",) else (c.chart, str(c.point.x), str(c.point.y)))
    return node


def depth_cap_from_env(default: int = DEFAULT_DEPTH_CAP) -> int:
    raw = os.environ.get("FOLIAGE_DEPTH_CAP")
    if raw is None or raw == "":
        return default
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InputError(f"FOLIAGE_DEPTH_CAP must be an integer, got {raw!r}") from exc
    if cap < 0:
        raise InputError("FOLIAGE_DEPTH_CAP must be non-negative")
    return cap


def reduce_singularities(F: PlaneFoliation, depth_cap: int | None = None) -> ReductionReport:
    """Blow up non-reduced points repeatedly until every singularity is reduced."""
    cap = depth_cap_from_env() if depth_cap is None else depth_cap
    roots = []
    for rep in find_singularities(F):
        A, B = F.chart_field(rep.location.chart)
        roots.append(_reduce_node(A, B, rep.location.chart, rep.location, rep, 0, cap))
    return ReductionReport(roots)


def reduce_local(A: BiPoly, B: BiPoly, depth_cap: int | None = None) -> ReductionNode:
    """Reduction tree of the local field at the origin."""
    cap = depth_cap_from_env() if depth_cap is None else depth_cap
    pt = Point(Fraction(0), Fraction(0), "local")
    rep = _classify_at(A, B, pt)
    return _reduce_node(A, B, "local", pt, rep, 0, cap)


# ------------------------------------------------- double covers and a family

def double_cover_local_field(alpha: BiPoly, beta: BiPoly) -> tuple[BiPoly, BiPoly]:
    """Pull back alpha d/dx + beta d/dy along x = z^2: alpha(z^2, y) d/dz + 2z beta(z^2, y) d/dy."""
    z2 = X * X
    return alpha.compose(z2, Y), (X * beta.compose(z2, Y)).scale(2)


def family_field(d: int, alpha, beta) -> PlaneFoliation:
    """x(alpha + x^d + y^d) d/dx + y(beta + y^(d-1) + x^d + y^d) d/dy."""
    if d < 2:
        raise InputError("family needs d >= 2")
    xd, yd = X ** d, Y ** d
    A = X * (xd + yd + alpha)
    B = Y * (Y ** (d - 1) + xd + yd + beta)
    return PlaneFoliation(A, B)


def family_field_sympy(d: int):
    """Symbolic version with formal parameters; returns (A, B, x, y, alpha, beta)."""
    x, y, a, b = sympy.symbols("x y alpha beta")
    return x * (a + x ** d + y ** d), y * (b + y ** (d - 1) + x ** d + y ** d), x, y, a, b


def family_axis_quotients(d: int) -> dict:
    """Eigenvalue quotients lambda1/lambda2 (diagonal order) at the singular points on the axes.

    ``origin`` is in terms of alpha, beta.  ``x_axis`` eliminates x0^d = -alpha.
    ``y_axis`` is expressed through y0, with beta = -(y0^(d-1) + y0^d).
    """
    A, B, x, y, a, b = family_field_sympy(d)
    J = sympy.Matrix([[A.diff(x), A.diff(y)], [B.diff(x), B.diff(y)]])
    x0, y0 = sympy.symbols("x0 y0")
    out = {}
    l1, l2, q, _ = classify_formal(J.subs({x: 0, y: 0}))
    out["origin"] = {"lambda1": l1, "lambda2": l2, "quotient": q}
    Jx = J.subs({y: 0, x: x0})
    Jx = Jx.subs(x0 ** d, -a).applyfunc(sympy.simplify)
    l1, l2, q, _ = classify_formal(Jx)
    out["x_axis"] = {"lambda1": sympy.simplify(l1), "lambda2": sympy.simplify(l2), "quotient": q}
    Jy = J.subs({x: 0, y: y0}).subs(b, -(y0 ** (d - 1) + y0 ** d)).applyfunc(sympy.expand)
    l1, l2, q, _ = classify_formal(Jy)
    out["y_axis"] = {"lambda1": sympy.factor(l1), "lambda2": sympy.factor(l2), "quotient": sympy.factor(q), "y0": y0}
    return out


def family_generic_points_numeric(d: int, alpha, beta, dps: int = 40) -> list:
    """Singular points off both axes with their eigenvalues, computed numerically.

    Returns tuples (x0, y0, lambda1, lambda2).
    """
    out = []
    with mpmath.workdps(dps):
        a, b = mpmath.mpmathify(alpha), mpmath.mpmathify(beta)
        ys = mpmath.polyroots([1] + [0] * (d - 2) + [-(a - b)], maxsteps=200, extraprec=100) if d > 2 else [a - b]
        for y0 in ys:
            rhs = -a - y0 ** d
            xs = mpmath.polyroots([1] + [0] * (d - 1) + [-rhs], maxsteps=200, extraprec=100)
            for x0 in xs:
                J = mpmath.matrix(
                    [
                        [(d + 1) * x0 ** d + y0 ** d + a, d * x0 * y0 ** (d - 1)],
                        [d * x0 ** (d - 1) * y0, (d + 1) * y0 ** d + d * y0 ** (d - 1) + x0 ** d + b],
                    ]
                )
                T = J[0, 0] + J[1, 1]
                D = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
                r = mpmath.sqrt(T * T - 4 * D)
                out.append((x0, y0, (T + r) / 2, (T - r) / 2))
    return out
