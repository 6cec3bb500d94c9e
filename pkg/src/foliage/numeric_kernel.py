"""Exact scalars, dense exact linear algebra and sparse bivariate polynomials.

Rationals are :class:`fractions.Fraction`.  Elements of a real quadratic field
Q(sqrt m) are :class:`QuadExt`.  :class:`BiPoly` accepts either kind of
coefficient; all algorithms only need field operations and a zero test.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Mapping, Sequence

from .errors import InputError

__all__ = [
    "Q",
    "fmt_rational",
    "parse_rational",
    "squarefree_part",
    "is_square_free",
    "rational_sqrt",
    "QuadExt",
    "field_sqrt",
    "BiPoly",
    "X",
    "Y",
    "determinant",
    "solve_linear_system",
    "resultant_eliminate",
    "poly_divides",
    "poly_divmod",
]


# ---------------------------------------------------------------- rationals

def Q(value) -> Fraction:
    """Coerce ints, strings like ``"-3/4"`` and Fractions to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise InputError(f"not a rational: {value!r}")


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational literal {text!r}") from exc


def fmt_rational(value) -> str:
    """Canonical ``p/q`` string (``p`` alone when the denominator is 1)."""
    return str(Q(value))


def squarefree_part(n: int) -> tuple[int, int]:
    """Write ``n = s * r**2`` with ``s`` square-free; returns ``(s, r)``.

    The sign is kept on ``s``.  Trial division is fine at the sizes used here.
    """
    if n == 0:
        return 0, 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, r = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        r *= p ** (e // 2)
        if e % 2:
            s *= p
        p += 1
    return sign * s * n, r


def is_square_free(n: int) -> bool:
    return n > 0 and squarefree_part(n)[1] == 1


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None."""
    q = Q(q)
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


# ------------------------------------------------------- quadratic extension

@total_ordering
class QuadExt:
    """The real number ``a + b*sqrt(m)`` with ``m`` square-free and ``m > 1``."""

    __slots__ = ("a", "b", "m")

    def __init__(self, a, b=0, m: int = 2):
        if not isinstance(m, int) or isinstance(m, bool) or m < 2 or not is_square_free(m):
            raise InputError(f"radicand must be a square-free integer > 1, got {m!r}")
        object.__setattr__(self, "a", Q(a))
        object.__setattr__(self, "b", Q(b))
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    @classmethod
    def sqrt(cls, m: int) -> "QuadExt":
        return cls(0, 1, m)

    # coercion
    def _lift(self, other):
        if isinstance(other, QuadExt):
            if other.m != self.m:
                raise InputError(f"mixed radicands {self.m} and {other.m}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadExt(other, 0, self.m)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a + o.a, self.b + o.b, self.m)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.m)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a - o.a, self.b - o.b, self.m)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a * o.a + self.m * self.b * o.b, self.a * o.b + self.b * o.a, self.m)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.m)

    def norm(self) -> Fraction:
        return self.a * self.a - self.m * self.b * self.b

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt(self.a / n, -self.b / n, self.m)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadExt(1, 0, self.m)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_rational(self) -> bool:
        return self.b == 0

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            if self.b == 0 and other.b == 0:
                return self.a == other.a
            return self.m == other.m and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.m))

    def sign(self) -> int:
        """Exact sign of the real number, decided by comparing squares."""
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        # opposite signs: compare a**2 with m*b**2
        d = a * a - self.m * b * b
        if d == 0:
            return 0
        return sa if d > 0 else sb

    def __lt__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() < 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.m)

    def to_mpmath(self):
        import mpmath

        return mpmath.mpf(self.a.numerator) / self.a.denominator + (
            mpmath.mpf(self.b.numerator) / self.b.denominator
        ) * mpmath.sqrt(self.m)

    def to_sympy(self):
        import sympy

        return sympy.Rational(self.a.numerator, self.a.denominator) + sympy.Rational(
            self.b.numerator, self.b.denominator
        ) * sympy.sqrt(self.m)

    def __repr__(self):
        return f"QuadExt({fmt_rational(self.a)}, {fmt_rational(self.b)}, {self.m})"

    def __str__(self):
        if self.b == 0:
            return fmt_rational(self.a)
        rad = f"sqrt({self.m})" if self.b == 1 else f"{fmt_rational(self.b)}*sqrt({self.m})"
        if self.a == 0:
            return rad
        if self.b < 0:
            neg = f"sqrt({self.m})" if self.b == -1 else f"{fmt_rational(-self.b)}*sqrt({self.m})"
            return f"{fmt_rational(self.a)} - {neg}"
        return f"{fmt_rational(self.a)} + {rad}"


def field_sqrt(c, m: int | None = None):
    """Square root of ``c`` inside Q or Q(sqrt m); None when it does not exist.

    ``c`` is a Fraction or a QuadExt.  With ``m`` given a rational ``c`` may
    also have its root in Q(sqrt m) (``c = m*r**2``).
    """
    if isinstance(c, QuadExt):
        m = c.m
        if c.b == 0:
            c = c.a
        else:
            a, b = c.a, c.b
            n = rational_sqrt(a * a - m * b * b)
            if n is None:
                return None
            for s in (n, -n):
                r = rational_sqrt((a + s) / 2)
                if r:
                    root = QuadExt(r, b / (2 * r), m)
                    if root * root == c:
                        return root
            return None
    c = Q(c)
    r = rational_sqrt(c)
    if r is not None:
        return r if m is None else QuadExt(r, 0, m)
    if m is not None:
        r = rational_sqrt(c / m)
        if r is not None:
            return QuadExt(0, r, m)
    return None


def _zero_like(c):
    return c * 0


def _is_zero(c) -> bool:
    return not c


def _scalar(c):
    if isinstance(c, QuadExt):
        return c
    if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
        return Q(c)
    if isinstance(c, str):
        return parse_rational(c)
    raise InputError(f"unsupported scalar {c!r}")


# ----------------------------------------------------------- linear algebra

def determinant(matrix: Sequence[Sequence]):
    """Exact determinant by Gaussian elimination over the coefficient field."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    a = [list(row) for row in matrix]
    if any(len(row) != n for row in a):
        raise InputError("determinant needs a square matrix")
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if not _is_zero(a[r][col])), None)
        if pivot is None:
            return _zero_like(a[0][0])
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det = det * p
        for r in range(col + 1, n):
            if _is_zero(a[r][col]):
                continue
            f = a[r][col] / p
            row_c, row_r = a[col], a[r]
            for k in range(col, n):
                row_r[k] = row_r[k] - f * row_c[k]
    return det


def solve_linear_system(matrix: Sequence[Sequence], rhs: Sequence):
    """Solve ``matrix @ x = rhs`` exactly.

    Returns the solution as a list, or None when the matrix is singular.
    """
    n = len(matrix)
    if len(rhs) != n or any(len(row) != n for row in matrix):
        raise InputError("solve_linear_system: dimension mismatch")
    a = [[_scalar(v) for v in row] + [_scalar(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not _is_zero(a[r][col])), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        row_c = a[col]
        for k in range(col, n + 1):
            row_c[k] = row_c[k] / p
        for r in range(n):
            if r == col or _is_zero(a[r][col]):
                continue
            f = a[r][col]
            row_r = a[r]
            for k in range(col, n + 1):
                row_r[k] = row_r[k] - f * row_c[k]
    return [a[i][n] for i in range(n)]


# ---------------------------------------------------- bivariate polynomials

def _grlex_key(exp):
    i, j = exp
    return (i + j, i, j)


class BiPoly:
    """Sparse polynomial in ``x`` and ``y``; zero coefficients are never stored."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise InputError(f"negative exponent ({i}, {j})")
            c = _scalar(c)
            if not _is_zero(c):
                key = (int(i), int(j))
                if key in clean:
                    c = clean[key] + c
                    if _is_zero(c):
                        del clean[key]
                        continue
                clean[key] = c
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def from_triples(cls, triples: Iterable) -> "BiPoly":
        """Build from ``(i, j, coeff)`` triples; repeated exponents add up."""
        acc: dict = {}
        for i, j, c in triples:
            c = _scalar(c)
            acc[(i, j)] = acc[(i, j)] + c if (i, j) in acc else c
        return cls(acc)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in decreasing graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((i + j for i, j in self._terms), default=-1)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self._terms), default=-1)

    def is_constant(self) -> bool:
        return all(e == (0, 0) for e in self._terms)

    def coeff(self, i: int, j: int):
        return self._terms.get((i, j), Fraction(0))

    def leading(self):
        """Leading (exponent, coefficient) in graded-lex order."""
        if not self._terms:
            raise InputError("zero polynomial has no leading term")
        exp = max(self._terms, key=_grlex_key)
        return exp, self._terms[exp]

    def homogeneous_part(self, k: int) -> "BiPoly":
        return BiPoly({e: c for e, c in self._terms.items() if e[0] + e[1] == k})

    def order(self) -> int:
        """Lowest total degree of a term (vanishing order at the origin)."""
        return min((i + j for i, j in self._terms), default=-1)

    # arithmetic
    @staticmethod
    def _coerce(other):
        if isinstance(other, BiPoly):
            return other
        try:
            return BiPoly.const(other)
        except InputError:
            return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        acc = dict(self._terms)
        for e, c in o._terms.items():
            acc[e] = acc[e] + c if e in acc else c
        return BiPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        acc: dict = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in o._terms.items():
                e = (i1 + i2, j1 + j2)
                acc[e] = acc[e] + c1 * c2 if e in acc else c1 * c2
        return BiPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = BiPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "BiPoly":
        return BiPoly({e: v * c for e, v in self._terms.items()})

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o)._terms == {}

    def __hash__(self):
        return hash(frozenset((e, hash(c)) for e, c in self._terms.items()))

    # calculus and substitution
    def diff(self, var: int) -> "BiPoly":
        out = {}
        for (i, j), c in self._terms.items():
            k = (i, j)[var]
            if k:
                out[(i - 1, j) if var == 0 else (i, j - 1)] = c * k
        return BiPoly(out)

    def dx(self) -> "BiPoly":
        return self.diff(0)

    def dy(self) -> "BiPoly":
        return self.diff(1)

    def __call__(self, x, y):
        """Evaluate at scalars (any ring supporting + and * with the coefficients)."""
        total = 0
        for (i, j), c in self._terms.items():
            total = total + _coef_in(c, x) * (x ** i) * (y ** j)
        return total

    def compose(self, px: "BiPoly", py: "BiPoly") -> "BiPoly":
        """Substitute ``x -> px`` and ``y -> py``."""
        out = BiPoly()
        cache_x = {0: BiPoly.const(1)}
        cache_y = {0: BiPoly.const(1)}

        def power(cache, base, k):
            if k not in cache:
                cache[k] = power(cache, base, k - 1) * base
            return cache[k]

        for (i, j), c in self._terms.items():
            out = out + (power(cache_x, px, i) * power(cache_y, py, j)).scale(c)
        return out

    def translate(self, x0, y0) -> "BiPoly":
        """The polynomial ``p(x + x0, y + y0)``."""
        return self.compose(X + x0, Y + y0)

    def swap(self) -> "BiPoly":
        return BiPoly({(j, i): c for (i, j), c in self._terms.items()})

    def univariate(self, var: int) -> list:
        """Coefficient list (low to high) in ``var``; requires the other exponent to be 0."""
        if any(e[1 - var] for e in self._terms):
            raise InputError("polynomial is not univariate in the requested variable")
        deg = self.degree_in(var)
        out = [Fraction(0)] * (deg + 1)
        for e, c in self._terms.items():
            out[e[var]] = c
        return out

    def divide_by_power(self, var: int, k: int) -> "BiPoly":
        out = {}
        for (i, j), c in self._terms.items():
            e = [i, j]
            if e[var] < k:
                raise InputError("not divisible by the requested power")
            e[var] -= k
            out[tuple(e)] = c
        return BiPoly(out)

    def min_power(self, var: int) -> int:
        return min((e[var] for e in self._terms), default=0)

    def coefficient_field(self) -> int | None:
        """The radicand of the QuadExt coefficients, or None when all are rational."""
        ms = {c.m for c in self._terms.values() if isinstance(c, QuadExt) and c.b != 0}
        if len(ms) > 1:
            raise InputError(f"coefficients from several quadratic fields: {sorted(ms)}")
        return ms.pop() if ms else None

    # conversions
    def to_sympy(self, x, y):
        import sympy

        expr = sympy.Integer(0)
        for (i, j), c in self._terms.items():
            sc = c.to_sympy() if isinstance(c, QuadExt) else sympy.Rational(c.numerator, c.denominator)
            expr += sc * x ** i * y ** j
        return expr

    def to_triples(self) -> list:
        return [(i, j, c) for (i, j), c in self.items()]

    def __repr__(self):
        return f"BiPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (i, j), c in self.items():
            mono = "*".join(
                s for s in (
                    "" if i == 0 else ("x" if i == 1 else f"x^{i}"),
                    "" if j == 0 else ("y" if j == 1 else f"y^{j}"),
                ) if s
            )
            cs = str(c)
            if isinstance(c, QuadExt) and c.a != 0 and c.b != 0:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _coef_in(c, x):
    """Map a coefficient into the ring of the evaluation point when needed."""
    if isinstance(c, QuadExt):
        mod = type(x).__module__
        if mod.startswith("mpmath"):
            return c.to_mpmath()
        if mod.startswith("sympy"):
            return c.to_sympy()
        if isinstance(x, float):
            return float(c)
    elif isinstance(c, Fraction):
        mod = type(x).__module__
        if mod.startswith("mpmath"):
            import mpmath

            return mpmath.mpf(c.numerator) / c.denominator
        if mod.startswith("sympy"):
            import sympy

            return sympy.Rational(c.numerator, c.denominator)
        if isinstance(x, float):
            return float(c)
    return c


X = BiPoly({(1, 0): 1})
Y = BiPoly({(0, 1): 1})


# ---------------------------------------------------------------- division

def poly_divmod(p: BiPoly, d: BiPoly) -> tuple[BiPoly, BiPoly]:
    """Graded-lex division of ``p`` by the single polynomial ``d``.

    A single divisor is a Groebner basis of the ideal it generates, so the
    remainder vanishes exactly when ``d`` divides ``p``.
    """
    if d.is_zero():
        raise InputError("division by the zero polynomial")
    (li, lj), lc = d.leading()
    quot: dict = {}
    rem: dict = {}
    work = dict(p.terms)
    while work:
        exp = max(work, key=_grlex_key)
        c = work[exp]
        i, j = exp
        if i >= li and j >= lj:
            t = (i - li, j - lj)
            f = c / lc
            quot[t] = quot[t] + f if t in quot else f
            for (di, dj), dc in d.terms.items():
                e = (di + t[0], dj + t[1])
                v = work.get(e, 0) - f * dc
                if _is_zero(v):
                    work.pop(e, None)
                else:
                    work[e] = v
        else:
            rem[exp] = c
            del work[exp]
    return BiPoly(quot), BiPoly(rem)


def poly_divides(d: BiPoly, p: BiPoly) -> bool:
    return poly_divmod(p, d)[1].is_zero()


# -------------------------------------------------------------- resultants

def _as_univariate_coeffs(p: BiPoly, var: int, at):
    """Coefficients (low to high) in ``var`` after setting the other variable to ``at``."""
    deg = p.degree_in(var)
    out = [Fraction(0)] * (deg + 1)
    for (i, j), c in p.terms.items():
        k, other = (i, j) if var == 0 else (j, i)
        out[k] = out[k] + c * (at ** other)
    return out


def _sylvester(f: list, g: list) -> list:
    """Sylvester matrix of two coefficient lists (low to high) with formal degrees."""
    n, m = len(f) - 1, len(g) - 1
    size = n + m
    rows = []
    fr, gr = f[::-1], g[::-1]
    for k in range(m):
        rows.append([Fraction(0)] * k + fr + [Fraction(0)] * (size - n - 1 - k))
    for k in range(n):
        rows.append([Fraction(0)] * k + gr + [Fraction(0)] * (size - m - 1 - k))
    return rows


def _interpolate(nodes: list, values: list) -> list:
    """Newton interpolation; returns coefficients (low to high)."""
    n = len(nodes)
    dd = list(values)
    for level in range(1, n):
        for k in range(n - 1, level - 1, -1):
            dd[k] = (dd[k] - dd[k - 1]) / (nodes[k] - nodes[k - level])
    coeffs = [Fraction(0)] * n
    # Horner-style expansion of the Newton form
    for k in range(n - 1, -1, -1):
        shifted = [Fraction(0)] + coeffs[:-1]
        coeffs = [s - nodes[k] * c for s, c in zip(shifted, coeffs)]
        coeffs[0] = coeffs[0] + dd[k]
    return coeffs


def resultant_eliminate(p: BiPoly, q: BiPoly, variable="x") -> BiPoly:
    """Resultant of ``p`` and ``q`` with respect to ``variable``.

    ``variable`` is ``"x"``/``"first"`` or ``"y"``/``"second"``.  The result is
    a BiPoly in the remaining variable.  The determinant of the Sylvester
    matrix is evaluated at enough rational points and interpolated, which is
    exact and avoids polynomial-entry determinants.
    """
    if variable in ("x", "first", 0):
        var = 0
    elif variable in ("y", "second", 1):
        var = 1
    else:
        raise InputError(f"unknown elimination variable {variable!r}")
    if p.is_zero() or q.is_zero():
        raise InputError("resultant of a zero polynomial")
    if p.is_constant() and q.is_constant():
        raise InputError("resultant of two constants")
    other = 1 - var
    bound = max(p.degree, 0) * max(q.degree, 0)
    nodes = [Fraction(k) for k in range(bound + 1)]
    values = []
    np_, nq_ = p.degree_in(var), q.degree_in(var)
    for t in nodes:
        f = _as_univariate_coeffs(p, var, t)
        g = _as_univariate_coeffs(q, var, t)
        f += [Fraction(0)] * (np_ + 1 - len(f))
        g += [Fraction(0)] * (nq_ + 1 - len(g))
        values.append(determinant(_sylvester(f, g)))
    coeffs = _interpolate(nodes, values)
    return BiPoly({((k, 0) if other == 0 else (0, k)): c for k, c in enumerate(coeffs)})
