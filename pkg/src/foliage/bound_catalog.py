"""Inequalities between vol(F), p_g(F) and the canonical map, evaluated exactly.

Every bound is a row of data: an id, an applicability predicate on the
invariant record, a left side and a right side.  Right sides may carry one
square root; they are held as ``a + b*sqrt(n)`` and compared by sign-aware
squaring, so no floating point is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .errors import InputError
from .numeric_kernel import Q, fmt_rational

__all__ = [
    "Surd",
    "MapKind",
    "ImageData",
    "InvariantRecord",
    "Bound",
    "BoundResult",
    "BoundReport",
    "CATALOG",
    "AUXILIARY",
    "evaluate_bounds",
    "compare",
    "castelnuovo_bound",
    "clifford_check",
    "clifford_status",
    "minimal_degree_check",
]

SURFACE_CLASSES = ("rational", "ruled_irrational", "non_ruled", "general_type", "k3", "unknown")
NOT_RULED = ("non_ruled", "general_type", "k3")
FLAGS = ("is_10_surface", "is_12_surface")


@dataclass(frozen=True)
class Surd:
    """a + b*sqrt(n) with rational a, b and a non-negative integer n."""

    a: Fraction
    b: Fraction = Fraction(0)
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", Q(self.a))
        object.__setattr__(self, "b", Q(self.b))
        if self.n < 0:
            raise InputError("negative radicand")
        r = math.isqrt(self.n)
        if r * r == self.n or self.b == 0:
            object.__setattr__(self, "a", self.a + self.b * r if self.b else self.a)
            object.__setattr__(self, "b", Fraction(0))
            object.__setattr__(self, "n", 0)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.n)

    def scale(self, k) -> "Surd":
        k = Q(k)
        return Surd(self.a * k, self.b * k, self.n)

    def to_json(self):
        if self.is_rational:
            return fmt_rational(self.a)
        return {"a": fmt_rational(self.a), "b": fmt_rational(self.b), "radicand": self.n}

    def __str__(self):
        if self.is_rational:
            return fmt_rational(self.a)
        return f"{fmt_rational(self.a)} + {fmt_rational(self.b)}*sqrt({self.n})"


def compare(q, s: Surd) -> int:
    """Sign of q - s, exactly."""
    diff = Q(q) - s.a
    if s.is_rational:
        return (diff > 0) - (diff < 0)
    # compare diff with b*sqrt(n)
    rhs_sign = 1 if s.b > 0 else -1
    lhs_sign = (diff > 0) - (diff < 0)
    if lhs_sign != rhs_sign:
        return (lhs_sign > rhs_sign) - (lhs_sign < rhs_sign)
    l2, r2 = diff * diff, s.b * s.b * s.n
    c = (l2 > r2) - (l2 < r2)
    return c if rhs_sign > 0 else -c


@dataclass(frozen=True)
class MapKind:
    kind: str
    deg_phi: int | None = None
    d: int | None = None
    g_F: int | None = None
    g_B: int | None = None
    same_as_fibration: bool | None = None
    fiber_h0_one: bool | None = None

    def __post_init__(self):
        if self.kind not in ("generically_finite", "fibration", "unknown"):
            raise InputError(f"unknown map kind {self.kind!r}")
        if self.kind == "generically_finite" and (self.deg_phi is None or self.deg_phi < 1):
            raise InputError("generically finite map needs deg_phi >= 1")
        if self.kind == "fibration":
            for name in ("d", "g_F", "g_B"):
                v = getattr(self, name)
                if v is None or v < 0:
                    raise InputError(f"fibration needs a non-negative {name}")
            if self.d < 1:
                raise InputError("fibration needs d = K_F.F >= 1")

    @property
    def same(self) -> bool:
        if self.same_as_fibration is not None:
            return self.same_as_fibration
        return self.d == 2 * self.g_F - 2

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        for name in ("deg_phi", "d", "g_F", "g_B", "same_as_fibration", "fiber_h0_one"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        return out

    @classmethod
    def from_json(cls, data) -> "MapKind":
        if isinstance(data, str):
            return cls(data)
        try:
            return cls(**{k: data[k] for k in data})
        except TypeError as exc:
            raise InputError(f"bad map_kind: {exc}") from exc


@dataclass(frozen=True)
class ImageData:
    """The canonical image Sigma in P^N: its degree, N and birational class."""

    degree: int
    N: int
    surface_class: str = "unknown"
    is_10_surface: bool = False

    def __post_init__(self):
        if self.surface_class not in SURFACE_CLASSES:
            raise InputError(f"unknown image class {self.surface_class!r}")
        if self.N < 2 or self.degree < 1:
            raise InputError("image needs N >= 2 and degree >= 1")

    def to_json(self) -> dict:
        return {"degree": self.degree, "N": self.N, "class": self.surface_class, "is_10_surface": self.is_10_surface}


@dataclass(frozen=True)
class InvariantRecord:
    vol: Fraction
    pg: int
    map_kind: MapKind = field(default_factory=lambda: MapKind("unknown"))
    surface_class: str = "unknown"
    special_flags: frozenset = frozenset()
    integrable: bool | None = None
    reduced: bool | None = None
    image: ImageData | None = None

    def __post_init__(self):
        object.__setattr__(self, "vol", Q(self.vol))
        object.__setattr__(self, "special_flags", frozenset(self.special_flags))
        if self.vol <= 0:
            raise InputError("vol must be positive for a foliation of general type")
        if not isinstance(self.pg, int) or self.pg < 0:
            raise InputError("pg must be a non-negative integer")
        if self.surface_class not in SURFACE_CLASSES:
            raise InputError(f"unknown surface class {self.surface_class!r}")
        bad = self.special_flags - set(FLAGS)
        if bad:
            raise InputError(f"unknown flags {sorted(bad)}")
        if self.map_kind.kind != "unknown" and self.pg < 2:
            raise InputError("a canonical map needs pg >= 2")
        if self.map_kind.kind == "generically_finite" and self.pg < 3:
            raise InputError("a generically finite canonical map needs pg >= 3")
        if self.map_kind.kind == "fibration" and not self.map_kind.same and self.pg < self.map_kind.g_B:
            raise InputError("pg >= g(B) fails for a fibration different from the foliation")

    def to_json(self) -> dict:
        out = {
            "vol": fmt_rational(self.vol),
            "pg": self.pg,
            "map_kind": self.map_kind.to_json(),
            "surface_class": self.surface_class,
            "special_flags": sorted(self.special_flags),
        }
        if self.integrable is not None:
            out["integrable"] = self.integrable
        if self.reduced is not None:
            out["reduced"] = self.reduced
        if self.image is not None:
            out["image"] = self.image.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "InvariantRecord":
        try:
            vol = Q(data["vol"])
            pg = data["pg"]
        except KeyError as exc:
            raise InputError(f"record missing {exc.args[0]!r}") from exc
        if not isinstance(pg, int) or isinstance(pg, bool):
            raise InputError("pg must be an integer")
        img = data.get("image")
        if img is not None:
            img = ImageData(int(img["degree"]), int(img["N"]), img.get("class", "unknown"), bool(img.get("is_10_surface", False)))
        return cls(
            vol,
            pg,
            MapKind.from_json(data.get("map_kind", "unknown")),
            data.get("surface_class", "unknown"),
            frozenset(data.get("special_flags", ())),
            data.get("integrable"),
            data.get("reduced"),
            img,
        )


# --------------------------------------------------------------- the table

@dataclass(frozen=True)
class Bound:
    id: str
    statement: str
    applies: Callable[[InvariantRecord], bool]
    lhs: Callable[[InvariantRecord], Fraction]
    rhs: Callable[[InvariantRecord], Surd]
    relation: str = ">="
    equality_note: str | None = None
    radicand: Callable[[InvariantRecord], int] | None = None


def _gf(r):
    return r.map_kind.kind == "generically_finite"


def _bir(r):
    return _gf(r) and r.map_kind.deg_phi == 1


def _fib(r):
    return r.map_kind.kind == "fibration"


def _fib_same(r):
    return _fib(r) and r.map_kind.same


def _fib_other(r):
    return _fib(r) and not r.map_kind.same


def _not_ruled(r):
    return r.surface_class in NOT_RULED


def _gt(r):
    return r.surface_class == "general_type"


def _slope(d) -> Fraction:
    return Fraction(d * (d + 2), d + 1)


def _image_gt(r):
    return r.image is not None and r.image.surface_class == "general_type"


def _h0_one(r):
    return _fib(r) and r.map_kind.fiber_h0_one is True


def _rational(f):
    return lambda r: Surd(f(r))


CATALOG = (
    Bound(
        "canonical_degree",
        "deg(phi) <= vol / (pg - 2)",
        _gf,
        lambda r: Fraction(r.map_kind.deg_phi),
        lambda r: Surd(r.vol / (r.pg - 2)),
        "<=",
        "image is a surface of minimal degree in P^(pg-1)",
    ),
    Bound(
        "canonical_degree_weak",
        "deg(phi) <= vol",
        _gf,
        lambda r: Fraction(r.map_kind.deg_phi),
        lambda r: Surd(r.vol),
        "<=",
        "pg = 3 and the image is P^2",
    ),
    Bound(
        "birational_noether",
        "vol >= pg - 2 (canonical map birational)",
        _bir,
        lambda r: r.vol,
        _rational(lambda r: r.pg - 2),
        ">=",
        "image of minimal degree; S rational",
    ),
    Bound(
        "birational_not_ruled",
        "vol >= 2 pg - 4 (birational, S not ruled)",
        lambda r: _bir(r) and _not_ruled(r),
        lambda r: r.vol,
        _rational(lambda r: 2 * r.pg - 4),
        ">=",
        "S birational to a K3 surface",
    ),
    Bound(
        "birational_general_type",
        "vol >= 2 pg - 4 + (sqrt(8 pg - 31) - 7) / 2 (birational, S of general type)",
        lambda r: _bir(r) and _gt(r),
        lambda r: r.vol,
        lambda r: Surd(2 * r.pg - 4 - Fraction(7, 2), Fraction(1, 2), 8 * r.pg - 31),
        ">=",
        "S birational to a (1,0)-surface",
        lambda r: 8 * r.pg - 31,
    ),
    Bound(
        "birational_general_type_not_10",
        "vol >= 2 pg - 4 + (sqrt(8 pg - 23) - 3) / 2 (birational, general type, not a (1,0)-surface)",
        lambda r: _bir(r) and _gt(r) and "is_10_surface" not in r.special_flags,
        lambda r: r.vol,
        lambda r: Surd(2 * r.pg - 4 - Fraction(3, 2), Fraction(1, 2), 8 * r.pg - 23),
        ">=",
        "S birational to a (1,2)-surface",
        lambda r: 8 * r.pg - 23,
    ),
    Bound(
        "fibration_same_foliation",
        "vol >= d(d+2)/(d+1) (pg - 1) with d = 2g(F) - 2",
        _fib_same,
        lambda r: r.vol,
        lambda r: Surd(_slope(r.map_kind.d) * (r.pg - 1)),
    ),
    Bound(
        "fibration_other_quadratic",
        "vol >= d (pg - 1)^2 / pg",
        _fib_other,
        lambda r: r.vol,
        lambda r: Surd(Fraction(r.map_kind.d * (r.pg - 1) ** 2, r.pg)),
    ),
    Bound(
        "fibration_other_base_genus",
        "vol >= d(d+2)/(d+1) (pg - 1 + g(B)), g(B) >= 1",
        lambda r: _fib_other(r) and r.map_kind.g_B >= 1,
        lambda r: r.vol,
        lambda r: Surd(_slope(r.map_kind.d) * (r.pg - 1 + r.map_kind.g_B)),
    ),
    Bound(
        "fibration_other_small_degree",
        "vol >= 2d(d+2)/(d+1) (pg - 1), d < 2g(F) - 2 and pg = g(B) >= 2",
        lambda r: _fib_other(r)
        and r.map_kind.d < 2 * r.map_kind.g_F - 2
        and r.pg == r.map_kind.g_B >= 2,
        lambda r: r.vol,
        lambda r: Surd(2 * _slope(r.map_kind.d) * (r.pg - 1)),
    ),
    Bound(
        "noether",
        "vol >= pg - 2",
        lambda r: True,
        lambda r: r.vol,
        _rational(lambda r: r.pg - 2),
        ">=",
        "birational canonical map onto a surface of minimal degree; S rational",
    ),
    Bound(
        "noether_not_ruled",
        "vol >= min(3/2 (pg - 1), 2 (pg - 2)), S not ruled",
        _not_ruled,
        lambda r: r.vol,
        _rational(lambda r: min(Fraction(3, 2) * (r.pg - 1), Fraction(2 * (r.pg - 2)))),
    ),
    Bound(
        "noether_general_type",
        "vol >= 2 (pg - 2), S of general type",
        _gt,
        lambda r: r.vol,
        _rational(lambda r: 2 * (r.pg - 2)),
        ">=",
        "two-to-one canonical map onto a surface of minimal degree",
    ),
    Bound(
        "image_degree_general_type",
        "deg(Sigma) >= 2(N-1) + (sqrt(8N - 15) - 3)/2, Sigma of general type, not a (1,0)-surface",
        lambda r: _image_gt(r) and not r.image.is_10_surface,
        lambda r: Fraction(r.image.degree),
        lambda r: Surd(2 * (r.image.N - 1) - Fraction(3, 2), Fraction(1, 2), 8 * r.image.N - 15),
        ">=",
        "Sigma birational to a (1,2)-surface",
        lambda r: 8 * r.image.N - 15,
    ),
    Bound(
        "image_degree_10_surface",
        "deg(Sigma) >= 2(N-1) + (sqrt(8N - 23) - 7)/2, Sigma birational to a (1,0)-surface",
        lambda r: _image_gt(r) and r.image.is_10_surface,
        lambda r: Fraction(r.image.degree),
        lambda r: Surd(2 * (r.image.N - 1) - Fraction(7, 2), Fraction(1, 2), 8 * r.image.N - 23),
        ">=",
        None,
        lambda r: 8 * r.image.N - 23,
    ),
    Bound(
        "fiber_section_genus_ge3",
        "vol >= 2d(d+2)/(d+1) (pg - 1), h0(K_F|F) = 1, g(F) >= 3",
        lambda r: _h0_one(r) and r.map_kind.g_F >= 3,
        lambda r: r.vol,
        lambda r: Surd(2 * _slope(r.map_kind.d) * (r.pg - 1)),
    ),
    Bound(
        "fiber_section_genus2",
        "vol >= 3 (pg - 1) if d = 1, 8/3 (pg - 1) if d = 2; h0(K_F|F) = 1, g(F) = 2",
        lambda r: _h0_one(r) and r.map_kind.g_F == 2 and r.map_kind.d in (1, 2),
        lambda r: r.vol,
        lambda r: Surd((3 if r.map_kind.d == 1 else Fraction(8, 3)) * (r.pg - 1)),
    ),
    Bound(
        "fiber_section_genus1",
        "vol >= 3/2 (pg - 1), h0(K_F|F) = 1, g(F) = 1",
        lambda r: _h0_one(r) and r.map_kind.g_F == 1,
        lambda r: r.vol,
        lambda r: Surd(Fraction(3, 2) * (r.pg - 1)),
    ),
    Bound(
        "integrable_not_ruled",
        "vol >= 2 (pg - 2), reduced algebraically integrable F, S not ruled",
        lambda r: r.integrable is True and r.reduced is not False and _not_ruled(r),
        lambda r: r.vol,
        _rational(lambda r: 2 * (r.pg - 2)),
    ),
)

# Consequences restated in other words: scaled versions of the birational
# bounds and the d = 1 fibre bounds.
AUXILIARY = (
    Bound(
        "image_not_ruled_scaled",
        "vol >= deg(phi) (2 pg - 4), image not ruled",
        lambda r: _gf(r) and r.image is not None and r.image.surface_class in NOT_RULED,
        lambda r: r.vol,
        lambda r: Surd(r.map_kind.deg_phi * (2 * r.pg - 4)),
    ),
    Bound(
        "image_general_type_scaled",
        "vol >= deg(phi) (2 pg - 4 + (sqrt(8 pg - 31) - 7)/2), image of general type",
        lambda r: _gf(r) and _image_gt(r),
        lambda r: r.vol,
        lambda r: Surd(2 * r.pg - 4 - Fraction(7, 2), Fraction(1, 2), 8 * r.pg - 31).scale(r.map_kind.deg_phi),
        ">=",
        None,
        lambda r: 8 * r.pg - 31,
    ),
    Bound(
        "image_general_type_not_10_scaled",
        "vol >= deg(phi) (2 pg - 4 + (sqrt(8 pg - 23) - 3)/2), image of general type, not a (1,0)-surface",
        lambda r: _gf(r) and _image_gt(r) and not r.image.is_10_surface,
        lambda r: r.vol,
        lambda r: Surd(2 * r.pg - 4 - Fraction(3, 2), Fraction(1, 2), 8 * r.pg - 23).scale(r.map_kind.deg_phi),
        ">=",
        None,
        lambda r: 8 * r.pg - 23,
    ),
    Bound(
        "fiber_degree_one_genus_ge2",
        "vol >= 3 (pg - 1), d = 1, g(F) >= 2",
        lambda r: _fib(r) and r.map_kind.d == 1 and r.map_kind.g_F >= 2,
        lambda r: r.vol,
        lambda r: Surd(3 * (r.pg - 1)),
    ),
    Bound(
        "fiber_degree_one_genus1",
        "vol >= 3/2 (pg - 1), d = 1, g(F) = 1",
        lambda r: _fib(r) and r.map_kind.d == 1 and r.map_kind.g_F == 1,
        lambda r: r.vol,
        lambda r: Surd(Fraction(3, 2) * (r.pg - 1)),
    ),
)


@dataclass(frozen=True)
class BoundResult:
    bound_id: str
    applicable: bool
    lhs: Fraction | None = None
    rhs: Surd | None = None
    status: str | None = None
    note: str | None = None

    def to_json(self) -> dict:
        out = {"id": self.bound_id, "applicable": self.applicable}
        if self.applicable:
            out.update(lhs=fmt_rational(self.lhs), rhs=self.rhs.to_json(), status=self.status)
            if self.note:
                out["note"] = self.note
        elif self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class BoundReport:
    results: tuple

    def get(self, bound_id: str) -> BoundResult:
        for r in self.results:
            if r.bound_id == bound_id:
                return r
        raise KeyError(bound_id)

    def applicable(self) -> list:
        return [r for r in self.results if r.applicable]

    def to_json(self) -> dict:
        return {"bounds": [r.to_json() for r in self.results]}


def _evaluate(b: Bound, rec: InvariantRecord) -> BoundResult:
    if not b.applies(rec):
        return BoundResult(b.id, False)
    if b.radicand is not None and b.radicand(rec) < 0:
        return BoundResult(b.id, False, note="radicand negative")
    lhs, rhs = b.lhs(rec), b.rhs(rec)
    c = compare(lhs, rhs)
    if c == 0:
        status = "equality"
    elif (c > 0) == (b.relation == ">="):
        status = "holds"
    else:
        status = "violated"
    note = b.equality_note if status == "equality" else None
    return BoundResult(b.id, True, lhs, rhs, status, note)


def evaluate_bounds(rec: InvariantRecord, include_auxiliary: bool = False) -> BoundReport:
    table = CATALOG + AUXILIARY if include_auxiliary else CATALOG
    return BoundReport(tuple(_evaluate(b, rec) for b in table))


# ---------------------------------------------------------- curve helpers

def castelnuovo_bound(d: int, h0: int) -> int:
    """Castelnuovo's upper bound for the genus of a degree-d curve spanning P^(h0-1)."""
    if h0 < 3:
        raise InputError("Castelnuovo's bound needs h0 >= 3")
    if d < h0 - 1:
        raise InputError("a non-degenerate curve in P^(h0-1) has degree >= h0 - 1")
    m = (d - 1) // (h0 - 2)
    eps = (d - 1) - m * (h0 - 2)
    return m * (m - 1) // 2 * (h0 - 2) + m * eps


def clifford_check(deg: int, h0: int) -> bool:
    """Clifford's inequality deg >= 2 h0 - 2 for a special divisor."""
    return deg >= 2 * h0 - 2


def clifford_status(deg: int, h0: int) -> str:
    if deg == 2 * h0 - 2:
        return "equality"
    return "holds" if deg > 2 * h0 - 2 else "violated"


def minimal_degree_check(degSigma: int, N: int) -> dict:
    """Degree status of a non-degenerate surface in P^N plus the sharper thresholds."""
    if N < 3:
        raise InputError("needs N >= 3")
    if degSigma < N - 1:
        status = "violated"
    elif degSigma == N - 1:
        status = "minimal_degree"
    else:
        status = "holds"
    gt = Surd(2 * (N - 1) - Fraction(3, 2), Fraction(1, 2), 8 * N - 15)
    ten = Surd(2 * (N - 1) - Fraction(7, 2), Fraction(1, 2), 8 * N - 23)

    def st(s):
        c = compare(degSigma, s)
        return "equality" if c == 0 else ("holds" if c > 0 else "violated")

    return {
        "status": status,
        "k3_threshold": degSigma == 2 * (N - 1),
        "not_ruled_threshold": 2 * (N - 1),
        "general_type": {"rhs": gt.to_json(), "status": st(gt)},
        "ten_surface": {"rhs": ten.to_json(), "status": st(ten)},
    }
