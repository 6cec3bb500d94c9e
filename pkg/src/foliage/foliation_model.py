"""Foliated surfaces: the class K_F, marked curves and transformation rules.

Invariance of a curve is always declared input.  The rules implemented here
are the fibration formula for K_F, the tangency / vanishing-index formulas,
the behaviour of K_F under a blow-up and the Riemann-Hurwitz formula for a
generically finite cover.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ContractViolation, InputError, ModelInconsistency
from .numeric_kernel import Q, fmt_rational
from .surface_lattice import BundledClass, DivClass, SurfaceLattice, arithmetic_genus

__all__ = [
    "CurveRecord",
    "FibrationRecord",
    "FoliatedSurface",
    "IndexData",
    "canonical_from_fibration",
    "index_formulas",
    "riemann_hurwitz_pullback",
    "blowup_canonical",
    "unit_dot",
    "unit_square",
]


def unit_dot(c, D: DivClass) -> Fraction:
    """Pairing of one member of ``c`` (a class or a bundle) with ``D``."""
    if isinstance(c, BundledClass):
        return c.unit_dot(D)
    return c.dot(D)


def unit_square(c) -> Fraction:
    if isinstance(c, BundledClass):
        return c.unit_square()
    return c.square()


def unit_pair(c1, c2) -> Fraction:
    """Pairing of one member of ``c1`` with the whole of ``c2``."""
    t2 = c2.total if isinstance(c2, BundledClass) else c2
    return unit_dot(c1, t2)


@dataclass(frozen=True)
class CurveRecord:
    label: str
    cls: DivClass | BundledClass
    invariant: bool
    rational_smooth: bool = False
    mult: int | None = None
    declared_Z: int | None = None

    def __post_init__(self):
        if self.mult is not None and (not isinstance(self.mult, int) or self.mult < 1):
            raise InputError(f"curve {self.label}: fibre multiplicity must be a positive integer")
        if self.rational_smooth:
            if isinstance(self.cls, BundledClass):
                c = self.cls
                K = c.lattice.canonical
                g = 1 + Fraction(1, 2) * (c.unit_square() + c.unit_dot(K))
            else:
                g = arithmetic_genus(self.cls)
            if g != 0:
                raise InputError(f"curve {self.label} declared smooth rational but has genus {g}")

    @property
    def total(self) -> DivClass:
        return self.cls.total if isinstance(self.cls, BundledClass) else self.cls

    @property
    def count(self) -> int:
        return self.cls.count if isinstance(self.cls, BundledClass) else 1

    @property
    def lattice_id(self) -> str:
        return self.cls.lattice_id

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "class": [fmt_rational(c) for c in self.total.coords],
            "invariant": self.invariant,
        }
        if self.rational_smooth:
            out["rational"] = True
        if self.mult is not None:
            out["mult"] = self.mult
        if self.declared_Z is not None:
            out["Z"] = self.declared_Z
        if isinstance(self.cls, BundledClass):
            out["count"] = self.cls.count
        return out

    @classmethod
    def from_json(cls, data: Mapping, lattice: SurfaceLattice) -> "CurveRecord":
        try:
            total = DivClass(data["class"], lattice)
            label = str(data.get("label", ""))
            invariant = bool(data["invariant"])
        except KeyError as exc:
            raise InputError(f"curve record missing field {exc.args[0]!r}") from exc
        c = BundledClass(total, int(data["count"])) if "count" in data else total
        return cls(
            label,
            c,
            invariant,
            bool(data.get("rational", False)),
            data.get("mult"),
            data.get("Z"),
        )


@dataclass(frozen=True)
class FibrationRecord:
    fiber_class: DivClass
    base_genus: int
    fiber_genus: int
    base_canonical_pullback: DivClass

    def __post_init__(self):
        if self.fiber_class.square() != 0:
            raise InputError("fibre class must have square 0")
        if self.fiber_class.dot(self.base_canonical_pullback) != 0:
            raise InputError("fibre class must be orthogonal to f^*K_B")
        if self.base_genus < 0 or self.fiber_genus < 0:
            raise InputError("genera must be non-negative")

    def to_json(self) -> dict:
        return {
            "fiber": [fmt_rational(c) for c in self.fiber_class.coords],
            "g_B": self.base_genus,
            "g_F": self.fiber_genus,
            "base_canonical": [fmt_rational(c) for c in self.base_canonical_pullback.coords],
        }

    @classmethod
    def from_json(cls, data: Mapping, lattice: SurfaceLattice) -> "FibrationRecord":
        return cls(
            DivClass(data["fiber"], lattice),
            int(data["g_B"]),
            int(data["g_F"]),
            DivClass(data["base_canonical"], lattice),
        )


@dataclass(frozen=True)
class FoliatedSurface:
    lattice: SurfaceLattice
    kf: DivClass
    curves: tuple = ()
    reduced: bool = True
    fibration: FibrationRecord | None = None

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        lid = self.lattice.lattice_id
        if self.kf.lattice_id != lid:
            raise InputError("K_F does not live on the surface lattice")
        labels = set()
        for c in self.curves:
            if c.lattice_id != lid:
                raise InputError(f"curve {c.label} does not live on the surface lattice")
            if c.label in labels:
                raise InputError(f"duplicate curve label {c.label!r}")
            labels.add(c.label)
        if self.fibration is not None and self.fibration.fiber_class.lattice_id != lid:
            raise InputError("fibration record does not live on the surface lattice")

    @property
    def ks(self) -> DivClass:
        return self.lattice.canonical

    @property
    def normal_class(self) -> DivClass:
        """N_F = K_F - K_S."""
        return self.kf - self.ks

    def curve(self, label: str) -> CurveRecord:
        for c in self.curves:
            if c.label == label:
                return c
        raise InputError(f"no curve labelled {label!r}")

    def to_json(self) -> dict:
        out = {
            "lattice": self.lattice.to_json(),
            "kf": [fmt_rational(c) for c in self.kf.coords],
            "curves": [c.to_json() for c in self.curves],
            "reduced": self.reduced,
        }
        if self.fibration is not None:
            out["fibration"] = self.fibration.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "FoliatedSurface":
        try:
            lattice = SurfaceLattice.from_json(data["lattice"])
            kf = DivClass(data["kf"], lattice)
        except KeyError as exc:
            raise InputError(f"model JSON missing field {exc.args[0]!r}") from exc
        curves = [CurveRecord.from_json(c, lattice) for c in data.get("curves", [])]
        fib = data.get("fibration")
        return cls(
            lattice,
            kf,
            curves,
            bool(data.get("reduced", True)),
            FibrationRecord.from_json(fib, lattice) if fib else None,
        )


def canonical_from_fibration(S: SurfaceLattice, K_rel: DivClass, components: Sequence[CurveRecord]) -> DivClass:
    """K_F = K_rel + sum (1 - a_i) C_i over fibre components with multiplicity a_i."""
    if K_rel.lattice_id != S.lattice_id:
        raise InputError("relative canonical class does not live on S")
    out = K_rel
    for c in components:
        if c.mult is None:
            raise InputError(f"fibre component {c.label} has no multiplicity")
        if c.lattice_id != S.lattice_id:
            raise InputError(f"fibre component {c.label} does not live on S")
        out = out + (1 - c.mult) * c.total
    return out


@dataclass(frozen=True)
class IndexData:
    tang: Fraction | None = None
    Z: Fraction | None = None
    CS: Fraction | None = None


def index_formulas(FS: FoliatedSurface, C: CurveRecord) -> IndexData:
    """tang for a non-invariant curve; (Z, CS) for an invariant one.

    Bundled curves are evaluated on one member.
    """
    kf_c = unit_dot(C.cls, FS.kf)
    c2 = unit_square(C.cls)
    if not C.invariant:
        tang = kf_c + c2
        if tang < 0:
            raise ModelInconsistency(
                f"negative tangency {tang} on non-invariant curve {C.label}", curve=C.label, tang=str(tang)
            )
        return IndexData(tang=tang)
    chi_c = -unit_dot(C.cls, FS.ks) - c2
    return IndexData(Z=kf_c + chi_c, CS=c2)


def _cover_pullback(cover: SurfaceLattice, base: SurfaceLattice, D: DivClass) -> DivClass:
    if cover is base or cover.lattice_id == base.lattice_id:
        return D
    return cover.pullback(D)


def riemann_hurwitz_pullback(
    FS: FoliatedSurface,
    cover: SurfaceLattice,
    ramified: Sequence = (),
    contracted_correction=None,
) -> DivClass:
    """K_F~ = Pi^*K_F + sum (t_i - 1) R_i + E for a generically finite cover.

    ``ramified`` holds ``(curve, t_i)`` pairs with curves given as DivClass or
    CurveRecord on the cover.  ``contracted_correction`` is either a DivClass
    or a list of ``(coefficient, curve class)`` pairs supported on contracted
    curves; with the latter form the coefficients are checked for
    non-negativity when the source foliation is reduced.
    """
    out = _cover_pullback(cover, FS.lattice, FS.kf)
    for item, t in ramified:
        if not isinstance(t, int) or t < 2:
            raise InputError(f"ramification index must be an integer >= 2, got {t!r}")
        if isinstance(item, CurveRecord):
            if item.invariant:
                raise InputError(f"ramified curve {item.label} must be non-invariant upstairs")
            item = item.total
        if item.lattice_id != cover.lattice_id:
            raise InputError("ramified curve does not live on the cover")
        out = out + (t - 1) * item
    if contracted_correction is None:
        return out
    if isinstance(contracted_correction, DivClass):
        terms = [(c, cover.cls(lab)) for lab, c in contracted_correction.as_dict().items()]
        corr = contracted_correction
    else:
        terms = [(Q(c), cls_) for c, cls_ in contracted_correction]
        corr = sum((c * cls_ for c, cls_ in terms), cover.zero())
    if FS.reduced:
        bad = [c for c, _ in terms if c < 0]
        if bad:
            raise ContractViolation(
                "correction term over contracted curves is not effective for a reduced source",
                coefficients=[fmt_rational(c) for c in bad],
            )
    return out + corr


def blowup_canonical(
    FS: FoliatedSurface,
    blown: SurfaceLattice,
    reduced_point: bool,
    coefficient: int | None = None,
    exceptional: str | None = None,
) -> DivClass:
    """K_F~ = sigma^*K_F + a E after blowing up one point.

    ``a`` defaults to 1 at a reduced (or regular) point and to -1 for the
    radial model of a non-reduced point; pass ``coefficient`` to override
    (a reduced non-degenerate singularity gives 0).
    """
    if blown.parent is None or blown.parent.lattice_id != FS.lattice.lattice_id:
        raise InputError("blown-up lattice is not a blow-up of the foliated surface")
    label = exceptional or blown.basis[-1]
    a = coefficient if coefficient is not None else (1 if reduced_point else -1)
    return blown.pullback(FS.kf) + a * blown.cls(label)
