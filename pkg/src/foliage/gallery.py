"""Parametric worked examples rebuilt as lattice models, plus a cross-check harness.

Each constructor assembles the surface lattice from the standard surfaces,
blow-ups and covers, builds K_F with the rules of :mod:`foliation_model`
and records the closed-form values the construction is expected to
reproduce.  :func:`verify_example` recomputes every quantity through the
engines and reports engine and expected values side by side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .bound_catalog import ImageData, InvariantRecord, MapKind
from .errors import FoliageError, InputError
from .foliation_model import (
    CurveRecord,
    FibrationRecord,
    FoliatedSurface,
    canonical_from_fibration,
    index_formulas,
    riemann_hurwitz_pullback,
)
from .numeric_kernel import fmt_rational
from .surface_lattice import (
    BundledClass,
    DivClass,
    arithmetic_genus,
    blow_up,
    chi_of_class,
    finite_cover,
    h0_closed_form,
    hirzebruch,
    product_ruled,
    projective_plane,
)
from .zariski_engine import check_decomposition, zariski_decompose

__all__ = ["GalleryCase", "VerificationReport", "CASES", "build_example", "verify_example", "parse_params"]

CASES = {
    "ex3_1": ("m", "n", "k"),
    "ex3_2": ("d",),
    "ex3_3": ("d",),
    "ex3_4": ("d",),
    "ex6_4": ("g", "n"),
    "ex6_5": ("gB", "m", "g"),
}


@dataclass
class GalleryCase:
    id: str
    params: dict
    model: FoliatedSurface
    expected: dict
    candidates: list
    pg_route: str
    pg_engine: Callable = field(repr=False)
    extra_engine: dict = field(default_factory=dict, repr=False)
    map_kind: MapKind = field(default_factory=lambda: MapKind("unknown"))
    surface_class: str = "unknown"
    flags: frozenset = frozenset()
    integrable: bool | None = None
    image_class: str | None = None
    documented: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def record(self, vol=None, pg=None) -> InvariantRecord:
        """Invariant record of the case, from the given (default: expected) vol and pg."""
        vol = self.expected["vol"] if vol is None else vol
        pg = self.expected["pg"] if pg is None else pg
        if isinstance(pg, Fraction) and pg.denominator == 1:
            pg = int(pg)
        image = None
        # a birational canonical morphism maps onto a surface of degree vol in P^(pg-1)
        if self.image_class and self.map_kind.deg_phi == 1:
            image = ImageData(int(vol), pg - 1, self.image_class, "is_10_surface" in self.flags)
        return InvariantRecord(
            vol, pg, self.map_kind, self.surface_class, self.flags, self.integrable, self.model.reduced, image
        )


def _need(params: Mapping, names) -> list:
    out = []
    for n in names:
        if n not in params:
            raise InputError(f"missing parameter {n!r}")
        v = params[n]
        if isinstance(v, bool) or not isinstance(v, int):
            raise InputError(f"parameter {n} must be an integer, got {v!r}")
        out.append(v)
    return out


def parse_params(text: str | None) -> dict:
    """``"m=4,n=1,k=1"`` -> ``{"m": 4, "n": 1, "k": 1}``."""
    out = {}
    if not text:
        return out
    for part in text.replace(";", ",").split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise InputError(f"bad parameter {part!r}, expected name=value")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = int(v)
        except ValueError:
            raise InputError(f"parameter {k.strip()} must be an integer") from None
    return out


def _h0(L, D) -> int:
    v = h0_closed_form(L, D)
    if v is None:
        raise InputError(f"no closed form for h0 on {L.lattice_id}")
    return v


# ------------------------------------------------------------ constructors

def _ex3_1(m, n, k) -> GalleryCase:
    if n < 0 or k < 1 or m <= 3 * n:
        raise InputError("ex3_1 needs n >= 0, k >= 1 and m > 3n")
    Y = hirzebruch(n)
    half = Y.make(C0=3, G=m)
    S = finite_cover(Y, 2, half)
    fib = S.cls("pi*G")
    # K_{S/P^1} = K_S - f^*K_{P^1}; no multiple fibre components
    k_rel = S.canonical + 2 * fib
    kf = canonical_from_fibration(S, k_rel, [])
    curves = [CurveRecord("C0~", S.cls("pi*C0"), invariant=False)] if n > 0 else []
    FS = FoliatedSurface(S, kf, curves, True, FibrationRecord(fib, 0, 2, -2 * fib))
    R = 2 * half
    k_rel_y = Y.canonical + 2 * Y.cls("G")
    hodge = R.dot(k_rel_y + half) / 4
    delta = 2 * m - 3 * n + 1
    if k > 1:
        Sk = finite_cover(S, k, delta * fib)
        kf_k = riemann_hurwitz_pullback(FS, Sk)
        fib_k = Sk.pullback(fib)
        curves = [CurveRecord(c.label, Sk.pullback(c.total), c.invariant) for c in curves]
        FS = FoliatedSurface(Sk, kf_k, curves, True, FibrationRecord(fib_k, 0, 2, -2 * fib_k))

    def pg():
        # rank-2 semipositive Hodge bundle of degree `hodge`; twists by -i*delta vanish once delta > hodge
        if hodge.denominator != 1 or delta <= hodge:
            raise InputError("Hodge-bundle route needs an integral degree below delta")
        return 2 + hodge.numerator

    return GalleryCase(
        "ex3_1",
        {"m": m, "n": n, "k": k},
        FS,
        {"vol": Fraction(k * (4 * m - 6 * n)), "pg": 2 * m - 3 * n + 2, "deg_phi": 2 * k},
        list(FS.curves),
        "hodge_bundle",
        pg,
        map_kind=MapKind("generically_finite", deg_phi=2 * k),
        surface_class="general_type",
        integrable=True,
    )


def _ex3_2(d) -> GalleryCase:
    if d < 1:
        raise InputError("ex3_2 needs d >= 1")
    P2 = projective_plane()
    H = P2.cls("H")
    lines = [CurveRecord(f"L{i}", H, invariant=True, rational_smooth=True) for i in range(1, 5)]
    base = FoliatedSurface(P2, H, lines)
    mults = [1, d - 1, 1, d - 1]
    if d == 1:
        FS = base
        pg = lambda: _h0(P2, H)
    else:
        # normalised cyclic cover; every branch line is totally ramified
        K = [1 - Fraction(4, d)]
        S = finite_cover(P2, d, 2 * H, canonical=K, chi=1, prefix="pi*")
        kf = riemann_hurwitz_pullback(base, S)
        up = [CurveRecord(c.label, S.pullback(H) / d, True) for c in lines]
        FS = FoliatedSurface(S, kf, up)

        def pg():
            total = 0
            for i in range(d):
                twist = 1 - 2 * i + sum(i * a // d for a in mults)
                total += _h0(P2, twist * H)
            return total

    return GalleryCase(
        "ex3_2",
        {"d": d},
        FS,
        {"vol": Fraction(d), "pg": 3, "deg_phi": d},
        [],
        "cyclic_pushforward",
        pg,
        map_kind=MapKind("generically_finite", deg_phi=d),
        surface_class="rational" if d == 1 else "unknown",
    )


def _ex3_3(d) -> GalleryCase:
    if d < 1:
        raise InputError("ex3_3 needs d >= 1")
    P2 = projective_plane()
    H = P2.cls("H")
    base = FoliatedSurface(P2, (d - 1) * H)
    S = finite_cover(P2, 2, 3 * H)
    R = CurveRecord("R", 3 * S.cls("pi*H"), invariant=False)
    kf = riemann_hurwitz_pullback(base, S, [(R, 2)])
    FS = FoliatedSurface(S, kf, [R])
    pg = lambda: _h0(P2, (d + 2) * H) + _h0(P2, (d - 1) * H)
    return GalleryCase(
        "ex3_3",
        {"d": d},
        FS,
        {"vol": Fraction(2 * (d + 2) ** 2), "pg": d * d + 4 * d + 6, "deg_phi": 1, "KS2": Fraction(0)},
        [],
        "cyclic_pushforward",
        pg,
        {"KS2": lambda: S.canonical.square()},
        map_kind=MapKind("generically_finite", deg_phi=1),
        surface_class="k3",
        image_class="k3",
        notes={"kf_is_pullback": kf == S.pullback((d + 2) * H)},
    )


def _ex3_4(d) -> GalleryCase:
    if d < 2:
        raise InputError("ex3_4 needs d >= 2")
    Y2 = hirzebruch(2)
    half = Y2.make(C0=3, G=5)
    S = finite_cover(Y2, 2, half)
    E = S.cls("pi*C0") / 2
    Ft = S.cls("pi*G")
    D2 = CurveRecord("D2~", S.pullback(Y2.make(C0=5, G=10)) / 2, invariant=False)
    Erec = CurveRecord("E", E, invariant=True, rational_smooth=True, declared_Z=2)

    def kf_from(kf2):
        base = FoliatedSurface(Y2, kf2)
        return riemann_hurwitz_pullback(base, S, [(D2, 2)])

    kf = kf_from(Y2.make(C0=d, G=2 * d))
    FS = FoliatedSurface(S, kf, [Erec, D2])
    # class obtained from the field degree instead, K_F0 = (d-1)H
    kf_alt = kf_from(Y2.make(C0=d - 1, G=2 * (d - 1)))
    return GalleryCase(
        "ex3_4",
        {"d": d},
        FS,
        {
            "vol": Fraction((2 * d + 5) ** 2),
            "pg": 2 * d * d + 9 * d + 13,
            "deg_phi": 1,
            "KS2": Fraction(1),
        },
        [Erec],
        "riemann_roch_chi",
        lambda: chi_of_class(S, kf),
        # contract the (-1)-curve E to reach the minimal model
        {"KS2": lambda: (S.canonical - E).square()},
        map_kind=MapKind("generically_finite", deg_phi=1),
        surface_class="general_type",
        flags=frozenset({"is_12_surface"}),
        image_class="general_type",
        notes={"vol_from_field_degree": kf_alt.square()},
    )


def _ex6_4(g, n) -> GalleryCase:
    if g < 2 or n < 2 or n % 2:
        raise InputError("ex6_4 needs g >= 2 and an even n >= 2")
    m = (2 * g - 3) * n + 2
    Y = hirzebruch(n)
    half = Y.make(C0=g + 1, G=(2 * g - 1) * n + 1)
    ta, tb = f"Ta[{m}]", f"Tb[{m * (2 * g + 1)}]"
    S = finite_cover(Y, 2, half, extra_classes=[(ta, {ta: -2 * m}), (tb, {tb: -2 * m * (2 * g + 1)})])
    Ta = BundledClass(S.cls(ta), m)
    Tb = BundledClass(S.cls(tb), m * (2 * g + 1))
    fib = S.cls("pi*G")
    Z0 = BundledClass((m * fib - Ta.total - Tb.total) / 2, m)
    C0t = (S.cls("pi*C0") - Ta.total) / 2
    k_rel = S.canonical + 2 * fib
    rec_z0 = CurveRecord("F0", Z0, invariant=True, mult=2)
    kf = canonical_from_fibration(S, k_rel, [rec_z0])
    curves = [
        rec_z0,
        CurveRecord("Ta", Ta, invariant=True, rational_smooth=True, mult=1, declared_Z=1),
        CurveRecord("Tb", Tb, invariant=True, rational_smooth=True, mult=1, declared_Z=1),
        CurveRecord("C0~", C0t, invariant=False),
    ]
    FS = FoliatedSurface(S, kf, curves, True, FibrationRecord(fib, 0, g, -2 * fib))

    def pg():
        # Ta, Tb and twice F0 lie in the fixed part; what is left is a pullback
        moving = kf - Ta.total - Tb.total - Z0.total
        if any(moving.coords[Y.rank:]):
            raise InputError("moving part is not a pullback")
        M = Y.make(list(moving.coords[: Y.rank]))
        return _h0(Y, M) + _h0(Y, M - half)

    return GalleryCase(
        "ex6_4",
        {"g": g, "n": n},
        FS,
        {"vol": Fraction(2 * (g - 1) * g * n), "pg": n, "d": 2 * g - 2},
        curves,
        "cyclic_pushforward",
        pg,
        {"d": lambda: kf.dot(fib)},
        map_kind=MapKind("fibration", d=2 * g - 2, g_F=g, g_B=0, same_as_fibration=True),
        surface_class="unknown",
        integrable=True,
        notes={"m": m},
    )


def _ex6_5(gB, m, g) -> GalleryCase:
    if gB < 2 or g < 2 or m < 1:
        raise InputError("ex6_5 needs gB >= 2, g >= 2 and m >= 1")
    Yh = product_ruled(gB)
    Dh = Yh.make(A=2 * m, Bf=1)
    Y = Yh
    for i in range(1, 2 * g + 2):
        Y = blow_up(Y, 2 * m, bundled=True, prefix=f"E{i}")
    up = lambda c: _pull_to(Y, c)
    ex = [Y.cls(f"E{i}[{2 * m}]") for i in range(1, 2 * g + 2)]
    sum_ex = sum(ex, Y.zero())
    half = up(Yh.make(A=m, Bf=g + 1)) - sum_ex
    S = finite_cover(Y, 2, half)
    C = S.pullback(up(Dh) - sum_ex) / 2
    deltas = [S.pullback(up(Yh.cls("Bf")) - e) / 2 for e in ex]
    ebar = [BundledClass(S.pullback(e), 2 * m) for e in ex]
    F = S.pullback(up(Yh.cls("A")))
    fib_h = S.pullback(up(Yh.cls("Bf")))
    k_rel = S.canonical + 2 * fib_h
    drec = [CurveRecord(f"Delta{i}", c, invariant=True, mult=2) for i, c in enumerate(deltas, 1)]
    kf = canonical_from_fibration(S, k_rel, drec)
    erec = [
        CurveRecord(f"Ebar{i}", b, invariant=True, rational_smooth=True, mult=1, declared_Z=1)
        for i, b in enumerate(ebar, 1)
    ]
    crec = CurveRecord("C", C, invariant=False)
    fKB = S.pullback(up(Yh.make(A=2 * gB - 2)))
    # h: S -> P^1 has fibres double covering B, branched at the 2m points of D-hat
    h_rec = FibrationRecord(fib_h, 0, 2 * gB - 1 + m, -2 * fib_h)
    FS = FoliatedSurface(S, kf, drec + erec + [crec], True, h_rec)

    def pg():
        # C and the Ebar lie in the fixed part; the rest is f^*K_B
        rest = kf - C - sum((b.total for b in ebar), S.zero())
        if rest != fKB:
            raise InputError("K_F minus its fixed part is not f^*K_B")
        return gB

    return GalleryCase(
        "ex6_5",
        {"gB": gB, "m": m, "g": g},
        FS,
        {
            "vol": Fraction(4 * gB - 4),
            "pg": gB,
            "d": 1,
            "KS2": Fraction(4 * (g - 1) * (2 * gB - 2 + m)),
            "g_F": g,
        },
        drec + erec + [crec],
        "base_canonical",
        pg,
        {
            "d": lambda: kf.dot(F),
            "KS2": lambda: S.canonical.square(),
            "g_F": lambda: arithmetic_genus(F),
        },
        map_kind=MapKind("fibration", d=1, g_F=g, g_B=gB, same_as_fibration=False),
        surface_class="general_type",
        integrable=True,
        documented={"vol": "stated volume differs from the expansion of the stated nef part"},
        notes={"P_stated": S.pullback(up(Yh.make(A=2 * gB - 2)) + up(Dh) / 2)},
    )


def _pull_to(L, D: DivClass) -> DivClass:
    """Pull a class back along a chain of blow-ups."""
    chain = []
    cur = L
    while cur.lattice_id != D.lattice_id:
        if cur.parent is None:
            raise InputError("class is not on an ancestor lattice")
        chain.append(cur)
        cur = cur.parent
    for lat in reversed(chain):
        D = lat.pullback(D)
    return D


_BUILDERS = {
    "ex3_1": _ex3_1,
    "ex3_2": _ex3_2,
    "ex3_3": _ex3_3,
    "ex3_4": _ex3_4,
    "ex6_4": _ex6_4,
    "ex6_5": _ex6_5,
}


def build_example(case_id: str, params: Mapping | None = None) -> GalleryCase:
    if case_id not in _BUILDERS:
        raise InputError(f"unknown gallery case {case_id!r}; choose from {sorted(_BUILDERS)}")
    params = dict(params or {})
    extra = set(params) - set(CASES[case_id])
    if extra:
        raise InputError(f"unexpected parameters {sorted(extra)} for {case_id}")
    return _BUILDERS[case_id](*_need(params, CASES[case_id]))


# ----------------------------------------------------------------- harness

@dataclass
class VerificationReport:
    case: str
    params: dict
    quantities: dict
    zariski: dict | None
    problems: list
    notes: dict

    @property
    def ok(self) -> bool:
        """True when nothing but documented findings disagrees."""
        if self.problems:
            return False
        return all(q["status"] == "match" or q.get("documented") for q in self.quantities.values())

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "params": dict(self.params),
            "quantities": self.quantities,
            "zariski": self.zariski,
            "problems": list(self.problems),
            "notes": self.notes,
            "ok": self.ok,
        }


def _fmt(v):
    if isinstance(v, Fraction):
        return fmt_rational(v)
    if isinstance(v, bool):
        return v
    return fmt_rational(Fraction(v)) if isinstance(v, int) else v


def _compare(engine, stated, route=None, documented=None) -> dict:
    out = {"engine": None if engine is None else _fmt(engine), "paper": _fmt(stated)}
    out["status"] = "match" if engine is not None and Fraction(engine) == Fraction(stated) else "mismatch"
    if route:
        out["route"] = route
    if documented and out["status"] != "match":
        out["documented"] = documented
    return out


def verify_example(case: GalleryCase) -> VerificationReport:
    """Recompute vol, pg and the other recorded quantities; never raises on a mismatch."""
    FS = case.model
    problems, quantities = [], {}
    zres = None
    try:
        res = zariski_decompose(FS.kf, case.candidates)
        problems += check_decomposition(FS.kf, res, case.candidates)
        if FS.reduced:
            problems += [f"coefficient of {lab} is not below 1" for lab, y in res.N_coeffs.items() if y >= 1]
        zres = res.to_json()
        vol = res.volume
    except FoliageError as exc:
        problems.append(f"zariski: {exc.message}")
        vol = None
    quantities["vol"] = _compare(vol, case.expected["vol"], "zariski", case.documented.get("vol"))
    try:
        pg = case.pg_engine()
    except FoliageError as exc:
        problems.append(f"pg: {exc.message}")
        pg = None
    quantities["pg"] = _compare(pg, case.expected["pg"], case.pg_route)
    for key, fn in case.extra_engine.items():
        quantities[key] = _compare(fn(), case.expected[key], "lattice", case.documented.get(key))
    for c in FS.curves:
        try:
            index_formulas(FS, c)
        except FoliageError as exc:
            problems.append(f"curve {c.label}: {exc.message}")
    notes = {}
    for k, v in case.notes.items():
        if isinstance(v, DivClass):
            notes[k + "_square"] = fmt_rational(v.square())
            if zres is not None:
                notes[k + "_equals_engine_P"] = v == res.P
        else:
            notes[k] = _fmt(v)
    return VerificationReport(case.id, case.params, quantities, zres, problems, notes)
