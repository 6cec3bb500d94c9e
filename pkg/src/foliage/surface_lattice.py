"""Neron-Severi lattice models of the explicit surfaces used by the gallery.

A :class:`SurfaceLattice` is a named basis with a symmetric rational Gram
matrix, a canonical class and the value of chi(O_S).  Blow-ups and finite
covers produce new lattices that remember their parent so classes can be
pulled back.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InputError
from .numeric_kernel import Q, fmt_rational

__all__ = [
    "DivClass",
    "BundledClass",
    "SurfaceLattice",
    "make_surface",
    "projective_plane",
    "hirzebruch",
    "product_ruled",
    "abstract_surface",
    "intersect",
    "blow_up",
    "finite_cover",
    "chi_of_class",
    "h0_closed_form",
    "arithmetic_genus",
]


class DivClass:
    """A divisor class: exact coordinates in the basis of its lattice."""

    __slots__ = ("coords", "lattice")

    def __init__(self, coords: Iterable, lattice: "SurfaceLattice"):
        coords = tuple(Q(c) for c in coords)
        if len(coords) != lattice.rank:
            raise InputError(f"class has {len(coords)} coordinates, lattice rank is {lattice.rank}")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "lattice", lattice)

    def __setattr__(self, name, value):
        raise AttributeError("DivClass is immutable")

    @property
    def lattice_id(self) -> str:
        return self.lattice.lattice_id

    def _check(self, other: "DivClass"):
        if not isinstance(other, DivClass):
            raise InputError(f"expected a DivClass, got {type(other).__name__}")
        if other.lattice_id != self.lattice_id:
            raise InputError(f"lattice mismatch: {self.lattice_id} vs {other.lattice_id}")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        return DivClass((a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    __radd__ = __add__

    def __sub__(self, other):
        self._check(other)
        return DivClass((a - b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __neg__(self):
        return DivClass((-a for a in self.coords), self.lattice)

    def __mul__(self, k):
        k = Q(k)
        return DivClass((k * a for a in self.coords), self.lattice)

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = Q(k)
        return DivClass((a / k for a in self.coords), self.lattice)

    def dot(self, other: "DivClass") -> Fraction:
        self._check(other)
        return self.lattice.pair(self.coords, other.coords)

    def __matmul__(self, other):
        return self.dot(other)

    def square(self) -> Fraction:
        return self.dot(self)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        if not isinstance(other, DivClass):
            return NotImplemented
        return self.lattice_id == other.lattice_id and self.coords == other.coords

    def __hash__(self):
        return hash((self.lattice_id, self.coords))

    def as_dict(self) -> dict:
        return {lab: c for lab, c in zip(self.lattice.basis, self.coords) if c}

    def __repr__(self):
        terms = [f"{fmt_rational(c)}*{lab}" for lab, c in self.as_dict().items()]
        return f"DivClass({' + '.join(terms) or '0'} @ {self.lattice_id})"


@dataclass(frozen=True)
class BundledClass:
    """A family of ``count`` interchangeable curves stored through their sum.

    ``total`` is the class of the whole family.  When the members are pairwise
    disjoint and meet every symmetric class equally, one member's square is
    ``total**2 / count`` and its pairing with a symmetric class ``D`` is
    ``total.D / count``.
    """

    total: DivClass
    count: int
    pairwise_disjoint: bool = True

    def __post_init__(self):
        if self.count < 1:
            raise InputError("bundle count must be positive")

    @property
    def lattice(self):
        return self.total.lattice

    @property
    def lattice_id(self):
        return self.total.lattice_id

    def unit_square(self) -> Fraction:
        if not self.pairwise_disjoint:
            raise InputError("unit square of a non-disjoint bundle is not determined")
        return self.total.square() / self.count

    def unit_dot(self, other: DivClass) -> Fraction:
        return self.total.dot(other) / self.count

    def aggregate_square(self) -> Fraction:
        return self.total.square()


def _as_class(c) -> DivClass:
    return c.total if isinstance(c, BundledClass) else c


class SurfaceLattice:
    """Basis labels, Gram matrix, canonical class and chi(O_S)."""

    def __init__(
        self,
        basis: Sequence[str],
        gram: Sequence[Sequence],
        canonical: Sequence,
        chi,
        provenance: Mapping | None = None,
        parent: "SurfaceLattice | None" = None,
        lattice_id: str | None = None,
    ):
        basis = tuple(str(b) for b in basis)
        if len(set(basis)) != len(basis):
            raise InputError(f"duplicate basis labels in {basis}")
        n = len(basis)
        gram = tuple(tuple(Q(v) for v in row) for row in gram)
        if len(gram) != n or any(len(row) != n for row in gram):
            raise InputError("gram matrix shape does not match the basis")
        for i in range(n):
            for j in range(i + 1, n):
                if gram[i][j] != gram[j][i]:
                    raise InputError(f"gram matrix not symmetric at ({basis[i]}, {basis[j]})")
        canonical = tuple(Q(c) for c in canonical)
        if len(canonical) != n:
            raise InputError("canonical class has the wrong length")
        self.basis = basis
        self.gram = gram
        self.chi = Q(chi)
        self.provenance = dict(provenance or {"kind": "abstract"})
        self.parent = parent
        self._canonical = canonical
        self._index = {b: i for i, b in enumerate(basis)}
        self.lattice_id = lattice_id or self._default_id()

    def _default_id(self) -> str:
        # content hash, so equal abstract lattices share an id
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return f"{self.kind}:{hashlib.sha1(blob).hexdigest()[:12]}"

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def kind(self) -> str:
        return self.provenance.get("kind", "abstract")

    @property
    def canonical(self) -> DivClass:
        return DivClass(self._canonical, self)

    K = canonical

    def pair(self, u: Sequence, v: Sequence) -> Fraction:
        g = self.gram
        total = Fraction(0)
        for i, ui in enumerate(u):
            if not ui:
                continue
            row = g[i]
            s = Fraction(0)
            for j, vj in enumerate(v):
                if vj and row[j]:
                    s += row[j] * vj
            total += ui * s
        return total

    def cls(self, label: str) -> DivClass:
        if label not in self._index:
            raise InputError(f"unknown basis label {label!r} in {self.lattice_id}")
        coords = [0] * self.rank
        coords[self._index[label]] = 1
        return DivClass(coords, self)

    def make(self, combo: Mapping[str, object] | Sequence | None = None, **kw) -> DivClass:
        """Build a class from ``{label: coeff}`` (or a full coordinate list)."""
        if combo is not None and not isinstance(combo, Mapping):
            return DivClass(combo, self)
        terms = dict(combo or {})
        terms.update(kw)
        coords = [Fraction(0)] * self.rank
        for lab, c in terms.items():
            if lab not in self._index:
                raise InputError(f"unknown basis label {lab!r} in {self.lattice_id}")
            coords[self._index[lab]] += Q(c)
        return DivClass(coords, self)

    def zero(self) -> DivClass:
        return DivClass([0] * self.rank, self)

    def pullback(self, D: DivClass) -> DivClass:
        """Pull a class back from the parent lattice (blow-up or cover)."""
        if self.parent is None:
            raise InputError(f"{self.lattice_id} has no parent lattice")
        if D.lattice_id != self.parent.lattice_id:
            raise InputError("pullback of a class from a different lattice")
        pad = [0] * (self.rank - self.parent.rank)
        return DivClass(list(D.coords) + pad, self)

    def to_json(self) -> dict:
        return {
            "basis": list(self.basis),
            "gram": [[fmt_rational(v) for v in row] for row in self.gram],
            "canonical": [fmt_rational(v) for v in self._canonical],
            "chi": fmt_rational(self.chi),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SurfaceLattice":
        try:
            return cls(data["basis"], data["gram"], data["canonical"], data["chi"])
        except KeyError as exc:
            raise InputError(f"lattice JSON missing field {exc.args[0]!r}") from exc

    def __eq__(self, other):
        if not isinstance(other, SurfaceLattice):
            return NotImplemented
        return (
            self.basis == other.basis
            and self.gram == other.gram
            and self._canonical == other._canonical
            and self.chi == other.chi
        )

    def __hash__(self):
        return hash((self.basis, self.gram, self._canonical, self.chi))

    def __repr__(self):
        return f"SurfaceLattice({self.lattice_id}, basis={list(self.basis)})"


# ----------------------------------------------------------- constructors

def projective_plane() -> SurfaceLattice:
    return SurfaceLattice(["H"], [[1]], [-3], 1, {"kind": "projective_plane"}, lattice_id="P2")


def hirzebruch(n: int) -> SurfaceLattice:
    if not isinstance(n, int) or n < 0:
        raise InputError(f"hirzebruch index must be a non-negative integer, got {n!r}")
    return SurfaceLattice(
        ["C0", "G"],
        [[-n, 1], [1, 0]],
        [-2, -(n + 2)],
        1,
        {"kind": "hirzebruch", "n": n},
        lattice_id=f"F{n}",
    )


def product_ruled(b: int) -> SurfaceLattice:
    """P^1 x B with B of genus ``b``; ``A`` and ``Bf`` are the fibres of the two projections.

    ``A`` is a fibre of the projection to B (a copy of P^1) and ``Bf`` a fibre
    of the projection to P^1 (a copy of B).
    """
    if not isinstance(b, int) or b < 0:
        raise InputError(f"genus must be a non-negative integer, got {b!r}")
    return SurfaceLattice(
        ["A", "Bf"],
        [[0, 1], [1, 0]],
        [2 * b - 2, -2],
        1 - b,
        {"kind": "product_ruled", "b": b},
        lattice_id=f"P1xB{b}",
    )


def abstract_surface(basis, gram, canonical, chi, name: str | None = None) -> SurfaceLattice:
    return SurfaceLattice(basis, gram, canonical, chi, {"kind": "abstract"}, lattice_id=name)


def make_surface(kind: str, *args, **kwargs) -> SurfaceLattice:
    """Dispatch on ``kind``: projective_plane, hirzebruch, product_ruled or abstract."""
    table = {
        "projective_plane": projective_plane,
        "hirzebruch": hirzebruch,
        "product_ruled": product_ruled,
        "abstract": abstract_surface,
    }
    if kind not in table:
        raise InputError(f"unknown surface kind {kind!r}")
    return table[kind](*args, **kwargs)


# ------------------------------------------------------------- operations

def intersect(D1, D2) -> Fraction:
    return _as_class(D1).dot(_as_class(D2))


def blow_up(L: SurfaceLattice, count: int, bundled: bool = False, prefix: str = "E") -> SurfaceLattice:
    """Blow up ``count`` distinct points.

    With ``bundled`` the exceptional curves are stored as one basis vector
    ``prefix[count]`` (their sum, square ``-count``).
    """
    if not isinstance(count, int) or count < 0:
        raise InputError(f"blow-up count must be a non-negative integer, got {count!r}")
    if count == 0:
        return L
    if bundled:
        labels = [f"{prefix}[{count}]"]
        squares = [-count]
    else:
        labels = [f"{prefix}{i}" for i in range(1, count + 1)]
        squares = [-1] * count
    clash = set(labels) & set(L.basis)
    if clash:
        raise InputError(f"labels {sorted(clash)} already used; pass another prefix")
    n, k = L.rank, len(labels)
    gram = [list(row) + [0] * k for row in L.gram]
    for i in range(k):
        row = [0] * (n + k)
        row[n + i] = squares[i]
        gram.append(row)
    canonical = list(L.canonical.coords) + [1] * k
    prov = {"kind": "blow_up", "base": L.lattice_id, "centers": count, "bundled": bundled}
    lid = f"Bl{count}{'b' if bundled else ''}:{prefix}({L.lattice_id})"
    return SurfaceLattice(list(L.basis) + labels, gram, canonical, L.chi, prov, parent=L, lattice_id=lid)


def finite_cover(
    L: SurfaceLattice,
    degree: int,
    branch_half: DivClass,
    extra_classes: Sequence = (),
    canonical: DivClass | None = None,
    chi=None,
    prefix: str = "pi*",
) -> SurfaceLattice:
    """Lattice of a degree ``degree`` cover branched along ``degree * branch_half``.

    Pullbacks pair as ``degree`` times the base pairing.  ``extra_classes`` is a
    list of ``(label, {other_label: pairing})`` for curves that are not
    pullbacks (exceptional curves of a resolution); unspecified pairings are 0.
    The canonical class defaults to ``pi^*(K + (degree-1) * branch_half)`` and
    chi to the cyclic-cover value ``sum_i chi(O(-i*branch_half))``; both can be
    overridden.
    """
    if not isinstance(degree, int) or degree < 2:
        raise InputError(f"cover degree must be an integer >= 2, got {degree!r}")
    if branch_half.lattice_id != L.lattice_id:
        raise InputError("branch class does not live on the base lattice")
    labels = [prefix + b for b in L.basis]
    extra_labels = [str(lab) for lab, _ in extra_classes]
    all_labels = labels + extra_labels
    if len(set(all_labels)) != len(all_labels):
        raise InputError("duplicate labels in cover lattice")
    n, k = L.rank, len(extra_labels)
    size = n + k
    idx = {lab: i for i, lab in enumerate(all_labels)}
    gram = [[Fraction(0)] * size for _ in range(size)]
    for i in range(n):
        for j in range(n):
            gram[i][j] = degree * L.gram[i][j]
    seen = {}
    for lab, pairings in extra_classes:
        for other, val in dict(pairings).items():
            if other not in idx:
                raise InputError(f"extra class {lab!r} pairs with unknown label {other!r}")
            i, j = idx[str(lab)], idx[other]
            val = Q(val)
            key = (min(i, j), max(i, j))
            if key in seen and seen[key] != val:
                raise InputError(f"conflicting pairings for ({lab}, {other})")
            seen[key] = val
            gram[i][j] = gram[j][i] = val
    K, Lh = L.canonical, branch_half
    if canonical is None:
        down = K + (degree - 1) * Lh
        canon = list(down.coords) + [0] * k
    else:
        canon = list(canonical.coords) if isinstance(canonical, DivClass) else list(canonical)
    if chi is None:
        chi = sum(
            (L.chi + Fraction(1, 2) * (i * Lh).dot(i * Lh + K) for i in range(degree)),
            Fraction(0),
        )
    prov = {
        "kind": "cover",
        "base": L.lattice_id,
        "degree": degree,
        "branch_half": [fmt_rational(c) for c in branch_half.coords],
    }
    lid = f"Cov{degree}({L.lattice_id};{','.join(prov['branch_half'])})"
    return SurfaceLattice(all_labels, gram, canon, chi, prov, parent=L, lattice_id=lid)


def chi_of_class(L: SurfaceLattice, D) -> Fraction:
    """Riemann-Roch: chi(O(D)) = chi(O_S) + D.(D - K)/2."""
    D = _as_class(D)
    if D.lattice_id != L.lattice_id:
        raise InputError("class does not live on this lattice")
    return L.chi + Fraction(1, 2) * D.dot(D - L.canonical)


def _integral(c: Fraction, what: str) -> int:
    if c.denominator != 1:
        raise InputError(f"{what} must be integral, got {c}")
    return c.numerator


def h0_closed_form(L: SurfaceLattice, D: DivClass) -> int | None:
    """h^0 on the plane or a Hirzebruch surface; None where no closed form is provided."""
    if D.lattice_id != L.lattice_id:
        raise InputError("class does not live on this lattice")
    if L.kind == "projective_plane":
        k = _integral(D.coords[0], "degree")
        return (k + 1) * (k + 2) // 2 if k >= 0 else 0
    if L.kind == "hirzebruch":
        n = L.provenance["n"]
        a = _integral(D.coords[0], "C0 coefficient")
        b = _integral(D.coords[1], "fibre coefficient")
        if a < 0:
            return 0
        return sum(max(0, b - i * n + 1) for i in range(a + 1))
    return None


def arithmetic_genus(C) -> Fraction:
    """Adjunction: p_a(C) = 1 + (C^2 + K.C)/2."""
    C = _as_class(C)
    return 1 + Fraction(1, 2) * (C.square() + C.dot(C.lattice.canonical))
