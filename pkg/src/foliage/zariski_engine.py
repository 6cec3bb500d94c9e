"""Exact Zariski decomposition relative to a finite candidate set of curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import DecompositionFailure, InputError
from .foliation_model import CurveRecord, FoliatedSurface, unit_dot, unit_square
from .numeric_kernel import fmt_rational, solve_linear_system
from .surface_lattice import BundledClass, DivClass

__all__ = [
    "ZariskiResult",
    "ChainSpec",
    "zariski_decompose",
    "zariski_oracle",
    "chain_negative_part",
    "detect_f_chains",
    "is_negative_definite",
    "check_decomposition",
]


@dataclass(frozen=True)
class ZariskiResult:
    P: DivClass
    N_coeffs: dict
    volume: Fraction
    iterations: int
    support_order: tuple = ()
    remaining_negative: tuple = ()
    N: DivClass | None = None

    def to_json(self) -> dict:
        return {
            "P": [fmt_rational(c) for c in self.P.coords],
            "N": {k: fmt_rational(v) for k, v in sorted(self.N_coeffs.items())},
            "vol": fmt_rational(self.volume),
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class ChainSpec:
    self_intersections: tuple
    kf_dot: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "self_intersections", tuple(int(e) for e in self.self_intersections))
        object.__setattr__(self, "kf_dot", tuple(Fraction(v) for v in self.kf_dot))
        if len(self.self_intersections) != len(self.kf_dot):
            raise InputError("chain data lengths differ")
        if any(e < 2 for e in self.self_intersections):
            raise InputError("chain curves need self-intersection <= -2")

    @property
    def length(self) -> int:
        return len(self.self_intersections)


def _as_candidate(c):
    if isinstance(c, CurveRecord):
        return c.label, c.cls
    label, cls_ = c
    return str(label), cls_


def _total(c) -> DivClass:
    return c.total if isinstance(c, BundledClass) else c


def is_negative_definite(gram: Sequence[Sequence]) -> bool:
    """Symmetric elimination without pivoting; every pivot of -gram must be positive."""
    a = [[-Fraction(v) for v in row] for row in gram]
    n = len(a)
    for k in range(n):
        p = a[k][k]
        if p <= 0:
            return False
        for i in range(k + 1, n):
            if a[i][k] == 0:
                continue
            f = a[i][k] / p
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    return True


def _components(idx: list, gram: dict) -> list:
    seen, out = set(), []
    for i in idx:
        if i in seen:
            continue
        comp, stack = [], [i]
        seen.add(i)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in idx:
                if v not in seen and gram[u, v] != 0:
                    seen.add(v)
                    stack.append(v)
        out.append(sorted(comp))
    return out


def _solve_support(support: list, gram: dict, rhs: list, labels: list) -> dict:
    """Solve sum_j y_j C_j.C_i = D.C_i block by block over connected components."""
    coeffs = {}
    for comp in _components(support, gram):
        M = [[gram[i, j] for j in comp] for i in comp]
        names = [labels[i] for i in comp]
        if not is_negative_definite(M):
            raise DecompositionFailure("support Gram matrix is not negative definite", support=names)
        y = solve_linear_system(M, [rhs[i] for i in comp])
        if y is None:
            raise DecompositionFailure("support Gram matrix is singular", support=names)
        coeffs.update(zip(comp, y))
    return coeffs


def _prepare(D: DivClass, candidates):
    items = [_as_candidate(c) for c in candidates]
    labels = [lab for lab, _ in items]
    if len(set(labels)) != len(labels):
        raise InputError("candidate labels must be distinct")
    classes = [_total(c) for _, c in items]
    for lab, c in zip(labels, classes):
        if c.lattice_id != D.lattice_id:
            raise InputError(f"candidate {lab} does not live on the lattice of D")
    for lab, (_, c) in zip(labels, items):
        if isinstance(c, BundledClass) and unit_square(c) >= 0:
            raise InputError(f"bundled candidate {lab} must consist of negative curves")
    n = len(classes)
    gram = {(i, j): classes[i].dot(classes[j]) for i in range(n) for j in range(n)}
    rhs = [D.dot(c) for c in classes]
    return labels, classes, gram, rhs


def _assemble(D, labels, classes, coeffs, iterations, order) -> ZariskiResult:
    P = D
    for i, y in coeffs.items():
        P = P - y * classes[i]
    remaining = tuple(labels[i] for i in range(len(classes)) if P.dot(classes[i]) < 0)
    N = {labels[i]: y for i, y in sorted(coeffs.items()) if y != 0}
    return ZariskiResult(P, N, P.square(), iterations, tuple(labels[i] for i in order), remaining, D - P)


def zariski_decompose(D: DivClass, candidates: Sequence) -> ZariskiResult:
    """Fujita-style iteration: grow the support by every curve with P.C < 0.

    Candidates are CurveRecords or ``(label, class)`` pairs.  A bundled
    candidate stands for a family of disjoint, interchangeable curves that
    pair identically with everything else; its equation is the aggregate of
    the identical member equations and the returned coefficient is the common
    coefficient of each member.
    """
    labels, classes, gram, rhs = _prepare(D, candidates)
    support: list = []
    coeffs: dict = {}
    iterations = 0
    while True:
        P = D
        for i, y in coeffs.items():
            P = P - y * classes[i]
        new = [i for i in range(len(classes)) if i not in coeffs and P.dot(classes[i]) < 0]
        if not new:
            break
        iterations += 1
        if iterations > len(classes):
            raise DecompositionFailure("iteration did not terminate", support=[labels[i] for i in support])
        support.extend(new)
        coeffs = _solve_support(support, gram, rhs, labels)
        bad = [labels[i] for i, y in coeffs.items() if y < 0]
        if bad:
            raise DecompositionFailure("negative coefficient on the support", curves=bad)
    return _assemble(D, labels, classes, coeffs, iterations, support)


def zariski_oracle(D: DivClass, candidates: Sequence) -> ZariskiResult:
    """Brute force over every subset of candidates.

    A subset qualifies when its Gram matrix is negative definite, all solved
    coefficients are positive and P.C >= 0 for every candidate.  Exactly one
    subset must qualify.
    """
    labels, classes, gram, rhs = _prepare(D, candidates)
    n = len(classes)
    found = []
    for r in range(n + 1):
        for sub in combinations(range(n), r):
            M = [[gram[i, j] for j in sub] for i in sub]
            if sub and not is_negative_definite(M):
                continue
            y = solve_linear_system(M, [rhs[i] for i in sub]) if sub else []
            if any(v <= 0 for v in y):
                continue
            P = D
            for i, v in zip(sub, y):
                P = P - v * classes[i]
            if all(P.dot(c) >= 0 for c in classes):
                found.append((sub, dict(zip(sub, y))))
    if len(found) != 1:
        raise DecompositionFailure(f"oracle found {len(found)} qualifying supports")
    sub, coeffs = found[0]
    return _assemble(D, labels, classes, coeffs, 0, list(sub))


def chain_negative_part(spec: ChainSpec) -> list:
    """Solve the Hirzebruch-Jung tridiagonal system by forward elimination.

    Row j reads y_{j-1} - e_j y_j + y_{j+1} = kf_dot_j with y_0 = y_{r+1} = 0.
    """
    r = spec.length
    if r == 0:
        return []
    diag = [Fraction(-e) for e in spec.self_intersections]
    rhs = list(spec.kf_dot)
    for j in range(1, r):
        f = 1 / diag[j - 1]
        diag[j] -= f
        rhs[j] -= f * rhs[j - 1]
    y = [Fraction(0)] * r
    y[-1] = rhs[-1] / diag[-1]
    for j in range(r - 2, -1, -1):
        y[j] = (rhs[j] - y[j + 1]) / diag[j]
    return y


def _eligible(FS: FoliatedSurface) -> list:
    out = []
    for c in FS.curves:
        if not (c.invariant and c.rational_smooth) or c.declared_Z is None:
            continue
        if c.declared_Z not in (1, 2):
            continue
        if unit_square(c.cls) > -2:
            continue
        out.append(c)
    return out


def _chain_from(path: list, FS: FoliatedSurface, labels=None) -> ChainSpec:
    es = [int(-unit_square(c.cls)) for c in path]
    kd = [unit_dot(c.cls, FS.kf) for c in path]
    return ChainSpec(es, kd, tuple(labels or [c.label for c in path]))


def detect_f_chains(FS: FoliatedSurface) -> list:
    """Maximal F-chains among the marked curves, each listed from its Z=1 end.

    A bundled family of isolated members contributes one length-one chain per
    member.
    """
    cands = _eligible(FS)
    n = len(cands)
    pair = {(i, j): cands[i].total.dot(cands[j].total) for i in range(n) for j in range(n) if i != j}
    chains = []
    for comp in _components(list(range(n)), {**pair, **{(i, i): 0 for i in range(n)}}):
        if len(comp) == 1:
            c = cands[comp[0]]
            if c.declared_Z != 1:
                continue
            if isinstance(c.cls, BundledClass):
                chains.extend(_chain_from([c], FS, [f"{c.label}[{k}]"]) for k in range(1, c.count + 1))
            else:
                chains.append(_chain_from([c], FS))
            continue
        if any(isinstance(cands[i].cls, BundledClass) for i in comp):
            raise InputError("bundled curves meeting other chain candidates are not supported")
        nbrs = {i: [j for j in comp if j != i and pair[i, j] != 0] for i in comp}
        if any(len(v) > 2 for v in nbrs.values()) or any(pair[i, j] != 1 for i in comp for j in nbrs[i]):
            continue
        ends = [i for i in comp if len(nbrs[i]) == 1]
        if len(ends) != 2:
            continue
        path, prev, cur = [ends[0]], None, ends[0]
        while len(path) < len(comp):
            nxt = next(j for j in nbrs[cur] if j != prev)
            path.append(nxt)
            prev, cur = cur, nxt
        best = []
        for orient in (path, path[::-1]):
            if cands[orient[0]].declared_Z != 1:
                continue
            run = [orient[0]]
            for i in orient[1:]:
                if cands[i].declared_Z != 2:
                    break
                run.append(i)
            if len(run) > len(best):
                best = run
        if best:
            chains.append(_chain_from([cands[i] for i in best], FS))
    return chains


def check_decomposition(D: DivClass, res: ZariskiResult, candidates: Sequence) -> list:
    """List every violated ZariskiResult invariant (empty when all hold)."""
    items = dict(_as_candidate(c) for c in candidates)
    problems = []
    total = res.P
    for lab, y in res.N_coeffs.items():
        total = total + y * _total(items[lab])
        if y < 0:
            problems.append(f"negative coefficient on {lab}")
        if res.P.dot(_total(items[lab])) != 0:
            problems.append(f"P.{lab} != 0")
    if total != D:
        problems.append("P + N differs from D")
    for lab, c in items.items():
        if res.P.dot(_total(c)) < 0:
            problems.append(f"P.{lab} < 0")
    supp = [_total(items[lab]) for lab in res.N_coeffs]
    if supp and not is_negative_definite([[a.dot(b) for b in supp] for a in supp]):
        problems.append("support not negative definite")
    return problems

