"""Stacky fans, S-extensions, box elements, Mori cones and extended degrees.

Elements of ``N`` are pairs ``(coords, tors)``: rational coordinates of the
image in ``N ⊗ Q = Q^r`` (lying in a lattice generated by ``Z^r`` and a few
extra rational vectors) and residues in the torsion summand.
Ray and cone indices are 0-based internally; labels shown to users are 1-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from . import linalg
from .abelian import (FGAbelianGroup, GroupHom, _hermite_rows, free, kernel,
                      smith_normal_form)
from .errors import (DomainError, InvalidExtension, InvalidFan,
                     NonTerminatingEnumeration, UnsupportedInput)

Elt = Tuple[Tuple[Fraction, ...], Tuple[int, ...]]
Cone = FrozenSet[int]


def frac(x: Fraction) -> Fraction:
    """Fractional part in [0, 1)."""
    x = Fraction(x)
    return x - math.floor(x)


def ceil(x: Fraction) -> int:
    return math.ceil(Fraction(x))


def fmt(x: Fraction) -> str:
    return str(Fraction(x))


# --------------------------------------------------------------------------
# the group N


@dataclass(frozen=True)
class Lattice:
    """``N = Λ ⊕ T`` with ``Λ ⊂ Q^dim`` and ``T = ⊕ Z/t_i``."""

    dim: int
    basis: Tuple[Tuple[Fraction, ...], ...]
    torsion: Tuple[int, ...] = ()

    @classmethod
    def build(cls, dim: int, extra_generators: Sequence[Sequence] = (),
              torsion: Sequence[int] = ()) -> "Lattice":
        gens = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
        for g in extra_generators:
            if len(g) != dim:
                raise InvalidFan("extra generator has the wrong dimension")
            gens.append([Fraction(x) for x in g])
        den = linalg.denominator_lcm(x for row in gens for x in row)
        rows = _hermite_rows([[int(x * den) for x in row] for row in gens]) if dim else []
        basis = tuple(tuple(Fraction(x, den) for x in row) for row in rows)
        tors = tuple(int(t) for t in torsion if int(t) != 1)
        if any(t < 1 for t in tors):
            raise InvalidFan("torsion orders must be positive")
        return cls(dim, basis, tors)

    def element(self, coords: Sequence, tors: Sequence[int] = ()) -> Elt:
        c = tuple(Fraction(x) for x in coords)
        if len(c) != self.dim:
            raise InvalidFan(f"element {list(map(fmt, c))} has the wrong dimension")
        t = list(tors) + [0] * (len(self.torsion) - len(tors))
        if len(t) != len(self.torsion):
            raise InvalidFan("torsion part has the wrong length")
        el = (c, tuple(int(a) % d for a, d in zip(t, self.torsion)))
        self.coordinates(el)
        return el

    def coordinates(self, el: Elt) -> List[int]:
        """Integer coordinates of the free part in the lattice basis."""
        if not self.dim:
            return []
        bt = linalg.transpose(self.basis)
        sol = linalg.solve(bt, list(el[0]))
        if sol is None or any(x.denominator != 1 for x in sol):
            raise InvalidFan(f"{list(map(fmt, el[0]))} is not in the lattice")
        return [int(x) for x in sol]

    def contains(self, coords: Sequence[Fraction]) -> bool:
        try:
            self.coordinates((tuple(coords), ()))
        except InvalidFan:
            return False
        return True

    def add(self, a: Elt, b: Elt) -> Elt:
        return (tuple(x + y for x, y in zip(a[0], b[0])),
                tuple((x + y) % d for x, y, d in zip(a[1], b[1], self.torsion)))

    def scale(self, k: int, a: Elt) -> Elt:
        return (tuple(k * x for x in a[0]), tuple((k * x) % d for x, d in zip(a[1], self.torsion)))

    def zero(self) -> Elt:
        return (tuple(Fraction(0) for _ in range(self.dim)), tuple(0 for _ in self.torsion))

    def group(self) -> Tuple[FGAbelianGroup, List[List[int]]]:
        """Invariant-factor form of ``N`` and the matrix sending torsion residues to it."""
        k = len(self.torsion)
        if not k:
            return FGAbelianGroup(self.dim), []
        u, d, _ = smith_normal_form([[self.torsion[i] if i == j else 0 for j in range(k)]
                                     for i in range(k)])
        keep = [i for i in range(k) if d[i][i] > 1]
        return (FGAbelianGroup(self.dim, tuple(d[i][i] for i in keep)),
                [u[i] for i in keep])

    def hom(self, elements: Sequence[Elt]) -> GroupHom:
        """The map ``Z^len(elements) -> N`` sending basis vectors to ``elements``."""
        g, tmat = self.group()
        cols = []
        for el in elements:
            col = self.coordinates(el)
            col += [sum(a * b for a, b in zip(row, el[1])) for row in tmat]
            cols.append(col)
        rows = [[cols[j][i] for j in range(len(cols))] for i in range(g.ngens)]
        return GroupHom(free(len(elements)), g, rows)

    def label(self, el: Elt) -> str:
        if not any(el[0]) and not any(el[1]):
            return "0"
        s = ",".join(fmt(x) for x in el[0])
        if self.torsion:
            s += ";" + ",".join(str(x) for x in el[1])
        return s


# --------------------------------------------------------------------------
# fans


@dataclass(frozen=True)
class BoxElement:
    value: Elt
    sigma: Cone
    fractional_coords: Tuple[Tuple[int, Fraction], ...]
    age: Fraction
    label: str

    @property
    def is_zero(self) -> bool:
        return self.age == 0 and not any(self.value[0]) and not any(self.value[1])


def _close_faces(cones: Iterable[Iterable[int]]) -> FrozenSet[Cone]:
    out = set()
    for c in cones:
        c = tuple(sorted(set(c)))
        for k in range(len(c) + 1):
            for sub in itertools.combinations(c, k):
                out.add(frozenset(sub))
    if not out:
        out.add(frozenset())
    return frozenset(out)


@dataclass
class StackyFan:
    lattice: Lattice
    rays: List[Elt]
    cones: FrozenSet[Cone]
    sector_names: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_maximal(cls, lattice: Lattice, rays: Sequence[Elt], maximal: Iterable[Iterable[int]],
                     sector_names: Optional[Dict[str, str]] = None) -> "StackyFan":
        return cls(lattice, list(rays), _close_faces(maximal), dict(sector_names or {}))

    @property
    def n(self) -> int:
        return len(self.rays)

    @property
    def r(self) -> int:
        return self.lattice.dim

    def ray_matrix(self, idx: Iterable[int] | None = None) -> linalg.Matrix:
        """Columns are the images of the chosen rays in ``Q^r``."""
        idx = list(range(self.n)) if idx is None else list(idx)
        return [[self.rays[i][0][a] for i in idx] for a in range(self.r)]

    def maximal_cones(self) -> List[Cone]:
        return sorted((c for c in self.cones if not any(c < d for d in self.cones)),
                      key=lambda c: sorted(c))

    def rho(self) -> GroupHom:
        return self.lattice.hom(self.rays)

    # ------------------------------------------------------------------
    def validate(self) -> List[str]:
        """Return a list of violated invariants (empty when the fan is valid)."""
        bad = []
        for c in sorted(self.cones, key=sorted):
            if any(i < 0 or i >= self.n for i in c):
                bad.append(f"cone {sorted(i + 1 for i in c)} references an unknown ray")
                continue
            if c and linalg.rank(self.ray_matrix(sorted(c))) != len(c):
                bad.append(f"cone {sorted(i + 1 for i in c)} is not simplicial")
            for i in c:
                if c - {i} not in self.cones:
                    bad.append(f"face {sorted(j + 1 for j in c - {i})} of cone "
                               f"{sorted(j + 1 for j in c)} is missing")
        for i in range(self.n):
            if not any(self.rays[i][0]):
                bad.append(f"ray {i + 1} has zero image in N_Q")
            if frozenset([i]) not in self.cones:
                bad.append(f"ray {i + 1} does not span a 1-cone")
        for i, j in itertools.combinations(range(self.n), 2):
            a, b = self.rays[i][0], self.rays[j][0]
            if any(a) and any(b) and linalg.rank([list(a), list(b)]) == 1 and \
                    sum(x * y for x, y in zip(a, b)) > 0:
                bad.append(f"rays {i + 1} and {j + 1} span the same 1-cone")
        if self.r and linalg.rank(self.ray_matrix()) != self.r:
            bad.append("rho has infinite cokernel")
        elif not self.r and self.n:
            bad.append("rays in a rank-zero lattice must be absent")
        return bad

    def check(self) -> "StackyFan":
        bad = self.validate()
        if bad:
            raise InvalidFan("; ".join(bad))
        return self

    def is_complete(self) -> bool:
        """Pseudo-manifold test: every facet of a maximal cone lies in exactly two."""
        maxc = self.maximal_cones()
        if self.r == 0:
            return True
        if any(len(c) != self.r for c in maxc):
            return False
        count: Dict[Cone, int] = {}
        for c in maxc:
            for i in c:
                count[c - {i}] = count.get(c - {i}, 0) + 1
        return all(v == 2 for v in count.values())

    def minimal_cone(self, coords: Sequence[Fraction]) -> Optional[Tuple[Cone, Dict[int, Fraction]]]:
        """Smallest cone containing a point of ``N_Q`` with its positive coefficients."""
        if not any(coords):
            return frozenset(), {}
        for c in sorted(self.cones, key=lambda c: (len(c), sorted(c))):
            if not c:
                continue
            idx = sorted(c)
            sol = linalg.solve(self.ray_matrix(idx), list(coords))
            if sol is not None and all(x > 0 for x in sol):
                return c, dict(zip(idx, sol))
        return None

    def star_contains(self, sigma: Cone, i: int) -> bool:
        return (sigma | {i}) in self.cones

    # ------------------------------------------------------------------
    def box(self) -> List[BoxElement]:
        out: Dict[Elt, BoxElement] = {}
        tor_values = list(itertools.product(*[range(d) for d in self.lattice.torsion]))
        for c in sorted(self.cones, key=lambda c: (len(c), sorted(c))):
            idx = sorted(c)
            for coeffs in self._parallelepiped(idx):
                if any(a == 0 for a in coeffs):
                    continue  # found in a smaller face
                coords = tuple(sum((a * self.rays[i][0][k] for a, i in zip(coeffs, idx)), Fraction(0))
                               for k in range(self.r))
                for t in tor_values:
                    val = (coords, tuple(t))
                    if val in out:
                        continue
                    label = self.lattice.label(val)
                    out[val] = BoxElement(val, c, tuple(zip(idx, coeffs)), sum(coeffs, Fraction(0)),
                                          self.sector_names.get(label, label))
        return sorted(out.values(), key=lambda b: (b.age, b.value))

    def _parallelepiped(self, idx: List[int]) -> List[Tuple[Fraction, ...]]:
        """All ``a ∈ [0,1)^k`` with ``Σ a_i ρ̄_i`` in the lattice."""
        if not idx:
            return [()]
        m = [[self.lattice.coordinates(self.rays[i])[a] for i in idx]
             for a in range(len(self.lattice.basis))]
        _, d, v = smith_normal_form(m)
        k = len(idx)
        diag = [d[i][i] for i in range(k)]
        if any(x == 0 for x in diag):
            raise InvalidFan("cone is not simplicial")
        gens = [[Fraction(v[row][j], diag[j]) for row in range(k)] for j in range(k)]
        pts = set()
        for mult in itertools.product(*[range(x) for x in diag]):
            a = tuple(frac(sum((mm * g[row] for mm, g in zip(mult, gens)), Fraction(0)))
                      for row in range(k))
            pts.add(a)
        return sorted(pts)


def age(b: BoxElement) -> Fraction:
    return b.age


# --------------------------------------------------------------------------
# extended fans and degrees


@dataclass(frozen=True)
class ExtendedDegree:
    dk: Tuple[Fraction, ...]          # (d, k) coordinates in the degree basis
    coords: Tuple[Fraction, ...]      # λ in Q^{n+m}
    box_index: int

    def d(self, p: int) -> Tuple[Fraction, ...]:
        return self.dk[:p]

    def k(self, p: int) -> Tuple[int, ...]:
        return tuple(int(x) for x in self.dk[p:])


@dataclass
class ExtendedStackyFan:
    base: StackyFan
    s_elements: List[Elt]
    s_cones: List[Cone]
    s_coeffs: List[Dict[int, Fraction]]
    curve_basis: List[List[Fraction]]        # p vectors in Q^n spanning L ⊗ Q
    mori_generators: Optional[List[List[Fraction]]]
    box_elements: List[BoxElement] = field(default_factory=list)

    def __post_init__(self):
        if not self.box_elements:
            self.box_elements = self.base.box()
        self._box_index = {b.value: i for i, b in enumerate(self.box_elements)}
        self._facets: Optional[List[List[Fraction]]] = None
        mat = self.inclusion_matrix()
        # rows giving a left inverse of the inclusion
        red, piv = linalg.rref(linalg.transpose(mat)) if mat and mat[0] else ([], [])
        self._rows = piv
        sub = [mat[i] for i in piv]
        self._left = linalg.inverse(sub) if sub else []

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return len(self.s_elements)

    @property
    def p(self) -> int:
        return len(self.curve_basis)

    def rho_s(self) -> GroupHom:
        return self.base.lattice.hom(self.base.rays + self.s_elements)

    def splitting_vector(self, j: int) -> List[Fraction]:
        v = [Fraction(0)] * (self.n + self.m)
        v[self.n + j] = Fraction(1)
        for i, c in self.s_coeffs[j].items():
            v[i] -= c
        return v

    def inclusion_matrix(self) -> linalg.Matrix:
        """Columns: curve basis (padded with zeros), then splitting vectors."""
        cols = [list(b) + [Fraction(0)] * self.m for b in self.curve_basis]
        cols += [self.splitting_vector(j) for j in range(self.m)]
        return linalg.transpose(cols) if cols else [[] for _ in range(self.n + self.m)]

    def to_coords(self, dk: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        mat = self.inclusion_matrix()
        return tuple(linalg.matvec(mat, [Fraction(x) for x in dk])) if dk else \
            tuple(Fraction(0) for _ in range(self.n + self.m))

    def to_dk(self, coords: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        if not self._rows:
            return ()
        return tuple(linalg.matvec(self._left, [Fraction(coords[i]) for i in self._rows]))

    def box_index(self, value: Elt) -> int:
        return self._box_index[value]

    # ------------------------------------------------------------------
    def lambda_member(self, dk: Sequence[Fraction]) -> bool:
        lam = self.to_coords(dk)
        return self._member_coords(lam)

    def _member_coords(self, lam: Sequence[Fraction]) -> bool:
        if any(Fraction(x).denominator != 1 for x in lam[self.n:]):
            return False
        frac_support = frozenset(i for i in range(self.n) if Fraction(lam[i]).denominator != 1)
        return any(frac_support <= c for c in self.base.cones)

    def reduction(self, dk: Sequence[Fraction]) -> BoxElement:
        return self.box_elements[self._reduce_coords(self.to_coords(dk))]

    def _reduce_coords(self, lam: Sequence[Fraction]) -> int:
        if not self._member_coords(lam):
            raise DomainError(f"{[fmt(x) for x in lam]} is not in Lambda^S")
        lat = self.base.lattice
        v = lat.zero()
        gens = self.base.rays + self.s_elements
        for x, g in zip(lam, gens):
            c = ceil(x)
            if c:
                v = lat.add(v, lat.scale(c, g))
        expect = [sum((frac(-lam[i]) * self.base.rays[i][0][a] for i in range(self.n)), Fraction(0))
                  for a in range(lat.dim)]
        if list(v[0]) != expect:
            raise DomainError("reduction postcondition failed")
        try:
            return self._box_index[v]
        except KeyError:
            raise DomainError(f"reduction {lat.label(v)} is not a box element") from None

    # ------------------------------------------------------------------
    def facets(self) -> List[List[Fraction]]:
        """Inequalities ``f·d >= 0`` cutting out the Mori cone in curve-basis coordinates."""
        if self._facets is None:
            self._facets = cone_facets(self.mori_cone(), self.p)
        return self._facets

    def mori_cone(self) -> List[List[Fraction]]:
        if self.mori_generators is not None:
            return [list(g) for g in self.mori_generators]
        if self.p == 0:
            return []
        gens = [list(self.curve_coordinates(g)) for g in mori_cone(self.base)]
        return extremal_rays(gens, self.p)

    def curve_coordinates(self, v: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        """Coordinates of a vector of ``L ⊗ Q ⊂ Q^n`` in the curve basis."""
        sol = linalg.solve(linalg.transpose(self.curve_basis), list(v))
        if sol is None:
            raise DomainError("vector is not in L ⊗ Q")
        return tuple(sol)

    def extended_mori_cone(self) -> List[List[Fraction]]:
        """Generators of ``NE × (R_{>=0})^m`` in (d, k) coordinates."""
        gens = [list(g) + [Fraction(0)] * self.m for g in self.mori_cone()]
        for j in range(self.m):
            gens.append([Fraction(0)] * self.p + [Fraction(int(i == j)) for i in range(self.m)])
        return gens

    def in_extended_cone(self, dk: Sequence[Fraction]) -> bool:
        d = dk[:self.p]
        if any(x < 0 for x in dk[self.p:]):
            return False
        return all(sum((a * b for a, b in zip(f, d)), Fraction(0)) >= 0 for f in self.facets())

    # ------------------------------------------------------------------
    def default_grading(self) -> List[Fraction]:
        """``-K·d + Σ max(1 - age(s_j), 1/1000) k_j`` as a (d, k) functional."""
        w = [sum(b, Fraction(0)) for b in self.curve_basis]
        for j in range(self.m):
            a = sum(self.s_coeffs[j].values(), Fraction(0))
            w.append(1 - a if 1 - a > 0 else Fraction(1, 1000))
        return w

    def enumerate_degrees(self, grading: Sequence[Fraction], cutoff: Fraction,
                          active_k: Optional[Sequence[int]] = None) -> Dict[int, List[ExtendedDegree]]:
        """All ``λ ∈ ΛE^S`` with ``grading(λ) <= cutoff``, grouped by reduction."""
        grading = [Fraction(x) for x in grading]
        cutoff = Fraction(cutoff)
        active = set(range(self.m)) if active_k is None else set(active_k)
        gens = [g for g in self.extended_mori_cone()
                if all(g[self.p + j] == 0 for j in range(self.m) if j not in active)]
        for g in gens:
            if sum((a * b for a, b in zip(grading, g)), Fraction(0)) <= 0:
                raise NonTerminatingEnumeration(
                    f"grading is not positive on the cone generator {[fmt(x) for x in g]}")
        out: Dict[int, List[ExtendedDegree]] = {}
        if cutoff < 0:
            return out
        # the truncated cone is the convex hull of 0 and the scaled generators
        verts = [[Fraction(0)] * (self.p + self.m)]
        for g in gens:
            s = cutoff / sum((a * b for a, b in zip(grading, g)), Fraction(0))
            verts.append([s * x for x in g])
        vcoords = [self.to_coords(v) for v in verts]
        lo = [min(vc[i] for vc in vcoords) for i in range(self.n + self.m)]
        hi = [max(vc[i] for vc in vcoords) for i in range(self.n + self.m)]
        seen = set()
        rays_q = [self.base.rays[i][0] for i in range(self.n)]
        s_q = [s[0] for s in self.s_elements]
        r = self.base.r
        for sigma in self.base.maximal_cones():
            sig = sorted(sigma)
            free_idx = [i for i in range(self.n) if i not in sigma] + \
                [self.n + j for j in sorted(active)]
            ranges = [range(math.ceil(lo[i]), math.floor(hi[i]) + 1) for i in free_idx]
            rmat = [[rays_q[i][a] for i in sig] for a in range(r)]
            for w in itertools.product(*ranges):
                rhs = [Fraction(0)] * r
                for i, val in zip(free_idx, w):
                    if not val:
                        continue
                    vec = rays_q[i] if i < self.n else s_q[i - self.n]
                    for a in range(r):
                        rhs[a] -= val * vec[a]
                lam = [Fraction(0)] * (self.n + self.m)
                for i, val in zip(free_idx, w):
                    lam[i] = Fraction(val)
                if sig:
                    sol = linalg.solve(rmat, rhs)
                    if sol is None:
                        continue
                    for i, x in zip(sig, sol):
                        lam[i] = x
                elif any(rhs):
                    continue
                key = tuple(lam)
                if key in seen:
                    continue
                seen.add(key)
                dk = self.to_dk(lam)
                if tuple(self.to_coords(dk)) != key:
                    continue
                if not self.in_extended_cone(dk):
                    continue
                if sum((a * b for a, b in zip(grading, dk)), Fraction(0)) > cutoff:
                    continue
                b = self._reduce_coords(lam)
                out.setdefault(b, []).append(ExtendedDegree(tuple(dk), key, b))
        for b in out:
            out[b].sort(key=lambda e: e.dk)
        return dict(sorted(out.items()))

    def lattice_points_near_zero(self, radius: int) -> List[ExtendedDegree]:
        """Points of ``Λ^S`` (effective or not) with integer coordinates bounded by ``radius``."""
        out = {}
        r = self.base.r
        for sigma in self.base.maximal_cones():
            sig = sorted(sigma)
            free_idx = [i for i in range(self.n + self.m) if i not in sigma]
            rmat = [[self.base.rays[i][0][a] for i in sig] for a in range(r)]
            for w in itertools.product(range(-radius, radius + 1), repeat=len(free_idx)):
                rhs = [Fraction(0)] * r
                lam = [Fraction(0)] * (self.n + self.m)
                for i, val in zip(free_idx, w):
                    lam[i] = Fraction(val)
                    vec = self.base.rays[i][0] if i < self.n else self.s_elements[i - self.n][0]
                    for a in range(r):
                        rhs[a] -= val * vec[a]
                if sig:
                    sol = linalg.solve(rmat, rhs)
                    if sol is None:
                        continue
                    for i, x in zip(sig, sol):
                        lam[i] = x
                elif any(rhs):
                    continue
                key = tuple(lam)
                if key not in out:
                    dk = self.to_dk(lam)
                    out[key] = ExtendedDegree(tuple(dk), key, self._reduce_coords(lam))
        return [out[k] for k in sorted(out)]


def extend(fan: StackyFan, s_elements: Sequence[Elt], curve_basis: Optional[Sequence[Sequence]] = None,
           mori_generators: Optional[Sequence[Sequence]] = None) -> ExtendedStackyFan:
    s_cones, s_coeffs = [], []
    for j, s in enumerate(s_elements):
        found = fan.minimal_cone(s[0])
        if found is None:
            raise InvalidExtension(f"extension element {j} ({fan.lattice.label(s)}) lies outside the support")
        s_cones.append(found[0])
        s_coeffs.append(found[1])
    if curve_basis is None:
        basis = auto_curve_basis(fan)
    else:
        basis = [[Fraction(x) for x in b] for b in curve_basis]
        rmat = fan.ray_matrix()
        for b in basis:
            if len(b) != fan.n or any(linalg.matvec(rmat, b)):
                raise InvalidFan("curve basis vector is not in L ⊗ Q")
        if linalg.rank(basis) != len(basis) or len(basis) != fan.n - fan.r:
            raise InvalidFan("curve basis does not span L ⊗ Q")
    gens = None if mori_generators is None else [[Fraction(x) for x in g] for g in mori_generators]
    return ExtendedStackyFan(fan, list(s_elements), s_cones, s_coeffs, basis, gens)


def auto_curve_basis(fan: StackyFan) -> List[List[Fraction]]:
    _, incl = kernel(fan.rho())
    rows = incl.rows()
    k = incl.source.ngens
    return [[Fraction(rows[i][j]) for i in range(fan.n)] for j in range(k)]


def mori_cone(fan: StackyFan) -> List[List[Fraction]]:
    """Wall relations of a complete simplicial fan, primitive in ``L`` (vectors in ``Z^n``)."""
    if fan.n - fan.r == 0:
        return []
    if not fan.is_complete():
        raise UnsupportedInput("Mori cone of a non-complete fan needs user-supplied generators")
    rho = fan.rho()
    maxc = fan.maximal_cones()
    out = []
    for c1, c2 in itertools.combinations(maxc, 2):
        common = c1 & c2
        if len(common) != fan.r - 1:
            continue
        idx = sorted(c1 | c2)
        null = linalg.nullspace(fan.ray_matrix(idx))
        if len(null) != 1:
            continue
        rel = [Fraction(0)] * fan.n
        for i, x in zip(idx, null[0]):
            rel[i] = x
        (a,) = c1 - common
        if rel[a] < 0:
            rel = [-x for x in rel]
        ints = [int(x) for x in linalg.primitive(rel)]
        mult = 1
        while rho(ints) and any(x for x in rho([mult * y for y in ints])):
            mult += 1
        vec = [Fraction(mult * x) for x in ints]
        if vec not in out:
            out.append(vec)
    return out


def extremal_rays(gens: Sequence[Sequence[Fraction]], p: int) -> List[List[Fraction]]:
    """Drop generators that are not extremal in the (pointed, full) cone they span."""
    if p <= 1:
        return [list(g) for g in gens[:1]] if p == 1 else []
    facets = cone_facets(gens, p)
    out = []
    for g in gens:
        tight = [f for f in facets if not sum((a * b for a, b in zip(f, g)), Fraction(0))]
        if tight and linalg.rank(tight) == p - 1:
            prim = linalg.primitive(list(g))
            if all(linalg.primitive(list(h)) != prim for h in out):
                out.append(list(g))
    return out


def cone_facets(gens: Sequence[Sequence[Fraction]], p: int) -> List[List[Fraction]]:
    """Inward facet normals of the cone spanned by ``gens`` in ``Q^p``."""
    if p == 0:
        return []
    gens = [list(map(Fraction, g)) for g in gens if any(g)]
    if not gens or linalg.rank(gens) < p:
        raise UnsupportedInput("Mori cone must be full-dimensional")
    facets = []
    for sub in itertools.combinations(range(len(gens)), p - 1):
        rows = [gens[i] for i in sub]
        if rows and linalg.rank(rows) != p - 1:
            continue
        null = linalg.nullspace(rows, ncols=p) if rows else linalg.identity(p)
        if len(null) != 1:
            continue
        nv = null[0]
        vals = [sum((a * b for a, b in zip(nv, g)), Fraction(0)) for g in gens]
        if all(v >= 0 for v in vals):
            pass
        elif all(v <= 0 for v in vals):
            nv = [-x for x in nv]
        else:
            continue
        nv = linalg.primitive(nv)
        if nv not in facets:
            facets.append(nv)
    return facets
