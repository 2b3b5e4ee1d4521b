"""Chen–Ruan cohomology as a graded module with a divisor-class action.

An algebra is a finite free module over a coefficient ring (``Q`` or
``Q[chi_1..chi_r]``) split into sectors indexed by box elements.  Only the
action of the divisor classes ``u_i`` is stored, as one square matrix per ray
acting on column vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .errors import ConstructionError, UnsupportedInput
from .poly import Coeff, Poly, format_coeff, parse_coeff, total_degree
from .stackyfan import BoxElement, StackyFan

CMatrix = List[List[Coeff]]


@dataclass(frozen=True)
class CoefficientRing:
    gens: Tuple[str, ...] = ()

    @classmethod
    def equivariant(cls, r: int) -> "CoefficientRing":
        return cls(tuple(f"chi{a + 1}" for a in range(r)))

    @property
    def num_equivariant_params(self) -> int:
        return len(self.gens)

    def gen(self, name: str) -> Poly:
        return Poly.gen(self.gens, name)

    def parse(self, value) -> Coeff:
        return parse_coeff(value, self.gens)

    def degree(self, c: Coeff) -> set:
        return total_degree(c)


@dataclass
class Sector:
    name: str
    age: Fraction
    labels: List[str]
    degrees: List[Fraction]           # cohomological degree (without age)
    unit: int = 0                     # index within the sector
    box: Optional[BoxElement] = None

    @property
    def rank(self) -> int:
        return len(self.labels)


def _zero_matrix(k: int) -> CMatrix:
    return [[Fraction(0)] * k for _ in range(k)]


def cmat_vec(m: CMatrix, v: Sequence[Coeff]) -> List[Coeff]:
    out = []
    for row in m:
        acc: Coeff = Fraction(0)
        for a, b in zip(row, v):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return out


def cmat_mul(a: CMatrix, b: CMatrix) -> CMatrix:
    k = len(b)
    cols = len(b[0]) if b else 0
    out = [[Fraction(0)] * cols for _ in a]
    for i, row in enumerate(a):
        for t in range(k):
            x = row[t]
            if not x:
                continue
            bt = b[t]
            for j in range(cols):
                if bt[j]:
                    out[i][j] = out[i][j] + x * bt[j]
    return out


def cmat_add(a: CMatrix, b: CMatrix, scale: Coeff = Fraction(1)) -> CMatrix:
    return [[x + scale * y if y else x for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


@dataclass
class ChenRuanAlgebra:
    coeff: CoefficientRing
    sectors: List[Sector]
    divisor_action: List[CMatrix]
    check: bool = True
    offsets: List[int] = field(init=False)

    def __post_init__(self):
        self.offsets = []
        k = 0
        for s in self.sectors:
            self.offsets.append(k)
            k += s.rank
        self._dim = k
        if self.check:
            bad = self.violations()
            if bad:
                raise ConstructionError("; ".join(bad))

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def n(self) -> int:
        return len(self.divisor_action)

    @property
    def labels(self) -> List[str]:
        return [lab for s in self.sectors for lab in s.labels]

    @property
    def grading(self) -> List[Fraction]:
        return [s.age + d for s in self.sectors for d in s.degrees]

    @property
    def unit_of_sector(self) -> List[int]:
        return [o + s.unit for o, s in zip(self.offsets, self.sectors)]

    def sector_index(self, name: str) -> int:
        for i, s in enumerate(self.sectors):
            if s.name == name:
                return i
        raise KeyError(f"no sector named {name!r}")

    def sector_of(self, basis_index: int) -> int:
        for i in reversed(range(len(self.sectors))):
            if basis_index >= self.offsets[i]:
                return i
        raise IndexError(basis_index)

    def unit(self, sector: int | str = 0) -> "AlgebraElement":
        if isinstance(sector, str):
            sector = self.sector_index(sector)
        v: List[Coeff] = [Fraction(0)] * self.dim
        v[self.unit_of_sector[sector]] = Fraction(1)
        return AlgebraElement(self, v)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, [Fraction(0)] * self.dim)

    def basis_vector(self, i: int) -> "AlgebraElement":
        v: List[Coeff] = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return AlgebraElement(self, v)

    def linear_combination(self, coeffs: Sequence[Coeff]) -> CMatrix:
        """Matrix of ``Σ c_i u_i``."""
        out = _zero_matrix(self.dim)
        for c, m in zip(coeffs, self.divisor_action):
            if c:
                out = cmat_add(out, m, c)
        return out

    # ------------------------------------------------------------------
    def violations(self) -> List[str]:
        bad = []
        if not self.sectors:
            return ["missing unit: no sectors"]
        for s in self.sectors:
            if not (0 <= s.unit < s.rank) or s.degrees[s.unit] != 0:
                bad.append(f"missing unit: sector {s.name} has no degree-0 unit")
        if self.sectors[0].age != 0:
            bad.append("missing unit: the first sector must be untwisted")
        for i, m in enumerate(self.divisor_action):
            if len(m) != self.dim or any(len(row) != self.dim for row in m):
                bad.append(f"divisor matrix {i + 1} has the wrong shape")
        if bad:
            return bad
        for i, j in itertools.combinations(range(self.n), 2):
            a, b = self.divisor_action[i], self.divisor_action[j]
            if cmat_mul(a, b) != cmat_mul(b, a):
                bad.append(f"non-commuting divisor matrices u{i + 1}, u{j + 1}")
        g = self.grading
        for i, m in enumerate(self.divisor_action):
            for r, row in enumerate(m):
                for c, x in enumerate(row):
                    if not x:
                        continue
                    if self.sector_of(r) != self.sector_of(c):
                        bad.append(f"grading violation: u{i + 1} mixes sectors")
                        continue
                    for e in total_degree(x):
                        if g[r] + e != g[c] + 1:
                            bad.append(f"grading violation: u{i + 1} entry ({r + 1},{c + 1})")
                            break
        return sorted(set(bad), key=bad.index)

    def describe(self) -> dict:
        return {
            "coefficients": list(self.coeff.gens),
            "sectors": [{"name": s.name, "age": str(s.age), "rank": s.rank,
                         "basis": [{"label": lab, "degree": str(s.age + d)}
                                   for lab, d in zip(s.labels, s.degrees)],
                         "unit": s.labels[s.unit]} for s in self.sectors],
            "divisors": [[[format_coeff(x) for x in row] for row in m] for m in self.divisor_action],
        }


@dataclass
class AlgebraElement:
    algebra: ChenRuanAlgebra
    vector: List[Coeff]

    def __getitem__(self, i):
        if isinstance(i, str):
            i = self.algebra.labels.index(i)
        return self.vector[i]

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.vector, other.vector)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.vector, other.vector)])

    def scale(self, c: Coeff) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [c * a if a else a for a in self.vector])

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.vector == other.vector

    def is_zero(self) -> bool:
        return not any(self.vector)

    def __str__(self):
        parts = [f"({format_coeff(c)})*{lab}" for c, lab in zip(self.vector, self.algebra.labels) if c]
        return " + ".join(parts) or "0"


def multiply(a: AlgebraElement, p) -> AlgebraElement:
    """Act on ``a`` by a polynomial in the divisor classes.

    ``p`` is a :class:`Poly` over generators ``u1..un``, a mapping from
    exponent tuples to coefficients, or a scalar.
    """
    alg = a.algebra
    if isinstance(p, (int, Fraction)):
        return a.scale(Fraction(p))
    terms = p.terms if isinstance(p, Poly) else dict(p)
    if isinstance(p, Poly):
        names = [f"u{i + 1}" for i in range(alg.n)]
        idx = [names.index(g) for g in p.gens]
    else:
        idx = list(range(alg.n))
    out = alg.zero()
    for mono, c in terms.items():
        v = list(a.vector)
        for i, e in zip(idx, mono):
            if e < 0:
                raise ValueError("divisor classes cannot be inverted")
            for _ in range(e):
                v = cmat_vec(alg.divisor_action[i], v)
        out = out + AlgebraElement(alg, v).scale(c)
    return out


# --------------------------------------------------------------------------
# builders


def _monomials(n: int, deg: int) -> List[Tuple[int, ...]]:
    out = []
    for combo in itertools.combinations_with_replacement(range(n), deg):
        m = [0] * n
        for i in combo:
            m[i] += 1
        out.append(tuple(m))
    return out


def _mono_label(m: Sequence[int]) -> str:
    parts = [f"u{i + 1}" if e == 1 else f"u{i + 1}^{e}" for i, e in enumerate(m) if e]
    return "*".join(parts) or "1"


def _sector_ring(fan: StackyFan, sigma) -> Tuple[List[Tuple[int, ...]], List[Fraction], List[CMatrix]]:
    """Graded monomial basis of ``Q[u]/J_σ`` and the matrices of ``u_i``.

    ``J_σ`` holds the monomials whose support does not form a cone together
    with ``σ``, and the linear relations of ``N_Q^*``.
    """
    n, r = fan.n, fan.r
    lin = fan.ray_matrix()
    top = r - len(sigma)

    def allowed(m):
        return (frozenset(i for i, e in enumerate(m) if e) | sigma) in fan.cones

    levels = []  # per degree: (monomials ordered pivots-first, rref rows, pivots, basis monomials)
    for deg in range(top + 2):
        monos = sorted(_monomials(n, deg))  # high-index variables first, so they become pivots
        col = {m: i for i, m in enumerate(monos)}
        rows = []
        for m in monos:
            if not allowed(m):
                v = [Fraction(0)] * len(monos)
                v[col[m]] = Fraction(1)
                rows.append(v)
        if deg:
            for m in _monomials(n, deg - 1):
                for a in range(r):
                    v = [Fraction(0)] * len(monos)
                    for i in range(n):
                        if lin[a][i]:
                            mm = list(m)
                            mm[i] += 1
                            v[col[tuple(mm)]] += lin[a][i]
                    if any(v):
                        rows.append(v)
        red, piv = linalg.rref(rows) if rows else ([], [])
        basis = [m for i, m in enumerate(monos) if i not in set(piv)]
        levels.append((monos, col, red[:len(piv)], piv, basis))
        if not basis:
            break
    basis_all = [m for lv in levels for m in lv[4]]
    degrees = [Fraction(sum(m)) for m in basis_all]
    index = {m: i for i, m in enumerate(basis_all)}

    def normal_form(m) -> Dict[int, Fraction]:
        deg = sum(m)
        if deg >= len(levels):
            return {}
        monos, col, red, piv, basis = levels[deg]
        v = [Fraction(0)] * len(monos)
        v[col[m]] = Fraction(1)
        for row, p in zip(red, piv):
            if v[p]:
                f = v[p]
                v = [x - f * y for x, y in zip(v, row)]
        return {index[monos[i]]: x for i, x in enumerate(v) if x}

    k = len(basis_all)
    mats = []
    for i in range(n):
        m = _zero_matrix(k)
        for c, b in enumerate(basis_all):
            bb = list(b)
            bb[i] += 1
            for rr, x in normal_form(tuple(bb)).items():
                m[rr][c] = x
        mats.append(m)
    return basis_all, degrees, mats


def _block_diagonal(blocks: List[List[CMatrix]], n: int) -> List[CMatrix]:
    dim = sum(len(b[0]) if b else 0 for b in blocks)
    out = [_zero_matrix(dim) for _ in range(n)]
    off = 0
    for mats in blocks:
        k = len(mats[0]) if mats else 0
        for i in range(n):
            for r in range(k):
                for c in range(k):
                    if mats[i][r][c]:
                        out[i][off + r][off + c] = mats[i][r][c]
        off += k
    return out


def ring_from_fan_nonequivariant(fan: StackyFan) -> ChenRuanAlgebra:
    """Untwisted sector only."""
    return _nonequivariant(fan, untwisted_only=True)


def _nonequivariant(fan: StackyFan, untwisted_only: bool) -> ChenRuanAlgebra:
    if not fan.is_complete():
        raise UnsupportedInput("non-equivariant cohomology needs a complete fan; supply the algebra manually")
    boxes = fan.box()
    if untwisted_only:
        boxes = [b for b in boxes if b.is_zero]
    sectors, blocks = [], []
    for b in boxes:
        basis, degs, mats = _sector_ring(fan, b.sigma)
        labels = [f"{_mono_label(m)}@{b.label}" for m in basis]
        sectors.append(Sector(b.label, b.age, labels, degs, 0, b))
        blocks.append(mats if mats else [[[Fraction(0)] * len(basis) for _ in basis]] * fan.n)
    return ChenRuanAlgebra(CoefficientRing(), sectors, _block_diagonal(blocks, fan.n))


def chen_ruan_from_fan(fan: StackyFan, mode: str = "nonequivariant") -> ChenRuanAlgebra:
    if mode == "nonequivariant":
        return _nonequivariant(fan, untwisted_only=False)
    if mode != "equivariant":
        raise UnsupportedInput(f"unknown algebra mode {mode!r}")
    maxc = fan.maximal_cones()
    if len(maxc) != 1 or len(maxc[0]) != fan.n or fan.n != fan.r:
        raise UnsupportedInput("equivariant mode is automatic only for [C^n/G]; supply the algebra manually")
    ring = CoefficientRing.equivariant(fan.r)
    chis = [ring.gen(g) for g in ring.gens]
    rinv = linalg.inverse(fan.ray_matrix())
    # Σ_i χ_a(ρ_i) u_i = χ_a, hence u = R^{-1} χ
    u_vals: List[Coeff] = []
    for i in range(fan.n):
        acc: Coeff = Fraction(0)
        for a in range(fan.r):
            if rinv[i][a]:
                acc = acc + rinv[i][a] * chis[a]
        u_vals.append(acc)
    boxes = fan.box()
    sectors = [Sector(b.label, b.age, [f"1@{b.label}"], [Fraction(0)], 0, b) for b in boxes]
    k = len(boxes)
    mats = []
    for i in range(fan.n):
        m = _zero_matrix(k)
        for j in range(k):
            m[j][j] = u_vals[i]
        mats.append(m)
    return ChenRuanAlgebra(ring, sectors, mats)


def algebra_from_structure_constants(description: Mapping) -> ChenRuanAlgebra:
    """Build an algebra from explicit sectors and divisor matrices.

    ``description`` keys: ``coefficients`` (generator names), ``sectors``
    (each with ``name``, ``age``, ``basis`` as ``[label, degree]`` pairs
    where degree excludes the age, optional ``unit`` label) and ``divisors``
    (one square matrix per ray, acting on column vectors, or a mapping from
    ray index to a per-sector ``{label: {label: coeff}}`` action).
    """
    ring = CoefficientRing(tuple(description.get("coefficients", ())))
    sectors = []
    for s in description.get("sectors", ()):
        labels = [str(b[0]) for b in s["basis"]]
        degs = [Fraction(str(b[1])) for b in s["basis"]]
        unit = labels.index(s["unit"]) if "unit" in s else (degs.index(0) if 0 in degs else -1)
        sectors.append(Sector(str(s["name"]), Fraction(str(s.get("age", 0))), labels, degs, unit))
    all_labels = [lab for s in sectors for lab in s.labels]
    if len(set(all_labels)) != len(all_labels):
        raise ConstructionError("basis labels must be unique")
    dim = len(all_labels)
    mats = []
    for entry in description.get("divisors", ()):
        if isinstance(entry, Mapping):
            m = _zero_matrix(dim)
            for src, images in entry.items():
                c = all_labels.index(src)
                for tgt, val in images.items():
                    m[all_labels.index(tgt)][c] = ring.parse(val)
        else:
            m = [[ring.parse(x) for x in row] for row in entry]
        mats.append(m)
    return ChenRuanAlgebra(ring, sectors, mats)
