"""Finitely generated abelian groups and integer matrices between them.

Groups are kept in invariant-factor form ``Z^r ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k`` with
``d_1 | d_2 | ... | d_k`` and ``d_i >= 2``.  A homomorphism is an integer
matrix in the canonical generators, rows for the target's free part first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from .errors import InvalidFan, UnsupportedInput

IntMatrix = List[List[int]]


def _copy(m: Sequence[Sequence[int]]) -> IntMatrix:
    return [[int(x) for x in row] for row in m]


def _eye(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def imatmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    if not a:
        return []
    ncols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(ncols)]
            for i in range(len(a))]


def smith_normal_form(m: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` and ``U``, ``V`` unimodular.

    ``D`` is diagonal with non-negative entries forming a divisibility chain.
    """
    a = _copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = _eye(rows)
    v = _eye(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row dst += k * row src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            changed = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            # divisibility: pivot must divide the remaining block
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, a, v


def _diagonal(d: IntMatrix) -> List[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


@dataclass(frozen=True)
class FGAbelianGroup:
    rank: int
    torsion_orders: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion_orders", tuple(int(d) for d in self.torsion_orders))
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        for d in self.torsion_orders:
            if d < 2:
                raise ValueError("torsion orders must be >= 2")
        for d1, d2 in zip(self.torsion_orders, self.torsion_orders[1:]):
            if d2 % d1:
                raise ValueError("torsion orders must form a divisibility chain")

    @classmethod
    def normalized(cls, rank: int, orders: Sequence[int]) -> "FGAbelianGroup":
        """Normalize an arbitrary list of cyclic orders to invariant-factor form."""
        n = len(orders)
        _, d, _ = smith_normal_form([[orders[i] if i == j else 0 for j in range(n)]
                                     for i in range(n)])
        diag = [x for x in _diagonal(d) if x != 1] if n else []
        free = rank + sum(1 for x in diag if x == 0)
        return cls(free, tuple(x for x in diag if x > 1))

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion_orders)

    @property
    def is_free(self) -> bool:
        return not self.torsion_orders

    @property
    def order(self) -> int | None:
        if self.rank:
            return None
        out = 1
        for d in self.torsion_orders:
            out *= d
        return out

    def reduce(self, v: Sequence[int]) -> Tuple[int, ...]:
        """Canonical representative of an element given in generator coordinates."""
        out = list(int(x) for x in v)
        for i, d in enumerate(self.torsion_orders):
            out[self.rank + i] %= d
        return tuple(out)

    def __str__(self):
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{d}" for d in self.torsion_orders]
        return " + ".join(parts) or "0"


def free(n: int) -> FGAbelianGroup:
    return FGAbelianGroup(n)


@dataclass(frozen=True)
class GroupHom:
    source: FGAbelianGroup
    target: FGAbelianGroup
    matrix: Tuple[Tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        mat = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(mat) != self.target.ngens:
            if not (self.target.ngens == 0 and not mat):
                raise ValueError("matrix rows must match target generators")
        for row in mat:
            if len(row) != self.source.ngens:
                raise ValueError("matrix columns must match source generators")
        # reduce torsion rows
        mat = tuple(
            tuple(x % self.target.torsion_orders[i - self.target.rank] if i >= self.target.rank else x
                  for x in row)
            for i, row in enumerate(mat)
        )
        object.__setattr__(self, "matrix", mat)

    def rows(self) -> IntMatrix:
        if not self.matrix:
            return [[] for _ in range(self.target.ngens)]
        return [list(r) for r in self.matrix]

    def __call__(self, v: Sequence[int]) -> Tuple[int, ...]:
        return self.target.reduce([sum(a * b for a, b in zip(row, v)) for row in self.matrix])

    def compose(self, other: "GroupHom") -> "GroupHom":
        """``self ∘ other``."""
        if other.target != self.source:
            raise ValueError("incompatible composition")
        if not self.matrix or not other.matrix:
            mat = [[0] * other.source.ngens for _ in range(self.target.ngens)]
        else:
            mat = imatmul(self.rows(), other.rows())
        return GroupHom(other.source, self.target, mat)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.matrix for x in row)

    def relation_matrix(self) -> IntMatrix:
        """``[A | R]``: the map on lifted free modules plus the target's torsion relations."""
        t = self.target
        rows = self.rows()
        out = []
        for i in range(t.ngens):
            rel = [0] * len(t.torsion_orders)
            if i >= t.rank:
                rel[i - t.rank] = t.torsion_orders[i - t.rank]
            out.append(list(rows[i]) + rel)
        return out


def kernel(h: GroupHom) -> Tuple[FGAbelianGroup, GroupHom]:
    """Kernel of a map out of a free group, with its inclusion."""
    if not h.source.is_free:
        raise UnsupportedInput("kernel requires a free source")
    s = h.source.ngens
    m = h.relation_matrix()
    total = s + len(h.target.torsion_orders)
    if not m:
        basis = _eye(s)
    else:
        _, d, v = smith_normal_form(m)
        r = sum(1 for x in _diagonal(d) if x)
        basis = [[v[i][j] for i in range(s)] for j in range(r, total)]
    basis = _hermite_rows(basis)
    k = FGAbelianGroup(len(basis))
    incl = GroupHom(k, h.source, [[basis[j][i] for j in range(len(basis))] for i in range(s)]
                    if basis else [[] for _ in range(s)])
    return k, incl


def _hermite_rows(vectors: IntMatrix) -> IntMatrix:
    """Row-style Hermite normal form of a full-row-rank integer matrix (for stable output)."""
    a = _copy(vectors)
    if not a:
        return a
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [(abs(a[i][c]), i) for i in range(r, rows) if a[i][c]]
            if not nz:
                break
            _, p = min(nz)
            a[r], a[p] = a[p], a[r]
            done = True
            for i in range(r + 1, rows):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < rows and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return [row for row in a if any(row)]


def cokernel(h: GroupHom) -> Tuple[FGAbelianGroup, GroupHom]:
    """Cokernel in invariant-factor form, with the projection from the target."""
    t = h.target
    n = t.ngens
    pres = h.relation_matrix()
    if n == 0:
        g = FGAbelianGroup(0)
        return g, GroupHom(t, g, [])
    if not pres or not pres[0]:
        pres = [[0] for _ in range(n)]
    u, d, _ = smith_normal_form(pres)
    diag = _diagonal(d) + [0] * max(0, n - min(len(d), len(d[0])))
    free_rows = [i for i in range(n) if diag[i] == 0]
    tor_rows = [i for i in range(n) if diag[i] > 1]
    group = FGAbelianGroup(len(free_rows), tuple(diag[i] for i in tor_rows))
    proj = [u[i] for i in free_rows] + [u[i] for i in tor_rows]
    return group, GroupHom(t, group, proj)


def image_rank(h: GroupHom) -> int:
    free_rows = h.rows()[: h.target.rank]
    if not free_rows or not free_rows[0]:
        return 0
    _, d, _ = smith_normal_form(free_rows)
    return sum(1 for x in _diagonal(d) if x)


def gale_dual(rho: GroupHom) -> GroupHom:
    """Gale dual ``(Z^*)^k -> DG`` of ``rho: Z^k -> N``.

    ``DG`` is the cokernel of the transpose of ``[B | R]``, where ``B`` lifts
    ``rho`` to the free cover of ``N`` and ``R`` holds the torsion relations.
    """
    if not rho.source.is_free:
        raise UnsupportedInput("gale dual requires a free source")
    n_tgt = rho.target
    if image_rank(rho) != n_tgt.rank:
        raise InvalidFan("fan map has infinite cokernel")
    k = rho.source.ngens
    m = rho.relation_matrix()                      # (r+t) x (k+t)
    cols = k + len(n_tgt.torsion_orders)
    mt = [[m[i][j] for i in range(len(m))] for j in range(cols)]   # (k+t) x (r+t)
    src = free(len(m))
    tgt = free(cols)
    dg, proj = cokernel(GroupHom(src, tgt, mt) if m else GroupHom(src, tgt, [[] for _ in range(cols)]))
    incl = GroupHom(free(k), tgt, [[1 if i == j else 0 for j in range(k)] for i in range(cols)]
                    if k else [[] for _ in range(cols)])
    return proj.compose(incl)


def dual_map(rho: GroupHom) -> GroupHom:
    """``N^* -> (Z^*)^k``: evaluation of characters on the images of the basis vectors."""
    r = rho.target.rank
    rows = rho.rows()[:r]
    k = rho.source.ngens
    mat = [[rows[a][i] for a in range(r)] for i in range(k)]
    return GroupHom(free(r), free(k), mat if r else [[] for _ in range(k)])
