"""Truncated multivariate series with algebra-valued coefficients, and the
I-function / mirror-map / J-function machinery built on top of them.

A term key is ``(q, mono, z)``: ``q`` is a rational exponent vector for the
Novikov variable (in curve-basis coordinates), ``mono`` an exponent vector over
the series variables and ``z`` an integer power.  Values are coordinate
vectors in the algebra basis (length 1 for scalar series).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .cohomology import ChenRuanAlgebra, CMatrix, cmat_vec
from .errors import (DegenerateNormalization, DomainError, NonInvertibleMap,
                     RankDeficiency, ShapeError, SingularFactor, UnsupportedInput)
from .poly import Coeff, Poly, _power, extend_gens, format_coeff, total_degree
from .stackyfan import ExtendedDegree, ExtendedStackyFan, extend, frac

Key = Tuple[Tuple[Fraction, ...], Tuple[int, ...], int]
Vector = List[Coeff]

ZERO = Fraction(0)
ONE = Fraction(1)


def vzero(n: int) -> Vector:
    return [ZERO] * n


def vadd_into(acc: Vector, v: Sequence[Coeff], c: Coeff = ONE) -> None:
    for i, x in enumerate(v):
        if x:
            acc[i] = acc[i] + (x if c == 1 else c * x)


def vscale(c: Coeff, v: Sequence[Coeff]) -> Vector:
    return [c * x if x else ZERO for x in v]


def _invert(c: Coeff) -> Coeff:
    if isinstance(c, Poly) and len(c.terms) != 1:
        raise DegenerateNormalization(f"leading coefficient {format_coeff(c)} is not invertible")
    if not c:
        raise DegenerateNormalization("leading coefficient vanishes")
    return _power(c, -1)


# --------------------------------------------------------------------------
# spaces and series


@dataclass(frozen=True, eq=False)
class SeriesSpace:
    qdim: int
    vars: Tuple[str, ...]
    var_weights: Tuple[Fraction, ...]
    var_orders: Tuple[int, ...]
    q_weights: Tuple[Fraction, ...]
    cutoff: Fraction
    max_order: Optional[int]
    labels: Tuple[str, ...] = ("1",)
    gens: Tuple[str, ...] = ()
    q_names: Tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.labels)

    def grade(self, q: Sequence[Fraction], mono: Sequence[int]) -> Fraction:
        g = sum((a * b for a, b in zip(self.q_weights, q)), ZERO)
        return g + sum((w * e for w, e in zip(self.var_weights, mono) if e), ZERO)

    def order(self, mono: Sequence[int]) -> int:
        return sum(o * e for o, e in zip(self.var_orders, mono))

    def admits(self, q, mono) -> bool:
        if self.grade(q, mono) > self.cutoff:
            return False
        return self.max_order is None or self.order(mono) <= self.max_order

    def scalar(self) -> "SeriesSpace":
        return replace(self, labels=("1",))

    def with_labels(self, labels: Sequence[str]) -> "SeriesSpace":
        return replace(self, labels=tuple(labels))

    def with_gens(self, gens: Sequence[str]) -> "SeriesSpace":
        return replace(self, gens=tuple(gens))

    def rename(self, mapping: Mapping[str, str]) -> "SeriesSpace":
        return replace(self, vars=tuple(mapping.get(v, v) for v in self.vars))

    def compatible(self, other: "SeriesSpace") -> bool:
        return (self.qdim == other.qdim and self.vars == other.vars
                and self.gens == other.gens)

    def var_index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise DomainError(f"unknown series variable {name!r}") from None

    def zero_q(self) -> Tuple[Fraction, ...]:
        return tuple(ZERO for _ in range(self.qdim))

    def zero_mono(self) -> Tuple[int, ...]:
        return tuple(0 for _ in self.vars)


class Series:
    """Immutable-by-convention truncated series."""

    __slots__ = ("space", "terms")

    def __init__(self, space: SeriesSpace, terms: Optional[Dict[Key, Vector]] = None):
        self.space = space
        self.terms: Dict[Key, Vector] = {}
        if terms:
            for k, v in terms.items():
                if any(v) and space.admits(k[0], k[1]):
                    self.terms[k] = list(v)

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, space: SeriesSpace) -> "Series":
        return cls(space)

    @classmethod
    def constant(cls, space: SeriesSpace, value, z: int = 0) -> "Series":
        if not isinstance(value, (list, tuple)):
            value = [value] + [ZERO] * (space.dim - 1)
        return cls(space, {(space.zero_q(), space.zero_mono(), z): [Fraction(x) if isinstance(x, int) else x
                                                                    for x in value]})

    @classmethod
    def variable(cls, space: SeriesSpace, name: str) -> "Series":
        sp = space.scalar()
        i = sp.var_index(name)
        mono = tuple(int(j == i) for j in range(len(sp.vars)))
        return cls(sp, {(sp.zero_q(), mono, 0): [ONE]})

    # basic algebra ------------------------------------------------------
    def _check(self, other: "Series") -> None:
        if not self.space.compatible(other.space):
            raise DomainError("series live in incompatible spaces")

    def __add__(self, other: "Series") -> "Series":
        self._check(other)
        if self.space.dim != other.space.dim:
            raise DomainError("adding series of different shapes")
        out = {k: list(v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            if k in out:
                vadd_into(out[k], v)
            else:
                out[k] = list(v)
        return Series(self.space, out)

    def __neg__(self) -> "Series":
        return Series(self.space, {k: vscale(-ONE, v) for k, v in self.terms.items()})

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, c: Coeff) -> "Series":
        if not c:
            return Series(self.space)
        return Series(self.space, {k: vscale(c, v) for k, v in self.terms.items()})

    def __mul__(self, other: "Series") -> "Series":
        """Product where at least one factor is scalar-valued."""
        if not isinstance(other, Series):
            return self.scale(other)
        self._check(other)
        a, b = self, other
        if a.space.dim != 1:
            a, b = b, a
        if a.space.dim != 1:
            raise DomainError("product of two algebra-valued series is not defined")
        space = b.space
        out: Dict[Key, Vector] = {}
        for (q1, m1, z1), v1 in a.terms.items():
            c = v1[0]
            for (q2, m2, z2), v2 in b.terms.items():
                q = tuple(x + y for x, y in zip(q1, q2))
                m = tuple(x + y for x, y in zip(m1, m2))
                if not space.admits(q, m):
                    continue
                key = (q, m, z1 + z2)
                acc = out.get(key)
                if acc is None:
                    out[key] = vscale(c, v2)
                else:
                    vadd_into(acc, v2, c)
        return Series(space, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.space.compatible(other.space) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    # structure ----------------------------------------------------------
    def sorted_keys(self) -> List[Key]:
        return sorted(self.terms, key=lambda k: (self.space.grade(k[0], k[1]), k[0], k[1], -k[2]))

    def z_powers(self) -> List[int]:
        return sorted({k[2] for k in self.terms})

    def coeff_z(self, k: int) -> "Series":
        return Series(self.space, {(q, m, 0): v for (q, m, z), v in self.terms.items() if z == k})

    def shift_z(self, k: int) -> "Series":
        return Series(self.space, {(q, m, z + k): v for (q, m, z), v in self.terms.items()})

    def truncate_z(self, z_min: int) -> "Series":
        return Series(self.space, {k: v for k, v in self.terms.items() if k[2] >= z_min})

    def component(self, index) -> "Series":
        if isinstance(index, str):
            index = self.space.labels.index(index)
        sp = self.space.scalar()
        return Series(sp, {k: [v[index]] for k, v in self.terms.items() if v[index]})

    def embed(self, space: SeriesSpace, index: int) -> "Series":
        """Scalar series placed along basis vector ``index`` of ``space``."""
        out = {}
        for k, v in self.terms.items():
            w = vzero(space.dim)
            w[index] = v[0]
            out[k] = w
        return Series(space, out)

    def apply(self, m: CMatrix) -> "Series":
        return Series(self.space, {k: cmat_vec(m, v) for k, v in self.terms.items()})

    def map_coeffs(self, f: Callable[[Coeff], Coeff], space: Optional[SeriesSpace] = None) -> "Series":
        return Series(space or self.space, {k: [f(x) if x else ZERO for x in v]
                                            for k, v in self.terms.items()})

    def filter(self, pred: Callable[[Key], bool]) -> "Series":
        return Series(self.space, {k: v for k, v in self.terms.items() if pred(k)})

    def restrict(self, zero_vars: Iterable[str]) -> "Series":
        idx = [self.space.var_index(v) for v in zero_vars]
        return self.filter(lambda k: all(k[1][i] == 0 for i in idx))

    def retruncate(self, space: SeriesSpace) -> "Series":
        return Series(space, self.terms)

    def diff(self, var: str) -> "Series":
        i = self.space.var_index(var)
        out = {}
        for (q, m, z), v in self.terms.items():
            e = m[i]
            if e:
                mm = m[:i] + (e - 1,) + m[i + 1:]
                out[(q, mm, z)] = vscale(Fraction(e), v)
        return Series(self.space, out)

    def euler(self, var: str) -> "Series":
        i = self.space.var_index(var)
        return Series(self.space, {k: vscale(Fraction(k[1][i]), v)
                                   for k, v in self.terms.items() if k[1][i]})

    def with_gens(self, gens: Sequence[str]) -> "Series":
        sp = self.space.with_gens(gens)
        return Series(sp, {k: [extend_gens(x, gens) for x in v] for k, v in self.terms.items()})

    def get(self, q=None, mono=None, z: int = 0) -> Vector:
        q = self.space.zero_q() if q is None else tuple(Fraction(x) for x in q)
        if mono is None:
            mono = self.space.zero_mono()
        elif isinstance(mono, Mapping):
            mono = tuple(int(mono.get(v, 0)) for v in self.space.vars)
        return self.terms.get((q, tuple(mono), z), vzero(self.space.dim))

    def constant_term(self) -> Vector:
        return self.get()

    # inversion and composition -------------------------------------
    def inverse(self, max_iter: int = 10000) -> "Series":
        """Multiplicative inverse of a z-free scalar series."""
        if self.space.dim != 1:
            raise DomainError("only scalar series can be inverted")
        c0 = self.constant_term()[0]
        if not c0:
            raise DegenerateNormalization("series has vanishing constant term")
        inv0 = _invert(c0)
        rest = Series(self.space, {k: v for k, v in self.terms.items()
                                   if k != (self.space.zero_q(), self.space.zero_mono(), 0)})
        self._check_positive(rest)
        step = rest.scale(-inv0)
        out = Series.constant(self.space, inv0)
        power = Series.constant(self.space, ONE)
        for _ in range(max_iter):
            power = power * step
            if power.is_zero():
                return out
            out = out + power.scale(inv0)
        raise DegenerateNormalization("inverse did not terminate within the truncation")

    def _check_positive(self, s: "Series") -> None:
        for (q, m, z) in s.terms:
            if z == 0 and self.space.grade(q, m) <= 0 and self.space.order(m) <= 0:
                raise DegenerateNormalization("series has a non-constant term of zero weight")

    def substitute(self, values: Mapping[str, "Series"], space: SeriesSpace) -> "Series":
        """Replace variables by scalar series living in ``space`` (a scalar or target space).

        Variables of ``self`` missing from ``values`` must also be variables
        of ``space`` and are kept.
        """
        sp = space.scalar()
        subs: List[Series] = []
        for v in self.space.vars:
            if v in values:
                s = values[v]
                if not s.space.compatible(sp):
                    raise DomainError("substituted series live in the wrong space")
                subs.append(Series(sp, s.terms))
            else:
                subs.append(Series.variable(sp, v))
        one = Series.constant(sp, ONE)
        cache: Dict[Tuple[int, int], Series] = {}

        def power(i: int, e: int) -> Series:
            if e == 0:
                return one
            key = (i, e)
            if key not in cache:
                cache[key] = power(i, e - 1) * subs[i]
            return cache[key]

        mono_cache: Dict[Tuple[int, ...], Series] = {(): one}

        def mono_series(m: Tuple[int, ...]) -> Series:
            if m in mono_cache:
                return mono_cache[m]
            # strip the last nonzero exponent
            j = max(i for i, e in enumerate(m) if e)
            rest = m[:j] + (0,) * (len(m) - j)
            rest = tuple(rest)
            if not any(rest):
                res = power(j, m[j])
            else:
                res = mono_series(rest) * power(j, m[j])
            mono_cache[m] = res
            return res

        target = space
        out: Dict[Key, Vector] = {}
        for (q, m, z), vec in self.terms.items():
            ms = one if not any(m) else mono_series(m)
            for (q2, m2, z2), c in ms.terms.items():
                qq = tuple(a + b for a, b in zip(q, q2))
                if not target.admits(qq, m2):
                    continue
                key = (qq, m2, z + z2)
                acc = out.get(key)
                if acc is None:
                    out[key] = vscale(c[0], vec)
                else:
                    vadd_into(acc, vec, c[0])
        return Series(target, out)

    # output ---------------------------------------------------------------
    def to_json(self) -> List[dict]:
        out = []
        for k in self.sorted_keys():
            q, m, z = k
            v = self.terms[k]
            out.append({
                "q": [str(x) for x in q],
                "mono": {name: e for name, e in zip(self.space.vars, m) if e},
                "z": z,
                "coeff": {lab: coeff_to_json(x) for lab, x in zip(self.space.labels, v) if x},
            })
        return out

    def render(self) -> str:
        lines = []
        for k in self.sorted_keys():
            q, m, z = k
            parts = []
            if any(q):
                if self.space.qdim == 1:
                    parts.append(f"Q^{q[0]}" if q[0] != 1 else "Q")
                else:
                    parts.append("Q^(" + ",".join(str(x) for x in q) + ")")
            for name, e in zip(self.space.vars, m):
                if e:
                    parts.append(name if e == 1 else f"{name}^{e}")
            if z:
                parts.append("z" if z == 1 else f"z^{z}")
            mono = "*".join(parts) or "1"
            vec = " + ".join(f"({format_coeff(x)})*{lab}"
                             for lab, x in zip(self.space.labels, self.terms[k]) if x)
            lines.append(f"{mono}: {vec}")
        return "\n".join(lines)


def coeff_to_json(c: Coeff):
    if isinstance(c, Poly):
        return [[list(m), str(x)] for m, x in sorted(c.terms.items())]
    return str(Fraction(c))


def coeff_from_json(data, gens: Sequence[str]) -> Coeff:
    if isinstance(data, list):
        return Poly.reduce(Poly(gens, {tuple(m): Fraction(x) for m, x in data}))
    return Fraction(data)


def series_from_json(space: SeriesSpace, data: Sequence[Mapping]) -> Series:
    terms = {}
    for item in data:
        q = tuple(Fraction(x) for x in item["q"])
        mono = tuple(int(item["mono"].get(v, 0)) for v in space.vars)
        vec = vzero(space.dim)
        for lab, c in item["coeff"].items():
            vec[space.labels.index(lab)] = coeff_from_json(c, space.gens)
        terms[(q, mono, int(item["z"]))] = vec
    return Series(space, terms)


# --------------------------------------------------------------------------
# truncation policy


@dataclass
class TruncationPolicy:
    """Which terms of an I-function are kept.

    ``grading`` is a functional on (d, k) and bounds the Novikov and
    extension-variable exponents; ``t_weights`` adds t-monomials to the same
    grading, and ``t_order`` bounds the total degree in the active t's.
    With ``t_order=None`` the t's are bounded by the grading alone (their
    weights must then be positive).
    """

    grading: Tuple[Fraction, ...]
    cutoff: Fraction
    t_order: Optional[int] = 0
    t_weights: Optional[Tuple[Fraction, ...]] = None
    t_active: Optional[Tuple[int, ...]] = None
    x_active: Optional[Tuple[int, ...]] = None
    z_min: Optional[int] = None

    def space(self, ext: ExtendedStackyFan, labels: Sequence[str], gens: Sequence[str] = ()) -> SeriesSpace:
        p, m, n = ext.p, ext.m, ext.n
        xw = tuple(Fraction(x) for x in self.grading[p:p + m])
        tw = tuple(Fraction(x) for x in (self.t_weights or [0] * n))
        names = tuple(f"x{j}" for j in range(m)) + tuple(f"t{i + 1}" for i in range(n))
        return SeriesSpace(
            qdim=p, vars=names, var_weights=xw + tw, var_orders=(0,) * m + (0 if self.t_order is None else 1,) * n,
            q_weights=tuple(Fraction(x) for x in self.grading[:p]), cutoff=Fraction(self.cutoff),
            max_order=self.t_order, labels=tuple(labels), gens=tuple(gens),
            q_names=("Q",) if p == 1 else tuple(f"Q{a + 1}" for a in range(p)))

    def active_t(self, n: int) -> List[int]:
        return list(range(n)) if self.t_active is None else list(self.t_active)

    def t_bound(self, n: int) -> int:
        """Largest total t-degree that can survive the truncation."""
        if self.t_order is not None:
            return self.t_order
        active = self.active_t(n)
        if not active:
            return 0
        ws = [Fraction(self.t_weights[i]) if self.t_weights else ZERO for i in active]
        if min(ws) <= 0:
            raise DomainError("without a t-order bound every active t needs a positive weight")
        return int(Fraction(self.cutoff) / min(ws))


# --------------------------------------------------------------------------
# Laurent-in-z vectors


LVec = Dict[int, Vector]


def lv_times_linear(lv: LVec, u: CMatrix, a: Fraction) -> LVec:
    """Multiply by ``U + a z``."""
    out: LVec = {}
    for p, v in lv.items():
        w = cmat_vec(u, v)
        if any(w):
            acc = out.setdefault(p, vzero(len(v)))
            vadd_into(acc, w)
        if a:
            acc = out.setdefault(p + 1, vzero(len(v)))
            vadd_into(acc, v, a)
    return {p: v for p, v in out.items() if any(v)}


def lv_times_reciprocal(lv: LVec, u: CMatrix, a: Fraction, z_min: Optional[int], dim: int) -> LVec:
    """Multiply by ``(U + a z)^{-1} = Σ_k (-1)^k a^{-k-1} z^{-k-1} U^k`` with ``a != 0``."""
    out: LVec = {}
    for p, v in lv.items():
        w = v
        k = 0
        while any(w):
            zp = p - k - 1
            if z_min is not None and zp < z_min:
                break
            if z_min is None and k > dim:
                raise SingularFactor(
                    "reciprocal factor does not terminate (non-nilpotent divisor action); set a z window")
            c = Fraction((-1) ** k) / a ** (k + 1)
            acc = out.setdefault(zp, vzero(len(v)))
            vadd_into(acc, w, c)
            w = cmat_vec(u, w)
            k += 1
    return {p: v for p, v in out.items() if any(v)}


def lv_scale(lv: LVec, c: Coeff, shift: int = 0) -> LVec:
    return {p + shift: vscale(c, v) for p, v in lv.items()}


def lv_apply(lv: LVec, m: CMatrix) -> LVec:
    out = {p: cmat_vec(m, v) for p, v in lv.items()}
    return {p: v for p, v in out.items() if any(v)}


# --------------------------------------------------------------------------
# I-functions


SummandHook = Callable[[ExtendedDegree, LVec], LVec]


def _factor_steps(lam: Fraction) -> Tuple[List[Fraction], List[Fraction]]:
    """(numerator a's, denominator a's) of the factor ratio after cancellation."""
    lam = Fraction(lam)
    f = frac(lam)
    if lam > 0:
        a = f if f else ONE
        dens = []
        while a <= lam:
            dens.append(a)
            a += 1
        return [], dens
    nums = []
    a = f - 1 if f else ZERO
    while a > lam:
        nums.append(a)
        a -= 1
    return nums, []


def _t_multi_indices(active: Sequence[int], n: int, max_order: int):
    for total in range(max_order + 1):
        for combo in itertools.combinations_with_replacement(active, total):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            yield tuple(alpha)


def degree_summand(ext: ExtendedStackyFan, alg: ChenRuanAlgebra, lam: ExtendedDegree,
                   z_min: Optional[int] = None, hook: Optional[SummandHook] = None,
                   gens: Sequence[str] = ()) -> LVec:
    """``z x^k/(z^{|k|} k!) ∏ (factor ratios) y^b`` (without Q, t-dependence) as a Laurent vector."""
    b = ext.box_elements[lam.box_index]
    try:
        sector = alg.sector_index(b.label)
    except KeyError:
        raise DomainError(f"algebra has no sector for box element {b.label}") from None
    y = [extend_gens(x, gens) if gens else x for x in alg.unit(sector).vector]
    lv: LVec = {0: y}
    n, p = ext.n, ext.p
    dens = []
    for i in range(n):
        nums, den = _factor_steps(lam.coords[i])
        for a in nums:
            lv = lv_times_linear(lv, alg.divisor_action[i], a)
        dens.extend((i, a) for a in den)
    ks = lam.k(p)
    kfact = 1
    for k in ks:
        kfact *= math.factorial(k)
    lv = lv_scale(lv, Fraction(1, kfact), 1 - sum(ks))
    if hook is not None:
        lv = hook(lam, lv)
    for i, a in dens:
        lv = lv_times_reciprocal(lv, alg.divisor_action[i], a, z_min, alg.dim)
    return lv


def i_function_summands(ext: ExtendedStackyFan, alg: ChenRuanAlgebra, policy: TruncationPolicy,
                        hook: Optional[SummandHook] = None, gens: Sequence[str] = (),
                        degrees: Optional[Dict[int, List[ExtendedDegree]]] = None):
    """Yield ``(λ, Series)`` for every enumerated extended degree."""
    gens = tuple(alg.coeff.gens) + tuple(g for g in gens if g not in alg.coeff.gens)
    space = policy.space(ext, alg.labels, gens)
    if len(alg.divisor_action) != ext.n:
        raise DomainError("algebra must carry one divisor matrix per ray")
    if degrees is None:
        degrees = ext.enumerate_degrees(policy.grading, policy.cutoff, policy.x_active)
    n, p = ext.n, ext.p
    active = policy.active_t(n)
    mats = [[[extend_gens(x, gens) for x in row] for row in mat] for mat in alg.divisor_action]
    for b in sorted(degrees):
        for lam in degrees[b]:
            base = degree_summand(ext, alg, lam, policy.z_min, hook, gens)
            if gens != tuple(alg.coeff.gens):
                base = {zp: [extend_gens(x, gens) for x in v] for zp, v in base.items()}
            d = lam.d(p)
            dd = [sum((ext.curve_basis[a][i] * d[a] for a in range(p)), ZERO) for i in range(n)]
            k = lam.k(p)
            terms: Dict[Key, Vector] = {}
            # exp(Σ t_i (U_i/z + D_i·d)) expanded per multi-index, built incrementally
            cache: Dict[Tuple[int, ...], LVec] = {tuple([0] * n): base}
            for alpha in _t_multi_indices(active, n, policy.t_bound(n)):
                mono = tuple(k) + alpha
                if not space.admits(d, mono):
                    continue
                if alpha not in cache:
                    i = max(j for j in range(n) if alpha[j])
                    prev = list(alpha)
                    prev[i] -= 1
                    prev = tuple(prev)
                    if prev not in cache:
                        continue
                    src = cache[prev]
                    nxt: LVec = {}
                    for zp, v in src.items():
                        w = cmat_vec(mats[i], v)
                        if any(w):
                            acc = nxt.setdefault(zp - 1, vzero(len(v)))
                            vadd_into(acc, w)
                        if dd[i]:
                            acc = nxt.setdefault(zp, vzero(len(v)))
                            vadd_into(acc, v, dd[i])
                    nxt = {zp: vscale(Fraction(1, alpha[i]), v) for zp, v in nxt.items() if any(v)}
                    cache[alpha] = nxt
                for zp, v in cache[alpha].items():
                    if policy.z_min is not None and zp < policy.z_min:
                        continue
                    terms[(tuple(d), mono, zp)] = v
            yield lam, Series(space, terms)


def i_function(ext: ExtendedStackyFan, alg: ChenRuanAlgebra, policy: TruncationPolicy,
               hook: Optional[SummandHook] = None, gens: Sequence[str] = ()) -> Series:
    total: Optional[Series] = None
    for _, s in i_function_summands(ext, alg, policy, hook, gens):
        total = s if total is None else total + s
    if total is None:
        g = tuple(alg.coeff.gens) + tuple(x for x in gens if x not in alg.coeff.gens)
        return Series(policy.space(ext, alg.labels, g))
    return total


# --------------------------------------------------------------------------
# asymptotics and condition sharp


@dataclass
class Asymptotics:
    F: Series
    G: Series
    shape_holds: bool
    offending: List[Key] = field(default_factory=list)


def asymptotics(I: Series, alg: ChenRuanAlgebra) -> Asymptotics:
    unit = alg.unit_of_sector[0]
    F = I.coeff_z(1).component(unit)
    G = I.coeff_z(0)
    bad = []
    for (q, m, z), v in I.terms.items():
        if z >= 2 and any(v):
            bad.append((q, m, z))
        elif z == 1 and any(x for i, x in enumerate(v) if i != unit):
            bad.append((q, m, z))
    return Asymptotics(F, G, not bad, sorted(bad, key=lambda k: (-k[2], k[0], k[1])))


@dataclass
class SharpVerdict:
    holds: Optional[bool]
    mode: str
    witnesses: List[dict] = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        return {"holds": self.holds, "mode": self.mode, "witnesses": self.witnesses, "note": self.note}


def order_of_degree(ext: ExtendedStackyFan, lam: ExtendedDegree) -> Fraction:
    """``-K·λ + age(v(λ)) + #{i : λ_i ∈ Z_{<0}}`` summed over all n+m coordinates."""
    b = ext.box_elements[lam.box_index]
    negint = sum(1 for x in lam.coords[:ext.n] if x < 0 and x.denominator == 1)
    return sum(lam.coords, ZERO) + b.age + negint


def check_sharp(ext: ExtendedStackyFan, mode: str = "direct", extended: bool = False,
                grading: Optional[Sequence[Fraction]] = None, cutoff: Fraction = Fraction(6),
                I: Optional[Series] = None, alg: Optional[ChenRuanAlgebra] = None) -> SharpVerdict:
    """Condition ♯ (``extended=False``) or S-♯ for the extension of ``ext``.

    ``direct`` evaluates the order inequality on all enumerated degrees,
    ``lemma`` applies the Fano + canonical criterion, ``shape`` inspects the
    z-asymptotics of a computed I-function.
    """
    if mode == "lemma":
        if extended:
            raise UnsupportedInput("the Fano criterion only addresses condition ♯")
        if not ext.base.is_complete():
            raise UnsupportedInput("lemma mode needs a complete fan")
        wit = []
        for g in ext.mori_cone():
            kd = sum((ext.curve_basis[a][i] * g[a] for a in range(ext.p) for i in range(ext.n)), ZERO)
            if kd <= 0:
                wit.append({"reason": "not Fano", "generator": [str(x) for x in g]})
        for b in ext.box_elements:
            if not b.is_zero and b.age < 1:
                wit.append({"reason": "age below 1", "box": b.label, "age": str(b.age)})
        if wit:
            return SharpVerdict(None, mode, wit, "criterion inconclusive")
        return SharpVerdict(True, mode, [], "Fano with canonical singularities")
    if mode == "shape":
        if I is None or alg is None:
            raise DomainError("shape mode needs a computed I-function")
        asy = asymptotics(I, alg)
        wit = [{"q": [str(x) for x in q], "mono": list(m), "z": z} for q, m, z in asy.offending]
        holds = asy.shape_holds
        if holds:
            ok, extra = _linear_mirror_map(asy)
            holds = ok
            wit += extra
        return SharpVerdict(holds, mode, wit, "up to truncation")
    if mode != "direct":
        raise DomainError(f"unknown sharp mode {mode!r}")
    target = ext if extended else extend(ext.base, [], ext.curve_basis, ext.mori_generators)
    if grading is None:
        grading = target.default_grading()
    degs = target.enumerate_degrees(grading, cutoff)
    wit = []
    for b, lams in degs.items():
        for lam in lams:
            if not any(lam.coords):
                continue
            if extended and _is_extension_direction(target, lam):
                continue
            o = order_of_degree(target, lam)
            if o < 2:
                wit.append({"degree": [str(x) for x in lam.dk], "box": target.box_elements[b].label,
                            "order": str(o)})
    return SharpVerdict(not wit, mode, wit, f"up to cutoff {cutoff}")


def _is_extension_direction(ext: ExtendedStackyFan, lam: ExtendedDegree) -> bool:
    k = lam.k(ext.p)
    return sum(k) == 1 and not any(lam.d(ext.p)) and min(k) >= 0


def _linear_mirror_map(asy: Asymptotics):
    """S-♯ shape: ``F = 1`` and ``G`` linear in the variables with no Novikov terms."""
    space = asy.G.space
    ok_f = asy.F == Series.constant(space.scalar(), ONE, 0)
    wit = [{"q": [str(x) for x in q], "mono": list(m), "z": 0}
           for q, m, _ in asy.G.sorted_keys() if any(q) or sum(m) != 1]
    if not ok_f:
        wit.append({"reason": "F differs from 1"})
    return ok_f and not wit, wit


# --------------------------------------------------------------------------
# mirror map, reversion and J-functions


def mirror_map(F: Series, G: Series) -> Series:
    if not F.constant_term()[0]:
        raise DegenerateNormalization("F has vanishing constant term")
    return F.inverse() * G


@dataclass
class Reversion:
    coordinates: List[str]
    targets: List[str]
    names: List[str]
    inverse: Dict[str, Series]        # coordinate -> series in the new variables
    space: SeriesSpace


def reverse(tau: Series, coordinates: Sequence[str], targets: Sequence[str],
            names: Sequence[str], max_iter: int = 500) -> Reversion:
    """Invert ``v ↦ (τ-component along targets)`` as a map of coordinate variables."""
    sp = tau.space
    if not (len(coordinates) == len(targets) == len(names)):
        raise DomainError("coordinates, targets and names must have equal length")
    idx = [sp.var_index(v) for v in coordinates]
    floors = [(sp.var_weights[i], sp.var_orders[i]) for i in idx]
    if any(w <= 0 and o <= 0 for w, o in floors):
        raise DomainError("coordinate weights must be positive")
    comps = [tau.component(t) for t in targets]
    zq = sp.zero_q()
    a = []
    for c in comps:
        row = []
        for i in idx:
            mono = tuple(int(j == i) for j in range(len(sp.vars)))
            x = c.get(zq, mono)[0]
            if isinstance(x, Poly):
                raise NonInvertibleMap("linear part has non-constant entries")
            row.append(Fraction(x))
        a.append(row)
    try:
        ainv = linalg.inverse(a)
    except ZeroDivisionError:
        raise NonInvertibleMap("linear part of the mirror map is singular") from None
    new_space = sp.rename(dict(zip(coordinates, names))).scalar()
    tvars = [Series.variable(new_space, nm) for nm in names]
    old_scalar = sp.scalar()
    comps_s = [Series(old_scalar, c.terms) for c in comps]
    # substitution space: keep non-coordinate variables under their old names
    v = [Series.zero(new_space) for _ in coordinates]
    for _ in range(max_iter):
        values = dict(zip(coordinates, v))
        cur = [c.substitute(values, new_space) for c in comps_s]
        resid = [t - c for t, c in zip(tvars, cur)]
        upd = []
        for r in range(len(v)):
            acc = v[r]
            for s in range(len(v)):
                if ainv[r][s]:
                    acc = acc + resid[s].scale(ainv[r][s])
            upd.append(acc)
        if all(x == y for x, y in zip(upd, v)):
            for s, (w, o) in zip(v, floors):
                for (q, m, z) in s.terms:
                    if new_space.grade(q, m) < w or new_space.order(m) < o:
                        raise DomainError("inverse mirror map has a term below the coordinate weight;"
                                          " truncated composition would be unreliable")
            return Reversion(list(coordinates), list(targets), list(names),
                             dict(zip(coordinates, v)), new_space)
        v = upd
    raise NonInvertibleMap("reversion did not stabilise")


def compose_map(rev: Reversion, tau: Series) -> Series:
    """``τ ∘ v(T)`` as a series in the new variables (for round-trip checks)."""
    return tau.substitute(rev.inverse, rev.space.with_labels(tau.space.labels))


@dataclass
class JFunction:
    tau: Series
    reversion: Reversion
    J: Series
    F: Series


def j_function(I: Series, alg: ChenRuanAlgebra, coordinates: Sequence[str], targets: Sequence[str],
               names: Sequence[str]) -> JFunction:
    asy = asymptotics(I, alg)
    if not asy.shape_holds:
        raise ShapeError("I-function is not of the form F z + G + O(1/z); use the Birkhoff procedure")
    tau = mirror_map(asy.F, asy.G)
    outside = [lab for i, lab in enumerate(tau.space.labels)
               if lab not in targets and not tau.component(i).is_zero()]
    if outside:
        raise ShapeError(f"mirror map has components outside the targets: {outside}")
    rev = reverse(tau, coordinates, targets, names)
    normalized = asy.F.inverse() * I
    J = normalized.substitute(rev.inverse, rev.space.with_labels(I.space.labels))
    return JFunction(tau, rev, J, asy.F)


# --------------------------------------------------------------------------
# quantum products


def _solve_series(mat: List[List[Series]], rhs: List[Series]) -> List[Series]:
    """Solve ``mat · c = rhs`` where ``mat`` has an invertible constant part."""
    k = len(rhs)
    sp = rhs[0].space
    m0 = [[mat[r][c].constant_term()[0] for c in range(k)] for r in range(k)]
    if any(isinstance(x, Poly) for row in m0 for x in row):
        raise RankDeficiency("leading-order matrix has non-constant entries")
    try:
        inv = linalg.inverse(m0)
    except ZeroDivisionError:
        raise RankDeficiency("leading-order derivative family is degenerate") from None
    rest = [[mat[r][c] - Series.constant(sp, m0[r][c]) for c in range(k)] for r in range(k)]
    c = [Series.zero(sp) for _ in range(k)]
    for _ in range(10000):
        # c = M0^{-1}(rhs - N c)
        tmp = []
        for r in range(k):
            acc = rhs[r]
            for s in range(k):
                if not rest[r][s].is_zero() and not c[s].is_zero():
                    acc = acc - rest[r][s] * c[s]
            tmp.append(acc)
        new = []
        for r in range(k):
            acc = Series.zero(sp)
            for s in range(k):
                if inv[r][s]:
                    acc = acc + tmp[s].scale(inv[r][s])
            new.append(acc)
        if all(x == y for x, y in zip(new, c)):
            return new
        c = new
    raise RankDeficiency("structure-constant solve did not stabilise")


def quantum_structure_constants(J: Series, directions: Sequence[str],
                                pairs: Optional[Sequence[Tuple[str, str]]] = None
                                ) -> Dict[Tuple[str, str], Dict[str, Series]]:
    """``c_{αβ}^γ`` with ``z ∂_α∂_β J = Σ_γ c_{αβ}^γ ∂_γ J``, read off at ``z^0``."""
    sp = J.space
    k = len(directions)
    derivs = [J.diff(v) for v in directions]
    lead = [d.coeff_z(0) for d in derivs]
    m0 = [[lead[g].constant_term()[row] for g in range(k)] for row in range(sp.dim)]
    if any(isinstance(x, Poly) for row in m0 for x in row):
        raise RankDeficiency("leading-order derivative family has non-constant entries")
    _, piv = linalg.rref(linalg.transpose(m0))
    if len(piv) < k:
        raise RankDeficiency("derivative family is linearly dependent at leading order")
    rows = piv
    mat = [[lead[g].component(row) for g in range(k)] for row in rows]
    if pairs is None:
        pairs = [(a, b) for a, b in itertools.product(directions, repeat=2)]
    out = {}
    for a, b in pairs:
        w = J.diff(a).diff(b).shift_z(1).coeff_z(0)
        rhs = [w.component(row) for row in rows]
        sol = _solve_series(mat, rhs)
        out[(a, b)] = dict(zip(directions, sol))
    return out


def quantum_power(J: Series, var: str, k: int) -> Series:
    """``[z^0] z^{k-1} ∂^k J`` for a small J-function in the variable ``var``."""
    s = J
    for _ in range(k):
        s = s.diff(var)
    return s.shift_z(k - 1).coeff_z(0)


# --------------------------------------------------------------------------
# consistency checks


def homogeneity_defects(I: Series, alg_grading: Sequence[Fraction], q_degree: Sequence[Fraction],
                        var_degrees: Mapping[str, Fraction], z_degree: Fraction = ONE,
                        gen_degrees: Optional[Mapping[str, Fraction]] = None,
                        total: Fraction = ONE) -> List[Key]:
    """Keys whose terms are not homogeneous of degree ``total``."""
    sp = I.space
    vd = [Fraction(var_degrees.get(v, 0)) for v in sp.vars]
    bad = []
    for (q, m, z), vec in I.terms.items():
        base = sum((Fraction(a) * b for a, b in zip(q_degree, q)), ZERO)
        base += sum((a * e for a, e in zip(vd, m)), ZERO) + z_degree * z
        for i, x in enumerate(vec):
            if not x:
                continue
            for e in total_degree(x, gen_degrees):
                if base + alg_grading[i] + e != total:
                    bad.append((q, m, z))
                    break
    return sorted(set(bad))


def divisor_equation_defects(ext: ExtendedStackyFan, alg: ChenRuanAlgebra, policy: TruncationPolicy,
                             t_coeffs: Sequence[Fraction], x_coeffs: Sequence[Fraction]) -> List[str]:
    """Check ``z ∇ S_λ = (E + (ε·λ) z) S_λ`` summand by summand."""
    n, p = ext.n, ext.p
    e_mat = alg.linear_combination([Fraction(x) for x in t_coeffs])
    tw = [Fraction(policy.t_weights[i]) if policy.t_weights else ZERO for i in range(n)]
    step = max((tw[i] for i, c in enumerate(t_coeffs) if c), default=ZERO)

    def exact(key) -> bool:
        # derivatives in t lose the top truncation layer of both bounds
        if policy.t_order is not None and sp.order(key[1]) >= policy.t_order:
            return False
        return sp.grade(key[0], key[1]) + step <= sp.cutoff

    bad = []
    for lam, s in i_function_summands(ext, alg, policy):
        sp = s.space
        lhs = Series(sp)
        for i, c in enumerate(t_coeffs):
            if c:
                lhs = lhs + s.diff(f"t{i + 1}").scale(Fraction(c))
        for j, c in enumerate(x_coeffs):
            if c:
                lhs = lhs + s.euler(f"x{j}").scale(Fraction(c))
        lhs = lhs.shift_z(1)
        d = lam.d(p)
        dd = [sum((ext.curve_basis[a][i] * d[a] for a in range(p)), ZERO) for i in range(n)]
        el = sum((Fraction(c) * x for c, x in zip(t_coeffs, dd)), ZERO) + \
            sum((Fraction(c) * k for c, k in zip(x_coeffs, lam.k(p))), ZERO)
        rhs = s.apply(e_mat) + s.shift_z(1).scale(el)
        diff = (lhs - rhs).filter(lambda k: exact(k) and
                                  (policy.z_min is None or k[2] > policy.z_min + 1))
        if not diff.is_zero():
            bad.append(",".join(str(x) for x in lam.dk))
    return bad
