"""Twisted I-functions, Euler-class specialisation and complete intersections."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from . import linalg
from .cohomology import ChenRuanAlgebra, CMatrix, cmat_add, cmat_vec
from .errors import (CoarsenessViolation, ConstructionError, ConvexityViolation, DomainError,
                     NonConvexLimit)
from .poly import Coeff, Poly, extend_gens, substitute
from .series import (LVec, Series, TruncationPolicy, i_function, lv_times_linear,
                     lv_times_reciprocal, vadd_into, vscale, vzero)
from .stackyfan import ExtendedDegree, ExtendedStackyFan, frac

ZERO, ONE = Fraction(0), Fraction(1)


def bernoulli_poly(m: int, y: Fraction) -> Fraction:
    v = sympy.bernoulli(m, sympy.Rational(y.numerator, y.denominator))
    return Fraction(int(v.p), int(v.q))


def s_gens(order: int) -> Tuple[str, ...]:
    return tuple(f"s{k}" for k in range(order + 1))


def g_series(y, order: int) -> Poly:
    """``G_y(x, z)`` truncated to ``s_k`` with ``k <= order``, over ``(x, z, s0..s_order)``."""
    y = Fraction(y)
    gens = ("x", "z") + s_gens(order)
    terms: Dict[Tuple[int, ...], Fraction] = {}
    for k in range(order + 1):
        # s_k with m + l - 1 = k
        for m in range(k + 2):
            l = k + 1 - m
            c = bernoulli_poly(m, y) / math.factorial(m) / math.factorial(l)
            if not c:
                continue
            mono = [0] * len(gens)
            mono[0], mono[1], mono[2 + k] = l, m - 1, 1
            terms[tuple(mono)] = terms.get(tuple(mono), ZERO) + c
    return Poly(gens, terms)


def s_function(arg: Poly, order: int, gens: Sequence[str]) -> Coeff:
    """``s(arg) = Σ s_k arg^k / k!`` with ``arg`` a Poly over ``gens``."""
    out: Coeff = ZERO
    power: Coeff = ONE
    for k in range(order + 1):
        out = out + Poly.gen(gens, f"s{k}") * power * Fraction(1, math.factorial(k))
        power = power * arg
    return out


# --------------------------------------------------------------------------
# twist data


@dataclass
class TwistSpec:
    """``epsilons`` are functionals on the (d, k) coordinates of the degree lattice."""

    epsilons: List[List[Fraction]]
    mode: str = "euler"            # "euler" or "generic"
    s_order: int = 4

    @property
    def r(self) -> int:
        return len(self.epsilons)

    def gens(self) -> Tuple[str, ...]:
        if self.mode == "euler":
            return ("kappa",)
        return ("q0",) + tuple(f"s{k}" for k in range(1, self.s_order + 1))

    @classmethod
    def from_divisors(cls, ext: ExtendedStackyFan, divisors: Sequence[Sequence], **kw) -> "TwistSpec":
        """Build from divisor-coordinate vectors ``Σ c_i D_i`` (length n or n+m)."""
        mat = ext.inclusion_matrix()
        eps = []
        for dv in divisors:
            dv = [Fraction(x) for x in dv] + [ZERO] * (ext.n + ext.m - len(dv))
            eps.append([sum((mat[i][c] * dv[i] for i in range(ext.n + ext.m)), ZERO)
                        for c in range(ext.p + ext.m)])
        return cls(eps, **kw)


def pairing(eps: Sequence[Fraction], lam: ExtendedDegree) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(eps, lam.dk)), ZERO)


def e_classes(ext: ExtendedStackyFan, spec: TwistSpec) -> List[List[Fraction]]:
    """Coefficients ``e_i`` with ``E_j = Σ e_i u_i``: any solution of ``B e = ε_d``."""
    out = []
    for eps in spec.epsilons:
        if not ext.p:
            out.append([ZERO] * ext.n)
            continue
        sol = linalg.solve(ext.curve_basis, [Fraction(x) for x in eps[:ext.p]])
        if sol is None:
            raise DomainError("twist class is not in the span of the divisor classes")
        out.append(sol)
    return out


def normalize_epsilons(ext: ExtendedStackyFan, spec: TwistSpec) -> TwistSpec:
    """Shift each ε_j by an integer vector of ``(Z^m)^*`` so it kills the splitting vectors."""
    new = []
    for j, eps in enumerate(spec.epsilons):
        eps = [Fraction(x) for x in eps]
        ks = eps[ext.p:]
        bad = [x for x in ks if x.denominator != 1]
        if bad:
            raise CoarsenessViolation(f"twist {j + 1} pairs non-integrally with a splitting vector")
        new.append(eps[:ext.p] + [ZERO] * ext.m)
    return replace(spec, epsilons=new)


def fractional_eigenvalues(ext: ExtendedStackyFan, spec: TwistSpec, radius: int = 3) -> Dict[str, List[Fraction]]:
    """``f(b, j) = <-ε_j·λ>`` for each box element, checked on two representatives."""
    reps: Dict[int, List[ExtendedDegree]] = {}
    r = 1
    while True:
        for lam in ext.lattice_points_near_zero(r):
            lst = reps.setdefault(lam.box_index, [])
            if len(lst) < 2 and lam.dk not in [x.dk for x in lst]:
                lst.append(lam)
        if all(len(reps.get(i, [])) >= 2 for i in range(len(ext.box_elements))) or r >= radius:
            break
        r += 1
    out = {}
    for i, b in enumerate(ext.box_elements):
        lams = reps.get(i, [])
        if not lams:
            raise DomainError(f"no degree reduces to box element {b.label} within the search radius")
        vals = []
        for eps in spec.epsilons:
            got = {frac(-pairing(eps, lam)) for lam in lams}
            if len(got) != 1:
                raise ConstructionError(f"f({b.label}) depends on the representative")
            vals.append(got.pop())
        out[b.label] = vals
    return out


@dataclass
class ConvexityReport:
    positive: bool
    coarse: bool
    violations: List[str] = field(default_factory=list)

    @property
    def convex(self) -> bool:
        return self.positive and self.coarse

    def to_json(self) -> dict:
        return {"convex": self.convex, "positive": self.positive, "coarse": self.coarse,
                "violations": self.violations}


def convexity_check(ext: ExtendedStackyFan, spec: TwistSpec) -> ConvexityReport:
    viol = []
    positive = True
    for j, eps in enumerate(spec.epsilons):
        for g in ext.mori_cone():
            v = sum((Fraction(a) * b for a, b in zip(eps[:ext.p], g)), ZERO)
            if v < 0:
                positive = False
                viol.append(f"twist {j + 1} is negative on the Mori generator {[str(x) for x in g]}")
    coarse = True
    for j, eps in enumerate(spec.epsilons):
        if any(Fraction(x).denominator != 1 for x in eps[ext.p:]):
            coarse = False
            viol.append(f"twist {j + 1} pairs non-integrally with a splitting vector")
    if coarse:
        for label, vals in fractional_eigenvalues(ext, spec).items():
            for j, f in enumerate(vals):
                if f:
                    coarse = False
                    viol.append(f"twist {j + 1} has eigenvalue {f} on sector {label}")
    return ConvexityReport(positive, coarse, viol)


# --------------------------------------------------------------------------
# modification factors


def _s_weight(mono: Sequence[int], gens: Sequence[str]) -> int:
    w = 0
    for g, e in zip(gens, mono):
        if g.startswith("s") and g[1:].isdigit():
            w += int(g[1:]) * e
    return w


def _truncate_s(c: Coeff, order: int) -> Coeff:
    if not isinstance(c, Poly):
        return c
    return Poly.reduce(Poly(c.gens, {m: x for m, x in c.terms.items() if _s_weight(m, c.gens) <= order}))


def _lv_truncate(lv: LVec, order: int) -> LVec:
    out = {p: [_truncate_s(x, order) for x in v] for p, v in lv.items()}
    return {p: v for p, v in out.items() if any(v)}


def _a_values(c: Fraction) -> Tuple[List[Fraction], int]:
    """The a's left after cancellation and the sign of their exponent."""
    f = frac(c)
    if c > 0:
        a = f if f else ONE
        vals = []
        while a <= c:
            vals.append(a)
            a += 1
        return vals, 1
    vals = []
    a = f - 1 if f else ZERO
    while a > c:
        vals.append(a)
        a -= 1
    return vals, -1


def modification_hook(ext: ExtendedStackyFan, alg: ChenRuanAlgebra, spec: TwistSpec, gens: Sequence[str],
                      z_min: Optional[int] = None):
    """Summand hook multiplying by ``M_{λ,b}(z)`` (applied before reciprocal factors)."""
    ecoef = e_classes(ext, spec)
    mats = []
    for e in ecoef:
        m = alg.linear_combination(e)
        mats.append([[extend_gens(x, gens) for x in row] for row in m])
    dim = alg.dim

    if spec.mode == "euler":
        kappa = Poly.gen(gens, "kappa")

        def hook(lam: ExtendedDegree, lv: LVec) -> LVec:
            for eps, em in zip(spec.epsilons, mats):
                c = pairing(eps, lam)
                if c.denominator != 1:
                    raise ConvexityViolation(f"ε·λ = {c} is not integral")
                shifted = cmat_add(em, [[kappa if i == j else ZERO for j in range(dim)]
                                        for i in range(dim)])
                if c >= 0:
                    for a in range(1, int(c) + 1):
                        lv = lv_times_linear(lv, shifted, Fraction(a))
                else:
                    for a in range(int(c) + 1, 1):
                        if a == 0:
                            lv = _times_inverse_at_zero(lv, em, kappa, dim)
                        else:
                            lv = lv_times_reciprocal(lv, shifted, Fraction(a), z_min, dim)
            return lv
        return hook

    if spec.mode != "generic":
        raise DomainError(f"unknown twist mode {spec.mode!r}")
    order = spec.s_order
    svars = {k: Poly.gen(gens, f"s{k}") for k in range(1, order + 1)}

    def hook(lam: ExtendedDegree, lv: LVec) -> LVec:
        for eps, em in zip(spec.epsilons, mats):
            c = pairing(eps, lam)
            avals, sign = _a_values(c)
            if not avals:
                continue
            q0_pow = Poly(gens, {tuple(sign * len(avals) if g == "q0" else 0 for g in gens): 1})
            lv = {p: vscale(q0_pow, v) for p, v in lv.items()}

            def x_apply(src: LVec) -> LVec:
                total: LVec = {}
                for k in range(1, order + 1):
                    for a in avals:
                        cur = src
                        for _ in range(k):
                            cur = lv_times_linear(cur, em, a)
                        coef = svars[k] * Fraction(sign, math.factorial(k))
                        for p, v in cur.items():
                            acc = total.setdefault(p, vzero(dim))
                            vadd_into(acc, v, coef)
                return _lv_truncate({p: v for p, v in total.items() if any(v)}, order)

            result = {p: list(v) for p, v in lv.items()}
            term = lv
            n = 1
            while True:
                term = x_apply(term)
                term = {p: vscale(Fraction(1, n), v) for p, v in term.items()}
                if not term:
                    break
                for p, v in term.items():
                    acc = result.setdefault(p, vzero(dim))
                    vadd_into(acc, v)
                n += 1
            lv = {p: v for p, v in result.items() if any(v)}
        return lv
    return hook


def _times_inverse_at_zero(lv: LVec, em: CMatrix, kappa: Poly, dim: int) -> LVec:
    """Multiply by ``(κ + E)^{-1} = Σ_k (-1)^k κ^{-k-1} E^k`` (E nilpotent)."""
    inv_k = Poly(kappa.gens, {tuple(-1 if g == "kappa" else 0 for g in kappa.gens): 1})
    out: LVec = {}
    for p, v in lv.items():
        w = v
        coef: Coeff = inv_k
        k = 0
        while any(w):
            if k > dim:
                raise NonConvexLimit("twist class does not act nilpotently")
            acc = out.setdefault(p, vzero(dim))
            vadd_into(acc, w, coef)
            w = cmat_vec(em, w)
            coef = -coef * inv_k
            k += 1
    return {p: v for p, v in out.items() if any(v)}


def modification_factor(ext: ExtendedStackyFan, alg: ChenRuanAlgebra, spec: TwistSpec,
                        lam: ExtendedDegree, sector: Optional[str] = None) -> LVec:
    """``M_{λ,b}(z)`` applied to the unit of the sector of ``λ`` (or of ``sector``)."""
    gens = tuple(alg.coeff.gens) + spec.gens()
    b = ext.box_elements[lam.box_index].label if sector is None else sector
    y = [extend_gens(x, gens) for x in alg.unit(alg.sector_index(b)).vector]
    return modification_hook(ext, alg, spec, gens)(lam, {0: y})


def twisted_i_function(ext: ExtendedStackyFan, alg: ChenRuanAlgebra, spec: TwistSpec,
                       policy: TruncationPolicy) -> Series:
    if spec.r == 0:
        return i_function(ext, alg, policy)
    gens = tuple(alg.coeff.gens) + spec.gens()
    hook = modification_hook(ext, alg, spec, gens, policy.z_min)
    return i_function(ext, alg, policy, hook=hook, gens=gens)


def euler_specialization(c: Coeff, order: int) -> Coeff:
    """``q0 -> κ``, ``s_k -> (-1)^{k-1}(k-1)! κ^{-k}``, then drop negative κ powers."""
    if not isinstance(c, Poly):
        return c
    keep = [g for g in c.gens if g != "q0" and not (g.startswith("s") and g[1:].isdigit())]
    out_gens = tuple(keep) + (("kappa",) if "kappa" not in keep else ())
    kappa = Poly.gen(out_gens, "kappa")
    values = {"q0": kappa}
    for g in c.gens:
        if g.startswith("s") and g[1:].isdigit() and g != "s0":
            k = int(g[1:])
            values[g] = Poly(out_gens, {tuple(-k if x == "kappa" else 0 for x in out_gens):
                                        Fraction((-1) ** (k - 1) * math.factorial(k - 1))})
    res = substitute(c, values, out_gens)
    if isinstance(res, Poly):
        i = out_gens.index("kappa")
        res = Poly.reduce(Poly(out_gens, {m: x for m, x in res.terms.items() if m[i] >= 0}))
    return res


def kappa_limit(c: Coeff) -> Coeff:
    """Coefficient of ``κ^0``; negative κ powers are an error."""
    if not isinstance(c, Poly) or "kappa" not in c.gens:
        return c
    i = c.gens.index("kappa")
    gens = c.gens[:i] + c.gens[i + 1:]
    out = {}
    for m, x in c.terms.items():
        if m[i] < 0:
            raise NonConvexLimit("a negative power of κ survives cancellation")
        if m[i] == 0:
            out[m[:i] + m[i + 1:]] = x
    if not gens:
        return out.get((), ZERO)
    return Poly.reduce(Poly(gens, out))


def ci_i_function(ext: ExtendedStackyFan, spec: TwistSpec, target: ChenRuanAlgebra,
                  policy: TruncationPolicy) -> Series:
    """``lim_{κ→0} i^* I_twisted`` computed directly in the target algebra.

    ``target`` must carry the images of ``u_1..u_n`` as its divisor matrices
    and name its sectors after the box elements they come from.
    """
    if spec.mode != "euler":
        raise DomainError("complete-intersection I-functions need the euler twist")
    report = convexity_check(ext, spec)
    if not report.convex:
        raise ConvexityViolation("; ".join(report.violations))
    spec = normalize_epsilons(ext, spec)
    I = twisted_i_function(ext, target, spec, policy)
    space = I.space.with_gens(tuple(g for g in I.space.gens if g != "kappa"))
    return I.map_coeffs(kappa_limit, space)


def quantum_period(J: Series, unit_index: int = 0) -> Dict[Tuple[Fraction, ...], Coeff]:
    """Unit component at vanishing variables, evaluated at ``z = 1``, per Novikov exponent."""
    out: Dict[Tuple[Fraction, ...], Coeff] = {}
    for (q, m, z), v in J.terms.items():
        if any(m) or not v[unit_index]:
            continue
        out[q] = out.get(q, ZERO) + v[unit_index]
    return {q: c for q, c in sorted(out.items()) if c}
