"""Removing positive powers of ``z`` from a cone point with z-times-tangent corrections."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import DomainError, Obstruction
from .poly import Coeff, Poly
from .series import Key, Series, SeriesSpace

ZERO = Fraction(0)


@dataclass
class BirkhoffResult:
    J: Series
    tau: Series
    corrections: Dict[str, Series]     # scalar series; the combination uses C_i z ∂_i I
    steps: int
    space: SeriesSpace                 # range of keys on which J is exact

    def correction_terms(self) -> Dict[str, Series]:
        """``C_i z`` as stored series (the form in which corrections are usually quoted)."""
        return {v: c.shift_z(1) for v, c in self.corrections.items()}


def _times_monomial(s: Series, q, mono, zshift: int, c: Coeff) -> Series:
    out = {}
    for (q2, m2, z2), v in s.terms.items():
        key = (tuple(a + b for a, b in zip(q, q2)), tuple(a + b for a, b in zip(mono, m2)), z2 + zshift)
        out[key] = [c * x if x else ZERO for x in v]
    return Series(s.space, out)


def _coefficient_parts(w: Sequence[Coeff]) -> List[Tuple[Optional[Tuple[int, ...]], List[Fraction]]]:
    """Split a vector with polynomial entries into rational vectors per coefficient monomial."""
    gens = next((x.gens for x in w if isinstance(x, Poly)), None)
    if gens is None:
        return [(None, [Fraction(x) for x in w])]
    parts: Dict[Tuple[int, ...], List[Fraction]] = {}
    for i, x in enumerate(w):
        items = x.terms.items() if isinstance(x, Poly) else ([((0,) * len(gens), Fraction(x))] if x else [])
        for m, c in items:
            parts.setdefault(m, [ZERO] * len(w))[i] = c
    return [(m, v) for m, v in sorted(parts.items())]


def _pick(R: Series, unit: int) -> Optional[Key]:
    sp = R.space
    zq, zm = sp.zero_q(), sp.zero_mono()
    best = None
    for key, v in R.terms.items():
        q, m, z = key
        if z < 1:
            continue
        if z == 1 and q == zq and m == zm and not any(x for i, x in enumerate(v) if i != unit):
            continue
        rank = (-z, sp.grade(q, m), q, m)
        if best is None or rank < best[0]:
            best = (rank, key)
    return None if best is None else best[1]


def eliminate_positive_z(I: Series, directions: Sequence[str], unit: int = 0,
                         order_variable: Optional[str] = None, order: Optional[int] = None,
                         max_steps: int = 10000) -> BirkhoffResult:
    """Return ``R = I + Σ C_i z ∂_i I`` of shape ``z·1 + τ + O(1/z)``.

    Terms are removed highest z-power first, then by grading, then by key.
    The reported space shrinks the cutoff and the variable-order bound by the
    amount lost when a derivative of the truncated input was used.
    """
    sp = I.space
    keep = None
    if order_variable is not None:
        j = sp.var_index(order_variable)
        keep = lambda k: k[1][j] <= order  # noqa: E731
        I = I.filter(keep)
    if not directions:
        raise DomainError("the derivative family is empty")
    derivs = [I.diff(v) for v in directions]
    zq, zm = sp.zero_q(), sp.zero_mono()
    for v, d in zip(directions, derivs):
        if any(k[2] > 0 and k[0] == zq and k[1] == zm for k in d.terms):
            raise Obstruction(f"the derivative along {v} has positive z-powers at order zero")
    cols = [d.get(zq, zm, 0) for d in derivs]
    for col in cols:
        if any(isinstance(x, Poly) for x in col):
            raise Obstruction("leading derivative terms must be rational for the elimination")
    mat = [[Fraction(cols[i][r]) for i in range(len(directions))] for r in range(sp.dim)]
    weights = [sp.var_weights[sp.var_index(v)] for v in directions]
    orders = [sp.var_orders[sp.var_index(v)] for v in directions]

    corr = {v: {} for v in directions}
    lost_grade, lost_order = ZERO, 0
    R = I
    steps = 0
    while True:
        key = _pick(R, unit)
        if key is None:
            break
        steps += 1
        if steps > max_steps:
            raise Obstruction("positive z-powers did not disappear within the step limit")
        q, m, z = key
        w = R.terms[key]
        if z == 1 and q == zq and m == zm:
            w = [x if i != unit else ZERO for i, x in enumerate(w)]
        for mono, part in _coefficient_parts(w):
            c = linalg.solve(mat, part)
            if c is None:
                raise Obstruction(f"term z^{z} at {[str(x) for x in q]}, {list(m)} is outside the "
                                  f"span of the derivative family")
            cf: Coeff = Fraction(1)
            if mono is not None:
                gens = next(x.gens for x in w if isinstance(x, Poly))
                cf = Poly.reduce(Poly(gens, {mono: 1}))
            for i, v in enumerate(directions):
                if not c[i]:
                    continue
                coef = c[i] * cf
                step = _times_monomial(derivs[i], q, m, z, coef)
                R = R - (step if keep is None else step.filter(keep))
                ck = (q, m, z - 1)
                acc = corr[v].get(ck)
                corr[v][ck] = [-coef if acc is None else acc[0] - coef]
                lost_grade = min(lost_grade, sp.grade(q, m) - weights[i])
                lost_order = min(lost_order, sp.order(m) - orders[i])

    scal = sp.scalar()
    corrections = {v: Series(scal, {k: vv for k, vv in d.items()}) for v, d in corr.items()}
    exact = replace(sp, cutoff=sp.cutoff + lost_grade,
                    max_order=None if sp.max_order is None else sp.max_order + lost_order)
    J = R.retruncate(exact)
    tau = J.coeff_z(0)
    return BirkhoffResult(J, tau, corrections, steps, exact)
