"""Sparse Laurent polynomials with exact rational coefficients.

Coefficient-ring elements throughout the package are either plain
:class:`fractions.Fraction` values or :class:`Poly` instances; arithmetic
between the two is transparent, and a :class:`Poly` whose only term is
constant collapses back to a ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


class Poly:
    """Element of ``Q[g_1^{±1}, ..., g_k^{±1}]`` over a fixed generator tuple."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: Sequence[str], terms: Mapping[Monomial, Scalar]):
        self.gens = tuple(gens)
        self.terms: Dict[Monomial, Fraction] = {
            m: Fraction(c) for m, c in terms.items() if c != 0
        }

    @classmethod
    def gen(cls, gens: Sequence[str], name: str) -> "Poly":
        gens = tuple(gens)
        mono = tuple(1 if g == name else 0 for g in gens)
        return cls(gens, {mono: 1})

    @staticmethod
    def reduce(value: "Coeff") -> "Coeff":
        """Collapse constant polynomials to ``Fraction``."""
        if isinstance(value, Poly):
            if not value.terms:
                return Fraction(0)
            if len(value.terms) == 1:
                (mono, c), = value.terms.items()
                if not any(mono):
                    return c
        return value

    def _lift(self, other: "Coeff") -> "Poly":
        if isinstance(other, Poly):
            if other.gens != self.gens:
                raise ValueError(f"generator mismatch: {self.gens} vs {other.gens}")
            return other
        return Poly(self.gens, {(0,) * len(self.gens): other})

    def __add__(self, other):
        if not isinstance(other, (Poly, int, Fraction)):
            return NotImplemented
        o = self._lift(other)
        out = dict(self.terms)
        for m, c in o.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly.reduce(Poly(self.gens, out))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.gens, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (Poly, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Fraction(0)
            return Poly.reduce(Poly(self.gens, {m: c * other for m, c in self.terms.items()}))
        if not isinstance(other, Poly):
            return NotImplemented
        o = self._lift(other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly.reduce(Poly(self.gens, out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.gens == other.gens and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            r = Poly.reduce(self)
            return not isinstance(r, Poly) and r == other
        return NotImplemented

    def __hash__(self):
        return hash((self.gens, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def degree_in(self, name: str) -> Tuple[int, int]:
        """(min, max) exponent of ``name`` over all terms."""
        i = self.gens.index(name)
        exps = [m[i] for m in self.terms]
        return min(exps), max(exps)

    def __repr__(self):
        return f"Poly({self.gens}, {self.terms})"

    def __str__(self):
        return format_coeff(self)


Coeff = Union[Fraction, Poly]


def is_zero(c: Coeff) -> bool:
    return not c


def substitute(c: Coeff, values: Mapping[str, Coeff], gens_out: Sequence[str] | None = None) -> Coeff:
    """Substitute generators by coefficients (negative powers need invertible images).

    Generators not in ``values`` are kept; ``gens_out`` fixes the generator
    tuple of the result when kept generators remain.
    """
    if not isinstance(c, Poly):
        return c
    gens_out = tuple(gens_out) if gens_out is not None else c.gens
    total: Coeff = Fraction(0)
    cache: Dict[Tuple[str, int], Coeff] = {}
    for mono, coef in c.terms.items():
        term: Coeff = coef
        kept = [0] * len(gens_out)
        for g, e in zip(c.gens, mono):
            if e == 0:
                continue
            if g in values:
                key = (g, e)
                if key not in cache:
                    cache[key] = _power(values[g], e)
                term = term * cache[key]
            else:
                kept[gens_out.index(g)] = e
        if any(kept):
            term = term * Poly(gens_out, {tuple(kept): 1})
        total = total + term
    return total


def _power(c: Coeff, e: int) -> Coeff:
    if e < 0:
        if isinstance(c, Poly):
            if len(c.terms) != 1:
                raise ZeroDivisionError("negative power of a non-monomial")
            (mono, coef), = c.terms.items()
            return Poly(c.gens, {tuple(a * e for a in mono): Fraction(1) / coef ** (-e)})
        return Fraction(1) / Fraction(c) ** (-e)
    out: Coeff = Fraction(1)
    for _ in range(e):
        out = out * c
    return out


def coeff_items(c: Coeff, gens: Sequence[str]) -> Iterable[Tuple[Monomial, Fraction]]:
    if isinstance(c, Poly):
        return sorted(c.terms.items())
    if c == 0:
        return []
    return [((0,) * len(gens), Fraction(c))]


def format_coeff(c: Coeff) -> str:
    if not isinstance(c, Poly):
        return str(Fraction(c))
    parts = []
    for mono, coef in sorted(c.terms.items(), reverse=True):
        factors = []
        for g, e in zip(c.gens, mono):
            if e == 1:
                factors.append(g)
            elif e:
                factors.append(f"{g}^{e}")
        if not factors:
            parts.append(str(coef))
        elif coef == 1:
            parts.append("*".join(factors))
        elif coef == -1:
            parts.append("-" + "*".join(factors))
        else:
            parts.append(f"{coef}*" + "*".join(factors))
    return " + ".join(parts).replace("+ -", "- ") or "0"


def extend_gens(c: Coeff, gens: Sequence[str]) -> Coeff:
    """Re-express ``c`` over a larger generator tuple containing its own."""
    if not isinstance(c, Poly):
        return c
    gens = tuple(gens)
    if c.gens == gens:
        return c
    idx = [gens.index(g) for g in c.gens]
    out = {}
    for mono, coef in c.terms.items():
        m = [0] * len(gens)
        for i, e in zip(idx, mono):
            m[i] = e
        out[tuple(m)] = coef
    return Poly(gens, out)


def total_degree(c: Coeff, weights: Mapping[str, Fraction] | None = None) -> set:
    """Set of (weighted) degrees of the monomials of ``c``."""
    if not isinstance(c, Poly):
        return {Fraction(0)} if c else set()
    w = [Fraction(weights.get(g, 1)) if weights else Fraction(1) for g in c.gens]
    return {sum((a * b for a, b in zip(w, m)), Fraction(0)) for m in c.terms}


def parse_coeff(value, gens: Sequence[str]) -> Coeff:
    """Read a coefficient given as a number, a ``"p/q"`` string or an expression in ``gens``."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError("floating-point coefficients are not accepted; use 'p/q'")
    text = str(value).strip()
    try:
        return Fraction(text)
    except ValueError:
        pass
    import sympy

    syms = sympy.symbols(list(gens)) if gens else []
    if not isinstance(syms, (list, tuple)):
        syms = [syms]
    expr = sympy.sympify(text, locals={str(s): s for s in syms}, rational=True)
    extra = expr.free_symbols - set(syms)
    if extra:
        raise ValueError(f"unknown symbols {sorted(map(str, extra))} in {text!r}")
    return from_sympy(expr, gens)


def from_sympy(expr, gens: Sequence[str]) -> Coeff:
    import sympy

    gens = tuple(gens)
    if not gens:
        return Fraction(str(sympy.nsimplify(expr)))
    syms = sympy.symbols(list(gens))
    if not isinstance(syms, (list, tuple)):
        syms = [syms]
    num, den = sympy.fraction(sympy.together(sympy.expand(expr)))
    den_poly = sympy.Poly(den, *syms)
    if len(den_poly.terms()) != 1:
        raise ValueError(f"{expr} is not a Laurent polynomial")
    (dmono, dcoef), = den_poly.terms()
    out = {}
    for mono, c in sympy.Poly(num, *syms).terms():
        key = tuple(a - b for a, b in zip(mono, dmono))
        out[key] = Fraction(int(sympy.numer(c)), int(sympy.denom(c))) / Fraction(int(sympy.numer(dcoef)), int(sympy.denom(dcoef)))
    return Poly.reduce(Poly(gens, out))


def to_sympy(c: Coeff, symbols: Mapping[str, object] | None = None):
    import sympy

    if not isinstance(c, Poly):
        return sympy.Rational(c.numerator, c.denominator)
    syms = [symbols[g] if symbols else sympy.Symbol(g) for g in c.gens]
    total = sympy.Integer(0)
    for mono, coef in c.terms.items():
        term = sympy.Rational(coef.numerator, coef.denominator)
        for s, e in zip(syms, mono):
            term *= s ** e
        total += term
    return total
