"""Reading input documents and writing exact JSON output."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from .cohomology import ChenRuanAlgebra, algebra_from_structure_constants, chen_ruan_from_fan
from .errors import EngineError, ParseError
from .series import Series, SeriesSpace, TruncationPolicy, series_from_json
from .stackyfan import ExtendedStackyFan, Lattice, StackyFan, extend
from .twist import TwistSpec


def _frac(value, path: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError("expected an integer or a 'p/q' string", path=path)
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"cannot read {value!r} as a rational number", path=path) from None


def _fracs(values, path: str) -> List[Fraction]:
    if not isinstance(values, list):
        raise ParseError("expected a list", path=path)
    return [_frac(v, f"{path}[{i}]") for i, v in enumerate(values)]


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("expected an integer", path=path)
    return value


def _get(doc: Mapping, key: str, path: str, default=...):
    if key in doc:
        return doc[key]
    if default is ...:
        raise ParseError(f"missing key {key!r}", path=path or "<root>")
    return default


def load_json(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg}", exc.lineno, exc.colno) from None


def _reject_float(text: str):
    raise ParseError(f"floating-point literal {text} is not allowed; use a 'p/q' string")


def _element(lattice: Lattice, item, path: str):
    if isinstance(item, Mapping):
        coords = _fracs(_get(item, "coords", path), f"{path}.coords")
        tors = [_int(t, f"{path}.torsion[{i}]") for i, t in enumerate(item.get("torsion", []))]
    else:
        coords, tors = _fracs(item, path), []
    try:
        return lattice.element(coords, tors)
    except EngineError as exc:
        raise type(exc)(f"{exc} (at {path})") from None


@dataclass
class Problem:
    """A parsed input document; derived objects are built on first use."""

    doc: Dict[str, Any]
    name: str = ""
    overrides: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str, source: str = "<input>", **overrides) -> "Problem":
        doc = load_json(text, source)
        if not isinstance(doc, dict):
            raise ParseError("top level must be an object", 1, 1)
        return cls(doc, str(doc.get("name", source)), overrides)

    @classmethod
    def from_file(cls, path, **overrides) -> "Problem":
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {p}: {exc.strerror}") from None
        return cls.from_text(text, str(p), **overrides)

    # geometry -----------------------------------------------------------
    @cached_property
    def lattice(self) -> Lattice:
        lat = _get(self.doc, "lattice", "")
        dim = _int(_get(lat, "dim", "lattice"), "lattice.dim")
        extra = [_fracs(g, f"lattice.extra_generators[{i}]")
                 for i, g in enumerate(lat.get("extra_generators", []))]
        tors = [_int(t, f"lattice.torsion[{i}]") for i, t in enumerate(lat.get("torsion", []))]
        return Lattice.build(dim, extra, tors)

    @cached_property
    def fan_unchecked(self) -> StackyFan:
        rays = [_element(self.lattice, r, f"rays[{i}]") for i, r in enumerate(_get(self.doc, "rays", ""))]
        cones = []
        for i, c in enumerate(_get(self.doc, "cones", "")):
            idx = [_int(x, f"cones[{i}][{j}]") for j, x in enumerate(c)]
            if any(x < 1 or x > len(rays) for x in idx):
                raise ParseError("cone indices are 1-based ray numbers", path=f"cones[{i}]")
            cones.append([x - 1 for x in idx])
        names = {str(k): str(v) for k, v in self.doc.get("sector_names", {}).items()}
        return StackyFan.from_maximal(self.lattice, rays, cones, names)

    @cached_property
    def fan(self) -> StackyFan:
        return self.fan_unchecked.check()

    @cached_property
    def ext(self) -> ExtendedStackyFan:
        s = [_element(self.lattice, e, f"extension[{i}]") for i, e in enumerate(self.doc.get("extension", []))]
        cb = self.doc.get("curve_basis")
        cb = None if cb is None else [_fracs(b, f"curve_basis[{i}]") for i, b in enumerate(cb)]
        mg = self.doc.get("mori_generators")
        mg = None if mg is None else [_fracs(g, f"mori_generators[{i}]") for i, g in enumerate(mg)]
        return extend(self.fan, s, cb, mg)

    # algebra ------------------------------------------------------------
    @cached_property
    def algebra(self) -> ChenRuanAlgebra:
        spec = self.doc.get("algebra", {"mode": "nonequivariant"})
        return _algebra(spec, self.fan, "algebra")

    @cached_property
    def target(self) -> ChenRuanAlgebra:
        spec = _get(self.doc, "target", "")
        return _algebra(dict(spec, mode="manual"), self.fan, "target")

    # truncation ---------------------------------------------------------
    @cached_property
    def policy(self) -> TruncationPolicy:
        tr = dict(self.doc.get("truncation", {}))
        ext = self.ext
        grading = tr.get("grading")
        grading = ext.default_grading() if grading is None else _fracs(grading, "truncation.grading")
        if len(grading) != ext.p + ext.m:
            raise ParseError(f"grading needs {ext.p + ext.m} entries", path="truncation.grading")
        cutoff = self.overrides.get("cutoff")
        cutoff = _frac(tr.get("cutoff", 6), "truncation.cutoff") if cutoff is None else Fraction(cutoff)
        t_order = self.overrides.get("t_order")
        if t_order is None:
            t_order = tr.get("t_order", 0)
            t_order = None if t_order is None else _int(t_order, "truncation.t_order")
        tw = tr.get("t_weights")
        tw = None if tw is None else tuple(_fracs(tw, "truncation.t_weights"))
        t_active = _names(tr.get("t_active"), "t", 1, ext.n, "truncation.t_active")
        x_active = _names(tr.get("x_active"), "x", 0, ext.m, "truncation.x_active")
        z_min = tr.get("z_min")
        z_min = None if z_min is None else _int(z_min, "truncation.z_min")
        return TruncationPolicy(tuple(grading), cutoff, t_order, tw, t_active, x_active, z_min)

    # twist --------------------------------------------------------------
    @cached_property
    def twist(self) -> TwistSpec:
        tw = _get(self.doc, "twist", "")
        mode = str(tw.get("mode", "euler"))
        s_order = _int(tw.get("s_order", 4), "twist.s_order")
        if "divisors" in tw:
            divs = [_fracs(d, f"twist.divisors[{i}]") for i, d in enumerate(tw["divisors"])]
            return TwistSpec.from_divisors(self.ext, divs, mode=mode, s_order=s_order)
        eps = [_fracs(e, f"twist.epsilons[{i}]") for i, e in enumerate(_get(tw, "epsilons", "twist"))]
        for i, e in enumerate(eps):
            if len(e) != self.ext.p + self.ext.m:
                raise ParseError(f"twist class needs {self.ext.p + self.ext.m} entries", path=f"twist.epsilons[{i}]")
        return TwistSpec(eps, mode=mode, s_order=s_order)

    def section(self, key: str) -> Dict[str, Any]:
        return dict(_get(self.doc, key, ""))


def _names(values, prefix: str, start: int, count: int, path: str) -> Optional[tuple]:
    if values is None:
        return None
    out = []
    for i, v in enumerate(values):
        v = str(v)
        if not v.startswith(prefix) or not v[len(prefix):].isdigit():
            raise ParseError(f"expected a variable name like {prefix}{start}", path=f"{path}[{i}]")
        k = int(v[len(prefix):]) - start
        if not 0 <= k < count:
            raise ParseError(f"no variable {v}", path=f"{path}[{i}]")
        out.append(k)
    return tuple(out)


def _algebra(spec: Mapping, fan: StackyFan, path: str) -> ChenRuanAlgebra:
    mode = str(spec.get("mode", "nonequivariant"))
    if mode in ("nonequivariant", "equivariant"):
        return chen_ruan_from_fan(fan, mode)
    if mode != "manual":
        raise ParseError(f"unknown algebra mode {mode!r}", path=f"{path}.mode")
    try:
        return algebra_from_structure_constants(spec)
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"malformed algebra description: {exc}", path=path) from None


# --------------------------------------------------------------------------
# output


def space_to_json(sp: SeriesSpace) -> dict:
    return {
        "q_names": list(sp.q_names), "q_weights": [str(x) for x in sp.q_weights],
        "vars": list(sp.vars), "var_weights": [str(x) for x in sp.var_weights],
        "var_orders": list(sp.var_orders), "cutoff": str(sp.cutoff), "max_order": sp.max_order,
        "labels": list(sp.labels), "gens": list(sp.gens),
    }


def space_from_json(data: Mapping) -> SeriesSpace:
    return SeriesSpace(
        qdim=len(data["q_weights"]), vars=tuple(data["vars"]),
        var_weights=tuple(Fraction(x) for x in data["var_weights"]),
        var_orders=tuple(int(x) for x in data["var_orders"]),
        q_weights=tuple(Fraction(x) for x in data["q_weights"]), cutoff=Fraction(data["cutoff"]),
        max_order=data["max_order"], labels=tuple(data["labels"]), gens=tuple(data["gens"]),
        q_names=tuple(data["q_names"]))


def series_to_doc(s: Series) -> dict:
    return {"space": space_to_json(s.space), "terms": s.to_json()}


def series_from_doc(doc: Mapping) -> Series:
    return series_from_json(space_from_json(doc["space"]), doc["terms"])


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"
