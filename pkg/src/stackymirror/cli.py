"""Command-line entry point: ``engine <command> <input-file> [options]``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Tuple

from . import io
from .birkhoff import eliminate_positive_z
from .errors import EngineError, ParseError, ShapeError, ValidationError
from .series import (Series, asymptotics, check_sharp, i_function, j_function, mirror_map,
                     quantum_power, quantum_structure_constants)
from .poly import format_coeff
from .stackyfan import fmt
from .twist import ci_i_function, convexity_check, quantum_period, twisted_i_function

Result = Tuple[dict, str]


def _cmd_validate(p: io.Problem, args) -> Result:
    bad = p.fan_unchecked.validate()
    doc = {"valid": not bad, "violations": bad}
    if not bad:
        doc["rays"] = p.fan.n
        doc["extension"] = p.ext.m
        doc["algebra_violations"] = p.algebra.violations()
        doc["valid"] = not doc["algebra_violations"]
    if not doc["valid"]:
        text = "invalid:\n" + "\n".join(bad + doc.get("algebra_violations", []))
        raise _Invalid(doc, text)
    return doc, "valid"


class _Invalid(ValidationError):
    def __init__(self, doc: dict, text: str):
        super().__init__(text)
        self.doc, self.text = doc, text


def _cmd_box(p: io.Problem, args) -> Result:
    items = []
    for b in p.fan.box():
        items.append({
            "label": b.label, "age": fmt(b.age), "cone": sorted(i + 1 for i in b.sigma),
            "coefficients": {str(i + 1): fmt(c) for i, c in b.fractional_coords},
            "value": p.lattice.label(b.value),
        })
    text = "\n".join(f"{it['label']}: age {it['age']}, cone {it['cone']}" for it in items)
    return {"box": items}, text


def _cmd_mori(p: io.Problem, args) -> Result:
    ext = p.ext
    gens = [[fmt(x) for x in g] for g in ext.mori_cone()]
    doc = {"curve_basis": [[fmt(x) for x in b] for b in ext.curve_basis],
           "mori_generators": gens,
           "facets": [[fmt(x) for x in f] for f in ext.facets()]}
    text = "\n".join("generator (" + ", ".join(g) + ")" for g in gens)
    return doc, text


def _cmd_degrees(p: io.Problem, args) -> Result:
    ext, pol = p.ext, p.policy
    degs = ext.enumerate_degrees(pol.grading, pol.cutoff, pol.x_active)
    doc = {}
    lines = []
    for b in sorted(degs):
        label = ext.box_elements[b].label
        doc[label] = [{"dk": [fmt(x) for x in lam.dk], "coords": [fmt(x) for x in lam.coords]}
                      for lam in degs[b]]
        lines += [f"{label}: ({', '.join(d['dk'])})" for d in doc[label]]
    return {"degrees": doc, "count": sum(len(v) for v in degs.values())}, "\n".join(lines)


def _i(p: io.Problem) -> Series:
    return i_function(p.ext, p.algebra, p.policy)


def _cmd_ifunction(p: io.Problem, args) -> Result:
    I = _i(p)
    asy = asymptotics(I, p.algebra)
    return {"shape_holds": asy.shape_holds, "series": io.series_to_doc(I)}, I.render()


def _cmd_sharp(p: io.Problem, args) -> Result:
    sec = p.doc.get("sharp", {})
    mode = args.mode or sec.get("mode", "direct")
    extended = bool(sec.get("extended", False))
    kw = {}
    if mode == "shape":
        kw = {"I": _i(p), "alg": p.algebra}
        extended = True
    elif mode == "direct":
        if "grading" in sec:
            kw["grading"] = io._fracs(sec["grading"], "sharp.grading")
        if "cutoff" in sec or args.cutoff is not None:
            kw["cutoff"] = io._frac(args.cutoff if args.cutoff is not None else sec["cutoff"], "sharp.cutoff")
    verdict = check_sharp(p.ext, mode, extended, **kw)
    text = {True: "holds", False: "fails", None: "inconclusive"}[verdict.holds] + f" ({verdict.note})"
    return verdict.to_json(), text


def _cmd_mirror_map(p: io.Problem, args) -> Result:
    asy = asymptotics(_i(p), p.algebra)
    if not asy.shape_holds:
        raise _shape_error(asy)
    tau = mirror_map(asy.F, asy.G)
    return {"F": io.series_to_doc(asy.F), "tau": io.series_to_doc(tau)}, tau.render()


def _shape_error(asy) -> ShapeError:
    q, m, z = asy.offending[0]
    return ShapeError(f"I-function has a term z^{z} at Q^({','.join(map(fmt, q))}) {list(m)}; "
                      "use the birkhoff command")


def _jf(p: io.Problem, I: Series, alg):
    sec = p.section("mirror")
    return j_function(I, alg, sec["coordinates"], sec["targets"], sec["names"])


def _cmd_jfunction(p: io.Problem, args) -> Result:
    jf = _jf(p, _i(p), p.algebra)
    doc = {"tau": io.series_to_doc(jf.tau),
           "inverse": {v: io.series_to_doc(s) for v, s in jf.reversion.inverse.items()},
           "J": io.series_to_doc(jf.J)}
    text = "\n".join(f"{v} = {s.render()}" for v, s in jf.reversion.inverse.items())
    return doc, text + "\n" + jf.J.render()


def _cmd_qproduct(p: io.Problem, args) -> Result:
    sec = p.section("qproduct")
    I = _i(p)
    J = _jf(p, I, p.algebra).J if "mirror" in p.doc else I
    if sec.get("restrict"):
        J = J.restrict(sec["restrict"])
    doc: dict = {}
    lines = []
    if "directions" in sec:
        pairs = [tuple(x) for x in sec["pairs"]] if "pairs" in sec else None
        table = quantum_structure_constants(J, sec["directions"], pairs)
        doc["products"] = []
        for (a, b), row in table.items():
            doc["products"].append({"pair": [a, b],
                                    "constants": {g: io.series_to_doc(s) for g, s in row.items()}})
            lines += [f"c[{a},{b}]^{g}:\n{s.render()}" for g, s in row.items() if not s.is_zero()]
    if "powers" in sec:
        doc["powers"] = []
        for item in sec["powers"]:
            s = quantum_power(J, item["var"], int(item["k"]))
            doc["powers"].append({"var": item["var"], "k": int(item["k"]), "value": io.series_to_doc(s)})
            lines.append(f"{item['var']}^{item['k']}:\n{s.render()}")
    return doc, "\n".join(lines)


def _twist_spec(p: io.Problem, args):
    spec = p.twist
    return replace(spec, mode=args.mode) if args.mode else spec


def _cmd_twist(p: io.Problem, args) -> Result:
    spec = _twist_spec(p, args)
    report = convexity_check(p.ext, spec)
    I = twisted_i_function(p.ext, p.algebra, spec, p.policy)
    return {"convexity": report.to_json(), "series": io.series_to_doc(I)}, I.render()


def _ci(p: io.Problem, args) -> Series:
    return ci_i_function(p.ext, _twist_spec(p, args), p.target, p.policy)


def _cmd_ci(p: io.Problem, args) -> Result:
    Y = _ci(p, args)
    return {"series": io.series_to_doc(Y)}, Y.render()


def _cmd_qperiod(p: io.Problem, args) -> Result:
    Y = _ci(p, args) if "target" in p.doc else _i(p)
    alg = p.target if "target" in p.doc else p.algebra
    J = _jf(p, Y, alg).J if "mirror" in p.doc else Y
    per = quantum_period(J, alg.unit_of_sector[0])
    names = J.space.q_names
    doc = [{"q": [fmt(x) for x in q], "coeff": format_coeff(c)}
           for q, c in per.items()]
    text = "\n".join(f"{'*'.join(f'{n}^{fmt(x)}' for n, x in zip(names, q))}: {d['coeff']}"
                     for q, d in zip(per, doc))
    return {"period": doc}, text


def _cmd_birkhoff(p: io.Problem, args) -> Result:
    sec = p.section("birkhoff")
    res = eliminate_positive_z(_i(p), sec["directions"], p.algebra.unit_of_sector[0],
                               sec.get("order_variable"), sec.get("order"))
    doc = {"steps": res.steps,
           "corrections": {v: io.series_to_doc(c) for v, c in res.correction_terms().items()},
           "tau": io.series_to_doc(res.tau), "J": io.series_to_doc(res.J)}
    lines = [f"{v}: {c.render()}" for v, c in res.correction_terms().items() if not c.is_zero()]
    return doc, "\n".join(lines + ["tau:", res.tau.render()])


COMMANDS: Dict[str, Callable[[io.Problem, argparse.Namespace], Result]] = {
    "validate": _cmd_validate, "box": _cmd_box, "mori": _cmd_mori, "degrees": _cmd_degrees,
    "ifunction": _cmd_ifunction, "sharp": _cmd_sharp, "mirror-map": _cmd_mirror_map,
    "jfunction": _cmd_jfunction, "qproduct": _cmd_qproduct, "twist": _cmd_twist, "ci": _cmd_ci,
    "qperiod": _cmd_qperiod, "birkhoff": _cmd_birkhoff,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="engine", description="Exact I-functions, mirror maps and "
                                 "J-functions for toric Deligne-Mumford stacks.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("input", help="JSON input document")
    ap.add_argument("--cutoff", help="grading cutoff (overrides the input file)")
    ap.add_argument("--t-order", type=int, help="total order in the t variables")
    ap.add_argument("--mode", help="sharp: direct|lemma|shape; twist/ci: euler|generic")
    ap.add_argument("--out", help="write the output here instead of stdout")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    return ap


def run(command: str, path: str, cutoff=None, t_order: Optional[int] = None, mode: Optional[str] = None) -> dict:
    """Run a command and return its JSON document (raises :class:`EngineError`)."""
    args = argparse.Namespace(mode=mode, cutoff=cutoff)
    problem = io.Problem.from_file(path, cutoff=cutoff, t_order=t_order)
    doc, _ = COMMANDS[command](problem, args)
    return {"command": command, "name": problem.name, "result": doc}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        problem = io.Problem.from_file(args.input, cutoff=args.cutoff, t_order=args.t_order)
        doc, text = COMMANDS[args.command](problem, args)
        out = {"command": args.command, "name": problem.name, "result": doc}
        status = 0
    except _Invalid as exc:
        out = {"command": args.command, "error": exc.code, "result": exc.doc}
        text, status = exc.text, exc.exit_code
    except EngineError as exc:
        out = {"command": args.command, "error": exc.code, "message": str(exc)}
        if isinstance(exc, ParseError):
            out.update({"line": exc.line, "column": exc.column, "path": exc.path})
        print(f"engine: {exc.code}: {exc}", file=sys.stderr)
        text, status = f"error [{exc.code}]: {exc}", exc.exit_code
    rendered = io.dumps(out) if args.format == "json" else text + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return status


if __name__ == "__main__":
    sys.exit(main())
