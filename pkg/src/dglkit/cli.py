"""Command-line front-end: presentation files in, deterministic reports out."""
from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .dgl import DGL, DGLError, chain_homology, is_minimal, validate
from .dgl_homology import (
    COHOMOLOGY_CONVENTION,
    HomologyError,
    bigraded_homology,
    cohomology,
    compare_with_coformal,
)
from .free_lie import GeneratorError, GeneratorSet, ParseError, format_element, parse_expression
from .models import (
    N0_CONVENTION,
    CutoffIncomplete,
    GLPresentation,
    HomologyTarget,
    ModelError,
    bigraded_model,
    coformal_check,
    filtered_model,
    minimal_model,
    verify_bigraded_model,
    verify_quasi_iso,
)

SCHEMA = "dglkit-report/1"
SECTIONS = ("generators", "differential", "relations", "cutoffs")
CUTOFF_KEYS = ("degree", "filtration", "simplicial")
DEFAULT_CUTOFFS = {"degree": 8, "filtration": 4, "simplicial": 4}
COMMANDS = (
    "validate", "homology", "minimal-model", "bigraded-model", "filtered-model",
    "coformal", "resolution", "dgl-homology", "cohomology", "jacobi-check",
)

EXIT_OK, EXIT_DIAGNOSTIC, EXIT_INCOMPLETE = 0, 1, 2


class Diagnostic(Exception):
    """A user-facing problem, optionally pinned to a line and column of the input."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 kind: str = "diagnostic"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.kind = kind

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "message": self.message}
        if self.line is not None:
            out["line"] = self.line
            out["column"] = self.column
        return out

    def __str__(self):
        if self.line is None:
            return self.message
        return f"{self.line}:{self.column}: {self.message}"


# ---------------------------------------------------------------------------
# presentation files


@dataclass
class Entry:
    key: str
    value: str
    line: int
    column: int          # column of the value


@dataclass
class PresentationFile:
    generators: List[Entry] = field(default_factory=list)
    differential: List[Entry] = field(default_factory=list)
    relations: List[Entry] = field(default_factory=list)
    cutoffs: List[Entry] = field(default_factory=list)
    digest: str = ""

    def cutoff_values(self) -> Dict[str, int]:
        return {e.key: int(e.value) for e in self.cutoffs}


_SECTION = re.compile(r"^\s*\[\s*([A-Za-z_]+)\s*\]\s*$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def read_presentation(text: str) -> PresentationFile:
    """Split a sectioned ``name = value`` file into located entries.

    configparser drops line numbers, so the format is read by hand.
    """
    pres = PresentationFile(digest=hashlib.sha256(text.encode()).hexdigest())
    section = None
    seen: Dict[Tuple[str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1).lower()
            if section not in SECTIONS:
                raise Diagnostic(f"unknown section [{m.group(1)}]; expected one of "
                                 + ", ".join(f"[{s}]" for s in SECTIONS),
                                 lineno, line.index("[") + 1, "syntax")
            continue
        if section is None:
            raise Diagnostic("entry outside of any section", lineno, len(line) - len(line.lstrip()) + 1, "syntax")
        if "=" not in line:
            raise Diagnostic("expected 'name = value'", lineno, len(line) - len(line.lstrip()) + 1, "syntax")
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if not _NAME.match(key):
            raise Diagnostic(f"invalid name {key!r}", lineno, key_col, "syntax")
        value = value_part.strip()
        value_col = len(key_part) + 1 + (len(value_part) - len(value_part.lstrip())) + 1
        if not value:
            raise Diagnostic(f"missing value for {key!r}", lineno, value_col, "syntax")
        if (section, key) in seen:
            raise Diagnostic(f"{key!r} already given on line {seen[(section, key)]}", lineno, key_col, "syntax")
        seen[(section, key)] = lineno
        getattr(pres, section).append(Entry(key, value, lineno, value_col))
    _check_scalars(pres)
    return pres


def _check_scalars(pres: PresentationFile):
    for e in pres.generators:
        try:
            d = int(e.value)
        except ValueError:
            raise Diagnostic(f"degree of {e.key!r} must be an integer, got {e.value!r}", e.line, e.column, "syntax")
        if d < 1:
            raise Diagnostic(
                f"generator {e.key!r} has degree {d}; generators must have degree >= 1 "
                f"(connected graded Lie algebras only)", e.line, e.column, "connectedness")
    for e in pres.cutoffs:
        if e.key not in CUTOFF_KEYS:
            raise Diagnostic(f"unknown cutoff {e.key!r}; expected one of {', '.join(CUTOFF_KEYS)}",
                             e.line, 1, "syntax")
        try:
            v = int(e.value)
        except ValueError:
            raise Diagnostic(f"cutoff {e.key!r} must be an integer", e.line, e.column, "syntax")
        if v < 0:
            raise Diagnostic(f"cutoff {e.key!r} must be nonnegative", e.line, e.column, "syntax")


def _located(e: Entry, exc: Exception, kind: str) -> Diagnostic:
    return Diagnostic(str(exc), e.line, e.column, kind)


def build(pres: PresentationFile, deg_cutoff: int):
    """Turn a presentation into a DGL, or a GLPresentation when relations are given."""
    if not pres.generators:
        raise Diagnostic("no generators given", kind="syntax")
    try:
        gens = GeneratorSet([(e.key, int(e.value)) for e in pres.generators], deg_cutoff)
    except GeneratorError as exc:
        raise Diagnostic(str(exc), kind="syntax")
    if pres.relations and pres.differential:
        raise Diagnostic("a file gives either [differential] or [relations], not both", kind="syntax")

    def parse(e: Entry):
        try:
            return parse_expression(e.value, gens)
        except ParseError as exc:
            kind = "unknown-name" if "unknown generator" in str(exc) else "syntax"
            raise _located(e, exc, kind)

    if pres.relations:
        rels = []
        for e in pres.relations:
            rels.append(parse(e))
        try:
            return GLPresentation(gens, rels)
        except ModelError as exc:
            raise Diagnostic(str(exc), kind="degree")
    diff = {}
    for e in pres.differential:
        if e.key not in gens.index:
            raise Diagnostic(f"differential given for unknown generator {e.key!r}", e.line, 1, "unknown-name")
        v = parse(e)
        want = gens.degrees[gens.index[e.key]] - 1
        if not v.is_zero() and v.degree != want:
            raise Diagnostic(f"differential of {e.key!r} has degree {v.degree}, expected {want}",
                             e.line, e.column, "degree")
        diff[e.key] = v
    try:
        return DGL(gens, diff)
    except DGLError as exc:
        raise Diagnostic(str(exc), kind="degree")


def parse(path, deg_cutoff: Optional[int] = None):
    """Read and build a presentation file; the file's degree cutoff applies unless overridden."""
    text = Path(path).read_text()
    pres = read_presentation(text)
    cut = deg_cutoff if deg_cutoff is not None else pres.cutoff_values().get("degree", DEFAULT_CUTOFFS["degree"])
    return build(pres, cut)


def serialize(obj, cutoffs: Optional[Dict[str, int]] = None) -> str:
    """Write a DGL or GLPresentation back out in the file format."""
    gens = obj.gens
    lines = ["[generators]"]
    lines += [f"{n} = {d}" for n, d in zip(gens.names, gens.degrees)]
    if isinstance(obj, GLPresentation):
        if obj.relations:
            lines += ["", "[relations]"]
            lines += [f"r{i + 1} = {format_element(r)}" for i, r in enumerate(obj.relations)]
    else:
        nonzero = [(n, v) for n, v in zip(gens.names, obj.differential) if not v.is_zero()]
        if nonzero:
            lines += ["", "[differential]"]
            lines += [f"{n} = {format_element(v)}" for n, v in nonzero]
    cut = {"degree": gens.cutoff, **(cutoffs or {})}
    lines += ["", "[cutoffs]"] + [f"{k} = {cut[k]}" for k in CUTOFF_KEYS if k in cut]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


class Incomplete(Exception):
    """Raised by a command whose result is truncated by a cutoff."""

    def __init__(self, payload: dict, notes: List[str]):
        super().__init__("; ".join(notes))
        self.payload = payload
        self.notes = notes


def _key(pair: Tuple[int, int]) -> str:
    return f"{pair[0]},{pair[1]}"


def _need_dgl(obj) -> DGL:
    if not isinstance(obj, DGL):
        raise Diagnostic("this command needs a [differential] presentation, not [relations]", kind="usage")
    return obj


def _model_payload(model) -> dict:
    table = {_key(k): v for k, v in sorted(model.table().items())}
    comps = {}
    for r, vals in sorted(model.components.items()):
        entries = {n: format_element(v) for n, v in zip(model.gens.names, vals) if not v.is_zero()}
        if entries or r == 0:
            comps[str(r)] = entries
    return {
        "generators": [
            {"name": n, "filtration": model.filtration[i], "internal_degree": model.internal_degree(i)}
            for i, n in enumerate(model.gens.names)
        ],
        "table": table,
        "differential": comps,
    }


def cmd_validate(obj, cut, args) -> dict:
    if isinstance(obj, GLPresentation):
        return {"kind": "graded-lie-presentation", "relations": [format_element(r) for r in obj.relations]}
    bad = validate(obj)
    if bad:
        raise Diagnostic("differential does not square to zero: "
                         + "; ".join(f"generator {v.generator}: d(d({v.generator})) = {format_element(v.residue)}"
                                     for v in bad), kind="square-zero")
    return {"kind": "dgl", "square_zero": True, "minimal": is_minimal(obj)}


def cmd_homology(obj, cut, args) -> dict:
    if isinstance(obj, GLPresentation):
        return {"betti": {str(k): obj.dim(k) for k in range(1, cut["degree"] + 1)}}
    h = chain_homology(obj, obj.cutoff - 1)
    return {
        "betti": {str(k): b for k, b in h.betti().items()},
        "representatives": {
            str(k): [format_element(r) for r in d.representatives] for k, d in h.degrees.items() if d.betti
        },
    }


def cmd_minimal_model(obj, cut, args) -> dict:
    d = _need_dgl(obj)
    m, phi = minimal_model(d)
    return {
        "generators": [{"name": n, "degree": k} for n, k in zip(m.gens.names, m.gens.degrees)],
        "differential": {n: format_element(v) for n, v in zip(m.gens.names, m.differential) if not v.is_zero()},
        "morphism": {n: format_element(v) for n, v in zip(m.gens.names, phi.images)},
        "quasi_isomorphism": verify_quasi_iso(phi, d.cutoff - 1),
    }


def _target(obj, deg: int):
    if isinstance(obj, GLPresentation):
        return obj
    return HomologyTarget(obj, deg)


def cmd_bigraded_model(obj, cut, args) -> dict:
    deg = cut["degree"] if isinstance(obj, GLPresentation) else obj.cutoff - 1
    model = bigraded_model(_target(obj, deg), deg, cut["filtration"])
    out = _model_payload(model)
    out["checks"] = verify_bigraded_model(model)
    if model.incomplete:
        raise Incomplete(out, model.incomplete)
    return out


def cmd_filtered_model(obj, cut, args) -> dict:
    model = filtered_model(_need_dgl(obj), cut["filtration"])
    out = _model_payload(model)
    out["perturbation_orders"] = model.perturbation_orders()
    if model.incomplete:
        raise Incomplete(out, model.incomplete)
    return out


def cmd_coformal(obj, cut, args) -> dict:
    rep = coformal_check(_need_dgl(obj), cut["filtration"])
    out = {"coformal": rep.coformal, "n0": rep.n0, "classes": rep.classes}
    if rep.coformal and rep.incomplete:
        # no perturbation seen below the cutoff: coformality is not certified
        raise Incomplete(out, rep.incomplete)
    return out


def cmd_resolution(obj, cut, args) -> dict:
    from .resolution import canonical_resolution, minimal_cw_resolution
    d = _need_dgl(obj)
    if args.kind == "canonical":
        simp = cut["simplicial"]
        W = canonical_resolution(d, simp, d.cutoff)
        levels = {}
        for n in range(simp + 1):
            g = W.levels[n]
            counts: Dict[int, int] = {}
            for k in g.degrees:
                counts[k] = counts.get(k, 0) + 1
            levels[str(n)] = {str(k): c for k, c in sorted(counts.items())}
        return {"kind": "canonical", "generators_per_level": levels,
                "simplicial_identities": W.check_identities() == []}
    model = filtered_model(d, cut["filtration"])
    cw = minimal_cw_resolution(model)
    out = {
        "kind": "minimal",
        "spheres": {_key(k): v for k, v in sorted(cw.sphere_counts().items())},
        "cw_property": cw.cw_property,
        "decomposable": cw.decomposable,
    }
    if model.incomplete:
        raise Incomplete(out, model.incomplete)
    return out


def _homology_table(h) -> dict:
    return {_key(k): v for k, v in h.nonzero().items()}


def cmd_dgl_homology(obj, cut, args) -> dict:
    d = _need_dgl(obj)
    deg = d.cutoff - 1
    h = bigraded_homology(d, cut["simplicial"], deg, args.method, certify=args.certify)
    out = {"method": h.method, "simplicial_range": h.simp_range, "degree_range": h.deg_range,
           "betti": _homology_table(h)}
    if args.compare:
        cert = compare_with_coformal(d, cut["simplicial"], deg, certify=args.certify)
        out["coformal_comparison"] = {
            "holds": cert.holds,
            "dims": {_key(k): list(v) for k, v in cert.dims.items() if any(v)},
        }
    if h.incomplete:
        raise Incomplete(out, h.incomplete)
    return out


def _coefficients(text: str) -> Dict[int, int]:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            deg, dim = part.split(":")
            out[int(deg)] = int(dim)
        except ValueError:
            raise Diagnostic(f"bad coefficient entry {part!r}; expected degree:dimension", kind="usage")
    return out


def cmd_cohomology(obj, cut, args) -> dict:
    d = _need_dgl(obj)
    deg = d.cutoff - 1
    coeffs = _coefficients(args.coefficients)
    h = bigraded_homology(d, cut["simplicial"], deg, args.method, certify=args.certify)
    lo = min(coeffs, default=0) - deg
    hi = max(coeffs, default=0)
    co = cohomology(h, coeffs, range(lo, hi + 1))
    return {"coefficients": {str(k): v for k, v in sorted(coeffs.items())},
            "dims": {_key(k): v for k, v in sorted(co.dims.items()) if v}}


def cmd_jacobi_check(obj, cut, args) -> dict:
    from .jacobi import NASignature, free_jacobi_level, is_jacobi, resolve_lambda4_variant, zero
    d = _need_dgl(obj)
    for n, v in zip(d.gens.names, d.differential):
        if not v.is_zero() and any(len(w) > 1 for w in v.terms):
            raise Diagnostic(f"jacobi-check needs a linear differential; generator {n!r} has a bracket term",
                             kind="usage")
    sig = NASignature(list(zip(d.gens.names, d.gens.degrees)))
    values = []
    for v in d.differential:
        acc = zero(sig)
        for w, c in v.terms.items():
            acc = acc + c * sig.gen(w[0])
        values.append(acc)
    samples = [(a, b, c, e) for a in (1, 2) for b in (1, 2) for c in (1, 2) for e in (1, 2)]
    verdict = resolve_lambda4_variant(samples)
    variant = "w" if verdict.get("w") else "z"
    levels = {}
    for level in range(args.level + 1):
        alg = free_jacobi_level(sig, level, d.cutoff, values, variant)
        levels[str(level)] = {
            "dims": {str(n): len(alg.basis(n)) for n in range(1, d.cutoff + 1)},
            "square_zero": not alg.square_zero(),
            "is_jacobi": is_jacobi(alg),
        }
    return {"lambda4_variants": verdict, "variant": variant, "levels": levels}


HANDLERS = {
    "validate": cmd_validate,
    "homology": cmd_homology,
    "minimal-model": cmd_minimal_model,
    "bigraded-model": cmd_bigraded_model,
    "filtered-model": cmd_filtered_model,
    "coformal": cmd_coformal,
    "resolution": cmd_resolution,
    "dgl-homology": cmd_dgl_homology,
    "cohomology": cmd_cohomology,
    "jacobi-check": cmd_jacobi_check,
}


# ---------------------------------------------------------------------------
# reports


def _report(command: str, digest: Optional[str], path: str, cut: Dict[str, int], status: str,
            result: Optional[dict], diagnostics: List[dict]) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "input": {"file": Path(path).name, "sha256": digest},
        "cutoffs": cut,
        "conventions": {"n0": N0_CONVENTION, "cohomology": COHOMOLOGY_CONVENTION},
        "status": status,
        "result": result,
        "diagnostics": diagnostics,
    }


def _text(value, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{value}")
    return lines


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    return "\n".join(_text(report)) + "\n"


def run(command: str, path: str, args) -> Tuple[dict, int]:
    """Execute one command and return (report, exit code)."""
    cut = dict(DEFAULT_CUTOFFS)
    digest = None
    try:
        text = Path(path).read_text()
        digest = hashlib.sha256(text.encode()).hexdigest()
        pres = read_presentation(text)
        cut.update(pres.cutoff_values())
        for key, flag in (("degree", args.deg_cutoff), ("filtration", args.filt_cutoff),
                          ("simplicial", args.simp_cutoff)):
            if flag is not None:
                cut[key] = flag
        obj = build(pres, cut["degree"])
        result = HANDLERS[command](obj, cut, args)
    except OSError as exc:
        return _report(command, digest, path, cut, "error", None,
                       [{"kind": "io", "message": str(exc)}]), EXIT_DIAGNOSTIC
    except Diagnostic as exc:
        return _report(command, digest, path, cut, "error", None, [exc.as_dict()]), EXIT_DIAGNOSTIC
    except Incomplete as exc:
        return _report(command, digest, path, cut, "incomplete", exc.payload,
                       [{"kind": "cutoff-incomplete", "message": n} for n in exc.notes]), EXIT_INCOMPLETE
    except CutoffIncomplete as exc:
        return _report(command, digest, path, cut, "incomplete", None,
                       [{"kind": "cutoff-incomplete", "message": str(exc)}]), EXIT_INCOMPLETE
    except (DGLError, ModelError, HomologyError, ValueError) as exc:
        return _report(command, digest, path, cut, "error", None,
                       [{"kind": type(exc).__name__, "message": str(exc)}]), EXIT_DIAGNOSTIC
    return _report(command, digest, path, cut, "ok", result, []), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dglkit", description="Computations with differential graded Lie algebras.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", help="presentation file")
    p.add_argument("--deg-cutoff", type=int, help="internal degree cutoff (default 8 unless the file sets one)")
    p.add_argument("--filt-cutoff", type=int, help="filtration cutoff (default 4)")
    p.add_argument("--simp-cutoff", type=int, help="simplicial dimension cutoff (default 4)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--kind", choices=("canonical", "minimal"), default="canonical",
                   help="resolution: which resolution to describe")
    p.add_argument("--method", choices=("minimal", "canonical"), default="minimal",
                   help="dgl-homology/cohomology: computation route")
    p.add_argument("--certify", action="store_true",
                   help="dgl-homology/cohomology: build and check the CW resolution")
    p.add_argument("--compare", action="store_true", help="dgl-homology: compare with the coformal model")
    p.add_argument("--coefficients", default="0:1",
                   help="cohomology: graded coefficient dimensions as degree:dim,...")
    p.add_argument("--level", type=int, choices=(0, 1, 2), default=2, help="jacobi-check: top level")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    report, code = run(args.command, args.file, args)
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
