"""Command-line front end: configuration, pipeline orchestration, reports.

Subcommands cover the individual analysis stages (equilibrium, spectrum,
reps, degrees, invariants, branch) plus `report`, which runs the whole
pipeline.  All numeric output is serialized deterministically: dictionary
keys are sorted and floats carry 17 significant digits, so identical
configurations produce byte-identical files.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

from . import bifurcation, burnside, orbits
from .bifurcation import UsageError
from .forcefield import (ConvergenceError, DegenerateParameters, DomainError,
                         PairPotential, find_equilibrium, hessian)
from .grouprep import (CHARACTER_TABLE, CLASS_SIZES, IRREP_DIMS,
                       isotypic_decomposition, multiplicities,
                       representation_character, slice_spectrum)

__all__ = ["main", "RunConfig", "ConfigError", "load_config", "dumps"]

_OUTPUT_DIR_ENV = "TETRAVIB_OUTPUT_DIR"


class ConfigError(ValueError):
    """Malformed or out-of-range configuration input."""


# ---------------------------------------------------------------------------
# configuration

_SCHEMA = {
    "potential": {"bond_weight": float, "vdw_A": float, "vdw_B": float,
                  "sigma": float},
    "analysis": {"l_max": int, "n_modes": int, "newton_tol": float,
                 "target_amplitude": float, "step_size": float},
    "output": {"format": str, "path": str},
}

_DEFAULTS = {
    "potential": {"bond_weight": 1.0, "vdw_A": 0.0, "vdw_B": 0.0,
                  "sigma": 0.0},
    "analysis": {"l_max": 2, "n_modes": 16, "newton_tol": 1e-11,
                 "target_amplitude": 0.05, "step_size": 5e-3},
    "output": {"format": "json", "path": ""},
}


class RunConfig:
    """Validated flat configuration (sections -> scalar settings)."""

    def __init__(self, sections=None):
        data = {s: dict(v) for s, v in _DEFAULTS.items()}
        for section, values in (sections or {}).items():
            if section not in _SCHEMA:
                raise ConfigError("unknown config section [%s]" % section)
            for key, raw in values.items():
                if key not in _SCHEMA[section]:
                    raise ConfigError("unknown key %r in section [%s]"
                                      % (key, section))
                want = _SCHEMA[section][key]
                if want is float and isinstance(raw, (int, float)):
                    raw = float(raw)
                if not isinstance(raw, want) or isinstance(raw, bool):
                    raise ConfigError("key %s.%s expects %s"
                                      % (section, key, want.__name__))
                data[section][key] = raw
        self.potential_params = data["potential"]
        self.analysis = data["analysis"]
        self.output = data["output"]
        if self.analysis["l_max"] < 1:
            raise ConfigError("analysis.l_max must be at least 1")
        for key in ("newton_tol", "target_amplitude", "step_size"):
            if self.analysis[key] <= 0:
                raise ConfigError("analysis.%s must be positive" % key)
        if self.analysis["n_modes"] < 1:
            raise ConfigError("analysis.n_modes must be at least 1")
        if self.output["format"] not in ("json", "csv"):
            raise ConfigError("output.format must be json or csv")

    def potential(self):
        try:
            return PairPotential(**self.potential_params)
        except DegenerateParameters as exc:
            raise ConfigError(str(exc))


def _parse_scalar(text):
    text = text.strip()
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        body = text[1:-1]
        if '"' in body or "\\" in body:
            raise ConfigError("unsupported escape in string %s" % text)
        return body
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text, 10)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ConfigError("cannot parse value %r" % text)


def load_config(path) -> RunConfig:
    """Parse a flat TOML-style file: [section] headers and key = value lines.

    Supported values: double-quoted strings (no escapes), integers, floats
    and true/false.  Comments start with '#'.  Nested tables, arrays and
    multi-line strings are deliberately out of scope.
    """
    sections = {}
    current = None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError("cannot read config: %s" % exc)
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line.startswith("#") or not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("line %d: malformed section header" % lineno)
            name = line[1:-1].strip()
            current = sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key = value" % lineno)
        if current is None:
            raise ConfigError("line %d: key outside any section" % lineno)
        key, _, value = line.partition("=")
        if "#" in value and '"' not in value:
            value = value.split("#", 1)[0]
        current[key.strip()] = _parse_scalar(value)
    return RunConfig(sections)


# ---------------------------------------------------------------------------
# deterministic serialization

def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ArithmeticError("non-finite float in report")
    if x == int(x) and abs(x) < 1e16:
        return "%.1f" % x
    return format(x, ".17g")


def dumps(obj, indent=0) -> str:
    """Minimal deterministic JSON: sorted keys, 17-digit floats."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if obj is True or obj is False:
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        return '"%s"' % out
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join("%s%s: %s" % (inner, dumps(str(k)),
                                         dumps(v, indent + 2))
                           for k, v in sorted(obj.items()))
        return "{\n%s\n%s}" % (items, pad)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(inner + dumps(v, indent + 2) for v in obj)
        return "[\n%s\n%s]" % (items, pad)
    raise ConfigError("unserializable object of type %s" % type(obj).__name__)


def _dumps_line(obj) -> str:
    """Single-line variant for JSONL records."""
    if isinstance(obj, dict):
        return "{%s}" % ", ".join(
            "%s: %s" % (_dumps_line(str(k)), _dumps_line(v))
            for k, v in sorted(obj.items()))
    if isinstance(obj, (list, tuple)):
        return "[%s]" % ", ".join(_dumps_line(v) for v in obj)
    return dumps(obj)


def _csv_cell(v):
    if isinstance(v, float):
        return _format_float(v)
    if isinstance(v, (list, tuple)):
        return "|".join(_csv_cell(x) for x in v)
    return str(v)


def _to_csv(rows, fieldnames):
    lines = [",".join(fieldnames)]
    for row in rows:
        lines.append(",".join(_csv_cell(row[f]) for f in fieldnames))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# report builders

def _class_entry(kl, coeff=None):
    out = {"class": kl.printed_form(), "canonical": kl.canonical_form()}
    if coeff is not None:
        out["coeff"] = int(coeff)
    return out


def _element_terms(element):
    return [_class_entry(kl, c) for kl, c in element.terms()]


def _equilibrium_report(eq):
    return {
        "r_o": eq.r_o,
        "s_o": eq.s_o,
        "nu0_sq": eq.nu0_sq,
        "mu": list(eq.mu),
        "u_o": [[float(v) for v in row] for row in eq.u_o],
        "lam_critical": [1.0 / math.sqrt(m) for m in eq.mu],
    }


def _spectrum_report(potential, eq):
    spec = slice_spectrum(hessian(potential, eq.u_o), eq.u_o)
    return {
        "mu": list(spec.mu),
        "ratios": [m / spec.mu[2] for m in spec.mu],
        "slice_multiplicities": list(spec.slice_mults),
        "zero_modes": spec.zero_modes,
        "slice_eigenvalues": [float(v) for v in spec.eigenvalues],
    }


def _reps_report():
    dec = isotypic_decomposition()
    return {
        "character_table": [list(map(int, row)) for row in CHARACTER_TABLE],
        "class_sizes": list(CLASS_SIZES),
        "irrep_dims": list(IRREP_DIMS),
        "representation_character": list(map(int, representation_character())),
        "multiplicities": list(multiplicities()),
        "projection_ranks": list(dec.ranks),
    }


def _invariant_report(rep):
    return {
        "critical_value": rep.critical.value,
        "contributors": [list(c) for c in rep.critical.contributors],
        "lam_minus": rep.lam_minus,
        "lam_plus": rep.lam_plus,
        "omega": _element_terms(rep.omega),
        "maximal": [_class_entry(kl, c) for kl, c in rep.maximal],
        "descriptions": [
            {"class": d.klass.printed_form(), "title": d.title,
             "brake": d.brake, "text": d.text}
            for d in rep.descriptions],
    }


def _invariant_reports(mu, l_max, universe):
    crits = bifurcation.critical_set(mu, l_max)
    reports = []
    for crit in crits:
        try:
            reports.append(bifurcation.invariant(crit, mu, l_max, universe))
        except UsageError:
            continue            # not isolatable within this l_max window
    return reports


def _branch_rows(branch):
    return [{"amplitude": p.amplitude, "lambda": p.lam,
             "residual": p.residual,
             "predicate_residuals": list(p.predicate_residuals)}
            for p in branch.points]


def _branch_summary(branch, potential):
    last = branch.points[-1]
    _, spread = orbits.energy_profile(branch.orbit, potential)
    return {
        "class": branch.klass.printed_form(),
        "canonical": branch.klass.canonical_form(),
        "j": branch.j, "l": branch.l,
        "steps": len(branch.points),
        "final_amplitude": last.amplitude,
        "final_lambda": last.lam,
        "final_residual": last.residual,
        "max_predicate_residual": max(last.predicate_residuals),
        "energy_spread": spread,
        "brake": branch.description.brake,
        "frequency_extrapolation": orbits.frequency_extrapolation(branch),
    }


# ---------------------------------------------------------------------------
# subcommand implementations

def _meta(args):
    return {"seed": args.seed, "command": args.command}


def _cmd_equilibrium(args, config):
    eq = find_equilibrium(config.potential())
    return {"meta": _meta(args), "equilibrium": _equilibrium_report(eq)}


def _cmd_spectrum(args, config):
    potential = config.potential()
    eq = find_equilibrium(potential)
    return {"meta": _meta(args), "spectrum": _spectrum_report(potential, eq)}


def _cmd_reps(args, config):
    return {"meta": _meta(args), "representation": _reps_report()}


def _cmd_degrees(args, config):
    l_max = max(config.analysis["l_max"], args.l)
    universe = bifurcation._universe(l_max)
    element = universe.basic_degree(args.j, args.l)
    return {"meta": _meta(args), "j": args.j, "l": args.l,
            "degree": _element_terms(element)}


def _cmd_invariants(args, config):
    potential = config.potential()
    eq = find_equilibrium(potential)
    l_max = config.analysis["l_max"]
    universe = bifurcation._universe(l_max)
    reports = _invariant_reports(eq.mu, l_max, universe)
    if args.critical is not None:
        j, l = args.critical
        picked = [r for r in reports if (j, l) in r.critical.contributors]
        if not picked:
            raise UsageError("no isolatable critical number for mode "
                             "(%d, %d) within l_max=%d" % (j, l, l_max))
        reports = picked
    families = bifurcation.independent_families(reports)
    return {
        "meta": _meta(args),
        "invariants": [_invariant_report(r) for r in reports],
        "families": [
            {"class": f.klass.printed_form(),
             "canonical": f.klass.canonical_form(),
             "j": f.j, "l": f.l, "coeff": f.coefficient,
             "critical_value": f.value}
            for f in families],
    }


def _parse_critical(text):
    try:
        j, l = (int(part) for part in text.split(","))
    except ValueError:
        raise ConfigError("--critical expects 'j,l' with integers")
    return j, l


def _cmd_branch(args, config):
    potential = config.potential()
    universe = bifurcation._universe(max(config.analysis["l_max"], args.l))
    try:
        klass = universe.parse_class(args.klass)
    except KeyError:
        raise UsageError("unknown symmetry class %r" % args.klass)
    branch = orbits.continue_branch(
        potential, klass, args.j, args.l,
        n_modes=config.analysis["n_modes"],
        steps=args.steps,
        target_amplitude=config.analysis["target_amplitude"],
        step_size=config.analysis["step_size"],
        newton_tol=config.analysis["newton_tol"])
    rows = _branch_rows(branch)
    if config.output["format"] == "csv":
        text = _to_csv(rows, ["amplitude", "lambda", "residual",
                              "predicate_residuals"])
    else:
        text = "".join(_dumps_line(row) + "\n" for row in rows)
    return text


def _cmd_report(args, config):
    potential = config.potential()
    eq = find_equilibrium(potential)
    l_max = config.analysis["l_max"]
    universe = bifurcation._universe(l_max)
    reports = _invariant_reports(eq.mu, l_max, universe)
    families = bifurcation.independent_families(reports)
    branches = []
    for fam in families:
        branch = orbits.continue_branch(
            potential, fam.klass, fam.j, fam.l,
            n_modes=config.analysis["n_modes"],
            target_amplitude=config.analysis["target_amplitude"],
            step_size=config.analysis["step_size"],
            newton_tol=config.analysis["newton_tol"],
            equilibrium=eq)
        branches.append(_branch_summary(branch, potential))
    return {
        "meta": _meta(args),
        "equilibrium": _equilibrium_report(eq),
        "spectrum": _spectrum_report(potential, eq),
        "representation": _reps_report(),
        "invariants": [_invariant_report(r) for r in reports],
        "families": [
            {"class": f.klass.printed_form(),
             "canonical": f.klass.canonical_form(),
             "j": f.j, "l": f.l, "coeff": f.coefficient,
             "critical_value": f.value}
            for f in families],
        "branches": branches,
    }


# ---------------------------------------------------------------------------
# wiring

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _build_parser():
    parser = _Parser(prog="tetravib",
                     description="Symmetric vibration and bifurcation "
                                 "analysis of the four-particle molecule.")
    parser.add_argument("--config", help="flat TOML-style configuration file")
    parser.add_argument("--seed", type=int, default=None,
                        help="recorded in output metadata; the pipeline is "
                             "deterministic and ignores it")
    parser.add_argument("--output", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"),
                        help="override output.format")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("equilibrium", "spectrum", "reps", "report"):
        sub.add_parser(name)
    p_deg = sub.add_parser("degrees")
    p_deg.add_argument("--j", type=int, required=True,
                       help="isotypic index 0..4")
    p_deg.add_argument("--l", type=int, required=True, help="Fourier mode")
    p_inv = sub.add_parser("invariants")
    p_inv.add_argument("--critical", type=_parse_critical, default=None,
                       metavar="J,L", help="single critical number, by one "
                                           "contributing mode")
    p_br = sub.add_parser("branch")
    p_br.add_argument("--class", dest="klass", required=True,
                      help="symmetry class name (canonical or printed form)")
    p_br.add_argument("--j", type=int, required=True)
    p_br.add_argument("--l", type=int, required=True)
    p_br.add_argument("--steps", type=int, default=40)
    return parser


_COMMANDS = {
    "equilibrium": _cmd_equilibrium,
    "spectrum": _cmd_spectrum,
    "reps": _cmd_reps,
    "degrees": _cmd_degrees,
    "invariants": _cmd_invariants,
    "branch": _cmd_branch,
    "report": _cmd_report,
}


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k, v in sorted(obj.items()):
            _flatten(prefix + (str(k),), v, rows)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(prefix + (str(i),), v, rows)
    else:
        rows.append({"key": ".".join(prefix), "value": obj})


def _render(result, fmt):
    if isinstance(result, str):            # subcommand produced final text
        return result
    if fmt == "json":
        return dumps(result) + "\n"
    rows = []
    _flatten((), result, rows)
    return _to_csv(rows, ["key", "value"])


def _write_output(text, args, config):
    path = args.output or config.output["path"]
    if not path:
        sys.stdout.write(text)
        return
    out_dir = os.environ.get(_OUTPUT_DIR_ENV)
    if out_dir:
        path = os.path.join(out_dir, os.path.basename(path))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else RunConfig()
        if args.format:
            config.output["format"] = args.format
        if args.command == "degrees" and not (0 <= args.j <= 4 and args.l >= 1):
            raise UsageError("degrees needs 0 <= j <= 4 and l >= 1")
        result = _COMMANDS[args.command](args, config)
        _write_output(_render(result, config.output["format"]), args, config)
        return 0
    except (ConfigError, UsageError, DomainError, DegenerateParameters) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1
    except ConvergenceError as exc:
        sys.stderr.write("non-convergence: %s\n" % exc)
        return 2
    except (burnside.InternalError, ArithmeticError) as exc:
        sys.stderr.write("internal consistency failure: %s\n" % exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
