"""Command line front end: problem files in, JSON reports and CSV grids out.

    dbrinterp solve problem.json [--mu a,b|auto] [--seed N] [--report out.json]
    dbrinterp parametrize problem.json
    dbrinterp check problem.json [--samples N]
    dbrinterp eval problem.json --grid R,A --out grid.csv

Complex numbers are written as [re, im] pairs everywhere.
"""

import argparse
import csv
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field

import jsonschema
import numpy as np

from . import errors as E
from .instances import disk_points
from .numerics import PSD_THRESHOLD, as_hermitian, stein_residual
from .pick import SOLVABILITY_THRESHOLD, compute_P
from .rational import ComplexRational, blaschke, schur_check
from .realization import NodeSpec, ProblemData, RealizationPair
from .rkhs import RKHSContext, verify_isometry, verify_orthogonality
from .solver import ParameterH, additivity_residual, degenerate_solve, minimal_interpolant, parametrize
from .theta import build_theta, extract_sigma, lft_apply, random_disk_pairs, verify_kernel_identity

EXIT = {"solved": 0, "degenerate_solved": 0, "unsolvable": 2, "inconsistent": 3, "unsupported": 3,
        "invalid": 4, "certification_failure": 5}

THRESHOLDS = {
    "stein": 1e-10,
    "theta_identity": 1e-9,
    "boundary_j": 1e-7,
    "sigma_schur_sup": 1 + 1e-8,
    "interpolation_conditions": 1e-8,
    "orthogonality": 1e-9,
    "norm_additivity": 1e-9,
    "isometry": 1e-9,
}

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_POLY = {"type": "array", "items": _COMPLEX, "minItems": 1}
SCHEMA = {
    "type": "object",
    "required": ["schur"],
    "additionalProperties": False,
    "properties": {
        "schur": {
            "type": "object",
            "oneOf": [
                {"required": ["blaschke"], "additionalProperties": False,
                 "properties": {"blaschke": {"type": "object", "required": ["zeros"],
                                             "additionalProperties": False,
                                             "properties": {"zeros": {"type": "array", "items": _COMPLEX},
                                                            "constant": _COMPLEX}}}},
                {"required": ["rational"], "additionalProperties": False,
                 "properties": {"rational": {"type": "object", "required": ["numerator"],
                                             "additionalProperties": False,
                                             "properties": {"numerator": _POLY, "denominator": _POLY}}}},
            ],
        },
        "nodes": {"type": "array", "minItems": 1, "items": {
            "type": "object", "required": ["point", "targets"], "additionalProperties": False,
            "properties": {"point": _COMPLEX, "multiplicity": {"type": "integer", "minimum": 1},
                           "targets": {"type": "array", "items": _COMPLEX, "minItems": 1}}}},
        "free_form": {"type": "object", "required": ["T", "E", "x_star"], "additionalProperties": False,
                      "properties": {"T": {"type": "array", "items": {"type": "array", "items": _COMPLEX}},
                                     "E": {"type": "array", "items": _COMPLEX},
                                     "x_star": {"type": "array", "items": _COMPLEX}}},
        "parameter": {"type": "object", "additionalProperties": False, "properties": {
            "mu": {"oneOf": [_COMPLEX, {"const": "auto"}]},
            "h_terms": {"type": "array", "items": {
                "type": "object", "required": ["point", "coefficient"], "additionalProperties": False,
                "properties": {"point": _COMPLEX, "coefficient": _COMPLEX}}}}},
        "tolerances": {"type": "object", "additionalProperties": False,
                       "properties": {"psd": {"type": "number", "exclusiveMinimum": 0},
                                      "solvability": {"type": "number", "exclusiveMinimum": 0}}},
    },
}


# ---------------------------------------------------------------- problem files

@dataclass(frozen=True)
class SchurSpec:
    kind: str                       # "blaschke" or "rational"
    zeros: tuple = ()
    constant: complex = 1 + 0j
    numerator: tuple = ()
    denominator: tuple = (1 + 0j,)

    def to_rational(self):
        if self.kind == "blaschke":
            return blaschke(self.zeros, self.constant)
        return ComplexRational(self.numerator, self.denominator)


@dataclass(frozen=True)
class FreeForm:
    T: tuple
    E: tuple
    x_star: tuple


@dataclass(frozen=True)
class ParameterSpec:
    mu: object = "auto"             # complex or "auto"
    h_terms: tuple = ()


@dataclass(frozen=True)
class ProblemFile:
    schur: SchurSpec
    nodes: tuple = None
    free_form: FreeForm = None
    parameter: ParameterSpec = None
    tolerances: tuple = ()          # sorted (key, value) pairs

    @property
    def tolerance(self):
        return dict(self.tolerances)

    def to_data(self):
        s = self.schur.to_rational()
        if self.nodes is not None:
            return ProblemData.from_nodes(self.nodes, s)
        ff = self.free_form
        pair = RealizationPair(np.array(ff.T, dtype=complex), np.array(ff.E, dtype=complex))
        return ProblemData(pair, np.array(ff.x_star, dtype=complex), s)


def _c(pair):
    re, im = pair
    z = complex(re, im)
    if not (math.isfinite(re) and math.isfinite(im)):
        raise ValueError("non-finite complex number")
    return z


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _path(parts):
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in parts)


def parse_problem_text(text, source="<string>"):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise E.ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    errs = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(raw), key=lambda e: list(e.path))
    if errs:
        err = errs[0]
        raise E.ParseError(f"{source}: {_path(err.path)}: {err.message}")
    return _build(raw, source)


def _build(raw, source):
    def fail(path, msg):
        raise E.ValidationError(f"{source}: {_path(path)}: {msg}")

    if ("nodes" in raw) == ("free_form" in raw):
        fail([], "exactly one of 'nodes' and 'free_form' is required")
    try:
        sch = raw["schur"]
        if "blaschke" in sch:
            b = sch["blaschke"]
            schur = SchurSpec("blaschke", tuple(_c(z) for z in b["zeros"]), _c(b.get("constant", [1, 0])))
        else:
            r = sch["rational"]
            schur = SchurSpec("rational", numerator=tuple(_c(z) for z in r["numerator"]),
                              denominator=tuple(_c(z) for z in r.get("denominator", [[1, 0]])))
        s = schur.to_rational()
    except (ValueError, E.InterpolationError) as exc:
        fail(["schur"], str(exc))
    rep = schur_check(s)
    if not rep.is_schur:
        sup = "inf" if math.isinf(rep.boundary_sup) else repr(round(rep.boundary_sup, 10))
        fail(["schur"], f"function fails Schur check, boundary sup {sup}")

    nodes = free = None
    if "nodes" in raw:
        nodes = []
        for i, nd in enumerate(raw["nodes"]):
            try:
                point = _c(nd["point"])
                targets = tuple(_c(t) for t in nd["targets"])
                mult = nd.get("multiplicity", len(targets))
                if abs(point) >= 1:
                    raise ValueError("node outside open unit disk")
                nodes.append(NodeSpec(point, mult, targets))
            except ValueError as exc:
                msg = "node outside open unit disk" if "outside open unit disk" in str(exc) else str(exc)
                fail(["nodes", i], msg)
        nodes = tuple(nodes)
    else:
        ff = raw["free_form"]
        try:
            free = FreeForm(tuple(tuple(_c(z) for z in row) for row in ff["T"]),
                            tuple(_c(z) for z in ff["E"]), tuple(_c(z) for z in ff["x_star"]))
        except ValueError as exc:
            fail(["free_form"], str(exc))

    param = None
    if "parameter" in raw:
        p = raw["parameter"]
        mu = p.get("mu", "auto")
        try:
            mu = mu if mu == "auto" else _c(mu)
            terms = tuple((_c(t["point"]), _c(t["coefficient"])) for t in p.get("h_terms", []))
        except ValueError as exc:
            fail(["parameter"], str(exc))
        for i, (w, _) in enumerate(terms):
            if abs(w) >= 1:
                fail(["parameter", "h_terms", i], "parameter point outside open unit disk")
        param = ParameterSpec(mu, terms)

    problem = ProblemFile(schur, nodes, free, param, tuple(sorted(raw.get("tolerances", {}).items())))
    try:
        problem.to_data()
    except E.DuplicateNode as exc:
        fail(["nodes"], str(exc))
    except (E.InvalidRealization, E.ValidationError) as exc:
        fail(["free_form" if free is not None else "nodes"], str(exc))
    return problem


def parse_problem(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise E.ParseError(f"{path}: {exc.strerror}") from exc
    return parse_problem_text(text, str(path))


def emit_problem(problem):
    """The JSON-ready dict for ``problem``; parsing it gives back an equal ProblemFile."""
    sch = problem.schur
    if sch.kind == "blaschke":
        out = {"schur": {"blaschke": {"zeros": [_pair(z) for z in sch.zeros], "constant": _pair(sch.constant)}}}
    else:
        out = {"schur": {"rational": {"numerator": [_pair(z) for z in sch.numerator],
                                      "denominator": [_pair(z) for z in sch.denominator]}}}
    if problem.nodes is not None:
        out["nodes"] = [{"point": _pair(nd.point), "multiplicity": nd.multiplicity,
                         "targets": [_pair(t) for t in nd.targets]} for nd in problem.nodes]
    else:
        ff = problem.free_form
        out["free_form"] = {"T": [[_pair(z) for z in row] for row in ff.T],
                            "E": [_pair(z) for z in ff.E], "x_star": [_pair(z) for z in ff.x_star]}
    if problem.parameter is not None:
        p = problem.parameter
        out["parameter"] = {"mu": p.mu if p.mu == "auto" else _pair(p.mu),
                            "h_terms": [{"point": _pair(w), "coefficient": _pair(a)} for w, a in p.h_terms]}
    if problem.tolerances:
        out["tolerances"] = dict(problem.tolerances)
    return out


# ---------------------------------------------------------------- reports

@dataclass
class SolveReport:
    status: str
    exit_code: int = 0
    message: str = ""
    command: str = "solve"
    dimension: int = 0
    pick_rank: int = None
    pick_min_eigenvalue: float = None
    min_norm_squared: float = None
    norm_squared: float = None
    mu: list = None
    interpolant: dict = None
    sigma: dict = None
    residuals: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def _rational_json(r):
    return {"numerator": [_pair(z) for z in r.num], "denominator": [_pair(z) for z in r.den]}


def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class Flags:
    mu: object = None               # None means: parameter block, else auto
    seed: int = 0
    samples: int = 50
    grid: tuple = (16, 64)
    report: str = None
    out: str = None


def _certify(report, data, system, theta, interp, flags, sample_h):
    """Fill every certification residual of a nondegenerate instance."""
    rng = np.random.default_rng(flags.seed)
    res = report.residuals
    Q = np.outer(data.realization.E.conj(), data.realization.E) - np.outer(system.N.conj(), system.N)
    res["stein"] = stein_residual(data.realization.T, as_hermitian(Q), system.P) / max(1.0, np.linalg.norm(Q, 2))
    res["theta_identity"] = verify_kernel_identity(theta, data, system, random_disk_pairs(rng, flags.samples))
    res["boundary_j"] = theta.boundary_j_residual
    res["det_unimodularity"] = theta.det_residual
    sigma = extract_sigma(theta, data.s, check=False)
    res["sigma_schur_sup"] = schur_check(sigma).boundary_sup
    res["round_trip"] = float(np.max(np.abs(lft_apply(theta, sigma)(_probe()) - data.s(_probe()))))
    res["interpolation_conditions"] = interp.interpolation_residual
    ctx = RKHSContext(data, system)
    h = sample_h if sample_h is not None and sample_h.terms else ParameterH(sigma, _random_terms(rng, 3))
    orth = verify_orthogonality(ctx, theta, h)
    res["orthogonality"] = orth.residual / max(orth.bound / 1e-9, 1.0)
    check = parametrize(data, system, theta, h)
    res["norm_additivity"] = additivity_residual(check)
    try:
        lhs, rhs = verify_isometry(ctx, theta, _random_terms(rng, 3))
        res["isometry"] = abs(lhs - rhs) / max(lhs, rhs, 1e-300)
    except E.PointOnZeroOfU:
        res["isometry"] = None
    report.sigma = _rational_json(sigma)
    return sigma


def _probe():
    return np.exp(2j * np.pi * np.arange(64) / 64) * 0.9


def _random_terms(rng, count):
    pts = disk_points(rng, count, 0.8, 0.05)
    return [(w, complex(rng.standard_normal(), rng.standard_normal()) / np.sqrt(2)) for w in pts]


def _failed_thresholds(res):
    bad = []
    for key, limit in THRESHOLDS.items():
        val = res.get(key)
        if val is not None and not val <= limit:
            bad.append(f"{key}={val:.3e}")
    return bad


def _resolve_mu(problem, flags):
    if flags.mu is not None:
        return flags.mu
    if problem.parameter is not None:
        return problem.parameter.mu
    return "auto"


def run(command, problem, flags=None):
    """Execute ``command`` on a parsed problem; returns (SolveReport, interpolant or None)."""
    flags = flags or Flags()
    report = SolveReport("solved", command=command)
    try:
        interp = _run(command, problem, flags, report)
    except E.Unsolvable as exc:
        report.status, report.message, interp = "unsolvable", str(exc), None
    except (E.InconsistentData, E.TruncationSingular) as exc:
        report.status, report.message, interp = "inconsistent", str(exc), None
    except E.Unsupported as exc:
        report.status, report.message, interp = "unsupported", str(exc), None
    except (E.SchurCertificationFailure, E.DegenerateDenominator, E.DegenerateTransform) as exc:
        report.status, report.message, interp = "certification_failure", str(exc), None
    except (E.ValidationError, E.ParameterSigmaMismatch, E.MuOnSpectrum, E.PointOnZeroOfU) as exc:
        report.status, report.message, interp = "invalid", str(exc), None
    report.exit_code = EXIT[report.status]
    return report, interp


def _run(command, problem, flags, report):
    tol = problem.tolerance
    data = problem.to_data()
    system = compute_P(data, psd_threshold=tol.get("psd", PSD_THRESHOLD),
                       solvability_threshold=tol.get("solvability", SOLVABILITY_THRESHOLD))
    report.dimension = data.dim
    report.pick_rank = system.rank
    report.pick_min_eigenvalue = system.certificate.min_eigenvalue
    if not system.is_positive_definite:
        if command == "parametrize":
            raise E.Unsupported("parametrization needs a strictly positive Pick matrix")
        interp = degenerate_solve(data, system)
        report.status = "degenerate_solved"
        report.min_norm_squared = interp.min_norm_squared
        report.norm_squared = interp.norm_squared
        report.residuals["interpolation_conditions"] = interp.interpolation_residual
        if command != "check":
            report.interpolant = _rational_json(interp.f)
        return interp

    theta = build_theta(data, system, _resolve_mu(problem, flags), seed=flags.seed)
    report.mu = _pair(theta.mu)
    interp = minimal_interpolant(data, system)
    report.min_norm_squared = interp.min_norm_squared
    h = None
    if command == "parametrize":
        if problem.parameter is None:
            raise E.ValidationError("parametrize needs a 'parameter' block")
        sigma = extract_sigma(theta, data.s)
        h = ParameterH(sigma, problem.parameter.h_terms)
        interp = parametrize(data, system, theta, h)
    report.norm_squared = interp.norm_squared
    _certify(report, data, system, theta, interp, flags, h)
    if command != "check":
        report.interpolant = _rational_json(interp.f)
    bad = _failed_thresholds(report.residuals)
    if command == "check" and bad:
        report.status = "certification_failure"
        report.message = "residuals above threshold: " + ", ".join(bad)
    return interp


def grid_points(radial, angular, radius=0.99):
    r = radius * np.arange(1, radial + 1) / radial
    a = 2 * np.pi * np.arange(angular) / angular
    return (r[:, None] * np.exp(1j * a)[None, :]).ravel()


def grid_csv(f, radial, angular):
    pts = grid_points(radial, angular)
    vals = np.asarray(f(pts))
    lines = ["re,im,f_re,f_im,abs_f"]
    for z, v in zip(pts, vals):
        lines.append(",".join(repr(float(x)) for x in (z.real, z.imag, v.real, v.imag, abs(v))))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT["invalid"], f"{self.prog}: error: {message}\n")


def _mu_arg(text):
    if text == "auto":
        return "auto"
    try:
        re, im = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b' or 'auto', got {text!r}") from None
    return complex(re, im)


def _grid_arg(text):
    try:
        radial, angular = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'R,A' integer counts, got {text!r}") from None
    if radial < 1 or angular < 1:
        raise argparse.ArgumentTypeError("grid counts must be positive")
    return radial, angular


def build_parser():
    parser = _Parser(prog="dbrinterp", description="Tangential interpolation in de Branges-Rovnyak spaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("solve", "parametrize", "check", "eval"):
        p = sub.add_parser(name)
        p.add_argument("problem")
        p.add_argument("--mu", type=_mu_arg, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--report", default=None, help="write the JSON report here instead of stdout")
        if name == "check":
            p.add_argument("--samples", type=int, default=50)
        if name == "eval":
            p.add_argument("--grid", type=_grid_arg, required=True)
            p.add_argument("--out", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    flags = Flags(mu=args.mu, seed=args.seed, samples=getattr(args, "samples", 50),
                  grid=getattr(args, "grid", (16, 64)), report=args.report, out=getattr(args, "out", None))
    try:
        problem = parse_problem(args.problem)
    except (E.ParseError, E.ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT["invalid"]
    command = "solve" if args.command == "eval" else args.command
    report, interp = run(command, problem, flags)
    report.command = args.command
    if args.command == "eval" and interp is not None:
        _write_atomic(flags.out, grid_csv(interp.f, *flags.grid))
    if flags.report:
        _write_atomic(flags.report, report.to_json())
    elif args.command != "eval":
        sys.stdout.write(report.to_json())
    if report.exit_code:
        print(f"{report.status}: {report.message}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
