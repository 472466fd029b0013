"""Command-line front end: ``ptsusy {generate,verify,spectrum,sl2}``.

Exit status: 0 pass, 1 verification failure, 2 configuration error,
3 numerical failure.  Settings come from built-in defaults, then an optional
JSON config file (``--config``), then command-line flags.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import __version__
from .errors import (
    ConstructionError,
    ConvergenceError,
    DomainTooSmallError,
    EvaluationError,
    ParseError,
    SingularShiftError,
)
from .families import (
    HyperbolicFamily,
    OscillatorFamily,
    default_half_width,
    family_pair,
    oracle_potential,
    oracle_psi,
    oscillator_z,
)
from .sl2 import commutator, operator_equal, quadratic_combination_matrix, sl2_generators, t_operator_matrix
from .spectral import richardson_order, verify_energies
from .susy import (
    GeneratingFunction,
    Type2,
    asymptotic_sign_check,
    build_pair,
    classify_zero,
    partner_potentials,
    pt_defect,
    round_trip_error,
    scaled_constraint_residual,
    split_real_imag,
)
from .wavefun import Grid, WavefunctionGrid, psi0, psi1, ratio_check, schrodinger_residual

log = logging.getLogger("ptsusy")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
SCHEMA = 1

CSV_HEADER = [
    "x",
    "Re V+", "Im V+",
    "Re psi0", "Im psi0",
    "Re psi1", "Im psi1",
    "Re W", "Im W",
    "Re W1", "Im W1",
]

# grid sizes when none is given
N_GENERATE = 2001
N_VERIFY = 4001
N_SPECTRUM = 4801
# the m >= 3 oscillator states oscillate like exp(-i b x^(2m+1)/(4m+2)), which
# the three-point scheme resolves only on a much finer grid
N_SPECTRUM_FINE = 96001
DEFAULT_HALF_WIDTH = 8.0


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    family: Optional[str] = None
    wplus: Optional[str] = None
    m: int = 1
    a: float = 2.0
    b: float = 1.0
    alpha: Optional[float] = None
    c: float = 0.0
    A: float = 1.0
    B: float = 0.0
    eps: Optional[float] = None
    x0: float = 0.0
    xmin: Optional[float] = None
    xmax: Optional[float] = None
    n: Optional[int] = None
    tol_eig: float = 5e-4
    tol_res: float = 1e-6
    tol_oracle: float = 1e-10
    targets: Optional[list] = None
    order_check: bool = False
    degree: int = 8
    out: Optional[str] = None
    format: Optional[str] = None

    def validate(self, command: str) -> None:
        if command in ("generate", "verify", "spectrum"):
            if (self.family is None) == (self.wplus is None):
                raise ConfigError("give exactly one of --family or --wplus")
            if self.family not in (None, "oscillator", "hyperbolic"):
                raise ConfigError(f"unknown family {self.family!r}")
        if self.n is not None and (self.n < 5 or self.n % 2 == 0):
            raise ConfigError(f"n must be odd and >= 5, got {self.n}")
        if (self.xmin is None) != (self.xmax is None):
            raise ConfigError("give both --xmin and --xmax, or neither")
        if self.xmin is not None and not self.xmin < self.xmax:
            raise ConfigError("xmin must be below xmax")
        for name in ("tol_eig", "tol_res", "tol_oracle"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.format not in (None, "csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")

    def echo(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def load_config(args: dict) -> RunConfig:
    """Defaults, overridden by the config file, overridden by flags."""
    values = {}
    path = args.pop("config", None)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(doc) - _FIELDS
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(doc)
    values.update({k: v for k, v in args.items() if k in _FIELDS})
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# -- building the problem ------------------------------------------------------

@dataclass
class Setup:
    pair: object
    family: object = None
    half_width: float = DEFAULT_HALF_WIDTH


def _family(cfg: RunConfig):
    if cfg.family == "oscillator":
        if cfg.m == 0:
            alpha = 0.5 if cfg.alpha is None else cfg.alpha
            if cfg.eps is not None and abs(cfg.eps - 4 * alpha) > 1e-12 * max(1.0, abs(cfg.eps)):
                raise ConstructionError(f"the m = 0 oscillator has eps = 4 alpha = {4 * alpha!r}; got eps = {cfg.eps!r}")
            return OscillatorFamily.pt_oscillator(alpha, cfg.c)
        fam = OscillatorFamily(int(cfg.m), cfg.a, cfg.b)
        if cfg.eps is not None and cfg.eps != fam.eps:
            raise ConstructionError(f"W+ vanishes at 0, which forces eps = {fam.eps!r}; got eps = {cfg.eps!r}")
        return fam
    alpha = 1.0 if cfg.alpha is None else cfg.alpha
    if cfg.B == 0:
        return HyperbolicFamily(cfg.A, alpha, 0.0, cfg.eps)
    return HyperbolicFamily(cfg.A, alpha, cfg.B, 1.0 if cfg.eps is None else cfg.eps)


def build_setup(cfg: RunConfig) -> Setup:
    if cfg.family is not None:
        fam = _family(cfg)
        pair = family_pair(fam)
        return Setup(pair, fam, default_half_width(fam))
    gen = GeneratingFunction.from_expression(cfg.wplus, cfg.x0)
    zc = classify_zero(gen)
    eps = cfg.eps
    if eps is None and not isinstance(zc, Type2):
        eps = 1.0
    return Setup(build_pair(gen, eps), None, DEFAULT_HALF_WIDTH)


def make_grid(cfg: RunConfig, setup: Setup, default_n: int) -> Grid:
    n = cfg.n if cfg.n is not None else default_n
    if cfg.xmin is not None:
        return Grid(cfg.xmin, cfg.xmax, n)
    return Grid.symmetric(setup.pair.x0, setup.half_width, n)


def _regularization(pair) -> str:
    return "Type2" if pair.is_type2 else "Type1"


# -- output helpers ------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [_jsonable(float(v.real)), _jsonable(float(v.imag))]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def dumps(doc: dict) -> str:
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return now.strftime("%Y-%m-%dT%H:%M:%SZ")


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


@dataclass
class Check:
    name: str
    passed: bool
    measured: object
    tolerance: object

    def record(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "measured": self.measured,
            "tolerance": self.tolerance,
        }


def _at_most(name, measured, tol) -> Check:
    return Check(name, bool(measured <= tol), float(measured), tol)


@dataclass
class VerifyReport:
    command: str
    checks: list
    config: dict
    results: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        return dumps({
            "schema": SCHEMA,
            "command": self.command,
            "ok": self.ok,
            "checks": [c.record() for c in self.checks],
            "results": self.results,
            "config": self.config,
            "provenance": {"version": __version__, "timestamp": _timestamp()},
        })

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "status", "measured", "tolerance"])
        for c in self.checks:
            r = _jsonable(c.record())
            w.writerow([r["name"], r["status"], json.dumps(r["measured"]), json.dumps(r["tolerance"])])
        return buf.getvalue()

    def emit(self, cfg: RunConfig) -> int:
        _write(self.to_csv() if cfg.format == "csv" else self.to_json(), cfg.out)
        return EXIT_OK if self.ok else EXIT_FAIL


# -- subcommands -----------------------------------------------------------------

def generation_columns(setup: Setup, grid: Grid) -> dict:
    pair = setup.pair
    x = grid.x
    s0, s1 = psi0(pair, grid), psi1(pair, grid)
    s0.check_decay()
    s1.check_decay()
    W, W1 = pair.jets(x, 0)
    vp = partner_potentials(pair).vplus(x)
    return {"x": x, "V+": vp, "psi0": s0.values, "psi1": s1.values, "W": W.v, "W1": W1.v}


def cmd_generate(cfg: RunConfig) -> int:
    setup = build_setup(cfg)
    grid = make_grid(cfg, setup, N_GENERATE)
    cols = generation_columns(setup, grid)
    pair = setup.pair
    meta = {
        "schema": SCHEMA,
        "eps": pair.eps,
        "x0": pair.x0,
        "type": _regularization(pair),
        "normalization": WavefunctionGrid.normalization,
        "grid": {"xmin": grid.xmin, "xmax": grid.xmax, "n": grid.n},
        "source": pair.gen.label,
    }
    if cfg.format == "json":
        doc = dict(meta)
        doc["columns"] = {
            k: v.real.tolist() if k == "x" else {"re": v.real.tolist(), "im": v.imag.tolist()}
            for k, v in cols.items()
        }
        _write(dumps(doc), cfg.out)
        return EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    parts = [cols["x"]]
    for key in ("V+", "psi0", "psi1", "W", "W1"):
        parts += [cols[key].real, cols[key].imag]
    for row in zip(*parts):
        w.writerow([repr(float(v)) for v in row])
    out = cfg.out or "ptsusy_generate.csv"
    _write(buf.getvalue(), out)
    if out != "-":
        _write(dumps(meta), os.path.splitext(out)[0] + ".json")
    return EXIT_OK


def verify_checks(cfg: RunConfig, setup: Setup) -> tuple[list, dict]:
    pair = setup.pair
    fam = setup.family
    grid = make_grid(cfg, setup, N_VERIFY)
    probe = np.linspace(grid.xmin, grid.xmax, 1001)
    V = partner_potentials(pair).vplus
    checks = [
        _at_most("constraint_residual", scaled_constraint_residual(pair, probe), 1e-9),
        _at_most("round_trip", round_trip_error(pair, probe), 1e-10),
    ]
    # PT symmetry is about x0, so probe points symmetric about it
    hw = min(pair.x0 - grid.xmin, grid.xmax - pair.x0)
    sym = np.linspace(pair.x0 - hw, pair.x0 + hw, 1001)
    vscale = max(1.0, float(np.max(np.abs(V(sym)))))
    checks.append(_at_most("pt_defect", pt_defect(V, pair.x0, sym) / vscale, 1e-12))
    signs = asymptotic_sign_check(split_real_imag(pair), hw)
    checks.append(Check("sign_f", signs.f_ok, list(signs.f_values), None))
    checks.append(Check("sign_f1", signs.f1_ok, list(signs.f1_values), None))

    s0, s1 = psi0(pair, grid), psi1(pair, grid)
    checks.append(_at_most("decay_psi0", s0.boundary_ratio, 1e-12))
    checks.append(_at_most("decay_psi1", s1.boundary_ratio, 1e-12))
    checks.append(_at_most("residual_psi0", schrodinger_residual(V, s0), cfg.tol_res))
    checks.append(_at_most("residual_psi1", schrodinger_residual(V, s1), cfg.tol_res))

    if fam is not None:
        w = min(6.0, hw)
        xs = np.linspace(-w, w, 201)
        vo = oracle_potential(fam, xs)
        rel = float(np.max(np.abs(V(xs) - vo) / np.maximum(1.0, np.abs(vo))))
        checks.append(_at_most("oracle_vplus", rel, cfg.tol_oracle))
        has_states = not (isinstance(fam, OscillatorFamily) and fam.m == 0)
        if has_states:
            for level, s in ((0, s0), (1, s1)):
                o = WavefunctionGrid(grid, oracle_psi(fam, grid.x, level), s.energy)
                checks.append(_at_most(f"oracle_residual_psi{level}", schrodinger_residual(V, o), cfg.tol_res))
                checks.append(_at_most(f"oracle_ratio_psi{level}", ratio_check(s, o, lambda x: np.ones_like(x)), 1e-8))
        if isinstance(fam, OscillatorFamily) and fam.m >= 1:
            checks.append(_at_most("ratio_z", ratio_check(s1, s0, lambda x: oscillator_z(fam, x)), 1e-8))
    results = {"eps": pair.eps, "x0": pair.x0, "type": _regularization(pair),
               "grid": {"xmin": grid.xmin, "xmax": grid.xmax, "n": grid.n}}
    return checks, results


def cmd_verify(cfg: RunConfig) -> int:
    setup = build_setup(cfg)
    checks, results = verify_checks(cfg, setup)
    return VerifyReport("verify", checks, cfg.echo(), results).emit(cfg)


def cmd_spectrum(cfg: RunConfig) -> int:
    setup = build_setup(cfg)
    pair = setup.pair
    fam = setup.family
    fine = isinstance(fam, OscillatorFamily) and fam.m >= 3
    grid = make_grid(cfg, setup, N_SPECTRUM_FINE if fine else N_SPECTRUM)
    V = partner_potentials(pair).vplus
    targets = cfg.targets if cfg.targets is not None else [0.0, pair.eps]
    report = verify_energies(V, targets, grid, tol_eig=cfg.tol_eig, tol_res=cfg.tol_res)
    checks, per_target = [], []
    for t in report.checks:
        per_target.append({
            "target": t.target,
            "eigenvalue": t.eigenvalue,
            "error": t.error,
            "abs_imag": t.imag,
            "residual": t.residual,
            "iterations": t.iterations,
            "converged": t.converged,
        })
        checks.append(Check(f"eigenvalue_{t.target!r}", t.ok, max(t.error, t.imag), cfg.tol_eig))
    if cfg.order_check:
        grids = [grid, grid.refined(), grid.refined().refined()]
        for t in report.checks:
            try:
                order = richardson_order(V, t.target, grids, tol_res=cfg.tol_res)
            except ConvergenceError as exc:
                log.warning("order check at %r: %s", t.target, exc)
                checks.append(Check(f"order_{t.target!r}", False, None, [1.8, 2.2]))
                continue
            ok = order == "converged" or 1.8 <= order <= 2.2
            checks.append(Check(f"order_{t.target!r}", ok, order, [1.8, 2.2]))
    results = {"eps": pair.eps, "targets": per_target,
               "grid": {"xmin": grid.xmin, "xmax": grid.xmax, "n": grid.n}}
    return VerifyReport("spectrum", checks, cfg.echo(), results).emit(cfg)


def cmd_sl2(cfg: RunConfig) -> int:
    D = int(cfg.degree)
    if D < 6:
        raise ConfigError(f"degree must be >= 6, got {D}")
    a, b = cfg.a, cfg.b
    T = t_operator_matrix(a, b, D)
    Q = quadratic_combination_matrix(a, b, D)
    _, diff = operator_equal(T, Q, D - 2, 1e-12)
    _, diff_second_only = operator_equal(T, quadratic_combination_matrix(a, b, D, first_order=False), D - 2, 1e-12)
    Jp, J0, Jm = sl2_generators(1, D)
    # products of two generators are exact on degree <= D - 2 only
    k = D - 2
    c1 = operator_equal(commutator(J0, Jp), Jp, k, 1e-13)[1]
    c2 = operator_equal(commutator(J0, Jm), -1 * Jm, k, 1e-13)[1]
    # with these generators [J+, J-] = -2 J0
    c3 = operator_equal(commutator(Jp, Jm), -2 * J0, k, 1e-13)[1]
    # span{1, z} is invariant and T acts there as diag(0, a)
    block = T.matrix[:, :2]
    leak = float(np.max(np.abs(block[2:])))
    eig = np.sort_complex(np.linalg.eigvals(block[:2]))
    eig_err = float(np.max(np.abs(eig - np.sort_complex(np.array([0.0, a], dtype=complex)))))
    checks = [
        _at_most("identity", diff, 1e-12),
        _at_most("commutator_J0_Jplus", c1, 1e-13),
        _at_most("commutator_J0_Jminus", c2, 1e-13),
        _at_most("commutator_Jplus_Jminus", c3, 1e-13),
        _at_most("invariant_span", leak, 0.0),
        _at_most("eigenvalues_span", eig_err, 0.0),
    ]
    results = {"discrepancy": diff, "discrepancy_without_drift": diff_second_only,
               "eigenvalues": [complex(e) for e in eig], "input_degree": D - 2}
    return VerifyReport("sl2", checks, cfg.echo(), results).emit(cfg)


COMMANDS = {"generate": cmd_generate, "verify": cmd_verify, "spectrum": cmd_spectrum, "sl2": cmd_sl2}


# -- argument parsing ------------------------------------------------------------

def _global_flags(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--out", default=S, help="output path ('-' for stdout)")
    p.add_argument("--config", default=S, help="JSON file with default settings")
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("-v", "--verbose", action="store_true", default=S)


def _problem_flags(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    src = p.add_mutually_exclusive_group()
    src.add_argument("--family", choices=("oscillator", "hyperbolic"), default=S)
    src.add_argument("--wplus", default=S, help="generating function W+(x), e.g. '2*x + i*0.5'")
    for name, typ in (("m", int), ("a", float), ("b", float), ("alpha", float), ("c", float),
                      ("A", float), ("B", float), ("eps", float), ("x0", float),
                      ("xmin", float), ("xmax", float), ("n", int)):
        p.add_argument(f"--{name}", type=typ, default=S)
    for name in ("tol-eig", "tol-res", "tol-oracle"):
        p.add_argument(f"--{name}", type=float, default=S)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptsusy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("generate", "sample V+, psi0, psi1, W and W1 on a grid"),
                        ("verify", "run the construction checks"),
                        ("spectrum", "confirm the known energies with a finite-difference solve")):
        p = sub.add_parser(name, help=help_)
        _global_flags(p)
        _problem_flags(p)
        if name == "spectrum":
            p.add_argument("--targets", type=float, nargs="+", default=argparse.SUPPRESS)
            p.add_argument("--order-check", action="store_true", default=argparse.SUPPRESS)
    p = sub.add_parser("sl2", help="check the sl(2) form of the m = 1 gauge-transformed operator")
    _global_flags(p)
    p.add_argument("--a", type=float, default=argparse.SUPPRESS)
    p.add_argument("--b", type=float, default=argparse.SUPPRESS)
    p.add_argument("--degree", type=int, default=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    verbose = args.pop("verbose", False)
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        cfg.validate(command)
        return COMMANDS[command](cfg)
    except DomainTooSmallError as exc:
        print(f"ptsusy: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ParseError, ConstructionError) as exc:
        print(f"ptsusy: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EvaluationError, SingularShiftError, ConvergenceError, FloatingPointError) as exc:
        print(f"ptsusy: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"ptsusy: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
