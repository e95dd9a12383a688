"""
Command-line front end.

    scatlab --config run.json phase-shifts
    scatlab --config run.json spectral-shift
    scatlab --config run.json levinson
    scatlab --config run.json heat-check --t 0.5,0.2,0.1,0.05
    scatlab --config run.json coefficients --max-j 3

Exit codes: 0 verified, 2 verification failed, 3 inconclusive resonance,
4 configuration error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import asymptotics, levinson, potential, radial, scattering
from .errors import (
    ConfigurationError,
    DomainError,
    InconclusiveResonanceError,
    ScatlabError,
    UnsupportedProfileError,
)

__all__ = ["RunConfig", "parse_config", "main"]

EXIT_OK = 0
EXIT_FAILED = 2
EXIT_INCONCLUSIVE = 3
EXIT_CONFIG = 4

_POTENTIAL_PARAMS = {
    "zero": (),
    "square_well": ("V0", "a"),
    "gaussian": ("A", "w"),
    "poschl_teller": ("s",),
    "tabulated": ("r", "values"),
}
_GRID_KEYS = {"k_min": float, "k_max": float, "points_per_decade": int}
_SOLVER_KEYS = {
    "r_max_factor": float,
    "step": float,
    "kh_max": float,
    "l_max": "l_max",
    "l_tail_tol": float,
    "branch_tail_tol": float,
    "resonance_tol": float,
    "eigen_tol": float,
}
_TOP_KEYS = ("n", "potential", "grid", "solver", "quadrature", "output")


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration with every default resolved."""

    n: int
    potential: dict
    settings: radial.SolverSettings
    output_format: str | None = None
    output_path: str | None = None
    _pot: potential.Potential | None = field(default=None, repr=False, compare=False)

    def build_potential(self) -> potential.Potential:
        return self._pot

    def effective(self) -> dict:
        """The configuration as it is actually used, in the input schema."""
        s = self.settings
        return {
            "n": self.n,
            "potential": dict(self.potential),
            "grid": {"k_min": s.k_min, "k_max": s.k_max, "points_per_decade": s.points_per_decade},
            "solver": {
                "r_max_factor": s.r_max_factor,
                "step": s.step,
                "kh_max": s.kh_max,
                "l_max": "auto" if s.l_max is None else s.l_max,
                "l_tail_tol": s.l_tail_tol,
                "branch_tail_tol": s.branch_tail_tol,
                "resonance_tol": s.resonance_tol,
                "eigen_tol": s.eigen_tol,
            },
            "quadrature": {"tail_fit": "on" if s.tail_fit else "off"},
            "output": {"format": self.output_format, "path": self.output_path},
        }


# ------------------------------------------------------------------ parsing
def _require_mapping(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigurationError(f"{path}: expected an object")
    return value


def _reject_unknown(block: dict, allowed, path: str) -> None:
    for key in block:
        if key not in allowed:
            raise ConfigurationError(f"{path}.{key}: unknown key")


def _number(value: Any, path: str, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{path}: expected a number")
    if kind is int:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigurationError(f"{path}: expected an integer")
        return int(value)
    if not math.isfinite(value):
        raise ConfigurationError(f"{path}: must be finite")
    return float(value)


def _parse_potential(block: Any, n: int) -> tuple[dict, potential.Potential]:
    block = _require_mapping(block, "potential")
    kind = block.get("type")
    if kind not in _POTENTIAL_PARAMS:
        raise ConfigurationError(f"potential.type: expected one of {sorted(_POTENTIAL_PARAMS)}")
    names = _POTENTIAL_PARAMS[kind]
    _reject_unknown(block, ("type", "rho", "dimension") + names, "potential")
    if "dimension" in block and _number(block["dimension"], "potential.dimension", int) != n:
        raise ConfigurationError("potential.dimension: does not match n")
    rho = _number(block.get("rho", potential.DEFAULT_RHO), "potential.rho")
    clean: dict = {"type": kind}
    if kind == "tabulated":
        for name in names:
            arr = block.get(name)
            if not isinstance(arr, list):
                raise ConfigurationError(f"potential.{name}: expected a list of numbers")
            clean[name] = [_number(v, f"potential.{name}[{i}]") for i, v in enumerate(arr)]
    else:
        for name in names:
            if name not in block:
                raise ConfigurationError(f"potential.{name}: required for {kind}")
            clean[name] = _number(block[name], f"potential.{name}")
    clean["rho"] = rho
    if kind == "zero":
        pot = potential.zero(n, rho)
    elif kind == "square_well":
        pot = potential.square_well(n, clean["V0"], clean["a"], rho)
    elif kind == "gaussian":
        pot = potential.gaussian(n, clean["A"], clean["w"], rho)
    elif kind == "poschl_teller":
        if n != 1:
            raise ConfigurationError("potential.type: poschl_teller requires n = 1")
        pot = potential.poschl_teller(clean["s"], rho)
    else:
        pot = potential.tabulated(n, clean["r"], clean["values"], rho)
    return clean, pot


def parse_config(text: str) -> RunConfig:
    """Strictly parse a JSON run configuration; unknown keys are errors."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    raw = _require_mapping(raw, "config")
    _reject_unknown(raw, _TOP_KEYS, "config")
    if "n" not in raw:
        raise ConfigurationError("config.n: required")
    n = _number(raw["n"], "config.n", int)
    if not 1 <= n <= 5:
        raise ConfigurationError("config.n: must lie in 1..5")
    if "potential" not in raw:
        raise ConfigurationError("config.potential: required")
    pot_block, pot = _parse_potential(raw["potential"], n)

    kwargs: dict = {}
    grid = _require_mapping(raw.get("grid", {}), "grid")
    _reject_unknown(grid, _GRID_KEYS, "grid")
    for key, kind in _GRID_KEYS.items():
        if key in grid:
            kwargs[key] = _number(grid[key], f"grid.{key}", kind)
    solver = _require_mapping(raw.get("solver", {}), "solver")
    _reject_unknown(solver, _SOLVER_KEYS, "solver")
    for key, kind in _SOLVER_KEYS.items():
        if key not in solver:
            continue
        if kind == "l_max":
            val = solver[key]
            kwargs[key] = None if val == "auto" else _number(val, "solver.l_max", int)
        else:
            kwargs[key] = _number(solver[key], f"solver.{key}", kind)
    quad = _require_mapping(raw.get("quadrature", {}), "quadrature")
    _reject_unknown(quad, ("tail_fit",), "quadrature")
    if "tail_fit" in quad:
        val = quad["tail_fit"]
        if val not in ("on", "off", True, False):
            raise ConfigurationError("quadrature.tail_fit: expected 'on' or 'off'")
        kwargs["tail_fit"] = val in ("on", True)
    out = _require_mapping(raw.get("output", {}), "output")
    _reject_unknown(out, ("format", "path"), "output")
    fmt = out.get("format")
    if fmt is not None and fmt not in ("csv", "json"):
        raise ConfigurationError("output.format: expected 'csv' or 'json'")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigurationError("output.path: expected a string")
    settings = radial.SolverSettings(**kwargs)
    return RunConfig(n, pot_block, settings, fmt, path, pot)


# ------------------------------------------------------------ serialization
def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    return obj


def _cell(x) -> str:
    return "" if x is None else _fmt(x)


def _dump_json(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")
    return buf.getvalue()


# ----------------------------------------------------------------- commands
def cmd_phase_shifts(cfg: RunConfig, fmt: str) -> tuple[str, int]:
    pot = cfg.build_potential()
    tables, _ = scattering.channel_tables(pot, cfg.settings)
    if fmt == "json":
        body = {
            "config": cfg.effective(),
            "channels": [
                {"l": t.wave.ell, "lambda": t.lam, "delta": t.delta, "delta_prime": t.dprime}
                for t in sorted(tables, key=lambda t: t.wave.ell)
            ],
        }
        return _dump_json(body), EXIT_OK
    rows = []
    for t in sorted(tables, key=lambda t: t.wave.ell):
        for lam, d, dp in zip(t.lam, t.delta, t.dprime):
            rows.append((lam, str(t.wave.ell), d, dp))
    return _dump_csv(("lambda", "l", "delta", "delta_prime"), rows), EXIT_OK


def cmd_spectral_shift(cfg: RunConfig, fmt: str) -> tuple[str, int]:
    prof = scattering.build_profile(cfg.build_potential(), cfg.settings)
    arg = np.angle(prof.det)
    if fmt == "json":
        body = {
            "config": cfg.effective(),
            "lambda": prof.lam,
            "xi": prof.xi,
            "xi_prime": prof.xi_prime,
            "trace_imag": prof.trace.imag,
            "arg_det_s": arg,
        }
        return _dump_json(body), EXIT_OK
    rows = zip(prof.lam, prof.xi, prof.xi_prime, prof.trace.imag, arg)
    return _dump_csv(("lambda", "xi", "xi_prime", "trace_imag", "arg_det_s"), rows), EXIT_OK


def cmd_levinson(cfg: RunConfig, fmt: str) -> tuple[str, int]:
    pot = cfg.build_potential()
    try:
        rep = levinson.verify_levinson(pot, cfg.settings)
    except InconclusiveResonanceError:
        raise
    except (ScatlabError, ArithmeticError) as exc:
        body = {"config": cfg.effective(), "error": type(exc).__name__, "message": str(exc), "passed": False}
        return _render_report(body, fmt), EXIT_FAILED
    d = rep.to_dict()
    d["config"] = cfg.effective()
    return _render_report(d, fmt), EXIT_OK if rep.passed else EXIT_FAILED


def cmd_heat_check(cfg: RunConfig, fmt: str, t_list) -> tuple[str, int]:
    pot = cfg.build_potential()
    res = levinson.heat_trace_check(pot, t_list, cfg.settings)
    if fmt == "csv":
        rows = [(r.t, r.lhs, r.rhs, r.difference) for r in res.rows]
        return _dump_csv(("t", "lhs", "rhs", "difference"), rows), EXIT_OK
    body = {
        "config": cfg.effective(),
        "rows": [asdict(r) for r in res.rows],
        "order": res.order,
        "expected_order": res.expected_order,
    }
    return _dump_json(body), EXIT_OK


def cmd_coefficients(cfg: RunConfig, fmt: str, max_j: int) -> tuple[str, int]:
    pot = cfg.build_potential()
    n = cfg.n
    rows = []
    for j in range(1, max_j + 1):
        try:
            closed = asymptotics.heat_coefficient_closed(pot, n, j)
        except UnsupportedProfileError:
            closed = None
        try:
            general = asymptotics.heat_coefficient_general(pot, n, j)
        except UnsupportedProfileError:
            general = None
        rows.append({"j": j, "a_closed": closed, "a_general": general})
    data = asymptotics.build_asymptotics(pot, n)
    if fmt == "csv":
        csv_rows = [(str(r["j"]), _cell(r["a_closed"]), _cell(r["a_general"])) for r in rows]
        return _dump_csv(("j", "a_closed", "a_general"), csv_rows), EXIT_OK
    body = {
        "config": cfg.effective(),
        "n": n,
        "a": [r["a_closed"] if r["a_closed"] is not None else r["a_general"] for r in rows],
        "coefficients": rows,
        "beta_n": data.beta,
        "c": [[c.real, c.imag] for c in data.c],
        "C": [[c.real, c.imag] for c in data.C],
        "moments": {"int_V": potential.moment_power(pot, 1) if not pot.is_zero else 0.0},
    }
    return _dump_json(body), EXIT_OK


def _flatten(d: dict, prefix: str = "") -> list[tuple[str, Any]]:
    out = []
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.extend(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out.append((key, json.dumps(_jsonable(v))))
        else:
            out.append((key, v))
    return out


def _render_report(body: dict, fmt: str) -> str:
    if fmt == "json":
        return _dump_json(body)
    rows = []
    for k, v in _flatten(_jsonable(body)):
        if isinstance(v, bool) or v is None:
            rows.append((k, json.dumps(v)))
        elif isinstance(v, (int, float)):
            rows.append((k, _fmt(v) if isinstance(v, float) else str(v)))
        else:
            rows.append((k, json.dumps(v) if "," in str(v) or '"' in str(v) else str(v)))
    return _dump_csv(("key", "value"), rows)


# --------------------------------------------------------------------- main
def _parse_t_list(text: str) -> list[float]:
    try:
        ts = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"--t: {exc}") from exc
    if not ts:
        raise ConfigurationError("--t: empty list")
    return ts


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=default, help="JSON run configuration")
    p.add_argument("--output", default=default, help="output file (default: config output.path, else stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=default, help="output format")
    p.add_argument("--threads", type=int, default=default, help="worker threads for the channel sweep")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scatlab", description="Phase shifts, Levinson identity and heat-trace checks.")
    _global_flags(p, suppress=False)
    # the same flags are accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("phase-shifts", parents=[common], help="phase-shift table, l-major then lambda")
    sub.add_parser("spectral-shift", parents=[common], help="xi, xi', Im Tr(S*S') and arg det S per energy")
    sub.add_parser("levinson", parents=[common], help="verify the Levinson identity")
    hc = sub.add_parser("heat-check", parents=[common], help="small-t heat-trace expansion check")
    hc.add_argument("--t", required=True, help="comma-separated decreasing t values")
    co = sub.add_parser("coefficients", parents=[common], help="heat coefficients and high-energy data")
    co.add_argument("--max-j", type=int, default=3)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if args.config is None:
        print("scatlab: configuration error: --config is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigurationError("--threads must be >= 1")
            import numba

            numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
        default_fmt = "csv" if args.command in ("phase-shifts", "spectral-shift") else "json"
        fmt = args.format or cfg.output_format or default_fmt
        path = args.output or cfg.output_path
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if args.command == "phase-shifts":
                text, code = cmd_phase_shifts(cfg, fmt)
            elif args.command == "spectral-shift":
                text, code = cmd_spectral_shift(cfg, fmt)
            elif args.command == "levinson":
                text, code = cmd_levinson(cfg, fmt)
            elif args.command == "heat-check":
                text, code = cmd_heat_check(cfg, fmt, _parse_t_list(args.t))
            else:
                if not 1 <= args.max_j <= asymptotics.MAX_GENERAL_ORDER:
                    raise ConfigurationError(f"--max-j must lie in 1..{asymptotics.MAX_GENERAL_ORDER}")
                text, code = cmd_coefficients(cfg, fmt, args.max_j)
        if path:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except InconclusiveResonanceError as exc:
        print(f"scatlab: inconclusive resonance: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ConfigurationError, DomainError, OSError) as exc:
        print(f"scatlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ScatlabError, ArithmeticError, ValueError) as exc:
        print(f"scatlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    return code


if __name__ == "__main__":
    sys.exit(main())
