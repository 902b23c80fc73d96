"""Command-line front end.

Subcommands cover every pipeline stage:

    variance    phase-variance breakdown for one parameter set
    criteria    damping time, critical length, critical mass, regime
    sweep       geometric grid over one parameter, per-row records
    oracle      Monte Carlo and quadrature verification suite
    covariance  sampled noise-field two-point function vs hbar G / r
    simulate    ensemble phase variance vs the analytic value

Inputs are SI (kg, m, s) unless the dimensionless flags --mu / --rho /
--tau-max are used. A config file (flat ``key = value`` lines, or JSON if
the file starts with ``{``) can supply any flag's value; explicit flags
win. Results go to stdout or --output as CSV or JSON with floats printed
to 17 significant digits, which round-trips IEEE doubles exactly.

Exit codes: 0 success, 1 verification subcommand found a failing check,
2 validation or usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .criteria import (
    BracketError,
    Threshold,
    classify,
    critical_length,
    critical_mass,
    damping_time,
    damping_time_short,
)
from .noisefield import (
    ConfigurationError,
    FieldGrid,
    default_workers,
    measured_covariance,
    simulate_phase_variance,
)
from .oracle import (
    erf_identity_check,
    i4_closed_form,
    i6_closed_form,
    mc_i4_spatial,
    mc_i6_spatial,
    sn_cancellation_check,
)
from .units import DimensionlessParams, make_params, nondimensionalize, spreading_width
from .variance import QuadratureError, phase_variance

__all__ = ["RunConfig", "run", "parse_config", "emit", "console_entry"]


class _UsageError(ValueError):
    """Bad flags or config: reported on stderr with exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs for one subcommand run."""

    subcommand: str
    params: dict
    output_format: str
    output_path: str | None


# flag schema per subcommand: key -> type ("seps" is a float list)
_SCHEMAS: dict[str, dict[str, object]] = {
    "variance": {
        "mass": float, "width": float, "separation": float, "horizon": float,
        "mu": float, "rho": float, "tau_max": float,
    },
    "criteria": {
        "mass": float, "width": float, "separation": float,
        "density": float, "threshold": float,
    },
    "sweep": {
        "param": str, "start": float, "stop": float, "num": int,
        "mass": float, "width": float, "separation": float, "threshold": float,
    },
    "oracle": {"samples": int, "seed": int, "workers": int},
    "covariance": {
        "grid_n": int, "box": float, "dt": float, "realizations": int,
        "separations": "seps", "seed": int,
    },
    "simulate": {
        "mass": float, "width": float, "separation": float, "horizon": float,
        "grid_n": int, "box": float, "steps": int, "members": int,
        "seed": int, "workers": int,
    },
}
_COMMON_KEYS = {"format": str, "output": str}

# physics-symbol aliases accepted in config files
_ALIASES = {"m": "mass", "a": "width", "R": "separation", "T": "horizon"}

_DEFAULTS: dict[str, dict[str, object]] = {
    "variance": {},
    "criteria": {"threshold": math.pi**2},
    "sweep": {"threshold": math.pi**2},
    "oracle": {"samples": 10**6, "seed": 42},
    "covariance": {
        "grid_n": 64, "box": 1.0, "dt": 1.0, "realizations": 400, "seed": 42,
    },
    "simulate": {"grid_n": 64, "steps": 16, "members": 256, "seed": 42},
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gravphase",
        description="Gravitational decoherence of superposed wavepackets.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="config file (key = value lines, or JSON)")
        sp.add_argument("--format", choices=["csv", "json"], help="output format")
        sp.add_argument("--output", help="output path (default stdout)")
        return sp

    sp = add("variance", "phase-variance breakdown")
    sp.add_argument("--mass", type=float, help="particle mass [kg]")
    sp.add_argument("--width", type=float, help="initial packet width a [m]")
    sp.add_argument("--separation", type=float, help="peak separation R [m]")
    sp.add_argument("--horizon", type=float, help="time horizon T [s]")
    sp.add_argument("--mu", type=float, help="G m^3 a / hbar^2")
    sp.add_argument("--rho", type=float, help="R / a")
    sp.add_argument("--tau-max", dest="tau_max", type=float, help="hbar T / m a^2")

    sp = add("criteria", "decoherence time, critical length and mass, regime")
    sp.add_argument("--mass", type=float, help="particle mass [kg]")
    sp.add_argument("--width", type=float, help="initial packet width a [m]")
    sp.add_argument("--separation", type=float, help="peak separation R [m]")
    sp.add_argument("--density", type=float, help="material density [kg/m^3]")
    sp.add_argument("--threshold", type=float, help="variance threshold (default pi^2)")

    sp = add("sweep", "geometric sweep of mass, width, or separation")
    sp.add_argument("--param", choices=["mass", "width", "separation"], help="swept parameter")
    sp.add_argument("--start", type=float, help="first value (SI)")
    sp.add_argument("--stop", type=float, help="last value (SI)")
    sp.add_argument("--num", type=int, help="number of grid points")
    sp.add_argument("--mass", type=float, help="fixed mass [kg]")
    sp.add_argument("--width", type=float, help="fixed width [m]")
    sp.add_argument("--separation", type=float, help="fixed separation [m]")
    sp.add_argument("--threshold", type=float, help="variance threshold (default pi^2)")

    sp = add("oracle", "run the Monte Carlo / quadrature verification suite")
    sp.add_argument("--samples", type=int, help="MC samples per integral (default 1e6)")
    sp.add_argument("--seed", type=int, help="RNG seed (default 42)")
    sp.add_argument("--workers", type=int, help="worker threads")

    sp = add("covariance", "measure the sampled noise-field covariance")
    sp.add_argument("--grid-n", dest="grid_n", type=int, help="grid points per axis")
    sp.add_argument("--box", type=float, help="box length [m]")
    sp.add_argument("--dt", type=float, help="time step [s]")
    sp.add_argument("--realizations", type=int, help="field realizations (>= 100)")
    sp.add_argument("--separations", help="comma-separated separations [m]")
    sp.add_argument("--seed", type=int, help="RNG seed (default 42)")

    sp = add("simulate", "ensemble phase variance vs the analytic value")
    sp.add_argument("--mass", type=float, help="particle mass [kg]")
    sp.add_argument("--width", type=float, help="initial packet width a [m]")
    sp.add_argument("--separation", type=float, help="peak separation R [m]")
    sp.add_argument("--horizon", type=float, help="time horizon T [s]")
    sp.add_argument("--grid-n", dest="grid_n", type=int, help="grid points per axis")
    sp.add_argument("--box", type=float, help="box length [m] (default 8 max(R, C1(T)^0.5))")
    sp.add_argument("--steps", type=int, help="time steps")
    sp.add_argument("--members", type=int, help="ensemble members (>= 64)")
    sp.add_argument("--seed", type=int, help="RNG seed (default 42)")
    sp.add_argument("--workers", type=int, help="worker threads")
    return p


def _coerce(key: str, value, target) -> object:
    if target == "seps":
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        return [float(tok) for tok in str(value).split(",") if tok.strip()]
    if target is str:
        return str(value)
    try:
        if target is int:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return float(value)
    except (TypeError, ValueError):
        raise _UsageError(f"invalid value for config key '{key}': {value!r}") from None


def _read_config_file(path: str, schema: dict) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _UsageError(f"cannot read config file: {e}") from None
    raw: dict = {}
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise _UsageError(f"malformed JSON config: {e}") from None
        if not isinstance(raw, dict):
            raise _UsageError("JSON config must be an object")
    else:
        for ln, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise _UsageError(f"malformed config line {ln}: {line.strip()!r}")
            key, _, value = body.partition("=")
            raw[key.strip()] = value.strip()
    out: dict = {}
    for key, value in raw.items():
        canonical = _ALIASES.get(key, key).replace("-", "_")
        if canonical in schema:
            out[canonical] = _coerce(key, value, schema[canonical])
        elif canonical in _COMMON_KEYS:
            out[canonical] = str(value)
        else:
            raise _UsageError(f"unknown config key: {key}")
    return out


def parse_config(ns: argparse.Namespace) -> RunConfig:
    """Merge config-file values (if any) under explicit CLI flags."""
    schema = _SCHEMAS[ns.subcommand]
    merged = dict(_DEFAULTS[ns.subcommand])
    if getattr(ns, "config", None):
        merged.update(_read_config_file(ns.config, schema))
    for key in schema:
        value = getattr(ns, key, None)
        if value is not None:
            merged[key] = _coerce(key, value, schema[key])
    fmt = ns.format or merged.pop("format", None) or "json"
    if fmt not in ("csv", "json"):
        raise _UsageError(f"invalid value for config key 'format': {fmt!r}")
    out_path = ns.output or merged.pop("output", None)
    merged.pop("format", None)
    return RunConfig(
        subcommand=ns.subcommand,
        params=merged,
        output_format=fmt,
        output_path=out_path,
    )


def _need(params: dict, keys: tuple, context: str) -> list:
    missing = [k for k in keys if params.get(k) is None]
    if missing:
        raise _UsageError(f"{context} requires --{missing[0].replace('_', '-')}")
    return [params[k] for k in keys]


def _si_echo(p) -> dict:
    return {"mass": p.m, "width": p.a, "separation": p.R, "horizon": p.T}


def _cmd_variance(params: dict) -> tuple[list[dict], bool]:
    dimless = [params.get(k) is not None for k in ("mu", "rho", "tau_max")]
    si = [params.get(k) is not None for k in ("mass", "width", "separation", "horizon")]
    if any(dimless) and any(si):
        raise _UsageError("give either dimensionless or SI parameters, not both")
    record: dict = {}
    if any(dimless):
        mu, rho, tau_max = _need(params, ("mu", "rho", "tau_max"), "dimensionless mode")
        d = DimensionlessParams(mu=mu, rho=rho, tau_max=tau_max)
    else:
        m, a, R, T = _need(params, ("mass", "width", "separation", "horizon"), "SI mode")
        pair = make_params(m, a, R, T)
        d = nondimensionalize(pair)
        record.update(_si_echo(pair))
    vb = phase_variance(d)
    record.update(
        mu=d.mu, rho=d.rho, tau_max=d.tau_max,
        i7=vb.i7, i8=vb.i8, total=vb.total,
        quadrature_error_estimate=vb.quadrature_error_estimate,
    )
    return [record], False


def _cmd_criteria(params: dict) -> tuple[list[dict], bool]:
    mass, width = params.get("mass"), params.get("width")
    separation, density = params.get("separation"), params.get("density")
    th = Threshold(variance_threshold=params["threshold"])
    if not ((mass is not None and width is not None) or density is not None):
        raise _UsageError("criteria requires --mass and --width, or --density")
    record: dict = {
        k: v
        for k, v in (("mass", mass), ("width", width),
                     ("separation", separation), ("density", density))
        if v is not None
    }
    record["threshold"] = th.variance_threshold
    if mass is not None and width is not None:
        clr = critical_length(mass, width, th=th)
        record["critical_length"] = clr.l_c
        record["critical_length_method"] = clr.method.value
        record["critical_length_asymptote"] = clr.asymptote
        if separation is not None:
            pair = make_params(mass, width, separation, 1.0)
            record["damping_time"] = damping_time(pair, th)
            record["damping_time_short"] = damping_time_short(
                pair, threshold=th.variance_threshold
            )
    if density is not None:
        if density <= 0 or not math.isfinite(density):
            raise _UsageError(f"invalid value for density: {density}")
        record["critical_mass"] = critical_mass(density)
        if mass is not None:
            record["regime"] = classify(mass, density, a=width).value
    return [record], False


def _cmd_sweep(params: dict) -> tuple[list[dict], bool]:
    param, start, stop, num = _need(params, ("param", "start", "stop", "num"), "sweep")
    if params.get(param) is not None:
        raise _UsageError(f"--{param} conflicts with sweeping it")
    if not (0 < start and 0 < stop and math.isfinite(start) and math.isfinite(stop)):
        raise _UsageError(f"invalid value for start/stop: {start}, {stop}")
    if num < 2:
        raise _UsageError(f"invalid value for num: {num} (need >= 2)")
    th = Threshold(variance_threshold=params["threshold"])
    fixed = {k: params.get(k) for k in ("mass", "width", "separation")}
    records = []
    for value in np.geomspace(start, stop, num):
        point = dict(fixed)
        point[param] = float(value)
        mass, width, separation = point["mass"], point["width"], point["separation"]
        if mass is None or width is None:
            raise _UsageError("sweep requires mass and width (swept or fixed)")
        row: dict = {"mass": mass, "width": width}
        clr = critical_length(mass, width, th=th)
        row["mu"] = nondimensionalize(make_params(mass, width, 0.0, 1.0)).mu
        row["critical_length"] = clr.l_c
        row["critical_length_method"] = clr.method.value
        row["critical_length_asymptote"] = clr.asymptote
        if separation is not None:
            row["separation"] = separation
            pair = make_params(mass, width, separation, 1.0)
            row["damping_time"] = damping_time(pair, th)
        records.append(row)
    return records, False


def _oracle_row(check: str, **kw) -> dict:
    row = {
        "check": check, "c1": None, "separation": None, "value": None,
        "target": None, "residual": None, "standard_error": None,
        "tolerance": None, "passed": None,
    }
    row.update(kw)
    return row


def _cmd_oracle(params: dict) -> tuple[list[dict], bool]:
    n, seed = params["samples"], params["seed"]
    workers = params.get("workers") or default_workers()
    records = []

    rep = sn_cancellation_check(1.0, 1.0, n, seed, workers=workers)
    tol = 3.0 * rep.combined_se
    records.append(
        _oracle_row(
            "cancellation", c1=1.0, separation=1.0, value=rep.sum_value,
            target=0.0, residual=abs(rep.sum_value),
            standard_error=rep.combined_se, tolerance=tol,
            passed=abs(rep.sum_value) < tol,
        )
    )
    # pass bound: 3 SE or 1% of the target, whichever is looser, so small
    # sample counts stay statistically meaningful
    for c1 in (0.25, 1.0, 4.0):
        est = mc_i4_spatial(c1, n, seed, workers=workers)
        target = i4_closed_form(c1)
        resid = abs(est.value - target)
        tol = max(3.0 * est.standard_error, 0.01 * abs(target))
        records.append(
            _oracle_row(
                "i4_closed_form", c1=c1, value=est.value, target=target,
                residual=resid, standard_error=est.standard_error,
                tolerance=tol, passed=bool(resid < tol),
            )
        )
    for ratio in (0.5, 1.0, 3.0):
        est = mc_i6_spatial(1.0, ratio, n, seed, workers=workers)
        target = i6_closed_form(1.0, ratio)
        resid = abs(est.value - target)
        tol = max(3.0 * est.standard_error, 0.01 * abs(target))
        records.append(
            _oracle_row(
                "i6_closed_form", c1=1.0, separation=ratio, value=est.value,
                target=target, residual=resid,
                standard_error=est.standard_error,
                tolerance=tol, passed=bool(resid < tol),
            )
        )
    for ratio in (0.1, 1.0, 5.0):
        resid = erf_identity_check(ratio, 1.0)
        records.append(
            _oracle_row(
                "erf_identity", c1=1.0, separation=ratio, residual=resid,
                tolerance=1e-10, passed=resid < 1e-10,
            )
        )
    return records, not all(r["passed"] for r in records)


def _cmd_covariance(params: dict) -> tuple[list[dict], bool]:
    grid = FieldGrid(
        n=params["grid_n"], box_length=params["box"], dt=params["dt"],
        n_steps=1, seed=params["seed"],
    )
    seps = params.get("separations")
    if seps is None:
        seps = [4.0 * grid.dx, grid.box_length / 8.0, grid.box_length / 4.0]
    rows = measured_covariance(grid, params["realizations"], seps)
    records, all_ok = [], True
    for row in rows:
        err = abs(row.estimate - row.target)
        ok = err <= max(0.05 * abs(row.target), 3.0 * row.standard_error)
        all_ok &= ok
        records.append(
            {
                "separation": row.separation,
                "estimate": row.estimate,
                "target": row.target,
                "standard_error": row.standard_error,
                "relative_error": err / abs(row.target),
                "passed": ok,
            }
        )
    return records, not all_ok


def _cmd_simulate(params: dict) -> tuple[list[dict], bool]:
    m, a, R, T = _need(params, ("mass", "width", "separation", "horizon"), "simulate")
    pair = make_params(m, a, R, T)
    box = params.get("box")
    if box is None:
        box = 8.0 * max(pair.R, math.sqrt(spreading_width(pair, pair.T)))
    steps = params["steps"]
    grid = FieldGrid(
        n=params["grid_n"], box_length=box, dt=pair.T / steps,
        n_steps=steps, seed=params["seed"],
    )
    workers = params.get("workers") or default_workers()
    ens = simulate_phase_variance(pair, grid, params["members"], workers=workers)
    d = nondimensionalize(pair)
    analytic = phase_variance(d).total
    err = abs(ens.variance - analytic)
    tol = max(0.10 * analytic, 3.0 * ens.standard_error_of_variance)
    record = {
        **_si_echo(pair),
        "mu": d.mu, "rho": d.rho, "tau_max": d.tau_max,
        "grid_n": grid.n, "box": box, "steps": steps, "members": ens.n_members,
        "variance": ens.variance,
        "standard_error_of_variance": ens.standard_error_of_variance,
        "analytic_total": analytic,
        "relative_error": err / analytic if analytic > 0 else 0.0,
        "passed": err <= tol,
    }
    return [record], not record["passed"]


_DISPATCH = {
    "variance": _cmd_variance,
    "criteria": _cmd_criteria,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
    "covariance": _cmd_covariance,
    "simulate": _cmd_simulate,
}

_STOCHASTIC = {"oracle", "covariance", "simulate"}


def _fmt_float(v: float) -> str:
    s = f"{v:.17g}"
    if not any(c in s for c in ".eE"):
        s += ".0"
    return s


def _scalar_csv(v) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def _scalar_json(v) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, int):
        return str(v)
    return json.dumps(v)


def emit(records: list[dict], output_format: str, path: str | None = None) -> None:
    """Serialize records (CSV with a header row, or a JSON array).

    Floats are printed with 17 significant digits, so parsing the output
    recovers each IEEE double bit-exactly. All records must share one key
    set; every float must be finite. Output is built in full before any
    byte is written, so a failed run never leaves a partial file.
    """
    if not records:
        raise ValueError("no records to emit")
    keys = list(records[0])
    for rec in records:
        if list(rec) != keys:
            raise ValueError("records have inconsistent fields")
        for key, value in rec.items():
            if isinstance(value, float) and not math.isfinite(value):
                raise FloatingPointError(f"non-finite value for field '{key}'")
    if output_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        for rec in records:
            writer.writerow([_scalar_csv(rec[k]) for k in keys])
        text = buf.getvalue()
    else:
        lines = []
        for rec in records:
            fields = ", ".join(
                f"{json.dumps(k)}: {_scalar_json(v)}" for k, v in rec.items()
            )
            lines.append("  {" + fields + "}")
        text = "[\n" + ",\n".join(lines) + "\n]\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(argv: list[str]) -> int:
    """Parse argv, execute one subcommand, emit records, return exit code."""
    try:
        ns = _parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = parse_config(ns)
        records, failed = _DISPATCH[cfg.subcommand](cfg.params)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ConfigurationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (QuadratureError, BracketError, FloatingPointError, OverflowError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    seed = cfg.params.get("seed") if cfg.subcommand in _STOCHASTIC else None
    stamp = datetime.now(timezone.utc).isoformat()
    for rec in records:
        rec["version"] = __version__
        rec["seed"] = seed
        rec["timestamp"] = stamp
    try:
        emit(records, cfg.output_format, cfg.output_path)
    except FloatingPointError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"cannot write output: {e}", file=sys.stderr)
        return 3
    return 1 if failed else 0


def console_entry() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    console_entry()
