"""Command-line front-end for heatband.

Four subcommands cover the workflow end to end:

  prescribe   build a certificate for target bands and write it as JSON
  probe       tabulate u(0,t), the limiting envelope, phi, and ball averages
  verify      measure the bands of a stored certificate and judge the chain
  reproduce   recompute the reference constants of the two-mode example

Artifacts are deterministic: fixed grids, floats in shortest round-trip
decimal, JSON with sorted keys.  Exit status 0 means success, 1 a failed
verification, 2 an argument or input problem, 3 a numerical convergence
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    HeatbandError,
    RangeError,
    SearchFailure,
    UnsupportedExpression,
)
from .initial_data import closed_H, eval_phi, numeric_H
from .kernel_moments import KernelFlavor, kernel_moments
from .prescriber import (
    cert_dumps,
    cert_loads,
    envelope_u,
    lemma_not_example,
    prescribe_average,
    prescribe_data,
)
from .solution_probe import report_dumps, u_origin, verify_certificate

OUT_DIR_ENV = "HEATBAND_OUT_DIR"

_COMMANDS = ("prescribe", "probe", "verify", "reproduce")

# reference values for the two-mode example constants, printed by reproduce
REFERENCE_CONSTANTS = (
    ("cos_moment_m1", 0.892253317),
    ("sin_moment_m1", 0.030945895),
    ("cos_moment_m2", 0.649173672),
    ("sin_moment_m2", 0.099535090),
    ("average_band_lower", -1.760172593),
    ("solution_band_lower", -1.369211837),
    ("solution_band_upper", 1.328017886),
)


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one CLI invocation."""

    command: str
    n: int = 1
    average_quad: tuple[float, float, float, float] | None = None
    data_quad: tuple[float, float, float, float] | None = None
    cert_path: str | None = None
    tol_band: float = 0.02
    t_anchor: float = 1e6
    points_per_period: int = 64
    periods: float = 3.0
    t_range: tuple[float, float, int] = (1e2, 1e10, 33)
    tau_range: tuple[float, float, int] = (1e2, 1e10, 33)
    out_path: str | None = None
    out_dir: str = "."
    fmt: str = "csv"

    def __post_init__(self):
        if self.command not in _COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.average_quad is not None and self.data_quad is not None:
            raise DomainError("give either an average target or a data target, not both")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        for quad in (self.average_quad, self.data_quad):
            if quad is not None and not all(math.isfinite(v) for v in quad):
                raise DomainError(f"target values must be finite, got {quad}")
        for name, value in (("tol_band", self.tol_band),
                            ("t_anchor", self.t_anchor),
                            ("periods", self.periods)):
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive finite real, got {value!r}")
        for rng_name, rng in (("t-range", self.t_range), ("tau-range", self.tau_range)):
            lo, hi, count = rng
            if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo <= hi):
                raise DomainError(f"{rng_name} bounds must be ordered positive reals, got {rng}")
            if int(count) < 2:
                raise DomainError(f"{rng_name} needs at least 2 points, got {count}")
        if self.fmt not in ("csv", "json"):
            raise DomainError(f"format must be csv or json, got {self.fmt!r}")


def _fmt(x: float) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def _table(x: float) -> str:
    """Fixed 9-decimal rendering for printed tables."""
    return f"{x:.9f}"


def _out_dir(explicit: str | None) -> str:
    if explicit is not None:
        return explicit
    return os.environ.get(OUT_DIR_ENV, ".")


def _resolve_out(config: RunConfig, default_name: str) -> str:
    if config.out_path is not None:
        return config.out_path
    return os.path.join(config.out_dir, default_name)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# prescribe


def _print_chain(cert) -> None:
    phi = cert.expected_phi_band
    sol = cert.expected_u_band
    avg = cert.expected_H_band
    print(f"initial data band  [{_table(phi[0])}, {_table(phi[1])}]")
    if avg is None:
        print("ball average band  not pinned by this construction")
    else:
        print(f"ball average band  [{_table(avg[0])}, {_table(avg[1])}]")
    print(f"solution band      [{_table(sol[0])}, {_table(sol[1])}]")
    if avg is None:
        chain = (phi[0], sol[0], sol[1], phi[1])
    else:
        chain = (phi[0], avg[0], sol[0], sol[1], avg[1], phi[1])
    print("chain " + " <= ".join(_table(v) for v in chain))


def _cmd_prescribe(config: RunConfig) -> int:
    if config.average_quad is not None:
        cert = prescribe_average(*config.average_quad, n=config.n)
    elif config.data_quad is not None:
        cert = prescribe_data(*config.data_quad, n=config.n)
    else:
        raise DomainError("prescribe needs --average P A B Q or --data R A B S")
    path = _resolve_out(config, "cert.json")
    _write_text(path, cert_dumps(cert) + "\n")
    print(f"construction {cert.construction_tag}"
          + (f", mode frequency {_fmt(cert.m_used)}" if cert.m_used is not None else ""))
    _print_chain(cert)
    print(f"certificate written to {path}")
    return 0


# ---------------------------------------------------------------------------
# probe


def _load_cert(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read certificate file {path}: {exc}") from exc
    try:
        return cert_loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"certificate file {path} is not valid JSON: {exc}") from exc


def _probe_u_rows(cert, config: RunConfig) -> list[tuple]:
    lo, hi, count = config.t_range
    rows = []
    for t in np.geomspace(lo, hi, int(count)):
        t = float(t)
        u = u_origin(cert.data, cert.target.n, t)
        try:
            env = envelope_u(cert, t)
            gap = abs(u - env)
        except (UnsupportedExpression, DomainError):
            env = None
            gap = None
        rows.append((t, 0.5 * math.log(4.0 * t), u, env, gap))
    return rows


def _probe_phi_rows(cert, config: RunConfig) -> list[tuple]:
    lo, hi, count = config.tau_range
    h_expr = closed_H(cert.data, cert.target.n)
    rows = []
    for tau in np.geomspace(lo, hi, int(count)):
        tau = float(tau)
        phi = float(eval_phi(cert.data, tau))
        h_num = numeric_H(cert.data, cert.target.n, tau)
        h_cl = None if h_expr is None else float(eval_phi(h_expr, tau))
        rows.append((tau, phi, h_num, h_cl))
    return rows


def _csv_text(header: str, rows: list[tuple]) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join("" if v is None else _fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_text(columns: Sequence[str], rows: list[tuple]) -> str:
    doc = {"columns": list(columns), "rows": [list(row) for row in rows]}
    return json.dumps(doc, sort_keys=True) + "\n"


def _cmd_probe(config: RunConfig) -> int:
    if config.cert_path is None:
        raise DomainError("probe needs --cert FILE")
    cert = _load_cert(config.cert_path)
    u_rows = _probe_u_rows(cert, config)
    phi_rows = _probe_phi_rows(cert, config)
    ext = config.fmt
    u_path = os.path.join(config.out_dir, f"probe_u.{ext}")
    phi_path = os.path.join(config.out_dir, f"probe_phi.{ext}")
    u_columns = ("t", "log_sqrt4t", "u_origin", "envelope", "abs_gap")
    phi_columns = ("tau", "phi", "H_numeric", "H_closed")
    if ext == "csv":
        _write_text(u_path, _csv_text(",".join(u_columns), u_rows))
        _write_text(phi_path, _csv_text(",".join(phi_columns), phi_rows))
    else:
        _write_text(u_path, _json_text(u_columns, u_rows))
        _write_text(phi_path, _json_text(phi_columns, phi_rows))
    print(f"wrote {len(u_rows)} solution rows to {u_path}")
    print(f"wrote {len(phi_rows)} data rows to {phi_path}")
    return 0


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(config: RunConfig) -> int:
    if config.cert_path is None:
        raise DomainError("verify needs --cert FILE")
    cert = _load_cert(config.cert_path)
    report = verify_certificate(
        cert,
        tol_band=config.tol_band,
        t_anchor=config.t_anchor,
        points_per_period=config.points_per_period,
        min_periods=config.periods,
    )
    path = _resolve_out(config, "report.json")
    _write_text(path, report_dumps(report) + "\n")

    def line(label, measured, expected):
        exp = ("unpinned" if expected is None
               else f"[{_table(expected[0])}, {_table(expected[1])}]")
        print(f"{label:<14} measured [{_table(measured.lower_est)}, "
              f"{_table(measured.upper_est)}]  expected {exp}")

    line("initial data", report.measured_phi_band, cert.expected_phi_band)
    line("ball average", report.measured_H_band, cert.expected_H_band)
    line("solution", report.measured_u_band, cert.expected_u_band)
    if report.u_partial:
        print(f"solution sweep is partial "
              f"({report.measured_u_band.periods_covered:.3f} periods covered)")
    for note in report.notes:
        print(f"note: {note}")
    print(f"report written to {path}")
    if not report.chain_ok:
        print("verify: measured bands violate the certificate chain "
              f"at tolerance {_fmt(report.tol_band)}", file=sys.stderr)
        return 1
    print("chain holds at tolerance " + _fmt(report.tol_band))
    return 0


# ---------------------------------------------------------------------------
# reproduce


def _reproduce_values() -> dict[str, float]:
    mom1 = kernel_moments(1, 1.0, KernelFlavor.AVERAGE)
    mom2 = kernel_moments(1, 2.0, KernelFlavor.AVERAGE)
    cert = lemma_not_example()
    assert cert.expected_H_band is not None
    return {
        "cos_moment_m1": mom1.a_value,
        "sin_moment_m1": mom1.b_value,
        "cos_moment_m2": mom2.a_value,
        "sin_moment_m2": mom2.b_value,
        "average_band_lower": cert.expected_H_band[0],
        "solution_band_lower": cert.expected_u_band[0],
        "solution_band_upper": cert.expected_u_band[1],
    }


def _cmd_reproduce(config: RunConfig) -> int:
    del config
    computed = _reproduce_values()
    name_w = max(len(name) for name, _ in REFERENCE_CONSTANTS)
    print(f"{'constant':<{name_w}}  {'computed':>14}  {'reference':>14}  {'abs diff':>12}")
    for name, ref in REFERENCE_CONSTANTS:
        got = computed[name]
        print(f"{name:<{name_w}}  {_table(got):>14}  {_table(ref):>14}  "
              f"{abs(got - ref):>12.3e}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heatband",
        description="Construct and verify radial heat-equation initial data "
                    "with prescribed oscillation bands.")
    sub = parser.add_subparsers(dest="command", required=True)

    pre = sub.add_parser(
        "prescribe",
        help="build a certificate for target bands and write it as JSON")
    target = pre.add_mutually_exclusive_group(required=True)
    target.add_argument(
        "--average", nargs=4, type=float, metavar=("P", "A", "B", "Q"),
        help="average band [P, Q] and solution band [A, B]; needs P + Q = A + B")
    target.add_argument(
        "--data", nargs=4, type=float, metavar=("R", "A", "B", "S"),
        help="data band [R, S] and solution band [A, B]")
    pre.add_argument("--n", type=int, default=1, help="space dimension (default 1)")
    pre.add_argument("--out", help="certificate path (default OUT_DIR/cert.json)")
    pre.add_argument("--out-dir", help="output directory (default $HEATBAND_OUT_DIR or .)")

    probe = sub.add_parser(
        "probe",
        help="tabulate solution values, envelope, data, and ball averages")
    probe.add_argument("--cert", required=True, help="certificate JSON file")
    probe.add_argument(
        "--t-range", nargs=3, type=float, default=[1e2, 1e10, 33],
        metavar=("T0", "T1", "COUNT"),
        help="log-spaced solution time grid (default 1e2 1e10 33)")
    probe.add_argument(
        "--tau-range", nargs=3, type=float, default=[1e2, 1e10, 33],
        metavar=("TAU0", "TAU1", "COUNT"),
        help="log-spaced data radius grid (default 1e2 1e10 33)")
    probe.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="artifact format (default csv)")
    probe.add_argument("--out-dir", help="output directory (default $HEATBAND_OUT_DIR or .)")

    ver = sub.add_parser(
        "verify",
        help="measure the bands of a stored certificate and judge the chain")
    ver.add_argument("--cert", required=True, help="certificate JSON file")
    ver.add_argument("--tol-band", type=float, default=0.02,
                     help="band tolerance (default 0.02)")
    ver.add_argument("--t-anchor", type=float, default=1e6,
                     help="start of the solution sweep window (default 1e6)")
    ver.add_argument("--points-per-period", type=int, default=64,
                     help="sweep sampling density (default 64)")
    ver.add_argument("--periods", type=float, default=3.0,
                     help="sweep length in periods (default 3)")
    ver.add_argument("--out", help="report path (default OUT_DIR/report.json)")
    ver.add_argument("--out-dir", help="output directory (default $HEATBAND_OUT_DIR or .)")

    sub.add_parser(
        "reproduce",
        help="recompute the reference constants of the two-mode example")

    return parser


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    kwargs: dict = {"command": ns.command}
    if ns.command == "prescribe":
        if ns.average is not None:
            kwargs["average_quad"] = tuple(ns.average)
        if ns.data is not None:
            kwargs["data_quad"] = tuple(ns.data)
        kwargs["n"] = ns.n
        kwargs["out_path"] = ns.out
        kwargs["out_dir"] = _out_dir(ns.out_dir)
    elif ns.command == "probe":
        kwargs["cert_path"] = ns.cert
        kwargs["t_range"] = (ns.t_range[0], ns.t_range[1], int(ns.t_range[2]))
        kwargs["tau_range"] = (ns.tau_range[0], ns.tau_range[1], int(ns.tau_range[2]))
        kwargs["fmt"] = ns.format
        kwargs["out_dir"] = _out_dir(ns.out_dir)
    elif ns.command == "verify":
        kwargs["cert_path"] = ns.cert
        kwargs["tol_band"] = ns.tol_band
        kwargs["t_anchor"] = ns.t_anchor
        kwargs["points_per_period"] = ns.points_per_period
        kwargs["periods"] = ns.periods
        kwargs["out_path"] = ns.out
        kwargs["out_dir"] = _out_dir(ns.out_dir)
    return RunConfig(**kwargs)


_DISPATCH = {
    "prescribe": _cmd_prescribe,
    "probe": _cmd_probe,
    "verify": _cmd_verify,
    "reproduce": _cmd_reproduce,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed its message; fold --help into success
        return 0 if exc.code in (0, None) else 2
    try:
        config = _config_from_args(ns)
        return _DISPATCH[config.command](config)
    except (DomainError, RangeError, UnsupportedExpression, SearchFailure) as exc:
        print(f"heatband {ns.command}: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, EvaluationError) as exc:
        print(f"heatband {ns.command}: numerical failure: {exc}", file=sys.stderr)
        return 3
    except HeatbandError as exc:
        print(f"heatband {ns.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"heatband {ns.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
