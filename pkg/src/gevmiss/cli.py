"""Command-line interface.

Three subcommands:

* ``fit``     : estimate GEV parameters and return levels from a block CSV
* ``simulate``: run the missingness simulation study over a scenario grid
* ``detrend`` : turn an hourly water-level CSV into annual surge blocks

Numeric output uses six significant digits throughout and every output
file starts with ``#`` comment lines recording the resolved
configuration, so reruns with the same inputs are byte-identical.

Exit codes: 0 success, 2 input/usage error, 3 estimation or study
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .bootstrap import boot_summary_to_csv, bootstrap_fit
from .estimators import METHODS, FitError, fit
from .formatting import fmt6
from .simulate import (
    SCENARIOS,
    ScenarioConfig,
    StudyError,
    run_study,
    study_rows_to_csv,
)
from .tides import (
    DEFAULT_CONSTITUENTS,
    annual_blocks,
    detrend_surge,
    fit_tidal,
    parse_hourly_csv,
    read_blocks_csv,
    write_blocks_csv,
    write_hourly_csv,
)

__all__ = ["main"]

_EXIT_INPUT = 2
_EXIT_FAILURE = 3


def _header_lines(command: str, resolved: dict) -> list[str]:
    lines = [f"gevmiss {__version__} {command}"]
    for key in sorted(resolved):
        lines.append(f"{key}={resolved[key]}")
    return lines


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_periods(raw: str) -> tuple[float, ...]:
    try:
        periods = tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"could not parse --periods {raw!r}") from None
    if not periods:
        raise ValueError("--periods must list at least one return period")
    return periods


def _read_pool(path: str) -> np.ndarray:
    """Pooled observed values: either a one-column CSV of numbers or a
    timestamp,level file (levels are used, gaps dropped)."""
    import pandas as pd

    frame = pd.read_csv(path, comment="#", skip_blank_lines=True)
    cols = [str(c).strip().lower() for c in frame.columns]
    if "level" in cols:
        values = pd.to_numeric(frame[frame.columns[cols.index("level")]], errors="coerce")
    elif len(frame.columns) == 1:
        values = pd.to_numeric(frame[frame.columns[0]], errors="coerce")
    else:
        raise ValueError(
            f"pool file must be one numeric column or timestamp,level; found columns {list(frame.columns)}"
        )
    pool = values.to_numpy(dtype=float)
    pool = pool[np.isfinite(pool)]
    if pool.size == 0:
        raise ValueError("pool file contains no finite values")
    return pool


def cmd_fit(args) -> int:
    blocks = read_blocks_csv(args.blocks)
    pool = _read_pool(args.pool_csv) if args.pool_csv else None
    periods = _parse_periods(args.periods)
    method = args.method.lower()
    resolved = {
        "alpha": args.alpha,
        "blocks": args.blocks,
        "boot": args.boot,
        "method": method,
        "periods": ",".join(fmt6(p) for p in periods),
        "pool": args.pool_csv or "",
        "seed": args.seed,
    }
    header = _header_lines("fit", resolved)

    result = fit(method, blocks, series_pool=pool)
    if not result.converged:
        p = result.params
        sys.stderr.write(
            "error: optimizer did not converge; best point "
            f"loc={fmt6(p.loc)} scale={fmt6(p.scale)} shape={fmt6(p.shape)} "
            f"nll={fmt6(result.final_nll)}\n"
        )
        return _EXIT_FAILURE

    lines = [f"# {h}" for h in header]
    p = result.params
    lines.append(
        f"# converged=yes iterations={result.iterations} "
        f"nll={fmt6(result.final_nll)} blocks={len(blocks)} dropped={result.dropped_blocks}"
    )

    if args.boot > 0:
        summary = bootstrap_fit(
            method,
            blocks,
            series_pool=pool,
            B=args.boot,
            alpha=args.alpha,
            seed=args.seed,
            periods=periods,
        )
        if summary.flagged:
            lines.append(
                f"# warning: {summary.failures} of {summary.B} bootstrap refits failed; "
                "intervals may be unreliable"
            )
        for i, qty in enumerate(summary.quantities):
            lines.append(
                f"{qty} {fmt6(summary.estimate[i])} se {fmt6(summary.se[i])} "
                f"ci {fmt6(summary.ci_lo[i])} {fmt6(summary.ci_hi[i])}"
            )
        out_text = "\n".join(f"# {h}" for h in header) + "\n" + boot_summary_to_csv(summary)
    else:
        rows = [("loc", p.loc), ("scale", p.scale), ("shape", p.shape)]
        rows += [(f"rl_{fmt6(per)}", p.return_level(per)) for per in periods]
        for name, value in rows:
            lines.append(f"{name} {fmt6(value)}")
        csv_rows = ["method,quantity,estimate,se,ci_lo,ci_hi,B,failures"]
        for name, value in rows:
            csv_rows.append(f"{method},{name},{fmt6(value)},,,,0,0")
        out_text = "\n".join(f"# {h}" for h in header) + "\n" + "\n".join(csv_rows) + "\n"

    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        _write_text(args.out, out_text)
    return 0


_GRID_KEYS = {
    "scenario": str,
    "dist": str,
    "n_blocks": int,
    "block_size": int,
    "seed": int,
    "pbm": float,
    "pm": float,
    "apm": float,
    "direction": str,
}


def _parse_grid(path: str, base_seed: int) -> list[ScenarioConfig]:
    """One scenario per row; each row is whitespace-separated key=value
    pairs. Rows without an explicit seed get base_seed + row index."""
    configs = []
    with open(path) as fh:
        raw_rows = fh.readlines()
    row_no = 0
    for lineno, raw in enumerate(raw_rows, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row_no += 1
        kwargs = {}
        for tok in line.split():
            if "=" not in tok:
                raise ValueError(f"grid row {lineno}: expected key=value, got {tok!r}")
            key, _, val = tok.partition("=")
            if key not in _GRID_KEYS:
                raise ValueError(
                    f"grid row {lineno}: unknown key {key!r} "
                    f"(valid: {', '.join(sorted(_GRID_KEYS))})"
                )
            try:
                kwargs[key] = _GRID_KEYS[key](val)
            except ValueError:
                raise ValueError(f"grid row {lineno}: bad value for {key}: {val!r}") from None
        kwargs.setdefault("seed", base_seed + row_no - 1)
        if kwargs.get("scenario") in SCENARIOS and kwargs["scenario"] == "II":
            kwargs.setdefault("direction", "decreasing")
        try:
            configs.append(ScenarioConfig(**kwargs))
        except TypeError as exc:
            raise ValueError(f"grid row {lineno}: {exc}") from None
        except ValueError as exc:
            raise ValueError(f"grid row {lineno}: {exc}") from None
    if not configs:
        raise ValueError(f"grid file {path} contains no scenario rows")
    return configs


def cmd_simulate(args) -> int:
    methods = tuple(m.strip().lower() for m in args.methods.split(",") if m.strip())
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r} (valid: {', '.join(METHODS)})")
    grid = _parse_grid(args.grid, args.seed)
    resolved = {
        "grid": args.grid,
        "methods": ",".join(methods),
        "period": fmt6(args.period),
        "reps": args.reps,
        "seed": args.seed,
        "use_true_delta": args.use_true_delta,
    }
    rows = run_study(
        grid,
        methods,
        reps=args.reps,
        target_period=args.period,
        use_true_delta=args.use_true_delta,
    )
    text = "\n".join(f"# {h}" for h in _header_lines("simulate", resolved))
    text += "\n" + study_rows_to_csv(rows)
    _write_text(args.out, text)
    return 0


def _parse_constituents(raw: str | None):
    if raw is None:
        return None
    names = {name: freq for name, freq in DEFAULT_CONSTITUENTS}
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok.upper() in names:
            out.append((tok.upper(), names[tok.upper()]))
        else:
            try:
                out.append((f"C{len(out) + 1}", float(tok)))
            except ValueError:
                raise ValueError(
                    f"unknown constituent {tok!r}; use a named constituent "
                    f"({', '.join(names)}) or a frequency in degrees/hour"
                ) from None
    if not out:
        raise ValueError("--constituents must list at least one constituent")
    return out


def cmd_detrend(args) -> int:
    series = parse_hourly_csv(args.hourly)
    consts = _parse_constituents(args.constituents)
    model = fit_tidal(series, constituents=consts, smooth_window_hours=args.window)
    surge = detrend_surge(series, model)
    records = annual_blocks(surge, include_partial=args.include_partial)

    sidecar = args.sidecar or (args.out + ".tidal.csv")
    resolved = {
        "constituents": ",".join(name for name, *_ in model.constituents),
        "hourly": args.hourly,
        "include_partial": args.include_partial,
        "sidecar": sidecar,
        "window": args.window,
    }
    header = _header_lines("detrend", resolved)
    write_blocks_csv(records, path=args.out, header_lines=header)

    side_lines = [f"# {h}" for h in header]
    side_lines.append("name,omega_deg_per_hr,amplitude,phase_deg")
    for name, omega, amp, phase in model.constituents:
        side_lines.append(f"{name},{fmt6(omega)},{fmt6(amp)},{fmt6(phase)}")
    _write_text(sidecar, "\n".join(side_lines) + "\n")

    if args.surge_out:
        write_hourly_csv(surge, path=args.surge_out, header_lines=header)

    sys.stdout.write(
        f"wrote {len(records)} annual blocks to {args.out}; "
        f"constituent table in {sidecar}\n"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gevmiss",
        description="GEV estimation from block maxima with missing observations",
    )
    parser.add_argument("--version", action="version", version=f"gevmiss {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    # lets -v trail the subcommand without clobbering a leading -v
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
        help="log progress to stderr",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a GEV to block maxima from a CSV", parents=[common])
    p_fit.add_argument("blocks", help="CSV with year,max_surge,n_obs,n_miss rows")
    p_fit.add_argument("--method", default="obs", choices=METHODS)
    p_fit.add_argument(
        "--pool-csv",
        default=None,
        help="observed values pooled across blocks (needed by softc)",
    )
    p_fit.add_argument("--periods", default="20,50,100", help="return periods, comma-separated")
    p_fit.add_argument("--boot", type=int, default=0, help="bootstrap resamples (0 = none)")
    p_fit.add_argument("--alpha", type=float, default=0.05, help="CI miss probability")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--out", default=None, help="also write results as CSV")
    p_fit.set_defaults(func=cmd_fit)

    p_sim = sub.add_parser("simulate", help="run the missingness simulation study", parents=[common])
    p_sim.add_argument("--grid", required=True, help="scenario grid file, key=value rows")
    p_sim.add_argument(
        "--methods",
        default=",".join(METHODS),
        help="comma-separated subset of " + ",".join(METHODS),
    )
    p_sim.add_argument("--reps", type=int, default=1000)
    p_sim.add_argument("--period", type=float, default=50.0)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument(
        "--use-true-delta",
        action="store_true",
        help="give the complete-blocks method oracle knowledge of which block maxima survived",
    )
    p_sim.add_argument("--out", default=None, help="output CSV (default stdout)")
    p_sim.set_defaults(func=cmd_simulate)

    p_det = sub.add_parser("detrend", help="hourly levels -> tidal fit -> annual surge blocks", parents=[common])
    p_det.add_argument("hourly", help="CSV with timestamp,level rows")
    p_det.add_argument("--out", required=True, help="annual block CSV to write")
    p_det.add_argument(
        "--constituents",
        default=None,
        help="comma-separated names or degrees/hour frequencies (default: M2,S2,N2,K1,O1)",
    )
    p_det.add_argument("--window", type=int, default=24 * 365, help="mean-level window, hours")
    p_det.add_argument("--sidecar", default=None, help="constituent table CSV (default <out>.tidal.csv)")
    p_det.add_argument("--surge-out", default=None, help="also write the detrended hourly series")
    p_det.add_argument(
        "--include-partial",
        action="store_true",
        help="keep years only partly covered by the record",
    )
    p_det.set_defaults(func=cmd_detrend)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (FitError, StudyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _EXIT_FAILURE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
