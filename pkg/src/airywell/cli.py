"""Configuration-driven command line front end.

Subcommands: zeros, spectrum, density, solve, verify.  Every run is
deterministic: numbers are written with 12 significant digits in
scientific notation, files carry no timestamps, and repeated runs with
the same configuration produce byte-identical output.

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .airy import airy_derivative_zero, airy_eval, airy_function_zero
from .profiles import TimeProfile
from .spectrum import MAX_LEVEL, density, level
from .verify import (
    Grid1D,
    invariant_eigen_residual,
    pseudo_hermiticity_check,
    tdse_residual,
    von_neumann_residual,
)
from .wavefunction import assemble_wavefunction, reconstructed_density

__all__ = ["RunConfig", "run_zeros", "run_spectrum", "run_density",
           "run_solve", "run_verify", "main"]


class ConfigError(ValueError):
    """Configuration or usage problem: maps to exit code 2."""


_DEFAULT_PROFILE = {
    "window": 3.0,
    "mass": {"family": "constant", "m0": 1.0},
    "coupling": {"family": "constant", "f0": 1.0},
}
_DEFAULT_TOLERANCES = {
    "tdse": 1e-4,
    "invariant_eigen": 1e-3,
    "von_neumann": 1e-4,
    "pseudo_hermiticity": 1e-12,
}


@dataclass(frozen=True)
class RunConfig:
    """One run: profile, level/time lists, grid, output choices."""

    profile: TimeProfile
    levels: tuple = (0, 1, 2, 3, 4, 5)
    times: tuple = (0.1, 0.3, 0.5)
    half_width: float = 16.0
    dx: float = 0.005
    out_dir: Path = Path(".")
    fmt: str = "csv"
    tolerances: dict = field(default_factory=lambda: dict(_DEFAULT_TOLERANCES))


def _validate_levels(levels) -> tuple:
    if not isinstance(levels, (list, tuple)) or len(levels) == 0:
        raise ConfigError("levels: list must be non-empty")
    out = []
    for n in levels:
        if not float(n) == int(n):
            raise ConfigError(f"levels: {n!r} is not an integer")
        n = int(n)
        if n < 0:
            raise ConfigError(f"levels: index {n} is negative")
        if n > MAX_LEVEL:
            raise ConfigError(f"levels: index {n} exceeds the supported {MAX_LEVEL}")
        out.append(n)
    return tuple(out)


def _validate_times(times, window: float) -> tuple:
    if not isinstance(times, (list, tuple)) or len(times) == 0:
        raise ConfigError("times: list must be non-empty")
    out = []
    for t in times:
        t = float(t)
        if not 0.0 <= t <= window:
            raise ConfigError(f"times: {t} outside the profile window [0, {window}]")
        out.append(t)
    return tuple(out)


def _resolve_table_paths(block, base: Path, label: str):
    """A sampled family may name a two-column CSV file instead of rows."""
    if not isinstance(block, dict) or not isinstance(block.get("table"), str):
        return block
    path = Path(block["table"])
    if not path.is_absolute():
        path = base / path
    if not path.exists():
        raise ConfigError(f"{label}: table file {path} does not exist")
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise ConfigError(f"{label}: table rows need exactly (t, value)")
            try:
                rows.append([float(row[0]), float(row[1])])
            except ValueError as exc:
                raise ConfigError(f"{label}: non-numeric table entry {row!r}") from exc
    out = dict(block)
    out["table"] = rows
    return out


def load_config(path) -> RunConfig:
    """Parse the YAML run file.  Unknown keys anywhere are hard errors."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    known = {"profile", "levels", "times", "grid", "out", "format", "tolerances"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")

    prof_block = raw.get("profile", _DEFAULT_PROFILE)
    if isinstance(prof_block, dict):
        prof_block = dict(prof_block)
        for part in ("mass", "coupling"):
            if part in prof_block:
                prof_block[part] = _resolve_table_paths(
                    prof_block[part], path.parent, part)
    try:
        profile = TimeProfile.from_config(prof_block)
    except ValueError as exc:
        raise ConfigError(f"profile: {exc}") from exc

    cfg = RunConfig(profile=profile)
    if "levels" in raw:
        cfg = replace(cfg, levels=_validate_levels(raw["levels"]))
    if "times" in raw:
        cfg = replace(cfg, times=_validate_times(raw["times"], profile.window))
    if "grid" in raw:
        grid = raw["grid"]
        if not isinstance(grid, dict) or set(grid) - {"half_width", "dx"}:
            raise ConfigError("grid: takes exactly the keys half_width and dx")
        hw = float(grid.get("half_width", cfg.half_width))
        dx = float(grid.get("dx", cfg.dx))
        if hw <= 0 or dx <= 0:
            raise ConfigError("grid: half_width and dx must be positive")
        cfg = replace(cfg, half_width=hw, dx=dx)
    if "out" in raw:
        cfg = replace(cfg, out_dir=Path(str(raw["out"])))
    if "format" in raw:
        cfg = replace(cfg, fmt=str(raw["format"]))
    if "tolerances" in raw:
        tol = raw["tolerances"]
        if not isinstance(tol, dict):
            raise ConfigError("tolerances: must be a mapping")
        extra = set(tol) - set(_DEFAULT_TOLERANCES)
        if extra:
            raise ConfigError(f"tolerances: unknown keys {sorted(extra)}")
        merged = dict(_DEFAULT_TOLERANCES)
        merged.update({k: float(v) for k, v in tol.items()})
        cfg = replace(cfg, tolerances=merged)
    return cfg


def _apply_cli_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.n is not None:
        try:
            levels = [int(part) for part in args.n.split(",") if part.strip() != ""]
        except ValueError as exc:
            raise ConfigError(f"--n: {exc}") from exc
        cfg = replace(cfg, levels=_validate_levels(levels))
    if args.t is not None:
        try:
            times = [float(part) for part in args.t.split(",") if part.strip() != ""]
        except ValueError as exc:
            raise ConfigError(f"--t: {exc}") from exc
        cfg = replace(cfg, times=_validate_times(times, cfg.profile.window))
    if args.out is not None:
        cfg = replace(cfg, out_dir=Path(args.out))
    if args.format is not None:
        cfg = replace(cfg, fmt=args.format)
    if cfg.fmt not in ("csv", "json"):
        raise ConfigError(f"format: {cfg.fmt!r} is not csv or json")
    return cfg


def _require_grid_reach(cfg: RunConfig):
    """Grid commands need the box to clear the classical turning point."""
    lam_max = level(max(cfg.levels)).eigenvalue
    if cfg.half_width < lam_max + 10.0:
        raise ConfigError(
            f"grid: half_width {cfg.half_width} too small for level "
            f"{max(cfg.levels)} (needs at least {lam_max + 10.0:.2f})")


# ---------------------------------------------------------- formatting


def _sci(x: float) -> str:
    """12 significant digits, scientific, locale-independent."""
    return f"{float(x):.11e}"


def _round12(x: float) -> float:
    return float(_sci(x))


def _write_rows(path: Path, header, rows, fmt: str):
    """rows: iterables mixing strings/ints (kept) and floats (formatted)."""

    def cell(v):
        if isinstance(v, bool) or isinstance(v, (int, np.integer)):
            return v
        if isinstance(v, (float, np.floating)):
            return _sci(v) if fmt == "csv" else _round12(v)
        return v

    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([cell(v) for v in row])
    else:
        payload = [dict(zip(header, (cell(v) for v in row))) for row in rows]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _out_path(cfg: RunConfig, stem: str) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return cfg.out_dir / f"{stem}.{cfg.fmt}"


# ---------------------------------------------------------- subcommands


def run_zeros(cfg: RunConfig, stdout=None) -> int:
    """Both families of kernel zeros, one row per (family, index)."""
    indices = sorted({n for n in cfg.levels if n >= 1}) or list(range(1, 11))
    rows = []
    for k in indices:
        z = airy_function_zero(k)
        rows.append(("function", k, z.location,
                     float(airy_eval(z.location).ai_prime.real)))
        z = airy_derivative_zero(k)
        rows.append(("derivative", k, z.location,
                     float(airy_eval(z.location).ai.real)))
    path = _out_path(cfg, "zeros")
    _write_rows(path, ("family", "index", "location", "companion_value"),
                rows, cfg.fmt)
    if stdout:
        for row in rows:
            print(f"{row[0]:>10} {row[1]:>3}  {_sci(row[2])}", file=stdout)
        print(f"wrote {path}", file=stdout)
    return 0


def run_spectrum(cfg: RunConfig, stdout=None) -> int:
    rows = []
    for n in cfg.levels:
        lev = level(n)
        rows.append((n, lev.parity, lev.eigenvalue, lev.norm_const))
    path = _out_path(cfg, "spectrum")
    _write_rows(path, ("n", "parity", "eigenvalue", "norm_const"), rows, cfg.fmt)
    if stdout:
        for n, par, lam, nc in rows:
            print(f"n={n} {par:>4}  lambda={_sci(lam)}  norm={_sci(nc)}", file=stdout)
        print(f"wrote {path}", file=stdout)
    return 0


def run_density(cfg: RunConfig, stdout=None) -> int:
    """Per-level |phi_n|^2 on the fixed figure grid x in [-10, 10]."""
    x = np.round(np.arange(-1000, 1001) * 0.01, 10)
    written = []
    for n in cfg.levels:
        rho = density(n, x)
        path = _out_path(cfg, f"density_n{n}")
        _write_rows(path, ("x", "density"), zip(x, rho), cfg.fmt)
        written.append(path)
    if stdout:
        for path in written:
            print(f"wrote {path}", file=stdout)
    return 0


def run_solve(cfg: RunConfig, stdout=None) -> int:
    """Assembled closed-form state per (level, time) on the config grid."""
    _require_grid_reach(cfg)
    grid = Grid1D.centered(cfg.half_width, cfg.dx)
    xs = grid.nodes
    written = []
    for n in cfg.levels:
        for t in cfg.times:
            sample = assemble_wavefunction(cfg.profile, n, t, xs)
            rho = reconstructed_density(cfg.profile, n, t, xs)
            path = _out_path(cfg, f"solve_n{n}_t{t:g}")
            _write_rows(path,
                        ("x", "re", "im", "reconstructed_density"),
                        zip(xs, sample.values.real, sample.values.imag, rho),
                        cfg.fmt)
            written.append(path)
    if stdout:
        for path in written:
            print(f"wrote {path}", file=stdout)
    return 0


def _verify_jobs(cfg: RunConfig, wrong_sign_k: bool):
    _require_grid_reach(cfg)
    tol = cfg.tolerances
    full = Grid1D.centered(cfg.half_width, cfg.dx)
    halves = {1: Grid1D.half_line(cfg.half_width, cfg.dx, 1),
              2: Grid1D.half_line(cfg.half_width, cfg.dx, 2)}
    prof = cfg.profile
    jobs = []

    for n in cfg.levels:
        for t in cfg.times:
            jobs.append(("tdse_residual", {"n": n, "t": t}, tol["tdse"],
                         lambda n=n, t=t: tdse_residual(
                             prof, n, t, full, flip_coupling_sign=wrong_sign_k)))
    for n in cfg.levels:
        for region in (1, 2):
            for t in cfg.times:
                jobs.append(("invariant_eigen_residual",
                             {"n": n, "region": region, "t": t},
                             tol["invariant_eigen"],
                             lambda n=n, r=region, t=t: invariant_eigen_residual(
                                 prof, n, r, t, halves[r])))
    for region in (1, 2):
        for t in cfg.times:
            jobs.append(("von_neumann_residual", {"region": region, "t": t},
                         tol["von_neumann"],
                         lambda r=region, t=t: von_neumann_residual(
                             prof, r, t, halves[r])))
    rng = np.random.default_rng(20230816)
    t_hi = min(0.9 * prof.window, 1.5)
    for region in (1, 2):
        for t in sorted(rng.uniform(0.01, t_hi, 10)):
            jobs.append(("pseudo_hermiticity_check",
                         {"region": region, "t": round(float(t), 12)},
                         tol["pseudo_hermiticity"],
                         lambda r=region, t=float(t): pseudo_hermiticity_check(
                             prof, t, r)))
    return jobs


def run_verify(cfg: RunConfig, stdout=None, wrong_sign_k: bool = False) -> int:
    """Full residual suite; exit 0 only when every check passes."""
    cfg.profile.tables  # build the shared quadrature tables once, up front
    jobs = _verify_jobs(cfg, wrong_sign_k)
    with ThreadPoolExecutor(max_workers=4) as pool:
        values = list(pool.map(lambda job: job[3](), jobs))

    report = []
    for (check, params, threshold, _), value in zip(jobs, values):
        report.append({
            "check": check,
            "params": params,
            "value": _round12(value),
            "threshold": threshold,
            "pass": bool(value <= threshold),
        })
    report.sort(key=lambda r: (r["check"], json.dumps(r["params"], sort_keys=True)))

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "verify_report.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")

    ok = all(r["pass"] for r in report)
    if stdout:
        for r in report:
            mark = "pass" if r["pass"] else "FAIL"
            params = ",".join(f"{k}={v}" for k, v in sorted(r["params"].items()))
            print(f"[{mark}] {r['check']}({params}) = {_sci(r['value'])}"
                  f" vs {_sci(r['threshold'])}", file=stdout)
        n_fail = sum(not r["pass"] for r in report)
        print(f"{len(report)} checks, {n_fail} failed; wrote {path}", file=stdout)
    return 0 if ok else 1


# ----------------------------------------------------------------- main


def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML run configuration")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), help="table format")
    common.add_argument("--n", metavar="LIST", help="comma-separated level list")
    common.add_argument("--t", metavar="LIST", help="comma-separated time list")

    parser = argparse.ArgumentParser(
        prog="airywell",
        description="States of a variable-mass particle in a purely "
                    "imaginary linear well, plus their numerical checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("zeros", parents=[common],
                   help="kernel zeros of both families")
    sub.add_parser("spectrum", parents=[common],
                   help="eigenvalues and normalization constants")
    sub.add_parser("density", parents=[common],
                   help="per-level probability densities on [-10, 10]")
    sub.add_parser("solve", parents=[common],
                   help="closed-form states on the config grid")
    p_verify = sub.add_parser("verify", parents=[common],
                              help="run the residual suite")
    p_verify.add_argument("--wrong-sign-k", action="store_true",
                          help="negative control: flip the coupling sign "
                               "inside the evolution residual (must fail)")

    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            cfg = load_config(args.config)
        else:
            cfg = RunConfig(profile=TimeProfile.from_config(_DEFAULT_PROFILE))
        cfg = _apply_cli_overrides(cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    runner = {
        "zeros": run_zeros,
        "spectrum": run_spectrum,
        "density": run_density,
        "solve": run_solve,
    }
    try:
        if args.command == "verify":
            return run_verify(cfg, stdout=sys.stdout,
                              wrong_sign_k=args.wrong_sign_k)
        return runner[args.command](cfg, stdout=sys.stdout)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
