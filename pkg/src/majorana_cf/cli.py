"""Command-line interface.

Commands
--------
spectrum  continued-fraction response table
oracle    time-domain response table
compare   both methods, peak reports and the match table
bcs       gap-equation solution
figure5   ``compare`` over the four figure5 presets
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .bcs import BcsModel, gap_residual, solve_gap
from .cfrac import (DegenerateDenominatorError, ResponseSpectrum, SingularLatticeError,
                    assemble_response)
from .kernel import BandKernel, DriveSpec, PoleOnGridError, Regularization
from .oracle import ResolutionError, default_dt, propagate
from .spectrum import (DecayGuardError, MatchTable, PeakReport, compare_peaks, damped_transform,
                       find_peaks, minimal_window)

COLUMNS = ("omega_over_delta", "re_K", "im_K", "abs_K", "re_B", "im_B")

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3, 4

PRESETS = {
    "figure5-a": dict(epsilon=4.0, amplitude=2.05, omega_drive=4.0),
    "figure5-b": dict(epsilon=4.0, amplitude=2.05, omega_drive=3.0),
    "figure5-c": dict(epsilon=1 / 3, amplitude=1 / 6, omega_drive=4 / 3),
    "figure5-d": dict(epsilon=1 / 7, amplitude=1 / 28, omega_drive=2 / 7),
}
for _p in PRESETS.values():
    _p.update(gamma=0.01, omega_min=0.0, omega_max=10.0, n_points=2000)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters; energies in units of ``Delta``."""

    command: str = "spectrum"
    preset: str | None = None
    epsilon: float = 1.0
    amplitude: float = 0.0
    omega_drive: float = 1.0
    gamma: float = 0.01
    omega_min: float = 0.0
    omega_max: float = 10.0
    n_points: int = 2000
    depth: int = 5
    n_gamma: int = 8
    scope: str = "band"
    dt_factor: float = 1e-3
    window: float | None = None
    tol: float = 0.05
    prominence: float = 0.05
    oracle_prominence: float = 0.01
    g: float = 1.0
    n0: float = 1.0
    epsilon_k: float = 0.0
    cutoff: float = 100.0
    out: str | None = None
    format: str = "csv"

    def validate(self) -> "RunConfig":
        if self.n_points < 16:
            raise ConfigError("n_points must be >= 16")
        if not (self.omega_max > self.omega_min >= 0):
            raise ConfigError("need omega_max > omega_min >= 0")
        if self.depth < 1:
            raise ConfigError("depth must be >= 1")
        if self.n_gamma < 0:
            raise ConfigError("n_gamma must be >= 0")
        if not self.gamma > 0:
            raise ConfigError("gamma must be > 0")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.scope not in ("band", "full"):
            raise ConfigError("scope must be band or full")
        if self.tol < 0 or not self.prominence > 0 or not self.oracle_prominence > 0:
            raise ConfigError("tol must be >= 0 and prominences > 0")
        return self

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.n_points)

    @property
    def drive(self) -> DriveSpec:
        return DriveSpec.monochromatic(self.epsilon, self.amplitude, self.omega_drive)

    @property
    def kernel(self) -> BandKernel:
        return BandKernel(self.drive, Regularization(self.gamma, self.scope))


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_KEYS = {"n_points", "depth", "n_gamma"}
_STR_KEYS = {"command", "preset", "scope", "out", "format"}


def _coerce(key: str, value):
    if value is None:
        return None
    if key in _INT_KEYS:
        return int(value)
    if key in _STR_KEYS:
        return str(value)
    return float(value)


def parse_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ConfigError(f"grid must be min:max:n, got {text!r}") from exc


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, keys match the flags."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key == "grid":
            out["omega_min"], out["omega_max"], out["n_points"] = parse_grid(value)
            continue
        if key not in _FIELD_TYPES or key == "command":
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}") from exc
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge preset, config file and flags (flags win)."""
    merged: dict = {"command": args.command}
    file_vals = read_config_file(args.config) if getattr(args, "config", None) else {}
    preset = getattr(args, "preset", None) or file_vals.get("preset")
    if preset:
        name = preset if preset.startswith("figure5-") else f"figure5-{preset}"
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        merged.update(PRESETS[name], preset=name)
    merged.update({k: v for k, v in file_vals.items() if k != "preset"})
    flags = {k: v for k, v in vars(args).items() if k in _FIELD_TYPES and v is not None}
    flags.pop("command", None)
    flags.pop("preset", None)
    if getattr(args, "grid", None):
        flags["omega_min"], flags["omega_max"], flags["n_points"] = parse_grid(args.grid)
    merged.update(flags)
    return RunConfig(**merged).validate()


# output ----------------------------------------------------------------------

def spectrum_columns(spec: ResponseSpectrum) -> dict[str, np.ndarray]:
    b = spec.b_values if spec.b_values is not None else np.full(spec.grid.shape, np.nan + 0j)
    return {
        "omega_over_delta": spec.grid / (spec.drive.delta or 1.0),
        "re_K": spec.values.real,
        "im_K": spec.values.imag,
        "abs_K": np.abs(spec.values),
        "re_B": b.real,
        "im_B": b.imag,
    }


def format_csv(spec: ResponseSpectrum) -> str:
    cols = spectrum_columns(spec)
    rows = [",".join(COLUMNS)]
    for vals in zip(*(cols[c] for c in COLUMNS)):
        rows.append(",".join(f"{float(v):.16e}" for v in vals))
    return "\n".join(rows) + "\n"


def _json_list(a: np.ndarray) -> list:
    return [None if np.isnan(v) else float(v) for v in a]


def spectrum_document(spec: ResponseSpectrum, config: RunConfig) -> dict:
    cols = spectrum_columns(spec)
    return {
        "config": asdict(config),
        "metadata": {
            "depth": spec.depth,
            "n_gamma": spec.n_gamma_terms,
            "gamma": spec.gamma_used,
            "method_tag": spec.method_tag,
            "version": __version__,
        },
        "columns": {c: _json_list(cols[c]) for c in COLUMNS},
    }


def _finite(obj):
    # strict JSON has no inf/nan; config scalars such as an infinite cutoff become strings
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def format_json(doc: dict) -> str:
    return json.dumps(_finite(doc), indent=1, allow_nan=False) + "\n"


def spectrum_from_document(doc: dict) -> ResponseSpectrum:
    """Rebuild a spectrum from its JSON document."""
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in doc["config"].items()})
    meta = doc["metadata"]
    col = {k: np.array([np.nan if v is None else v for v in vals], dtype=float)
           for k, vals in doc["columns"].items()}
    b = col["re_B"] + 1j * col["im_B"]
    return ResponseSpectrum(
        col["omega_over_delta"],
        col["re_K"] + 1j * col["im_K"],
        meta["depth"],
        meta["gamma"],
        meta["n_gamma"],
        cfg.drive,
        b_values=None if np.all(np.isnan(b.real)) else b,
        method_tag=meta["method_tag"],
    )


def report_document(report: PeakReport) -> dict:
    return {
        "method_tag": report.method_tag,
        "window": list(report.window),
        "threshold": report.threshold,
        "rel_threshold": report.rel_threshold,
        "peaks": [asdict(p) for p in report.peaks],
    }


def match_document(match: MatchTable) -> dict:
    return {
        "success": match.success,
        "pairs": [{"a": p.omega_over_delta, "b": q.omega_over_delta, "offset": d}
                  for p, q, d in match.pairs],
        "unmatched_a": [p.omega_over_delta for p in match.unmatched_a],
        "unmatched_b": [p.omega_over_delta for p in match.unmatched_b],
    }


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _write_spectrum(spec: ResponseSpectrum, config: RunConfig, path: str | None):
    if config.format == "csv":
        _emit(format_csv(spec), path)
    else:
        _emit(format_json(spectrum_document(spec, config)), path)


def _sibling(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{tag}{p.suffix}"))


# runners -----------------------------------------------------------------------

def compute_spectrum(config: RunConfig) -> ResponseSpectrum:
    return assemble_response(config.kernel, config.grid, config.depth, config.n_gamma)


def compute_oracle(config: RunConfig) -> ResponseSpectrum:
    drive = config.drive
    T = config.window if config.window is not None else 1.05 * minimal_window(config.gamma)
    dt = default_dt(drive, config.dt_factor)
    trace = propagate(drive, dt, int(np.ceil(T / dt)))
    return damped_transform(trace, config.gamma, config.grid)


def run_spectrum(config: RunConfig) -> int:
    _write_spectrum(compute_spectrum(config), config, config.out)
    return EXIT_OK


def run_oracle(config: RunConfig) -> int:
    _write_spectrum(compute_oracle(config), config, config.out)
    return EXIT_OK


def compare_document(config: RunConfig):
    cf = compute_spectrum(config)
    td = compute_oracle(config)
    window = (config.omega_min, config.omega_max)
    pc = find_peaks(cf, config.prominence, window)
    po = find_peaks(td, config.oracle_prominence, window)
    match = compare_peaks(pc, po, config.tol)
    doc = {
        "config": asdict(config),
        "version": __version__,
        "peaks": {"continued_fraction": report_document(pc), "time_domain": report_document(po)},
        "match": match_document(match),
    }
    return cf, td, doc, match.success


def run_compare(config: RunConfig) -> int:
    cf, td, doc, ok = compare_document(config)
    if config.out is None:
        _emit(format_json(doc), None)
    elif config.format == "json":
        doc["spectra"] = {
            "continued_fraction": spectrum_document(cf, config),
            "time_domain": spectrum_document(td, config),
        }
        _emit(format_json(doc), config.out)
    else:
        _write_spectrum(cf, config, config.out)
        _write_spectrum(td, config, _sibling(config.out, "oracle"))
        _emit(format_json(doc), str(Path(config.out).with_suffix(".peaks.json")))
    return EXIT_OK if ok else EXIT_MISMATCH


def run_figure5(config: RunConfig) -> int:
    outdir = Path(config.out or "figure5")
    summary = {}
    ok_all = True
    for name, preset in PRESETS.items():
        cfg = replace(config, preset=name, **preset, out=str(outdir / f"{name}.{config.format}"))
        ok = run_compare(cfg) == EXIT_OK
        summary[name] = ok
        ok_all &= ok
    _emit(format_json({"version": __version__, "success": summary}), str(outdir / "summary.json"))
    return EXIT_OK if ok_all else EXIT_MISMATCH


def run_bcs(config: RunConfig) -> int:
    model = BcsModel(config.g, config.n0, config.epsilon_k, config.cutoff)
    d0 = solve_gap(model)
    res = gap_residual(model, d0) if np.hypot(config.epsilon_k, d0) > 0 else float("nan")
    doc = {"g": config.g, "n0": config.n0, "epsilon_k": config.epsilon_k,
           "cutoff": config.cutoff, "delta0": d0,
           "residual": None if np.isnan(res) else res, "version": __version__}
    _emit(format_json(doc), config.out)
    return EXIT_OK


RUNNERS = {
    "spectrum": run_spectrum,
    "oracle": run_oracle,
    "compare": run_compare,
    "bcs": run_bcs,
    "figure5": run_figure5,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--preset", help="figure5-{a,b,c,d} (or a-d)")
    common.add_argument("--epsilon", type=float, help="eps / Delta")
    common.add_argument("--amplitude", type=float, help="A / Delta")
    common.add_argument("--omega-drive", dest="omega_drive", type=float, help="w / Delta")
    common.add_argument("--gamma", type=float, help="gamma / Delta")
    common.add_argument("--grid", help="omega_min:omega_max:n_points in units of Delta")
    common.add_argument("--depth", type=int, help="continued-fraction depth")
    common.add_argument("--n-gamma", dest="n_gamma", type=int, help="off-diagonal terms per side")
    common.add_argument("--scope", choices=("band", "full"), help="regularization scope")
    common.add_argument("--dt-factor", dest="dt_factor", type=float,
                        help="time step as a fraction of 2 pi / max(w, Omega)")
    common.add_argument("--window", type=float, help="time window T in units of 1/Delta")
    common.add_argument("--tol", type=float, help="peak matching tolerance")
    common.add_argument("--prominence", type=float, help="relative prominence cut (lattice)")
    common.add_argument("--oracle-prominence", dest="oracle_prominence", type=float,
                        help="relative prominence cut (time domain)")
    common.add_argument("--out", help="output path (directory for figure5)")
    common.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="majorana-cf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "oracle", "compare", "figure5"):
        sub.add_parser(name, parents=[common])
    bcs = sub.add_parser("bcs", parents=[common])
    bcs.add_argument("--g", type=float)
    bcs.add_argument("--n0", type=float)
    bcs.add_argument("--epsilon-k", dest="epsilon_k", type=float)
    bcs.add_argument("--cutoff", type=float)
    return parser


def _fail(code: int, kind: str, exc: BaseException) -> int:
    record = {"status": "error", "kind": kind, "type": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(record) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
    except (ConfigError, ValueError, TypeError) as exc:
        return _fail(EXIT_CONFIG, "validation", exc)
    except OSError as exc:
        return _fail(EXIT_IO, "io", exc)
    try:
        return RUNNERS[config.command](config)
    except OSError as exc:
        return _fail(EXIT_IO, "io", exc)
    except (PoleOnGridError, DegenerateDenominatorError, SingularLatticeError, ResolutionError,
            DecayGuardError, ArithmeticError, RuntimeError, ValueError) as exc:
        return _fail(EXIT_SOLVER, "solver", exc)


if __name__ == "__main__":
    sys.exit(main())
