"""Command-line front end: ``cvsym <command> [options]``.

Options may also come from a JSON file given with ``--config``; flags given
on the command line win. Exit codes: 0 success, 2 configuration error,
3 a requested numeric check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import classical_definetti, definetti_core, phase_space, sim_channel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3

DEFAULTS = {
    "definetti-sweep": {"n": [1], "N": [2, 4, 8, 16, 32, 64], "k": None, "x": None, "format": "csv"},
    "symmetrize": {"input": None, "samples": 10000, "seed": 0, "check_physical": False, "format": "json"},
    "classical-sweep": {"n": [50, 100, 200, 400, 800, 1600, 3200], "k": [1], "format": "csv"},
    "channel-check": {"runs": 200, "n": 10000, "t": 0.8, "sigma2": 0.5, "va": 4.0, "seed": 0, "format": "csv"},
    "haar-sample": {"m": 1, "seed": 0, "format": "json"},
}


class ConfigError(Exception):
    pass


class CheckFailed(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvsym", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json")):
        p.add_argument("--config", type=Path, help="JSON file with option values")
        p.add_argument("--output", "-o", type=Path, help="write here instead of stdout")
        p.add_argument("--format", choices=formats, default=None)

    p = sub.add_parser("definetti-sweep", help="exact trace distance and sup bound over (n, N, k)")
    common(p)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--N", type=int, nargs="+")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--k", type=int, nargs="+", help="photon numbers")
    group.add_argument("--x", type=_fraction, nargs="+", help="photons per mode, k = x N")

    p = sub.add_parser("symmetrize", help="closed-form and Monte-Carlo symmetrization of a covariance file")
    common(p, formats=("json",))
    p.add_argument("--input", "-i", type=Path)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--check-physical", action="store_true", default=None)

    p = sub.add_parser("classical-sweep", help="variation distance of sphere marginals to the normal law")
    common(p)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--k", type=int, nargs="+")

    p = sub.add_parser("channel-check", help="estimator invariance under joint random rotations")
    common(p)
    p.add_argument("--runs", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--va", type=float)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("haar-sample", help="emit one Haar-random passive rotation as JSON")
    common(p, formats=("json",))
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge built-in defaults, the optional config file and explicit flags."""
    defaults = DEFAULTS[args.command]
    cfg = dict(defaults)
    if args.config is not None:
        try:
            loaded = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(defaults) - {"output"})
        if unknown:
            raise ConfigError(f"unknown config key(s) for {args.command}: {unknown}")
        cfg.update(loaded)
    for key in list(defaults) + ["output"]:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if args.command == "definetti-sweep" and args.k is not None:
        cfg["x"] = None
    if args.command == "definetti-sweep" and args.x is not None:
        cfg["k"] = None
    for key, value in cfg.items():
        if isinstance(value, list) and not value:
            raise ConfigError(f"range {key!r} is empty")
    return cfg


# -- output -------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    # repr is the shortest string that parses back to the same double
    return repr(float(value))


def _jsonable(value):
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def format_rows(rows: list[dict], columns, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: _jsonable(r[c]) for c in columns} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def _emit(text: str, cfg: dict) -> None:
    out = cfg.get("output")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------

DEFINETTI_COLUMNS = (
    "n",
    "N",
    "k",
    "trace_distance",
    "trace_distance_exact",
    "sup_bound",
    "sup_bound_exact",
    "argmax",
    "asymptote",
    "bound_times_N_over_n",
)


def definetti_instances(cfg: dict) -> list:
    ns, Ns = cfg["n"], cfg["N"]
    ks, xs = cfg.get("k"), cfg.get("x")
    if ks is None and xs is None:
        xs = [Fraction(1)]
    out = []
    for n in ns:
        for N in Ns:
            if n < 1 or N <= n:
                continue
            if ks is not None:
                candidates = ks
            else:
                candidates = []
                for x in xs:
                    k = Fraction(x) * N
                    if k.denominator != 1 or k < 0:
                        raise ConfigError(f"x={x} gives non-integer or negative k at N={N}")
                    candidates.append(int(k))
            for k in candidates:
                if k < 0:
                    raise ConfigError(f"k must be >= 0, got {k}")
                out.append(definetti_core.DefinettiInstance(n, N, k))
    if not out:
        raise ConfigError("no valid (n, N, k) combination with 1 <= n < N")
    return out


def cmd_definetti_sweep(cfg: dict) -> list[dict]:
    rows = definetti_core.sweep(definetti_instances(cfg))
    for r in rows:
        r["trace_distance_exact"] = str(r["trace_distance"])
        r["sup_bound_exact"] = None if r["sup_bound"] is None else str(r["sup_bound"])
    return rows


def cmd_symmetrize(cfg: dict) -> dict:
    if cfg.get("input") is None:
        raise ConfigError("symmetrize needs --input")
    try:
        text = Path(cfg["input"]).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {cfg['input']}: {exc}") from exc
    try:
        cov = phase_space.CovarianceMatrix.from_json(text)
    except phase_space.CovarianceFormatError as exc:
        raise ConfigError(f"malformed covariance file: {exc}") from exc
    if cov.modes % 2:
        raise ConfigError(f"need an even number of modes (two parties), got {cov.modes}")
    samples = int(cfg["samples"])
    if samples < 2:
        raise ConfigError("samples must be >= 2 for standard errors")

    gamma = cov.entries
    block = phase_space.mode_averaged_block(gamma)
    sym = phase_space.symmetrize_covariance(block)
    mc = phase_space.mc_symmetrize(gamma, samples, cfg["seed"])
    diff = mc.mean - sym.matrix()
    # entries that are exact invariants have a stderr at rounding level
    floor = 64 * np.finfo(float).eps * max(1.0, float(np.abs(gamma).max()))
    dev = np.abs(diff) / np.maximum(mc.stderr, floor)
    report = {
        "X": float(sym.X),
        "Y": float(sym.Y),
        "Z": float(sym.Z),
        "gamma_sym": sym.matrix().tolist(),
        "group_average": phase_space.twirl_block(block).tolist(),
        "samples": samples,
        "seed": cfg["seed"],
        "mc_mean": mc.mean.tolist(),
        "mc_stderr": mc.stderr.tolist(),
        "deviation_in_stderr": dev.tolist(),
        "max_deviation_in_stderr": float(dev.max()),
    }
    if cfg["check_physical"]:
        report["input_physical"] = cov.is_physical()
        report["symmetrized_physical"] = sym.is_physical()
        if not (report["input_physical"] and report["symmetrized_physical"]):
            raise CheckFailed(json.dumps(report, indent=2))
    return report


def cmd_classical_sweep(cfg: dict) -> list[dict]:
    for n in cfg["n"]:
        for k in cfg["k"]:
            if k not in (1, 2):
                raise ConfigError(f"only k in {{1, 2}} is supported, got k={k}")
            if n < k + 3:
                raise ConfigError(f"n={n} too small for k={k}: need n >= k + 3")
    return classical_definetti.sweep(cfg["n"], cfg["k"])


def cmd_channel_check(cfg: dict) -> list[dict]:
    try:
        model = sim_channel.ChannelModel(cfg["t"], cfg["sigma2"], cfg["va"], cfg["n"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["runs"] < 1:
        raise ConfigError("runs must be >= 1")
    return sim_channel.channel_check(model, cfg["runs"], cfg["seed"])


def cmd_haar_sample(cfg: dict) -> dict:
    if cfg["m"] < 1:
        raise ConfigError("m must be >= 1")
    S = phase_space.haar_symplectic_orthogonal(cfg["m"], cfg["seed"])
    return {
        "modes": cfg["m"],
        "ordering": "interleaved",
        "entries": S.ravel().tolist(),
        "seed": cfg["seed"],
        "orthogonality_residual": phase_space.orthogonality_residual(S),
        "symplectic_residual": phase_space.symplectic_residual(S),
    }


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        cmd = args.command
        fmt = cfg["format"]
        if cmd == "definetti-sweep":
            text = format_rows(cmd_definetti_sweep(cfg), DEFINETTI_COLUMNS, fmt)
        elif cmd == "classical-sweep":
            text = format_rows(cmd_classical_sweep(cfg), ("n", "k", "tv", "tv_n_over_k"), fmt)
        elif cmd == "channel-check":
            text = format_rows(cmd_channel_check(cfg), sim_channel.CSV_COLUMNS, fmt)
        elif cmd == "symmetrize":
            text = json.dumps(cmd_symmetrize(cfg), indent=2) + "\n"
        else:
            text = json.dumps(cmd_haar_sample(cfg), indent=2) + "\n"
    except ConfigError as exc:
        print(f"cvsym {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckFailed as exc:
        print(f"cvsym {args.command}: numeric check failed", file=sys.stderr)
        sys.stdout.write(str(exc) + "\n")
        return EXIT_CHECK
    except ValueError as exc:
        print(f"cvsym {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(text, cfg)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
