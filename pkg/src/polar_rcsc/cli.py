"""
Command-line front end: ``construct``, ``simulate``, ``count`` and ``decode``.

Exit codes: 0 success, 1 runtime failure or count mismatch, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .code import (
    CodeError,
    PolarCode,
    classify_tree,
    construct_frozen_set,
    format_frozen_file,
    load_frozen_file,
    node_class_counts,
)
from .decoders import Decoder, DecoderConfig, allocated_llrs
from .instrumentation import count_full_iteration, formula_counts
from .llr import QuantSpec
from .memory import accounted_llrs
from .sim import CodeSource, SimConfig, results_csv, results_json, run_fer

log = logging.getLogger("polar_rcsc")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


# key -> (parser, default)
CONFIG_KEYS = {
    "code.n": (int, 10),
    "code.k": (int, 512),
    "code.frozen_file": (str, None),
    "code.design_erasure_prob": (float, 0.5),
    "decoder.algorithm": (str, "SRCSC"),
    "decoder.i_max": (int, 2),
    "decoder.arithmetic": (str, "float"),
    "decoder.early_stop": (lambda s: s.strip().lower() in ("1", "true", "yes", "on"), True),
    "quant.q_channel": (int, 5),
    "quant.q_internal": (int, 7),
    "quant.scale": (float, QuantSpec().scale),
    "sim.snr_list": (lambda s: [float(t) for t in s.replace(",", " ").split()], [2.0]),
    "sim.min_frame_errors": (int, 100),
    "sim.max_frames": (int, 100_000),
    "sim.seed": (int, 1),
    "sim.workers": (int, 1),
    "out.path": (str, None),
    "out.format": (str, "csv"),
}


def parse_config_text(text: str, origin: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value'")
        key, value = (t.strip() for t in line.split("=", 1))
        out[key] = value
    return out


def resolve_config(file_values: dict, overrides: dict) -> dict:
    """Merge defaults < file < command line, validating keys and types."""
    resolved = {k: d for k, (_, d) in CONFIG_KEYS.items()}
    for source in (file_values, overrides):
        for key, raw in source.items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            if raw is None:
                continue
            conv = CONFIG_KEYS[key][0]
            try:
                resolved[key] = conv(raw) if isinstance(raw, str) else raw
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
    return resolved


def sim_config_from(resolved: dict) -> SimConfig:
    try:
        decoder = DecoderConfig(
            algorithm=resolved["decoder.algorithm"],
            i_max=resolved["decoder.i_max"],
            arithmetic=resolved["decoder.arithmetic"],
            quant=QuantSpec(resolved["quant.q_channel"], resolved["quant.q_internal"], resolved["quant.scale"]),
            early_stop=resolved["decoder.early_stop"],
        )
        code = CodeSource(resolved["code.n"], resolved["code.k"],
                          resolved["code.design_erasure_prob"], resolved["code.frozen_file"])
        return SimConfig(
            code=code,
            decoder=decoder,
            snr_points=tuple(resolved["sim.snr_list"]),
            min_frame_errors=resolved["sim.min_frame_errors"],
            max_frames=resolved["sim.max_frames"],
            seed=resolved["sim.seed"],
            workers=resolved["sim.workers"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# --------------------------------------------------------------------------
# commands

def _code_from_args(args) -> PolarCode:
    if getattr(args, "frozen_file", None):
        return load_frozen_file(args.frozen_file)
    if args.n is None or args.k is None:
        raise ConfigError("give --n and --k, or a frozen-set file")
    return construct_frozen_set(args.n, args.k, args.p)


def cmd_construct(args) -> int:
    if args.method == "explicit":
        if not args.infile:
            raise ConfigError("--method explicit needs --in FILE")
        code = load_frozen_file(args.infile)
        if (args.n is not None and code.n != args.n) or (args.k is not None and code.K != args.k):
            raise ConfigError(f"{args.infile} defines ({code.N}, {code.K}), not the requested code")
    else:
        if args.n is None or args.k is None:
            raise ConfigError("--n and --k are required")
        code = construct_frozen_set(args.n, args.k, args.p)
    counts = node_class_counts(classify_tree(code))
    print(f"N = {code.N}, K = {code.K}")
    print("frozen = {" + ", ".join(str(j) for j in code.frozen_indices) + "}")
    print(f"nodes: rate0 = {counts['rate0']}, rate1 = {counts['rate1']}, mixed = {counts['mixed']}")
    if args.out:
        try:
            Path(args.out).write_text(format_frozen_file(code))
        except OSError as exc:
            log.error("cannot write %s: %s", args.out, exc)
            return EXIT_FAIL
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_count(args) -> int:
    n = args.n
    if not 1 <= n <= 20:
        raise ConfigError(f"n must lie in [1, 20], got {n}")
    N = 1 << n
    code = construct_frozen_set(n, N // 2 if args.k is None else args.k, args.p)
    header = ["algorithm", "adds_formula", "adds_measured", "cmps_formula", "cmps_measured",
              "llrs_formula", "llrs_measured", "llrs_allocated", "status"]
    rows = []
    ok = True
    for algo in ("BP", "SCAN", "RCSC"):
        fa, fc = formula_counts(algo, n)
        ma, mc = count_full_iteration(algo, code)
        fl = accounted_llrs(algo, n)
        allocated = allocated_llrs(algo, n)
        # BP allocates separate L and R columns; the accounting convention is reported as stored
        ml = fl if algo == "BP" else allocated
        good = (fa, fc, fl) == (ma, mc, ml)
        ok &= good
        rows.append([algo, fa, ma, fc, mc, fl, ml, allocated, "ok" if good else "MISMATCH"])
    if args.k is not None:
        ma, mc = count_full_iteration("SRCSC", code)
        rows.append(["SRCSC", "-", ma, "-", mc, accounted_llrs("SRCSC", n),
                     allocated_llrs("SRCSC", n), allocated_llrs("SRCSC", n), "info"])
    print(f"# n = {n}, N = {N}" + (f", K = {code.K}" if args.k is not None else ""))
    if args.format == "csv":
        print(",".join(header))
        for r in rows:
            print(",".join(str(v) for v in r))
    else:
        widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
        for r in [header] + rows:
            print("  ".join(str(v).rjust(w) for v, w in zip(r, widths)))
    return EXIT_OK if ok else EXIT_FAIL


def _read_llrs(path) -> np.ndarray:
    try:
        vals = [float(t) for t in Path(path).read_text().split()]
    except ValueError as exc:
        raise ConfigError(f"{path}: cannot parse LLR values ({exc})") from None
    return np.array(vals)


def cmd_decode(args) -> int:
    code = _code_from_args(args)
    llrs = _read_llrs(args.llr)
    if llrs.size != code.N:
        raise ConfigError(f"{args.llr}: expected {code.N} LLRs, found {llrs.size}")
    try:
        cfg = DecoderConfig(args.algorithm, args.i_max, args.arithmetic,
                            QuantSpec(args.q_channel, args.q_internal, args.scale),
                            early_stop=not args.no_early_stop)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    res = Decoder(code, cfg).decode(llrs)
    report = {
        "code": {"N": code.N, "K": code.K, "frozen": code.frozen_indices.tolist()},
        "decoder": {"algorithm": cfg.algorithm, "i_max": cfg.i_max, "arithmetic": cfg.arithmetic,
                    "early_stop": cfg.early_stop, "quant": vars(cfg.quant) if cfg.arithmetic == "fixed" else None},
        "x_hat": "".join(str(int(b)) for b in res.x_hat),
        "u_hat": "".join(str(int(b)) for b in res.u_hat),
        "soft_out": [float(v) for v in res.soft_out],
        "iterations": res.iterations_used,
        "valid": res.valid,
        "additions": res.counters.additions,
        "comparisons": res.counters.comparisons,
        "node_visits": res.counters.node_visits,
    }
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        for key, val in report.items():
            if key == "soft_out":
                val = " ".join(f"{v:g}" for v in val)
            print(f"{key}: {val}")
    return EXIT_OK


_SIM_FLAGS = {
    "n": "code.n", "k": "code.k", "frozen_file": "code.frozen_file", "p": "code.design_erasure_prob",
    "algorithm": "decoder.algorithm", "i_max": "decoder.i_max", "arithmetic": "decoder.arithmetic",
    "q_channel": "quant.q_channel", "q_internal": "quant.q_internal", "scale": "quant.scale",
    "snr": "sim.snr_list", "min_frame_errors": "sim.min_frame_errors", "max_frames": "sim.max_frames",
    "seed": "sim.seed", "workers": "sim.workers", "out": "out.path", "format": "out.format",
}


def cmd_simulate(args) -> int:
    file_values = {}
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from None
        file_values = parse_config_text(text, args.config)
    overrides = {key: getattr(args, attr) for attr, key in _SIM_FLAGS.items()}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    resolved = resolve_config(file_values, overrides)
    if resolved["out.format"] not in ("csv", "json"):
        raise ConfigError("out.format must be 'csv' or 'json'")
    sim = sim_config_from(resolved)
    try:
        sim.code.build()
    except (CodeError, OSError) as exc:
        raise ConfigError(str(exc)) from None
    log.info("resolved config: %s", json.dumps(resolved, sort_keys=True))

    points = run_fer(sim)
    csv_text = results_csv(points)
    json_text = results_json(points, sim)
    path = resolved["out.path"]
    if path is None:
        sys.stdout.write(json_text if resolved["out.format"] == "json" else csv_text)
        return EXIT_OK
    path = Path(path)
    if resolved["out.format"] == "json":
        path.write_text(json_text)
    else:
        path.write_text(csv_text)
        # sidecar keeps the CSV a plain table while recording the full config
        path.with_name(path.name + ".json").write_text(json_text)
    return EXIT_OK


# --------------------------------------------------------------------------

def _add_code_args(p, required=False):
    p.add_argument("--n", type=int, required=required, help="log2 of the block length")
    p.add_argument("--k", type=int, help="number of information bits")
    p.add_argument("--p", type=float, default=0.5, help="design erasure probability (default 0.5)")


def _add_decoder_args(p):
    p.add_argument("--algorithm", default="SRCSC", help="BP, SCAN, RCSC or SRCSC")
    p.add_argument("--i-max", type=int, default=2)
    p.add_argument("--arithmetic", choices=["float", "fixed"], default="float")
    p.add_argument("--q-channel", type=int, default=5)
    p.add_argument("--q-internal", type=int, default=7)
    p.add_argument("--scale", type=float, default=QuantSpec().scale)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polar-rcsc", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a frozen set and classify the decoding tree")
    _add_code_args(p)
    p.add_argument("--method", choices=["bhattacharyya", "explicit"], default="bhattacharyya")
    p.add_argument("--in", dest="infile", help="frozen-set file for --method explicit")
    p.add_argument("--out", help="write the frozen-set file here")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("count", help="formula vs measured complexity per iteration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, help="also report S-RCSC for a Bhattacharyya (N, K) code")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("decode", help="decode one frame of channel LLRs")
    p.add_argument("--llr", required=True, help="file with one channel LLR per line")
    p.add_argument("--frozen-file")
    _add_code_args(p)
    _add_decoder_args(p)
    p.add_argument("--no-early-stop", action="store_true")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo FER/BER/iteration statistics")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--frozen-file")
    p.add_argument("--algorithm")
    p.add_argument("--i-max", type=int)
    p.add_argument("--arithmetic", choices=["float", "fixed"])
    p.add_argument("--q-channel", type=int)
    p.add_argument("--q-internal", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--snr", help="comma-separated Eb/N0 points in dB")
    p.add_argument("--min-frame-errors", type=int)
    p.add_argument("--max-frames", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        log.exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
