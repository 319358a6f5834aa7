"""
Command-line front end.

    zakzcz generate T2 --r 3 --t 5 --q 1 --rows 0,1 --out r3t5.json
    zakzcz verify r3t5.json
    zakzcz correlate r3t5.json --pair 1,0 2,1
    zakzcz af family.json --set 0 --seq 1
    zakzcz florentine gen-prime 5
    zakzcz otfs-sim campaign.json --mode sync --out results/

Exit codes: 0 success, 1 property violation or not-found, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from datetime import datetime, timezone
from math import sqrt
from pathlib import Path

import numpy as np

from . import florentine, otfssim, seqanalysis
from .io import SCHEMA_VERSION, read_family, write_csv, write_family, write_manifest
from .zakcore import fzt
from .zczgen import THEOREMS, generate_family

DEFAULT_SEED = 2024

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _out_path(args, default_name: str) -> Path | None:
    """``--out`` naming a file is used as is; a directory gets ``default_name``."""
    if args.out is None:
        return None
    out = Path(args.out)
    if out.suffix in (".json", ".csv"):
        out.parent.mkdir(parents=True, exist_ok=True)
        return out
    out.mkdir(parents=True, exist_ok=True)
    return out / default_name


def _emit(text: str, path: Path | None, args=None):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)
        print(f"wrote {path}", file=sys.stderr)
        if args is not None:
            _manifest(args, [path])


def _manifest(args, outputs, config=None):
    """Write ``<first output>.manifest.json`` next to the outputs."""
    first = Path(outputs[0])
    if config is None:
        config = {k: v for k, v in vars(args).items() if k not in ("func", "argv", "started")}
    return write_manifest(
        first.with_suffix(".manifest.json"),
        ["zakzcz", *args.argv],
        config,
        args.seed,
        outputs,
        args.started,
    )


def _json(obj) -> str:
    return json.dumps(obj, indent=1, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, (np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


# --- generate / verify ----------------------------------------------------


def cmd_generate(args) -> int:
    try:
        fam = generate_family(
            args.theorem,
            args.r,
            args.t,
            q=args.q,
            rows=_ints(args.rows) if args.rows else None,
            index_matrix=[_ints(r) for r in args.index_row] if args.index_row else None,
        )
    except (ValueError, RuntimeError) as exc:
        raise UsageError(str(exc)) from None
    name = f"{args.theorem}_R{args.r}_T{args.t}" + (f"_q{fam.q}" if fam.q else "") + ".json"
    path = _out_path(args, name) or Path(name)
    write_family(fam, path, exact=not args.complex)
    _manifest(args, [path])
    exp = fam.expected()
    theta = "not applicable" if exp["theta_c_family"] is None else f"{exp['theta_c_family']:.6g}"
    print(
        f"{path}: N={fam.N} M={fam.M} sets x T={fam.T} sequences, Z={exp['Z']}, "
        f"index source {fam.source}, expected inter-set theta_c={theta}"
    )
    return EXIT_OK


def _certificate(fam, tol) -> dict:
    cert = seqanalysis.certify_family(fam.sequences, fam.R, fam.T, tol)
    sets = fam.sequences
    inter = cert["inter_set"]
    report = {
        "schema_version": SCHEMA_VERSION,
        "kind": "zcz-certificate",
        "params": {"N": fam.N, "R": fam.R, "T": fam.T, "M": fam.M, "theorem": fam.theorem, "q": fam.q},
        "expected_Z": fam.R * fam.T,
        "sets": [c.to_dict() for c in cert["sets"]],
        "cyclically_distinct": [seqanalysis.distinctness_matrix(s, tol).tolist() for s in sets],
        "inter_set": (
            "not applicable"
            if inter is None
            else {
                "theta_c": inter["theta_c"],
                "theta_min": inter["theta_min"],
                "constant": inter["constant"],
                "expected": sqrt(fam.R) * fam.T,
            }
        ),
        "sarwate_lhs": cert["sarwate_lhs"],
        "all_properties_hold": cert["promised"],
    }
    return report


def cmd_verify(args) -> int:
    try:
        fam = read_family(args.seq_file)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse {args.seq_file}: {exc}") from None
    report = _certificate(fam, args.tolerance)
    _emit(_json(report), _out_path(args, "certificate.json"), args)
    if not report["all_properties_hold"]:
        print("property violation: see certificate", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# --- correlation exports --------------------------------------------------


def _load_sets(path):
    try:
        return read_family(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from None


def _seq(fam, u, m):
    if not (0 <= m < fam.M and 0 <= u < fam.T):
        raise UsageError(f"sequence (u={u}, m={m}) out of range for M={fam.M}, T={fam.T}")
    return fam.sequences[m, u]


def cmd_correlate(args) -> int:
    fam = _load_sets(args.seq_file)
    rows = []
    if args.all:
        pairs = [(u, m, v, m2) for m in range(fam.M) for u in range(fam.T) for m2 in range(fam.M) for v in range(fam.T)]
    else:
        if not args.pair or len(args.pair) != 2:
            raise UsageError("give --pair U,M V,M2 or --all")
        a, b = (_ints(p) for p in args.pair)
        if len(a) != 2 or len(b) != 2:
            raise UsageError("each --pair operand is U,M")
        pairs = [(a[0], a[1], b[0], b[1])]
    for u, m, v, m2 in pairs:
        prof = seqanalysis.pccf(_seq(fam, u, m), _seq(fam, v, m2)).values
        for tau, z in enumerate(prof):
            rows.append({"u": u, "m": m, "v": v, "m2": m2, "tau_samples": tau, "real": z.real, "imag": z.imag, "magnitude": abs(z)})
    cols = ["u", "m", "v", "m2", "tau_samples", "real", "imag", "magnitude"]
    _emit(write_csv(rows, cols), _out_path(args, "correlation.csv"), args)
    return EXIT_OK


def cmd_af(args) -> int:
    fam = _load_sets(args.seq_file)
    s = _seq(fam, args.seq, args.set)
    N = s.size
    axis = np.arange(N) if args.order == "one-sided" else np.arange(N) - N // 2
    amap = seqanalysis.ambiguity(s, axis, axis)
    rows = [
        {"tau_samples": int(t), "doppler_bins": int(v), "real": z.real, "imag": z.imag, "magnitude": abs(z)}
        for i, t in enumerate(amap.delays)
        for k, v in enumerate(amap.dopplers)
        for z in (amap.values[i, k],)
    ]
    _emit(write_csv(rows, ["tau_samples", "doppler_bins", "real", "imag", "magnitude"]), _out_path(args, "af.csv"), args)
    return EXIT_OK


# --- florentine -----------------------------------------------------------


def cmd_florentine(args) -> int:
    out = _out_path(args, "array.csv")
    if args.action == "gen-prime":
        try:
            arr = florentine.base_array_prime(args.T)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _emit(florentine.write_array_csv(arr), out, args)
        return EXIT_OK
    if args.action == "search":
        arr = florentine.search_small(args.T, args.rows, args.budget)
        if arr is None:
            print(f"not-found: no {args.rows}-row array for T={args.T} within budget {args.budget}")
            return EXIT_FAIL
        _emit(florentine.write_array_csv(arr), out, args)
        return EXIT_OK
    arr = _read_array(args.array)
    if args.action == "verify":
        verdict = florentine.verify(arr)
        for v in verdict.violations:
            print(f"violation: {v.kind} rows={v.rows} symbols={v.symbols} step={v.step}")
        print("valid" if verdict else "invalid")
        return EXIT_OK if verdict else EXIT_FAIL
    try:
        ext = florentine.extend_construction1(arr, args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(florentine.write_array_csv(ext), out, args)
    return EXIT_OK


def _read_array(src):
    try:
        text = sys.stdin.read() if src == "-" else Path(src).read_text()
        return florentine.read_array_csv(text)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read array {src}: {exc}") from None


# --- otfs-sim -------------------------------------------------------------

_CAMPAIGN_KEYS = {"snr_list", "trials", "master_seed", "preamble", "compare_random", "velocities", "snr_db"}


def parse_campaign(cfg_json: dict, seed: int):
    """Split a campaign document into an :class:`OtfsConfig` and run settings.

    Unknown or invalid fields are reported individually as a
    :class:`UsageError`.
    """
    if not isinstance(cfg_json, dict):
        raise UsageError("campaign config must be a JSON object")
    known = {f.name for f in fields(otfssim.OtfsConfig)}
    errors = [f"unknown field {k!r}" for k in cfg_json if k not in known | _CAMPAIGN_KEYS]
    kw = {k: v for k, v in cfg_json.items() if k in known}
    for k, v in kw.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            errors.append(f"field {k!r} must be a number")
    run = {
        "snr_list": cfg_json.get("snr_list", [0, 5, 10, 15, 20]),
        "trials": cfg_json.get("trials", 500),
        "master_seed": cfg_json.get("master_seed", seed),
        "preamble": cfg_json.get("preamble", {"theorem": "T3", "R": 2, "T": 8, "q": 188, "set": 0, "seq": 1}),
        "compare_random": cfg_json.get("compare_random", True),
        "velocities": cfg_json.get("velocities", [0, 50, 100, 150, 200, 250, 300]),
        "snr_db": cfg_json.get("snr_db", 20),
    }
    if not isinstance(run["trials"], int) or isinstance(run["trials"], bool) or run["trials"] < 1:
        errors.append("field 'trials' must be a positive integer")
    if not isinstance(run["master_seed"], int) or run["master_seed"] < 0:
        errors.append("field 'master_seed' must be a non-negative integer")
    for key in ("snr_list", "velocities"):
        v = run[key]
        if not isinstance(v, list) or not v or not all(isinstance(x, (int, float)) for x in v):
            errors.append(f"field {key!r} must be a nonempty list of numbers")
    if not isinstance(run["snr_db"], (int, float)):
        errors.append("field 'snr_db' must be a number")
    cfg = None
    if not errors:
        try:
            cfg = otfssim.OtfsConfig(**kw)
        except ValueError as exc:
            errors.extend(str(exc).split("; "))
    if errors:
        raise UsageError("invalid config: " + "; ".join(errors))
    return cfg, run


def resolve_preamble(selector, cfg: otfssim.OtfsConfig) -> np.ndarray:
    """Delay-Doppler preamble from a selector: theorem parameters or a sequence file."""
    if selector == "random":
        return "random"
    if not isinstance(selector, dict):
        raise UsageError("field 'preamble' must be an object or \"random\"")
    m, u = int(selector.get("set", 0)), int(selector.get("seq", 0))
    try:
        if "file" in selector:
            fam = read_family(selector["file"])
        else:
            fam = generate_family(selector["theorem"], int(selector["R"]), int(selector["T"]), q=selector.get("q"), rows=selector.get("rows"))
    except (KeyError, OSError, ValueError, RuntimeError) as exc:
        raise UsageError(f"invalid preamble selector: {exc}") from None
    s = _seq(fam, u, m)
    if s.size != cfg.N:
        raise UsageError(f"preamble period {s.size} does not match frame size {cfg.N}")
    return fzt(s, cfg.L_delay_bins, cfg.T_doppler_bins)


def cmd_otfs_sim(args) -> int:
    try:
        doc = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    cfg, run = parse_campaign(doc, args.seed)
    if args.trials is not None:
        run["trials"] = args.trials
    preambles = [("proposed", resolve_preamble(run["preamble"], cfg))]
    if isinstance(preambles[0][1], str):
        preambles = [("random", "random")]
    elif run["compare_random"]:
        preambles.append(("random", "random"))
    seed = run["master_seed"]
    rows = []
    for label, pre in preambles:
        if args.mode == "sync":
            res = otfssim.monte_carlo_sync(cfg, pre, run["snr_list"], run["trials"], seed)
        elif args.mode == "ber":
            res = otfssim.ber_after_sync(cfg, pre, run["snr_list"], run["trials"], seed)
        else:
            res = otfssim.velocity_sweep(cfg, pre, run["velocities"], run["snr_db"], run["trials"], seed)
        rows += [{"preamble": label, **r} for r in res]
    cols = ["preamble"]
    cols += ["v_max_kmh"] if args.mode == "velocity-sweep" else []
    cols += ["snr_db", "trials", "successes", "success_prob", "ci_low", "ci_high"]
    cols += ["ber", "ber_perfect_sync"] if args.mode == "ber" else []
    out = Path(args.out or ".")
    if out.suffix == ".csv":
        csv_path, out = out, out.parent
    else:
        csv_path = out / f"otfs_{args.mode}.csv"
    out.mkdir(parents=True, exist_ok=True)
    write_csv(rows, cols, csv_path)
    config_echo = {**cfg.to_dict(), **run, "mode": args.mode}
    man = _manifest(args, [csv_path], config_echo)
    print(f"wrote {csv_path} and {man}")
    for r in rows:
        key = f"v={r['v_max_kmh']:g} km/h" if "v_max_kmh" in r else f"SNR={r['snr_db']:g} dB"
        extra = f" ber={r['ber']:.4g}" if "ber" in r else ""
        print(f"{r['preamble']:>8} {key}: success={r['success_prob']:.3f} [{r['ci_low']:.3f}, {r['ci_high']:.3f}]{extra}")
    return EXIT_OK


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def add_globals(parser, suppress):
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        parser.add_argument("--seed", type=int, default=d(DEFAULT_SEED), help=f"master seed (default {DEFAULT_SEED})")
        parser.add_argument("--out", default=d(None), help="output file or directory")
        parser.add_argument("--tolerance", type=float, default=d(seqanalysis.ZERO_TOL), help="zero threshold relative to N")

    p = argparse.ArgumentParser(prog="zakzcz", description="Zak-domain ZCZ sequence toolkit")
    add_globals(p, suppress=False)
    # Global flags are also accepted after the subcommand.
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **kw: _add(*a, parents=[common], **kw)

    g = sub.add_parser("generate", help="build a sequence family")
    g.add_argument("theorem", choices=THEOREMS)
    g.add_argument("--r", type=int, default=1)
    g.add_argument("--t", type=int, required=True)
    g.add_argument("--q", type=int, default=None)
    g.add_argument("--rows", default=None, help="comma-separated row selection")
    g.add_argument("--index-row", action="append", help="explicit index row (repeatable)")
    g.add_argument("--complex", action="store_true", help="store real/imag pairs instead of exponents")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="certify a sequence file")
    v.add_argument("seq_file")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("correlate", help="export correlation profiles")
    c.add_argument("seq_file")
    c.add_argument("--pair", nargs=2, metavar="U,M")
    c.add_argument("--all", action="store_true")
    c.set_defaults(func=cmd_correlate)

    a = sub.add_parser("af", help="export a periodic ambiguity function")
    a.add_argument("seq_file")
    a.add_argument("--set", type=int, default=0)
    a.add_argument("--seq", type=int, default=0)
    a.add_argument("--order", choices=("one-sided", "centered"), default="one-sided")
    a.set_defaults(func=cmd_af)

    f = sub.add_parser("florentine", help="circular Florentine arrays")
    fs = f.add_subparsers(dest="action", required=True)
    _fadd = fs.add_parser
    fs.add_parser = lambda *a, **kw: _fadd(*a, parents=[common], **kw)
    x = fs.add_parser("gen-prime")
    x.add_argument("T", type=int)
    x = fs.add_parser("search")
    x.add_argument("T", type=int)
    x.add_argument("--rows", type=int, required=True)
    x.add_argument("--budget", type=int, default=2_000_000)
    x = fs.add_parser("extend")
    x.add_argument("array", help="array CSV path or - for stdin")
    x.add_argument("--q", type=int, required=True)
    x = fs.add_parser("verify")
    x.add_argument("array", help="array CSV path or - for stdin")
    f.set_defaults(func=cmd_florentine)

    o = sub.add_parser("otfs-sim", help="OTFS synchronization / BER campaigns")
    o.add_argument("config", help="campaign JSON")
    o.add_argument("--mode", choices=("sync", "ber", "velocity-sweep"), default="sync")
    o.add_argument("--trials", type=int, default=None, help="override the config trial count")
    o.set_defaults(func=cmd_otfs_sim)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    args.argv = argv
    args.started = datetime.now(timezone.utc)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
