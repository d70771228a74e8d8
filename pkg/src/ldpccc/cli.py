"""Command-line front end.

Ensembles are given either as a JSON file ({"Jprime","Kprime","ms","L",
"polys","label"}) or as a preset name (c1..c8, bprime), with --L overriding
the termination length.  Threshold commands emit CSV on stdout, span/mbl/
decode emit JSON, simulate writes a CSV file and exits nonzero if any row
beats the Singleton floor beyond its confidence width.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bench, channel, codes, dethresh, stopspan
from .protograph import PRESET_NAMES, Ensemble, load_ensemble, preset


def _resolve_ensemble(spec: str, L: int | None) -> Ensemble:
    if os.path.exists(spec):
        ens = load_ensemble(spec)
        return ens.with_L(L) if L is not None else ens
    if spec.lower() in PRESET_NAMES:
        return preset(spec, L if L is not None else 100)
    raise SystemExit(f"ensemble {spec!r}: not a file and not one of "
                     f"{', '.join(PRESET_NAMES)}")


def _add_ensemble_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ensemble", required=True,
                   help="JSON file or preset name (c1..c8, bprime)")
    p.add_argument("--L", type=int, default=None,
                   help="override termination length")


def _parse_w_range(text: str) -> list[int]:
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",")]


def cmd_threshold(args) -> int:
    ens = _resolve_ensemble(args.ensemble, args.L)
    out = sys.stdout
    print("ensemble,W,delta,groups,threshold,argmin_config", file=out)
    if args.mode == "bp":
        res = dethresh.bp_threshold(ens, tol_eps=args.tol)
        print(f"{ens.label},bp,,,{res.threshold:.5f},", file=out)
        return 0
    if args.sweep_W is None and args.W is None:
        raise SystemExit("threshold wd needs --W or --sweep-W")
    ws = _parse_w_range(args.sweep_W) if args.sweep_W else [args.W]
    for W in ws:
        res = dethresh.windowed_threshold(ens, W, args.delta,
                                          targeted_groups=args.groups,
                                          tol_eps=args.tol)
        print(f"{ens.label},{W},{args.delta:g},{args.groups},"
              f"{res.threshold:.5f},{res.argmin_config}", file=out)
    return 0


def cmd_span(args) -> int:
    ens = _resolve_ensemble(args.ensemble, args.L)
    bound, source = stopspan.span_bound(ens)
    out = {"ensemble": ens.label, "bound": bound, "bound_source": source}
    if not args.bounds_only:
        if args.window is not None:
            out["W"] = args.window
            out["groups"] = args.groups
            out["min_span"] = stopspan.windowed_min_span(
                ens, args.window, targeted_groups=args.groups)
        else:
            rep = stopspan.span_report(ens)
            out.update(min_span=rep.min_span, min_size=rep.min_size,
                       span_witness=list(rep.span_witness.columns),
                       size_witness=list(rep.size_witness.columns))
    print(json.dumps(out, indent=1))
    return 0


def cmd_expand(args) -> int:
    ens = _resolve_ensemble(args.ensemble, args.L)
    code = codes.expand(ens, args.M, args.seed, girth_filter=args.girth)
    codes.export_coordinates(code, args.out)
    print(json.dumps({"n": code.n, "n_rows": code.n_rows,
                      "k_design": code.k_design, "nnz": int(code.H.nnz),
                      "girth_filtered": code.girth_filtered,
                      "out": args.out}, indent=1))
    return 0


def cmd_mbl(args) -> int:
    if args.decoder == "wd" and args.W is None:
        raise SystemExit("mbl --decoder wd needs --W")
    ens = _resolve_ensemble(args.ensemble, args.L)
    code = codes.expand(ens, args.M, args.seed, girth_filter=args.girth)
    value = codes.mbl_search(code, decoder=args.decoder, W=args.W,
                             delta=args.delta)
    rep = stopspan.span_report(ens)
    out = {"ensemble": ens.label, "M": args.M, "seed": args.seed,
           "decoder": args.decoder, "mbl": value,
           "n": code.n, "k_true": code.k_true}
    if rep.min_span is not None and rep.min_span >= 2:
        lo, hi = codes.mbl_bounds(rep.min_span, args.M)
        out.update(min_span=rep.min_span, bound_lo=lo, bound_hi=hi)
    print(json.dumps(out, indent=1))
    return 0


def _load_pattern(path: str, n: int) -> np.ndarray:
    text = open(path).read().split()
    bits = "".join(text)
    if len(bits) != n or set(bits) - {"0", "1"}:
        raise SystemExit(f"pattern file must hold exactly {n} 0/1 characters")
    return np.frombuffer(bits.encode(), dtype=np.uint8) == ord("1")


def cmd_decode(args) -> int:
    ens = _resolve_ensemble(args.ensemble, args.L)
    code = codes.expand(ens, args.M, args.seed, girth_filter=args.girth)
    if args.pattern:
        pattern = _load_pattern(args.pattern, code.n)
    else:
        spec = channel.ChannelSpec(args.channel, args.eps, args.burst)
        rng = np.random.default_rng(args.channel_seed)
        pattern = channel.sample_pattern(spec, code.n, rng)
    if args.decoder == "bp":
        outcome = codes.peel_decode(code, pattern)
    else:
        outcome = codes.window_decode(code, pattern, args.W, delta=args.delta,
                                      carry=args.carry)
    print(json.dumps({"n": code.n, "erased": int(np.sum(pattern)),
                      "residual": outcome.residual,
                      "success": bool(outcome.success),
                      "sweeps": outcome.sweeps,
                      "w_ratio": outcome.w_ratio}, indent=1))
    return 0 if outcome.success else 3


def cmd_simulate(args) -> int:
    with open(args.config) as f:
        d = json.load(f)
    ens = _resolve_ensemble(d["ensemble"], d.get("L"))
    cfg = bench.sweep_config_from_dict(d, ens)
    rows = bench.run_sweep(cfg)
    bench.write_csv(rows, args.out)
    bad = [r for r in rows if bench.beats_singleton(r)]
    for r in bad:
        print(f"invariant violation: CER {r.cer:.3g} beats Singleton "
              f"{r.singleton:.3g} at eps={r.eps} ({r.decoder})",
              file=sys.stderr)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldpccc", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    t = sub.add_parser("threshold", help="density-evolution thresholds")
    tsub = t.add_subparsers(dest="mode", required=True)
    tb = tsub.add_parser("bp")
    _add_ensemble_args(tb)
    tb.add_argument("--tol", type=float, default=1e-5)
    tb.set_defaults(func=cmd_threshold)
    tw = tsub.add_parser("wd")
    _add_ensemble_args(tw)
    tw.add_argument("--W", type=int)
    tw.add_argument("--sweep-W", dest="sweep_W", default=None,
                    help="range a..b or comma list")
    tw.add_argument("--delta", type=float, default=0.0)
    tw.add_argument("--groups", type=int, default=1)
    tw.add_argument("--tol", type=float, default=1e-5)
    tw.set_defaults(func=cmd_threshold)

    s = sub.add_parser("span", help="stopping-set span analysis")
    _add_ensemble_args(s)
    s.add_argument("--window", type=int, default=None)
    s.add_argument("--groups", type=int, default=1)
    s.add_argument("--bounds-only", action="store_true")
    s.set_defaults(func=cmd_span)

    e = sub.add_parser("expand", help="write expanded parity-check matrix")
    _add_ensemble_args(e)
    e.add_argument("--M", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--girth", action=argparse.BooleanOptionalAction, default=None)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_expand)

    m = sub.add_parser("mbl", help="exhaustive resolvable-burst search")
    _add_ensemble_args(m)
    m.add_argument("--M", type=int, required=True)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--girth", action=argparse.BooleanOptionalAction, default=None)
    m.add_argument("--decoder", choices=["bp", "wd"], default="bp")
    m.add_argument("--W", type=int, default=None)
    m.add_argument("--delta", type=float, default=0.0)
    m.set_defaults(func=cmd_mbl)

    dc = sub.add_parser("decode", help="decode one erasure pattern")
    _add_ensemble_args(dc)
    dc.add_argument("--M", type=int, required=True)
    dc.add_argument("--seed", type=int, default=0)
    dc.add_argument("--girth", action=argparse.BooleanOptionalAction, default=None)
    dc.add_argument("--pattern", default=None, help="file of 0/1 characters")
    dc.add_argument("--channel", choices=["bec", "gec"], default="bec")
    dc.add_argument("--eps", type=float, default=0.0)
    dc.add_argument("--burst", type=float, default=None)
    dc.add_argument("--channel-seed", type=int, default=0)
    dc.add_argument("--decoder", choices=["bp", "wd"], default="bp")
    dc.add_argument("--W", type=int, default=None)
    dc.add_argument("--delta", type=float, default=0.0)
    dc.add_argument("--carry", choices=["all", "targeted_only"], default="all")
    dc.set_defaults(func=cmd_decode)

    sm = sub.add_parser("simulate", help="Monte Carlo sweep from a config file")
    sm.add_argument("--config", required=True)
    sm.add_argument("--out", required=True)
    sm.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
