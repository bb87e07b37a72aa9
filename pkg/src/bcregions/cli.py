"""Command-line entry point: ordering checks, region sweeps and reproduction targets.

Exit codes: 0 success, 2 bad model or arguments, 3 unsupported size,
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

EXIT_OK, EXIT_MODEL, EXIT_SIZE, EXIT_INVARIANT = 0, 2, 3, 4
THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")
REGION_KINDS = (
    "tdcs", "uv", "superposition", "marton-rtd", "bec", "bsc3", "blackwell",
    "finite-field", "gaussian", "dpc", "common",
)
REPRO_TARGETS = ("fig4", "fig5", "bsc4-table", "example3-atlas", "dpc-gap")


def _apply_thread_cap():
    """BCREGIONS_THREADS caps the BLAS pools; sweeps themselves run serially."""
    raw = os.environ.get("BCREGIONS_THREADS")
    if raw is None:
        return
    if not raw.isdigit() or int(raw) < 1:
        raise SystemExit(f"BCREGIONS_THREADS must be a positive integer, got {raw!r}")
    for var in THREAD_VARS:
        os.environ.setdefault(var, raw)


def parse_sweep(text: str) -> tuple[int, float, float]:
    try:
        n, lo, hi = text.split(":")
        n, lo, hi = int(n), float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("sweep must look like n:min:max") from None
    if n < 1 or not 0 < lo < hi:
        raise argparse.ArgumentTypeError("sweep needs n >= 1 and 0 < min < max")
    return n, lo, hi


def _resolution(text: str) -> int:
    r = int(text)
    if r < 10:
        raise argparse.ArgumentTypeError("resolution must be at least 10")
    return r


def _seed(text: str) -> int:
    s = int(text)
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned value")
    return s


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bcregions", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    order = sub.add_parser("order", help="certify orderings of a two-component model")
    order.add_argument("action", choices=["check"])
    order.add_argument("--model", required=True)
    order.add_argument("--resolution", type=_resolution)
    order.add_argument("--out")

    reg = sub.add_parser("region", help="compute region supports over a direction sweep")
    reg.add_argument("--kind", required=True, choices=REGION_KINDS)
    reg.add_argument("--model", required=True)
    reg.add_argument("--sweep", type=parse_sweep, default=(60, 1 / 32, 32.0))
    reg.add_argument("--seed", type=_seed, default=0)
    reg.add_argument("--resolution", type=_resolution)
    reg.add_argument("--out")
    reg.add_argument("--format", choices=["csv", "json"], default="csv")

    rep = sub.add_parser("repro", help="regenerate a published figure or table")
    rep.add_argument("target", choices=REPRO_TARGETS)
    rep.add_argument("--p1", type=float)
    rep.add_argument("--p2", type=float)
    rep.add_argument("--seed", type=_seed, default=0)
    rep.add_argument("--out-dir", default=".")
    return ap


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- order --------------------------------------------------------------------

def cmd_order(args) -> int:
    from .errors import ModelError
    from .io import load_model
    from .orderings import ordering_report, transfer_check

    model = load_model(args.model)
    bc = model.state_bc()
    if bc.k != 2:
        raise ModelError("order check needs a two-component model")
    comp = ordering_report(bc.components[0], bc.components[1], args.resolution)
    if bc.p1[0] >= bc.p2[0]:
        lifted = transfer_check(bc, args.resolution)
    else:
        lifted = transfer_check(bc.swap_receivers(), args.resolution)
    doc = {
        "components": comp.to_dict(),
        "lifted": lifted.to_dict(),
        "receivers_swapped": bool(bc.p1[0] < bc.p2[0]),
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


# -- region -------------------------------------------------------------------

def _directions(sweep, breakpoints=()):
    from .regions.core import directions_from_lambdas, lambda_sweep

    n, lo, hi = sweep
    bps = [b for b in breakpoints if lo <= b <= hi]
    return [(1.0, 0.0)] + directions_from_lambdas(lambda_sweep(n, lo, hi, bps)) + [(0.0, 1.0)]


def _pair_probs(model):
    if model.kind in ("deterministic", "finite_field", "probabilities"):
        return float(model.p1), float(model.p2)
    if model.bc is not None and model.bc.k == 2:
        return float(model.bc.p1[0]), float(model.bc.p2[0])
    return None


def compute_region(model, kind: str, sweep, seed: int = 0, resolution=None):
    import numpy as np

    from .errors import ModelError
    from .regions import (
        RatePoint, RateRegion, Support, bec_region, blackwell_state_region, common_message_supports,
        finite_field_region, marton_rtd_sumrate, superposition_region, tdcs_region,
        weight_breakpoints, three_bsc_region, uv_outer_supports,
    )

    probs = _pair_probs(model)
    bps = weight_breakpoints(*probs) if probs else [1.0]
    dirs = _directions(sweep, bps)

    def need(cond, what):
        if not cond:
            raise ModelError(f"--kind {kind} needs {what}; got a {model.kind} model")

    if kind == "tdcs":
        need(model.det is not None, "a deterministic or finite-field model")
        return tdcs_region(model.det, model.p1, model.p2, dirs, resolution)
    if kind == "blackwell":
        need(probs is not None, "p1 and p2")
        return blackwell_state_region(*probs, directions=dirs, **({"resolution": resolution} if resolution else {}))
    if kind == "finite-field":
        need(model.kind == "finite_field", "a finite_field model")
        return finite_field_region(model.field_size, model.p1, model.p2, model.gain, dirs)
    if kind == "uv":
        sups = uv_outer_supports(model.state_bc(), dirs, resolution)
        return RateRegion(sups, np.zeros((0, 2)), "uv")
    if kind == "superposition":
        return superposition_region(model.state_bc(), dirs, resolution=resolution)
    if kind == "bec":
        need(model.kind == "bec", "a bec model")
        return bec_region(model.eps, model.p1, model.p2, dirs)
    if kind == "bsc3":
        need(model.kind == "bsc" and len(model.alpha) == 3, "a bsc model with three components")
        return three_bsc_region(model.alpha, model.p1, model.p2, dirs)
    if kind == "marton-rtd":
        val, params = marton_rtd_sumrate(model.state_bc(), seed=seed)
        return RateRegion([Support((1.0, 1.0), val, None, params.to_dict())], np.zeros((0, 2)),
                          "marton-rtd")
    if kind == "gaussian":
        need(model.kind == "gaussian", "a gaussian model")
        from .gaussian import power_split_region

        return power_split_region(model.gaussian, dirs, **({"resolution": resolution} if resolution else {}),
                            seed=seed)
    if kind == "dpc":
        need(model.kind == "gaussian", "a gaussian model")
        from .gaussian import dpc_gap, dpc_rates
        from .regions.core import pentagon_support

        sups = []
        for w1, w2 in dirs:
            if w1 <= 0 or w2 / w1 <= 1:
                continue
            lam = w2 / w1
            g = dpc_gap(model.gaussian, lam)
            r = dpc_rates(model.gaussian, g.dpc)
            _, r1, r2 = pentagon_support(r.r1, r.r2, r.sum_rate, 1.0, lam)
            r1, r2 = float(r1), float(r2)
            params = {"gap_bits": g.gap_bits, "superposition_bits": g.superposition_bits,
                      "interior": g.interior, "a": g.dpc.a, "b": g.dpc.b, "rho": g.dpc.rho}
            sups.append(Support((1.0, lam), r1 + lam * r2, RatePoint(r1, r2), params))
        return RateRegion(sups, np.zeros((0, 2)), "dpc", model.gaussian.to_dict())
    if kind == "common":
        need(model.det is not None, "a deterministic model")
        from .regions.tdcs import common_sweep

        n, lo, hi = sweep
        lams = np.geomspace(lo, hi, min(n, 9))
        sups = common_message_supports(model.det, model.p1, model.p2, common_sweep(lams=lams),
                                       seed=seed)
        return RateRegion(sups, np.zeros((0, 2)), "common")
    raise ModelError(f"unknown region kind {kind}")


def cmd_region(args) -> int:
    from .io import load_model, write_region

    model = load_model(args.model)
    region = compute_region(model, args.kind, args.sweep, args.seed, args.resolution)
    region.validate()
    text = write_region(region, None, args.format)
    _emit(text, args.out)
    return EXIT_OK


# -- repro --------------------------------------------------------------------

def _write_rows(path: Path, header, rows):
    import csv

    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _vertex_rows(verts):
    return [[format(float(a), ".12g"), format(float(b), ".12g")] for a, b in verts]


def repro_fig4(out: Path, seed: int) -> list[str]:
    from .regions import blackwell_state_region, tdcs_region
    from .io import write_region
    from .state import blackwell_pair

    files = []
    for p1, p2 in ((0.5, 0.5), (0.7, 0.3), (1.0, 0.0)):
        tag = f"{p1:g}_{p2:g}"
        reg = tdcs_region(blackwell_pair(), p1, p2)
        reg.validate()
        write_region(reg, out / f"fig4_tdcs_{tag}.csv")
        closed = blackwell_state_region(p1, p2)
        _write_rows(out / f"fig4_vertices_{tag}.csv", ["r1", "r2"], _vertex_rows(closed.vertices))
        files += [f"fig4_tdcs_{tag}.csv", f"fig4_vertices_{tag}.csv"]
    return files


def repro_fig5(out: Path, p1: float, p2: float) -> list[str]:
    from .regions import finite_field_region

    reg = finite_field_region(2, p1, p2, normalized=True)
    name = f"fig5_{p1:g}_{p2:g}.csv"
    _write_rows(out / name, ["r1_logK", "r2_logK"], _vertex_rows(reg.vertices))
    return [name]


def bsc4_table(seed: int = 0) -> list[tuple[str, float, str]]:
    from .regions import UVBound, marton_rtd_sumrate, superposition_support
    from .state import StateBC, bsc

    alpha = (0.28, 0.04, 0.02, 0.18)
    bc = StateBC(tuple(bsc(a) for a in alpha), (0.38, 0.62, 0, 0), (0, 0, 0.38, 0.62))
    uv = UVBound(bc)
    sup = superposition_support(bc, (1.0, 1.0)).value
    marton, _ = marton_rtd_sumrate(bc, seed=seed)
    uv_sum, _ = uv.weighted(1.0)
    return [
        ("C1", uv.capacity(1), "0.5247 +- 5e-4"),
        ("C2", uv.capacity(2), "0.5246 +- 5e-4"),
        ("superposition_sum", sup, "max(C1, C2) +- 5e-4"),
        ("marton_rtd_sum", marton, ">= 0.5250 - 1e-3"),
        ("uv_sum", uv_sum, ">= 0.5256 - 1e-3"),
        ("uv_minus_marton", uv_sum - marton, "> 0"),
    ]


def repro_bsc4(out: Path, seed: int) -> list[str]:
    rows = [[k, format(v, ".6f"), c] for k, v, c in bsc4_table(seed)]
    _write_rows(out / "bsc4.csv", ["quantity", "bits", "target"], rows)
    return ["bsc4.csv"]


def repro_atlas(out: Path, seed: int) -> list[str]:
    from .orderings import bsc_bec_atlas

    rows = bsc_bec_atlas()
    header = ["p", "e", "ordering", "threshold", "expected", "verdict", "in_band"]
    _write_rows(out / "example3_atlas.csv", header,
                [[format(r["p"], ".6g"), format(r["e"], ".6g"), r["ordering"],
                  format(r["threshold"], ".6g"), int(r["expected"]), int(r["verdict"]),
                  int(r["in_band"])] for r in rows])
    return ["example3_atlas.csv"]


def repro_dpc(out: Path, seed: int) -> list[str]:
    import numpy as np

    from .gaussian import GaussianBC, dpc_gap

    rows = []
    for p1, p2 in ((0.8, 0.3), (1.0, 0.0)):
        bc = GaussianBC.scalar(1.0, 2.0, 10.0, p1, p2)
        for lam in np.round(np.r_[np.linspace(1.05, 1.5, 10), 2.0, 3.0], 6):
            g = dpc_gap(bc, float(lam))
            rows.append([p1, p2, format(lam, "g"), format(g.superposition_bits, ".9f"),
                         format(g.dpc_bits, ".9f"), format(g.gap_bits, ".9f"), int(g.interior)])
    header = ["p1", "p2", "lambda", "superposition_bits", "dpc_bits", "gap_bits", "interior"]
    _write_rows(out / "dpc_gap.csv", header, rows)
    return ["dpc_gap.csv"]


def cmd_repro(args) -> int:
    from .errors import ModelError

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t = args.target
    if t == "fig5":
        p1 = 0.7 if args.p1 is None else args.p1
        p2 = 0.4 if args.p2 is None else args.p2
        files = repro_fig5(out, p1, p2)
    elif args.p1 is not None or args.p2 is not None:
        raise ModelError("--p1/--p2 apply to the fig5 target only")
    elif t == "fig4":
        files = repro_fig4(out, args.seed)
    elif t == "bsc4-table":
        files = repro_bsc4(out, args.seed)
    elif t == "example3-atlas":
        files = repro_atlas(out, args.seed)
    else:
        files = repro_dpc(out, args.seed)
    manifest_path = out / "manifest.json"
    manifest = json.loads(manifest_path.read_text()) if manifest_path.exists() else {}
    manifest[t] = {"files": files, "seed": args.seed}
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for f in files:
        print(out / f)
    return EXIT_OK


def main(argv=None) -> int:
    _apply_thread_cap()
    args = build_parser().parse_args(argv)
    from .errors import InvariantError, ModelError, UnsupportedSizeError

    handler = {"order": cmd_order, "region": cmd_region, "repro": cmd_repro}[args.command]
    try:
        return handler(args)
    except UnsupportedSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except InvariantError as exc:
        print(f"internal invariant breached: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
