"""Command-line front end.

Subcommands: segment (k-sweep segmentation of an image/trimap pair),
optimize (GA weight search), index (graph quality report), serve (HTTP
API). Exit codes: 0 success, 2 input error, 3 runtime/bind error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import socket
import sys
from pathlib import Path

import numpy as np

from . import dataio
from .engine import PccParams, segment
from .errors import PccsegError
from .features import N_FEATURES, extract_features, normalize
from .ga import GaConfig, optimize_weights
from .graph import load_edgelist, build_graph
from .index import index_report

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RUNTIME = 3

SWEEP_CSV_COLUMNS = ["k", "error_rate", "alpha", "rounds", "seed"]


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("PCCSEG_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_lambda(path) -> np.ndarray:
    with open(path) as f:
        data = json.load(f)
    if isinstance(data, dict):
        data = data["weights"]
    return np.asarray(data, dtype=np.float64)


def _load_config(args) -> dict:
    if not getattr(args, "config", None):
        return {}
    with open(args.config) as f:
        return json.load(f)


def _pcc_params(args, config: dict) -> PccParams:
    params = PccParams(**config.get("pcc", {}))
    if getattr(args, "seed", None) is not None:
        params.rng_seed = args.seed
    return params


def _ga_config(args, config: dict) -> GaConfig:
    cfg = GaConfig(**config.get("ga", {}))
    if getattr(args, "seed", None) is not None:
        cfg.rng_seed = args.seed
    return cfg


def _load_inputs(args):
    """Image + trimap (+ optional gt), with optional downscaling."""
    image = dataio.load_image(args.image)
    trimap_raw = dataio.load_gray(args.trimap)
    gt_raw = dataio.load_gray(args.gt) if args.gt else None
    if args.downscale:
        image, trimap_raw, gt_raw = dataio.downscale(image, trimap_raw, gt_raw,
                                                     args.downscale)
    pixel_labels = dataio.trimap_to_labels(trimap_raw, name=str(args.trimap))
    gt = dataio.gt_to_labels(gt_raw) if gt_raw is not None else None
    return image, pixel_labels, gt


def _k_list(args) -> list[int]:
    if getattr(args, "k_sweep", None):
        ks = [int(x) for x in args.k_sweep.split(",") if x.strip()]
        if not ks:
            raise PccsegError("empty k sweep")
        return ks
    return [args.k]


def _run_sweep(image, pixel_labels, gt, lam, ks, base_params: PccParams,
               out: Path, stem: str) -> list[dict]:
    fm = normalize(extract_features(image))
    rows = []
    for k in ks:
        params = dataclasses.replace(base_params, rng_seed=base_params.rng_seed + k)
        result = segment(image, pixel_labels, lam, k, params=params,
                         fm_normalized=fm)
        dataio.save_mask(result.mask, out / f"{stem}-k{k}-mask.png")
        row = {"k": k, "error_rate": "", "alpha": result.alpha,
               "rounds": result.rounds, "seed": params.rng_seed}
        if gt is not None:
            report = dataio.error_rate(result.labels, pixel_labels, gt)
            row["error_rate"] = report.error_rate
            (out / f"{stem}-k{k}-eval.json").write_text(report.to_json())
        rows.append(row)
    with open(out / f"{stem}-sweep.csv", "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SWEEP_CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v)
                             for k, v in row.items()})
    return rows


def _best_row(rows: list[dict]) -> dict:
    scored = [r for r in rows if r["error_rate"] != ""]
    if scored:
        return min(scored, key=lambda r: r["error_rate"])
    return max(rows, key=lambda r: r["alpha"])


def cmd_segment(args) -> int:
    out = _out_dir(args)
    config = _load_config(args)
    image, pixel_labels, gt = _load_inputs(args)
    lam = _load_lambda(args.lambda_file) if args.lambda_file else np.ones(N_FEATURES)
    params = _pcc_params(args, config)
    stem = Path(args.image).stem
    rows = _run_sweep(image, pixel_labels, gt, lam, _k_list(args), params, out, stem)
    best = _best_row(rows)
    print(f"best k={best['k']} alpha={best['alpha']}"
          + (f" error_rate={best['error_rate']}" if best["error_rate"] != "" else ""))
    return EXIT_OK


def cmd_optimize(args) -> int:
    out = _out_dir(args)
    config = _load_config(args)
    image, pixel_labels, gt = _load_inputs(args)
    fm = normalize(extract_features(image))
    cfg = _ga_config(args, config)
    lam, trace, baseline_phi = optimize_weights(fm, pixel_labels, args.k, cfg)
    best_alpha = max(trace.best_alpha)
    stem = Path(args.image).stem
    trace.to_csv(out / f"{stem}-trace.csv")
    (out / f"{stem}-lambda.json").write_text(json.dumps({
        "weights": list(lam),
        "alpha": best_alpha,
        "baseline_phi": baseline_phi,
        "k": args.k,
        "generations": len(trace.best_alpha),
        "evaluations": trace.evaluations,
        "stop_reason": trace.stop_reason,
        "seed": cfg.rng_seed,
    }, indent=2))
    print(f"best alpha={best_alpha} after {len(trace.best_alpha)} generations"
          f" ({trace.stop_reason})")
    if args.segment_after:
        params = _pcc_params(args, config)
        rows = _run_sweep(image, pixel_labels, gt, lam, _k_list(args), params,
                          out, f"{stem}-optimized")
        best = _best_row(rows)
        print(f"best k={best['k']} alpha={best['alpha']}"
              + (f" error_rate={best['error_rate']}" if best["error_rate"] != "" else ""))
    return EXIT_OK


def cmd_index(args) -> int:
    if args.graph:
        g = load_edgelist(args.graph)
    else:
        if not (args.image and args.trimap):
            raise PccsegError("index needs either --graph or --image/--trimap")
        image, pixel_labels, _ = _load_inputs(args)
        lam = _load_lambda(args.lambda_file) if args.lambda_file else np.ones(N_FEATURES)
        fm = normalize(extract_features(image))
        g = build_graph(fm, pixel_labels, args.k, lam)
    report = index_report(g, baseline_phi=args.baseline_phi, sigma=args.sigma)
    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK


def cmd_serve(args) -> int:
    config = _load_config(args)
    port = args.port or config.get("port", 8000)
    host = config.get("host", "127.0.0.1")
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        print(f"cannot bind {host}:{port}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        probe.close()

    import uvicorn

    from .server import create_app

    app = create_app(static_dir=config.get("static_dir"),
                     max_pixels=config.get("max_pixels", 1 << 22),
                     session_ttl=config.get("session_ttl", 3600.0))
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pccseg")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_image=True):
        p.add_argument("--image", required=needs_image)
        p.add_argument("--trimap", required=needs_image)
        p.add_argument("--gt")
        p.add_argument("--k", type=int, default=100)
        p.add_argument("--lambda-file", dest="lambda_file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--downscale", type=int, default=None,
                       help="shrink inputs so the longest side is this many pixels")
        p.add_argument("--out")
        p.add_argument("--config", help="JSON config file")

    p = sub.add_parser("segment", help="segment an image for one or more k values")
    add_common(p)
    p.add_argument("--k-sweep", dest="k_sweep", help="comma-separated k values")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("optimize", help="GA search of feature weights")
    add_common(p)
    p.add_argument("--k-sweep", dest="k_sweep")
    p.add_argument("--segment-after", action="store_true",
                   help="segment with the optimized weights afterwards")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("index", help="report the graph quality index")
    add_common(p, needs_image=False)
    p.add_argument("--graph", help="edge-list graph file instead of image/trimap")
    p.add_argument("--baseline-phi", dest="baseline_phi", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("serve", help="run the HTTP segmentation service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return EXIT_INPUT
    except PccsegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # runtime failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
