"""Command-line front end.

Subcommands cover the full pipeline: ``babble`` (synthetic dataset),
``encode`` / ``decode`` (population coding), ``train`` / ``eval`` (map
training and metrics), ``experiment`` (the full matrix), plus
``demo-inconsistency``, ``plot-curves``, and ``plot-map`` figures.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .babble import BabbleConfig, generate_babble
from .codec import CodecSpec, build_codec, encode_dataset, load_codec, save_codec
from .dataset import load_dataset, save_dataset
from .decode import KdeConfig, decode_vector
from .errors import UndecodableError
from .experiment import ExperimentConfig, demo_inconsistency, run_experiment
from .metrics import evaluate_map
from .plots import plot_posture_grid, plot_tuning_curves
from .som import (
    TrainConfig,
    data_ranges,
    init_consistent,
    init_naive,
    load_map,
    save_map,
    train,
)


def _write_matrix_csv(path, header, matrix) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in matrix:
            writer.writerow([repr(float(v)) for v in row])


def _read_matrix_csv(path) -> tuple[list[str], np.ndarray]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return header, np.array(rows, dtype=float)


def _kde_from_args(args) -> KdeConfig:
    bw = args.bandwidth
    if bw != "auto":
        bw = float(bw)
    return KdeConfig(bandwidth_h=bw, grid_resolution=args.grid)


def _add_kde_args(p) -> None:
    p.add_argument("--bandwidth", default="0.3", help='KDE bandwidth in degrees or "auto"')
    p.add_argument("--grid", type=float, default=0.1, help="decode grid resolution in degrees")


def _codec_spec_from_args(args) -> CodecSpec:
    if args.offset is not None:
        return CodecSpec(args.family, "fixed_offset", args.offset)
    return CodecSpec(args.family, "fixed_count", args.count)


def _add_codec_args(p) -> None:
    p.add_argument("--family", required=True,
                   choices=("normalized", "linear", "sigmoid", "gaussian"))
    p.add_argument("--count", type=int, default=10, help="curves per DoF (fixed-count setup)")
    p.add_argument("--offset", type=float, default=None,
                   help="degrees between curves (switches to the fixed-offset setup)")


def cmd_babble(args) -> int:
    cfg = BabbleConfig(seed=args.seed, duration_s=args.duration)
    ds = generate_babble(cfg)
    save_dataset(ds, args.out, joint_spec_path=args.spec_out)
    print(f"wrote {ds.n_samples} samples x {ds.n_joints} joints to {args.out}")
    return 0


def cmd_encode(args) -> int:
    ds = load_dataset(args.data, args.spec)
    codec = build_codec(_codec_spec_from_args(args), ds.joints)
    encoded = encode_dataset(codec, ds)
    header = [f"ch{c}" for c in range(encoded.shape[1])]
    _write_matrix_csv(args.out, header, encoded)
    if args.codec_out:
        save_codec(codec, args.codec_out)
    print(f"encoded {encoded.shape[0]} samples to width {encoded.shape[1]} in {args.out}")
    return 0


def cmd_decode(args) -> int:
    codec = load_codec(args.codec)
    _, matrix = _read_matrix_csv(args.data)
    cfg = _kde_from_args(args)
    decoded = np.empty((matrix.shape[0], len(codec.joints)))
    for t in range(matrix.shape[0]):
        try:
            decoded[t] = decode_vector(codec, matrix[t], cfg)
        except UndecodableError as exc:
            print(f"row {t}: {exc}", file=sys.stderr)
            return 1
    _write_matrix_csv(args.out, [j.name for j in codec.joints], decoded)
    print(f"decoded {decoded.shape[0]} rows to {args.out}")
    return 0


def cmd_train(args) -> int:
    codec = load_codec(args.codec)
    _, encoded = _read_matrix_csv(args.data)
    if args.init == "consistent":
        som = init_consistent(args.rows, args.cols, codec, seed=args.seed)
    else:
        som = init_naive(args.rows, args.cols, data_ranges(encoded), seed=args.seed, codec=codec)
    cfg = TrainConfig(cycles=args.cycles, shuffle=args.shuffle, seed=args.seed)
    trained, trace = train(som, encoded, cfg)
    save_map(trained, args.out, train_config=cfg)
    print(f"trained {args.rows}x{args.cols} map: QE {trace[0]:.4f} -> {trace[-1]:.4f}; wrote {args.out}")
    return 0


def cmd_eval(args) -> int:
    som = load_map(args.map)
    if som.codec is None:
        print("map file carries no codec; cannot evaluate", file=sys.stderr)
        return 1
    ds = load_dataset(args.data, args.spec)
    encoded = encode_dataset(som.codec, ds)
    report = evaluate_map(som, som.codec, ds, encoded, _kde_from_args(args),
                          cycles=som.trained_cycles)
    Path(args.out).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    print(json.dumps(report.to_json(), indent=2))
    return 0


def cmd_experiment(args) -> int:
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        if "kde" in doc:
            doc["kde"] = KdeConfig(**doc["kde"])
        for key in ("families", "counts", "seeds"):
            if key in doc:
                doc[key] = tuple(doc[key])
        cfg = ExperimentConfig(**doc)
    else:
        cfg = ExperimentConfig(
            out_dir=args.out,
            babble_seed=args.babble_seed,
            duration_s=args.duration,
            families=tuple(args.families.split(",")),
            counts=tuple(int(n) for n in args.counts.split(",")),
            rows=args.rows,
            cols=args.cols,
            cycles=args.cycles,
            shuffle=args.shuffle,
            seeds=tuple(int(s) for s in args.seeds.split(",")),
            strict=args.strict,
        )
    results = run_experiment(cfg)
    n_fail = sum(1 for c in results if c.error is not None)
    for cell in results:
        status = "ok" if cell.error is None else f"FAILED: {cell.error}"
        print(f"{cell.label}: {status}")
    print(f"{len(results) - n_fail}/{len(results)} cells succeeded; artifacts in {cfg.out_dir}")
    if n_fail and cfg.strict:
        return 1
    return 0


def cmd_demo_inconsistency(args) -> int:
    a, b = args.angles
    lo, hi = args.range
    from .dataset import JointSpec

    report = demo_inconsistency(
        args.family, a, b, out_dir=args.out, count=args.count,
        joint=JointSpec("demo_joint", lo, hi), alpha=args.alpha,
    )
    print(json.dumps(report, indent=2))
    return 0


def cmd_plot_curves(args) -> int:
    if args.data:
        if not args.spec:
            print("--spec is required when --data is given", file=sys.stderr)
            return 2
        ds = load_dataset(args.data, args.spec)
    else:
        ds = generate_babble(BabbleConfig(seed=args.seed, duration_s=30.0))
    codec = build_codec(_codec_spec_from_args(args), ds.joints)
    plot_tuning_curves(codec, ds, dof=args.dof).save(args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_plot_map(args) -> int:
    som = load_map(args.map)
    if som.codec is None:
        print("map file carries no codec; cannot decode units", file=sys.stderr)
        return 1
    plot_posture_grid(som, cfg=_kde_from_args(args)).save(args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posturemap",
        description="Population-coded posture datasets, SOM training, and decoding experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("babble", help="generate a synthetic reach-and-gaze dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=60.0, help="seconds at 50 Hz")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--spec-out", default=None, help="joint-spec sidecar JSON path")
    p.set_defaults(func=cmd_babble)

    p = sub.add_parser("encode", help="encode a dataset with a tuning-curve codec")
    _add_codec_args(p)
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--spec", required=True, help="joint-spec sidecar JSON")
    p.add_argument("--out", required=True, help="encoded CSV path")
    p.add_argument("--codec-out", default=None, help="write the codec JSON here")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode encoded vectors back to angles")
    p.add_argument("--codec", required=True, help="codec JSON")
    p.add_argument("--data", required=True, help="encoded CSV")
    p.add_argument("--out", required=True, help="decoded dataset CSV path")
    _add_kde_args(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("train", help="train a map on encoded data")
    p.add_argument("--codec", required=True)
    p.add_argument("--data", required=True, help="encoded CSV")
    p.add_argument("--rows", type=int, default=5)
    p.add_argument("--cols", type=int, default=5)
    p.add_argument("--cycles", type=int, default=6)
    p.add_argument("--shuffle", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=("consistent", "naive"), default="consistent")
    p.add_argument("--out", required=True, help="map JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="compute metrics of a trained map")
    p.add_argument("--map", required=True)
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--spec", required=True, help="joint-spec sidecar JSON")
    p.add_argument("--out", required=True, help="metrics JSON path")
    _add_kde_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", help="run the family x count x seed matrix")
    p.add_argument("--config", default=None, help="JSON config file (overrides flags)")
    p.add_argument("--out", default="experiment_out")
    p.add_argument("--babble-seed", type=int, default=42)
    p.add_argument("--duration", type=float, default=120.0)
    p.add_argument("--families", default="normalized,linear,sigmoid,gaussian")
    p.add_argument("--counts", default="5,10,20")
    p.add_argument("--rows", type=int, default=5)
    p.add_argument("--cols", type=int, default=5)
    p.add_argument("--cycles", type=int, default=6)
    p.add_argument("--shuffle", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--strict", action="store_true",
                   help="exit nonzero if any cell fails")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("demo-inconsistency", help="one-update drift demonstration")
    p.add_argument("--family", required=True,
                   choices=("normalized", "linear", "sigmoid", "gaussian"))
    p.add_argument("--angles", type=float, nargs=2, default=(-20.0, 10.0),
                   metavar=("INPUT", "INIT"), help="the two angles in degrees")
    p.add_argument("--range", type=float, nargs=2, default=(-40.0, 30.0),
                   metavar=("MIN", "MAX"), help="joint range in degrees")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--out", default=None, help="output directory for SVG + JSON")
    p.set_defaults(func=cmd_demo_inconsistency)

    p = sub.add_parser("plot-curves", help="render tuning curves for one DoF")
    _add_codec_args(p)
    p.add_argument("--data", default=None, help="dataset CSV (default: fresh babble)")
    p.add_argument("--spec", default=None, help="joint-spec sidecar JSON")
    p.add_argument("--seed", type=int, default=0, help="babble seed when no data given")
    p.add_argument("--dof", type=int, default=0)
    p.add_argument("--out", required=True, help="SVG path")
    p.set_defaults(func=cmd_plot_curves)

    p = sub.add_parser("plot-map", help="render the decoded posture grid of a map")
    p.add_argument("--map", required=True)
    p.add_argument("--out", required=True, help="SVG path")
    _add_kde_args(p)
    p.set_defaults(func=cmd_plot_map)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
