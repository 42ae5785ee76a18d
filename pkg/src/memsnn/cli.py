"""Command-line harness: validate-neuron, validate-stdp, train, sweep-schedules, rram-iv.

Every command writes CSV outputs, a summary.json and rendered figures into
--out (default ./memsnn-out/<command>). Exit code 0 on success; errors print
a diagnostic and exit nonzero.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench, plots
from .engine import RunConfig


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="run-config key=value file")
    parser.add_argument("--seed", type=int, help="run seed (overrides config)")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--mode", choices=["reference", "hardware"], help="simulation mode")
    parser.add_argument("--device", choices=["ideal", "realistic"], help="RRAM model")
    parser.add_argument(
        "--schedule", choices=["immediate", "post-sample", "post-epoch"],
        help="learn-to-recognize transfer schedule",
    )
    parser.add_argument("--epochs", type=int, help="training epochs (overrides config)")
    parser.add_argument("--no-figures", action="store_true", help="skip PNG rendering")


def _load_config(args: argparse.Namespace) -> RunConfig:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.device is not None:
        overrides["device_model"] = args.device
    if args.schedule is not None:
        overrides["schedule"] = args.schedule
    if getattr(args, "epochs", None) is not None:
        overrides["epochs"] = args.epochs
    if args.config is not None:
        return RunConfig.from_file(args.config, **overrides)
    return RunConfig(**overrides)


def _out_dir(args: argparse.Namespace, command: str) -> Path:
    out = args.out if args.out is not None else Path("memsnn-out") / command
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_validate_neuron(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _out_dir(args, "validate-neuron")
    reports, offsets = bench.cmd_validate_neuron(config)
    rows = np.array([
        [r.refractory_ms, r.mean_isi_ms, r.offset_mean_ms, r.offset_std_ms,
         r.missing_rate, r.n_reference_spikes]
        for r in reports
    ])
    bench.write_csv(
        out / "offsets.csv",
        ["refractory_ms", "mean_isi_ms", "offset_mean_ms", "offset_std_ms",
         "missing_rate", "n_reference_spikes"],
        rows,
    )
    bench.write_summary(out / "summary.json", config,
                        {"reports": [r.__dict__ for r in reports]})
    if not args.no_figures:
        plots.plot_offset_histogram(offsets, out / "offsets.png")
    for r in reports:
        print(f"refractory {r.refractory_ms:g} ms: offset {r.offset_mean_ms:+.3f} "
              f"+/- {r.offset_std_ms:.3f} ms, missing {100 * r.missing_rate:.2f}% "
              f"of {r.n_reference_spikes}")
    return 0


def _cmd_validate_stdp(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _out_dir(args, "validate-stdp")
    sweep, max_err = bench.cmd_validate_stdp(config)
    bench.write_stdp_csv(out / "stdp.csv", sweep)
    bench.write_summary(out / "summary.json", config,
                        {"max_relative_error": max_err, "n_points": len(sweep)})
    if not args.no_figures:
        plots.plot_stdp_sweep(sweep, out / "stdp.png")
    print(f"max |hardware - oracle| / a_plus over {len(sweep)} pairs: {max_err:.4f}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _out_dir(args, "train")
    report = bench.cmd_train(config, iris_path=args.iris, paired_reference=args.paired)
    bench.write_accuracy_csv(out / "accuracy.csv", report.curve)
    for epoch, w in sorted(report.result.snapshots.items()):
        bench.write_weights_csv(out / f"weights_epoch{epoch:03d}.csv", w)
    bench.write_weights_csv(out / "weights_final.csv", report.result.final_weights)
    payload = {
        "mode": config.mode,
        "device": config.device_model,
        "schedule": config.schedule,
        "seed": config.seed,
        "max_accuracy_pct": report.curve.max,
        "mean_accuracy_pct": report.curve.mean,
        "per_epoch": report.curve.per_epoch,
    }
    payload.update(report.equivalence.to_dict())
    bench.write_summary(out / "summary.json", config, payload)
    if not args.no_figures:
        plots.plot_accuracy(report.curve.per_epoch, out / "accuracy.png",
                            label=f"{config.mode}/{config.device_model}/{config.schedule}")
        plots.plot_weight_maps(report.result.snapshots, out / "weights.png")
    print(f"{config.mode} mode, {config.device_model} device, {config.schedule} schedule, "
          f"seed {config.seed}: max {report.curve.max:.1f}%, mean {report.curve.mean:.1f}%")
    if report.equivalence.r_squared is not None:
        print(f"paired reference R^2 at checkpoints: {report.equivalence.r_squared:.4f}")
    return 0


def _cmd_sweep_schedules(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _out_dir(args, "sweep-schedules")
    curves = bench.cmd_sweep_schedules(config, iris_path=args.iris)
    n = len(next(iter(curves.values())).per_epoch)
    table = np.column_stack(
        [np.arange(1, n + 1)] + [np.asarray(c.per_epoch) for c in curves.values()]
    )
    bench.write_csv(out / "schedules.csv", ["epoch", *curves.keys()], table)
    bench.write_summary(out / "summary.json", config, {
        name: {"max": c.max, "mean": c.mean} for name, c in curves.items()
    })
    if not args.no_figures:
        plots.plot_schedule_curves({k: c.per_epoch for k, c in curves.items()},
                                   out / "schedules.png")
    for name, c in curves.items():
        print(f"{name}: max {c.max:.1f}%, mean {c.mean:.1f}%")
    return 0


def _cmd_rram_iv(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _out_dir(args, "rram-iv")
    traces = bench.cmd_rram_iv(config)
    for name, trace in traces.items():
        bench.write_iv_csv(out / f"iv_{name}.csv", trace)
    bench.write_summary(out / "summary.json", config, {
        name: {"g_final_us": float(t[-1, 2]), "g_ratio": float(t[:, 2].max() / t[:, 2].min())}
        for name, t in traces.items()
    })
    if not args.no_figures:
        plots.plot_iv_curves(traces, out / "iv.png")
    for name, t in traces.items():
        print(f"{name}: conductance ratio over loop {t[:, 2].max() / t[:, 2].min():.1f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memsnn",
        description="Two-array memristive SNN simulator and validation harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-neuron", help="coarse-vs-fine-dt LIF spike fidelity")
    _add_common(p)
    p.set_defaults(func=_cmd_validate_neuron)

    p = sub.add_parser("validate-stdp", help="waveform-superposition STDP vs the rule")
    _add_common(p)
    p.set_defaults(func=_cmd_validate_stdp)

    p = sub.add_parser("train", help="train and evaluate the Iris classifier")
    _add_common(p)
    p.add_argument("--iris", type=Path, help="iris CSV (default: bundled copy)")
    p.add_argument("--paired", action="store_true",
                   help="also run the same-seed reference and report weight R^2")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("sweep-schedules", help="compare transfer schedules, same init")
    _add_common(p)
    p.add_argument("--iris", type=Path, help="iris CSV (default: bundled copy)")
    p.set_defaults(func=_cmd_sweep_schedules)

    p = sub.add_parser("rram-iv", help="DC-IV sweeps of both device models")
    _add_common(p)
    p.set_defaults(func=_cmd_rram_iv)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
