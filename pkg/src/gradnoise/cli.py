"""Command-line entry point.

Subcommands::

    gradnoise sanity-sas      synthetic stable-noise sweep -> CSV + SVG
    gradnoise train-probe     train an MLP, probe SGN at checkpoints
                              -> CSV + manifest + SVGs (+ noise files)
    gradnoise estimate-alpha  tail-index estimate of a noise/number file -> JSON
    gradnoise test-1d         both scalar tests on a numeric file -> stdout JSON

Each takes ``--config PATH`` (flat key=value file or a previously
written JSON manifest) and any number of ``--set key=value`` overrides.
Exit codes: 0 success, 1 I/O failure, 2 bad configuration, 3 malformed
data file, 4 degenerate statistics.  CSV outputs are written before any
figure, so a rendering failure never corrupts the tabular results.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import (
    COMMANDS,
    EstimateAlphaConfig,
    SanitySasConfig,
    Test1dConfig,
    TrainProbeConfig,
    config_to_dict,
    load_config,
)
from .errors import DataFormatError, DegenerateSampleError, ParameterError
from .figures import FigureSpec, render_figure, render_training_curves
from .noise_io import (
    NOISE_MAGIC,
    load_numeric_lines,
    read_noise,
    write_noise,
    write_reports_csv,
)
from .projection import sas_sanity_sweep
from .sgn_harness import ProbeConfig, TrainConfig, load_idx, synth_blobs, train_and_probe
from .tail_index import estimate_alpha, estimate_alpha_on_noise
from .univariate_tests import anderson_darling, shapiro_wilk

_AGGREGATES = (
    "sw_mean_p",
    "ad_accept_frac",
    "baseline_sw_mean_p",
    "baseline_ad_accept_frac",
)

EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_DATA_FORMAT = 3
EXIT_DEGENERATE = 4


def _aggregate_series(reports) -> dict:
    return {name: tuple(getattr(r, name) for r in reports) for name in _AGGREGATES}


def cmd_sanity_sas(config: SanitySasConfig) -> int:
    rows = sas_sanity_sweep(
        config.alphas,
        m=config.m,
        p=config.p,
        k=config.k,
        level=config.level,
        seed=config.seed,
        workers=config.workers,
    )
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sanity_sas.csv"
    write_reports_csv(csv_path, rows, x_name="alpha")
    svg_path = out_dir / "sanity_sas.svg"
    render_figure(
        FigureSpec(
            x=tuple(alpha for alpha, _ in rows),
            series=_aggregate_series([r for _, r in rows]),
            x_label="stability index alpha",
            y_label="battery aggregate",
            path=svg_path,
            title="projection battery on synthetic stable noise",
        )
    )
    print(f"wrote {csv_path}")
    print(f"wrote {svg_path}")
    return 0


def _build_dataset(config: TrainProbeConfig):
    if config.dataset == "idx":
        return load_idx(config.idx_images, config.idx_labels)
    return synth_blobs(
        config.blobs_n,
        config.blobs_d,
        config.blobs_classes,
        config.blobs_spread,
        config.blobs_seed,
    )


def cmd_train_probe(config: TrainProbeConfig) -> int:
    data = _build_dataset(config)
    train_config = TrainConfig(
        batch_size=config.batch_size,
        learning_rate=config.learning_rate,
        iterations=config.iterations,
        checkpoint_every=config.checkpoint_every,
        sgn_minibatches=config.sgn_minibatches,
        seed=config.seed,
    )
    probe = ProbeConfig(n_directions=config.k, level=config.level, workers=config.workers)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    noise_files = []

    def sink(iteration, noise):
        if not config.save_noise:
            return None
        path = out_dir / f"sgn_iter{iteration}.bin"
        write_noise(path, noise)
        noise_files.append(path.name)
        return path.name

    results = train_and_probe(
        train_config,
        data,
        probe=probe,
        layer_sizes=(data.d, *config.hidden, data.n_classes),
        activation=config.activation,
        noise_sink=sink,
        force_full_batch=config.force_full_batch,
    )

    checkpoints = [c for c, _ in results]
    reports = [r for _, r in results]
    iterations = [c.iteration for c in checkpoints]

    csv_path = out_dir / "train_probe.csv"
    write_reports_csv(csv_path, [(c.iteration, r) for c, r in results], x_name="iteration")

    manifest_path = out_dir / "manifest.json"
    files = [csv_path.name, "train_probe_tests.svg", "train_probe_curves.svg"] + noise_files
    manifest = {
        "command": "train-probe",
        "config": config_to_dict(config),
        "iterations": iterations,
        "losses": [c.loss for c in checkpoints],
        "accuracies": [c.train_accuracy for c in checkpoints],
        "gaussian_plausible": [r.gaussian_plausible for r in reports],
        "files": files,
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    render_figure(
        FigureSpec(
            x=tuple(float(t) for t in iterations),
            series=_aggregate_series(reports),
            x_label="iteration",
            y_label="battery aggregate",
            path=out_dir / "train_probe_tests.svg",
            title=f"SGN Gaussianity during training (b={config.batch_size})",
        )
    )
    render_training_curves(
        out_dir / "train_probe_curves.svg",
        iterations,
        [c.loss for c in checkpoints],
        [c.train_accuracy for c in checkpoints],
    )

    print(f"wrote {csv_path}")
    print(f"wrote {manifest_path}")
    print(f"wrote {out_dir / 'train_probe_tests.svg'}")
    print(f"wrote {out_dir / 'train_probe_curves.svg'}")
    for name in noise_files:
        print(f"wrote {out_dir / name}")
    return 0


def _is_noise_file(path: Path) -> bool:
    try:
        with open(path, "rb") as fh:
            return fh.read(len(NOISE_MAGIC)) == NOISE_MAGIC
    except OSError:
        return False


def cmd_estimate_alpha(config: EstimateAlphaConfig) -> int:
    path = Path(config.input)
    if _is_noise_file(path):
        estimate = estimate_alpha_on_noise(read_noise(path), k1=config.k1)
    else:
        estimate = estimate_alpha(load_numeric_lines(path), k1=config.k1)
    payload = {"input": str(path), **estimate.to_dict()}
    text = json.dumps(payload, indent=2, sort_keys=True)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "alpha.json"
    out_path.write_text(text + "\n")
    print(text)
    return 0


def cmd_test_1d(config: Test1dConfig) -> int:
    sample = load_numeric_lines(config.input)
    sw = shapiro_wilk(sample, level=config.level)
    ad = anderson_darling(sample, level=config.level)
    payload = {
        "input": config.input,
        "n": int(sample.size),
        "level": config.level,
        "shapiro_wilk": {
            "statistic": sw.statistic,
            "p_value": sw.p_value,
            "accepted": sw.accepted,
        },
        "anderson_darling": {
            "statistic": ad.statistic,
            "accepted": ad.accepted,
        },
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


_DISPATCH = {
    "sanity-sas": cmd_sanity_sas,
    "train-probe": cmd_train_probe,
    "estimate-alpha": cmd_estimate_alpha,
    "test-1d": cmd_test_1d,
}

_HELP = {
    "sanity-sas": "run the projection battery on synthetic stable noise",
    "train-probe": "train a small MLP and probe its gradient noise",
    "estimate-alpha": "estimate the stability index of a sample file",
    "test-1d": "run both scalar Gaussianity tests on a numeric file",
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gradnoise",
        description="Gaussianity testing of stochastic gradient noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=_HELP[name])
        sp.add_argument("--config", default=None, help="flat key=value file or JSON manifest")
        sp.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            dest="overrides",
            help="override one config key (repeatable)",
        )
    args = parser.parse_args(argv)
    try:
        config = load_config(args.command, args.config, args.overrides)
        return _DISPATCH[args.command](config)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_FORMAT
    except DegenerateSampleError as exc:
        print(f"error: degenerate statistics: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
