"""Command-line interface.

Subcommands: blur, transform, noise, moments, features, experiment.
Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .blur import (blur_constant, load_profile, parse_angle, profile_from_spec,
                   synthesize_blur)
from .evaluate import (FEATURE_FAMILIES, extract_features,
                       run_classification_experiment, run_stability_experiment)
from .image import SimilarityParams, add_gaussian_noise, apply_similarity, load_image, write_pgm
from .invariants import rmbmi4, rmbmi6
from .moments import complex_from_geometric, geometric_moments, normalize_complex

FEATURE_SETS = tuple(FEATURE_FAMILIES)


class ConfigError(Exception):
    """Invalid configuration or arguments (exit code 2)."""


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_manifest(output_path, config, seed, input_files=()):
    digests = {}
    for p in input_files:
        digests[str(p)] = hashlib.sha256(Path(p).read_bytes()).hexdigest()
    manifest = {
        "tool": "rotblur",
        "version": __version__,
        "config": config,
        "seed": seed,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "inputs": digests,
    }
    path = Path(str(output_path) + ".manifest.json")
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest, indent=2, default=str) + "\n")
    os.replace(tmp, path)


def _profile_from_args(args):
    specs = [s for s in (("ucm", args.ucm), ("uacm", args.uacm), ("rcm", args.rcm),
                         ("file", args.profile)) if s[1]]
    if len(specs) != 1:
        raise ConfigError("exactly one of --ucm/--uacm/--rcm/--profile is required")
    kind, value = specs[0]
    if kind == "file":
        return load_profile(value)
    parts = [p for p in value.split(",") if p]
    if kind == "ucm":
        if len(parts) != 2:
            raise ConfigError("--ucm expects omega,exposure")
        return profile_from_spec({"type": "ucm", "omega": parts[0], "exposure": float(parts[1])})
    if len(parts) != 3:
        raise ConfigError(f"--{kind} expects omega,alpha,exposure")
    return profile_from_spec({"type": kind, "omega": parts[0], "alpha": parts[1],
                              "exposure": float(parts[2])})


def cmd_blur(args) -> int:
    img = load_image(args.input)
    profile = _profile_from_args(args)
    out = synthesize_blur(img, profile, args.steps)
    write_pgm(args.output, out)
    for delta in range(1, 5):
        const = blur_constant(profile, delta)
        print(f"blur_constant(delta={delta}) = {const.real:.12g} {const.imag:+.12g}i")
    return 0


def cmd_transform(args) -> int:
    img = load_image(args.input)
    params = SimilarityParams(phi=parse_angle(args.phi), s=float(args.scale))
    write_pgm(args.output, apply_similarity(img, params))
    return 0


def cmd_noise(args) -> int:
    img = load_image(args.input)
    write_pgm(args.output, add_gaussian_noise(img, args.snr, args.seed))
    return 0


def cmd_moments(args) -> int:
    img = load_image(args.input)
    gm = geometric_moments(img, args.max_order)
    cm = complex_from_geometric(gm)
    rows = []
    for p in range(args.max_order + 1):
        for q in range(args.max_order + 1 - p):
            c = cm[p, q]
            rows.append((p, q, float(gm[p, q]), float(c.real), float(c.imag)))
    _write_csv(args.output, ("p", "q", "m_pq", "re_c_pq", "im_c_pq"), rows)
    return 0


def cmd_features(args) -> int:
    images = [load_image(p) for p in args.inputs]
    if args.set in ("rmbmi4", "rmbmi6") and not args.normalized:
        order = 4 if args.set == "rmbmi4" else 6
        build = rmbmi4 if args.set == "rmbmi4" else rmbmi6
        vectors = [build(complex_from_geometric(geometric_moments(img, order)), False)
                   for img in images]
    else:
        if args.set in ("hu7", "hm5", "lmbmi") or args.normalized:
            vectors = [extract_features(img, args.set) for img in images]
        else:
            raise ConfigError(f"feature set {args.set!r} is only defined in normalized form")
    names = vectors[0].names
    rows = [(str(path), *map(float, fv.values))
            for path, fv in zip(args.inputs, vectors)]
    _write_csv(args.output, ("image", *names), rows)
    return 0


def cmd_experiment(args) -> int:
    config_path = Path(args.config)
    try:
        config = json.loads(config_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}")
    kind = config.get("experiment")
    output = config.get("output") or args.output
    if output is None:
        raise ConfigError("config needs an 'output' CSV path (or pass --output)")
    seed = config.get("seed", 0)

    if kind == "stability":
        report = run_stability_experiment(config)
        header = ("feature", *report.columns)
        rows = [(name, *map(float, values)) for name, values in report.rows()]
        _write_csv(output, header, rows)
    elif kind == "classification":
        result = run_classification_experiment(config)
        rows = [(fam, *map(float, accs)) for fam, accs in result.accuracy.items()]
        _write_csv(output, ("feature_set", *result.columns), rows)
        if result.noise_accuracy:
            noise_out = config.get("noise_output", str(output) + ".noise.csv")
            rows = [(float(snr), *map(float, accs))
                    for snr, accs in result.noise_accuracy.items()]
            _write_csv(noise_out, ("snr_db", *result.columns), rows)
    else:
        raise ConfigError(f"config 'experiment' must be 'stability' or 'classification', got {kind!r}")
    _write_manifest(output, config, seed, input_files=[config_path])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotblur",
        description="Rotational motion blur synthesis and blur-invariant moment features.")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("ROTBLUR_THREADS", "0")),
                        help="thread cap for numerical backends (0 = library default)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("blur", help="apply rotational motion blur to an image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--ucm", help="omega,exposure (angles accept pi literals like pi/20)")
    p.add_argument("--uacm", help="omega,alpha,exposure")
    p.add_argument("--rcm", help="omega,alpha,exposure")
    p.add_argument("--profile", help="JSON motion profile file")
    p.add_argument("--steps", type=int, default=None, help="time samples (default: auto)")
    p.set_defaults(func=cmd_blur)

    p = sub.add_parser("transform", help="apply a similarity transform")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--phi", default="0", help="rotation angle in radians (pi literals ok)")
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("noise", help="add Gaussian noise at a target SNR")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--snr", type=float, required=True, help="SNR in dB")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("moments", help="emit geometric and complex moments as CSV")
    p.add_argument("input")
    p.add_argument("--max-order", type=int, default=6)
    p.add_argument("--output", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("features", help="emit invariant feature vectors as CSV")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--set", default="rmbmi4", choices=sorted(set(FEATURE_SETS) | {"rmbmi4", "rmbmi6"}))
    p.add_argument("--normalized", action="store_true",
                   help="use similarity-normalized moments")
    p.add_argument("--output", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("experiment", help="run a stability or classification experiment")
    p.add_argument("config", help="JSON experiment config")
    p.add_argument("--output", default=None, help="override output CSV path")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads > 0:
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
