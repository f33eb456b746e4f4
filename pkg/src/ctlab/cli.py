"""Command-line entry points.

Exit codes: 0 success, 1 suite failure, 2 configuration error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import suites as suites_mod
from .ball import BallSizeError, CacheError, build_or_load
from .blocks import ModelManifold
from .config import ConfigError, ExperimentConfig, BallConfig, SuiteConfig, load_config
from .reports import write_summary

EXIT_OK, EXIT_SUITE, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3


def _default_config() -> ExperimentConfig:
    from .blocks import ThickBlockSpec, ThinBlockSpec
    return ExperimentConfig(
        ball=BallConfig(),
        stack=[ThickBlockSpec("id"), ThinBlockSpec("a", 4),
               ThickBlockSpec("tw_c")],
        suites=[],
        out_dir="out",
    )


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else _default_config()
    if args.out:
        cfg.out_dir = args.out
    if args.cache:
        cfg.ball.cache = args.cache
    if args.jobs:
        cfg.jobs = args.jobs
    if args.seed is not None:
        for s in cfg.suites:
            s.seed = args.seed
    return cfg


def _ball(cfg: ExperimentConfig):
    return build_or_load(cfg.ball.radius, cfg.ball.margin, cfg.ball.tolerance,
                         cfg.ball.cache, cfg.ball.vertex_cap)


def _suite_cfg(cfg, name, default_samples=200):
    for s in cfg.suites:
        if s.name == name:
            return s
    return SuiteConfig(name=name, samples=default_samples)


_SUITE_RUNNERS = {
    "ball": lambda ball, cfg, sc, out: suites_mod.suite_ball(
        ball, sc, out, cfg.ball.cache),
    "electro": lambda ball, cfg, sc, out: suites_mod.suite_electro(
        ball, sc, out, cfg.ball.cache),
    "projections": lambda ball, cfg, sc, out: suites_mod.suite_projections(
        ball, sc, out, cfg.ball.cache),
    "twist": lambda ball, cfg, sc, out: suites_mod.suite_twist(
        ball, sc, out, cfg.ball.cache),
    "blocks": lambda ball, cfg, sc, out: suites_mod.suite_blocks(
        ball, cfg.stack, sc, out, cfg.ball.cache),
    "ladder": lambda ball, cfg, sc, out: suites_mod.suite_ladder(
        ball, sc, out, cfg.ball.cache),
    "ct": lambda ball, cfg, sc, out: suites_mod.suite_ct(
        ball, cfg.stack, sc, out, cfg.ball.cache),
    "audit": lambda ball, cfg, sc, out: suites_mod.suite_audit(
        ball, cfg.stack, sc, out, cfg.ball.cache),
}


def run_suites(cfg: ExperimentConfig, names) -> int:
    os.makedirs(cfg.out_dir, exist_ok=True)
    try:
        ball = _ball(cfg)
    except BallSizeError as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    results = []
    status = EXIT_OK
    for name in names:
        sc = _suite_cfg(cfg, name)
        try:
            res = _SUITE_RUNNERS[name](ball, cfg, sc, cfg.out_dir)
        except BallSizeError as e:
            print(f"resource cap in suite {name}: {e}", file=sys.stderr)
            return EXIT_RESOURCE
        results.append(res)
        line = "PASS" if res.passed else f"FAIL ({res.witness})"
        print(f"[{name}] {line}  {res.runtime:.1f}s", file=sys.stderr)
        if not res.passed:
            status = EXIT_SUITE
    write_summary(cfg.out_dir, results)
    return status


def cmd_run_all(args):
    cfg = _load(args)
    names = [s.name for s in cfg.suites]
    if args.command == "run-all" and not names and args.config is None:
        names = list(_SUITE_RUNNERS)
    return run_suites(cfg, names)


def cmd_build_ball(args):
    cfg = _load(args)
    try:
        ball = _ball(cfg)
    except BallSizeError as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    print(f"ball R={ball.radius}: {ball.n_vertices} vertices", file=sys.stderr)
    return EXIT_OK


def _single_suite(args, name):
    cfg = _load(args)
    return run_suites(cfg, [name])


def cmd_render(args):
    from . import render as render_mod
    from .ladder import build_ladder
    cfg = _load(args)
    try:
        ball = _ball(cfg)
    except BallSizeError as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    os.makedirs(cfg.out_dir, exist_ok=True)
    out_path = os.path.join(cfg.out_dir, args.svg_name)
    layers = args.layers.split(",") if args.layers else []
    try:
        if "ladder-level" in layers:
            model = ModelManifold(ball, cfg.stack)
            lam0 = suites_mod._twist_fixed_base(ball, 4)
            ladder = build_ladder(model, lam0)
            render_mod.render_ladder(ladder, out_path,
                                     timestamp=cfg.svg_timestamp)
        else:
            extras = {}
            if any(l in layers for l in
                   ("qcsets", "electric-geodesic", "electro-ambient", "geodesic")):
                from .electric import CurveClass, ElectricSpace
                es = ElectricSpace(ball, CurveClass("a"))
                lam = suites_mod._twist_fixed_base(ball, 4)
                ep = es.electric_geodesic(lam.vertices[0], lam.vertices[-1])
                extras = dict(es=es, geodesic=lam, electric_geodesic=ep,
                              electro_ambient=es.electro_ambient(ep))
            render_mod.render_ball(ball, layers, out_path,
                                   timestamp=cfg.svg_timestamp, **extras)
    except render_mod.RenderError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(out_path, file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="ctlab",
                                 description="coarse-geometry experiments on "
                                             "the genus-2 surface group")
    ap.add_argument("--config", metavar="PATH")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", metavar="DIR")
    ap.add_argument("--cache", metavar="DIR")
    ap.add_argument("--jobs", type=int, metavar="N",
                    help="worker hint; suites aggregate order-independently")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("build-ball")
    sub.add_parser("electrify")
    sub.add_parser("twist-sweep")
    sub.add_parser("blocks-build")
    sub.add_parser("ladder")
    sub.add_parser("retract-sweep")
    sub.add_parser("ct-curve")
    sub.add_parser("audit")
    from .render import KNOWN_LAYERS
    rp = sub.add_parser("render")
    rp.add_argument("--layers", default="ball-edges",
                    help="comma-separated subset of: " + ",".join(KNOWN_LAYERS))
    rp.add_argument("--svg-name", default="scene.svg")
    sub.add_parser("run-all")

    args = ap.parse_args(argv)
    try:
        if args.command == "build-ball":
            return cmd_build_ball(args)
        if args.command == "render":
            return cmd_render(args)
        if args.command == "run-all":
            return cmd_run_all(args)
        mapping = {"electrify": "electro", "twist-sweep": "twist",
                   "blocks-build": "blocks", "ladder": "ladder",
                   "retract-sweep": "ladder", "ct-curve": "ct",
                   "audit": "audit"}
        return _single_suite(args, mapping[args.command])
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CacheError as e:
        print(f"cache error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
