"""``droplet-fall`` command line interface."""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, runner
from .config import RunConfig, parse_config, parse_value
from .exceptions import BlowUpError, ConfigError, DomainExitError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_DOMAIN = 4
EXIT_STABILITY = 5

log = logging.getLogger("droplet_fall")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file (a run manifest also works)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a dotted key, e.g. potential.a=9.8 (repeatable)")
    p.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides seed)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="droplet-fall",
        description="Closed-form and split-step simulation of 1D quantum droplets "
                    "falling in linear traps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("analytic", "closed-form fields at diagnostics.times"),
                       ("evolve", "split-step evolution of the closed-form seed"),
                       ("wigner", "Wigner map at diagnostics.wigner.t"),
                       ("entropy", "Shannon entropy time series")):
        _common(sub.add_parser(name, help=text))

    st = sub.add_parser("stability", help="noise-robustness protocol")
    _common(st)
    st.add_argument("--enforce", action="store_true",
                    help=f"exit with {EXIT_STABILITY} when the deviation threshold is exceeded")

    pr = sub.add_parser("preset", help="regenerate the data behind one figure")
    pr.add_argument("name", nargs="?", help="fig1 ... fig10")
    pr.add_argument("--config", type=Path, help="preset manifest to re-run")
    pr.add_argument("--out", type=Path, help="output directory (default out/<name>)")
    pr.add_argument("--seed", type=int, help="seed (default 0)")
    pr.add_argument("--list", action="store_true", help="list presets and exit")

    sw = sub.add_parser("sweep", help="Cartesian product over parameter values")
    _common(sw)
    sw.add_argument("--vary", action="append", default=[], metavar="KEY=V1,V2,...",
                    help="values for one dotted key (repeatable)")
    sw.add_argument("--task", choices=sorted(runner.TASKS), default="evolve")
    return parser


def _load(args) -> RunConfig:
    text = args.config.read_text(encoding="utf-8") if args.config else ""
    overrides = list(args.overrides)
    if args.out is not None:
        overrides.append(f"output_dir={json.dumps(str(args.out))}")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    return parse_config(text, overrides)


def _parse_vary(items) -> list[tuple[str, list]]:
    axes = []
    for item in items:
        if "=" not in item:
            raise ConfigError(f"--vary {item!r} is not of the form key=v1,v2,...")
        key, raw = item.split("=", 1)
        values = [parse_value(v.strip()) for v in raw.split(",") if v.strip()]
        if not values:
            raise ConfigError("no values given", key=key)
        axes.append((key.strip(), values))
    return axes


def _sweep_case(task: str, values: dict) -> int:
    cfg = parse_config(values)
    try:
        runner.TASKS[task](cfg)
    except BlowUpError as exc:
        log.error("%s: %s", values["output_dir"], exc)
        return EXIT_BLOWUP
    except DomainExitError as exc:
        log.error("%s: %s", values["output_dir"], exc)
        return EXIT_DOMAIN
    return EXIT_OK


def _sweep(args) -> int:
    import time

    started = time.perf_counter()
    base = _load(args)
    axes = _parse_vary(args.vary)
    if not axes:
        raise ConfigError("sweep needs at least one --vary")
    root = Path(base.values["output_dir"])
    cases = []
    for i, combo in enumerate(itertools.product(*(v for _, v in axes))):
        assignments = [f"{k}={json.dumps(v)}" for (k, _), v in zip(axes, combo)]
        assignments.append(f"output_dir={json.dumps(str(root / f'case_{i:03d}'))}")
        cases.append((combo, parse_config(base.to_dict(), assignments).values))

    workers = min(runner.max_workers(), len(cases))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            codes = list(pool.map(_sweep_case, [args.task] * len(cases), [c for _, c in cases]))
    else:
        codes = [_sweep_case(args.task, c) for _, c in cases]

    index = root / "sweep.csv"
    with open(index, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["case"] + [k for k, _ in axes] + ["exit_code"])
        for i, ((combo, _), code) in enumerate(zip(cases, codes)):
            w.writerow([f"case_{i:03d}"] + [json.dumps(v) for v in combo] + [code])
    runner.write_manifest(root, "sweep", [index], started, resolved_config=base.to_dict(),
                          extra={"sweep": {"task": args.task,
                                           "axes": {k: v for k, v in axes},
                                           "exit_codes": codes}})
    return next((c for c in codes if c != EXIT_OK), EXIT_OK)


def _preset(args) -> int:
    from .presets import PRESETS

    if args.list:
        for p in PRESETS.values():
            print(f"{p.name:6s} {p.description}")
        return EXIT_OK
    name, seed = args.name, args.seed
    if args.config is not None:
        manifest = json.loads(args.config.read_text(encoding="utf-8"))
        if "preset" not in manifest:
            raise ConfigError("not a preset manifest", key="preset")
        name = name or manifest["preset"]
        seed = manifest.get("seed", 0) if seed is None else seed
    if name is None:
        raise ConfigError("preset name required (see --list)", key="preset")
    out = args.out if args.out is not None else Path("out") / name
    manifest = runner.run_preset(name, out, 0 if seed is None else seed)
    print(f"{name}: wrote {len(manifest['files'])} files to {out}")
    return EXIT_OK


def _dispatch(args) -> int:
    if args.command == "preset":
        return _preset(args)
    if args.command == "sweep":
        return _sweep(args)
    cfg = _load(args)
    if args.command == "stability":
        manifest, passed = runner.run_stability(cfg)
        s = manifest["stability"]
        print(f"max relative deviation {s['max_relative_deviation']:.4g} "
              f"(threshold {s['pass_threshold']:g}): {'PASS' if passed else 'FAIL'}")
        enforce = args.enforce or cfg.values["noise"]["enforce"]
        return EXIT_STABILITY if (enforce and not passed) else EXIT_OK
    manifest = runner.TASKS[args.command](cfg)
    print(f"{args.command}: wrote {len(manifest['files'])} files to {cfg.values['output_dir']}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"numerical blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except DomainExitError as exc:
        print(f"domain exit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, OSError) as exc:
        # WignerRangeError, probes outside the grid and similar input problems
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
