"""Command line entry point: ``d2dcache <subcommand> [--config FILE] [--<key> VALUE ...]``."""
import argparse
import csv
import logging
import os
import sys
from dataclasses import fields

from . import config as cfgmod
from .config import ConfigError, ScenarioConfig
from .diffusion import write_delays, write_traces
from .experiments import AXES, emit, make_scenario, run_scenario, sweep
from .graphcore import write_edge_list
from .radio import write_link_table, write_topology
from .shapley import write_report
from .socialnet import validate_social_layer, write_memberships, write_ties

EXIT_INVALID = 2


def _add_config_flags(p, require_config):
    p.add_argument("--config", required=require_config, help="flat key = value scenario file")
    group = p.add_argument_group("scenario keys (override the config file)")
    for f in fields(ScenarioConfig):
        names = [f"--{f.name}"]
        if "_" in f.name:
            names.append(f"--{f.name.replace('_', '-')}")
        group.add_argument(*names, dest=f"key_{f.name}", default=None, metavar="VALUE")


def build_config(args):
    """Config file (if any) with explicitly given flags layered on top."""
    problems = []
    base = ScenarioConfig()
    if getattr(args, "config", None):
        try:
            base = cfgmod.load(args.config)
        except OSError as exc:
            raise ConfigError([f"cannot read config {args.config!r}: {exc.strerror}"]) from None
    changes = {}
    for f in fields(ScenarioConfig):
        raw = getattr(args, f"key_{f.name}", None)
        if raw is None:
            continue
        try:
            changes[f.name] = cfgmod.parse_value(f.name, raw)
        except ConfigError as exc:
            problems.extend(exc.problems)
    if problems:
        raise ConfigError(problems)
    return cfgmod.check(base.replace(**changes))


def _parser():
    p = argparse.ArgumentParser(prog="d2dcache", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write topology, social layer, link table and D2D edge list")
    _add_config_flags(g, False)
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--replicate", type=int, default=0, help="topology replicate index")

    c = sub.add_parser("centrality", help="per-UE scores for every method")
    _add_config_flags(c, False)
    c.add_argument("--out", help="report CSV (default: stdout)")
    c.add_argument("--replicate", type=int, default=0)

    s = sub.add_parser("select-seeds", help="one seed per community for each method")
    _add_config_flags(s, False)
    s.add_argument("--out", help="CSV method,community_id,ue_id (default: stdout)")
    s.add_argument("--replicate", type=int, default=0)

    m = sub.add_parser("simulate", help="Monte-Carlo diffusion for one scenario family")
    _add_config_flags(m, True)
    m.add_argument("--out", required=True)
    m.add_argument("--format", default="csv", help="comma list of csv, plot-data")
    m.add_argument("--traces", action="store_true", help="also write traces.csv and delays.csv")

    w = sub.add_parser("sweep", help="repeat the simulation over a parameter axis")
    _add_config_flags(w, True)
    w.add_argument("--axis", required=True, choices=[a for a in AXES if a != "none"])
    w.add_argument("--points", required=True, help="comma-separated sorted values")
    w.add_argument("--out", required=True)
    w.add_argument("--format", default="csv,plot-data")

    v = sub.add_parser("validate-config", help="check a scenario and report every problem")
    _add_config_flags(v, False)
    return p


def _formats(text):
    out = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [t for t in out if t not in ("csv", "plot-data")]
    if bad or not out:
        raise ConfigError([f"unknown output format(s): {', '.join(bad) or '(none)'}"])
    return out


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_generate(args, cfg):
    sc, _ = make_scenario(cfg, "none", 0, args.replicate)
    os.makedirs(args.out, exist_ok=True)
    write_topology(sc.topology, os.path.join(args.out, "topology.csv"))
    write_memberships(sc.social, os.path.join(args.out, "memberships.csv"))
    write_ties(sc.social, os.path.join(args.out, "ties.csv"))
    write_link_table(sc.links, os.path.join(args.out, "links.csv"))
    write_edge_list(sc.d2d, os.path.join(args.out, "d2d_edges.csv"))
    print(f"{sc.topology.size} UEs, {sc.d2d.edge_count} D2D edges, "
          f"{sc.social.community_count} communities -> {args.out}")


def cmd_centrality(args, cfg):
    sc, _ = make_scenario(cfg, "none", 0, args.replicate)
    write_report(sc.report, sc.social, sc.seeds, args.out or sys.stdout)


def cmd_select_seeds(args, cfg):
    sc, _ = make_scenario(cfg, "none", 0, args.replicate)
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh)
        w.writerow(["method", "community_id", "ue_id"])
        for m in cfg.methods:
            for l, ue in enumerate(sc.seeds[m]):
                w.writerow([m, l, ue])
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_simulate(args, cfg):
    formats = _formats(args.format)
    result = run_scenario(cfg, keep_traces=args.traces)
    paths = emit(result, args.out, formats)
    if args.traces:
        paths.append(os.path.join(args.out, "traces.csv"))
        write_traces(result.traces, paths[-1])
        paths.append(os.path.join(args.out, "delays.csv"))
        write_delays(result.traces, paths[-1])
    for p in paths:
        print(p)


def cmd_sweep(args, cfg):
    formats = _formats(args.format)
    try:
        points = [float(x) for x in args.points.split(",") if x.strip()]
    except ValueError:
        raise ConfigError([f"--points: cannot parse {args.points!r}"]) from None
    if not points:
        raise ConfigError(["--points must list at least one value"])
    if points != sorted(points):
        raise ConfigError(["--points must be sorted ascending"])
    if args.axis == "n_ues":
        points = [int(round(x)) for x in points]
    for p in emit(sweep(cfg, args.axis, points), args.out, formats):
        print(p)


def cmd_validate(args, cfg):
    if cfg.community_mode == "from-file":
        try:
            sc, _ = make_scenario(cfg, "none", 0, 0)
        except ValueError as exc:
            raise ConfigError([str(exc)]) from None
        problems = validate_social_layer(sc.social)
        if problems:
            raise ConfigError(problems)
    print("ok")


COMMANDS = {
    "generate": cmd_generate,
    "centrality": cmd_centrality,
    "select-seeds": cmd_select_seeds,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "validate-config": cmd_validate,
}


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
