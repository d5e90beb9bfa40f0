"""Scenario orchestration, parameter sweeps and CSV / plot-data emission.

Seeds: every random stream is derived from ``master_seed`` with
``numpy.random.SeedSequence(master_seed, spawn_key=(point, stream, index))``,
taking the first 64-bit word of ``generate_state``. ``point`` is the index of
the sweep point, ``stream`` one of the ``_S_*`` constants below and ``index``
the topology replicate or run id. The axis name is deliberately left out so a
one-point sweep reproduces ``run_scenario``. Nothing depends on execution
order, so any ``jobs`` value yields the same bytes.
"""
import csv
import logging
import os
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import check
from .diffusion import compute_metrics, mobility_run, run
from .radio import generate_topology, read_topology
from .scenario import build_scenario, slot_influence
from .socialnet import random_memberships, read_social_layer, sample_social_layer

log = logging.getLogger(__name__)

AXES = ("none", "d_fraction", "n_ues", "mobility_speed")
_S_TOPOLOGY, _S_SOCIAL, _S_LINKS, _S_RUN, _S_SPEEDS = range(5)
HIST_BINS = 10


def derive_seed(master_seed, axis, point, stream, index):
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    ss = np.random.SeedSequence(master_seed, spawn_key=(point, stream, index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def apply_point(cfg, axis, value):
    if axis == "d_fraction":
        return cfg.replace(d_fraction=float(value))
    if axis == "n_ues":
        return cfg.replace(total_ues=int(value), mean_ues_per_cluster=float(value) / cfg.n_clusters)
    return cfg


@dataclass
class ExperimentResult:
    axis: str
    points: list
    methods: tuple
    rows: list = field(default_factory=list)  # diffusion rows
    mobility_rows: list = field(default_factory=list)
    delay_hist: dict = field(default_factory=dict)  # (point_idx, method) -> Counter
    score_hist: dict = field(default_factory=dict)  # (point_idx, method) -> counts per bin

    def aggregate(self):
        """Per (point, method): run count, mean/std of final count and speed, mean delay."""
        groups = defaultdict(list)
        for r in self.rows:
            groups[(r["point_idx"], r["method"])].append(r)
        out = []
        for pi, x in enumerate(self.points):
            for m in self.methods:
                rs = groups.get((pi, m), [])
                fc = np.array([r["final_count"] for r in rs], dtype=float)
                sp = np.array([r["mean_speed"] for r in rs], dtype=float)
                hist = self.delay_hist.get((pi, m), Counter())
                n_del = sum(hist.values())
                out.append({
                    "axis": self.axis, "point": x, "method": m, "runs": len(rs),
                    "mean_final": float(fc.mean()) if len(rs) else float("nan"),
                    "std_final": float(fc.std(ddof=1)) if len(rs) > 1 else 0.0,
                    "mean_speed": float(sp.mean()) if len(rs) else float("nan"),
                    "std_speed": float(sp.std(ddof=1)) if len(rs) > 1 else 0.0,
                    "mean_delay": sum(k * v for k, v in hist.items()) / n_del if n_del else float("nan"),
                })
        return out

    def mobility_aggregate(self):
        groups = defaultdict(list)
        for r in self.mobility_rows:
            groups[r["point_idx"]].append(r["gap"])
        out = []
        for pi, x in enumerate(self.points):
            g = np.array(groups.get(pi, []), dtype=float)
            out.append({"point": x, "runs": len(g), "mean_gap": float(g.mean()) if g.size else float("nan"),
                        "std_gap": float(g.std(ddof=1)) if g.size > 1 else 0.0})
        return out


def _load_fixed_social(cfg):
    if cfg.community_mode != "from-file":
        return None
    return read_social_layer(cfg.membership_file, cfg.ties_file or None)


def make_topology(cfg, axis, point_idx, topo_idx, n_fixed=None):
    if cfg.topology_file:
        return read_topology(cfg.topology_file, cfg.area_radius)
    seed = derive_seed(cfg.master_seed, axis, point_idx, _S_TOPOLOGY, topo_idx)
    return generate_topology(cfg.n_clusters, cfg.mean_ues_per_cluster, cfg.area_radius,
                             cfg.cluster_spread, seed, total_ues=n_fixed)


def make_social(cfg, axis, point_idx, topo_idx, n_ues, fixed=None):
    if fixed is not None:
        if fixed.n_ues != n_ues:
            raise ValueError(f"membership file covers {fixed.n_ues} UEs but the topology has {n_ues}")
        return fixed
    seed = derive_seed(cfg.master_seed, axis, point_idx, _S_SOCIAL, topo_idx)
    ss = np.random.SeedSequence(seed)
    mem_seed, tie_seed = ss.spawn(2)
    memberships = random_memberships(n_ues, min(cfg.community_count, n_ues), mem_seed, cfg.community_overlap)
    return sample_social_layer(memberships, tie_seed, cfg.tie_density, n_ues)


def make_scenario(cfg, axis="none", point_idx=0, topo_idx=0):
    """Topology, social layer and all centralities/seeds for one replicate."""
    fixed = _load_fixed_social(cfg)
    if fixed is not None:
        n_fixed = fixed.n_ues
    else:
        n_fixed = cfg.total_ues or None
    topo = make_topology(cfg, axis, point_idx, topo_idx, n_fixed)
    social = make_social(cfg, axis, point_idx, topo_idx, topo.size, fixed)
    link_seed = derive_seed(cfg.master_seed, axis, point_idx, _S_LINKS, topo_idx)
    sc = build_scenario(topo, cfg.radio_params(topo.size), social, cfg.d_fraction, link_seed,
                        cfg.methods, cfg.distance_transform, cfg.inner_term)
    return sc, link_seed


def _run_kwargs(cfg, n):
    return dict(max_slots=cfg.max_slots or 10 * n, quiescence_window=cfg.quiescence_window,
                mode=cfg.diffusion_mode, relay=cfg.relay)


def _normalized_hist(values):
    v = np.asarray(values, dtype=float)
    top = v.max() if v.size else 0.0
    norm = v / top if top > 0 else np.zeros_like(v)
    counts, _ = np.histogram(norm, bins=HIST_BINS, range=(0.0, 1.0))
    return counts


def _task(args):
    """Work unit: one (point, topology replicate). Returns plain picklable data."""
    cfg, axis, point_idx, value, topo_idx, traces_wanted = args
    cfg = apply_point(cfg, axis, value)
    sc, link_seed = make_scenario(cfg, axis, point_idx, topo_idx)
    n = sc.topology.size
    if sc.d2d.edge_count == 0:
        log.warning("point %s replicate %d: D2D graph has no edges", value, topo_idx)
    rows, mob_rows, traces = [], [], {}
    delay = {m: Counter() for m in cfg.methods}
    hist = {}
    for m in cfg.methods:
        score = sc.report.score(m)
        hist[m] = _normalized_hist(score)
    run_ids = range(topo_idx, cfg.runs, cfg.topologies)
    for r in run_ids:
        run_seed = derive_seed(cfg.master_seed, axis, point_idx, _S_RUN, r)
        if axis == "mobility_speed":
            spd_rng = np.random.default_rng(derive_seed(cfg.master_seed, axis, point_idx, _S_SPEEDS, r))
            speeds = spd_rng.uniform(0.0, 2.0 * float(value), size=n)
            res = mobility_run(sc.topology, cfg.radio_params(n), sc.social, speeds,
                               cfg.mobility_epoch_slots, cfg.mobility_epochs, run_seed,
                               method=cfg.mobility_method, d_fraction=cfg.d_fraction,
                               link_seed=link_seed, distance_transform=cfg.distance_transform,
                               inner_term=cfg.inner_term, **_run_kwargs(cfg, n))
            for e in res.epochs:
                mob_rows.append({"point_idx": point_idx, "point": value, "run_id": r, "topology": topo_idx,
                                 "method": cfg.mobility_method, "n_ues": n, **e})
            continue
        graph = sc.influence
        if cfg.fading_refresh:
            graph = slot_influence(sc.topology, cfg.radio_params(n), sc.social, cfg.d_fraction,
                                   run_seed, cfg.distance_transform, cfg.inner_term)
        for m in cfg.methods:
            tr = run(sc.seeds[m], graph, sc.social, rng_seed=run_seed, **_run_kwargs(cfg, n))
            met = compute_metrics(tr)
            delay[m].update(met["delay_histogram"])
            rows.append({"point_idx": point_idx, "point": value, "run_id": r, "topology": topo_idx,
                         "method": m, "n_ues": n, "final_count": met["final_count"],
                         "mean_speed": met["mean_speed"], "slots": tr.slots})
            if traces_wanted:
                traces[f"r{r}-{m}"] = tr
    return point_idx, topo_idx, rows, mob_rows, delay, hist, traces


def sweep(cfg, axis, points, jobs=None, keep_traces=False):
    """One scenario family per point, ``cfg.topologies`` replicates each."""
    check(cfg)
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    points = list(points)
    if points != sorted(points):
        raise ValueError("sweep points must be sorted")
    jobs = cfg.jobs if jobs is None else jobs
    tasks = [(cfg, axis, pi, x, t, keep_traces) for pi, x in enumerate(points)
             for t in range(min(cfg.topologies, cfg.runs))]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_task, tasks))
    else:
        outputs = [_task(t) for t in tasks]
    result = ExperimentResult(axis, points, tuple(cfg.methods))
    traces = {}
    for point_idx, topo_idx, rows, mob_rows, delay, hist, tr in outputs:
        result.rows.extend(rows)
        result.mobility_rows.extend(mob_rows)
        for m, c in delay.items():
            result.delay_hist.setdefault((point_idx, m), Counter()).update(c)
        for m, h in hist.items():
            key = (point_idx, m)
            result.score_hist[key] = result.score_hist.get(key, 0) + h
        traces.update(tr)
    order = {m: i for i, m in enumerate(cfg.methods)}
    result.rows.sort(key=lambda r: (r["point_idx"], r["run_id"], order[r["method"]]))
    result.mobility_rows.sort(key=lambda r: (r["point_idx"], r["run_id"], r["epoch"]))
    if keep_traces:
        result.traces = dict(sorted(traces.items(), key=lambda kv: _trace_key(kv[0], order)))
    return result


def _trace_key(name, order):
    r, m = name[1:].split("-", 1)
    return int(r), order[m]


def run_scenario(cfg, keep_traces=False, jobs=None):
    return sweep(cfg, "none", [0], jobs=jobs, keep_traces=keep_traces)


# -- emission ---------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(r[h]) for h in header])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _write_dat(path, header, lines):
    try:
        with open(path, "w") as fh:
            fh.write("# " + " ".join(header) + "\n")
            for line in lines:
                fh.write(" ".join(str(_fmt(x)) for x in line) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


RAW_HEADER = ["axis", "point", "run_id", "topology", "method", "n_ues", "final_count", "mean_speed", "slots"]
AGG_HEADER = ["axis", "point", "method", "runs", "mean_final", "std_final", "mean_speed", "std_speed", "mean_delay"]
MOB_HEADER = ["axis", "point", "run_id", "topology", "method", "n_ues", "epoch", "count_keep",
              "count_reselect", "gap"]


def delay_pdf_rows(result):
    rows = []
    for pi, x in enumerate(result.points):
        for m in result.methods:
            hist = result.delay_hist.get((pi, m), Counter())
            total = sum(hist.values())
            for d in sorted(hist):
                rows.append({"axis": result.axis, "point": x, "method": m, "delay_slots": d,
                             "count": hist[d], "pdf": hist[d] / total})
    return rows


def emit(result, out_dir, formats=("csv",)):
    """Write ``raw.csv``/``aggregate.csv``/... and/or ``figN.dat`` files; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def path(name):
        p = os.path.join(out_dir, name)
        written.append(p)
        return p

    agg = result.aggregate()
    if "csv" in formats:
        _write_csv(path("raw.csv"), RAW_HEADER, [dict(r, axis=result.axis) for r in result.rows])
        _write_csv(path("aggregate.csv"), AGG_HEADER, agg)
        _write_csv(path("delay_pdf.csv"), ["axis", "point", "method", "delay_slots", "count", "pdf"],
                   delay_pdf_rows(result))
        if result.axis == "mobility_speed":
            _write_csv(path("mobility.csv"), MOB_HEADER, [dict(r, axis=result.axis) for r in result.mobility_rows])
    if "plot-data" in formats:
        def series(key, err):
            return [(a["method"], a["point"], a[key], a[err] / np.sqrt(a["runs"]) if a["runs"] else 0.0)
                    for a in agg if a["runs"]]

        if result.axis == "d_fraction":
            _write_dat(path("fig2.dat"), ["method", "d_fraction", "mean_speed", "stderr"],
                       series("mean_speed", "std_speed"))
        if result.axis == "n_ues":
            _write_dat(path("fig4.dat"), ["method", "n_ues", "mean_final", "stderr"],
                       series("mean_final", "std_final"))
            _write_dat(path("fig5.dat"), ["method", "n_ues", "mean_speed", "stderr"],
                       series("mean_speed", "std_speed"))
        if result.axis == "mobility_speed":
            _write_dat(path("fig9.dat"), ["speed", "mean_gap", "stderr"],
                       [(a["point"], a["mean_gap"], a["std_gap"] / np.sqrt(a["runs"]) if a["runs"] else 0.0)
                        for a in result.mobility_aggregate() if a["runs"]])
        hist_lines = []
        for (pi, m), counts in sorted(result.score_hist.items()):
            total = counts.sum()
            for b, c in enumerate(counts):
                hist_lines.append((m, result.points[pi], (b + 0.5) / HIST_BINS, int(c),
                                   float(c / total) if total else 0.0))
        _write_dat(path("fig3.dat"), ["method", "point", "normalized_score", "count", "fraction"], hist_lines)
        _write_dat(path("fig8.dat"), ["method", "point", "delay_slots", "pdf"],
                   [(r["method"], r["point"], r["delay_slots"], r["pdf"]) for r in delay_pdf_rows(result)])
    return written
