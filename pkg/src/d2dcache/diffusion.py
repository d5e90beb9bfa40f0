"""Slot-based Monte-Carlo content spreading over the D2D influence graph."""
import csv
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .radio import Topology

ONE_ATTEMPT = "one-attempt"
CASCADE = "cascade"
MODES = (ONE_ATTEMPT, CASCADE)
RELAY_ANY = "any"
RELAY_MEMBERS = "members-only"
RELAYS = (RELAY_ANY, RELAY_MEMBERS)
KEEP = "keep-initial-seeds"
RESELECT = "reselect-each-epoch"


@dataclass
class DiffusionState:
    holders: np.ndarray  # (L, N) uint8; row c = UEs holding content c
    eligible: np.ndarray  # (L, N) uint8; who may receive content c
    rng: np.random.Generator
    slot: int = 0
    mode: str = ONE_ATTEMPT

    @classmethod
    def initial(cls, seeds, n_ues, rng, membership=None, relay=RELAY_ANY, mode=ONE_ATTEMPT):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if relay not in RELAYS:
            raise ValueError(f"relay must be one of {RELAYS}")
        holders = np.zeros((len(seeds), n_ues), dtype=np.uint8)
        holders[np.arange(len(seeds)), list(seeds)] = 1
        if relay == RELAY_MEMBERS:
            eligible = np.asarray(membership, dtype=np.uint8)
        else:
            eligible = np.ones_like(holders)
        return cls(holders, eligible, rng, 0, mode)


def step(state, ig):
    """Advance one slot. Holders at the start of the slot transmit; receivers
    join at its end. ``ig`` may be a callable ``slot -> InfluenceGraph`` for
    graphs that change from slot to slot."""
    if callable(ig):
        ig = ig(state.slot + 1)
    indptr, indices, weights = ig.graph.csr
    probs = np.clip(weights, 0.0, 1.0)
    n_contents, n = state.holders.shape
    if state.mode == ONE_ATTEMPT:
        u = state.rng.random((2, n_contents, n))
        holders = kernels.spread_one_attempt(indptr, indices, probs, state.holders,
                                             state.eligible, u[0], u[1])
    else:
        u = state.rng.random((n_contents, len(indices)))
        holders = kernels.spread_cascade(indptr, indices, probs, state.holders,
                                         state.eligible, u)
    return replace(state, holders=holders, slot=state.slot + 1)


@dataclass
class DiffusionTrace:
    counts: list  # per slot: UEs holding the content of one of their own communities
    per_community: list  # per slot: list of per-community member counts
    delays: np.ndarray  # per UE: first slot it was counted, -1 if never
    seeds: tuple = field(default=())

    @property
    def slots(self):
        return len(self.counts) - 1

    @property
    def speed(self):
        return np.diff(self.counts)


def _counted(holders, membership):
    return (holders.astype(bool) & membership).any(axis=0)


def run(seeds, ig, social, max_slots=None, quiescence_window=5, rng_seed=0,
        mode=ONE_ATTEMPT, relay=RELAY_ANY):
    """Spread from one seed per community until ``quiescence_window`` idle slots
    in a row or ``max_slots``.

    ``ig`` is either a fixed InfluenceGraph or a callable returning the graph
    used in a given slot (1-based), e.g. with fading redrawn every slot.
    """
    n = social.n_ues
    max_slots = 10 * n if max_slots is None else max_slots
    if max_slots < 1:
        raise ValueError("max_slots must be >= 1")
    membership = social.membership_matrix()
    rng = np.random.default_rng(rng_seed)
    state = DiffusionState.initial(seeds, n, rng, membership, relay, mode)
    counted = _counted(state.holders, membership)
    delays = np.where(counted, 0, -1)
    counts = [int(counted.sum())]
    per_comm = [(state.holders.astype(bool) & membership).sum(axis=1).tolist()]
    idle = 0
    while state.slot < max_slots and idle < quiescence_window:
        new = step(state, ig)
        idle = idle + 1 if np.array_equal(new.holders, state.holders) else 0
        state = new
        counted = _counted(state.holders, membership)
        delays[counted & (delays < 0)] = state.slot
        counts.append(int(counted.sum()))
        per_comm.append((state.holders.astype(bool) & membership).sum(axis=1).tolist())
    return DiffusionTrace(counts, per_comm, delays, tuple(int(s) for s in seeds))


def compute_metrics(trace):
    """Final count, mean per-slot gain up to the last increase, and delay histogram.

    Seeds (delay 0) are excluded from the histogram.
    """
    if not trace.counts:
        raise ValueError("empty trace")
    counts = np.asarray(trace.counts)
    final = int(counts[-1])
    rises = np.flatnonzero(np.diff(counts) > 0)
    speed = (final - counts[0]) / (rises[-1] + 1) if rises.size else 0.0
    hist = Counter(int(d) for d in trace.delays if d > 0)
    return {"final_count": final, "mean_speed": float(speed), "delay_histogram": dict(sorted(hist.items()))}


def write_traces(traces, path):
    """Trace CSV ``run_id,slot,count_total,count_c0,...``."""
    n_comm = max((len(t.per_community[0]) for t in traces.values()), default=0)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["run_id", "slot", "count_total"] + [f"count_c{c}" for c in range(n_comm)])
        for run_id, tr in traces.items():
            for slot, (tot, pc) in enumerate(zip(tr.counts, tr.per_community)):
                w.writerow([run_id, slot, tot] + list(pc))


def write_delays(traces, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["run_id", "ue_id", "delay_slots"])
        for run_id, tr in traces.items():
            for ue, d in enumerate(tr.delays):
                if d >= 0:
                    w.writerow([run_id, ue, int(d)])


# -- mobility ---------------------------------------------------------------

def _mean_ties(social):
    out = np.zeros(social.n_ues)
    for ue in range(social.n_ues):
        comms = social.communities_of(ue)
        if not comms:
            continue
        l = comms[0]
        w = [social.tie(l, ue, p) for p in social.members[l] if p != ue]
        out[ue] = np.mean(w) if w else 0.0
    return out


def move(topo, social, speeds, duration, rng, _corr=None):
    """Random-walk step with community-correlated headings.

    Each UE mixes its first community's shared heading with private noise,
    weighting the shared part by its mean tie strength, so strongly tied
    members move alike.
    """
    corr = _mean_ties(social) if _corr is None else _corr
    n = topo.size
    comm = np.array([(social.communities_of(u) or [0])[0] for u in range(n)])
    shared = rng.normal(size=(social.community_count, 2))
    own = rng.normal(size=(n, 2))
    heading = corr[:, None] * shared[comm] + np.sqrt(1.0 - corr**2)[:, None] * own
    norm = np.hypot(heading[:, 0], heading[:, 1])
    heading /= np.where(norm > 0, norm, 1.0)[:, None]
    pos = topo.positions + (np.asarray(speeds, dtype=float) * duration)[:, None] * heading
    r = np.hypot(pos[:, 0], pos[:, 1])
    pos *= np.where(r > topo.area_radius, topo.area_radius / np.maximum(r, 1e-300), 1.0)[:, None]
    return Topology(pos, topo.area_radius, topo.cluster_centers, topo.cluster_of)


@dataclass
class MobilityResult:
    epochs: list  # dicts: epoch, count_keep, count_reselect, gap
    traces: dict  # (epoch, policy) -> DiffusionTrace

    @property
    def mean_gap(self):
        return float(np.mean([e["gap"] for e in self.epochs])) if self.epochs else 0.0


def mobility_run(topo, params, social, speeds, epoch_slots, n_epochs, rng_seed,
                 method="SV", d_fraction=0.4, link_seed=0, max_slots=None,
                 quiescence_window=5, mode=ONE_ATTEMPT, relay=RELAY_ANY, **scenario_kw):
    """Move UEs epoch by epoch and compare keeping the initial seeds against
    reselecting them on the new graphs.

    Fading draws are tied to ``link_seed`` and reused every epoch, so static
    UEs see identical graphs. ``gap`` is reselect count minus keep count.
    """
    from .scenario import build_scenario

    if epoch_slots < 1:
        raise ValueError("epoch_slots must be >= 1")
    ss = np.random.SeedSequence(rng_seed)
    move_seed, run_seed = ss.spawn(2)
    move_rng = np.random.default_rng(move_seed)
    run_seeds = run_seed.generate_state(max(n_epochs, 1))
    methods = (method,)
    base = build_scenario(topo, params, social, d_fraction, link_seed, methods, **scenario_kw)
    initial = base.seeds[method]
    corr = _mean_ties(social)
    duration = epoch_slots * params.slot_duration
    current = topo
    epochs, traces = [], {}
    for e in range(1, n_epochs + 1):
        current = move(current, social, speeds, duration, move_rng, corr)
        sc = build_scenario(current, params, social, d_fraction, link_seed, methods, **scenario_kw)
        kw = dict(max_slots=max_slots, quiescence_window=quiescence_window,
                  rng_seed=int(run_seeds[e - 1]), mode=mode, relay=relay)
        keep = run(initial, sc.influence, social, **kw)
        fresh = run(sc.seeds[method], sc.influence, social, **kw)
        traces[(e, KEEP)] = keep
        traces[(e, RESELECT)] = fresh
        epochs.append({"epoch": e, "count_keep": keep.counts[-1], "count_reselect": fresh.counts[-1],
                       "gap": fresh.counts[-1] - keep.counts[-1]})
    return MobilityResult(epochs, traces)
