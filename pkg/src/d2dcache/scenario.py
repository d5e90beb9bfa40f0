"""Single-scenario pipeline: links -> D2D graph -> influence -> centralities -> seeds."""
from dataclasses import dataclass

import numpy as np

from .graphcore import LexPaths
from .influence import build_influence_graph
from .radio import build_d2d_graph, build_link_table
from .shapley import METHODS, compute_centralities, select_seeds


@dataclass
class Scenario:
    topology: object
    links: object
    d2d: object
    social: object
    paths: LexPaths
    influence: object
    report: object
    seeds: dict  # method -> tuple of seeds, one per community


def build_scenario(topo, params, social, d_fraction, link_seed, methods=METHODS,
                   distance_transform="identity", inner_term="I_mn", alpha=None):
    links = build_link_table(topo, params, link_seed)
    d2d = build_d2d_graph(links, params)
    paths = LexPaths(d2d)
    ig = build_influence_graph(d2d, social, d_fraction, distance_transform, inner_term, paths)
    report = compute_centralities(d2d, social, ig, d_fraction, alpha, paths,
                                  distance_transform, methods)
    seeds = {m: select_seeds(report, social, m) for m in methods}
    return Scenario(topo, links, d2d, social, paths, ig, report, seeds)


def slot_influence(topo, params, social, d_fraction, run_seed, distance_transform="identity",
                   inner_term="I_mn"):
    """Callable ``slot -> InfluenceGraph`` with fading redrawn in every slot.

    Slot ``t`` draws its fading from ``SeedSequence((run_seed, t))``, so traces
    stay reproducible from the run seed alone.
    """
    def at(slot):
        seed = np.random.SeedSequence((int(run_seed), int(slot)))
        d2d = build_d2d_graph(build_link_table(topo, params, seed), params)
        return build_influence_graph(d2d, social, d_fraction, distance_transform, inner_term)
    return at
