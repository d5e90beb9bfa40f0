"""Physical layer: clustered UE placement, fading links and the D2D graph."""
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .graphcore import Graph

MIN_DISTANCE = 1.0  # metres; clamps the pathloss singularity


@dataclass(frozen=True)
class RadioParams:
    bandwidth_per_rb: float = 15e3  # Hz
    carrier_freq: float = 2e9  # Hz, informational: the power-law pathloss has no frequency term
    tx_power: float = 0.01  # W per link
    noise_psd: float = 1e-20  # W/Hz (-170 dBm/Hz)
    pathloss_exponent: float = 2.5
    target_ber: float = 1e-7
    packet_bits: float = 100.0
    slot_duration: float = 1e-3  # s
    rb_count: int = 5000
    log_base: float = 2.0

    def __post_init__(self):
        for name in ("bandwidth_per_rb", "carrier_freq", "tx_power", "noise_psd",
                     "pathloss_exponent", "packet_bits", "slot_duration"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.target_ber < 0.2:
            raise ValueError("target_ber must lie in (0, 0.2)")
        if self.rb_count < 1:
            raise ValueError("rb_count must be >= 1")
        if self.log_base != 2.0:
            raise ValueError("only log base 2 is supported")

    @property
    def snr_gap(self):
        """M-QAM SNR gap ``-1.5 / ln(5 * target_ber)``."""
        return -1.5 / math.log(5.0 * self.target_ber)

    @property
    def min_rate(self):
        """Rate (bit/s) needed to deliver one packet within one slot."""
        return self.packet_bits / self.slot_duration


@dataclass
class Topology:
    positions: np.ndarray  # (N, 2) metres
    area_radius: float
    cluster_centers: np.ndarray  # (C, 2)
    cluster_of: np.ndarray = field(default=None)  # (N,) cluster index per UE

    @property
    def size(self):
        return len(self.positions)

    def distances(self):
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])


@dataclass
class LinkTable:
    """Dense per-directed-pair link state; diagonal entries are unused."""

    gain: np.ndarray  # (N, N)
    rb: np.ndarray  # (N, N) int, -1 on the diagonal
    interference: np.ndarray  # (N, N) W
    rate: np.ndarray  # (N, N) bit/s

    @property
    def size(self):
        return len(self.gain)


def _clip_to_disc(points, radius):
    r = np.hypot(points[:, 0], points[:, 1])
    scale = np.where(r > radius, radius / np.maximum(r, 1e-300), 1.0)
    return points * scale[:, None]


def uniform_disc(rng, count, radius):
    r = radius * np.sqrt(rng.random(count))
    theta = 2.0 * np.pi * rng.random(count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def generate_topology(n_clusters, mean_ues_per_cluster, area_radius, cluster_spread, rng_seed,
                      total_ues=None):
    """Poisson-cluster placement: uniform centres, Poisson sizes, Gaussian offsets.

    Resamples until at least two UEs exist. With ``total_ues`` the cluster
    sizes are multinomial with that exact total instead.
    """
    if n_clusters < 1 or mean_ues_per_cluster <= 0:
        raise ValueError("n_clusters and mean_ues_per_cluster must be >= 1")
    if total_ues is not None and total_ues < 2:
        raise ValueError("total_ues must be >= 2")
    rng = np.random.default_rng(rng_seed)
    while True:
        centers = uniform_disc(rng, n_clusters, area_radius)
        if total_ues is not None:
            counts = rng.multinomial(total_ues, np.full(n_clusters, 1.0 / n_clusters))
        else:
            counts = rng.poisson(mean_ues_per_cluster, size=n_clusters)
        if counts.sum() >= 2:
            break
    cluster_of = np.repeat(np.arange(n_clusters), counts)
    offsets = rng.normal(0.0, cluster_spread, size=(len(cluster_of), 2)) if cluster_spread > 0 else np.zeros((len(cluster_of), 2))
    positions = _clip_to_disc(centers[cluster_of] + offsets, area_radius)
    return Topology(positions, float(area_radius), centers, cluster_of)


def auto_rb_count(n_ues, fraction):
    """RB budget proportional to the number of directed links."""
    return max(1, math.ceil(fraction * n_ues * (n_ues - 1)))


def link_rate(gain, interference, params):
    """Achievable rate ``B_w log2(1 + gap * p * h / (B_w N0 + I))`` in bit/s.

    Broadcasts over arrays.
    """
    noise = params.bandwidth_per_rb * params.noise_psd
    sinr = params.snr_gap * params.tx_power * np.asarray(gain) / (noise + np.asarray(interference))
    out = params.bandwidth_per_rb * np.log2(1.0 + sinr)
    return float(out) if np.ndim(out) == 0 else out


def channel_gains(topo, params, rng_seed):
    """Pathloss times unit-mean exponential (Rayleigh power) fading per directed pair."""
    n = topo.size
    rng = np.random.default_rng(rng_seed)
    fading = rng.exponential(1.0, size=(n, n))
    dist = np.maximum(topo.distances(), MIN_DISTANCE)
    gain = dist ** (-params.pathloss_exponent) * fading
    np.fill_diagonal(gain, 0.0)
    return gain


def assign_resource_blocks(topo, rb_count):
    """Round-robin RB assignment over directed links ordered by length, then ids."""
    n = topo.size
    dist = topo.distances()
    src, dst = np.nonzero(~np.eye(n, dtype=bool))
    order = np.lexsort((dst, src, dist[src, dst]))
    rb = np.full((n, n), -1, dtype=np.int64)
    rb[src[order], dst[order]] = np.arange(len(order)) % rb_count
    return rb


def co_channel_interference(gain, rb, tx_power):
    """Interference at each link's receiver from other transmitters sharing its RB.

    A transmitter counts once per RB no matter how many links it holds there;
    the link's own transmitter and its receiver are excluded.
    """
    n = len(gain)
    rb_count = int(rb.max()) + 1 if n > 1 else 1
    active = np.zeros((rb_count, n), dtype=bool)
    src, dst = np.nonzero(rb >= 0)
    active[rb[src, dst], src] = True
    per_rb = active.astype(float) @ gain  # [r, n] = sum_k active[r, k] * gain[k, n]
    interference = np.zeros((n, n))
    r = rb[src, dst]
    interference[src, dst] = tx_power * (per_rb[r, dst] - gain[src, dst] - active[r, dst] * gain[dst, dst])
    return np.maximum(interference, 0.0)


def build_link_table(topo, params, rng_seed):
    gain = channel_gains(topo, params, rng_seed)
    rb = assign_resource_blocks(topo, params.rb_count)
    interference = co_channel_interference(gain, rb, params.tx_power)
    rate = link_rate(gain, interference, params)
    rate = np.asarray(rate, dtype=float)
    np.fill_diagonal(rate, 0.0)
    return LinkTable(gain, rb, interference, rate)


def build_d2d_graph(links, params):
    """Undirected edge iff one packet fits in one slot in both directions."""
    with np.errstate(divide="ignore"):
        ok = params.packet_bits / links.rate <= params.slot_duration
    np.fill_diagonal(ok, False)
    both = ok & ok.T
    src, dst = np.nonzero(np.triu(both, 1))
    return Graph(links.size, zip(src.tolist(), dst.tolist()), directed=False)


def write_topology(topo, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ue_id", "x", "y"])
        for i, (x, y) in enumerate(topo.positions):
            w.writerow([i, repr(float(x)), repr(float(y))])


def read_topology(path, area_radius):
    with open(path, newline="") as fh:
        rows = sorted((int(r["ue_id"]), float(r["x"]), float(r["y"])) for r in csv.DictReader(fh))
    if [r[0] for r in rows] != list(range(len(rows))):
        raise ValueError(f"{path}: ue_id must be 0..N-1")
    pos = np.array([[x, y] for _, x, y in rows], dtype=float).reshape(-1, 2)
    return Topology(pos, float(area_radius), np.zeros((0, 2)), np.zeros(len(pos), dtype=np.int64))


def write_link_table(links, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "gain", "rb", "rate"])
        n = links.size
        for m in range(n):
            for k in range(n):
                if m != k:
                    w.writerow([m, k, repr(float(links.gain[m, k])), int(links.rb[m, k]), repr(float(links.rate[m, k]))])
