"""Channel decoupling: split a noisy network into independent components.

Transmitter and receiver roles of a node are independent (a node's outgoing
signal does not interfere with its own reception), so links are grouped by a
bipartite incidence structure: two AWGN links interact exactly when they share
a transmitting node (broadcast) or a receiving node (superposition at one
antenna). A group with several transmitters and several receivers is coupled
and is split into one decoupled MAC per multi-input receiver and one decoupled
BC per broadcasting transmitter, with shared links cross-referenced.

Decoupled MACs keep the original marginal SNRs. Decoupled BCs see inflated
SNRs gamma/alpha, where the noise shares alpha are the solution of a convex
partition program: each receiver's unit noise is divided among the inputs that
reach it so as to minimize the total of the per-input cooperative sum rates.

Discrete links (qsc, bsc) use their own alphabets, so they are orthogonal
point-to-point side channels and never join a Gaussian group. Two discrete
links sharing a transmitter or a receiver would form a discrete MAC or BC,
which has no decoupling rule here and is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .netmodel import NoisyLink, NoisyNetwork

__all__ = [
    "DecoupledComponent",
    "GaussPartition",
    "decompose",
    "gauss_noise_partition",
    "partition_objective",
    "decoupled_bc_snrs",
    "relay_noise_share",
]


@dataclass(frozen=True, eq=False)
class DecoupledComponent:
    """One independent piece of a decomposed network.

    kind is "p2p" (one link), "mac" (several inputs, one output), or "bc"
    (one input, several outputs). `coupled` marks components carved out of a
    coupled group by decoupling; their shared links appear in one MAC and one
    BC component simultaneously. `effective_snrs` maps each AWGN link to the
    SNR the bounding models should use: the original value for p2p, MAC, and
    independent BC components, and gamma/alpha for decoupled BCs, whose
    `alpha_shares` hold the noise shares themselves.
    """

    kind: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    links: tuple[NoisyLink, ...]
    effective_snrs: dict[NoisyLink, float] = field(default_factory=dict)
    alpha_shares: dict[NoisyLink, float] = field(default_factory=dict)
    shared_links: tuple[NoisyLink, ...] = ()
    coupled: bool = False

    @property
    def key(self) -> tuple:
        """Stable identifier used to address the component in parameter maps."""
        if self.kind == "p2p":
            link = self.links[0]
            return ("p2p", link.src, link.dst, link.kind)
        if self.kind == "bc":
            return ("bc", self.inputs[0])
        return ("mac", self.outputs[0])

    def gamma_list(self) -> tuple[float, ...]:
        """Effective SNRs in the order of `links` (AWGN components only)."""
        return tuple(self.effective_snrs[link] for link in self.links)


@dataclass(frozen=True, eq=False)
class GaussPartition:
    """Solution of the Gaussian noise-partition program for one group.

    `alphas[i, j]` is the share of receiver j's unit noise assigned to input
    i; columns sum to 1 over the inputs that reach the receiver and are 0
    elsewhere. `lambdas` and `mus` are the stationarity multipliers
    (per-receiver and per-input), `residual` is the largest relative spread of
    the stationarity ratios after the final column renormalization, and
    `changes` records the per-iteration update magnitudes.
    """

    alphas: np.ndarray
    lambdas: np.ndarray
    mus: np.ndarray
    residual: float
    iterations: int
    changes: tuple[float, ...]

    def __post_init__(self):
        mask = self.alphas > 0
        col_sums = self.alphas.sum(axis=0)
        used = mask.any(axis=0)
        if np.any(np.abs(col_sums[used] - 1.0) > 1e-9):
            raise AssertionError(
                f"column sums deviate from 1: {col_sums[used]}"
            )


def _check_discrete_links(links: list[NoisyLink]):
    by_tail: dict[str, int] = {}
    by_head: dict[str, int] = {}
    for link in links:
        by_tail[link.src] = by_tail.get(link.src, 0) + 1
        by_head[link.dst] = by_head.get(link.dst, 0) + 1
    for node, count in sorted(by_tail.items()):
        if count > 1:
            raise ValueError(
                f"node {node!r} transmits on {count} discrete links; discrete "
                "broadcast structures have no decoupling rule"
            )
    for node, count in sorted(by_head.items()):
        if count > 1:
            raise ValueError(
                f"node {node!r} receives on {count} discrete links; discrete "
                "superposition structures have no decoupling rule"
            )


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, item):
        self.parent.setdefault(item, item)
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def gauss_noise_partition(
    gamma: np.ndarray, tol: float = 1e-9, max_iter: int = 10000
) -> GaussPartition:
    """Solve the noise-partition program for a coupled Gaussian group.

    Minimizes sum_i log(1 + sum_j gamma[i,j]/alpha[i,j]) subject to unit
    column sums, by alternating the stationarity fixed-point maps

        sqrt(lambda_j) = sum_i sqrt(gamma[i,j]) / sqrt(mu_i)
        sqrt(mu_i) = (s_i + sqrt(s_i^2 + 4)) / 2,
        s_i = sum_j sqrt(gamma[i,j] * lambda_j)

    until the largest multiplier change drops below tol. Zero entries of gamma
    mean input i does not reach receiver j; their alpha is fixed to 0 and the
    column-sum constraint covers existing links only.

    At strong coupling the plain alternation can enter a slowly decaying
    two-cycle (the multipliers carry a nearly scale-free mode whose map
    eigenvalue approaches -1). To stay robust without touching the easy
    cases, the update step is damped in stages: full steps for the first
    quarter of the budget, then the step factor halves every further
    quarter. Damped steps are convex combinations, so the fixed points and
    the returned partition are unchanged.

    Args:
        gamma: (inputs x outputs) nonnegative SNR matrix; every column needs
            at least one positive entry.
        tol: convergence threshold on the multiplier updates.
        max_iter: iteration cap; exceeding it raises with the last residual.

    Returns:
        GaussPartition with exactly renormalized columns and the fresh
        stationarity residual of the returned alphas.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2:
        raise ValueError(f"gamma must be 2-D, got shape {gamma.shape}")
    if np.any(gamma < 0):
        raise ValueError("SNRs must be nonnegative")
    mask = gamma > 0
    if not np.all(mask.any(axis=0)):
        missing = [int(j) for j in np.flatnonzero(~mask.any(axis=0))]
        raise ValueError(f"columns {missing} have no incoming link")
    sqrt_gamma = np.sqrt(gamma)

    # Warm start from the proportional split alpha[i,j] ~ sqrt(gamma[i,j]),
    # which is stationary whenever all row multipliers coincide; for columns
    # with a single positive entry it reduces to mu = 1 + row SNR sum.
    mu = 1.0 + sqrt_gamma @ sqrt_gamma.sum(axis=0)
    lam = np.zeros(gamma.shape[1])
    changes: list[float] = []
    converged = False
    iterations = 0
    stage_len = max(1, max_iter // 4)
    for iterations in range(1, max_iter + 1):
        step = 0.5 ** ((iterations - 1) // stage_len)
        # Zero gamma entries contribute zero to both reductions, so the maps
        # are plain matrix-vector products in sqrt space.
        sqrt_lam = sqrt_gamma.T @ (1.0 / np.sqrt(mu))
        lam_new = (1.0 - step) * lam + step * sqrt_lam**2
        s = sqrt_gamma @ np.sqrt(lam_new)
        sqrt_mu = 0.5 * (np.sqrt(s**2 + 4.0) + s)
        mu_new = (1.0 - step) * mu + step * sqrt_mu**2
        change = max(
            float(np.max(np.abs(lam_new - lam))), float(np.max(np.abs(mu_new - mu)))
        )
        changes.append(change)
        lam, mu = lam_new, mu_new
        if change < tol:
            converged = True
            break
    if not converged:
        raise RuntimeError(
            f"noise partition did not converge in {max_iter} iterations; "
            f"last change {changes[-1]:.3e}"
        )

    with np.errstate(divide="ignore", invalid="ignore"):
        alphas = np.where(
            mask, sqrt_gamma / (np.sqrt(lam)[None, :] * np.sqrt(mu)[:, None]), 0.0
        )
    col_sums = alphas.sum(axis=0)
    alphas = np.where(mask, alphas / col_sums[None, :], 0.0)

    # Fresh optimality check on the renormalized shares: within each column
    # the ratio (gamma/alpha^2) / mu must be constant at the optimum.
    with np.errstate(divide="ignore", invalid="ignore"):
        mu_fresh = 1.0 + np.where(mask, gamma / alphas, 0.0).sum(axis=1)
        ratios = np.where(mask, gamma / alphas**2 / mu_fresh[:, None], np.nan)
    residual = 0.0
    for j in range(gamma.shape[1]):
        column = ratios[mask[:, j], j]
        if column.size > 1:
            spread = (column.max() - column.min()) / column.max()
            residual = max(residual, float(spread))
    return GaussPartition(
        alphas=alphas,
        lambdas=lam,
        mus=mu_fresh,
        residual=residual,
        iterations=iterations,
        changes=tuple(changes),
    )


def partition_objective(gamma: np.ndarray, alphas: np.ndarray) -> float:
    """Objective of the partition program, in bits.

    sum_i 0.5*log2(1 + sum_j gamma[i,j]/alpha[i,j]), the total of the
    per-input cooperative BC sum rates at inflated SNRs.
    """
    gamma = np.asarray(gamma, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    mask = gamma > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        inflated = np.where(mask, gamma / alphas, 0.0)
    return float(np.sum(0.5 * np.log2(1.0 + inflated.sum(axis=1))))


def decoupled_bc_snrs(partition: GaussPartition, gamma: np.ndarray) -> np.ndarray:
    """Inflated SNR matrix gamma/alpha for the decoupled BCs of a group."""
    gamma = np.asarray(gamma, dtype=float)
    mask = gamma > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(mask, gamma / partition.alphas, 0.0)


def relay_noise_share(gamma_sd: float, gamma_sr: float, gamma_rd: float) -> float:
    """Closed-form noise share of the direct link in a relay network.

    For the three-link relay (source -> destination gamma_sd, source -> relay
    gamma_sr, relay -> destination gamma_rd), the partition program reduces to
    one variable, the share alpha of the destination noise assigned to the
    source. Its stationarity condition solves to

        alpha = sqrt(gamma_sd*(1+gamma_rd)) /
                (sqrt(gamma_rd*(1+gamma_sr+gamma_sd)) +
                 sqrt(gamma_sd*(1+gamma_rd))).
    """
    if min(gamma_sd, gamma_sr, gamma_rd) <= 0:
        raise ValueError("all three SNRs must be positive")
    a = np.sqrt(gamma_sd * (1.0 + gamma_rd))
    b = np.sqrt(gamma_rd * (1.0 + gamma_sr + gamma_sd))
    return float(a / (a + b))


def _component_for_group(
    links: list[NoisyLink],
) -> list[DecoupledComponent]:
    tx_nodes = sorted({link.src for link in links})
    rx_nodes = sorted({link.dst for link in links})
    if len(links) == 1:
        link = links[0]
        return [
            DecoupledComponent(
                kind="p2p",
                inputs=(link.src,),
                outputs=(link.dst,),
                links=(link,),
                effective_snrs={link: link.snr},
            )
        ]
    if len(tx_nodes) == 1:
        ordered = tuple(sorted(links, key=lambda l: l.dst))
        return [
            DecoupledComponent(
                kind="bc",
                inputs=(tx_nodes[0],),
                outputs=tuple(l.dst for l in ordered),
                links=ordered,
                effective_snrs={l: l.snr for l in ordered},
            )
        ]
    if len(rx_nodes) == 1:
        ordered = tuple(sorted(links, key=lambda l: l.src))
        return [
            DecoupledComponent(
                kind="mac",
                inputs=tuple(l.src for l in ordered),
                outputs=(rx_nodes[0],),
                links=ordered,
                effective_snrs={l: l.snr for l in ordered},
            )
        ]

    # Coupled group: solve one shared noise partition, then emit a decoupled
    # BC per broadcasting transmitter and a decoupled MAC per multi-input
    # receiver.
    gamma = np.zeros((len(tx_nodes), len(rx_nodes)))
    tx_index = {node: i for i, node in enumerate(tx_nodes)}
    rx_index = {node: j for j, node in enumerate(rx_nodes)}
    for link in links:
        gamma[tx_index[link.src], rx_index[link.dst]] = link.snr
    partition = gauss_noise_partition(gamma)
    inflated = decoupled_bc_snrs(partition, gamma)

    out_degree = {node: 0 for node in tx_nodes}
    in_degree = {node: 0 for node in rx_nodes}
    for link in links:
        out_degree[link.src] += 1
        in_degree[link.dst] += 1

    def is_shared(link: NoisyLink) -> bool:
        return out_degree[link.src] >= 2 and in_degree[link.dst] >= 2

    components: list[DecoupledComponent] = []
    for node in tx_nodes:
        own = tuple(sorted((l for l in links if l.src == node), key=lambda l: l.dst))
        if len(own) < 2:
            continue
        components.append(
            DecoupledComponent(
                kind="bc",
                inputs=(node,),
                outputs=tuple(l.dst for l in own),
                links=own,
                effective_snrs={
                    l: float(inflated[tx_index[node], rx_index[l.dst]]) for l in own
                },
                alpha_shares={
                    l: float(partition.alphas[tx_index[node], rx_index[l.dst]])
                    for l in own
                },
                shared_links=tuple(l for l in own if is_shared(l)),
                coupled=True,
            )
        )
    for node in rx_nodes:
        own = tuple(sorted((l for l in links if l.dst == node), key=lambda l: l.src))
        if len(own) < 2:
            continue
        components.append(
            DecoupledComponent(
                kind="mac",
                inputs=tuple(l.src for l in own),
                outputs=(node,),
                links=own,
                effective_snrs={l: l.snr for l in own},
                shared_links=tuple(l for l in own if is_shared(l)),
                coupled=True,
            )
        )
    return components


def decompose(net: NoisyNetwork) -> list[DecoupledComponent]:
    """Decompose a noisy network into independent bounding components.

    Discrete links become point-to-point components outright. AWGN links are
    grouped by shared transmitters and shared receivers; each group becomes a
    p2p link, an independent MAC, an independent BC, or (when coupled) a set
    of decoupled MACs and BCs with a shared noise partition.

    Raises:
        ValueError: when two discrete links share a transmitter or receiver.
    """
    discrete = [l for l in net.links if l.kind != "awgn"]
    _check_discrete_links(discrete)
    components: list[DecoupledComponent] = []
    for link in discrete:
        components.append(
            DecoupledComponent(
                kind="p2p",
                inputs=(link.src,),
                outputs=(link.dst,),
                links=(link,),
            )
        )

    awgn = [l for l in net.links if l.kind == "awgn"]
    uf = _UnionFind()
    for link in awgn:
        uf.union(("tx", link.src), ("rx", link.dst))
    groups: dict = {}
    for link in awgn:
        groups.setdefault(uf.find(("tx", link.src)), []).append(link)
    ordered_groups = sorted(
        groups.values(), key=lambda ls: min((l.src, l.dst) for l in ls)
    )
    for group in ordered_groups:
        components.extend(_component_for_group(group))
    return components
