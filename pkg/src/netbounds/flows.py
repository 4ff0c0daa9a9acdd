"""Flow computations on noiseless networks.

Outer bounds on point-to-point networks come from max-flow/min-cut (per
demand, min over sinks for multicast). Inner bounds on networks with
hyper-arcs come from a fractional-routing linear program in which one
capacity draw on a hyper-arc serves all of its heads for a given session,
and from a time-sharing LP that mixes several candidate lower networks.
Every reported flow is re-validated against conservation and capacity
constraints; bounds are certifiable, not solver folklore.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .netmodel import AUXILIARY, BitPipe, Demand, NoiselessNetwork, Node

__all__ = [
    "FlowResult",
    "BoundReport",
    "max_flow",
    "multicast_outer",
    "unicast_inner",
    "hyper_inner",
    "timeshare_inner",
    "blend_inner",
    "validate_hyper_result",
    "combine_bounds",
]

_EK_TOL = 1e-12


@dataclass(frozen=True)
class FlowResult:
    """Rate of one demand together with its certificate.

    For outer bounds the witness holds the min-cut ("cut": source-side nodes,
    "cut_capacity") and a maximum flow per ordered node pair. For inner bounds
    it holds per-pipe session usage and per-sink head-edge flows.
    """

    demand: Demand
    rate: float
    witness: dict


@dataclass(frozen=True)
class BoundReport:
    """Per-demand outer/inner rates with the runs that produced them."""

    demands: tuple[Demand, ...]
    outer: dict[Demand, tuple[float, str]]
    inner: dict[Demand, tuple[float, str]]

    def sandwich_violations(self, tol: float = 1e-9) -> list[str]:
        """Demands whose inner bound exceeds the outer bound beyond tol."""
        violations = []
        for demand in self.demands:
            if demand in self.outer and demand in self.inner:
                outer = self.outer[demand][0]
                inner = self.inner[demand][0]
                if inner > outer + tol:
                    violations.append(
                        f"demand {demand.source}->{sorted(demand.sinks)}: "
                        f"inner {inner} exceeds outer {outer}"
                    )
        return violations


def _require_p2p(net: NoiselessNetwork):
    for pipe in net.pipes:
        if pipe.is_hyper:
            raise ValueError(
                f"network contains a hyper-arc {pipe.tail}->{list(pipe.heads)}; "
                "max-flow applies to point-to-point networks only"
            )


def _edge_capacities(net: NoiselessNetwork) -> dict[tuple[str, str], float]:
    capacity: dict[tuple[str, str], float] = {}
    for pipe in net.pipes:
        key = (pipe.tail, pipe.head)
        capacity[key] = capacity.get(key, 0.0) + pipe.rate
    return capacity


def _edmonds_karp(
    nodes: tuple[str, ...],
    capacity: dict[tuple[str, str], float],
    source: str,
    sink: str,
) -> tuple[float, dict[tuple[str, str], float], set[str]]:
    """Max flow by shortest augmenting paths; returns (value, flows, cut)."""
    adjacency: dict[str, list[str]] = {node: [] for node in nodes}
    for u, v in capacity:
        adjacency[u].append(v)
        adjacency[v].append(u)
    flow: dict[tuple[str, str], float] = {}

    def residual(u: str, v: str) -> float:
        cap = capacity.get((u, v), 0.0)
        return cap - flow.get((u, v), 0.0) + flow.get((v, u), 0.0)

    value = 0.0
    max_rounds = 4 * len(capacity) * max(len(nodes), 1) + 16
    for _ in range(max_rounds):
        parent = {source: source}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v in adjacency[u]:
                if v not in parent and residual(u, v) > _EK_TOL:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            reachable = set(parent)
            return value, flow, reachable
        bottleneck = float("inf")
        v = sink
        while v != source:
            u = parent[v]
            bottleneck = min(bottleneck, residual(u, v))
            v = u
        if bottleneck == float("inf"):
            return float("inf"), flow, set()
        v = sink
        while v != source:
            u = parent[v]
            cancel = min(flow.get((v, u), 0.0), bottleneck)
            if cancel > 0:
                flow[(v, u)] -= cancel
            remainder = bottleneck - cancel
            if remainder > 0:
                flow[(u, v)] = flow.get((u, v), 0.0) + remainder
            v = u
        value += bottleneck
    raise AssertionError("augmenting-path cap exceeded; max-flow logic error")


def max_flow(net: NoiselessNetwork, demand: Demand) -> FlowResult:
    """Maximum source-to-sink rate in a point-to-point network.

    Runs shortest-augmenting-path max-flow with infinite-rate pipes treated as
    uncapacitated, and certifies the value with the residual-graph min cut.

    Args:
        net: noiseless network of point-to-point pipes only.
        demand: unicast demand.

    Raises:
        ValueError: when the network has hyper-arcs or the demand is not
            unicast.
    """
    _require_p2p(net)
    if demand.kind != "unicast":
        raise ValueError("max_flow takes a unicast demand; see multicast_outer")
    sink = demand.sink_list[0]
    for endpoint in (demand.source, sink):
        if endpoint not in net.node_ids:
            raise ValueError(f"demand endpoint {endpoint!r} is not a network node")
    capacity = _edge_capacities(net)
    value, flow, reachable = _edmonds_karp(
        net.node_ids, capacity, demand.source, sink
    )
    witness: dict = {"flows": dict(flow)}
    if value != float("inf"):
        cut_capacity = sum(
            cap
            for (u, v), cap in capacity.items()
            if u in reachable and v not in reachable
        )
        if abs(cut_capacity - value) > 1e-9 * max(1.0, abs(value)):
            raise AssertionError(
                f"min-cut {cut_capacity} does not certify flow {value}"
            )
        witness["cut"] = tuple(sorted(reachable))
        witness["cut_capacity"] = cut_capacity
    return FlowResult(demand=demand, rate=value, witness=witness)


def multicast_outer(net: NoiselessNetwork, demand: Demand) -> FlowResult:
    """Outer bound for one demand: min over sinks of the max flow.

    For a single-source multicast on a point-to-point network the min over
    per-sink max flows is the natural cut outer bound.
    """
    _require_p2p(net)
    best: FlowResult | None = None
    per_sink: dict[str, float] = {}
    for sink in demand.sink_list:
        result = max_flow(
            net, Demand(kind="unicast", source=demand.source, sinks=frozenset({sink}))
        )
        per_sink[sink] = result.rate
        if best is None or result.rate < best.rate:
            best = result
    witness = dict(best.witness)
    witness["per_sink"] = per_sink
    return FlowResult(demand=demand, rate=best.rate, witness=witness)


def unicast_inner(net: NoiselessNetwork, demand: Demand) -> FlowResult:
    """Achievable rate of a single unicast session, hyper-arcs allowed.

    When one unicast session has the network to itself, drawing capacity x
    from a hyper-arc hands every head node the same x bits, and the session
    can forward disjoint shares of those bits from different heads.  That is
    exactly the behavior of a point-to-point gadget: route the tail into an
    auxiliary split node at the hyper-arc rate, then connect the split node
    to each head without a rate limit.  After the rewrite the network is
    point-to-point, so the rate comes from exact augmenting-path max flow
    with a min-cut certificate instead of a routing LP.  Matches
    ``hyper_inner`` on single-demand inputs, up to solver tolerance.

    Args:
        net: Bounding network, possibly containing hyper-arcs.
        demand: A unicast demand with endpoints in ``net``.

    Returns:
        FlowResult whose witness carries the rewritten network's flow and
        cut data plus a ``split_nodes`` map from auxiliary node id to the
        index of the hyper-arc it replaced.

    Raises:
        ValueError: If the demand is not unicast.
    """
    if demand.kind != "unicast":
        raise ValueError("unicast_inner handles unicast demands only")
    if not any(pipe.is_hyper for pipe in net.pipes):
        return max_flow(net, demand)
    nodes = list(net.nodes)
    taken = set(net.node_ids)
    pipes: list[BitPipe] = []
    split_nodes: dict[str, int] = {}
    for index, pipe in enumerate(net.pipes):
        if not pipe.is_hyper:
            pipes.append(pipe)
            continue
        split = f"hyperarc_{index}"
        while split in taken:
            split = split + "_"
        taken.add(split)
        nodes.append(Node(id=split, kind=AUXILIARY))
        split_nodes[split] = index
        pipes.append(
            BitPipe(
                tail=pipe.tail,
                heads=(split,),
                rate=pipe.rate,
                provenance=f"hyper-arc draw: {pipe.provenance}",
            )
        )
        for head in pipe.heads:
            pipes.append(
                BitPipe(
                    tail=split,
                    heads=(head,),
                    rate=float("inf"),
                    provenance=f"hyper-arc share to {head}: {pipe.provenance}",
                )
            )
    rewritten = NoiselessNetwork(nodes=tuple(nodes), pipes=tuple(pipes))
    result = max_flow(rewritten, demand)
    witness = dict(result.witness)
    witness["split_nodes"] = split_nodes
    return FlowResult(demand=demand, rate=result.rate, witness=witness)


def _expand_heads(pipe: BitPipe) -> list[str]:
    return list(pipe.heads)


def _build_session_lp(
    nets: list[NoiselessNetwork],
    demands: tuple[Demand, ...],
    objective: str,
    timeshare: bool,
):
    """Shared LP builder for hyper_inner (one net) and timeshare_inner.

    Variable layout: [t] [R_{r,s} ...] [x_{r,s,a} ...] [f_{r,s,sink,a,h} ...]
    [lambda_r ...], with r indexing runs (a single run when timeshare is
    False). Returns the linprog pieces plus index maps.
    """
    n_runs = len(nets)
    n_sessions = len(demands)
    index = 0
    t_index = index
    index += 1
    r_index = {}
    for r in range(n_runs):
        for s in range(n_sessions):
            r_index[(r, s)] = index
            index += 1
    x_index = {}
    for r, net in enumerate(nets):
        for s in range(n_sessions):
            for a, _pipe in enumerate(net.pipes):
                x_index[(r, s, a)] = index
                index += 1
    f_index = {}
    for r, net in enumerate(nets):
        for s, demand in enumerate(demands):
            for sink in demand.sink_list:
                for a, pipe in enumerate(net.pipes):
                    for h in _expand_heads(pipe):
                        f_index[(r, s, sink, a, h)] = index
                        index += 1
    lam_index = {}
    if timeshare:
        for r in range(n_runs):
            lam_index[r] = index
            index += 1
    n_vars = index

    a_eq_rows, b_eq = [], []
    a_ub_rows, b_ub = [], []

    def new_row():
        return np.zeros(n_vars)

    # Flow conservation per run, session, sink, node (sink node skipped).
    for r, net in enumerate(nets):
        for s, demand in enumerate(demands):
            for sink in demand.sink_list:
                for node in net.node_ids:
                    if node == sink:
                        continue
                    row = new_row()
                    nonzero = False
                    for a, pipe in enumerate(net.pipes):
                        if pipe.tail == node:
                            for h in _expand_heads(pipe):
                                row[f_index[(r, s, sink, a, h)]] += 1.0
                                nonzero = True
                        for h in _expand_heads(pipe):
                            if h == node:
                                row[f_index[(r, s, sink, a, h)]] -= 1.0
                                nonzero = True
                    if node == demand.source:
                        row[r_index[(r, s)]] -= 1.0
                        nonzero = True
                    if nonzero:
                        a_eq_rows.append(row)
                        b_eq.append(0.0)

    # Per-session draw on an arc: total over heads bounded by the usage var.
    for r, net in enumerate(nets):
        for s, demand in enumerate(demands):
            for sink in demand.sink_list:
                for a, pipe in enumerate(net.pipes):
                    row = new_row()
                    for h in _expand_heads(pipe):
                        row[f_index[(r, s, sink, a, h)]] += 1.0
                    row[x_index[(r, s, a)]] -= 1.0
                    a_ub_rows.append(row)
                    b_ub.append(0.0)

    # Arc capacity shared across sessions (scaled by lambda when mixing).
    for r, net in enumerate(nets):
        for a, pipe in enumerate(net.pipes):
            if pipe.rate == float("inf"):
                continue
            row = new_row()
            for s in range(n_sessions):
                row[x_index[(r, s, a)]] += 1.0
            if timeshare:
                row[lam_index[r]] -= pipe.rate
                a_ub_rows.append(row)
                b_ub.append(0.0)
            else:
                a_ub_rows.append(row)
                b_ub.append(pipe.rate)

    # Common rate t below every session's total rate.
    for s in range(n_sessions):
        row = new_row()
        row[t_index] = 1.0
        for r in range(n_runs):
            row[r_index[(r, s)]] -= 1.0
        a_ub_rows.append(row)
        b_ub.append(0.0)

    if timeshare:
        row = new_row()
        for r in range(n_runs):
            row[lam_index[r]] = 1.0
        a_eq_rows.append(row)
        b_eq.append(1.0)

    cost = np.zeros(n_vars)
    if objective == "maxmin":
        cost[t_index] = -1.0
    elif objective == "sum":
        for r in range(n_runs):
            for s in range(n_sessions):
                cost[r_index[(r, s)]] = -1.0
    else:
        raise ValueError(f"objective must be 'maxmin' or 'sum', got {objective!r}")

    return {
        "cost": cost,
        "a_eq": np.array(a_eq_rows) if a_eq_rows else None,
        "b_eq": np.array(b_eq) if b_eq else None,
        "a_ub": np.array(a_ub_rows) if a_ub_rows else None,
        "b_ub": np.array(b_ub) if b_ub else None,
        "n_vars": n_vars,
        "t_index": t_index,
        "r_index": r_index,
        "x_index": x_index,
        "f_index": f_index,
        "lam_index": lam_index,
    }


def _solve_lp(pieces):
    result = linprog(
        pieces["cost"],
        A_ub=pieces["a_ub"],
        b_ub=pieces["b_ub"],
        A_eq=pieces["a_eq"],
        b_eq=pieces["b_eq"],
        bounds=[(0, None)] * pieces["n_vars"],
        method="highs",
    )
    if not result.success:
        raise RuntimeError(f"routing LP failed: {result.message}")
    return result.x


def _results_from_solution(
    nets, demands, pieces, solution, extra_witness=None
) -> list[FlowResult]:
    results = []
    for s, demand in enumerate(demands):
        rate = sum(solution[pieces["r_index"][(r, s)]] for r in range(len(nets)))
        usage = {}
        flows = {}
        for r, net in enumerate(nets):
            for a, pipe in enumerate(net.pipes):
                value = solution[pieces["x_index"][(r, s, a)]]
                if value > 1e-12:
                    usage[(r, a)] = value
            for sink in demand.sink_list:
                for a, pipe in enumerate(net.pipes):
                    for h in _expand_heads(pipe):
                        value = solution[pieces["f_index"][(r, s, sink, a, h)]]
                        if value > 1e-12:
                            flows[(r, sink, a, h)] = value
        witness = {"usage": usage, "flows": flows}
        if extra_witness:
            witness.update(extra_witness)
        results.append(FlowResult(demand=demand, rate=float(rate), witness=witness))
    return results


def validate_hyper_result(
    net: NoiselessNetwork,
    demands: tuple[Demand, ...],
    results: list[FlowResult],
    tol: float = 1e-9,
):
    """Re-check a routing witness against the LP's physical constraints.

    Verifies per-pipe capacity sharing, per-session single-counting of
    hyper-arc draws, and per-sink flow conservation delivering each session's
    rate. Raises AssertionError on any violation beyond tol.
    """
    total_usage = {a: 0.0 for a in range(len(net.pipes))}
    for s, (demand, result) in enumerate(zip(demands, results)):
        usage = {
            a: value for (r, a), value in result.witness["usage"].items() if r == 0
        }
        for a, value in usage.items():
            total_usage[a] += value
        for sink in demand.sink_list:
            incoming: dict[str, float] = {}
            outgoing: dict[str, float] = {}
            draw = {a: 0.0 for a in range(len(net.pipes))}
            for (r, sink_key, a, h), value in result.witness["flows"].items():
                if r != 0 or sink_key != sink:
                    continue
                pipe = net.pipes[a]
                outgoing[pipe.tail] = outgoing.get(pipe.tail, 0.0) + value
                incoming[h] = incoming.get(h, 0.0) + value
                draw[a] += value
            for a, value in draw.items():
                assert value <= usage.get(a, 0.0) + tol, (
                    f"session {s} sink {sink}: draw {value} on pipe {a} exceeds "
                    f"usage {usage.get(a, 0.0)}"
                )
            for node in net.node_ids:
                balance = outgoing.get(node, 0.0) - incoming.get(node, 0.0)
                if node == demand.source:
                    expected = result.rate
                elif node == sink:
                    expected = -result.rate
                else:
                    expected = 0.0
                assert abs(balance - expected) <= tol, (
                    f"session {s} sink {sink}: node {node} balance {balance}, "
                    f"expected {expected}"
                )
    for a, value in total_usage.items():
        assert value <= net.pipes[a].rate + tol, (
            f"pipe {a} usage {value} exceeds rate {net.pipes[a].rate}"
        )


def hyper_inner(
    net: NoiselessNetwork,
    demands: tuple[Demand, ...],
    objective: str = "maxmin",
) -> list[FlowResult]:
    """Achievable rates on a network with hyper-arcs, by fractional routing.

    Each session routes fractionally; one capacity draw on a hyper-arc serves
    all of its heads for that session (heads may forward disjoint parts of the
    draw), and sessions share every pipe additively. The LP maximizes the
    common rate ("maxmin") or the rate total ("sum"); either way the result
    is achievable by routing plus copying at hyper-arc heads.

    Returns one FlowResult per demand; witnesses are re-validated before
    returning.
    """
    if not demands:
        raise ValueError("demands must be nonempty")
    pieces = _build_session_lp([net], tuple(demands), objective, timeshare=False)
    solution = _solve_lp(pieces)
    results = _results_from_solution([net], tuple(demands), pieces, solution)
    validate_hyper_result(net, tuple(demands), results)
    return results


def timeshare_inner(
    nets: list[NoiselessNetwork],
    demands: tuple[Demand, ...],
    objective: str = "maxmin",
) -> tuple[list[FlowResult], tuple[float, ...]]:
    """Best convex combination of several candidate lower networks.

    Operating network r for a fraction lambda_r of the time scales its
    achievable flow polytope by lambda_r; the LP jointly picks the fractions
    and per-run flows. Anything feasible here is achievable by time sharing
    the runs, so the result is a valid inner bound whenever each input network
    is.

    Returns the per-demand results (rates summed across runs) and the mixing
    weights.
    """
    if not demands:
        raise ValueError("demands must be nonempty")
    if not nets:
        raise ValueError("nets must be nonempty")
    pieces = _build_session_lp(list(nets), tuple(demands), objective, timeshare=True)
    solution = _solve_lp(pieces)
    weights = tuple(
        float(solution[pieces["lam_index"][r]]) for r in range(len(nets))
    )
    results = _results_from_solution(
        list(nets), tuple(demands), pieces, solution, extra_witness={"weights": weights}
    )
    return results, weights


def _build_blend_lp(nets, demands, objective):
    """LP for one shared routing over run-weighted average arc rates.

    Variable layout: [t] [R_s ...] [x_{s,a} ...] [f_{s,sink,a,h} ...]
    [lambda_r ...]. Flow structure lives on the first network; each capacity
    row couples the shared draws to the weighted arc rates, so the solver
    picks the physical time-share and the routing together.
    """
    base = nets[0]
    n_sessions = len(demands)
    index = 0
    t_index = index
    index += 1
    r_index = {}
    for s in range(n_sessions):
        r_index[s] = index
        index += 1
    x_index = {}
    for s in range(n_sessions):
        for a in range(len(base.pipes)):
            x_index[(s, a)] = index
            index += 1
    f_index = {}
    for s, demand in enumerate(demands):
        for sink in demand.sink_list:
            for a, pipe in enumerate(base.pipes):
                for h in _expand_heads(pipe):
                    f_index[(s, sink, a, h)] = index
                    index += 1
    lam_index = {}
    for r in range(len(nets)):
        lam_index[r] = index
        index += 1
    n_vars = index

    a_eq_rows, b_eq = [], []
    a_ub_rows, b_ub = [], []

    def new_row():
        return np.zeros(n_vars)

    # Flow conservation per session and sink (sink node skipped).
    for s, demand in enumerate(demands):
        for sink in demand.sink_list:
            for node in base.node_ids:
                if node == sink:
                    continue
                row = new_row()
                nonzero = False
                for a, pipe in enumerate(base.pipes):
                    if pipe.tail == node:
                        for h in _expand_heads(pipe):
                            row[f_index[(s, sink, a, h)]] += 1.0
                            nonzero = True
                    for h in _expand_heads(pipe):
                        if h == node:
                            row[f_index[(s, sink, a, h)]] -= 1.0
                            nonzero = True
                if node == demand.source:
                    row[r_index[s]] -= 1.0
                    nonzero = True
                if nonzero:
                    a_eq_rows.append(row)
                    b_eq.append(0.0)

    # Per-session draw on an arc bounded by the usage variable.
    for s, demand in enumerate(demands):
        for sink in demand.sink_list:
            for a, pipe in enumerate(base.pipes):
                row = new_row()
                for h in _expand_heads(pipe):
                    row[f_index[(s, sink, a, h)]] += 1.0
                row[x_index[(s, a)]] -= 1.0
                a_ub_rows.append(row)
                b_ub.append(0.0)

    # Shared arc capacity equals the weighted average of the run rates.
    for a in range(len(base.pipes)):
        if base.pipes[a].rate == float("inf"):
            continue
        row = new_row()
        for s in range(n_sessions):
            row[x_index[(s, a)]] += 1.0
        for r, net in enumerate(nets):
            row[lam_index[r]] -= net.pipes[a].rate
        a_ub_rows.append(row)
        b_ub.append(0.0)

    for s in range(n_sessions):
        row = new_row()
        row[t_index] = 1.0
        row[r_index[s]] -= 1.0
        a_ub_rows.append(row)
        b_ub.append(0.0)

    row = new_row()
    for r in range(len(nets)):
        row[lam_index[r]] = 1.0
    a_eq_rows.append(row)
    b_eq.append(1.0)

    cost = np.zeros(n_vars)
    if objective == "maxmin":
        cost[t_index] = -1.0
    elif objective == "sum":
        for s in range(n_sessions):
            cost[r_index[s]] = -1.0
    else:
        raise ValueError(f"objective must be 'maxmin' or 'sum', got {objective!r}")

    return {
        "cost": cost,
        "a_eq": np.array(a_eq_rows) if a_eq_rows else None,
        "b_eq": np.array(b_eq) if b_eq else None,
        "a_ub": np.array(a_ub_rows) if a_ub_rows else None,
        "b_ub": np.array(b_ub) if b_ub else None,
        "n_vars": n_vars,
        "t_index": t_index,
        "r_index": r_index,
        "x_index": x_index,
        "f_index": f_index,
        "lam_index": lam_index,
    }


def _average_networks(nets, weights) -> NoiselessNetwork:
    base = nets[0]
    pipes = []
    for a, pipe in enumerate(base.pipes):
        if pipe.rate == float("inf"):
            rate = float("inf")
        else:
            rate = sum(w * net.pipes[a].rate for net, w in zip(nets, weights))
        pipes.append(
            BitPipe(tail=pipe.tail, heads=pipe.heads, rate=rate, provenance=pipe.provenance)
        )
    return NoiselessNetwork(nodes=base.nodes, pipes=tuple(pipes))


def blend_inner(
    nets: list[NoiselessNetwork],
    demands: tuple[Demand, ...],
    objective: str = "maxmin",
) -> tuple[list[FlowResult], tuple[float, ...]]:
    """Best rates when the configurations behind the runs are time-shared.

    The runs must describe the same node set and arc structure and differ in
    rates only (decode orders, power splits). Splitting the coding block
    among the configurations with weights lambda lets every arc sustain its
    weighted-average rate over the whole block, with relays buffering across
    the block, so one routing problem is solved on the averaged network with
    the weights free. This reaches interior operating points of multi-access
    regions that no single decode order offers. Flow-level time sharing
    (timeshare_inner) cannot: a session crossing two arcs that are never
    simultaneously fast is stuck below the slow rate in every run there.

    Returns:
        (results, weights): per-demand FlowResult, validated against the
        averaged network, and the chosen run weights.

    Raises:
        ValueError: on empty inputs, mismatched arc structure, or arcs that
            are infinite in some runs but finite in others.
    """
    demands = tuple(demands)
    if not demands:
        raise ValueError("demands must be nonempty")
    if not nets:
        raise ValueError("nets must be nonempty")
    nets = list(nets)
    base = nets[0]
    for net in nets[1:]:
        if set(net.node_ids) != set(base.node_ids):
            raise ValueError("blended networks must share one node set")
        if len(net.pipes) != len(base.pipes):
            raise ValueError("blended networks must have matching arc lists")
        for ours, theirs in zip(base.pipes, net.pipes):
            if ours.tail != theirs.tail or ours.heads != theirs.heads:
                raise ValueError(
                    f"arc mismatch: {ours.tail}->{list(ours.heads)} vs "
                    f"{theirs.tail}->{list(theirs.heads)}"
                )
            if (ours.rate == float("inf")) != (theirs.rate == float("inf")):
                raise ValueError(
                    f"arc {ours.tail}->{list(ours.heads)} must be finite in "
                    "every run or in none"
                )
    pieces = _build_blend_lp(nets, demands, objective)
    solution = _solve_lp(pieces)
    weights = tuple(float(solution[pieces["lam_index"][r]]) for r in range(len(nets)))
    averaged = _average_networks(nets, weights)
    results = []
    for s, demand in enumerate(demands):
        usage = {}
        flows = {}
        for a in range(len(base.pipes)):
            value = solution[pieces["x_index"][(s, a)]]
            if value > 1e-12:
                usage[(0, a)] = value
        for sink in demand.sink_list:
            for a, pipe in enumerate(base.pipes):
                for h in _expand_heads(pipe):
                    value = solution[pieces["f_index"][(s, sink, a, h)]]
                    if value > 1e-12:
                        flows[(0, sink, a, h)] = value
        results.append(
            FlowResult(
                demand=demand,
                rate=float(solution[pieces["r_index"][s]]),
                witness={"usage": usage, "flows": flows, "weights": weights},
            )
        )
    validate_hyper_result(averaged, demands, results, tol=1e-8)
    return results, weights


def combine_bounds(
    outer_runs: list[tuple[str, dict[Demand, float]]],
    inner_runs: list[tuple[str, dict[Demand, float]]],
) -> BoundReport:
    """Combine parameterized runs: outer = per-demand min, inner = max.

    Every valid parameter choice yields a valid outer (resp. inner) bound, so
    the tightest combination takes the pointwise min across outer runs and
    max across inner runs, remembering which run produced each value.

    Raises:
        ValueError: when runs disagree on the demand set.
    """
    if not outer_runs and not inner_runs:
        raise ValueError("no runs to combine")
    reference: tuple[Demand, ...] | None = None
    for _, rates in outer_runs + inner_runs:
        keys = tuple(sorted(rates, key=lambda d: (d.source, sorted(d.sinks))))
        if reference is None:
            reference = keys
        elif keys != reference:
            raise ValueError("runs evaluate different demand sets")
    outer: dict[Demand, tuple[float, str]] = {}
    for label, rates in outer_runs:
        for demand, rate in rates.items():
            if demand not in outer or rate < outer[demand][0]:
                outer[demand] = (rate, label)
    inner: dict[Demand, tuple[float, str]] = {}
    for label, rates in inner_runs:
        for demand, rate in rates.items():
            if demand not in inner or rate > inner[demand][0]:
                inner[demand] = (rate, label)
    return BoundReport(demands=reference or (), outer=outer, inner=inner)
