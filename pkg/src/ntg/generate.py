"""Queue-based graph growth from a trained model.

A session keeps one FIFO of unvisited nodes per connected component and
services the queues round-robin. Expanding a node means encoding its
sampled incoming paths, then autoregressively sampling offsets; each
decoded candidate either snaps onto a nearby existing node (making a
cycle), gets rejected for violating the dataset-derived limits, leaving
the region, or crossing an edge, or becomes a new node pushed to its
queue. Everything is driven by one seeded rng, so output graphs are
byte-reproducible.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .geometry import angle_ccw, dist, segments_cross
from .graph import MAJOR, MINOR, GraphError, RoadGraph, edge_key
from .net import ModelParams, bin_to_offset, offset_to_bin, encode
from .net.model import (
    decode_step,
    draw_index,
    sample_categorical,
    sample_stop,
    softmax,
    start_embedding,
    _embed_prev,
)
from .spatial import SegmentIndex, graph_segment_index
from .training import path_steps
from .paths import sample_incoming_paths

ANGLE_TOL = 1e-9
DENSITY_RADIUS = 100.0
RETRIES_PER_SLOT = 3
MAX_DECODE_SLOTS = 16

STATUS_ACTIVE = "active"
STATUS_EXHAUSTED = "exhausted"
STATUS_BUDGET = "budget_reached"


@dataclass(frozen=True)
class Limits:
    max_degree: int
    max_density: int  # nodes within 100 m, including self
    min_angle: float  # radians between consecutive incident edges


@dataclass
class GenEvent:
    kind: str
    step: int
    payload: dict = field(default_factory=dict)


def _fmt3(v: float) -> str:
    r = round(float(v), 3)
    if r == 0.0:
        r = 0.0
    return f"{r:.3f}"


def event_to_json(event: GenEvent) -> str:
    """Deterministic one-line JSON; coordinates carry exactly 3 decimals."""
    parts = [f'"kind":"{event.kind}"', f'"step":{event.step}']
    for key in sorted(event.payload):
        value = event.payload[key]
        if key in ("x", "y"):
            parts.append(f'"{key}":{_fmt3(value)}')
        elif isinstance(value, str):
            parts.append(f'"{key}":{json.dumps(value)}')
        else:
            parts.append(f'"{key}":{int(value)}')
    return "{" + ",".join(parts) + "}"


def replay_events(lines: list[str]) -> RoadGraph:
    """Rebuild the output graph from a serialized event stream."""
    graph = RoadGraph()
    for line in lines:
        doc = json.loads(line)
        if doc["kind"] == "node_added":
            graph.add_node(doc["x"], doc["y"], doc["id"])
        elif doc["kind"] == "edge_added":
            graph.add_edge(doc["a"], doc["b"], doc.get("type"))
    return graph


class QueueExhausted(RuntimeError):
    pass


class GenSession:
    def __init__(
        self,
        graph: RoadGraph,
        style: int | None,
        limits: Limits,
        rng: np.random.Generator,
        eps: float = 5.0,
        region: tuple[float, float, float, float] | None = None,
    ):
        self.graph = graph
        self.style = style
        self.limits = limits
        self.rng = rng
        self.eps = eps
        self.region = region
        self.step_count = 0
        self.added_nodes = 0
        self.status = STATUS_ACTIVE
        self.events: list[GenEvent] = []
        self.seg_index: SegmentIndex = graph_segment_index(graph)
        self._queues: dict[int, deque] = {}
        self._qorder: list[int] = []
        self._qparent: dict[int, int] = {}
        self._node_queue: dict[int, int] = {}
        self._ever_queued: set[int] = set()
        self._rr = 0

    # queue bookkeeping: one FIFO per component, merged when edges join them

    def _find(self, qid: int) -> int:
        while self._qparent[qid] != qid:
            self._qparent[qid] = self._qparent[self._qparent[qid]]
            qid = self._qparent[qid]
        return qid

    def new_queue(self) -> int:
        qid = len(self._qparent)
        self._qparent[qid] = qid
        self._queues[qid] = deque()
        self._qorder.append(qid)
        return qid

    def enqueue(self, node_id: int, qid: int) -> None:
        if node_id in self._ever_queued:
            return
        root = self._find(qid)
        self._queues[root].append(node_id)
        self._node_queue[node_id] = root
        self._ever_queued.add(node_id)

    def queue_of(self, node_id: int) -> int:
        return self._find(self._node_queue[node_id])

    def merge_queues(self, into: int, other: int) -> None:
        into, other = self._find(into), self._find(other)
        if into == other:
            return
        self._queues[into].extend(self._queues[other])
        self._queues[other].clear()
        self._qparent[other] = into

    def pending(self) -> int:
        return sum(len(self._queues[self._find(q)]) for q in set(map(self._find, self._qorder)))

    def pop_next(self) -> int:
        n = len(self._qorder)
        for i in range(n):
            qid = self._find(self._qorder[(self._rr + i) % n])
            q = self._queues[qid]
            if q:
                self._rr = (self._rr + i + 1) % n
                return q.popleft()
        raise QueueExhausted("all generation queues are empty")

    def log(self, kind: str, **payload) -> GenEvent:
        event = GenEvent(kind, self.step_count, payload)
        self.events.append(event)
        return event


def init_session(
    seed_graph: RoadGraph,
    style: int | None,
    limits: Limits,
    rng_seed: int,
    eps: float = 5.0,
    region: tuple[float, float, float, float] | None = None,
    region_margin: float = 500.0,
    initial_queue: list[int] | None = None,
) -> GenSession:
    """Start a session on a copy of the seed; all seed nodes are queued
    (ascending id per component) unless an explicit initial queue is given."""
    if not seed_graph.nodes:
        raise GraphError("empty seed graph")
    graph = seed_graph.copy()
    if region is None:
        x0, y0, x1, y1 = graph.bbox()
        region = (
            x0 - region_margin,
            y0 - region_margin,
            x1 + region_margin,
            y1 + region_margin,
        )
    session = GenSession(
        graph, style, limits, np.random.default_rng(rng_seed), eps=eps, region=region
    )
    for node_id, (x, y) in sorted(graph.nodes.items()):
        session.log("node_added", id=node_id, x=x, y=y)
    for a, b in sorted(graph.edges()):
        kind = graph.get_edge_type(a, b)
        if kind is None:
            session.log("edge_added", a=a, b=b)
        else:
            session.log("edge_added", a=a, b=b, type=kind)

    queue_filter = None if initial_queue is None else set(initial_queue)
    for comp in graph.components():
        members = [v for v in comp if queue_filter is None or v in queue_filter]
        qid = session.new_queue()
        for node_id in members:
            session.enqueue(node_id, qid)
        for node_id in comp:
            session._node_queue.setdefault(node_id, qid)
    return session


def _incident_angle_ok(
    graph: RoadGraph, node_id: int, new_dir: float, min_angle: float
) -> bool:
    angles = sorted(
        angle_ccw(graph.nodes[node_id], graph.nodes[nb]) for nb in graph.adj[node_id]
    )
    if not angles:
        return True
    lo = max((a for a in angles if a <= new_dir), default=angles[-1] - 2 * math.pi)
    hi = min((a for a in angles if a > new_dir), default=angles[0] + 2 * math.pi)
    return (new_dir - lo) >= min_angle - ANGLE_TOL and (hi - new_dir) >= min_angle - ANGLE_TOL


def _crossing_free(session: GenSession, a: int, pa, pb) -> bool:
    for key in session.seg_index.near_segment(pa, pb):
        qa, qb = session.seg_index.segment(key)
        if segments_cross(pa, pb, qa, qb):
            return False
    return True


def _density_ok(session: GenSession, p, limits: Limits) -> bool:
    near = session.graph.nodes_within(p[0], p[1], DENSITY_RADIUS)
    if len(near) + 1 > limits.max_density:
        return False
    for v in near:
        vx, vy = session.graph.nodes[v]
        if len(session.graph.nodes_within(vx, vy, DENSITY_RADIUS)) + 1 > limits.max_density:
            return False
    return True


def _try_place(
    session: GenSession,
    active: int,
    candidate: tuple[float, float],
    etype: int | None,
) -> tuple[bool, str | None]:
    """Apply one decoded candidate. Returns (accepted, rejection reason)."""
    graph = session.graph
    limits = session.limits
    pa = graph.nodes[active]
    kind = None if etype is None else (MAJOR if etype == 0 else MINOR)

    snapped = graph.nearest_node(candidate[0], candidate[1], session.eps, exclude=active)
    if snapped is not None:
        ps = graph.nodes[snapped]
        if graph.has_edge(active, snapped):
            session.log(
                "node_snapped", active=active, snapped=snapped,
                x=candidate[0], y=candidate[1],
            )
            return True, None
        if graph.degree(active) + 1 > limits.max_degree:
            return False, "degree"
        if graph.degree(snapped) + 1 > limits.max_degree:
            return False, "degree"
        if not _incident_angle_ok(graph, active, angle_ccw(pa, ps), limits.min_angle):
            return False, "angle"
        if not _incident_angle_ok(graph, snapped, angle_ccw(ps, pa), limits.min_angle):
            return False, "angle"
        if not _crossing_free(session, active, pa, ps):
            return False, "crossing"
        graph.add_edge(active, snapped, kind)
        session.seg_index.add(edge_key(active, snapped), pa, ps)
        session.log(
            "node_snapped", active=active, snapped=snapped,
            x=candidate[0], y=candidate[1],
        )
        payload = {"a": min(active, snapped), "b": max(active, snapped)}
        if kind is not None:
            payload["type"] = kind
        session.log("edge_added", **payload)
        session.merge_queues(session.queue_of(active), session.queue_of(snapped))
        return True, None

    if dist(candidate, pa) < 0.5:
        return False, "degenerate"
    if session.region is not None:
        x0, y0, x1, y1 = session.region
        if not (x0 <= candidate[0] <= x1 and y0 <= candidate[1] <= y1):
            return False, "region"
    if graph.degree(active) + 1 > limits.max_degree:
        return False, "degree"
    if not _density_ok(session, candidate, limits):
        return False, "density"
    if not _incident_angle_ok(graph, active, angle_ccw(pa, candidate), limits.min_angle):
        return False, "angle"
    if not _crossing_free(session, active, pa, candidate):
        return False, "crossing"

    new_id = graph.add_node(candidate[0], candidate[1])
    graph.add_edge(active, new_id, kind)
    session.seg_index.add(edge_key(active, new_id), pa, candidate)
    session.added_nodes += 1
    session.log("node_added", id=new_id, x=candidate[0], y=candidate[1])
    payload = {"a": min(active, new_id), "b": max(active, new_id)}
    if kind is not None:
        payload["type"] = kind
    session.log("edge_added", **payload)
    session.enqueue(new_id, session.queue_of(active))
    return True, None


class IndependentOffsetSampler:
    """Default decode-slot sampler: one draw per axis from the model's
    temperature-scaled categoricals. Parsing swaps in a sampler that
    reweights the offset lattice with raster evidence."""

    def begin_slot(
        self,
        position: tuple[float, float],
        logits_x: np.ndarray,
        logits_y: np.ndarray,
        temperature: float,
    ) -> bool:
        self._greedy = temperature <= 0.0
        scale = temperature if not self._greedy else 1.0
        self._px = softmax(logits_x / scale)
        self._py = softmax(logits_y / scale)
        return True

    def draw(self, rng: np.random.Generator) -> tuple[int, int]:
        if self._greedy:
            return int(np.argmax(self._px)), int(np.argmax(self._py))
        return draw_index(self._px, rng), draw_index(self._py, rng)


def step(
    session: GenSession,
    params: ModelParams,
    temperature: float = 1.0,
    sampler=None,
) -> list[GenEvent]:
    """Expand the next queued node. Raises QueueExhausted when nothing is left."""
    config = params.config
    first = len(session.events)
    active = session.pop_next()
    session.step_count += 1
    graph = session.graph

    if graph.degree(active) == 0:
        session.log("node_finished", id=active)
        if session.pending() == 0:
            session.status = STATUS_EXHAUSTED
            session.log("queue_exhausted")
        return session.events[first:]

    walks = sample_incoming_paths(
        graph, active, config.max_paths, config.max_path_len, session.rng
    )
    paths = [path_steps(graph, walk, config, clamp=True) for walk in walks]
    ctx = encode(params, paths, style=session.style)
    if sampler is None:
        sampler = IndependentOffsetSampler()

    pa = graph.nodes[active]
    h = np.zeros(config.hidden_size)
    emb = start_embedding(params)
    for _ in range(MAX_DECODE_SLOTS):
        lx, ly, ls, le, h = decode_step(params, ctx, h, emb)
        if not sampler.begin_slot(pa, lx, ly, temperature):
            break
        bx = by = None
        for _attempt in range(RETRIES_PER_SLOT):
            bx, by = sampler.draw(session.rng)
            etype = (
                sample_categorical(le, session.rng, temperature)
                if le is not None
                else None
            )
            dx = bin_to_offset(bx, config)
            dy = bin_to_offset(by, config)
            candidate = (pa[0] + dx, pa[1] + dy)
            accepted, reason = _try_place(session, active, candidate, etype)
            if accepted:
                if session.events[-1].kind == "edge_added":
                    other = session.events[-1].payload
                    other_id = other["a"] if other["a"] != active else other["b"]
                    mx = graph.nodes[other_id][0] - pa[0]
                    my = graph.nodes[other_id][1] - pa[1]
                    r = config.offset_range
                    bx = offset_to_bin(min(r, max(-r, mx)), config)
                    by = offset_to_bin(min(r, max(-r, my)), config)
                break
            session.log(
                "node_rejected", active=active, reason=reason,
                x=candidate[0], y=candidate[1],
            )
        # condition the next slot on what actually materialized
        emb = _embed_prev(params, bx, by)
        if sample_stop(ls, session.rng, temperature):
            break

    session.log("node_finished", id=active)
    if session.pending() == 0:
        session.status = STATUS_EXHAUSTED
        session.log("queue_exhausted")
    return session.events[first:]


def generate(
    session: GenSession,
    params: ModelParams,
    budget_nodes: int | None = None,
    budget_steps: int | None = None,
    temperature: float = 1.0,
    sampler=None,
) -> RoadGraph:
    """Run step() until every queue drains or a budget trips."""
    while session.status == STATUS_ACTIVE:
        if budget_nodes is not None and session.added_nodes >= budget_nodes:
            session.status = STATUS_BUDGET
            break
        if budget_steps is not None and session.step_count >= budget_steps:
            session.status = STATUS_BUDGET
            break
        if session.pending() == 0:
            session.status = STATUS_EXHAUSTED
            break
        step(session, params, temperature, sampler=sampler)
    return session.graph


def complete(
    graph: RoadGraph,
    params: ModelParams,
    style: int | None,
    limits: Limits,
    rng_seed: int,
    budget_nodes: int | None = None,
    budget_steps: int | None = None,
    temperature: float = 1.0,
    region_margin: float = 500.0,
) -> RoadGraph:
    """Extend a parsed graph by queueing exactly its degree-1 nodes.

    The input graph is preserved node-for-node and edge-for-edge; with no
    degree-1 nodes the input comes back unchanged.
    """
    open_ends = sorted(v for v in graph.nodes if graph.degree(v) == 1)
    if not open_ends:
        return graph.copy()
    session = init_session(
        graph,
        style,
        limits,
        rng_seed,
        region_margin=region_margin,
        initial_queue=open_ends,
    )
    return generate(
        session, params, budget_nodes=budget_nodes,
        budget_steps=budget_steps, temperature=temperature,
    )


def validate_generated(
    graph: RoadGraph, limits: Limits, seed_graph: RoadGraph | None = None
) -> None:
    """Post-hoc check: structural invariants, limits, and planarity."""
    from .graph import validate, local_stats

    validate(graph)
    for node_id in graph.nodes:
        degree, density, min_angle = local_stats(graph, node_id)
        if degree > limits.max_degree:
            raise GraphError(f"node {node_id} exceeds degree limit")
        if density[0] > limits.max_density:
            raise GraphError(f"node {node_id} exceeds density limit")
        if degree >= 2 and min_angle < limits.min_angle - ANGLE_TOL:
            raise GraphError(f"node {node_id} violates angle limit")
    index = graph_segment_index(graph)
    for a, b in graph.edges():
        pa, pb = graph.nodes[a], graph.nodes[b]
        for key in index.near_segment(pa, pb):
            if key == edge_key(a, b):
                continue
            qa, qb = index.segment(key)
            if segments_cross(pa, pb, qa, qb):
                raise GraphError(f"edges {edge_key(a,b)} and {key} cross")
    if seed_graph is not None:
        for v, p in seed_graph.nodes.items():
            if graph.nodes.get(v) != p:
                raise GraphError(f"seed node {v} was not preserved")
        for a, b in seed_graph.edges():
            if not graph.has_edge(a, b):
                raise GraphError(f"seed edge ({a},{b}) was not preserved")
