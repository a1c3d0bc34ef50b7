"""
Solver Service

Heuristic minimizer for the Maximum Distance Problem: a greedy set cover on a
candidate grid, a minimum spanning tree through the chosen centers, then
rounds of local moves (pruning, limb shortcuts, ball cuts, Steiner insertion,
vertex descent). Every accepted move shortens the tree and keeps the coverage
certificate passing; the result is a certified tree.
"""

import heapq
import itertools
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.optimize import minimize_scalar
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial import Delaunay, QhullError, cKDTree
from scipy.spatial.distance import pdist, squareform

from maxdist.core.config import GEOM_TOL
from maxdist.core.errors import DomainError, GeometryError, InfeasibleError
from maxdist.models.geometry import CurveGraph, PointCloud
from maxdist.models.tags import MoveKind, TargetMode
from maxdist.schemas.generators import SampleSpec
from maxdist.schemas.solver import MoveRecord, Solution, SolverConfig
from maxdist.services import coverage_service
from maxdist.services.geometry_service import curve_length, distances_to_segments, is_tree, polygon_circle

logger = logging.getLogger(__name__)

# Moves must save more than this fraction of r
IMPROVEMENT_RTOL = 1e-6
# Target densities are float sums; allow a few ulps above delta
DENSITY_RTOL = 1e-9
MAX_CANDIDATES = 2_000_000
_BISECTION_STEPS = 12
_MAX_STUBS = 8
_DENSE_MST_LIMIT = 3000
_COS_120 = -0.5

Segment = Tuple[np.ndarray, np.ndarray]


def ball_cut_gate(a: float) -> bool:
    """2^(A/8) * 4 > 2 pi A: a limb that long inside B(z, Ar) is beaten by the circle."""
    return 2 ** (a / 8) * 4 > 2 * math.pi * a


def solver_target(e: PointCloud, r: float, mode: str, cfg: SolverConfig) -> PointCloud:
    """
    The cloud the solver must cover: e itself (set mode) or a lattice sample
    of B(e, r) whose density is cfg.delta (neighborhood mode).
    """
    cfg = cfg.resolved(r)
    own = e.density or 0.0
    if mode == TargetMode.SET:
        if own > cfg.delta * (1 + DENSITY_RTOL):
            raise DomainError(f"target density {own} exceeds delta={cfg.delta}")
        return e.with_density(own)
    if mode != TargetMode.NEIGHBORHOOD:
        raise DomainError(f"unknown mode {mode!r}")
    if cfg.delta <= own:
        raise DomainError(f"delta={cfg.delta} must exceed the input density {own}")
    return coverage_service.neighborhood_target(e, r, SampleSpec(delta=cfg.delta - own, seed=cfg.seed))


def _candidate_grid(target: PointCloud, r: float, pitch: float) -> np.ndarray:
    """Multiples of `pitch` within distance r of the target."""
    points = target.points
    low = np.floor((points.min(axis=0) - r) / pitch).astype(np.int64)
    high = np.ceil((points.max(axis=0) + r) / pitch).astype(np.int64)
    count = int(np.prod(high - low + 1))
    if count > MAX_CANDIDATES:
        raise DomainError(f"candidate grid of {count} points at pitch {pitch} exceeds {MAX_CANDIDATES}")
    axes = [np.arange(a, b + 1) * pitch for a, b in zip(low, high)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, points.shape[1])
    distance, _ = cKDTree(points).query(grid, distance_upper_bound=r * (1 + 1e-12))
    return grid[distance <= r]


def greedy_cover_centers(target: PointCloud, r: float, cfg: Optional[SolverConfig] = None) -> PointCloud:
    """
    Greedy set cover of the target by balls of radius r - delta centered on a
    candidate grid.

    Candidates are ranked by new points covered, then by the mean distance to
    those points, then lexicographically. Centers come back in pick order.

    Raises:
        DomainError: delta >= r or target density above delta
        InfeasibleError: some target point is out of reach of every candidate
    """
    cfg = (cfg or SolverConfig()).resolved(r)
    target.require_non_empty("solver target")
    if not 0 < cfg.delta < r:
        raise DomainError(f"need 0 < delta < r, got delta={cfg.delta}, r={r}")
    if (target.density or 0.0) > cfg.delta * (1 + DENSITY_RTOL):
        raise DomainError(f"target density {target.density} exceeds delta={cfg.delta}")

    reach = r - cfg.delta - GEOM_TOL
    candidates = _candidate_grid(target, r, cfg.candidate_grid_pitch)
    points = target.points
    balls = [np.asarray(found, dtype=np.int64) for found in cKDTree(points).query_ball_point(candidates, reach)]

    coverable = np.zeros(len(points), dtype=bool)
    for ball in balls:
        coverable[ball] = True
    if not coverable.all():
        missing = int((~coverable).sum())
        raise InfeasibleError(
            f"{missing} target points are farther than r - delta = {reach:.6g} from every candidate "
            f"at pitch {cfg.candidate_grid_pitch}; reduce candidate_grid_pitch"
        )

    uncovered = np.ones(len(points), dtype=bool)

    def rank(index: int) -> Tuple[int, float, tuple]:
        fresh = balls[index][uncovered[balls[index]]]
        spread = float(np.linalg.norm(points[fresh] - candidates[index], axis=1).mean()) if fresh.size else 0.0
        return -int(fresh.size), spread, tuple(candidates[index].tolist())

    heap = [(*rank(i), i) for i in range(len(candidates)) if balls[i].size]
    heapq.heapify(heap)
    chosen: List[int] = []
    while uncovered.any():
        entry = heapq.heappop(heap)
        index = entry[-1]
        fresh = rank(index)
        if fresh[0] == 0:
            continue
        if heap and (*fresh, index) > heap[0]:
            heapq.heappush(heap, (*fresh, index))
            continue
        chosen.append(index)
        uncovered[balls[index]] = False

    logger.debug(f"Greedy cover: {len(chosen)} centers from {len(candidates)} candidates")
    return PointCloud(points=candidates[chosen])


def connect_tree(centers: PointCloud) -> CurveGraph:
    """Euclidean minimum spanning tree through the (deduplicated) centers."""
    centers.require_non_empty("centers")
    points = np.unique(centers.points, axis=0)
    if len(points) == 1:
        return CurveGraph(vertices=points)

    weights = None
    if len(points) > _DENSE_MST_LIMIT and points.shape[1] == 2:
        try:
            simplices = Delaunay(points).simplices
            pairs = np.vstack([simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [0, 2]]])
            pairs = np.unique(np.sort(pairs, axis=1), axis=0)
            lengths = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=1)
            weights = coo_matrix((lengths, (pairs[:, 0], pairs[:, 1])), shape=(len(points), len(points)))
        except QhullError:
            weights = None
    if weights is None:
        weights = squareform(pdist(points))
    tree = minimum_spanning_tree(weights).tocoo()
    return CurveGraph(vertices=points, edges=np.column_stack([tree.row, tree.col]))


class _WorkingTree:
    """Mutable tree plus the local coverage check every move goes through."""

    def __init__(self, graph: CurveGraph, target: PointCloud, r: float, cfg: SolverConfig):
        self.graph = nx.Graph()
        for index, coords in enumerate(graph.vertices):
            self.graph.add_node(index, pos=np.array(coords, dtype=float))
        self.graph.add_edges_from(map(tuple, graph.edges.tolist()))
        self.next_id = graph.vertex_count
        self.dimension = graph.dimension
        self.points = target.points
        self.index = cKDTree(target.points)
        self.limit = r - (target.density or 0.0) - GEOM_TOL
        self.r = r
        self.cfg = cfg
        self.threshold = IMPROVEMENT_RTOL * r
        self.log: List[MoveRecord] = []
        self.rounds = 0
        # vertex -> (position, neighbor positions) at its last fruitless descent
        self.quiet = {}
        self._table = None

    def pos(self, node: int) -> np.ndarray:
        return self.graph.nodes[node]["pos"]

    def sort_key(self, node: int) -> tuple:
        return tuple(self.pos(node).tolist())

    def new_node(self, graph: nx.Graph, coords: np.ndarray) -> int:
        node = self.next_id
        self.next_id += 1
        graph.add_node(node, pos=np.array(coords, dtype=float))
        return node

    def length(self) -> float:
        return float(sum(np.linalg.norm(self.pos(u) - self.pos(v)) for u, v in self.graph.edges()))

    def segment_table(self):
        """(edge keys, key -> row, starts, ends); a lone vertex is a zero-length row."""
        if self._table is None:
            keys = [tuple(sorted(edge)) for edge in self.graph.edges()]
            if keys:
                starts = np.array([self.pos(u) for u, _ in keys])
                ends = np.array([self.pos(v) for _, v in keys])
            else:
                starts = np.array([self.pos(v) for v in self.graph.nodes])
                ends = starts.copy()
            self._table = (keys, {key: row for row, key in enumerate(keys)}, starts, ends)
        return self._table

    def _affected(self, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
        low = np.minimum(starts.min(axis=0), ends.min(axis=0))
        high = np.maximum(starts.max(axis=0), ends.max(axis=0))
        radius = 0.5 * float(np.linalg.norm(high - low)) + self.limit
        found = np.asarray(self.index.query_ball_point(0.5 * (low + high), radius), dtype=np.int64)
        if found.size == 0:
            return found
        return found[distances_to_segments(self.points[found], starts, ends) <= self.limit]

    def uncovered(self, removed: Sequence[Tuple[int, int]], added: Sequence[Segment]) -> np.ndarray:
        """Target points a removed edge covered that neither `added` nor the kept edges reach."""
        if not removed:
            return np.zeros((0, self.dimension))
        _, rows, starts, ends = self.segment_table()
        removed_rows = [rows[tuple(sorted(edge))] for edge in removed]
        affected = self._affected(starts[removed_rows], ends[removed_rows])
        pending = self.points[affected]
        if len(pending) == 0:
            return pending
        if added:
            new_starts = np.array([a for a, _ in added])
            new_ends = np.array([b for _, b in added])
            pending = pending[distances_to_segments(pending, new_starts, new_ends) > self.limit]
            if len(pending) == 0:
                return pending

        keep = np.ones(len(starts), dtype=bool)
        keep[removed_rows] = False
        low = pending.min(axis=0) - self.limit
        high = pending.max(axis=0) + self.limit
        keep &= np.all(np.maximum(starts, ends) >= low, axis=1)
        keep &= np.all(np.minimum(starts, ends) <= high, axis=1)
        if not keep.any():
            return pending
        return pending[distances_to_segments(pending, starts[keep], ends[keep]) > self.limit]

    def move_ok(self, removed: Sequence[Tuple[int, int]], added: Sequence[Segment]) -> bool:
        """True iff every target point covered by a removed edge stays covered."""
        return len(self.uncovered(removed, added)) == 0

    def attempt(
        self,
        kind: str,
        removed: Sequence[Tuple[int, int]],
        added: Sequence[Segment],
        gain: float,
        commit: Callable[[], None],
        verified: bool = False,
    ) -> bool:
        if gain <= self.threshold:
            return False
        if not verified and not self.move_ok(removed, added):
            return False
        commit()
        self._table = None
        if kind != MoveKind.VERTEX_DESCENT:
            self.quiet.clear()
        self.log.append(MoveRecord(kind=kind, delta_length=-gain))
        logger.debug(f"{kind}: -{gain:.6g}")
        return True

    def to_curve(self) -> CurveGraph:
        nodes = sorted(self.graph.nodes)
        position = {node: i for i, node in enumerate(nodes)}
        vertices = np.array([self.pos(node) for node in nodes])
        edges = [(position[u], position[v]) for u, v in self.graph.edges()]
        return CurveGraph(vertices=vertices, edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2))


def _bisect(feasible: Callable[[float], bool], step: float) -> float:
    """Largest fraction of `step` found feasible by bisection (0 is assumed feasible)."""
    low, high = 0.0, 1.0
    for _ in range(_BISECTION_STEPS):
        middle = 0.5 * (low + high)
        if feasible(middle * step):
            low = middle
        else:
            high = middle
    return low * step


def _prune(tree: _WorkingTree) -> int:
    accepted = 0
    changed = True
    while changed:
        changed = False
        leaves = sorted((v for v in tree.graph.nodes if tree.graph.degree(v) == 1), key=tree.sort_key)
        for leaf in leaves:
            if tree.graph.number_of_nodes() <= 1 or leaf not in tree.graph or tree.graph.degree(leaf) != 1:
                continue
            (parent,) = tree.graph.neighbors(leaf)
            anchor = tree.pos(parent)
            gain = float(np.linalg.norm(tree.pos(leaf) - anchor))
            # The parent stays on the curve even if it becomes the last vertex
            if tree.attempt(MoveKind.PRUNE, [(leaf, parent)], [(anchor, anchor)], gain, lambda: tree.graph.remove_node(leaf)):
                accepted += 1
                changed = True
    return accepted


def _limbs(graph: nx.Graph) -> List[List[int]]:
    """Maximal paths whose interior vertices have degree 2."""
    limbs = []
    walked = set()
    for start in sorted(v for v in graph.nodes if graph.degree(v) != 2):
        for step in sorted(graph.neighbors(start)):
            if (start, step) in walked:
                continue
            path = [start, step]
            while graph.degree(path[-1]) == 2:
                path.append(next(v for v in graph.neighbors(path[-1]) if v != path[-2]))
            walked.add((path[-1], path[-2]))
            limbs.append(path)
    return limbs


def _stubbed_chord(
    tree: _WorkingTree, removed: Sequence[Tuple[int, int]], a: int, b: int, budget: float
) -> Optional[Tuple[List[np.ndarray], List[Tuple[int, int]], float]]:
    """
    The chord [a, b] plus the shortest stubs that reach the target points only
    the removed edges covered.

    Each stub runs from the nearest point of the structure so far toward the
    worst uncovered point and stops just inside its reach.

    Returns:
        (points, edges, stub length) where points 0 and 1 stand for a and b,
        or None when the stubs cost `budget` or more
    """
    points = [tree.pos(a), tree.pos(b)]
    edges = [(0, 1)]
    extra = 0.0
    reach = tree.limit * (1 - DENSITY_RTOL)
    for stubs in range(_MAX_STUBS + 1):
        pending = tree.uncovered(removed, [(points[i], points[j]) for i, j in edges])
        if len(pending) == 0:
            return points, edges, extra
        if stubs == _MAX_STUBS:
            return None

        starts = np.array([points[i] for i, _ in edges])
        ends = np.array([points[j] for _, j in edges])
        worst = pending[int(np.argmax(distances_to_segments(pending, starts, ends)))]
        direction = ends - starts
        denom = np.einsum("ij,ij->i", direction, direction)
        t = np.clip(np.einsum("ij,ij->i", worst - starts, direction) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
        feet = starts + t[:, None] * direction
        gaps = np.linalg.norm(worst - feet, axis=1)
        row = int(np.argmin(gaps))
        length = float(gaps[row]) - reach
        extra += length
        if extra >= budget:
            return None

        foot = feet[row]
        i, j = edges[row]
        if t[row] <= 0:
            base = i
        elif t[row] >= 1:
            base = j
        else:
            base = len(points)
            points.append(foot)
            edges[row] = (i, base)
            edges.append((base, j))
        points.append(foot + (worst - foot) * (length / float(gaps[row])))
        edges.append((base, len(points) - 1))
    return None


def _replace_by_chord(tree: _WorkingTree, path: List[int], saving: float) -> bool:
    """Swap a degree-2 path for its (possibly stubbed) chord."""
    if saving <= tree.threshold:
        return False
    removed = list(zip(path, path[1:]))
    found = _stubbed_chord(tree, removed, path[0], path[-1], saving - tree.threshold)
    if found is None:
        return False
    points, edges, extra = found

    def replace():
        tree.graph.remove_nodes_from(path[1:-1])
        ids = [path[0], path[-1]] + [tree.new_node(tree.graph, p) for p in points[2:]]
        tree.graph.add_edges_from((ids[i], ids[j]) for i, j in edges)

    return tree.attempt(MoveKind.SHORTCUT, removed, [], saving - extra, replace, verified=True)


def _shortcut(tree: _WorkingTree) -> int:
    accepted = 0
    for path in _limbs(tree.graph):
        if len(path) < 3 or any(v not in tree.graph for v in path):
            continue
        coords = [tree.pos(v) for v in path]
        length = sum(float(np.linalg.norm(b - a)) for a, b in zip(coords, coords[1:]))
        chord = float(np.linalg.norm(coords[-1] - coords[0]))
        if length > chord * (1 + IMPROVEMENT_RTOL) and _replace_by_chord(tree, path, length - chord):
            accepted += 1
            continue

        # Chord rejected: straighten one interior vertex at a time
        for v in path[1:-1]:
            if v not in tree.graph or tree.graph.degree(v) != 2:
                continue
            a, b = sorted(tree.graph.neighbors(v))
            pa, pv, pb = tree.pos(a), tree.pos(v), tree.pos(b)
            gain = float(np.linalg.norm(pv - pa) + np.linalg.norm(pb - pv) - np.linalg.norm(pb - pa))
            if _replace_by_chord(tree, [a, v, b], gain):
                accepted += 1
    return accepted


def _clip_to_ball(starts: np.ndarray, ends: np.ndarray, center: np.ndarray, radius: float):
    """Parameter interval [t0, t1] of each segment inside the ball (empty when t1 <= t0)."""
    direction = ends - starts
    offset = starts - center
    a = np.einsum("ij,ij->i", direction, direction)
    b = 2 * np.einsum("ij,ij->i", offset, direction)
    c = np.einsum("ij,ij->i", offset, offset) - radius ** 2
    disc = b ** 2 - 4 * a * c
    hit = (a > 0) & (disc > 0)
    root = np.sqrt(np.where(hit, disc, 0.0))
    denom = np.where(hit, 2 * a, 1.0)
    t0 = np.clip((-b - root) / denom, 0.0, 1.0)
    t1 = np.clip((-b + root) / denom, 0.0, 1.0)
    t1 = np.where(hit, np.maximum(t1, t0), t0)
    return t0, t1, np.sqrt(a)


def _cut_ball(tree: _WorkingTree, center: np.ndarray, radius: float) -> bool:
    keys, _, starts, ends = tree.segment_table()
    if not keys:
        return False
    t0, t1, lengths = _clip_to_ball(starts, ends, center, radius)
    inside = (t1 - t0) * lengths
    if float(inside.sum()) <= 2 * math.pi * radius:
        return False

    graph = tree.graph.copy()
    crossings = []
    for row in np.flatnonzero(inside > 0):
        u, v = keys[row]
        graph.remove_edge(u, v)
        direction = ends[row] - starts[row]
        for node, t in ((u, t0[row]), (v, t1[row])):
            if np.linalg.norm(tree.pos(node) - center) >= radius:
                crossing = tree.new_node(graph, starts[row] + t * direction)
                graph.add_edge(node, crossing)
                crossings.append(crossing)
    swallowed = [
        v for v in graph.nodes
        if v not in crossings and np.linalg.norm(graph.nodes[v]["pos"] - center) < radius
    ]
    graph.remove_nodes_from(swallowed)

    ring = polygon_circle(center, radius, tree.r / 100)
    ring_nodes = [tree.new_node(graph, coords) for coords in ring.vertices]
    graph.add_edges_from((ring_nodes[i], ring_nodes[j]) for i, j in ring.edges.tolist())
    if crossings:
        _, nearest = cKDTree(ring.vertices).query(np.array([graph.nodes[c]["pos"] for c in crossings]))
        graph.add_edges_from((c, ring_nodes[k]) for c, k in zip(crossings, np.atleast_1d(nearest)))
    for u, v in graph.edges():
        graph.edges[u, v]["length"] = float(np.linalg.norm(graph.nodes[u]["pos"] - graph.nodes[v]["pos"]))
    spanning = nx.minimum_spanning_tree(graph, weight="length")
    if not nx.is_tree(spanning):
        return False

    # The spanning tree may also drop edges outside the ball when the old tree crossed it twice
    removed = [(u, v) for u, v in tree.graph.edges() if not spanning.has_edge(u, v)]
    new_length = float(sum(length for _, _, length in spanning.edges(data="length")))
    added = [
        (spanning.nodes[u]["pos"], spanning.nodes[v]["pos"])
        for u, v in spanning.edges()
        if not tree.graph.has_edge(u, v)
    ]

    def commit():
        tree.graph = spanning

    return tree.attempt(MoveKind.BALL_CUT, removed, added, tree.length() - new_length, commit)


def _ball_cut(tree: _WorkingTree) -> int:
    if tree.dimension != 2 or tree.graph.number_of_edges() == 0:
        return 0
    radius = tree.cfg.ball_cut_A * tree.r
    nodes = sorted(tree.graph.nodes)
    gaps, _ = tree.index.query(np.array([tree.pos(v) for v in nodes]))
    accepted = 0
    for node, gap in zip(nodes, gaps):
        if gap > 2 * radius and node in tree.graph and _cut_ball(tree, tree.pos(node).copy(), radius):
            accepted += 1
    return accepted


def fermat_point(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Point minimizing the summed distance to a, b and c."""
    corners = np.stack([a, b, c]).astype(float)
    for i in range(3):
        u = corners[(i + 1) % 3] - corners[i]
        w = corners[(i + 2) % 3] - corners[i]
        norms = np.linalg.norm(u) * np.linalg.norm(w)
        # A corner with angle >= 120 degrees is the minimizer
        if norms == 0 or np.dot(u, w) / norms <= _COS_120:
            return corners[i].copy()
    point = corners.mean(axis=0)
    for _ in range(500):
        gaps = np.linalg.norm(corners - point, axis=1)
        if gaps.min() == 0:
            break
        weights = 1.0 / gaps
        step = (corners * weights[:, None]).sum(axis=0) / weights.sum()
        done = np.linalg.norm(step - point) <= 1e-15 * (1 + np.linalg.norm(point))
        point = step
        if done:
            break
    return point


def _steiner(tree: _WorkingTree) -> int:
    accepted = 0
    for v in sorted(tree.graph.nodes, key=tree.sort_key):
        if v not in tree.graph or tree.graph.degree(v) < 2:
            continue
        pv = tree.pos(v)
        best = None
        for a, b in itertools.combinations(sorted(tree.graph.neighbors(v)), 2):
            pa, pb = tree.pos(a), tree.pos(b)
            u, w = pa - pv, pb - pv
            norms = np.linalg.norm(u) * np.linalg.norm(w)
            if norms == 0 or np.dot(u, w) / norms <= _COS_120:
                continue
            target = fermat_point(pv, pa, pb)
            saving = _star_saving(pv, pa, pb, target)
            if best is None or saving > best[0]:
                best = (saving, a, b, target)
        if best is None or best[0] <= tree.threshold:
            continue
        _, a, b, target = best
        pa, pb = tree.pos(a), tree.pos(b)
        removed = [(v, a), (v, b)]

        def feasible(t, pa=pa, pb=pb, pv=pv, target=target, removed=removed):
            s = pv + t * (target - pv)
            return tree.move_ok(removed, [(s, pv), (s, pa), (s, pb)])

        t = 1.0 if feasible(1.0) else _bisect(feasible, 1.0)
        point = pv + t * (target - pv)

        def insert(a=a, b=b, v=v, point=point):
            s = tree.new_node(tree.graph, point)
            tree.graph.remove_edges_from([(v, a), (v, b)])
            tree.graph.add_edges_from([(s, v), (s, a), (s, b)])

        if tree.attempt(MoveKind.STEINER, removed, [], _star_saving(pv, pa, pb, point), insert, verified=True):
            accepted += 1
    return accepted


def _star_saving(pv, pa, pb, s) -> float:
    before = np.linalg.norm(pa - pv) + np.linalg.norm(pb - pv)
    after = np.linalg.norm(s - pv) + np.linalg.norm(s - pa) + np.linalg.norm(s - pb)
    return float(before - after)


def _descent_sweep(tree: _WorkingTree) -> int:
    accepted = 0
    axes = np.eye(tree.dimension)
    for v in sorted(tree.graph.nodes):
        if v not in tree.graph:
            continue
        neighbors = sorted(tree.graph.neighbors(v))
        if not neighbors:
            continue
        anchors = np.array([tree.pos(u) for u in neighbors])
        removed = [(v, u) for u in neighbors]
        signature = (tuple(tree.pos(v).tolist()), tuple(anchors.ravel().tolist()))
        # Same local picture as its last fruitless sweep
        if tree.quiet.get(v) == signature:
            continue
        moved = False

        pv = tree.pos(v)
        offsets = anchors - pv
        norms = np.linalg.norm(offsets, axis=1)
        pull = (offsets[norms > 0] / norms[norms > 0, None]).sum(axis=0)
        directions = [(pull / np.linalg.norm(pull), 0.0)] if np.linalg.norm(pull) > 1e-12 else []
        directions += [(axis, -1.0) for axis in axes]

        for direction, low in directions:
            pv = tree.pos(v)
            reach = float(np.linalg.norm(anchors - pv, axis=1).max())
            if reach <= 0:
                break

            def total(t, pv=pv, direction=direction):
                return float(np.linalg.norm(anchors - (pv + t * direction), axis=1).sum())

            found = minimize_scalar(total, bounds=(low * reach, reach), method="bounded", options={"xatol": 1e-9 * tree.r})
            base = total(0.0)
            if base - total(found.x) <= tree.threshold:
                continue

            def feasible(t, pv=pv, direction=direction):
                shifted = pv + t * direction
                return tree.move_ok(removed, [(anchor, shifted) for anchor in anchors])

            step = float(found.x)
            step = step if feasible(step) else _bisect(feasible, step)
            target = pv + step * direction

            def relocate(target=target):
                tree.graph.nodes[v]["pos"] = target

            if tree.attempt(MoveKind.VERTEX_DESCENT, removed, [], base - total(step), relocate, verified=True):
                accepted += 1
                moved = True
        if not moved:
            tree.quiet[v] = signature
    return accepted


def _checked_tree(g: CurveGraph, target: PointCloud, r: float, cfg: Optional[SolverConfig]) -> _WorkingTree:
    if not is_tree(g):
        raise GeometryError("solver moves need a tree")
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    return _WorkingTree(g, target, r, (cfg or SolverConfig()).resolved(r))


def prune_loose_branches(g: CurveGraph, target: PointCloud, r: float, cfg: Optional[SolverConfig] = None) -> CurveGraph:
    """Remove leaf edges, repeatedly, while the coverage certificate keeps passing."""
    tree = _checked_tree(g, target, r, cfg)
    _prune(tree)
    return tree.to_curve()


def shortcut_limbs(g: CurveGraph, target: PointCloud, r: float, cfg: Optional[SolverConfig] = None) -> CurveGraph:
    """Replace limbs by their chords, or straighten single vertices when the chord fails."""
    tree = _checked_tree(g, target, r, cfg)
    _shortcut(tree)
    return tree.to_curve()


def ball_cut(g: CurveGraph, target: PointCloud, r: float, cfg: Optional[SolverConfig] = None) -> CurveGraph:
    """
    For vertices z farther than 2Ar from the target, replace the part of the
    tree inside B(z, Ar) by the polygonized circle when that part is longer
    than 2 pi A r. Planar trees only; other dimensions pass through unchanged.
    """
    tree = _checked_tree(g, target, r, cfg)
    _ball_cut(tree)
    return tree.to_curve()


def insert_steiner_points(g: CurveGraph, target: PointCloud, r: float, cfg: Optional[SolverConfig] = None) -> CurveGraph:
    tree = _checked_tree(g, target, r, cfg)
    _steiner(tree)
    return tree.to_curve()


def vertex_descent(g: CurveGraph, target: PointCloud, r: float, cfg: Optional[SolverConfig] = None) -> CurveGraph:
    """Coordinate descent on vertex positions, at most cfg.max_rounds sweeps."""
    tree = _checked_tree(g, target, r, cfg)
    for _ in range(tree.cfg.max_rounds):
        if _descent_sweep(tree) == 0:
            break
    return tree.to_curve()


def _improve(graph: CurveGraph, target: PointCloud, r: float, cfg: SolverConfig) -> _WorkingTree:
    tree = _WorkingTree(graph, target, r, cfg)
    tree.log.append(MoveRecord(kind=MoveKind.INITIAL_TREE, delta_length=tree.length()))
    for round_number in range(1, cfg.max_rounds + 1):
        tree.rounds = round_number
        moves = _prune(tree) + _shortcut(tree) + _ball_cut(tree) + _steiner(tree) + _descent_sweep(tree)
        logger.debug(f"Round {round_number}: {moves} moves, length {tree.length():.6f}")
        if moves == 0:
            break
    return tree


def solve(
    e: PointCloud,
    r: float,
    mode: str = TargetMode.NEIGHBORHOOD,
    cfg: Optional[SolverConfig] = None,
) -> Solution:
    """
    Certified short tree whose r-neighborhood contains the target.

    The greedy-cover tree is always improved; in neighborhood mode the
    minimum spanning tree through e is improved as well (unless
    cfg.inscribed_seed is off) and the shorter result wins.

    Raises:
        DomainError: invalid r, delta or mode
        InfeasibleError: the candidate grid is too coarse
        CertificateError: the final certificate failed
    """
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    if mode not in TargetMode.ALL:
        raise DomainError(f"unknown mode {mode!r}")
    cfg = (cfg or SolverConfig()).resolved(r)
    if cfg.delta >= r:
        raise DomainError(f"delta={cfg.delta} must be below r={r}")
    e.require_non_empty("input set")

    target = solver_target(e, r, mode, cfg)
    seeds = [connect_tree(greedy_cover_centers(target, r, cfg))]
    if mode == TargetMode.NEIGHBORHOOD and cfg.inscribed_seed:
        seeds.append(connect_tree(e))

    best = None
    for seed in seeds:
        run = _improve(seed, target, r, cfg)
        if best is None or run.length() < best.length() - best.threshold:
            best = run

    curve = best.to_curve()
    if not is_tree(curve):
        raise GeometryError("solver produced a graph that is not a tree")
    certificate = coverage_service.require_pass(coverage_service.covers(curve, target, r), f"solver at r={r}")
    length = curve_length(curve)
    logger.info(
        f"Solved r={r} mode={mode}: length={length:.6f}, {curve.vertex_count} vertices, "
        f"{best.rounds} rounds, margin={certificate.margin:.3g}"
    )
    return Solution(
        curve=curve,
        length=length,
        certificate=certificate,
        rounds_used=best.rounds,
        move_log=best.log,
        mode=mode,
    )
