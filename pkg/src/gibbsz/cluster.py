"""Mesh-sum evaluation of cluster-expansion coefficients on boxes.

The k-th coefficient over the centered box of half side n is a sum,
over connected graphs G on k vertices and shell labellings of their
edges, of integrals of products of interaction increments.  Each
labelled integral is approximated by a lattice sum: the first point
runs over the box lattice, the remaining points hang off a spanning
tree of G at lattice offsets constrained to shrunken shells, and every
non-tree edge prunes the configuration set.  The reported error bound
has three explicit parts: a Lipschitz term for within-cell variation, a
shrinkage term for the shell layers the gamma-test cuts away, and a
half-cell boundary-layer term.

Summation order is part of the contract: graphs ascend by edge bitmask,
labellings run in odometer order, mesh configurations stream with the
box point outermost, and all reductions are compensated sums over
fixed-size chunks reduced in index order.  Thread count never changes
a reported bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .accum import CompensatedSum, chunk_sum, reduce_ordered
from .errors import CostCeiling, InputError, MeshInfeasible, Refusal
from .graphs import (HARD_VERTEX_LIMIT, chunk_ranges, connected_graph_masks,
                     edge_labellings, edge_universe, mask_to_edges,
                     spanning_tree)
from .potential import Potential

CHUNK_TARGET = 1 << 21          # elements per mask chunk in the weighted path
GRAPH_GROUP = 32                # graphs per reduction group (fixed, not per-thread)
DEFAULT_MAX_POINTS = float(1 << 34)
MAX_COMBOS = 1 << 23            # offset-combination ceiling per labelled graph
DELTA_FLOOR_BITS = 40           # refuse lattices finer than 2n / 2^40
ADAPTIVE_MAX_HALVINGS = 24


@dataclass(frozen=True)
class BoxDomain:
    """Centered axis box of half side-length n in dimension d."""

    n: int
    dimension: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise InputError(f"box half side must be a positive integer, got {self.n!r}")
        if not (isinstance(self.dimension, int) and self.dimension >= 1):
            raise InputError(f"dimension must be a positive integer, got {self.dimension!r}")

    @property
    def volume(self) -> float:
        return float((2 * self.n) ** self.dimension)


@dataclass(frozen=True)
class MeshParams:
    """Mesh width and the shell shrinkage it induces.

    The shrinkage is always recomputed as 2 sqrt(d) R delta; it is
    capped at 1/d, which bounds how much of each shell the safety
    margin can eat.
    """

    delta: float
    gamma: float

    @classmethod
    def for_potential(cls, potential: Potential, delta: float) -> "MeshParams":
        d = potential.dimension
        R = potential.support_halfwidth
        delta = float(delta)
        if not (math.isfinite(delta) and delta > 0):
            raise InputError("mesh width must be finite and positive")
        gamma = 2.0 * math.sqrt(d) * R * delta
        cap = 1.0 / d
        if gamma > cap * (1 + 1e-12):
            raise InputError(
                f"mesh width {delta:g} too large: shrinkage {gamma:g} exceeds the"
                f" cap 1/d = {cap:g}; need width <= {cap / (2.0 * math.sqrt(d) * R):g}")
        return cls(delta, gamma)


def delta_cap(potential: Potential) -> float:
    """Largest mesh width the shrinkage cap allows."""
    d = potential.dimension
    return 1.0 / (2.0 * d ** 1.5 * potential.support_halfwidth)


def check_box_divisible(box: BoxDomain, delta: float) -> int:
    """Number of lattice cells per axis; errors unless it is a power of two.

    Mesh widths are restricted to 2n / 2^m so that the cell-centered
    lattice tiles the box exactly and nests under halving.
    """
    two_n = 2.0 * box.n
    t = two_n / delta
    ti = int(round(t))
    if ti < 1 or t != ti or ti & (ti - 1) != 0 or delta * ti != two_n:
        raise InputError(
            f"mesh width {delta!r} must equal 2n/2^m for the box n={box.n}")
    return ti


def largest_admissible_delta(box: BoxDomain, upper: float) -> float:
    """Largest width of the form 2n/2^m that is <= upper."""
    if upper <= 0:
        raise InputError("width upper bound must be positive")
    delta = 2.0 * box.n
    for _ in range(200):
        if delta <= upper:
            return delta
        delta /= 2.0
    raise MeshInfeasible(f"no feasible mesh width at or below {upper:g}", upper)


def lattice_axis(box: BoxDomain, delta: float) -> np.ndarray:
    t = check_box_divisible(box, delta)
    return -box.n + (np.arange(t) + 0.5) * delta


def lattice_points(box: BoxDomain, delta: float) -> np.ndarray:
    """Cell-centered box lattice as an (t^d, d) array, lexicographic."""
    axis = lattice_axis(box, delta)
    grids = np.meshgrid(*([axis] * box.dimension), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


@dataclass(frozen=True)
class LabelledGraph:
    """A connected graph together with a shell label per edge.

    Edges are (a, b) with a < b, listed in the lexicographic order of
    the full pair universe; labels[i] is the shell index of edges[i].
    """

    k: int
    edges: Tuple[Tuple[int, int], ...]
    labels: Tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.edges):
            raise InputError("one label per edge required")
        universe = edge_universe(self.k)
        pos = {e: i for i, e in enumerate(universe)}
        last = -1
        for e in self.edges:
            if e not in pos:
                raise InputError(f"edge {e} invalid for {self.k} vertices")
            if pos[e] <= last:
                raise InputError("edges must be strictly increasing in canonical order")
            last = pos[e]
        for lab in self.labels:
            if not (isinstance(lab, int) and lab >= 1):
                raise InputError(f"shell labels are positive integers, got {lab!r}")

    @property
    def num_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class LabelledIntegralResult:
    value: float
    point_count: int
    error_bound: float
    delta: float
    gamma: float


@dataclass(frozen=True)
class ClusterCoefficient:
    k: int
    value: float
    error_bound: float
    delta_used: float
    mode: str
    point_count: int = 0


def f_sigma(potential: Potential, lg: LabelledGraph, points) -> float:
    """Product over edges of the interaction increment, gated by the
    unshrunken shell test for the edge's label.  Lies in [-1, 1]."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape != (lg.k, potential.dimension):
        raise InputError(f"need {lg.k} points of dimension {potential.dimension}")
    out = 1.0
    for (a, b), lab in zip(lg.edges, lg.labels):
        diff = pts[a] - pts[b]
        if potential.shells.shell_index(diff) != lab:
            return 0.0
        out *= potential.mayer(diff)
        if out == 0.0:
            return 0.0
    return out


def in_U_gamma(potential: Potential, lg: LabelledGraph, gamma: float,
               box: BoxDomain, points) -> bool:
    """Whether a configuration survives every gamma-shrunken shell test,
    stays in the box, and carries a nonzero integrand."""
    pts = np.asarray(points, dtype=np.float64)
    if np.any(np.abs(pts) > box.n):
        return False
    for (a, b), lab in zip(lg.edges, lg.labels):
        diff = (pts[a] - pts[b]).reshape(1, -1)
        if not bool(potential.shells.shrunk_shell_mask(lab, diff, gamma)[0]):
            return False
        if potential.mayer(diff[0]) == 0.0:
            return False
    return True


# -- offset tables ---------------------------------------------------------

def _shell_offsets(potential: Potential, mesh: MeshParams, j: int):
    """Lattice offsets through shell j after shrinkage, with their
    interaction increments.  Offsets live on the unshifted lattice
    (differences of cell centers), inside the bounding box of the
    outermost body."""
    d = potential.dimension
    rb = potential.shells.bodies[-1].bounding_halfwidth()
    m = int(math.floor(rb / mesh.delta + 1e-9))
    axis = mesh.delta * np.arange(-m, m + 1)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    keep = potential.shells.shrunk_shell_mask(j, pts, min(mesh.gamma, 1.0))
    pts = pts[keep]
    weights = potential.mayer_many(pts)
    nz = weights != 0.0
    return pts[nz], weights[nz]


class _OffsetTable:
    def __init__(self, potential: Potential, mesh: MeshParams):
        self.potential = potential
        self.mesh = mesh
        self._by_shell: Dict[int, tuple] = {}

    def get(self, j: int):
        if j not in self._by_shell:
            self._by_shell[j] = _shell_offsets(self.potential, self.mesh, j)
        return self._by_shell[j]


# -- configuration plans ---------------------------------------------------

class _Plan:
    """All offset combinations for one labelled graph, relative to the
    box point, with per-combination weights (or an overall sign when
    every weight is exactly -1, as for hard cores)."""

    __slots__ = ("positions", "weights", "sign", "ncombo", "lo", "hi")

    def __init__(self, positions, weights, sign, ncombo):
        self.positions = positions
        self.weights = weights
        self.sign = sign
        self.ncombo = ncombo
        stacked = np.stack(positions)          # (k, ncombo, d)
        self.lo = stacked.min(axis=0)
        self.hi = stacked.max(axis=0)


def _build_plan(potential: Potential, lg: LabelledGraph, mesh: MeshParams,
                offsets: _OffsetTable) -> Optional[_Plan]:
    d = potential.dimension
    unit = potential.kind == "hard-core"
    tree = spanning_tree(lg.edges, lg.k)
    label_of = {e: lab for e, lab in zip(lg.edges, lg.labels)}
    rank = {v: i for i, v in enumerate(tree.order)}
    tree_edges = {(min(a, b), max(a, b)) for a, b in tree.steps}
    # each non-tree edge fires once its later-placed endpoint arrives
    pending: Dict[int, List[Tuple[int, int]]] = {}
    for e in lg.edges:
        if e not in tree_edges:
            late = e[0] if rank[e[0]] > rank[e[1]] else e[1]
            pending.setdefault(late, []).append(e)

    root = tree.order[0]
    positions: Dict[int, np.ndarray] = {root: np.zeros((1, d))}
    weights = None if unit else np.ones(1)
    ncombo = 1
    placed = [root]
    for parent, child in tree.steps:
        key = (min(parent, child), max(parent, child))
        w_off, m_off = offsets.get(label_of[key])
        m = w_off.shape[0]
        if m == 0:
            return None
        if ncombo * m > MAX_COMBOS:
            raise CostCeiling(
                f"offset combinations exceed {MAX_COMBOS} for a graph on"
                f" {lg.k} vertices at mesh width {mesh.delta:g}")
        for v in placed:
            positions[v] = np.repeat(positions[v], m, axis=0)
        positions[child] = positions[parent] + np.tile(w_off, (ncombo, 1))
        if weights is not None:
            weights = np.repeat(weights, m) * np.tile(m_off, ncombo)
        ncombo *= m
        placed.append(child)
        for a, b in pending.get(child, ()):
            diff = positions[a] - positions[b]
            keep = potential.shells.shrunk_shell_mask(
                label_of[(a, b)], diff, min(mesh.gamma, 1.0))
            if weights is not None:
                vals = potential.mayer_many(diff)
                keep &= vals != 0.0
            if not keep.all():
                idx = np.flatnonzero(keep)
                for v in placed:
                    positions[v] = positions[v][idx]
                if weights is not None:
                    weights = weights[idx] * vals[idx]
                ncombo = idx.size
            elif weights is not None:
                weights = weights * vals
            if ncombo == 0:
                return None
    sign = -1.0 if lg.num_edges % 2 else 1.0
    return _Plan([positions[v] for v in range(lg.k)], weights, sign, ncombo)


def integral_error_bound(potential: Potential, k: int, num_edges: int,
                         mesh: MeshParams, box: BoxDomain) -> float:
    """Certified bound for one labelled integral: Lipschitz within-cell
    variation, shrunken shell layers, and the half-cell boundary layer."""
    d = potential.dimension
    R = potential.support_halfwidth
    base = num_edges * (2.0 * R) ** (d * (k - 1)) * box.volume
    e_lip = 2.0 * potential.lipschitz * math.sqrt(d * k) * mesh.delta * base
    e_shrink = 4.0 * d * mesh.gamma * base
    e_bdry = 4.0 * d * (mesh.delta / 2.0) * base
    return e_lip + e_shrink + e_bdry


def mesh_points(potential: Potential, lg: LabelledGraph, mesh: MeshParams,
                box: BoxDomain) -> Iterator[np.ndarray]:
    """Stream the lattice configurations of one labelled graph.

    Order: box point in lexicographic lattice order, then offset
    combinations in tree-walk odometer order (later children fastest).
    Each yield is a fresh (k, d) array.
    """
    if box.dimension != potential.dimension:
        raise InputError("box and potential dimensions differ")
    check_box_divisible(box, mesh.delta)
    MeshParams.for_potential(potential, mesh.delta)
    plan = _build_plan(potential, lg, mesh, _OffsetTable(potential, mesh))
    if plan is None:
        return
    pts = lattice_points(box, mesh.delta)
    for x in pts:
        ok = np.all((x + plan.lo >= -box.n) & (x + plan.hi <= box.n), axis=1)
        for c in np.flatnonzero(ok):
            yield x[None, :] + np.stack([p[c] for p in plan.positions])


def _integral_from_plan(potential: Potential, lg: LabelledGraph, mesh: MeshParams,
                        box: BoxDomain, plan: Optional[_Plan]) -> LabelledIntegralResult:
    d = box.dimension
    bound = integral_error_bound(potential, lg.k, lg.num_edges, mesh, box)
    if plan is None:
        return LabelledIntegralResult(0.0, 0, bound, mesh.delta, mesh.gamma)
    t = check_box_divisible(box, mesh.delta)
    cell = mesh.delta ** (d * lg.k)
    if plan.weights is None:
        # unit-weight counting path: every admissible configuration
        # contributes sign * delta^{dk}; the count factorizes over axes,
        # and integer partials make the reduction order immaterial
        a = np.rint(plan.lo / mesh.delta).astype(np.int64)
        b = np.rint(plan.hi / mesh.delta).astype(np.int64)
        per_dim = np.clip(t - b + a, 0, None).astype(np.float64)
        counts = np.prod(per_dim, axis=1)
        total = float(np.sum(counts))
        value = plan.sign * cell * total
        return LabelledIntegralResult(value, int(total), bound, mesh.delta, mesh.gamma)
    pts = lattice_points(box, mesh.delta)
    blo = -box.n - plan.lo
    bhi = box.n - plan.hi
    w = plan.weights
    rows = max(1, CHUNK_TARGET // max(plan.ncombo, 1))
    partials = []
    npoints = 0
    for lo_i, hi_i in chunk_ranges(pts.shape[0], rows):
        X = pts[lo_i:hi_i]
        mask = np.all((X[:, None, :] >= blo[None, :, :]) &
                      (X[:, None, :] <= bhi[None, :, :]), axis=2)
        partials.append(chunk_sum((mask * w[None, :]).ravel()))
        npoints += int(np.count_nonzero(mask))
    value = cell * reduce_ordered(partials)
    return LabelledIntegralResult(value, npoints, bound, mesh.delta, mesh.gamma)


def labelled_integral(potential: Potential, lg: LabelledGraph, mesh: MeshParams,
                      box: BoxDomain) -> LabelledIntegralResult:
    """The mesh sum for one labelled graph: cell volume times the sum of
    the integrand over surviving lattice configurations, plus the
    certified error bound (reported even when the sum is empty)."""
    if box.dimension != potential.dimension:
        raise InputError("box and potential dimensions differ")
    mesh = MeshParams.for_potential(potential, mesh.delta)
    check_box_divisible(box, mesh.delta)
    plan = _build_plan(potential, lg, mesh, _OffsetTable(potential, mesh))
    return _integral_from_plan(potential, lg, mesh, box, plan)


# -- coefficient assembly --------------------------------------------------

def _pair_weight_sums(k: int, num_shells: int) -> Tuple[float, float]:
    """(number of labelled pairs, sum of edge counts over labelled pairs)."""
    masks = connected_graph_masks(k)
    pairs = 0.0
    edge_weight = 0.0
    for g in masks:
        e = bin(g).count("1")
        pairs += num_shells ** e
        edge_weight += e * num_shells ** e
    return pairs, edge_weight


def choose_delta(k: int, epsilon: float, potential: Potential, box: BoxDomain,
                 mode: str = "certified") -> float:
    """Mesh width for a coefficient run.

    Certified mode returns the largest admissible width whose summed
    per-pair bounds stay within epsilon times the box volume; adaptive
    mode returns the documented starting width R/4 (capped and snapped
    to admissibility) for the halving loop.
    """
    if mode not in ("certified", "adaptive"):
        raise InputError(f"unknown mode {mode!r}")
    if not (epsilon > 0.0 and math.isfinite(epsilon)):
        raise InputError("target error must be positive and finite")
    if k < 1:
        raise InputError("order must be positive")
    cap = delta_cap(potential)
    if mode == "adaptive":
        return largest_admissible_delta(box, min(potential.support_halfwidth / 4.0, cap))
    d = potential.dimension
    R = potential.support_halfwidth
    L = potential.lipschitz
    _, edge_weight = _pair_weight_sums(k, potential.shells.num_shells)
    if edge_weight == 0.0:
        return largest_admissible_delta(box, cap)
    # every bound term is linear in the width once the shrinkage is
    # substituted, so the budget inverts in closed form
    slope = edge_weight * (2.0 * R) ** (d * (k - 1)) * (
        2.0 * L * math.sqrt(d * k) + 8.0 * d ** 1.5 * R + 2.0 * d)
    delta = largest_admissible_delta(box, min(epsilon / slope, cap))
    floor = 2.0 * box.n * 2.0 ** -DELTA_FLOOR_BITS
    if delta < floor:
        raise MeshInfeasible(
            f"order {k} at target {epsilon:g} needs mesh width {epsilon / slope:g},"
            f" below the feasibility floor {floor:g}; consider adaptive mode",
            epsilon / slope)
    return delta


def _estimate_points(potential: Potential, box: BoxDomain, k: int,
                     mesh: MeshParams) -> float:
    """Cheap upper estimate of the work for one coefficient run."""
    offsets = _OffsetTable(potential, mesh)
    num_shells = potential.shells.num_shells
    per_child = sum(offsets.get(j)[0].shape[0] for j in range(1, num_shells + 1))
    t = check_box_divisible(box, mesh.delta)
    unit = potential.kind == "hard-core"
    total = 0.0
    for g in connected_graph_masks(k):
        e = bin(g).count("1")
        combos = float(per_child) ** (k - 1) * float(num_shells) ** max(e - (k - 1), 0)
        total += combos if unit else combos * float(t) ** box.dimension
    return total


def _jobs(k: int, num_shells: int) -> Iterator[LabelledGraph]:
    for g in connected_graph_masks(k):
        edges = mask_to_edges(g, k)
        for labels in edge_labellings(len(edges), num_shells):
            yield LabelledGraph(k, edges, labels)


def _evaluate_order(potential: Potential, box: BoxDomain, k: int, delta: float,
                    threads: int = 1) -> Tuple[float, float, int]:
    """Sum of labelled integrals over all (graph, labelling) pairs at a
    fixed width.  Returns (value, bound, points), unnormalized."""
    mesh = MeshParams.for_potential(potential, delta)
    check_box_divisible(box, delta)
    num_shells = potential.shells.num_shells
    masks = connected_graph_masks(k)
    offsets = _OffsetTable(potential, mesh)

    def group_partial(group_masks) -> Tuple[float, float, int]:
        acc = CompensatedSum()
        bound = CompensatedSum()
        pts = 0
        for g in group_masks:
            edges = mask_to_edges(g, k)
            for labels in edge_labellings(len(edges), num_shells):
                lg = LabelledGraph(k, edges, labels)
                plan = _build_plan(potential, lg, mesh, offsets)
                res = _integral_from_plan(potential, lg, mesh, box, plan)
                acc.add(res.value)
                bound.add(res.error_bound)
                pts += res.point_count
        return acc.value, bound.value, pts

    groups = [masks[lo:hi] for lo, hi in chunk_ranges(len(masks), GRAPH_GROUP)]
    if threads > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(group_partial, groups))
    else:
        results = [group_partial(g) for g in groups]
    value = reduce_ordered(r[0] for r in results)
    bound = reduce_ordered(r[1] for r in results)
    points = sum(r[2] for r in results)
    return value, bound, points


def _cached_evaluate(potential: Potential, box: BoxDomain, k: int, delta: float,
                     threads: int, cache) -> Tuple[float, float, int]:
    if cache is not None:
        hit = cache.get(potential.key(), box.n, box.dimension, k, delta)
        if hit is not None:
            return hit
    out = _evaluate_order(potential, box, k, delta, threads)
    if cache is not None:
        cache.put(potential.key(), box.n, box.dimension, k, delta, *out)
    return out


def cluster_coefficient(potential: Potential, box: BoxDomain, k: int,
                        epsilon: float, mode: str = "certified", *,
                        delta: Optional[float] = None, threads: int = 1,
                        cache=None, max_points: float = DEFAULT_MAX_POINTS) -> ClusterCoefficient:
    """The k-th coefficient per unit volume, with an error figure.

    Certified mode picks the width from the explicit bound formulas and
    reports their sum; adaptive mode halves the width until successive
    values differ by less than half the target and reports the last
    difference, flagged by mode="adaptive" as a heuristic figure.  An
    explicit ``delta`` pins the width instead (certified mode keeps its
    certified bound, which may then exceed the target).
    """
    if box.dimension != potential.dimension:
        raise InputError("box and potential dimensions differ")
    if mode not in ("certified", "adaptive"):
        raise InputError(f"unknown mode {mode!r}")
    if not (epsilon > 0.0 and math.isfinite(epsilon)):
        raise InputError("target error must be positive and finite")
    if k > HARD_VERTEX_LIMIT:
        raise InputError(f"order {k} beyond the hard limit {HARD_VERTEX_LIMIT}")
    vol = box.volume

    def run(dlt: float) -> Tuple[float, float, int]:
        est = _estimate_points(potential, box, k, MeshParams.for_potential(potential, dlt))
        if est > max_points:
            raise CostCeiling(
                f"order {k} at width {dlt:g} needs about {est:.3g} lattice"
                f" configurations, over the ceiling {max_points:.3g};"
                " consider adaptive mode or a larger target error")
        return _cached_evaluate(potential, box, k, dlt, threads, cache)

    if mode == "certified":
        try:
            d0 = delta if delta is not None else choose_delta(k, epsilon, potential, box, "certified")
        except MeshInfeasible as exc:
            raise MeshInfeasible(str(exc) + " (adaptive mode may still converge)",
                                 exc.required_delta) from None
        value, bound, pts = run(d0)
        return ClusterCoefficient(k, value / vol, bound / vol, d0, "certified", pts)

    d0 = delta if delta is not None else choose_delta(k, epsilon, potential, box, "adaptive")
    floor = 2.0 * box.n * 2.0 ** -DELTA_FLOOR_BITS
    prev_val, _, prev_pts = run(d0)
    cur = d0
    for _ in range(ADAPTIVE_MAX_HALVINGS):
        cur = cur / 2.0
        if cur < floor:
            break
        value, _, pts = run(cur)
        diff = abs(value - prev_val)
        # a baseline mesh too coarse to admit any configuration (while
        # the finer one does) says nothing about convergence; two empty
        # meshes agree for the real reason that nothing has support
        degenerate = prev_pts == 0 and pts > 0
        if not degenerate and diff < epsilon * vol / 2.0:
            return ClusterCoefficient(k, value / vol, diff / vol, cur, "adaptive", pts)
        prev_val, prev_pts = value, pts
    raise Refusal(f"adaptive halving did not converge for order {k}"
                  f" (target {epsilon:g}, last width {cur:g})")


def cluster_series(potential: Potential, box: BoxDomain, k_max: int,
                   per_coefficient_errors: Sequence[float], mode: str = "certified", *,
                   threads: int = 1, cache=None,
                   max_points: float = DEFAULT_MAX_POINTS) -> List[ClusterCoefficient]:
    """Coefficients of order 1..k_max, each to its own error target."""
    if len(per_coefficient_errors) != k_max:
        raise InputError("need exactly one error target per order")
    return [cluster_coefficient(potential, box, k, float(eps), mode,
                                threads=threads, cache=cache, max_points=max_points)
            for k, eps in enumerate(per_coefficient_errors, start=1)]
