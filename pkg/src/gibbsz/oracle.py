"""Independent ground-truth references for the mesh engine.

Everything here is deliberately naive: closed forms where they exist,
brute-force quadrature and Monte Carlo where they do not.  None of it
shares code with the structured mesh path, so agreement between the two
is evidence, not tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .cluster import BoxDomain
from .errors import CostCeiling, InputError
from .graphs import connected_graph_masks, edge_universe
from .potential import Potential

DIRECT_PARTICLE_LIMIT = 6
MC_ORDER_LIMIT = 4
CHAIN_ORDER_LIMIT = 3


def tonks_gas_logZ(length: float, rod: float, activity: float) -> float:
    """Exact log partition function of hard rods on an interval.

    The classic free-volume sum: k rods of length ``rod`` in a segment
    of the given length contribute (length - (k-1) rod)_+^k / k! times
    activity^k, and the sum is finite because at most length/rod + 1
    rods fit.
    """
    if not (length > 0 and rod > 0 and activity >= 0):
        raise InputError("need positive length and rod size, nonnegative activity")
    k_max = int(length / rod) + 1
    terms = [activity ** k / math.factorial(k) * max(length - (k - 1) * rod, 0.0) ** k
             for k in range(k_max + 1)]
    return math.log(math.fsum(terms))


@dataclass(frozen=True)
class DirectZResult:
    """Midpoint-quadrature partition function with its error ledger."""

    value: float
    activity: float
    max_particles: int
    mesh_width: float
    quad_bound: float
    truncation_bound: float

    @property
    def log_value(self) -> float:
        return math.log(self.value)

    @property
    def total_bound(self) -> float:
        return self.quad_bound + self.truncation_bound


def _boundary_band(potential: Potential, diffs: np.ndarray, band: float) -> np.ndarray:
    """Flags difference vectors within ``band`` of any body boundary.

    Those are the cells where the interaction factor may jump, so a
    midpoint value cannot be trusted there.
    """
    out = np.zeros(diffs.shape[0], dtype=bool)
    for body in potential.shells.bodies:
        if body.kind == "ball":
            dist = np.abs(np.sqrt(np.einsum("ij,ij->i", diffs, diffs)) - body.size)
        else:
            dist = np.abs(np.max(np.abs(diffs), axis=1) - body.size)
        out |= dist < band
    return out


def partition_function_direct(potential: Potential, box: BoxDomain, activity: float,
                              max_particles: int, cells_per_dim: int,
                              max_ops: float = 2.0e8) -> DirectZResult:
    """Brute-force grand partition function by midpoint quadrature.

    Sums ordered particle tuples on a cell-centered grid.  Each tuple
    carries two weights: the midpoint product and a cap that replaces
    every boundary-straddling pair factor by 1.  The true weight lies
    between 0 and the cap, so straddling tuples are charged their cap
    to the quadrature bound and branches are pruned only when the cap
    vanishes.  Smooth pairs are charged the Lipschitz midpoint drift.
    The k > max_particles tail is the exponential series remainder at
    activity times volume.
    """
    if not (isinstance(max_particles, int) and 0 <= max_particles <= DIRECT_PARTICLE_LIMIT):
        raise InputError(
            f"particle cap must lie in 0..{DIRECT_PARTICLE_LIMIT}, got {max_particles!r}")
    if not (isinstance(cells_per_dim, int) and cells_per_dim >= 2):
        raise InputError("need at least 2 quadrature cells per dimension")
    lam = float(activity)
    if not (lam >= 0 and math.isfinite(lam)):
        raise InputError(f"activity must be nonnegative and finite, got {lam!r}")
    if potential.dimension != box.dimension:
        raise InputError("potential and box dimensions differ")

    d = box.dimension
    t = cells_per_dim
    h = 2.0 * box.n / t
    axis = -box.n + (np.arange(t) + 0.5) * h
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    npts = points.shape[0]
    cell = h ** d
    band = math.sqrt(d) * h  # a pair difference of midpoints is off by this much

    sums = [0.0] * (max_particles + 1)
    sums[0] = 1.0
    jump_charge = [0.0] * (max_particles + 1)
    drift_units = [0.0] * (max_particles + 1)
    ops = 0

    def walk(depth: int, w_mid: float, w_cap: float, w_straddle: bool,
             cand_mid: np.ndarray, cand_cap: np.ndarray,
             cand_near: np.ndarray) -> None:
        """Accumulate tuples formed by a prefix of ``depth`` points plus
        one candidate.

        The prefix carries its own pair products (w_mid, w_cap); the
        candidate vectors hold each grid point's products against the
        prefix only, so descending multiplies exactly the new pairs in.
        """
        nonlocal ops
        k = depth + 1
        sums[k] += w_mid * float(np.sum(cand_mid))
        tuple_cap = w_cap * cand_cap
        straddle = cand_near | w_straddle
        jump_charge[k] += float(np.sum(np.where(straddle, tuple_cap, 0.0)))
        drift_units[k] += float(np.sum(tuple_cap)) * (k * (k - 1) // 2)
        if k == max_particles:
            return
        for c in np.nonzero(tuple_cap > 0.0)[0]:
            ops += npts
            if ops > max_ops:
                raise CostCeiling(
                    f"direct quadrature exceeded {max_ops:.0f} weight "
                    f"evaluations (grid {t}^{d}, cap {max_particles} "
                    f"particles); shrink the grid or the particle cap")
            ci = int(c)
            diffs = points - points[ci]
            w = potential.interaction_many(diffs)
            near = _boundary_band(potential, diffs, band)
            walk(depth + 1, w_mid * float(cand_mid[ci]),
                 w_cap * float(cand_cap[ci]), bool(straddle[ci]),
                 cand_mid * w, cand_cap * np.where(near, 1.0, w),
                 cand_near | near)

    if max_particles >= 1:
        ops += npts
        walk(0, 1.0, 1.0, False, np.ones(npts), np.ones(npts),
             np.zeros(npts, dtype=bool))

    L = potential.lipschitz
    value = 0.0
    quad = 0.0
    for k in range(max_particles + 1):
        scale = lam ** k * cell ** k / math.factorial(k)
        value += scale * sums[k]
        quad += scale * (jump_charge[k] + drift_units[k] * L * band)

    lam_v = lam * box.volume
    partial = math.fsum(lam_v ** k / math.factorial(k) for k in range(max_particles + 1))
    truncation = max(math.exp(lam_v) - partial, 0.0)
    return DirectZResult(value, lam, max_particles, h, quad, truncation)


@dataclass(frozen=True)
class MonteCarloCk:
    """Seeded Monte Carlo estimate of a normalized cluster coefficient."""

    order: int
    value: float
    standard_error: float
    samples: int
    seed: int


def monte_carlo_ck(potential: Potential, box: BoxDomain, k: int, samples: int,
                   seed: int, batch: int = 1 << 14) -> MonteCarloCk:
    """Plain Monte Carlo for the volume-normalized order-k coefficient.

    Draws k points uniformly in the box, evaluates the sum over
    connected graphs of products of interaction increments, and scales
    by volume^(k-1).  Unbiased and completely independent of the mesh
    machinery; the price is a standard error that only shrinks like
    1/sqrt(samples).
    """
    if not (isinstance(k, int) and 1 <= k <= MC_ORDER_LIMIT):
        raise InputError(f"order must lie in 1..{MC_ORDER_LIMIT}, got {k!r}")
    if not (isinstance(samples, int) and samples >= 2):
        raise InputError("need at least 2 samples")
    if potential.dimension != box.dimension:
        raise InputError("potential and box dimensions differ")
    d = box.dimension
    if k == 1:
        return MonteCarloCk(1, 1.0, 0.0, samples, seed)

    pairs = edge_universe(k)
    masks = connected_graph_masks(k)
    rng = np.random.Generator(np.random.PCG64(seed))
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        pts = rng.uniform(-box.n, box.n, size=(m, k, d))
        mayer = np.empty((m, len(pairs)))
        for e, (i, j) in enumerate(pairs):
            mayer[:, e] = potential.mayer_many(pts[:, j, :] - pts[:, i, :])
        est = np.zeros(m)
        for mask in masks:
            prod = np.ones(m)
            for e in range(len(pairs)):
                if mask >> e & 1:
                    prod = prod * mayer[:, e]
            est += prod
        total += float(np.sum(est))
        total_sq += float(np.sum(est * est))
        done += m

    scale = box.volume ** (k - 1)
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    se = scale * math.sqrt(var / samples)
    return MonteCarloCk(k, scale * mean, se, samples, seed)


@dataclass(frozen=True)
class ChainBound:
    """Midpoint estimate of one chain integral with a certified bound."""

    order: int
    value: float
    bound: float
    mesh_width: float

    @property
    def upper(self) -> float:
        return self.value + self.bound


def _outside_support(potential: Potential, diffs: np.ndarray, pad: float) -> np.ndarray:
    """True where phi is certainly zero even after a mesh-sized wiggle."""
    outer = potential.shells.bodies[-1]
    if outer.kind == "ball":
        return np.sqrt(np.einsum("ij,ij->i", diffs, diffs)) >= outer.size + pad
    return np.max(np.abs(diffs), axis=1) >= outer.size + pad


def connective_bound(potential: Potential, k: int,
                     mesh_width: Optional[float] = None) -> ChainBound:
    """Order-k chain integral controlling the certified activity range.

    The chain takes k steps; each step contributes the interaction
    increment |1 - e^{-phi}| of its displacement, and every earlier
    chain vertex suppresses the new one through exp(-phi) whenever the
    new vertex lands closer to it than that vertex's own outgoing step.
    Cells near any discontinuity surface (body boundaries for the step
    factors, body and comparison surfaces for the suppression factors)
    are charged their cap weight; smooth cells are charged Lipschitz
    drift.
    """
    if not (isinstance(k, int) and 1 <= k <= CHAIN_ORDER_LIMIT):
        raise InputError(f"chain order must lie in 1..{CHAIN_ORDER_LIMIT}, got {k!r}")
    d = potential.dimension
    shells = potential.shells
    half = shells.bodies[-1].bounding_halfwidth()
    if mesh_width is None:
        per_dim = max(4, int(round((2 ** 22) ** (1.0 / (d * k)))) & ~1)
        mesh_width = 2.0 * half / per_dim
    if not (0 < mesh_width <= half):
        raise InputError(f"mesh width must lie in (0, {half}], got {mesh_width!r}")
    n_cells = max(2, 2 * math.ceil(half / mesh_width))
    h = 2.0 * half / n_cells
    axis = -half + (np.arange(n_cells) + 0.5) * h
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    steps = np.stack([g.ravel() for g in grids], axis=1)
    npts = steps.shape[0]
    cell = h ** d
    reach1 = math.sqrt(d) * h / 2.0

    absmayer = np.abs(potential.mayer_many(steps))
    band1 = _boundary_band(potential, steps, reach1)

    if k == 1:
        value = float(np.sum(absmayer)) * cell
        bound = float(np.sum(np.where(band1, 1.0, 0.0))) * cell \
            + float(np.sum(np.where(band1, 0.0, 1.0))) * cell * potential.lipschitz * reach1
        return ChainBound(1, value, bound, h)

    # blocks over the first step, full tensor grid over the rest
    idx = [np.arange(npts)] * (k - 1)
    rest = np.meshgrid(*idx, indexing="ij")
    rest_flat = [r.ravel() for r in rest]
    m = rest_flat[0].size

    total = 0.0
    total_jump = 0.0
    total_smooth = 0.0
    for a in range(npts):
        if absmayer[a] == 0.0 and not band1[a]:
            continue
        mid = np.full(m, absmayer[a])
        cap = np.full(m, 1.0 if band1[a] else absmayer[a])
        straddle = np.full(m, band1[a])
        pos = [np.zeros((m, d)), np.broadcast_to(steps[a], (m, d))]
        step_vecs = [np.broadcast_to(steps[a], (m, d))]
        for j in range(2, k + 1):
            sj = steps[rest_flat[j - 2]]
            step_vecs.append(sj)
            pos.append(pos[j - 1] + sj)
            wj = absmayer[rest_flat[j - 2]]
            bj = band1[rest_flat[j - 2]]
            mid = mid * wj
            cap = cap * np.where(bj, 1.0, wj)
            straddle = straddle | bj
            vj = pos[j]
            for i in range(0, j - 1):
                diff = vj - pos[i]
                gap = np.linalg.norm(diff, axis=1) - np.linalg.norm(step_vecs[i], axis=1)
                fires = gap < 0.0
                sup = potential.interaction_many(diff)
                # the comparison surface: both norms move with the mesh
                near_cmp = np.abs(gap) < (j - i + 1) * reach1
                relevant = near_cmp & ~_outside_support(potential, diff, (j - i) * reach1)
                near_body = _boundary_band(potential, diff, (j - i) * reach1) & fires
                jumpy = relevant | near_body
                mid = mid * np.where(fires, sup, 1.0)
                cap = cap * np.where(jumpy, 1.0, np.where(fires, sup, 1.0))
                straddle = straddle | jumpy
        total += float(np.sum(mid))
        total_jump += float(np.sum(np.where(straddle, cap, 0.0)))
        total_smooth += float(np.sum(np.where(straddle, 0.0, 1.0)))

    value = total * cell ** k
    # smooth cells: k increment factors and up to k(k-1)/2 suppression
    # factors each drift by at most L times the mesh reach
    lip_units = (k + k * (k - 1) / 2.0) * potential.lipschitz * reach1
    bound = total_jump * cell ** k + total_smooth * cell ** k * lip_units
    return ChainBound(k, value, bound, h)


@dataclass(frozen=True)
class ActivityThreshold:
    """Certified activity below which the expansion machinery is safe."""

    value: float
    chain_orders: Tuple[ChainBound, ...]

    @property
    def k_used(self) -> int:
        return len(self.chain_orders)


def certified_lambda_threshold(potential: Potential, k_used: int = 1,
                               mesh_width: Optional[float] = None) -> ActivityThreshold:
    """e over the best certified k-th root of the chain integrals.

    Every computed order gives a valid certificate e / upper^(1/k);
    deeper chains can only improve (raise) the threshold, at rapidly
    growing quadrature cost.  The default sticks to the first order,
    whose integral is the temperedness constant.
    """
    if not (isinstance(k_used, int) and 1 <= k_used <= CHAIN_ORDER_LIMIT):
        raise InputError(f"chain depth must lie in 1..{CHAIN_ORDER_LIMIT}, got {k_used!r}")
    bounds = tuple(connective_bound(potential, k, mesh_width) for k in range(1, k_used + 1))
    for b in bounds:
        if b.upper <= 0:
            raise InputError(
                f"chain integral at order {b.order} has nonpositive upper bound "
                f"{b.upper}; the potential is effectively free and no finite "
                f"threshold applies")
    best = max(math.e / b.upper ** (1.0 / b.order) for b in bounds)
    return ActivityThreshold(best, bounds)
