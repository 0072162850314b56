"""Repulsive pair potentials and the nested-body regularity data.

A potential here is a nonnegative pair interaction phi on R^d together
with a chain of origin-symmetric convex bodies K_1 c= ... c= K_l and two
constants: an outer half-width R with supp(phi) c= K_l c= [-R, R]^d and
[-1/R, 1/R]^d c= K_1, and a Lipschitz bound L for the interaction factor
exp(-phi) on each difference shell K_j minus K_{j-1} (K_0 is the origin).
All downstream error certificates are stated in terms of (d, R, L) and
the shell chain, never the potential itself.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InputError

_REL_TOL = 1e-12


@dataclass(frozen=True)
class ConvexBody:
    """Origin-symmetric convex body: a euclidean ball or an axis cube.

    ``size`` is the radius for kind ``"ball"`` and the half-width for
    kind ``"box"``.  Membership is closed (boundary points belong).
    """

    kind: str
    size: float

    def __post_init__(self):
        if self.kind not in ("ball", "box"):
            raise InputError(f"unknown body kind {self.kind!r}")
        if not (isinstance(self.size, (int, float)) and math.isfinite(self.size) and self.size > 0):
            raise InputError(f"body size must be finite and positive, got {self.size!r}")
        object.__setattr__(self, "size", float(self.size))

    def contains(self, x) -> bool:
        v = np.asarray(x, dtype=np.float64)
        if self.kind == "ball":
            return bool(math.sqrt(float(np.dot(v, v))) <= self.size)
        return bool(np.max(np.abs(v)) <= self.size)

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        """Closed membership for an (m, d) array of points."""
        pts = np.asarray(pts, dtype=np.float64)
        if self.kind == "ball":
            return np.einsum("ij,ij->i", pts, pts) <= self.size * self.size
        return np.max(np.abs(pts), axis=1) <= self.size

    def scaled(self, factor: float) -> "ConvexBody":
        # balls and cubes are closed under dilation, so a scaled copy
        # resolves to a plain body instead of a wrapper
        if not (math.isfinite(factor) and factor > 0):
            raise InputError(f"scale factor must be finite and positive, got {factor!r}")
        return ConvexBody(self.kind, self.size * factor)

    def bounding_halfwidth(self) -> float:
        # smallest h with the body inside [-h, h]^d; same as size for
        # both kinds
        return self.size

    def inner_box_halfwidth(self, dimension: int) -> float:
        """Largest h such that [-h, h]^dimension fits inside the body."""
        if self.kind == "ball":
            return self.size / math.sqrt(dimension)
        return self.size


def body_subset(inner: ConvexBody, outer: ConvexBody, dimension: int) -> bool:
    """Whether ``inner`` is contained in ``outer`` (closed bodies)."""
    tol = _REL_TOL * max(inner.size, outer.size)
    if inner.kind == "box" and outer.kind == "ball":
        return inner.size * math.sqrt(dimension) <= outer.size + tol
    if inner.kind == "ball" and outer.kind == "box":
        return inner.size <= outer.size + tol
    return inner.size <= outer.size + tol


@dataclass(frozen=True)
class ShellDecomposition:
    """Nested chain K_1 c= ... c= K_l with an outer half-width R.

    Shell j is the difference K_j \\ K_{j-1}; the zeroth body is the
    origin alone, so shell 1 is K_1 minus the origin.  ``lipschitz``
    bounds the variation of exp(-phi) on each shell; it is part of the
    input contract, not something the code verifies for custom
    callables.
    """

    dimension: int
    bodies: tuple
    outer_halfwidth: float
    lipschitz: float = 0.0

    def __post_init__(self):
        d = self.dimension
        if not (isinstance(d, int) and d >= 1):
            raise InputError(f"dimension must be a positive integer, got {d!r}")
        bodies = tuple(self.bodies)
        if not bodies:
            raise InputError("shell structure needs at least one body")
        for b in bodies:
            if not isinstance(b, ConvexBody):
                raise InputError("shell bodies must be ConvexBody instances")
        object.__setattr__(self, "bodies", bodies)
        R = float(self.outer_halfwidth)
        if not (math.isfinite(R) and R > 0):
            raise InputError("outer half-width must be finite and positive")
        object.__setattr__(self, "outer_halfwidth", R)
        for a, b in zip(bodies, bodies[1:]):
            if not body_subset(a, b, d):
                raise InputError("shell bodies must be nested inner-to-outer")
        if bodies[-1].bounding_halfwidth() > R * (1 + _REL_TOL):
            raise InputError("outermost body exceeds the declared half-width box")
        if bodies[0].inner_box_halfwidth(d) < (1.0 / R) * (1 - _REL_TOL):
            raise InputError("innermost body does not contain the reciprocal box")
        L = float(self.lipschitz)
        if not (math.isfinite(L) and L >= 0):
            raise InputError("lipschitz bound must be finite and nonnegative")
        object.__setattr__(self, "lipschitz", L)

    @property
    def num_shells(self) -> int:
        return len(self.bodies)

    def shell_index(self, x) -> Optional[int]:
        """Index j of the shell containing x.

        Returns 1..l for the difference shells (boundary points resolve
        to the smaller index because membership is closed) and None both
        outside the outermost body and at the origin, which belongs to
        no shell.
        """
        v = np.asarray(x, dtype=np.float64)
        if not np.any(v):
            return None
        for j, body in enumerate(self.bodies, start=1):
            if body.contains(v):
                return j
        return None

    def shell_index_many(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized shell_index; -1 encodes "outside", 0 the origin."""
        pts = np.asarray(pts, dtype=np.float64)
        idx = np.full(pts.shape[0], -1, dtype=np.int64)
        for j in range(len(self.bodies), 0, -1):
            idx[self.bodies[j - 1].contains_many(pts)] = j
        idx[~np.any(pts, axis=1)] = 0
        return idx

    def shrunk_shell_mask(self, j: int, pts: np.ndarray, gamma: float) -> np.ndarray:
        """Membership in the two-sided shrinkage of shell j.

        That is (1-gamma) K_j minus (1+gamma) K_{j-1}, with the inner
        body of shell 1 being the origin point.  Requires gamma < 1.
        """
        if not 1 <= j <= len(self.bodies):
            raise InputError(f"shell index {j} out of range")
        if not 0 <= gamma <= 1:
            raise InputError(f"shrinkage must lie in [0, 1], got {gamma!r}")
        pts = np.asarray(pts, dtype=np.float64)
        if gamma == 1:
            # the shrunken body degenerates to the origin point
            inside = ~np.any(pts, axis=1)
        else:
            inside = self.bodies[j - 1].scaled(1 - gamma).contains_many(pts)
        if j == 1:
            inside &= np.any(pts, axis=1)
        else:
            inside &= ~self.bodies[j - 2].scaled(1 + gamma).contains_many(pts)
        return inside

    def in_gamma_shell(self, j: int, gamma: float, x) -> bool:
        """Whether the single point x lies in the shrunken shell j.

        The shrinkage parameter is capped at 1/d: beyond that the
        stability margin the shrinkage is meant to provide no longer
        holds, so larger values are rejected rather than silently
        accepted.
        """
        if not 0 <= gamma <= 1.0 / self.dimension:
            raise InputError(
                f"shrinkage must lie in [0, 1/{self.dimension}], got {gamma!r}")
        pt = np.asarray(x, dtype=np.float64).reshape(1, -1)
        if pt.shape[1] != self.dimension:
            raise InputError(f"point has dimension {pt.shape[1]}, expected {self.dimension}")
        return bool(self.shrunk_shell_mask(j, pt, gamma)[0])


@dataclass(frozen=True)
class Potential:
    """Pair potential bundled with its shell decomposition."""

    shells: ShellDecomposition
    kind: str
    params: tuple = ()
    phi_fn: Optional[Callable] = field(default=None, compare=False)
    phi_many_fn: Optional[Callable] = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("hard-core", "zero", "shell-steps", "custom"):
            raise InputError(f"unknown potential kind {self.kind!r}")
        if self.kind == "custom" and self.phi_fn is None:
            raise InputError("custom potentials need a phi callable")
        if self.kind == "custom" and not self.label:
            raise InputError("custom potentials need a label (used in cache keys)")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @property
    def dimension(self) -> int:
        return self.shells.dimension

    @property
    def lipschitz(self) -> float:
        return self.shells.lipschitz

    @property
    def support_halfwidth(self) -> float:
        return self.shells.outer_halfwidth

    def evaluate(self, x) -> float:
        """phi(x), nonnegative, possibly +inf."""
        v = np.asarray(x, dtype=np.float64)
        if self.kind == "hard-core":
            r = self.params[0]
            return math.inf if float(np.dot(v, v)) < r * r else 0.0
        if self.kind == "zero":
            return 0.0
        if self.kind == "shell-steps":
            if not np.any(v):
                return self.params[0]
            j = self.shells.shell_index(v)
            if j is None:
                return 0.0
            return self.params[j - 1]
        return float(self.phi_fn(v))

    def interaction(self, x) -> float:
        """exp(-phi(x)), in [0, 1]."""
        return math.exp(-self.evaluate(x))

    def mayer(self, x) -> float:
        return math.expm1(-self.evaluate(x))

    def interaction_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        if self.kind == "hard-core":
            r = self.params[0]
            out = np.ones(pts.shape[0])
            out[np.einsum("ij,ij->i", pts, pts) < r * r] = 0.0
            return out
        if self.kind == "zero":
            return np.ones(pts.shape[0])
        if self.kind == "shell-steps":
            idx = self.shells.shell_index_many(pts)
            vals = np.ones(pts.shape[0])
            levels = np.exp(-np.asarray(self.params))
            sel = idx >= 1
            vals[sel] = levels[idx[sel] - 1]
            vals[idx == 0] = levels[0]
            return vals
        if self.phi_many_fn is not None:
            return np.exp(-np.asarray(self.phi_many_fn(pts), dtype=np.float64))
        return np.array([self.interaction(p) for p in pts])

    def mayer_many(self, pts: np.ndarray) -> np.ndarray:
        return self.interaction_many(pts) - 1.0

    def energy(self, points: np.ndarray) -> float:
        """Total pair energy of a configuration: sum of phi over pairs.

        Returns +inf as soon as any pair overlaps a hard core.
        """
        points = np.asarray(points, dtype=np.float64)
        k = points.shape[0]
        total = 0.0
        for i in range(k):
            for diff in points[i + 1:] - points[i]:
                e = self.evaluate(diff)
                if e == math.inf:
                    return math.inf
                total += e
        return total

    def total_interaction(self, points: np.ndarray) -> float:
        """Product of exp(-phi) over all pairs of a configuration."""
        points = np.asarray(points, dtype=np.float64)
        k = points.shape[0]
        out = 1.0
        for i in range(k):
            diffs = points[i + 1:] - points[i]
            if diffs.size:
                out *= float(np.prod(self.interaction_many(diffs)))
        return out

    def key(self) -> str:
        """Stable content key used for coefficient caching."""
        h = hashlib.sha256()
        parts = [self.kind, self.label, str(self.dimension),
                 self.lipschitz.hex(), self.shells.outer_halfwidth.hex()]
        parts += [f"{b.kind}:{b.size.hex()}" for b in self.shells.bodies]
        parts += [p.hex() for p in self.params]
        h.update("|".join(parts).encode())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class TemperednessEstimate:
    value: float
    bound: float
    mesh_width: float


def temperedness_constant(potential: Potential, mesh_width: Optional[float] = None) -> TemperednessEstimate:
    """Integral of |exp(-phi) - 1| over R^d, with a certified error bound.

    Midpoint rule on a grid covering the outermost body.  Cells whose
    circumball could cross a body boundary (where the integrand may
    jump) are charged their full volume to the bound; the rest are
    charged the Lipschitz midpoint error.  The grid is anchored at the
    body's bounding box and uses an even cell count per axis, so the
    origin (where the shell chain's regularity does not apply) falls on
    a cell corner rather than in a cell interior, and cores aligned
    with the grid come out exact.
    """
    d = potential.dimension
    shells = potential.shells
    half = shells.bodies[-1].bounding_halfwidth()
    big = shells.outer_halfwidth / 10.0
    if mesh_width is None:
        per_dim = max(4, int(round((2 ** 22) ** (1.0 / d))) & ~1)
        mesh_width = min(big, 2.0 * half / per_dim)
    if not (0 < mesh_width <= big * (1 + _REL_TOL)):
        raise InputError(
            f"mesh width must lie in (0, R/10] = (0, {big!r}], got {mesh_width!r}")
    n_cells = max(2, 2 * math.ceil(half / mesh_width))
    h = 2.0 * half / n_cells
    axis = -half + (np.arange(n_cells) + 0.5) * h
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    centers = np.stack([g.ravel() for g in grids], axis=1)
    vol = h ** d
    reach = math.sqrt(d) * h / 2.0

    straddle = np.zeros(centers.shape[0], dtype=bool)
    for body in shells.bodies:
        if body.kind == "ball":
            dist = np.abs(np.sqrt(np.einsum("ij,ij->i", centers, centers)) - body.size)
        else:
            dist = np.abs(np.max(np.abs(centers), axis=1) - body.size)
        straddle |= dist < reach

    absmayer = np.abs(potential.mayer_many(centers))
    value = float(np.sum(absmayer) * vol)
    n_straddle = int(np.count_nonzero(straddle))
    smooth = centers.shape[0] - n_straddle
    bound = n_straddle * vol + smooth * vol * potential.lipschitz * reach
    return TemperednessEstimate(value, bound, h)


def hard_core(dimension: int, radius: float) -> Potential:
    """Hard-core exclusion: phi = +inf strictly inside the ball of the
    given radius, 0 at distance >= radius."""
    r = float(radius)
    if not (math.isfinite(r) and r > 0):
        raise InputError("hard-core radius must be finite and positive")
    R = max(r, math.sqrt(dimension) / r)
    shells = ShellDecomposition(dimension, (ConvexBody("ball", r),), R, 0.0)
    return Potential(shells, "hard-core", (r,))


def free_potential(dimension: int) -> Potential:
    """phi identically zero (no interaction)."""
    rd = math.sqrt(dimension)
    shells = ShellDecomposition(dimension, (ConvexBody("ball", rd),), rd, 0.0)
    return Potential(shells, "zero")


def shell_steps(dimension: int, bodies, values, outer_halfwidth: Optional[float] = None) -> Potential:
    """Step potential: a constant nonnegative value on each shell."""
    bodies = tuple(bodies)
    values = tuple(float(v) for v in values)
    if len(values) != len(bodies):
        raise InputError("need one value per shell")
    for v in values:
        if not (math.isfinite(v) and v >= 0):
            raise InputError("shell values must be finite and nonnegative")
    if outer_halfwidth is None:
        outer_halfwidth = max(bodies[-1].bounding_halfwidth(),
                              1.0 / bodies[0].inner_box_halfwidth(dimension))
    shells = ShellDecomposition(dimension, bodies, outer_halfwidth, 0.0)
    return Potential(shells, "shell-steps", values)


def custom_potential(dimension: int, bodies, outer_halfwidth: float, lipschitz: float,
                     phi: Callable, label: str, phi_many: Optional[Callable] = None) -> Potential:
    shells = ShellDecomposition(dimension, tuple(bodies), outer_halfwidth, lipschitz)
    return Potential(shells, "custom", (), phi, phi_many, label)
