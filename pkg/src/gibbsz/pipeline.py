"""End-to-end certified approximation of the log partition function.

The route: pick a disk map whose image clears the declared zero-free
neighborhood, decide how many cluster coefficients the Taylor
truncation needs, split the error budget across them, run the mesh
engine at the resulting per-coefficient tolerances, and compose.  The
output carries every stage, so a report can show exactly where the
error budget went.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .cluster import BoxDomain, ClusterCoefficient, cluster_series
from .errors import BudgetInfeasible, CertificationError, InputError
from .interpolation import (DiskMap, TaylorBudget, allocate_budget, bell_transform,
                            compose_and_evaluate, load_preset, taylor_terms_needed)
from .oracle import monte_carlo_ck, tonks_gas_logZ
from .potential import Potential, temperedness_constant

COEFFICIENT_LIMIT = 7


@dataclass(frozen=True)
class ZeroFreeInput:
    """Declared zero-free neighborhood of the activity interval.

    ``clearance`` is the distance (in activity units) from the segment
    [0, activity] within which the partition function is promised not
    to vanish, with |log Z| <= log_bound * volume throughout.  This is
    an input assumption, not something the engine can check; the
    provenance field keeps honest track of where it came from.
    """

    activity: float
    clearance: float
    log_bound: float
    provenance: str = "assumed"

    def __post_init__(self):
        lam = float(self.activity)
        dzf = float(self.clearance)
        cb = float(self.log_bound)
        if not (lam > 0 and math.isfinite(lam)):
            raise InputError(f"activity must be positive and finite, got {lam!r}")
        if not (dzf > 0 and math.isfinite(dzf)):
            raise InputError(f"clearance must be positive and finite, got {dzf!r}")
        if not (cb > 0 and math.isfinite(cb)):
            raise InputError(f"log bound must be positive and finite, got {cb!r}")
        if self.provenance not in ("assumed", "heuristic"):
            raise InputError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "activity", lam)
        object.__setattr__(self, "clearance", dzf)
        object.__setattr__(self, "log_bound", cb)


def heuristic_zero_free(potential: Potential, activity: float) -> ZeroFreeInput:
    """Convenience guess at a zero-free neighborhood; clearly flagged.

    Ten percent of the activity for the clearance and a crude
    interaction-strength bound for the log.  There is no theorem behind
    these numbers: anything computed from them inherits the guess.
    """
    lam = float(activity)
    if not (lam > 0 and math.isfinite(lam)):
        raise InputError(f"activity must be positive and finite, got {lam!r}")
    c_phi = temperedness_constant(potential).value
    return ZeroFreeInput(lam, 0.1 * lam, max(1.0, lam * (1.0 + c_phi)), "heuristic")


@dataclass(frozen=True)
class LogZResult:
    """Certified per-volume log partition value with its full ledger.

    ``value`` approximates log Z / volume; the additive guarantee is
    |value - truth| * volume <= eps, provided the declared zero-free
    input holds.  No wall-clock data lives here: two runs with the same
    inputs produce identical objects.
    """

    value: float
    eps: float
    error_total: float
    activity: float
    dimension: int
    box_n: int
    volume: float
    zero_free: ZeroFreeInput
    map_gamma: float
    map_rho: float
    map_degree: int
    map_anchor: float
    taylor_terms: int
    num_coefficients: int
    mode: str
    coefficients: Tuple[ClusterCoefficient, ...]
    coefficient_targets: Tuple[float, ...]
    truncation_error: float
    propagation_error: float
    rounding_error: float

    @property
    def error_per_volume(self) -> float:
        return self.error_total / self.volume

    @property
    def log_z_total(self) -> float:
        return self.value * self.volume


def approximate_logZ(potential: Potential, box: BoxDomain, activity: float,
                     eps: float, zero_free: Optional[ZeroFreeInput] = None,
                     mode: str = "adaptive", threads: int = 1, cache=None,
                     max_points: Optional[float] = None,
                     k_max: Optional[int] = None) -> LogZResult:
    """Approximate log Z / volume within eps / volume, certified.

    Seven stages: validate, map the zero-free clearance to a packaged
    disk map, size the Taylor truncation, allocate the error budget,
    compute the cluster coefficients on the structured mesh, compose
    through the map, and assemble the ledger.  Refusals are loud and
    carry a suggestion; nothing is silently weakened.

    ``k_max`` pins the number of coefficients instead of letting the
    truncation analysis choose; a small pin makes the reported error
    exceed eps (honestly), a large one just costs more mesh time.
    """
    lam = float(activity)
    eps = float(eps)
    if not (lam > 0 and math.isfinite(lam)):
        raise InputError(f"activity must be positive and finite, got {lam!r}")
    if not (0 < eps < 1):
        raise InputError(f"tolerance must lie in (0, 1), got {eps!r}")
    if potential.dimension != box.dimension:
        raise InputError("potential and box dimensions differ")
    if zero_free is None:
        zero_free = heuristic_zero_free(potential, lam)
    if abs(zero_free.activity - lam) > 1e-12 * max(1.0, lam):
        raise InputError("zero-free declaration is for a different activity")

    gamma = zero_free.clearance / lam
    try:
        disk_map = load_preset(gamma)
    except InputError as e:
        raise BudgetInfeasible(
            f"no packaged disk map fits the declared clearance (gamma = "
            f"{gamma:.4f}): {e}; declare a larger clearance or certify a "
            f"custom map for this region") from e

    volume = box.volume
    eps_prime = eps / (zero_free.log_bound * volume)
    anchor = disk_map.anchor
    k_terms = taylor_terms_needed(anchor, 0.5 * eps_prime)
    m = k_terms - 1
    if m < 1:
        m = 1
    if k_max is not None:
        if not (isinstance(k_max, int) and 1 <= k_max <= COEFFICIENT_LIMIT):
            raise InputError(
                f"coefficient override must lie in 1..{COEFFICIENT_LIMIT}, "
                f"got {k_max!r}")
        m = k_max
    if m > COEFFICIENT_LIMIT:
        raise BudgetInfeasible(
            f"the truncation needs {m} cluster coefficients (limit "
            f"{COEFFICIENT_LIMIT}): the map anchor {anchor:.4f} is too close "
            f"to 1 for eps = {eps}; declare a larger clearance, a larger "
            f"tolerance, or a smaller box")

    transform = bell_transform(disk_map, m)
    budget = allocate_budget(eps_prime, transform, anchor, lam,
                             zero_free.log_bound, m)

    kwargs = {} if max_points is None else {"max_points": max_points}
    series = cluster_series(potential, box, m, budget.cluster_targets, mode,
                            threads=threads, cache=cache, **kwargs)

    f_coeffs = []
    f_errors = []
    for i, coeff in enumerate(series, start=1):
        scale = lam ** i / (math.factorial(i) * zero_free.log_bound)
        f_coeffs.append(scale * coeff.value)
        f_errors.append(scale * coeff.error_bound)
        if coeff.error_bound > budget.cluster_targets[i - 1] * (1 + 1e-9):
            raise CertificationError(
                f"coefficient {i} reported bound {coeff.error_bound:.3e} "
                f"above its target {budget.cluster_targets[i - 1]:.3e}; "
                f"refusing to compose an uncertified value")

    composed = compose_and_evaluate(f_coeffs, transform, anchor, f_errors)
    scale_back = zero_free.log_bound
    return LogZResult(
        value=scale_back * composed.value,
        eps=eps,
        error_total=scale_back * volume * composed.total_error,
        activity=lam,
        dimension=box.dimension,
        box_n=box.n,
        volume=volume,
        zero_free=zero_free,
        map_gamma=disk_map.gamma,
        map_rho=disk_map.rho,
        map_degree=disk_map.degree,
        map_anchor=anchor,
        taylor_terms=k_terms,
        num_coefficients=m,
        mode=mode,
        coefficients=tuple(series),
        coefficient_targets=budget.cluster_targets,
        truncation_error=scale_back * volume * composed.truncation_bound,
        propagation_error=scale_back * volume * composed.propagation_bound,
        rounding_error=scale_back * volume * composed.rounding_bound,
    )


@dataclass(frozen=True)
class VerificationEntry:
    name: str
    engine_value: float
    reference_value: float
    allowed: float
    passed: bool

    @property
    def deviation(self) -> float:
        return abs(self.engine_value - self.reference_value)


@dataclass(frozen=True)
class VerificationReport:
    entries: Tuple[VerificationEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


def verify_run(potential: Potential, box: BoxDomain, result: LogZResult,
               mc_samples: int = 200_000, mc_seed: int = 20260815,
               corrupt: Optional[Tuple[int, float]] = None) -> VerificationReport:
    """Cross-check a finished run against the independent oracles.

    Hard rods in one dimension get the exact closed form; every
    low-order coefficient gets a seeded Monte Carlo comparison at three
    standard errors plus the certified bound.  ``corrupt`` shifts one
    reported coefficient by a given amount before checking, which is
    how the tests prove this harness actually catches wrong numbers.
    """
    entries = []
    coeff_values = {c.k: c.value for c in result.coefficients}
    coeff_bounds = {c.k: c.error_bound for c in result.coefficients}
    if corrupt is not None:
        k_bad, shift = corrupt
        if k_bad in coeff_values:
            coeff_values[k_bad] += shift

    if potential.dimension == 1 and potential.kind == "hard-core":
        ref = tonks_gas_logZ(2.0 * box.n, potential.params[0], result.activity)
        ref_per_vol = ref / result.volume
        value = result.value
        if corrupt is not None and corrupt[0] in coeff_values:
            # recompose the corrupted series the cheap way: the shift
            # enters the final value linearly through its budget row
            value = _recompose(result, coeff_values)
        entries.append(VerificationEntry(
            "tonks-closed-form", value, ref_per_vol,
            result.eps / result.volume, abs(value - ref_per_vol) <= result.eps / result.volume))

    for c in result.coefficients:
        if c.k < 2 or c.k > 4:
            continue
        mc = monte_carlo_ck(potential, box, c.k, mc_samples, mc_seed + c.k)
        # certified figures are rigorous bounds; adaptive figures are
        # same-order estimates (successive-halving differences), so the
        # allowance inflates them before calling a mismatch an alarm
        inflation = 1.0 if c.mode == "certified" else 3.0
        allowed = inflation * coeff_bounds[c.k] + 3.0 * mc.standard_error
        dev = abs(coeff_values[c.k] - mc.value)
        entries.append(VerificationEntry(
            f"monte-carlo-c{c.k}", coeff_values[c.k], mc.value, allowed, dev <= allowed))

    return VerificationReport(tuple(entries))


def _recompose(result: LogZResult, coeff_values) -> float:
    """Re-run the composition with replaced coefficient values."""
    disk_map = load_preset(result.map_gamma)
    transform = bell_transform(disk_map, result.num_coefficients)
    lam = result.activity
    cb = result.zero_free.log_bound
    f = [lam ** i / (math.factorial(i) * cb) * coeff_values[i]
         for i in range(1, result.num_coefficients + 1)]
    composed = compose_and_evaluate(f, transform, result.map_anchor)
    return cb * composed.value
