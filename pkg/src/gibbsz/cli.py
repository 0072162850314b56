"""Command line front end.

One process, one verb, one JSON document out.  Everything a run needs
arrives through ``--config``; the handful of flags only select the verb
and override execution knobs (threads, seed, mode).  Output files are
written atomically and contain no wall-clock data, so identical
configs produce bit-identical files regardless of thread count.
Measured stage times go to stderr instead.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from typing import Optional

from .cache import CoefficientCache
from .cluster import BoxDomain, cluster_series
from .errors import InputError, Refusal
from .interpolation import build_disk_map, load_preset
from .oracle import certified_lambda_threshold
from .pipeline import (ZeroFreeInput, approximate_logZ, heuristic_zero_free,
                       verify_run)
from .potential import ConvexBody, Potential, free_potential, hard_core, shell_steps

CONFIG_SCHEMA = "gibbsz-config/1"
RUN_SCHEMA = "gibbsz-run/1"
COEFFS_SCHEMA = "gibbsz-coefficients/1"
MAP_SCHEMA = "gibbsz-certify-map/1"
THRESHOLD_SCHEMA = "gibbsz-threshold/1"

_BODY_KINDS = {"euclidean-ball": "ball", "axis-box": "box"}


def potential_from_spec(doc) -> Potential:
    """Build a potential from its JSON description.

    Kinds: ``hard-sphere`` (dimension, radius), ``free`` (dimension),
    ``shell-steps`` (dimension, shells as [{kind, size}, ...] with kind
    euclidean-ball or axis-box, values, optional outer_halfwidth).
    """
    if not isinstance(doc, dict):
        raise InputError("potential spec must be a JSON object")
    kind = doc.get("kind")
    if kind == "hard-sphere":
        return hard_core(_as_dim(doc), _as_pos(doc, "radius"))
    if kind == "free":
        return free_potential(_as_dim(doc))
    if kind == "shell-steps":
        shells = doc.get("shells")
        values = doc.get("values")
        if not isinstance(shells, list) or not shells:
            raise InputError("shell-steps needs a non-empty 'shells' list")
        if not isinstance(values, list):
            raise InputError("shell-steps needs a 'values' list")
        bodies = []
        for i, s in enumerate(shells):
            bkind = _BODY_KINDS.get(s.get("kind"))
            if bkind is None:
                raise InputError(
                    f"shell {i}: body kind must be one of {sorted(_BODY_KINDS)}, "
                    f"got {s.get('kind')!r}")
            bodies.append(ConvexBody(bkind, float(s.get("size", math.nan))))
        outer = doc.get("outer_halfwidth")
        return shell_steps(_as_dim(doc), bodies, [float(v) for v in values],
                           None if outer is None else float(outer))
    raise InputError(f"unknown potential kind {kind!r} "
                     f"(expected hard-sphere, free, or shell-steps)")


def _as_dim(doc) -> int:
    d = doc.get("dimension")
    if not (isinstance(d, int) and d >= 1):
        raise InputError(f"dimension must be a positive integer, got {d!r}")
    return d


def _as_pos(doc, field: str) -> float:
    v = doc.get(field)
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise InputError(f"{field} must be positive and finite, got {v!r}")
    return float(v)


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise InputError("config must be a JSON object")
    if doc.get("schema") != CONFIG_SCHEMA:
        raise InputError(
            f"config schema must be {CONFIG_SCHEMA!r}, got {doc.get('schema')!r}")
    return doc


def _write_doc(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".out-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _resolve_activity(cfg: dict, potential: Potential) -> tuple:
    """Exactly one of activity / threshold_fraction; returns (lam, info)."""
    has_act = "activity" in cfg
    has_frac = "threshold_fraction" in cfg
    if has_act == has_frac:
        raise InputError(
            "config must set exactly one of 'activity' and 'threshold_fraction'")
    if has_act:
        return _as_pos(cfg, "activity"), None
    frac = _as_pos(cfg, "threshold_fraction")
    if frac >= 1.0:
        raise InputError(
            f"threshold_fraction must lie below 1, got {frac}")
    thr = certified_lambda_threshold(potential)
    info = {"certified_threshold": thr.value, "fraction": frac,
            "k_used": thr.k_used}
    return frac * thr.value, info


def _zero_free_from_config(cfg: dict, potential: Potential, lam: float) -> ZeroFreeInput:
    zf = cfg.get("zero_free", "threshold-derived")
    if zf == "threshold-derived":
        return heuristic_zero_free(potential, lam)
    if not isinstance(zf, dict):
        raise InputError(
            "zero_free must be an object with clearance and log_bound, "
            "or the string 'threshold-derived'")
    return ZeroFreeInput(lam, _as_pos(zf, "clearance"), _as_pos(zf, "log_bound"),
                         "assumed")


def _coefficient_rows(series) -> list:
    return [{"order": c.k, "value": c.value, "error_bound": c.error_bound,
             "mesh_width": c.delta_used, "mode": c.mode,
             "points": c.point_count} for c in series]


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    potential = potential_from_spec(cfg.get("potential"))
    n = cfg.get("box_n")
    if not (isinstance(n, int) and n >= 1):
        raise InputError(f"box_n must be a positive integer, got {n!r}")
    box = BoxDomain(n, potential.dimension)
    lam, thr_info = _resolve_activity(cfg, potential)
    eps = _as_pos(cfg, "eps")
    mode = args.mode or cfg.get("mode", "adaptive")
    threads = args.threads if args.threads is not None else int(cfg.get("threads", 1))
    if threads < 1:
        raise InputError(f"thread count must be positive, got {threads}")
    zero_free = _zero_free_from_config(cfg, potential, lam)
    k_max = cfg.get("k_max")
    cache = CoefficientCache(cfg["cache_path"]) if cfg.get("cache_path") else None

    t0 = time.monotonic()
    result = approximate_logZ(potential, box, lam, eps, zero_free, mode,
                              threads=threads, cache=cache, k_max=k_max)
    t_main = time.monotonic() - t0

    verification = None
    t_verify = 0.0
    if cfg.get("verify", False):
        t0 = time.monotonic()
        report = verify_run(potential, box, result,
                            mc_samples=int(cfg.get("mc_samples", 200_000)),
                            mc_seed=args.seed)
        t_verify = time.monotonic() - t0
        verification = {
            "passed": report.passed,
            "entries": [{"name": e.name, "engine_value": e.engine_value,
                         "reference_value": e.reference_value,
                         "allowed": e.allowed, "deviation": e.deviation,
                         "passed": e.passed} for e in report.entries],
        }

    doc = {
        "schema": RUN_SCHEMA,
        "config": cfg,
        "activity": result.activity,
        "threshold": thr_info,
        "result": {
            "log_z_per_volume": result.value,
            "log_z_total": result.log_z_total,
            "eps_requested": result.eps,
            "error_total": result.error_total,
            "error_per_volume": result.error_per_volume,
            "truncation_error": result.truncation_error,
            "propagation_error": result.propagation_error,
            "rounding_error": result.rounding_error,
            "volume": result.volume,
            "dimension": result.dimension,
            "box_n": result.box_n,
            "mode": result.mode,
            "zero_free": {
                "activity": result.zero_free.activity,
                "clearance": result.zero_free.clearance,
                "log_bound": result.zero_free.log_bound,
                "provenance": result.zero_free.provenance,
            },
            "disk_map": {
                "gamma": result.map_gamma,
                "rho": result.map_rho,
                "degree": result.map_degree,
                "anchor": result.map_anchor,
            },
            "taylor_terms": result.taylor_terms,
            "num_coefficients": result.num_coefficients,
            "coefficients": _coefficient_rows(result.coefficients),
            "coefficient_targets": list(result.coefficient_targets),
        },
        "verification": verification,
    }
    _write_doc(doc, args.out)
    if args.out is not None and cfg.get("report", False):
        from .report import write_report
        for path in write_report(result, args.out):
            print(f"report: {path}", file=sys.stderr)
    print(f"run: compute {t_main:.2f}s, verification {t_verify:.2f}s "
          f"(timings are stderr-only to keep output files deterministic)",
          file=sys.stderr)
    return 0


def _cmd_coefficients(args) -> int:
    cfg = _load_config(args.config)
    potential = potential_from_spec(cfg.get("potential"))
    n = cfg.get("box_n")
    if not (isinstance(n, int) and n >= 1):
        raise InputError(f"box_n must be a positive integer, got {n!r}")
    box = BoxDomain(n, potential.dimension)
    k_max = cfg.get("k_max")
    if not (isinstance(k_max, int) and k_max >= 1):
        raise InputError(f"k_max must be a positive integer, got {k_max!r}")
    if "targets" in cfg:
        targets = [float(t) for t in cfg["targets"]]
        if len(targets) != k_max:
            raise InputError(f"targets must list exactly k_max={k_max} values")
    else:
        targets = [_as_pos(cfg, "target")] * k_max
    mode = args.mode or cfg.get("mode", "certified")
    threads = args.threads if args.threads is not None else int(cfg.get("threads", 1))
    cache = CoefficientCache(cfg["cache_path"]) if cfg.get("cache_path") else None

    t0 = time.monotonic()
    series = cluster_series(potential, box, k_max, targets, mode,
                            threads=threads, cache=cache)
    dt = time.monotonic() - t0
    doc = {
        "schema": COEFFS_SCHEMA,
        "config": cfg,
        "coefficients": _coefficient_rows(series),
    }
    _write_doc(doc, args.out)
    print(f"coefficients: {dt:.2f}s", file=sys.stderr)
    return 0


def _cmd_certify_map(args) -> int:
    cfg = _load_config(args.config)
    gamma = _as_pos(cfg, "gamma")
    samples = int(cfg.get("samples", 1 << 16))
    if {"rho", "beta_anchor", "degree"} <= cfg.keys():
        dm = build_disk_map(gamma, _as_pos(cfg, "rho"),
                            _as_pos(cfg, "beta_anchor"), int(cfg["degree"]),
                            samples=samples)
    else:
        dm = load_preset(gamma, samples=samples)
    anchor_defect = abs(dm.evaluate(dm.anchor) - 1.0)
    doc = {
        "schema": MAP_SCHEMA,
        "config": cfg,
        "map": {
            "gamma": dm.gamma,
            "rho": dm.rho,
            "degree": dm.degree,
            "anchor": dm.anchor,
            "origin_value": abs(dm.evaluate(0.0)),
            "anchor_defect": anchor_defect,
            "certified_distance": dm.certified_distance,
            "certified_slack": dm.certified_slack,
            "samples": dm.samples,
            "coefficients": list(dm.coefficients),
        },
    }
    _write_doc(doc, args.out)
    return 0


def _cmd_threshold(args) -> int:
    cfg = _load_config(args.config)
    potential = potential_from_spec(cfg.get("potential"))
    k_used = cfg.get("k_used", 1)
    if not (isinstance(k_used, int) and k_used >= 1):
        raise InputError(f"k_used must be a positive integer, got {k_used!r}")
    mw = cfg.get("mesh_width")
    thr = certified_lambda_threshold(potential, k_used=k_used,
                                     mesh_width=None if mw is None else float(mw))
    doc = {
        "schema": THRESHOLD_SCHEMA,
        "config": cfg,
        "threshold": {
            "value": thr.value,
            "k_used": thr.k_used,
            "chain_bounds": [{"order": c.order, "value": c.value,
                              "bound": c.bound, "upper": c.upper,
                              "mesh_width": c.mesh_width}
                             for c in thr.chain_orders],
        },
    }
    _write_doc(doc, args.out)
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gibbsz",
        description="Certified cluster-expansion approximation of log "
                    "partition functions for repulsive point processes.")
    sub = ap.add_subparsers(dest="verb", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON config path")
    common.add_argument("--out", default=None,
                        help="output JSON path (stdout when omitted)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (overrides config)")
    common.add_argument("--seed", type=int, default=20260815,
                        help="seed for oracle Monte Carlo sampling")
    common.add_argument("--mode", choices=("certified", "adaptive"),
                        default=None, help="error-control mode (overrides config)")
    sub.add_parser("run", parents=[common],
                   help="full approximation with optional verification")
    sub.add_parser("coefficients", parents=[common],
                   help="cluster coefficients only")
    sub.add_parser("certify-map", parents=[common],
                   help="certify a disk map for a given clearance")
    sub.add_parser("threshold", parents=[common],
                   help="certified activity threshold for a potential")
    return ap


_DISPATCH = {
    "run": _cmd_run,
    "coefficients": _cmd_coefficients,
    "certify-map": _cmd_certify_map,
    "threshold": _cmd_threshold,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _DISPATCH[args.verb](args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Refusal as e:
        print(f"refused: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
