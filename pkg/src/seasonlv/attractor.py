"""Long-run orbit analysis, carrying-simplex point clouds and data export."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fixedpoints import (FixedPointRecord, _newton, barycentric_mesh, evaluate_fixed_point,
                          simplex_guess)
from .flow import DEFAULT_CONFIG, IntegratorConfig, orbit_points
from .model import ModelParams, state_vec

DEFAULT_TRANSIENT = 2000
DEFAULT_WINDOW = 4000
MIN_TAIL = 2000

# closed-curve thresholds
CURVE_BINS = 360
CURVE_SPREAD = 0.05
CURVE_GAP_DEG = 10.0
CURVE_MIN_DIAMETER = 1e-3

FP_STEP_TOL = 1e-8
FP_MATCH_TOL = 1e-6


@dataclass
class OrbitTrace:
    initial: np.ndarray
    points: np.ndarray
    transient_len: int
    total_len: int

    def to_csv(self, path, start: int | None = None):
        """Write ``k,x1,x2,x3`` rows; ``k`` counts applications of the map."""
        k0 = self.transient_len + 1 if start is None else start
        write_rows(path, ["k", "x1", "x2", "x3"],
                   ([k0 + n, *x] for n, x in enumerate(self.points)))


def iterate(params: ModelParams, x0, n: int, transient: int = 0,
            config: IntegratorConfig = DEFAULT_CONFIG) -> OrbitTrace:
    """Points ``P^(transient+1)(x0), ..., P^(transient+n)(x0)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    x0 = state_vec(x0)
    pts = orbit_points(params, x0, n, skip=transient, config=config)
    return OrbitTrace(x0, pts, int(transient), int(transient) + int(n))


@dataclass
class LimitSetReport:
    verdict: str
    target: np.ndarray | None = None
    curve_stats: dict | None = None
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "target": None if self.target is None else self.target.tolist(),
            "curve_stats": self.curve_stats,
            "evidence": self.evidence,
        }


def curve_statistics(points: np.ndarray, bins: int = CURVE_BINS) -> dict:
    """Geometry of a point set seen as a candidate closed curve.

    Points are projected onto their best-fit plane, the two in-plane axes
    are rescaled to equal variance (so elongated curves look round), and
    polar angles about the centroid are binned.  ``radial_spread`` is the
    largest within-bin radius range divided by the mean radius.
    """
    pts = np.asarray(points, dtype=float)
    X = pts - pts.mean(axis=0)
    _, s, vt = np.linalg.svd(X, full_matrices=False)
    Y = X @ vt[:2].T
    if s[1] > 0:
        Y = Y * (s[0] / s[:2])
    ang = np.arctan2(Y[:, 1], Y[:, 0])
    rad = np.hypot(Y[:, 0], Y[:, 1])
    srt = np.sort(ang)
    gaps = np.diff(np.concatenate([srt, srt[:1] + 2 * np.pi]))
    idx = np.minimum(((ang + np.pi) / (2 * np.pi) * bins).astype(int), bins - 1)
    lo = np.full(bins, np.inf)
    hi = np.full(bins, -np.inf)
    np.minimum.at(lo, idx, rad)
    np.maximum.at(hi, idx, rad)
    filled = np.isfinite(lo)
    mean_r = float(rad.mean())
    spread = float(np.max(hi[filled] - lo[filled]) / mean_r) if mean_r > 0 else np.inf
    steps = np.diff(np.unwrap(ang))
    diam = float(np.max(np.ptp(pts, axis=0)))
    return {
        "diameter": diam,
        "max_angular_gap": float(np.degrees(gaps.max())),
        "radial_spread": spread,
        "rotation_number_estimate": float(abs(steps.mean()) / (2 * np.pi)) if len(steps) else 0.0,
        "planarity": float(s[2] / s[0]) if s[0] > 0 else 0.0,
    }


def _episodes(points: np.ndarray):
    """Split a tail into maximal runs with the same dominant species."""
    dom = np.argmax(points, axis=1)
    cuts = np.flatnonzero(np.diff(dom)) + 1
    starts = np.concatenate([[0], cuts])
    ends = np.concatenate([cuts, [len(dom)]])
    return [(int(dom[s]), s, e) for s, e in zip(starts, ends)]


def boundary_cycle_evidence(points: np.ndarray, scale: float) -> dict:
    """Diagnostics for an orbit drawn towards the boundary heteroclinic cycle.

    The tail is cut into dominance episodes.  A boundary cycle shows all
    three species taking turns (in cyclic order), each episode getting
    close to an axis, and the per-episode minimum density shrinking.
    """
    eps = _episodes(points)
    mins = np.array([points[s:e].min() for _, s, e in eps])
    order = [d for d, _, _ in eps]
    steps = {(b - a) % 3 for a, b in zip(order, order[1:])}
    near_axis = all(np.sort(points[s:e], axis=1)[:, 1].min() < 1e-3 * scale for _, s, e in eps)
    slope = np.nan
    if len(mins) >= 3:
        k = np.arange(len(mins))
        slope = float(np.polyfit(k, np.log10(np.maximum(mins, 1e-300)), 1)[0])
    return {
        "episodes": len(eps),
        "species_visited": sorted(set(order)),
        "cyclic": len(steps) == 1 and steps != {0},
        "near_axis": bool(near_axis),
        "log10_min_slope": slope,
        "final_min": float(points[-len(points) // 4:].min() / scale),
        "initial_min": float(points[: len(points) // 4].min() / scale),
    }


def analyze_limit_set(trace: OrbitTrace, known_fps=()) -> LimitSetReport:
    """Classify the tail of an orbit.

    Order of tests: convergence to one of ``known_fps``, approach to the
    boundary cycle, invariant closed curve; otherwise ``inconclusive``.
    """
    pts = np.asarray(trace.points, dtype=float)
    if len(pts) < MIN_TAIL:
        return LimitSetReport("inconclusive", evidence={"reason": f"tail shorter than {MIN_TAIL}"})
    scale = 1.0 + float(np.max(np.abs(pts)))
    last = pts[-101:]
    step = float(np.max(np.abs(np.diff(last, axis=0))))
    ev: dict = {"final_step": step, "scale": scale}
    if step <= FP_STEP_TOL * scale:
        for fp in known_fps:
            dist = float(np.max(np.abs(pts[-1] - fp.coords)))
            if dist <= FP_MATCH_TOL * scale:
                ev.update(distance=dist, fixed_point=fp.label)
                return LimitSetReport("fixed_point", target=fp.coords.copy(), evidence=ev)
        ev["reason"] = "tail converged but matches no known fixed point"
        return LimitSetReport("inconclusive", evidence=ev)

    cyc = boundary_cycle_evidence(pts, scale)
    ev["boundary"] = cyc
    if (cyc["cyclic"] and cyc["species_visited"] == [0, 1, 2] and cyc["episodes"] >= 4
            and cyc["near_axis"] and cyc["log10_min_slope"] < 0
            and cyc["final_min"] < min(1e-6, 1e-2 * cyc["initial_min"])):
        return LimitSetReport("boundary_cycle", evidence=ev)

    st = curve_statistics(pts)
    ev["curve"] = st
    if (st["radial_spread"] < CURVE_SPREAD and st["max_angular_gap"] < CURVE_GAP_DEG
            and st["diameter"] > CURVE_MIN_DIAMETER * scale):
        stats = {k: st[k] for k in ("diameter", "max_angular_gap", "rotation_number_estimate",
                                    "radial_spread")}
        return LimitSetReport("closed_curve", curve_stats=stats, evidence=ev)
    return LimitSetReport("inconclusive", evidence=ev)


def polish_limit_point(params: ModelParams, x, config: IntegratorConfig = DEFAULT_CONFIG):
    """Newton-refine an orbit's end point into a fixed point record, or None."""
    x = np.array(x, dtype=float)
    scale = 1.0 + np.max(np.abs(x))
    x[x <= 1e-9 * scale] = 0.0
    free = [i for i in range(3) if x[i] > 0]
    if free:
        x, _, ok = _newton(params, x, free, config)
        if not ok:
            return None
    kind = {0: "trivial", 1: "axial", 2: "planar", 3: "positive"}[len(free)]
    return evaluate_fixed_point(params, x, kind, "limit", config)


def analyze_orbit(params: ModelParams, x0, n: int = DEFAULT_WINDOW,
                  transient: int = DEFAULT_TRANSIENT, config: IntegratorConfig = DEFAULT_CONFIG,
                  known_fps=()) -> tuple[OrbitTrace, LimitSetReport]:
    """Iterate and analyse; a converged tail is matched against its own polished limit."""
    trace = iterate(params, x0, n, transient, config)
    fps = list(known_fps)
    pts = trace.points
    if len(pts) > 100:
        scale = 1.0 + np.max(np.abs(pts))
        if np.max(np.abs(np.diff(pts[-101:], axis=0))) <= FP_STEP_TOL * scale:
            fp = polish_limit_point(params, pts[-1], config)
            if fp is not None:
                fps.append(fp)
    return trace, analyze_limit_set(trace, fps)


@dataclass
class SimplexCloud:
    seeds: np.ndarray
    points: np.ndarray

    def to_csv(self, path):
        write_rows(path, ["seed_b1", "seed_b2", "seed_b3", "x1", "x2", "x3"],
                   (list(u) + list(x) for u, x in zip(self.seeds, self.points)))


def simplex_mesh(params: ModelParams, resolution: int = 20, iterations: int = 200,
                 config: IntegratorConfig = DEFAULT_CONFIG, overshoot: float = 1.2) -> SimplexCloud:
    """Point cloud near the carrying simplex.

    For each node ``u`` of the barycentric grid (vertices and edges
    included) the seed is ``overshoot`` times the point of ray ``u`` on the
    plane through the axial fixed points; it is then iterated.
    """
    if not np.all(params.r > 0):
        from .errors import Inadmissible
        raise Inadmissible("the carrying simplex needs all r_i > 0")
    seeds = barycentric_mesh(resolution, interior=False)
    pts = np.empty_like(seeds)
    for n, u in enumerate(seeds):
        x = overshoot * simplex_guess(params, u)
        pts[n] = orbit_points(params, x, 1, skip=iterations - 1, config=config)[0]
    return SimplexCloud(seeds, pts)


def ordered_pairs(points: np.ndarray, tol: float = 1e-9, separation: float = 1e-6) -> list:
    """Pairs ``(i, j)`` with ``x_i <= x_j`` componentwise.

    Pairs closer than ``separation * scale`` (limits of the same attractor)
    are skipped; ``tol * scale`` absorbs integrator noise in the comparison.
    """
    pts = np.asarray(points, dtype=float)
    scale = 1.0 + np.max(np.abs(pts))
    diff = pts[None, :, :] - pts[:, None, :]          # x_j - x_i
    le = np.all(diff >= -tol * scale, axis=2)
    far = np.max(np.abs(diff), axis=2) > separation * scale
    hits = np.argwhere(le & far)
    return [tuple(map(int, h)) for h in hits]


# -- export ------------------------------------------------------------------

def fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_rows(path) -> tuple[list, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def dump_json(obj, path=None) -> str:
    """Serialise to JSON; floats use Python's shortest round-trip repr."""
    text = json.dumps(_jsonable(obj), indent=2)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
    return text
