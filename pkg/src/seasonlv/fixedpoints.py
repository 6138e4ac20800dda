"""Fixed points of the Poincare map, their spectra and indices."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import Degenerate, Inadmissible, NewtonDivergence, NonHyperbolic
from .flow import DEFAULT_CONFIG, IntegratorConfig, _poincare_unchecked
from .model import ModelParams, derive, margin_sign, others

HYP_EPS = 1e-7
DEDUP_RADIUS = 1e-7
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FixedPointRecord:
    kind: str
    support: tuple
    coords: np.ndarray
    hat: np.ndarray
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    residual: float
    label: str = ""
    stability: str | None = None
    index: int | None = None
    unstable_dims: int | None = None

    @property
    def scale(self) -> float:
        return 1.0 + float(np.max(np.abs(self.coords)))

    def transverse_eigenvalue(self, i: int) -> float:
        """Diagonal Jacobian entry for a species absent from the support."""
        return float(self.jacobian[i, i])

    def to_dict(self) -> dict:
        ev = self.eigenvalues
        return {
            "kind": self.kind,
            "label": self.label,
            "support": [i + 1 for i in self.support],
            "coords": self.coords.tolist(),
            "hat": self.hat.tolist(),
            "eigenvalues": [[float(z.real), float(z.imag)] for z in ev],
            "eigenvalue_moduli": np.abs(ev).tolist(),
            "stability": self.stability,
            "index": self.index,
            "residual": self.residual,
        }


def sorted_eigenvalues(m: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(m).astype(complex)
    return ev[np.argsort(np.abs(ev), kind="stable")]


def evaluate_fixed_point(params: ModelParams, x, kind: str, label: str = "",
                         config: IntegratorConfig = DEFAULT_CONFIG) -> FixedPointRecord:
    """Build a record for a point believed to be fixed."""
    x = np.asarray(x, dtype=float)
    res = _poincare_unchecked(params, x, config, want_hat=True, want_jac=True)
    support = tuple(int(i) for i in np.flatnonzero(x > 0))
    return FixedPointRecord(
        kind=kind, support=support, coords=x.copy(), hat=res.hat_integral,
        jacobian=res.jacobian, eigenvalues=sorted_eigenvalues(res.jacobian),
        residual=float(np.max(np.abs(res.end_state - x))), label=label,
    )


def trivial_fixed_point(params: ModelParams, config: IntegratorConfig = DEFAULT_CONFIG):
    return evaluate_fixed_point(params, np.zeros(3), "trivial", "0", config)


def axial_coordinate(params: ModelParams, i: int) -> float:
    """Closed-form positive fixed point of the map restricted to axis ``i``."""
    r = params.r[i]
    if r <= 0:
        raise Inadmissible(f"r_{i + 1} = {r:.6g} <= 0: axis {i + 1} collapses to 0")
    b, a, c = params.b[i], params.a[i, i], params.decay[i]
    T = params.growth_time
    return float(b * np.expm1(r) / (a * c * np.expm1(b * T)))


def axial_fixed_point(params: ModelParams, i: int,
                      config: IntegratorConfig = DEFAULT_CONFIG) -> FixedPointRecord:
    """Axial fixed point ``q_i`` from the logistic closed form.

    The attached ``hat`` is the numerically integrated trajectory integral,
    which should equal ``r_i / a_ii`` on axis ``i``.
    """
    x = np.zeros(3)
    x[i] = axial_coordinate(params, i)
    return evaluate_fixed_point(params, x, "axial", f"q{i + 1}", config)


def axial_fixed_point_newton(params: ModelParams, i: int, config: IntegratorConfig = DEFAULT_CONFIG,
                             x0: float | None = None, tol: float = 1e-14, max_iter: int = 60) -> float:
    """Locate ``q_i`` by scalar Newton on the numerical map restricted to the axis."""
    if params.r[i] <= 0:
        raise Inadmissible(f"r_{i + 1} <= 0")
    x = float(params.b[i] / params.a[i, i]) if x0 is None else float(x0)
    e = np.zeros(3)
    for _ in range(max_iter):
        e[i] = x
        res = _poincare_unchecked(params, e, config, want_jac=True)
        f = res.end_state[i] - x
        df = res.jacobian[i, i] - 1.0
        step = -f / df
        while x + step <= 0:
            step *= 0.5
        x += step
        if abs(step) <= tol * (1.0 + abs(x)):
            return x
    raise NewtonDivergence(f"axial Newton on axis {i + 1} did not converge")


def _newton(params, x, free, config, tol=1e-12, max_iter=50, floor=0.0):
    """Damped Newton on ``P(x) - x`` over the coordinates listed in ``free``.

    Returns ``(x, residual, converged)``.  Iterates stay strictly positive in
    the free coordinates.
    """
    free = list(free)
    x = np.array(x, dtype=float)
    res = _poincare_unchecked(params, x, config, want_jac=True)
    F = (res.end_state - x)[free]
    fnorm = np.max(np.abs(F))
    for _ in range(max_iter):
        scale = 1.0 + np.max(np.abs(x))
        if fnorm <= tol * scale:
            return x, fnorm, True
        J = res.jacobian[np.ix_(free, free)] - np.eye(len(free))
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return x, fnorm, False
        if not np.all(np.isfinite(dx)):
            return x, fnorm, False
        lam = 1.0
        xf = x[free]
        while np.any(xf + lam * dx <= floor) and lam > 1e-12:
            lam *= 0.5
        accepted = False
        for _ in range(30):
            trial = x.copy()
            trial[free] = xf + lam * dx
            tres = _poincare_unchecked(params, trial, config, want_jac=True)
            tF = (tres.end_state - trial)[free]
            tnorm = np.max(np.abs(tF))
            if tnorm < fnorm or tnorm <= tol * scale:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            # stalled at the integrator noise floor
            return x, fnorm, fnorm <= RESIDUAL_TOL * scale * 1e-2
        step_size = lam * np.max(np.abs(dx))
        x, res, F, fnorm = trial, tres, tF, tnorm
        if step_size <= 1e-15 * scale:
            return x, fnorm, fnorm <= RESIDUAL_TOL * scale * 1e-2
    return x, fnorm, fnorm <= tol * (1.0 + np.max(np.abs(x)))


def planar_seed(params: ModelParams, k: int) -> np.ndarray:
    """Initial guess for ``v_k`` from the two-species equilibrium ``(beta_ij, beta_ji)``.

    The hat coordinates are mapped to densities with the density/hat ratio of
    the corresponding axial fixed points.
    """
    d = derive(params)
    i, j = others(k)
    x = np.zeros(3)
    for m, n in ((i, j), (j, i)):
        ratio = axial_coordinate(params, m) * params.a[m, m] / d.r[m]
        x[m] = d.beta[m, n] * ratio
    return x


_PLANAR_PERTURB = [(1.0, 1.0), (0.7, 0.7), (1.4, 1.4), (0.7, 1.4), (1.4, 0.7),
                   (0.4, 1.0), (1.0, 0.4), (2.0, 2.0), (0.3, 0.3)]


def planar_fixed_point(params: ModelParams, k: int,
                       config: IntegratorConfig = DEFAULT_CONFIG) -> FixedPointRecord | None:
    """Fixed point in the open coordinate plane ``x_k = 0``, or ``None`` when absent.

    Raises ``NewtonDivergence`` if the point should exist but Newton fails
    from the seed and all eight perturbations of it.
    """
    d = derive(params)
    i, j = others(k)
    if d.gamma_sign[i, j] * d.gamma_sign[j, i] <= 0:
        return None
    base = planar_seed(params, k)
    best = None
    for fi, fj in _PLANAR_PERTURB:
        seed = base.copy()
        seed[i] *= fi
        seed[j] *= fj
        x, fnorm, ok = _newton(params, seed, (i, j), config)
        if ok and x[i] > 0 and x[j] > 0:
            return evaluate_fixed_point(params, x, "planar", f"v{k + 1}", config)
        if best is None or fnorm < best[1]:
            best = (x, fnorm)
    raise NewtonDivergence(f"planar fixed point v{k + 1} not found "
                           f"(best residual {best[1]:.3g})")


def barycentric_mesh(resolution: int, interior: bool = True) -> np.ndarray:
    """Nodes ``(i, j, k) / resolution`` of the triangular grid on the 2-simplex."""
    lo = 1 if interior else 0
    pts = [(i, j, resolution - i - j)
           for i in range(lo, resolution + 1)
           for j in range(lo, resolution + 1 - i)
           if resolution - i - j >= lo]
    return np.array(pts, dtype=float) / resolution


def simplex_guess(params: ModelParams, u) -> np.ndarray:
    """Point on ray ``u`` lying on the plane through the three axial fixed points."""
    q = np.array([axial_coordinate(params, i) for i in range(3)])
    u = np.asarray(u, dtype=float)
    return u / np.sum(u / q)


@dataclass
class SearchStats:
    seeds: int = 0
    converged: int = 0
    boundary: int = 0
    failed: int = 0
    resolution: int = 0


def search_positive_fixed_points(params: ModelParams, config: IntegratorConfig = DEFAULT_CONFIG,
                                 resolution: int = 15, rng: np.random.Generator | None = None,
                                 jitter: float = 0.0):
    """Multi-start Newton for positive fixed points.

    Returns ``(records, stats)``.  Seeds are the interior nodes of a
    triangular mesh, placed near the carrying simplex by one application of
    the map.  ``jitter`` randomly perturbs each seed by that relative amount.
    """
    if not np.all(params.r > 0):
        raise Inadmissible("positive fixed point search needs all r_i > 0")
    stats = SearchStats(resolution=resolution)
    roots: list[np.ndarray] = []
    for u in barycentric_mesh(resolution):
        stats.seeds += 1
        seed = _poincare_unchecked(params, simplex_guess(params, u), config).end_state
        if jitter and rng is not None:
            seed = seed * (1.0 + jitter * rng.uniform(-1, 1, 3))
        x, fnorm, ok = _newton(params, seed, (0, 1, 2), config)
        if not ok:
            stats.failed += 1
            continue
        scale = 1.0 + np.max(np.abs(x))
        if np.min(x) <= 1e-9 * scale:
            stats.boundary += 1
            continue
        stats.converged += 1
        if not any(np.max(np.abs(x - y)) <= DEDUP_RADIUS * scale for y in roots):
            roots.append(x)
    roots.sort(key=lambda z: tuple(z))
    recs = [evaluate_fixed_point(params, x, "positive", f"p{n + 1}", config)
            for n, x in enumerate(roots)]
    return recs, stats


def positive_fixed_points(params: ModelParams, config: IntegratorConfig = DEFAULT_CONFIG,
                          resolution: int = 15, rng=None) -> list[FixedPointRecord]:
    return search_positive_fixed_points(params, config, resolution, rng)[0]


def hat_residual(params: ModelParams, fp: FixedPointRecord) -> float:
    """``|A hat - r|_inf / |r|_inf``: zero for a genuine positive fixed point."""
    r = params.r
    return float(np.max(np.abs(params.a @ fp.hat - r)) / np.max(np.abs(r)))


def transverse_formula(params: ModelParams, fp: FixedPointRecord, i: int) -> float:
    """``exp(r_i - (A hat)_i)``: the eigenvalue in an absent direction ``i``."""
    return float(np.exp(params.r[i] - params.a[i] @ fp.hat))


def _boundary_label(params, fp):
    d = derive(params)
    g = d.gamma_sign
    if fp.kind == "trivial":
        return "repeller", 3
    if fp.kind == "axial":
        (i,) = fp.support
        j, k = others(i)
        if g[i, j] == 0 or g[i, k] == 0:
            return "nonhyperbolic", None
        n_up = int(g[i, j] > 0) + int(g[i, k] > 0)
    else:
        (k,) = [m for m in range(3) if m not in fp.support]
        i, j = fp.support
        if g[i, j] == 0 or g[j, i] == 0:
            return "nonhyperbolic", None
        edge_up = int(g[i, j] < 0)
        u = params.a[k] @ fp.hat
        ts = margin_sign(params.r[k] - u, abs(params.r[k]) + abs(u))
        if ts == 0:
            return "nonhyperbolic", None
        n_up = edge_up + int(ts > 0)
    return ("attractor", "saddle", "repeller")[n_up], n_up


def stability_and_index(params: ModelParams, fp: FixedPointRecord) -> FixedPointRecord:
    """Attach the stability label and fixed-point index.

    The index is ``(-1)**(number of eigenvalues of modulus > 1)``.  Boundary
    labels describe the dynamics on the carrying simplex and come from the
    sign rules for ``gamma`` and the transverse invasion rate; interior
    labels describe the dynamics in the open cone.
    """
    mod = np.abs(fp.eigenvalues)
    if np.any(np.abs(mod - 1.0) <= HYP_EPS):
        raise NonHyperbolic(f"{fp.label or fp.kind}: eigenvalue moduli {mod}")
    n_big = int(np.sum(mod > 1.0))
    index = -1 if n_big % 2 else 1
    if fp.kind == "positive":
        label = "attractor" if n_big == 0 else "saddle"
        dims = n_big
    else:
        label, dims = _boundary_label(params, fp)
        if dims is None:
            raise NonHyperbolic(f"{fp.label}: boundary sign rule is degenerate")
    return replace(fp, stability=label, index=index, unstable_dims=dims)


@dataclass
class Inventory:
    trivial: FixedPointRecord
    axial: list
    planar: list
    positive: list
    stats: SearchStats = field(default_factory=SearchStats)

    def boundary(self):
        return [self.trivial, *self.axial, *(v for v in self.planar if v is not None)]

    def all(self):
        return [*self.boundary(), *self.positive]

    def to_dict(self) -> dict:
        return {
            "trivial": self.trivial.to_dict(),
            "axial": [q.to_dict() for q in self.axial],
            "planar": [None if v is None else v.to_dict() for v in self.planar],
            "positive": [p.to_dict() for p in self.positive],
            "search": vars(self.stats).copy(),
        }


def _with_index(params, fp):
    try:
        return stability_and_index(params, fp)
    except NonHyperbolic:
        return replace(fp, stability="nonhyperbolic")


def inventory(params: ModelParams, config: IntegratorConfig = DEFAULT_CONFIG,
              resolution: int = 15, rng=None) -> Inventory:
    """Every fixed point: trivial, axial, planar and positive, with indices.

    Non-hyperbolic points keep ``index=None`` and ``stability="nonhyperbolic"``.
    """
    if not np.all(params.r > 0):
        raise Inadmissible("fixed point inventory needs all r_i > 0")
    triv = _with_index(params, trivial_fixed_point(params, config))
    axial = [_with_index(params, axial_fixed_point(params, i, config)) for i in range(3)]
    planar = []
    for k in range(3):
        v = planar_fixed_point(params, k, config)
        planar.append(None if v is None else _with_index(params, v))
    pos, stats = search_positive_fixed_points(params, config, resolution, rng)
    pos = [_with_index(params, p) for p in pos]
    return Inventory(triv, axial, planar, pos, stats)


@dataclass
class IndexReport:
    lhs: int
    holds: bool
    axial: list
    planar: list
    positive: list
    refined: bool = False
    resolution: int = 15

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "holds": self.holds, "axial": self.axial,
                "planar": self.planar, "positive": self.positive,
                "refined": self.refined, "resolution": self.resolution}


def index_sum(inv: Inventory) -> int:
    """``sum(axial) + 2 sum(planar) + 4 sum(positive)``, absent points count 0."""
    ax = sum(q.index for q in inv.axial)
    pl = sum(v.index for v in inv.planar if v is not None)
    po = sum(p.index for p in inv.positive)
    return ax + 2 * pl + 4 * po


def _check_hyperbolic(inv: Inventory):
    bad = [fp.label for fp in inv.all() if fp.index is None]
    if bad:
        raise Degenerate([f"non-hyperbolic fixed point {b}" for b in bad])


def verify_index_formula(params: ModelParams, config: IntegratorConfig = DEFAULT_CONFIG,
                         resolution: int = 15, refine_to: int = 31, rng=None,
                         inv: Inventory | None = None) -> IndexReport:
    """Check that the weighted index sum over the carrying simplex equals 1.

    A failing sum usually means a missed positive fixed point, so the
    search is repeated once on a finer mesh before reporting.
    """
    d = derive(params)
    if not d.boundary_stable:
        raise Degenerate(d.degenerate_flags)
    if inv is None:
        inv = inventory(params, config, resolution, rng)
    _check_hyperbolic(inv)
    lhs = index_sum(inv)
    refined = False
    if lhs != 1 and refine_to and refine_to > resolution:
        extra, _ = search_positive_fixed_points(params, config, refine_to, rng)
        merged = list(inv.positive)
        for p in extra:
            if not any(np.max(np.abs(p.coords - q.coords)) <= DEDUP_RADIUS * q.scale
                       for q in merged):
                merged.append(_with_index(params, p))
        inv.positive = [replace(p, label=f"p{n + 1}") for n, p in enumerate(merged)]
        _check_hyperbolic(inv)
        lhs = index_sum(inv)
        refined = True
        resolution = refine_to
    return IndexReport(
        lhs=lhs, holds=lhs == 1,
        axial=[q.index for q in inv.axial],
        planar=[None if v is None else v.index for v in inv.planar],
        positive=[p.index for p in inv.positive],
        refined=refined, resolution=resolution,
    )
