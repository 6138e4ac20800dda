"""Model constants, derived quantities and scenario files.

The seasonal system alternates, within each period ``omega``, a die-off
phase of length ``(1 - phi) * omega`` (``dx_i/dt = -mu_i x_i``) with a
Lotka-Volterra competition phase of length ``phi * omega``
(``dx_i/dt = x_i (b_i - sum_j a_ij x_j)``).

Indices are 0-based in code.  Human-facing strings (violations, JSON
labels) use 1-based species numbers.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, NamedTuple

import numpy as np

from .errors import InvalidParams, InvalidState

SIGN_EPS = 1e-9

PAIRS = tuple((i, j) for i in range(3) for j in range(3) if i != j)


def others(k: int) -> tuple[int, int]:
    """The two species indices different from ``k``, ascending."""
    i, j = (m for m in range(3) if m != k)
    return i, j


def margin_sign(value: float, scale: float, eps: float = SIGN_EPS) -> int:
    """Sign of ``value``, or 0 when ``|value| <= eps * scale``."""
    if not math.isfinite(value):
        return 0
    if abs(value) <= eps * scale:
        return 0
    return 1 if value > 0 else -1


class Violation(NamedTuple):
    kind: str
    field: str = ""
    index: tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.field:
            return self.kind
        args = [self.field] + [str(i + 1) for i in self.index]
        return f"{self.kind}({','.join(args)})"

    __repr__ = __str__


def _get(obj: Any, name: str):
    if isinstance(obj, Mapping):
        return obj.get(name)
    return getattr(obj, name, None)


def validate(params: Any) -> list[Violation]:
    """Return every problem that prevents building a :class:`ModelParams`.

    ``params`` may be a mapping with the scenario keys or any object with
    ``omega, phi, mu, b, a`` attributes.  An empty list means valid.
    """
    out: list[Violation] = []
    for name in ("omega", "phi"):
        v = _get(params, name)
        try:
            v = float(v)
        except (TypeError, ValueError):
            out.append(Violation("Missing", name))
            continue
        if not math.isfinite(v):
            out.append(Violation("NonFinite", name))
        elif v <= 0:
            out.append(Violation("NonpositiveEntry", name))
        elif name == "phi" and v > 1:
            out.append(Violation("PhiOutOfRange"))
    for name, shape in (("mu", (3,)), ("b", (3,)), ("a", (3, 3))):
        v = _get(params, name)
        try:
            arr = np.asarray(v, dtype=float)
        except (TypeError, ValueError):
            out.append(Violation("Missing", name))
            continue
        if arr.shape != shape:
            out.append(Violation("BadShape", name))
            continue
        for idx in np.ndindex(shape):
            x = arr[idx]
            if not math.isfinite(x):
                out.append(Violation("NonFinite", name, idx))
            elif x <= 0:
                out.append(Violation("NonpositiveEntry", name, idx))
    return out


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ModelParams:
    """The 17 positive constants of one seasonal competition system."""

    omega: float
    phi: float
    mu: np.ndarray
    b: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        problems = validate(self)
        if problems:
            raise InvalidParams(problems)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "phi", float(self.phi))
        for name in ("mu", "b", "a"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def __eq__(self, other):
        if not isinstance(other, ModelParams):
            return NotImplemented
        return (self.omega == other.omega and self.phi == other.phi
                and np.array_equal(self.mu, other.mu)
                and np.array_equal(self.b, other.b)
                and np.array_equal(self.a, other.a))

    @property
    def growth_time(self) -> float:
        return self.phi * self.omega

    @property
    def decay(self) -> np.ndarray:
        """Diagonal of the die-off map, ``exp(-mu_i (1 - phi) omega)``."""
        return np.exp(-self.mu * (1.0 - self.phi) * self.omega)

    @property
    def r(self) -> np.ndarray:
        return self.b * self.phi * self.omega - self.mu * (1.0 - self.phi) * self.omega

    def replace(self, **changes) -> "ModelParams":
        kw = dict(omega=self.omega, phi=self.phi, mu=self.mu, b=self.b, a=self.a)
        kw.update(changes)
        return ModelParams(**kw)

    def with_entry(self, name: str, index, value: float) -> "ModelParams":
        """Copy with a single array entry replaced, e.g. ``("a", (1, 0), 0.15)``."""
        arr = np.array(getattr(self, name), dtype=float)
        arr[index] = value
        return self.replace(**{name: arr})

    def permuted(self, perm) -> "ModelParams":
        """Relabel species so that old species ``i`` becomes ``perm[i]``."""
        perm = list(perm)
        inv = np.argsort(perm)
        return self.replace(mu=self.mu[inv], b=self.b[inv], a=self.a[np.ix_(inv, inv)])

    def to_dict(self) -> dict:
        return {"omega": self.omega, "phi": self.phi, "mu": self.mu.tolist(),
                "b": self.b.tolist(), "a": self.a.tolist()}


@dataclass(frozen=True, eq=False)
class DerivedParams:
    """Closed-form quantities governing the boundary dynamics.

    ``transverse[k]`` is ``r_k - (a_ki beta_ij + a_kj beta_ji)``: positive when
    species ``k`` can invade the planar equilibrium of the other two (the
    planar fixed point then repels into the interior), NaN when that planar
    point does not exist.
    """

    r: np.ndarray
    gamma: np.ndarray
    gamma_sign: np.ndarray
    beta: np.ndarray
    planar_exists: tuple
    transverse: np.ndarray
    transverse_sign: np.ndarray
    detA: float
    detA_sign: int
    admissible: bool
    boundary_stable: bool
    degenerate_flags: tuple = field(default_factory=tuple)


def derive(params: ModelParams) -> DerivedParams:
    """Compute ``r``, ``gamma``, ``beta``, ``det A`` and stability flags."""
    a = params.a
    r = params.r
    gamma = np.full((3, 3), np.nan)
    gsign = np.zeros((3, 3), dtype=int)
    flags = []
    for i, j in PAIRS:
        u, v = a[i, i] * r[j], a[j, i] * r[i]
        gamma[i, j] = u - v
        gsign[i, j] = margin_sign(gamma[i, j], abs(u) + abs(v))
        if gsign[i, j] == 0:
            flags.append(f"gamma_{i + 1}{j + 1}=0")

    beta = np.full((3, 3), np.nan)
    exists = []
    trans = np.full(3, np.nan)
    tsign = np.zeros(3, dtype=int)
    for k in range(3):
        i, j = others(k)
        present = gsign[i, j] * gsign[j, i] > 0
        exists.append(bool(present))
        if not present:
            continue
        m = a[i, i] * a[j, j] - a[i, j] * a[j, i]
        beta[i, j] = (a[j, j] * r[i] - a[i, j] * r[j]) / m
        beta[j, i] = (a[i, i] * r[j] - a[j, i] * r[i]) / m
        u, v = a[k, i] * beta[i, j], a[k, j] * beta[j, i]
        trans[k] = r[k] - (u + v)
        tsign[k] = margin_sign(trans[k], abs(u) + abs(v) + abs(r[k]))
        if tsign[k] == 0:
            flags.append(f"planar_{k + 1}_transverse=0")

    det = float(np.linalg.det(a))
    # permanent of |A|: sum of the magnitudes of the six products in det A
    perm_abs = sum(abs(a[0, p[0]] * a[1, p[1]] * a[2, p[2]]) for p in itertools.permutations(range(3)))
    dsign = margin_sign(det, perm_abs)
    return DerivedParams(
        r=_frozen(r), gamma=_frozen(gamma), gamma_sign=gsign, beta=_frozen(beta),
        planar_exists=tuple(exists), transverse=_frozen(trans), transverse_sign=tsign,
        detA=det, detA_sign=dsign, admissible=bool(np.all(r > 0)),
        boundary_stable=not flags, degenerate_flags=tuple(flags),
    )


def state_vec(x, allow_negative: bool = False) -> np.ndarray:
    """Validate and copy a 3-vector of densities."""
    try:
        arr = np.array(x, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise InvalidState(f"not a numeric vector: {x!r}") from exc
    if arr.shape != (3,):
        raise InvalidState(f"expected 3 components, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidState("state contains NaN or Inf")
    if not allow_negative and np.any(arr < 0):
        raise InvalidState("state has negative components")
    return arr


# -- scenario files -----------------------------------------------------------

def _number(v) -> float:
    if isinstance(v, str):
        return float(Fraction(v.strip()))
    return float(v)


def _numbers(v):
    if isinstance(v, (list, tuple)):
        return [_numbers(x) for x in v]
    return _number(v)


@dataclass(frozen=True)
class Scenario:
    params: ModelParams
    name: str = ""
    x0: tuple | None = None
    rel_tol: float | None = None
    abs_tol: float | None = None
    note: str = ""


def parse_scenario(data: Mapping, name: str = "") -> Scenario:
    """Build a :class:`Scenario` from decoded JSON.

    Numeric fields may be given as JSON numbers or as strings holding a
    rational such as ``"238/325"``.
    """
    if not isinstance(data, Mapping):
        raise InvalidParams([Violation("NotAnObject")])
    raw = {}
    for key in ("omega", "phi", "mu", "b", "a"):
        if key not in data:
            raise InvalidParams([Violation("Missing", key)])
        try:
            raw[key] = _numbers(data[key])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidParams([Violation("NotNumeric", key)]) from exc
    params = ModelParams(**raw)
    x0 = data.get("x0")
    if x0 is not None:
        x0 = tuple(state_vec(_numbers(x0)))
    integ = data.get("integrator", {}) or {}
    return Scenario(
        params=params, name=str(data.get("name", name)), x0=x0,
        rel_tol=integ.get("rel_tol"), abs_tol=integ.get("abs_tol"),
        note=str(data.get("note", "")),
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    with open(path) as fh:
        data = json.load(fh)
    return parse_scenario(data, name=path.stem)


def bundled_scenario(name: str) -> Scenario:
    """Load one of the shipped example scenarios, e.g. ``"class27"``."""
    from importlib import resources

    ref = resources.files("seasonlv") / "scenarios" / f"{name}.json"
    with ref.open() as fh:
        return parse_scenario(json.load(fh), name=name)


BUNDLED = ("class26", "class27", "class29", "class31")


# -- random instances ---------------------------------------------------------

DEFAULT_BOX = {
    "omega": (1.0, 10.0),
    "phi": (0.3, 0.9),
    "mu": (0.05, 0.5),
    "b": (0.2, 1.0),
    "a": (0.05, 1.0),
}


def sample_params(rng: np.random.Generator, box: Mapping | None = None,
                  admissible: bool = True, max_tries: int = 10_000) -> ModelParams:
    """Draw constants uniformly from a box, rejecting inadmissible draws."""
    box = dict(DEFAULT_BOX, **(box or {}))
    for _ in range(max_tries):
        p = ModelParams(
            omega=rng.uniform(*box["omega"]), phi=rng.uniform(*box["phi"]),
            mu=rng.uniform(*box["mu"], 3), b=rng.uniform(*box["b"], 3),
            a=rng.uniform(*box["a"], (3, 3)),
        )
        if not admissible or np.all(p.r > 0):
            return p
    raise RuntimeError("could not draw an admissible instance from the box")
