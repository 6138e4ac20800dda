"""Leslie-Gower comparison map, an independent route to the boundary signature.

The map ``S_i(x) = (1 + r_i) x_i / (1 + sum_j a_ij x_j)`` shares the
boundary classification of the seasonal Poincare map.  Here its boundary
fixed points are found by linear algebra and their stability read off the
Jacobian of ``S`` itself, without touching the gamma/beta formulas used by
:mod:`seasonlv.classify`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classify import BoundarySignature
from .errors import Degenerate
from .model import PAIRS, SIGN_EPS, ModelParams, others, state_vec


@dataclass(frozen=True, eq=False)
class LGMap:
    r: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        a = np.array(self.a, dtype=float)
        if r.shape != (3,) or a.shape != (3, 3):
            raise ValueError("LGMap needs r of shape (3,) and a of shape (3, 3)")
        if np.any(a <= 0):
            raise ValueError("competition coefficients must be positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "a", a)

    @classmethod
    def from_params(cls, params: ModelParams) -> "LGMap":
        return cls(params.r, params.a)


def lg_apply(m: LGMap, x) -> np.ndarray:
    x = state_vec(x)
    return (1.0 + m.r) * x / (1.0 + m.a @ x)


def lg_jacobian(m: LGMap, x) -> np.ndarray:
    """Exact Jacobian of ``S`` at ``x``."""
    x = np.asarray(x, dtype=float)
    den = 1.0 + m.a @ x
    J = -((1.0 + m.r) * x / den**2)[:, None] * m.a
    J[np.diag_indices(3)] += (1.0 + m.r) / den
    return J


def lg_fixed_point(m: LGMap, support) -> np.ndarray | None:
    """Fixed point of ``S`` with the given support, or None if not positive there.

    On the support the fixed-point equation reduces to ``A_SS x_S = r_S``.
    """
    s = list(support)
    x = np.zeros(3)
    sub = m.a[np.ix_(s, s)]
    try:
        xs = np.linalg.solve(sub, m.r[s])
    except np.linalg.LinAlgError:
        return None
    if not np.all(xs > 0):
        return None
    x[s] = xs
    return x


def _sign_vs_one(lam: float, eps: float, why: str, flags: list) -> int:
    if abs(lam - 1.0) <= eps * max(1.0, abs(lam)):
        flags.append(why)
        return 0
    return 1 if lam > 1.0 else -1


def lg_signature(m: LGMap, eps: float = SIGN_EPS) -> BoundarySignature:
    """Boundary signature of ``S`` from its fixed points and Jacobian spectra."""
    if np.any(m.r <= 0):
        raise Degenerate(["some r_i <= 0"])
    flags: list = []
    # axial points: the Jacobian is triangular in the absent directions
    rep = {}
    for i in range(3):
        q = lg_fixed_point(m, (i,))
        J = lg_jacobian(m, q)
        for j in others(i):
            rep[i, j] = _sign_vs_one(J[j, j], eps, f"q{i + 1} neutral towards {j + 1}", flags)
    trans = [0, 0, 0]
    for k in range(3):
        i, j = others(k)
        v = lg_fixed_point(m, (i, j))
        if v is None:
            continue
        J = lg_jacobian(m, v)
        # within the plane one eigenvalue crosses the boundary curve; for a
        # coexistence point that curve direction is the larger eigenvalue
        in_plane = np.linalg.eigvals(J[np.ix_([i, j], [i, j])])
        if np.any(np.abs(in_plane.imag) > 0):
            flags.append(f"v{k + 1} complex in-plane spectrum")
        edge = _sign_vs_one(float(np.max(np.abs(in_plane))), eps, f"v{k + 1} neutral on edge", flags)
        t = _sign_vs_one(J[k, k], eps, f"v{k + 1} neutral transversally", flags)
        trans[k] = t
        # the edge behaviour must agree with the axial neighbours
        if edge and edge != (1 if rep[i, j] < 0 else -1):
            flags.append(f"v{k + 1} edge stability disagrees with axial points")
    if flags:
        raise Degenerate(flags)
    for k in range(3):
        i, j = others(k)
        if (rep[i, j] * rep[j, i] > 0) != bool(trans[k]):
            raise Degenerate([f"planar point v{k + 1} existence disagrees with axial points"])
    return BoundarySignature(tuple(rep[p] for p in PAIRS), tuple(trans))
