"""Boundary signatures and the 33 stable equivalence classes.

A boundary-stable instance is summarised by the signs of the six
``gamma_ij`` and, for each planar fixed point that exists, whether it
repels (+1) or attracts (-1) transversally into the interior of the
carrying simplex.  Two instances are equivalent when one signature is a
relabeling of the other, so a signature is canonicalised as the
lexicographically least image under the six permutations of the species.

The table of canonical signatures is generated, not typed in: see
:func:`enumerate_canonical`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import Degenerate, Inadmissible, UnknownSignature, WrongClass
from .model import PAIRS, SIGN_EPS, DerivedParams, ModelParams, derive, margin_sign, others

AXIAL_TYPES = ("attractor", "saddle", "repeller")

Code = tuple  # ((6 gamma signs in PAIRS order), (3 transverse signs))


@dataclass(frozen=True)
class BoundarySignature:
    """Sign pattern of the boundary dynamics.

    ``gamma_sign`` holds sign(gamma_ij) in :data:`~seasonlv.model.PAIRS`
    order; ``gamma_ij > 0`` means the axial point ``q_i`` repels in the
    direction of species ``j``.  ``transverse[k]`` is 0 when the planar
    point ``v_k`` is absent, +1 when it repels into the interior and -1
    when it attracts.
    """

    gamma_sign: tuple
    transverse: tuple

    def __post_init__(self):
        g = tuple(int(v) for v in self.gamma_sign)
        t = tuple(int(v) for v in self.transverse)
        if len(g) != 6 or len(t) != 3 or any(v not in (-1, 1) for v in g) \
                or any(v not in (-1, 0, 1) for v in t):
            raise UnknownSignature(f"malformed signature {g}, {t}")
        gd = dict(zip(PAIRS, g))
        for k in range(3):
            i, j = others(k)
            if (gd[i, j] * gd[j, i] > 0) != (t[k] != 0):
                raise UnknownSignature(f"transverse bit for v{k + 1} inconsistent with gamma signs")
        object.__setattr__(self, "gamma_sign", g)
        object.__setattr__(self, "transverse", t)

    @property
    def code(self) -> Code:
        return (self.gamma_sign, self.transverse)

    def gamma(self, i: int, j: int) -> int:
        return self.gamma_sign[PAIRS.index((i, j))]

    @property
    def axial_type(self) -> tuple:
        out = []
        for i in range(3):
            j, k = others(i)
            out.append(AXIAL_TYPES[(self.gamma(i, j) > 0) + (self.gamma(i, k) > 0)])
        return tuple(out)

    @property
    def planar_exists(self) -> tuple:
        return tuple(t != 0 for t in self.transverse)

    @property
    def planar_boundary(self) -> tuple:
        """'attracts' or 'repels' along the boundary curve, None when absent."""
        out = []
        for k in range(3):
            i, j = others(k)
            if not self.transverse[k]:
                out.append(None)
            else:
                out.append("attracts" if self.gamma(i, j) > 0 else "repels")
        return tuple(out)

    @property
    def planar_transverse(self) -> tuple:
        return tuple({0: None, 1: "repels", -1: "attracts"}[t] for t in self.transverse)

    def permuted(self, perm) -> "BoundarySignature":
        """Signature after relabeling old species ``i`` as ``perm[i]``."""
        return BoundarySignature(*permute_code(self.code, perm))

    def describe(self) -> str:
        return describe_code(self.code)

    def to_dict(self) -> dict:
        return {
            "gamma_sign": {f"{i + 1}{j + 1}": s for (i, j), s in zip(PAIRS, self.gamma_sign)},
            "axial_type": list(self.axial_type),
            "planar_exists": list(self.planar_exists),
            "planar_boundary": list(self.planar_boundary),
            "planar_transverse": list(self.planar_transverse),
            "code": describe_code(self.code),
        }


def permute_code(code: Code, perm) -> Code:
    g, t = code
    gd = dict(zip(PAIRS, g))
    moved = {(perm[i], perm[j]): gd[i, j] for i, j in PAIRS}
    nt = [0, 0, 0]
    for k in range(3):
        nt[perm[k]] = t[k]
    return tuple(moved[p] for p in PAIRS), tuple(nt)


def canonical_form(code: Code) -> tuple[Code, tuple]:
    """Least image of ``code`` over all relabelings, and the first permutation reaching it."""
    best = None
    for perm in itertools.permutations(range(3)):
        img = permute_code(code, perm)
        if best is None or img < best[0]:
            best = (img, perm)
    return best


def dual_code(code: Code) -> Code:
    """Signature of the time-reversed boundary dynamics (repel and attract swap)."""
    g, t = code
    return tuple(-v for v in g), tuple(-v for v in t)


def boundary_index_sum(code: Code) -> int:
    """``sum(axial index) + 2 sum(planar index)`` implied by a signature."""
    sig = BoundarySignature(*code)
    tot = 0
    for i in range(3):
        j, k = others(i)
        tot += (-1) ** ((sig.gamma(i, j) > 0) + (sig.gamma(i, k) > 0))
    for k in range(3):
        if sig.transverse[k]:
            i, j = others(k)
            tot += 2 * (-1) ** ((sig.gamma(i, j) < 0) + (sig.transverse[k] > 0))
    return tot


def describe_code(code: Code) -> str:
    """Compact label, e.g. ``"ASR e+R,-,e-A"``.

    Letters give the axial types (Attractor, Saddle, Repeller); each planar
    entry is ``-`` when absent, else ``e+``/``e-`` for attracting/repelling
    along the boundary edge followed by ``R``/``A`` for the transverse
    behaviour.
    """
    sig = BoundarySignature(*code)
    ax = "".join(t[0].upper() for t in sig.axial_type)
    pl = []
    for k in range(3):
        if not sig.transverse[k]:
            pl.append("-")
        else:
            i, j = others(k)
            pl.append(("e+" if sig.gamma(i, j) > 0 else "e-") + ("R" if sig.transverse[k] > 0 else "A"))
    return f"{ax} {','.join(pl)}"


def _local_ok(g, k, tk) -> bool:
    # a planar point whose edge-neighbours both attract towards species k
    # cannot repel into the interior, and vice versa
    i, j = others(k)
    if g[i, j] > 0 and g[i, k] < 0 and g[j, k] < 0:
        return tk == -1
    if g[i, j] < 0 and g[i, k] > 0 and g[j, k] > 0:
        return tk == 1
    return True


def enumerate_canonical() -> dict:
    """Generate every consistent boundary signature modulo relabeling.

    Returns a mapping from canonical code to the sign of ``det A`` it
    forces (0 when unconstrained).  Each signature is built from the six
    gamma signs, ``D = sign(det A)`` and the sign vector ``s`` of the
    interior equilibrium ``A^{-1} r``; the transverse sign of ``v_k`` is
    ``D * s_k * sign(gamma_ij)``.  A candidate survives when its local
    transverse constraints hold and the boundary index sum is ``1 - 4D``
    if ``s > 0`` (interior fixed points exist) and 1 otherwise.
    """
    out: dict = {}
    for gs in itertools.product((1, -1), repeat=6):
        g = dict(zip(PAIRS, gs))
        for D in (1, -1):
            for s in itertools.product((1, -1), repeat=3):
                t = [0, 0, 0]
                for k in range(3):
                    i, j = others(k)
                    if g[i, j] * g[j, i] > 0:
                        t[k] = D * s[k] * g[i, j]
                if not all(_local_ok(g, k, t[k]) for k in range(3) if t[k]):
                    continue
                code = (tuple(gs), tuple(t))
                interior = s == (1, 1, 1)
                if boundary_index_sum(code) != (1 - 4 * D if interior else 1):
                    continue
                canon = canonical_form(code)[0]
                forced = D if interior else 0
                prev = out.get(canon)
                if prev is not None and prev != forced:
                    forced = 0
                out[canon] = forced
    return out


# Classes 19-33 in numbering order.  Anchored: 20, 26, 27, 29, 31, 33.  The
# others place time-reversal duals next to each other (see README).
_NUMBERED_INTERIOR = [
    ("SRR e+A,e+A,-", 19), ("AAS -,e-R,e-R", 20), ("AAR -,-,e-R", 21),
    ("ARR e+A,-,-", 22), ("ASR e+A,-,e-R", 23), ("ASS e+A,e-R,e-R", 24),
    ("SSR e+A,e+A,e-R", 25),
    ("ASR e+R,-,e-A", 26), ("SSS -,-,-", 27), ("ASS -,-,e-A", 28),
    ("SSR -,e+R,-", 29), ("AAS -,e-A,e-A", 30), ("SRR e+R,e+R,-", 31),
    ("AAA e-A,e-A,e-A", 32), ("RRR e+R,e+R,e+R", 33),
]


@dataclass(frozen=True)
class ClassEntry:
    id: int
    code: Code
    description: str
    det_a_sign: int
    boundary_index_sum: int


@lru_cache(maxsize=1)
def class_table() -> tuple:
    """The 33 canonical signatures, numbered 1..33."""
    table = enumerate_canonical()
    assert len(table) == 33, f"expected 33 classes, generated {len(table)}"
    by_desc = {describe_code(c): c for c in table}
    entries = {}
    for desc, cid in _NUMBERED_INTERIOR:
        code = by_desc[desc]
        entries[code] = cid
    rest = [c for c in table if c not in entries]
    assert len(rest) == 18 and all(boundary_index_sum(c) == 1 for c in rest)

    # classes 1-18: by number of planar points, dual pairs adjacent,
    # ties broken by the canonical code
    def key(c):
        dual = canonical_form(dual_code(c))[0]
        lead = min(c, dual)
        return sum(1 for t in c[1] if t), lead, c != lead

    for n, c in enumerate(sorted(rest, key=key), start=1):
        entries[c] = n
    out = [ClassEntry(cid, c, describe_code(c), table[c], boundary_index_sum(c))
           for c, cid in entries.items()]
    return tuple(sorted(out, key=lambda e: e.id))


@lru_cache(maxsize=1)
def _lookup() -> dict:
    return {e.code: e for e in class_table()}


@dataclass(frozen=True)
class ClassId:
    id: int
    permutation: tuple
    det_a_sign: int

    def to_dict(self) -> dict:
        return {"class_id": self.id, "permutation": [p + 1 for p in self.permutation],
                "det_a_sign": self.det_a_sign}


def signature_from_derived(d: DerivedParams) -> BoundarySignature:
    if not d.boundary_stable:
        raise Degenerate(d.degenerate_flags)
    g = tuple(int(d.gamma_sign[i, j]) for i, j in PAIRS)
    return BoundarySignature(g, tuple(int(v) for v in d.transverse_sign))


def signature(params: ModelParams) -> BoundarySignature:
    """Boundary signature from closed-form arithmetic (no integration)."""
    d = derive(params)
    if not d.admissible:
        raise Inadmissible("classification needs all r_i > 0")
    return signature_from_derived(d)


def canonical_class(sig: BoundarySignature, det_a_sign: int) -> ClassId:
    """Look up the class of a signature.

    ``permutation`` relabels the instance onto the canonical representative,
    i.e. ``params.permuted(permutation)`` has the canonical signature.
    """
    canon, perm = canonical_form(sig.code)
    entry = _lookup().get(canon)
    if entry is None:
        raise UnknownSignature(f"no class for signature {describe_code(sig.code)}")
    if entry.det_a_sign and det_a_sign != entry.det_a_sign:
        raise UnknownSignature(
            f"class {entry.id} requires sign(det A) = {entry.det_a_sign}, got {det_a_sign}")
    return ClassId(entry.id, tuple(perm), int(det_a_sign))


def expected_positive_fp(class_id: int) -> str:
    if not 1 <= class_id <= 33:
        raise ValueError(f"class id out of range: {class_id}")
    return "none" if class_id <= 18 else "at_least_one"


@dataclass(frozen=True)
class ThetaReport:
    theta: float
    verdict: str
    w: np.ndarray

    def to_dict(self) -> dict:
        return {"theta": self.theta, "verdict": self.verdict}


def theta_value(params: ModelParams) -> tuple[float, float, np.ndarray]:
    """``theta = w12 w23 w31 + w21 w13 w32`` with ``w_ij = r_j - a_ji r_i / a_ii``.

    Returns ``(theta, scale, w)`` where ``scale`` is the sum of the
    magnitudes of the two products.
    """
    r, a = params.r, params.a
    w = np.zeros((3, 3))
    for i, j in PAIRS:
        w[i, j] = r[j] - a[j, i] * r[i] / a[i, i]
    p1 = w[0, 1] * w[1, 2] * w[2, 0]
    p2 = w[1, 0] * w[0, 2] * w[2, 1]
    return float(p1 + p2), abs(p1) + abs(p2), w


def heteroclinic_theta(params: ModelParams, eps: float = SIGN_EPS) -> ThetaReport:
    """Stability of the boundary heteroclinic cycle of a class-27 instance."""
    cls = classify(params).class_id
    if cls.id != 27:
        raise WrongClass(f"heteroclinic criterion needs class 27, instance is class {cls.id}")
    theta, scale, w = theta_value(params)
    s = margin_sign(theta, scale, eps)
    verdict = {-1: "attracts", 1: "repels", 0: "inconclusive"}[s]
    return ThetaReport(theta, verdict, w)


@dataclass(frozen=True)
class Classification:
    class_id: ClassId
    signature: BoundarySignature
    derived: DerivedParams

    def to_dict(self) -> dict:
        d = self.derived
        gam = {f"{i + 1}{j + 1}": float(d.gamma[i, j]) for i, j in PAIRS}
        bet = {f"{i + 1}{j + 1}": float(d.beta[i, j]) for i, j in PAIRS
               if np.isfinite(d.beta[i, j])}
        out = self.class_id.to_dict()
        out.update(signature=self.signature.to_dict(), gammas=gam, betas=bet,
                   detA=d.detA, r=d.r.tolist(), degenerate_flags=list(d.degenerate_flags),
                   expected_positive_fp=expected_positive_fp(self.class_id.id))
        return out


def classify(params: ModelParams) -> Classification:
    """Signature plus class id; raises ``Degenerate`` inside any sign margin."""
    d = derive(params)
    if not d.admissible:
        raise Inadmissible("classification needs all r_i > 0")
    sig = signature_from_derived(d)
    if d.detA_sign == 0:
        raise Degenerate(["det A = 0"])
    return Classification(canonical_class(sig, d.detA_sign), sig, d)
