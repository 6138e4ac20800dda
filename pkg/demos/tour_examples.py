"""Walk through the four bundled scenarios.

For each one: boundary signature and class, the fixed-point inventory, and
the long-run behaviour of the bundled initial value.

    python3 demos/tour_examples.py
"""
import numpy as np

from seasonlv import analyze_orbit, bundled_scenario, classify, inventory
from seasonlv.model import BUNDLED


def show(name):
    scen = bundled_scenario(name)
    c = classify(scen.params)
    print(f"== {name}: class {c.class_id.id}  ({c.signature.describe()})")
    print(f"   r = {np.round(scen.params.r, 4)}, det A = {np.linalg.det(scen.params.a):.4g}")

    inv = inventory(scen.params)
    for fp in inv.all():
        lam = np.abs(fp.eigenvalues)
        print(f"   {fp.label:>3} {fp.kind:<8} x = {np.round(fp.coords, 5)}  "
              f"|eig| = {np.round(lam, 4)}  {fp.stability}")

    _, rep = analyze_orbit(scen.params, scen.x0)
    print(f"   orbit from {[float(v) for v in scen.x0]}: {rep.verdict}", end="")
    if rep.curve_stats:
        st = rep.curve_stats
        print(f", diameter {st['diameter']:.4g}, rotation ~ {st['rotation_number_estimate']:.4f}")
    else:
        print()


if __name__ == "__main__":
    for name in BUNDLED:
        show(name)
