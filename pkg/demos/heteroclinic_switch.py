"""Three saddles on the axes: neutral curves versus a boundary cycle.

The class-27 scenario has theta = 0 and its orbits stay on closed curves.
Raising a_21 to 0.15 makes theta negative and orbits drift onto the
heteroclinic cycle, spending ever longer near each axis in turn.

    python3 demos/heteroclinic_switch.py
"""
import numpy as np

from seasonlv import analyze_orbit, bundled_scenario, heteroclinic_theta, iterate

base = bundled_scenario("class27")

for label, params in [("a21 = 0.10", base.params),
                      ("a21 = 0.15", base.params.with_entry("a", (1, 0), 0.15))]:
    th = heteroclinic_theta(params)
    _, rep = analyze_orbit(params, base.x0)
    print(f"{label}: theta = {th.theta:+.3e} ({th.verdict}), orbit verdict {rep.verdict}")

# dominance sequence along the perturbed orbit
pts = iterate(base.params.with_entry("a", (1, 0), 0.15), base.x0, 3000).points
lead = np.argmax(pts, axis=1)
switches = np.flatnonzero(np.diff(lead)) + 1
print("leader switches at iterates:", switches[:12].tolist())
print("gaps between switches:", np.diff(switches[:12]).tolist())
print("smallest coordinate, last 5 switches:",
      [f"{pts[k].min():.1e}" for k in switches[-5:]])
