"""Gallery of the curve families behind the layer Hamiltonians.

Every layer is a tubular neighborhood of a planar unit-speed curve.
This demo draws the four curved families (tilted line, one-sided fold,
bent transition, compact bump), prints their curvature budgets, and runs
the admissibility report that the solvers check before assembling.
"""

import os

import numpy as np

from magbands import geometry

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

OUT = os.path.join(os.path.dirname(__file__), "out")

PROFILES = [
    ("tilted", dict(gamma=np.pi / 6)),
    ("fold", dict(delta=0.35, width=0.8)),
    ("bent", dict(alpha_plus=0.5, alpha_minus=1.0)),
    ("bump", dict(amplitude=0.4)),
]


def main():
    a = 0.15
    print(f"{'family':>8} {'sup|kappa|':>11} {'a*sup|kappa|':>13} "
          f"{'assumptions':>12}")
    built = []
    for family, params in PROFILES:
        prof = geometry.build_profile(family, **params)
        rep = geometry.check_assumptions(geometry.LayerConfig(prof, a, 1.0))
        verdict = "all hold" if rep.ok else "FAIL: " + ",".join(
            k for k, e in rep.entries.items() if e["status"] == "fails")
        print(f"{family:>8} {prof.kappa_sup:>11.4f} "
              f"{a * prof.kappa_sup:>13.4f} {verdict:>12}")
        built.append((family, prof))

    if plt is None:
        return
    os.makedirs(OUT, exist_ok=True)
    s = np.linspace(-6.0, 6.0, 601)
    fig, axes = plt.subplots(2, 4, figsize=(13, 5.5))
    for col, (family, prof) in enumerate(built):
        x, z = geometry.curve_points(prof, s)
        axes[0, col].plot(x, z, lw=1.8)
        axes[0, col].set_title(family)
        axes[0, col].set_aspect("equal")
        axes[1, col].plot(s, prof.kappa(s), lw=1.5)
        axes[1, col].set_xlabel("arclength s")
    axes[0, 0].set_ylabel("curve (x, z)")
    axes[1, 0].set_ylabel(r"curvature $\kappa(s)$")
    fig.suptitle("Curve families and their curvature")
    path = os.path.join(OUT, "geometry_gallery.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
