"""Band dispersion of a bent layer between two half-plane ladders.

A layer bent from tail slope alpha_- = 1 to alpha_+ = 0.5 interpolates
between two straight half-layers.  Each band function runs from the
half-plane level sigma_m(alpha_+) at xi -> -infinity to
sigma_m(alpha_-) at xi -> +infinity, and since sigma_m is strictly
monotone in the slope, every band genuinely disperses: the spectrum in
between is absolutely continuous.  This demo scans three bands across
the transition and overlays both asymptotic ladders.
"""

import os

import numpy as np

from magbands import assembly, bands, geometry

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

OUT = os.path.join(os.path.dirname(__file__), "out")


def main():
    prof = geometry.build_profile("bent", alpha_plus=0.5, alpha_minus=1.0)
    layer = geometry.LayerConfig(prof, 0.1, 1.0)
    grid = assembly.Grid.box(34.0, 849, 32)
    xi = np.linspace(-12.0, 12.0, 13)

    print("scanning 3 bands of the bent layer (a=0.1, B0=1) ...")
    bs = bands.scan_layer_bands(layer, xi, 3, grid, e_max=256.0)
    match = bands.asymptote_match(bs, 0.5, 1.0, 1.0, 0.1)

    print(f"\n{'m':>2} {'sigma_m(0.5)':>13} {'lambda_m[-12]':>14} "
          f"{'sigma_m(1.0)':>13} {'lambda_m[+12]':>14}")
    for m in range(3):
        print(f"{m + 1:>2} {match['sigma_plus'][m]:>13.6f} "
              f"{bs.branches[0, m]:>14.6f} {match['sigma_minus'][m]:>13.6f} "
              f"{bs.branches[-1, m]:>14.6f}")
    print(f"\nend residuals: {np.max(match['residual_xi_min']):.2e} (left), "
          f"{np.max(match['residual_xi_max']):.2e} (right)")
    print("every band drops by "
          f"~{np.mean(match['sigma_minus'] - match['sigma_plus']):.3f} "
          "across the window: no flat bands here")

    if plt is not None:
        os.makedirs(OUT, exist_ok=True)
        fig, ax = plt.subplots(figsize=(6.5, 4))
        for m in range(1, 4):
            ax.plot(bs.xi, bs.branch(m), lw=1.8)
        for v in match["sigma_plus"]:
            ax.axhline(v, color="tab:blue", ls=":", lw=0.8)
        for v in match["sigma_minus"]:
            ax.axhline(v, color="tab:red", ls=":", lw=0.8)
        ax.set_xlabel(r"$\xi$")
        ax.set_ylabel(r"$\lambda_m[\xi]$")
        ax.set_title("Bent-layer bands between their half-plane ladders")
        path = os.path.join(OUT, "bent_asymptotes.png")
        fig.savefig(path, dpi=150, bbox_inches="tight")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
