"""Audit the fig5 heatmaps: is fidelity non-increasing in omega_w at every cell?

Runs fig5a, fig5b and fig5c in full (1500 cells, roughly 13 minutes on one
core) and lists every (loss, g) cell where a larger detuning gives a higher
fidelity than the integrator tolerance can explain.
"""

import argparse

import numpy as np

from wgqed.sweep import preset, run_preset_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description="fig5 detuning-ordering audit")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)

    presets = [preset(n) for n in ("fig5a", "fig5b", "fig5c")]
    grids = [run_preset_sweep(p, jobs=args.jobs).grid() for p in presets]
    opts = presets[0].opts
    loss, g = presets[0].axes
    found = 0
    for (lo, hi), (f_lo, f_hi) in zip([(10, 20), (20, 50)], zip(grids, grids[1:])):
        rise = f_hi - f_lo
        floor = opts.rel_tol * np.abs(f_lo) + opts.abs_tol
        for i, j in np.argwhere(rise > floor):
            found += 1
            print(f"w_w {lo} -> {hi} GHz at loss {loss.values[i]:.4g} GHz, g {g.values[j]:.4g} GHz: "
                  f"F {f_lo[i, j]:.6f} -> {f_hi[i, j]:.6f}")
        print(f"w_w {lo} -> {hi} GHz: largest rise {np.nanmax(rise):.3g}")
    print(f"{found} violating cells out of {2 * grids[0].size} comparisons")


if __name__ == "__main__":
    main()
