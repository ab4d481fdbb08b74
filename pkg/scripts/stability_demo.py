#!/usr/bin/env python3
"""End-to-end demo on the bundled default wave: profile, determinant values
by all three methods, and a winding-number mode count.

Usage: python scripts/stability_demo.py [outdir]
"""

import sys
import time
from pathlib import Path

import numpy as np

from zndevans.evans import evans_erpenbeck, evans_lee_stewart, evans_neutral
from zndevans.stability import count_unstable
from zndevans.znd import build_wave, config_to_json, default_config, profile_table


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
    outdir.mkdir(parents=True, exist_ok=True)

    cfg = default_config()
    (outdir / "wave.json").write_text(config_to_json(cfg))
    wave = build_wave(cfg)
    print(f"wave: m={wave.m:.4g}, Neumann u={wave.neumann.u:.4g}, "
          f"burned u={wave.burned.u:.4g}, M_y={wave.M_y:.3g}")

    cols = profile_table(wave, n=300)
    rows = ["y,x,rho,u,e,Y,p,T"]
    for i in range(len(cols["y"])):
        rows.append(",".join(f"{cols[k][i]:.17g}" for k in ("y", "x", "rho", "u", "e", "Y", "p", "T")))
    (outdir / "profile.csv").write_text("\n".join(rows) + "\n")

    print("\ndeterminant at a few frequencies (value, mesh points, seconds):")
    for lam in (0.5 + 0.5j, 1.0 + 1.0j, 1.0 + 3.0j):
        line = [f"lambda={lam}"]
        for fn, tag in ((evans_neutral, "neutral"), (evans_erpenbeck, "erpenbeck"),
                        (evans_lee_stewart, "lee_stewart")):
            t0 = time.time()
            r = fn(wave, lam, tol=1e-6)
            d = r.D * r.kappa_to_neutral
            line.append(f"{tag}: {d:.6g} ({r.stats.mesh_points} pts, {time.time()-t0:.2f}s)")
        print("  " + "; ".join(line))

    report = count_unstable(wave, radius=2.0, tol=1e-5)
    print(f"\nunstable modes inside radius 2: {report.winding} "
          f"({report.n_samples} samples, min |D| = {report.min_abs_D:.3e})")
    samples = np.column_stack([report.contour.nodes, report.samples])
    rows = ["re_lambda,im_lambda,re_D,im_D"]
    for z, v in samples:
        rows.append(f"{z.real:.17g},{z.imag:.17g},{v.real:.17g},{v.imag:.17g}")
    (outdir / "contour.csv").write_text("\n".join(rows) + "\n")
    print(f"outputs under {outdir}/")


if __name__ == "__main__":
    main()
