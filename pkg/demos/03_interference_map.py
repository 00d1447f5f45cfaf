"""Interference map: final |L0> population over (phi_f, tau).

One pulse integration per grid cell; fringes appear once the apex
crosses the anticrossing (phi_f > 0) and their period along tau encodes
the spectrum slope.  This reduced-resolution map takes ~20 s; the
full-resolution preset is available as `lzspec sweep --preset fig1b`.

Run:  python3 demos/03_interference_map.py
Writes demos/output/map.csv, map.pgm, map.png
"""

import pathlib
import time

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from lzspec import GridSpec, QubitSpectrum, run_sweep, write_csv, write_pgm

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

spectrum = QubitSpectrum.two_level(slope=2.0, gap=2.0)
grid = GridSpec(phi_f_range=(-2.0, 10.0, 120), tau_range=(0.01, 4.0, 200),
                phi_i=-5.0)

start = time.perf_counter()
imap = run_sweep(grid, spectrum)
print(f"{grid.phi_f_range[2] * grid.tau_range[2]} cells in "
      f"{time.perf_counter() - start:.1f} s")

write_csv(imap, out / "map.csv")
write_pgm(imap, out / "map.pgm")
print(f"wrote {out / 'map.csv'} and {out / 'map.pgm'}")

fig, ax = plt.subplots(figsize=(6, 4))
mesh = ax.pcolormesh(imap.phi_f_axis, imap.tau_axis, imap.values,
                     cmap="viridis", vmin=0.0, vmax=1.0, shading="auto")
fig.colorbar(mesh, label=r"$W_{11}(\tau)$")
ax.set_xlabel(r"$\Phi_f$ (m$\Phi_0$)")
ax.set_ylabel(r"$\tau$ (ns)")
ax.set_title("two-level interference map (slope 2, gap 2)")
fig.tight_layout()
fig.savefig(out / "map.png", dpi=150)
print(f"wrote {out / 'map.png'}")
