"""Three-level maps and the sweep-rate region partition.

With a second anticrossing (gap13 at +8 mPhi0) the map divides into
regions by the cell sweep rate k = 2*(phi_f - phi_i)/tau relative to the
characteristic rates k_1i = 2*pi*gap_1i^2/l: below k12 only the smaller
crossing acts as a beam splitter (the larger one is passed
adiabatically), above k13 the smaller one is transparent, and in between
both act and the stripes distort.

Run:  python3 demos/06_three_level_regions.py   (~40 s)
Writes demos/output/three_level.png
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lzspec import (
    GridSpec,
    QubitSpectrum,
    characteristic_sweep_rate,
    classify_regions,
    run_sweep,
)

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

slope, gap12, gap13 = 2.0, 2.0, 8.0
spectrum = QubitSpectrum.three_level(slope, gap12, gap13)
grid = GridSpec((-2.0, 16.0, 120), (0.01, 4.0, 160), -5.0)
print("simulating the three-level map (~40 s)...")
imap = run_sweep(grid, spectrum)

k12 = characteristic_sweep_rate(gap12, slope)
k13 = characteristic_sweep_rate(gap13, slope)
labels = classify_regions(imap, gap12, gap13, slope)
print(f"characteristic rates: k12 = {k12:.2f}, k13 = {k13:.2f} mPhi0/ns")
for region in (1, 2, 3):
    share = np.mean(labels == region)
    print(f"region {region}: {share:.1%} of cells")

fig, ax = plt.subplots(figsize=(7, 4))
mesh = ax.pcolormesh(imap.phi_f_axis, imap.tau_axis, imap.values,
                     cmap="viridis", vmin=0.0, vmax=1.0, shading="auto")
fig.colorbar(mesh, label=r"$W_{11}(\tau)$")
# constant-rate boundaries tau = 2*(phi_f - phi_i)/k
pf = np.linspace(max(0.1, imap.phi_f_axis[0]), imap.phi_f_axis[-1], 100)
for k, style in ((k12, "w--"), (k13, "w:")):
    tau_line = 2.0 * (pf - imap.phi_i) / k
    ax.plot(pf, tau_line, style, lw=1.5)
ax.set_ylim(imap.tau_axis[0], imap.tau_axis[-1])
ax.set_xlabel(r"$\Phi_f$ (m$\Phi_0$)")
ax.set_ylabel(r"$\tau$ (ns)")
ax.set_title("gap12=2, gap13=8; dashed k12, dotted k13")
fig.tight_layout()
fig.savefig(out / "three_level.png", dpi=150)
print(f"wrote {out / 'three_level.png'}")
