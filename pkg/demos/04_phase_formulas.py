"""Accumulated phase: closed form, quadrature oracle, and its limits.

The fringe pattern is controlled by the phase between the two crossing
passages.  The closed form integrates the adiabatic level splitting over
the effective width exactly; quadrature of the same integral provides an
independent cross-check.  At large amplitude (l*phi_f >> gap) the phase
simplifies to l*phi_f^2*tau/(phi_f-phi_i), and for phi_f >> |phi_i| it is
simply l*phi_f*tau, which makes 2*pi/T linear in phi_f.

Run:  python3 demos/04_phase_formulas.py
Writes demos/output/phase_fringes.png
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lzspec import (
    TrianglePulse,
    phase_by_quadrature,
    phase_extreme_amplitude,
    phase_large_amplitude,
    population_from_phase,
    stueckelberg_phase,
)

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

slope, gap = 2.0, 2.0

print("phi_f   closed form   quadrature    rel diff   large-ampl   extreme")
for pf in (1.0, 2.0, 8.0, 20.0, 50.0):
    pulse = TrianglePulse(-5.0, pf, 1.0)
    closed = stueckelberg_phase(slope, gap, pulse)
    numeric = phase_by_quadrature(slope, gap, pulse)
    large = phase_large_amplitude(slope, pulse)
    extreme = phase_extreme_amplitude(slope, pulse)
    rel = abs(closed.phi - numeric) / numeric
    flags = ("L" if closed.large_amplitude else "-") \
        + ("E" if closed.extreme_amplitude else "-")
    print(f"{pf:5.1f}   {closed.phi:10.4f}   {numeric:10.4f}   {rel:.1e}"
          f"   {large:10.4f}   {extreme:8.2f}  [{flags}]")

# Fringes predicted by the phase formula at fixed amplitude
taus = np.linspace(0.01, 4.0, 800)
fig, ax = plt.subplots(figsize=(7, 3.2))
for pf in (4.0, 8.0):
    phis = np.array([
        stueckelberg_phase(slope, gap, TrianglePulse(-5.0, pf, t)).phi
        for t in taus
    ])
    ax.plot(taus, population_from_phase(phis), lw=1,
            label=rf"$\Phi_f = {pf:g}$ m$\Phi_0$")
ax.set_xlabel(r"$\tau$ (ns)")
ax.set_ylabel(r"$W_{11}$")
ax.set_title("two-path return population from the closed-form phase")
ax.legend()
fig.tight_layout()
fig.savefig(out / "phase_fringes.png", dpi=150)
print(f"\nwrote {out / 'phase_fringes.png'}")
