"""Triangle drive signal and the qubit spectrum it sweeps through.

The experiment's control knob is the flux detuning: a triangle pulse
starts at phi_i, ramps linearly to phi_f at t = tau/2 and returns.  The
qubit spectrum along that sweep is a pair (or triple) of linear diabatic
branches with avoided crossings where interwell tunneling lifts the
degeneracy.

Run:  python3 demos/01_pulse_and_spectrum.py
Writes demos/output/pulse_and_spectrum.png
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lzspec import QubitSpectrum, TrianglePulse

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

# The reference geometry: start at -5 mPhi0, sweep to +8 in 2 ns.
pulse = TrianglePulse(phi_i=-5.0, phi_f=8.0, tau=2.0)
print(f"sweep rate k = {pulse.sweep_rate:.3f} mPhi0/ns")
print(f"effective width tau* = {pulse.effective_width():.4f} ns "
      "(time between the two crossings of dphi = 0)")

t = np.linspace(0.0, pulse.tau, 400)
detuning = np.array([pulse.detuning_at(ti) for ti in t])

# Two-level spectrum: slope 2 "GHz"/mPhi0, gap 2 "GHz" (rad/ns) at dphi = 0.
spectrum = QubitSpectrum.two_level(slope=2.0, gap=2.0)
dphi = np.linspace(-6.0, 10.0, 400)
diabatic = np.array([spectrum.diagonal(x) for x in dphi])
adiabatic = np.array([spectrum.adiabatic_levels(x) for x in dphi])

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
ax1.plot(t, detuning)
ax1.axhline(0.0, color="gray", lw=0.5)
for tc in pulse.crossing_times():
    ax1.axvline(tc, color="tab:red", ls=":", lw=1)
ax1.set_xlabel("t (ns)")
ax1.set_ylabel(r"flux detuning (m$\Phi_0$)")
ax1.set_title("triangle drive; dotted: crossing passages")

ax2.plot(dphi, diabatic[:, 0], "k--", lw=1, label="diabatic")
ax2.plot(dphi, diabatic[:, 1], "k--", lw=1)
ax2.plot(dphi, adiabatic, lw=1.5)
ax2.set_xlabel(r"flux detuning (m$\Phi_0$)")
ax2.set_ylabel("energy (rad/ns)")
ax2.set_title("two-level spectrum, gap 2 at the crossing")
ax2.legend()
fig.tight_layout()
fig.savefig(out / "pulse_and_spectrum.png", dpi=150)
print(f"wrote {out / 'pulse_and_spectrum.png'}")

# The three-level variant adds the |R1> branch crossing at +8 mPhi0.
three = QubitSpectrum.three_level(slope=2.0, gap12=2.0, gap13=8.0)
print("\nthree-level Hamiltonian at the second crossing (dphi = 8):")
print(np.array_str(three.hamiltonian(8.0), precision=2))
