"""
A tour of the channel catalogue
===============================

Closed-form actions and spectra of the built-in channel families.
"""

import numpy as np

from cptwb import channels as chan
from cptwb import linalg as la
from cptwb import zoo

# The antisymmetric family maps rho to (I Tr(rho) - rho^T)/(d-1).  Every
# pure input comes out with the flat spectrum (1/(d-1), ..., 1/(d-1), 0).
for d in (3, 4):
    phi = zoo.werner_holevo(d)
    psi = np.zeros(d, dtype=complex)
    psi[0] = 1.0
    w = la.psd_eigvals(chan.apply(phi, np.outer(psi, psi.conj())), what="output")
    print(f"antisymmetric d={d}: {len(phi)} Kraus, pure-input spectrum",
          np.round(w, 6))

# Mixing with the identity interpolates straight lines in Choi space.
mixed = zoo.depolarized_wh(3, 0.25)
print("depolarized mix Choi rank:", chan.choi_rank(mixed))

# The d = 3 transpose-shift channel rho -> (I + rho - rho^T)/3 fixes every
# real density matrix ...
fss = zoo.fss_psi()
rho_real = np.array([[0.5, 0.2, 0.0], [0.2, 0.3, 0.1], [0.0, 0.1, 0.2]])
out = chan.apply(fss, rho_real)
print("real input deviation from I/3:", f"{np.abs(out - np.eye(3) / 3).max():.2e}")

# ... but a coherent pair (1, i, 0)/sqrt(2) picks up the imaginary part:
psi = np.array([1.0, 1.0j, 0.0]) / np.sqrt(2)
w = la.psd_eigvals(chan.apply(fss, np.outer(psi, psi.conj())), what="output")
print("coherent-pair spectrum:", np.round(w, 6), " (2/3, 1/3, 0)")

# Sub-unitary shift channels embed (d-1)-dimensional unitaries in cyclic
# coordinate windows.  With 90-degree rotation blocks at d = 3 the family
# reproduces the antisymmetric channel exactly.
rot = np.array([[0.0, 1.0], [-1.0, 0.0]])
phi_rot = zoo.shift_subunitary(3, [rot, rot, rot])
print("rotation blocks == antisymmetric channel:",
      chan.choi_distance(phi_rot, zoo.werner_holevo(3)) < 1e-12)

# At d = 4 the windows are 3-dimensional and can carry 3-cycles; the four
# cycles below sit one per window (1-based symbols).
cycles = [(1, 2, 3), (1, 3, 4), (1, 4, 2), (2, 4, 3)]
phi4 = zoo.shift_subunitary(4, zoo.cycle_window_unitaries(4, cycles))
print("d=4 cycle channel valid:", chan.validate_cpt(phi4).ok,
      " Choi rank:", chan.choi_rank(phi4))

# Near-depolarizing channels keep every output within epsilon of I/d.
near, info = zoo.near_depolarizing(3, 1e-3, seed=1, return_info=True)
print("near-depolarizing mixing weight:", f"{info['delta']:.3e}")

# Families are addressable by name through ChannelSpec, which serializes
# to JSON for the command line front end.
spec = zoo.ChannelSpec("depolarized_wh", d=3, x=0.25)
print("spec JSON:", spec.to_json())
print("spec builds the same channel:",
      chan.choi_distance(spec.build(), mixed) == 0.0)
