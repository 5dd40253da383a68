"""
Channels, Choi matrices, and complements
========================================

Build a channel from Kraus operators, validate it, convert it to its Choi
matrix and back, and inspect its complement.
"""

import numpy as np

from cptwb import channels as chan
from cptwb import linalg as la
from cptwb import zoo
from cptwb._rng import random_density

# A random 6-operator channel from C^3 to C^2, seeded for reproducibility.
phi = zoo.random_channel(3, 2, 6, seed=42)
print("channel:", phi.d_in, "->", phi.d_out, "with", len(phi), "Kraus operators")

# Validation checks trace preservation (sum A†A = I) and complete
# positivity (the Choi matrix is PSD).
report = chan.validate_cpt(phi)
print("valid CPT:", report.ok, " tp residual:", f"{report.tp_residual:.2e}")

# Apply the channel to a random density matrix; the output stays a state.
rho = random_density(3, np.random.default_rng(0))
out = chan.apply(phi, rho)
print("output trace:", f"{np.trace(out).real:.12f}")

# The Choi matrix is trace one, and its rank counts the *independent*
# Kraus operators.  Six operators drawn at random in a 3x2 system can be
# linearly dependent, so converting Choi -> Kraus gives a minimal set.
choi = chan.kraus_to_choi(phi)
print("Choi trace:", f"{np.trace(choi.matrix).real:.12f}")
print("Choi rank:", chan.choi_rank(phi))

minimal = chan.choi_to_kraus(choi)
print("minimal Kraus count:", len(minimal))
print("round-trip Choi distance:", f"{chan.choi_distance(phi, minimal):.2e}")

# The complement keeps what leaks to the environment.  On a pure input the
# direct and complementary outputs share their nonzero spectrum.
comp = chan.complement(minimal)
psi = np.zeros(3, dtype=complex)
psi[0] = 1.0
pure = np.outer(psi, psi.conj())
w_out = la.psd_eigvals(chan.apply(minimal, pure), what="output")
w_env = la.psd_eigvals(chan.apply(comp, pure), what="environment output")
print("direct spectrum:     ", np.round(w_out, 6))
print("environment spectrum:", np.round(w_env[: len(w_out)], 6))

# The complement of the noiseless channel discards everything: it is the
# trace map to a one-dimensional output.
trace_map = chan.complement(zoo.identity_channel(3))
print("complement of identity maps to dimension:", trace_map.d_out)
