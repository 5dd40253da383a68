"""
Extreme points of the CPT polytope
==================================

Classify channels as extreme / generalized extreme and repair a
non-extreme channel by a small Kraus perturbation.
"""

import numpy as np

from cptwb import channels as chan
from cptwb import zoo
from cptwb._rng import haar_unitary, rng_from

# A channel is extreme iff its products {A_j^dagger A_k} are linearly
# independent; generalized extreme needs only Choi rank <= d_in.
u = haar_unitary(3, rng_from(1))
unitary = chan.KrausChannel.from_kraus([u])
print("unitary channel extreme:", chan.is_extreme(unitary))

print("depolarizing qubit extreme:", chan.is_extreme(zoo.depolarizing(2)),
      " (Choi rank", chan.choi_rank(zoo.depolarizing(2)), "> d)")

# An even mixture of two unitaries has Choi rank 2 <= d but the products
# {I, U1^dagger U2, U2^dagger U1, I} are dependent: generalized extreme
# without being extreme.
rng = rng_from(2)
u1, u2 = haar_unitary(3, rng), haar_unitary(3, rng)
mix = chan.KrausChannel.from_kraus([u1 / np.sqrt(2), u2 / np.sqrt(2)])
meta = chan.classify(mix)
print("mixed unitary:", "extreme:", meta.is_extreme,
      " generalized extreme:", meta.is_generalized_extreme,
      " Choi rank:", meta.choi_rank)

# perturb_to_extreme nudges the Kraus operators toward a random isometry
# direction and renormalizes; halving epsilon until the result is both
# CPT and extreme.  Smaller budgets move the channel less.
for eps in (0.1, 0.05, 0.025):
    res = chan.perturb_to_extreme(mix, epsilon0=eps, seed=3)
    print(f"eps0 = {eps:<6}: extreme = {chan.is_extreme(res.channel)},",
          f"Choi distance moved = {res.choi_distance:.4e},",
          f"halvings = {res.halvings}")

# The two-Kraus qubit-input family is generalized extreme by
# construction.  With the default bases both operators are diagonal and
# the channel is not extreme; feeding the second operator into a swapped
# basis (amplitude-damping style) makes it genuinely extreme.
diag = zoo.qubit_generalized_extreme([0.35, 0.85])
print("shared output basis:", chan.classify(diag))
swap = np.array([[0.0, 1.0], [1.0, 0.0]])
damp = zoo.qubit_generalized_extreme([1.0, 0.6], w=swap)
print("swapped second basis:", chan.classify(damp))
