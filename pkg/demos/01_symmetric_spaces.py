"""Tour of the symmetric-space layer: restricted roots, multiplicities,
and the orthonormalized root basis.

Builds a few su(m,n) realizations and one sl(k,C) realization, prints their
root data, and spot-checks the two structural facts everything else rests
on: trace-pairing orthonormality and the ladder relation
[embed(q), E+] = alpha(q) E-.
"""

import numpy as np

from spincal import algebra
from spincal.algebra import SpaceSpec

rng = np.random.default_rng(1)

for spec in (SpaceSpec.su(2, 1), SpaceSpec.su(3, 2), SpaceSpec.sl(3)):
    space = algebra.build_space(spec)
    print(f"\n=== {space.label()} (ambient {space.N}x{space.N}) ===")
    print(f"rank(A) = {space.rank}, dim M = {space.dim_m}, "
          f"dim algebra = {space.dim_algebra}")
    print("positive roots and multiplicities:")
    for root, mult in zip(space.roots, space.mult):
        print(f"  {root.label():8s}  mult {mult}")
    print(f"dimension bookkeeping: {space.rank} + {space.dim_m} + 2*{space.K} "
          f"= {space.rank + space.dim_m + 2 * space.K}")

    # orthonormality of the full basis under <X,Y> = Re tr(XY)
    stack = np.concatenate([space.eplus, space.eminus])
    gram = np.einsum("iab,jba->ij", stack, stack).real
    target = np.diag(np.concatenate([-np.ones(space.K), np.ones(space.K)]))
    print(f"orthonormality residual: {np.abs(gram - target).max():.2e}")

    # ladder relation at a random regular point
    q = algebra.random_chamber_point(space, rng)
    Q = algebra.embed(space, q)
    av = space.alpha_cols(q)
    worst = max(np.abs(Q @ space.eplus[j] - space.eplus[j] @ Q
                       - av[j] * space.eminus[j]).max() for j in range(space.K))
    print(f"ladder-relation residual at q = {np.round(q, 3)}: {worst:.2e}")

# functional calculus of ad_q: odd functions swap the two ladders
space = algebra.build_space(SpaceSpec.su(2, 1))
q = np.array([0.37])
j = list(space.e_labels).index("2e1:im")
out = algebra.ad_fn(space, "tanh", q, space.eminus[j])
print(f"\ntanh(ad_q) E-_2e1 = tanh(2q) E+_2e1: residual "
      f"{np.abs(out - np.tanh(0.74) * space.eplus[j]).max():.2e}")
