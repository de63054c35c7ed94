#!/usr/bin/env python3
"""Averaging a partition of unity over an almost-invariant element set.

Tent functions witness small variation along the line; averaging them
over a symmetric-difference-small element set also makes them almost
invariant in the group directions, at the cost of doubling supports.
That is exactly the trade that transports an exactness witness from a
window to its collapsed quotient.
"""

import numpy as np

import coarselab as cl
from conftest_util import rng

z = cl.segment_space(-100, 100)
neg = cl.negation_action(z)
e, gamma = neg.identity(), neg.generator("gamma")
u = cl.ball_cover(z, 1)

hat = cl.hat_partition(z, 10)
print("tent partition, pitch 10:")
print("  variation at the 1-ball scale:", cl.variation(hat, u))
print("  witness check (eps=0.5):", cl.exactness_witness_check(hat, u, 0.5).status)

blocks = cl.block_partition(z, 10)
print("block indicators, length 10:")
print("  variation:", cl.variation(blocks, u), "-> fails:",
      cl.exactness_witness_check(blocks, u, 0.5).status)

E = cl.FolnerSet((e, gamma))
print("\ndefect of the whole two-element group:", cl.folner_defect(E, gamma))

t = cl.translation_action(z)
for n in (5, 10, 50):
    En = cl.FolnerSet(tuple(t.element(["t"] * k) for k in range(n)))
    print(f"defect of the window {{0..{n-1}}} under one step:",
          cl.folner_defect(En, t.generator('t')))

g = rng()
w = g.random((len(z.points), 8))
w /= w.sum(axis=1, keepdims=True)
phi = cl.PartitionOfUnity(z, list(range(8)), w)
psi = cl.folner_average(phi, E, neg)
move = np.abs(psi.weights[gamma.perm] - psi.weights).sum(axis=1).max()
print("\nrandom partition: after averaging over {e, flip},")
print("  worst l1 move under the flip:", move, "(bounded by the defect 0)")
print("  rows still sum to one:", np.abs(psi.weights.sum(1) - 1).max() < 1e-9)
