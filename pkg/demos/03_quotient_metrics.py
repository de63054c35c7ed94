#!/usr/bin/env python3
"""Quotient metrics for a group action on a window.

The flip x -> -x on the integer line collapses each pair {x, -x}.  The
collapsed metric on the same point set charges each group move one unit;
for a finite group it stays within the maximal word length of the
orbit-space metric, which is how the window certifies that the collapsed
line looks like a ray.
"""

import numpy as np

import coarselab as cl

z = cl.segment_space(-200, 200)
neg = cl.negation_action(z)
print("control value of the flip:", neg.control_values["gamma"])

dxg = cl.xg_metric(neg, "isometric")
print("\ncollapsed metric (infimum of d(x, g.x') + |g|):")
for x, y in [(3, -5), (100, -100), (0, 7)]:
    print(f"  d({x:4d},{y:4d}) = {dxg.dist(x, y):g}   original {z.dist(x, y):g}")

xs = np.array(z.points, dtype=float)
ray = np.abs(np.abs(xs[:, None]) - np.abs(xs[None, :]))
print("max deviation from the ray metric ||x|-|x'||:",
      np.abs(dxg.dmat - ray).max())

general = cl.xg_metric(neg, "general")
print("general-mode chain metric agrees coarsely: d(3,-5) =", general.dist(3, -5))

orbit_min, label = cl.orbit_metric(neg, "min")
orbit_haus, _ = cl.orbit_metric(neg, "hausdorff")
print("\norbit-space distances for [2], [5]:")
print("  min variant:      ", orbit_min.dist(label[2], label[5]))
print("  directed-infimum: ", orbit_haus.dist(label[2], label[5]))

w = max(len(g.word) for g in neg.realized_group())
diff = []
for x in range(-200, 201, 10):
    for y in range(-200, 201, 10):
        diff.append(dxg.dist(x, y) - orbit_min.dist(label[x], label[y]))
print(f"collapsed minus orbit distance lies in [0, {w}]:",
      0 <= min(diff) and max(diff) <= w)

print("\nfiber quotients of the ray by residue mod 5:")
s = cl.segment_space(0, 100)
d_f = cl.quotient_pseudometric(s, lambda p: p % 5, "classical")
d_fp = cl.quotient_pseudometric(s, lambda p: p % 5, "chain")
print("  classical d([0],[1]) =", d_f.dist(0, 1))
print("  chain     d([0],[1]) =", d_fp.dist(0, 1))
print("  chain within (1 + 1/C) of classical everywhere:",
      bool((d_fp.dmat <= 2 * d_f.dmat + 1e-9).all()))
