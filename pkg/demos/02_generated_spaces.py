#!/usr/bin/env python3
"""The example windows: segments, k-pods, weighted cones, box spaces."""

import numpy as np

import coarselab as cl
from conftest_util import cycle_space  # local helper, see demos/conftest_util.py

line = cl.segment_space(-100, 100)
ray = cl.segment_space(0, 100)
print("line:", line)
print("ray: ", ray)

tripod = cl.axes_space(3, 20)
print("\ntripod distance between arms 0 and 1 at heights 4 and 5:",
      tripod.dist("0:4", "1:5"))

# a cone over a hexagon: level gaps are cheap near the apex, base moves
# get more expensive higher up
cone = cl.cone_space(cl.ConeSpec(cycle_space(6), (0, 1, 2, 3, 4), lambda t: t))
print("\ncone over the 6-cycle (weight t):")
for t in (1, 2, 4):
    print(f"  one base step at level {t}: cost {cone.dist(f'0@{t}', f'1@{t}'):g}")
print("  apex to the top level:", cone.dist("apex", "0@4"))

# box space over the tower 3 | 9 | 27
box, shift = cl.box_space(cl.BoxSpec(moduli=(3, 9, 27)))
print("\nbox space over (3, 9, 27):", box)
print("within level 2, d([1],[8]) =", box.dist("L2:1", "L2:8"))
cross12 = min(box.dist(f"L1:{a}", f"L2:{b}") for a in range(3) for b in range(9))
print("set distance between levels 1 and 2:", cross12, "(must exceed 1+2)")
perm = shift.perms["t"]
print("translation is an isometry:",
      np.array_equal(box.dmat[perm][:, perm], box.dmat))

print("\nall four pass the axiom suite:",
      all(cl.metric_axiom_violations(s) == [] for s in (line, ray, tripod, cone, box)))
