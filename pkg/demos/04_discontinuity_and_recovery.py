#!/usr/bin/env python3
"""Displacement profiles, separation balls, and element recovery.

The flip's displacement 2|x| grows with the distance from the origin, so
every radius is certified once the window dwarfs it; a translation moves
every point by one and can never be certified.  The separation ball is
the region where distinct elements can still be confused; outside it a
self-map close to the identity pins down a unique element, recoverable
even after scrambling the map near the origin.
"""

import numpy as np

import coarselab as cl
from conftest_util import rng

z = cl.segment_space(-200, 200)
neg = cl.negation_action(z)
e, gamma = neg.identity(), neg.generator("gamma")

profile, verdicts = cl.discontinuity_profile(neg, gamma, [2, 7, 20, 80])
print("flip displacement profile (radius -> min displacement):")
for r, d in profile.rows:
    print(f"  {r:5g} -> {d:g}   verdict: {verdicts[r].status}")

t = cl.translation_action(z)
_, tv = cl.discontinuity_profile(t, t.generator("t"), [2])
print("translation at R=2:", tv[2.0].status)

u = cl.ball_cover(z, 1)
K, sep = cl.separation_bound(neg, [e, gamma], u, u)
print("\nseparation ball for {e, flip} at the 1-ball scale:", sorted(K), sep.status)

print("\none-endedness at the 1-ball scale:")
ray = cl.segment_space(0, 200)
print("  ray  r=10:", cl.one_ended_check(ray, cl.ball_cover(ray, 1), [10])[10.0].status)
print("  line r=10:", cl.one_ended_check(z, u, [10])[10.0].status)

# scramble the flip on B(0,5) and recover it
v = cl.ball_cover(z, 5)
g = rng()
ball = [x for x in z.points if abs(x) <= 5]
f = {x: -x for x in z.points}
for x, y in zip(ball, g.permutation(ball)):
    f[x] = int(y)
res = cl.identify_group_element(f, neg, v, [e, gamma], v)
print("\nrecovered element:", "*".join(res.element.word) or "e",
      "| exceptional points:", sorted(res.exceptional))
print("exceptional set inside the separation ball:", res.exceptional <= res.K)

# a certificate that |x| is a weak quotient onto the ray
ray100 = cl.segment_space(0, 100)
z100 = cl.segment_space(-100, 100)
cert = cl.weak_quotient_certificate(
    z100, ray100, {x: abs(x) for x in z100.points}, 0.0, [5, 10, 20], 5, 50.0
)
print("\nweak quotient certificate for |x| (R, n(R), S(R)):", cert.rows)
