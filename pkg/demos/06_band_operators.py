#!/usr/bin/env python3
"""Band operators: propagation in two metrics and the translated-band split.

The flip's permutation matrix has entries all over the anti-diagonal, so
its propagation in the line metric is the window diameter; in the
collapsed metric every entry sits within distance one.  Operators whose
support is bounded in the collapsed metric split as sums of translated
bands T_g M_g with each band narrow in the original metric, uniquely up
to finitely supported corrections near the origin.
"""

import numpy as np

import coarselab as cl
from conftest_util import rng

z = cl.segment_space(-50, 50)
neg = cl.negation_action(z)
e, gamma = neg.identity(), neg.generator("gamma")
dxg = cl.xg_metric(neg, "isometric")

mg = cl.translation_operator(neg, gamma)
print("flip permutation matrix:")
print("  propagation in the line metric:     ", cl.propagation(mg))
print("  propagation in the collapsed metric:", cl.propagation(mg, dxg))

g = rng()
entries = []
for x in z.points:
    for y in z.points:
        if (abs(x - y) <= 1 or abs(x + y) <= 1) and g.random() < 0.4:
            entries.append((x, y, complex(g.normal(), g.normal())))
op = cl.BandOperator.from_entries(z, entries)
print("\nrandom operator on the cross band, propagation:",
      cl.propagation(op), "| collapsed:", cl.propagation(op, dxg))

dec = cl.decompose(op, neg, 1.0, [e, gamma])
for el, term in dec.terms.items():
    name = "*".join(el.word) or "e"
    print(f"  band T_{name}: {term.nnz()} entries, propagation {cl.propagation(term):g}")
print("recombination defect:", dec.recombination_defect())

other = cl.decompose(op, neg, 1.0, [e, gamma], order=[gamma, e])
diffs, verdict = cl.uniqueness_defect(dec, other)
moved = {("*".join(el.word) or "e"): sorted(s) for el, s in diffs.items() if s}
print("difference of the two tie-breakings:", moved or "none")
print("confined to the separation ball:", verdict.status)

s_op = cl.BandOperator.from_entries(z, [(x, x, 1.0 / (1 + abs(x))) for x in z.points])
print("\ncovariance identity (T M_g)(S M_h) = (T g.S) M_gh:",
      cl.homomorphism_check(op, s_op, neg, gamma, gamma))

print("\nconjugating a diagonal operator permutes its diagonal:")
diag = cl.BandOperator.from_entries(z, [(x, x, float(x)) for x in z.points])
moved = cl.conjugate(diag, neg, gamma)
print("  entry at (3,3) before/after:", diag.entry(3, 3).real, "->", moved.entry(3, 3).real)
