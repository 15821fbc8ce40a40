"""Selecting high-quality subsets from the two-axis quality space.

Every scored sample sits at a point (clip_score, loss). Three strategies
carve out subsets:

  dis -- bounds on clip_score only
  dil -- bounds on loss only
  diq -- the intersection of both

and each also has a top-fraction form that finds its own thresholds.
"""

from qspace.core import Bounds1D, Bounds2D
from qspace.selection import select_dil, select_diq, select_dis, select_top_fraction

from demo_corpus import demo_index

index = demo_index()
print(f"corpus: {index.n} scored samples")

# explicit bounds: keep samples whose image-text agreement is at least 0.4
dis = select_dis(index, Bounds1D(0.4, 1.0))
print(f"dis [0.4, 1.0]           -> {len(dis.ids):5d} ids")

# keep samples the reference model found hard (summed token loss >= 6 nats)
dil = select_dil(index, Bounds1D(6.0))
print(f"dil [6.0, inf)           -> {len(dil.ids):5d} ids")

# both at once; the result is exactly the intersection
diq = select_diq(index, Bounds2D(Bounds1D(0.4, 1.0), Bounds1D(6.0)))
assert set(diq.ids) == set(dis.ids) & set(dil.ids)
print(f"diq = dis ^ dil          -> {len(diq.ids):5d} ids")

# top-fraction form: ask for the best 5% and let the thresholds fall out
for strategy in ("dis", "dil", "diq"):
    m = select_top_fraction(index, strategy, 0.05)
    print(f"top 5% by {strategy}            -> {len(m.ids):5d} ids, "
          f"params {m.params}")

# manifests are ordered by descending selection rank, so the head of the
# list is the most extreme sample under that strategy
best = select_top_fraction(index, "dis", 0.05).ids[0]
print(f"highest-similarity pick: {best} "
      f"(clip_score {index.clip_score[index.row(best)]:.3f})")
