"""How deep can a node usefully see?

The second-largest eigenvalue of the normalized adjacency sets the
decay rate toward the stationary state, and from it every node gets a
depth bound: past K(i, eps) its representation sits within eps of the
degree-determined limit. High-degree nodes hit their limit sooner, so
one global depth cannot fit all nodes, which is the case for per-node
gating.
"""

import numpy as np

from ndgg import KBoundConfig, connected_components, k_bound, lambda2, normalize_adjacency
from ndgg.synthetic import make_planted_dataset

dataset = make_planted_dataset()
g = dataset.graph

a_hat = normalize_adjacency(g)
comps = connected_components(g)
lam2 = lambda2(a_hat, comps)
print(f"lambda2 = {lam2:.6f} (spectral gap {1 - lam2:.6f})")

result = k_bound(g, KBoundConfig(eps=1e-3), lam2)
print(f"depth bound K(i, 1e-3): min {result.k.min():.1f}, "
      f"median {np.median(result.k):.1f}, max {result.k.max():.1f}\n")

print(f"{'degree':>6} {'nodes':>6} {'mean K':>8}")
for lo, hi in ((0, 2), (2, 4), (4, 8), (8, None)):
    sel = (g.degrees >= lo) & (g.degrees < (hi if hi is not None else np.inf))
    if sel.any():
        label = f"[{lo}-{hi})" if hi is not None else f"[{lo}-inf)"
        print(f"{label:>6} {int(sel.sum()):>6} {result.k[sel].mean():>8.2f}")

print("\nThe bound shrinks as degree grows: well-connected nodes are the")
print("first to over-smooth, while sparse nodes could still benefit")
print("from more hops.")
