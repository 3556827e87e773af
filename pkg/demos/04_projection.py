"""
Projection onto discrete Lipschitz functions
============================================

In increment coordinates (value at the origin, then outward differences)
the K-Lipschitz functions vanishing at 0 form a box, so the projection is a
clamp followed by a cumulative sum.
"""

import numpy as np

from smtransport.lipproj import from_increments, in_lipschitz_set, norm_R, project, to_increments

dx, K = 0.1, 1.5
x = np.arange(-5, 6) * dx

phi = 10 * x + 0.3
print("phi         ", np.round(phi, 3))
print("increments  ", np.round(to_increments(phi), 3))
p = project(phi, K, dx)
print("projected   ", np.round(p, 3))
print("member:", in_lipschitz_set(p, K, dx), " idempotent:", np.array_equal(project(p, K, dx), p))

# the norm is the Euclidean norm of the increments, and P is nonexpansive in it
rng = np.random.default_rng(0)
worst = -np.inf
for _ in range(1000):
    a, b = rng.normal(size=(2, x.size))
    worst = max(worst, norm_R(project(a, K, dx) - project(b, K, dx)) - norm_R(a - b))
print("max of |Pa - Pb|_R - |a - b|_R over 1000 pairs:", worst)

# the transform is a bijection; the roundtrip is exact on dyadic data
d = np.round(rng.normal(size=x.size) * 64) / 64
print("dyadic roundtrip exact:", np.array_equal(from_increments(to_increments(d)), d))
