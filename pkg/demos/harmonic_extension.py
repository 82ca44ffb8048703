"""Accuracy of the boundary-integral harmonic extension on the disk.

Three quick experiments on the unit disk:

1. Boundary data sampled from u = x^2 - y^2 + 2 (harmonic, so u is its
   own extension).  Max error on two concentric evaluation disks as the
   node count doubles: geometric convergence whose rate is set by the
   distance to the rim, so the 0.8-radius disk converges much faster
   than the 0.9-radius one.
2. Linear data f = y, whose extension is the uniform field (0, -1).
3. Constant data, reproduced exactly at any node count.
"""

import numpy as np

from freepif.dirichlet import DiskBoundary, harmonic_field, harmonic_potential
from freepif.scenarios import laplace_convergence_study


def main():
    sweeps = {
        shrink: laplace_convergence_study(shrink=shrink) for shrink in (0.9, 0.8)
    }
    nodes = sweeps[0.9]["n_nodes"]
    print("harmonic extension of x^2 - y^2 + 2, max error by evaluation disk:")
    print(f"  {'nodes':>6} {'radius 0.9':>12} {'radius 0.8':>12}")
    for i, n in enumerate(nodes):
        print(
            f"  {n:>6d} {sweeps[0.9]['max_error'][i]:>12.4e}"
            f" {sweeps[0.8]['max_error'][i]:>12.4e}"
        )
    print()

    # node-count rule of thumb: error at radius fraction q decays like q^N,
    # so keep q^N tiny for the pointwise checks below
    rng = np.random.default_rng(8)
    angles = rng.uniform(0.0, 2 * np.pi, 200)
    radii = 0.7 * np.sqrt(rng.uniform(0.0, 1.0, 200))
    targets = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])

    boundary = DiskBoundary(1.0, 256)
    field = harmonic_field(boundary, boundary.nodes[:, 1], targets)
    dev = np.max(np.abs(field - np.array([0.0, -1.0])))
    print(f"data f = y, 256 nodes: field deviation from (0, -1) is {dev:.2e}")

    small = DiskBoundary(1.0, 96)
    values = harmonic_potential(small, np.full(96, 3.25), targets)
    print(
        f"constant data 3.25, 96 nodes: max extension error "
        f"{np.max(np.abs(values - 3.25)):.2e}"
    )


if __name__ == "__main__":
    main()
