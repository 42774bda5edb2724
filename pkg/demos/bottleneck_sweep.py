"""Weighted invariant and filled-join volume of perturbed necks in R^(2,2).

The weighted invariant stays fixed while the filled join can only grow.
Run with ``python demos/bottleneck_sweep.py``.
"""

import numpy as np

from mahlerlink.core import Signature
from mahlerlink.kernels import solve_pseudosphere_kernel
from mahlerlink.necks import flat_neck, random_graph_neck, weighted_invariant


def main():
    sig = Signature(2, 2)
    kernel = solve_pseudosphere_kernel(2, 2, 4.0)
    flat = weighted_invariant(flat_neck(sig, "positive"), flat_neck(sig, "negative"),
                              kernel=kernel)
    print(f"flat necks: w = {flat.w:.6f}, l = {flat.value:.6f}")
    print("eps    w          l          w - l")
    rng = np.random.default_rng(0)
    for eps in (0.0, 0.1, 0.2, 0.3):
        r = weighted_invariant(random_graph_neck(sig, "positive", eps, rng),
                               random_graph_neck(sig, "negative", eps, rng),
                               kernel=kernel)
        print(f"{eps:.1f}    {r.w:.6f}   {r.value:.6f}   {r.w - r.value:.6f}")


if __name__ == "__main__":
    main()
