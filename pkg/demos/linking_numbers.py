"""Linking numbers in S^3 and H^3 by three independent methods.

Run with ``python demos/linking_numbers.py``.
"""

from mahlerlink.core import McConfig
from mahlerlink.linking import (cone_mc_estimator, crossing_oracle,
                                hyperbolic_hopf_pair, link_hyperbolic,
                                link_sphere, lorentz_boost, preset)


def main():
    print("pair        kernel      crossings  cone MC")
    for name in ("hopf", "unlinked", "doubled", "isotopy3"):
        c1, c2 = preset(name)
        k = link_sphere(c1, c2)
        x = crossing_oracle(c1, c2)
        m = cone_mc_estimator(c1, c2, McConfig(2000, seed=1))
        print(f"{name:10s}  {k.value:+.6f}  {x:+d}         {m.value:+.3f}")

    c1, c2 = hyperbolic_hopf_pair(0.1)
    print(f"\nH^3 Hopf pair at radius 0.1: {link_hyperbolic(c1, c2).value:.8f}")
    B = lorentz_boost(0.7, 2)
    r = link_hyperbolic(c1.transformed(B), c2.transformed(B))
    print(f"after a boost of rapidity 0.7: {r.value:.8f}")


if __name__ == "__main__":
    main()
