"""Mahler volumes of standard bodies against the closed-form constants.

Run with ``python demos/mahler_constants.py``.
"""

import math

from mahlerlink.bodies import ball, cross_polytope, cube, lp_ball, simplex
from mahlerlink.necks import diamond_volume
from mahlerlink.volumes import closed_form_constants, mahler_volume


def main():
    print("n   gamma_n     delta_n     v(C_n)")
    for n in range(1, 9):
        c = closed_form_constants(n)
        print(f"{n}   {c.gamma_n:.6f}   {c.delta_n:.6f}   {4**n / math.factorial(n):.4f}")

    print("\nbody                 v(K)      upper v(B_n)")
    for K in (ball(2), cube(2), cross_polytope(2), lp_ball(2, 4.0), simplex(2),
              ball(3), cube(3)):
        r = mahler_volume(K)
        upper = math.pi**K.n / math.gamma(K.n / 2 + 1) ** 2
        print(f"{K.describe():20s} {r.mahler:8.4f}  {upper:8.4f}")

    # The diamond of the square, reached by smoothing the cube into l_p balls.
    d = diamond_volume(cube(2))
    print("\nsmoothed diamond volumes for C_2:",
          ", ".join(f"{v:.4f}" for v in d.details["sequence"]),
          "(p = 8..64, v(C_2) = 8)")


if __name__ == "__main__":
    main()
