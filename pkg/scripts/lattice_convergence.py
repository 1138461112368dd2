"""Refine the momentum lattice at fixed window and compare with K0 and with the windowed integral.

The lattice sum is a trapezoid rule for the integral over ``[-k_max, k_max]``;
its ``dk -> 0`` limit is that windowed integral, not the full ``K_0`` value.
Increasing ``k_max`` shows the window error shrinking like ``1/k_max``.
"""
import argparse
import math

import numpy as np

from pbkg import field, modespace as ms
from pbkg.bessel import bessel_k0
from pbkg.cli import observed_orders
from pbkg.quadrature import QuadSpec, integrate_interval


def windowed(x, m, k_max):
    f = lambda k: np.cos(2 * x * k) / np.sqrt(k * k + m * m)  # noqa: E731
    return float(integrate_interval(f, 0.0, k_max, QuadSpec(), n_panels=max(8, int(k_max))).value) / (2 * math.pi)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--k-max", type=float, nargs="+", default=[40.0, 160.0])
    p.add_argument("--dk", type=float, nargs="+", default=[0.1, 0.05, 0.025])
    a = p.parse_args()
    oracle = bessel_k0(2 * a.m * a.x) / (2 * math.pi)
    print("k_max,dk,M,im,rel_err_K0,rel_err_window,order")
    for k_max in a.k_max:
        win = windowed(a.x, a.m, k_max)
        vals = []
        for dk in a.dk:
            lat = ms.ModeLattice.from_window(k_max, dk, a.m)
            vals.append(field.two_point(math.pi / 4, a.x, 0.0, a.x, 0.0, lat).imag)
        for dk, v, o in zip(a.dk, vals, observed_orders(vals)):
            M = ms.ModeLattice.from_window(k_max, dk, a.m).M
            print(f"{k_max},{dk},{M},{v:.12g},{abs(v - oracle) / oracle:.3e},{abs(v - win) / abs(win):.3e},{o:.4f}")


if __name__ == "__main__":
    main()
