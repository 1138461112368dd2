"""Log-divergence slope of the coincident two-point function across deformation angles."""
import argparse
import math

import numpy as np

from pbkg.correlators import divergence_scan


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--n", type=int, default=9, help="number of angles in [0, pi/4]")
    a = p.parse_args()
    print("theta,slope,cos2theta_over_2pi,fit_residual")
    for th in np.linspace(0.0, math.pi / 4, a.n):
        s = divergence_scan(th, a.x, a.m)
        print(f"{th:.6f},{s.slope:.8f},{math.cos(2 * th) / (2 * math.pi):.8f},{s.fit_residual:.2e}")


if __name__ == "__main__":
    main()
