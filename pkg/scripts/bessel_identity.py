"""Oscillatory quadrature of int cos(b k)/omega_k dk against K0(m b), both tail methods."""
import argparse

from pbkg.bessel import bessel_k0
from pbkg.correlators import bessel_integral
from pbkg.quadrature import TAIL_METHODS, QuadSpec


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--m", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    p.add_argument("--b", type=float, nargs="+", default=[0.2, 0.5, 1.0, 2.0, 4.0, 10.0])
    a = p.parse_args()
    print("m,b,method,value,rel_error,err_estimate")
    for m in a.m:
        for b in a.b:
            ref = bessel_k0(m * b)
            for method in TAIL_METHODS:
                r = bessel_integral(b, m, QuadSpec(tail_method=method))
                print(f"{m},{b},{method},{r.value:.15g},{abs(r.value - ref) / ref:.2e},{r.err:.1e}")


if __name__ == "__main__":
    main()
