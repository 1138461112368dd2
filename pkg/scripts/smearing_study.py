"""Smear the momentum two-point kernel with delta-sequences and Gaussians of shrinking width."""
import argparse

from pbkg import testfn as tf
from pbkg.correlators import g2_oracle, g2_pi4_regularized


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--y", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    p.add_argument("--n", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    a = p.parse_args()
    mother = tf.standard_mother()
    print("family,param,y,im,oracle_im,rel_error")
    for y in a.y:
        oracle = g2_oracle(y, a.m)
        for n in a.n:
            v = tf.smear_g2(tf.delta_member(tf.DeltaSequence(mother, n)), y, a.m)
            print(f"delta,{n},{y},{v.imag:.12g},{oracle.imag:.12g},{abs(v - oracle) / abs(oracle):.3e}")
        for width in (0.1, 0.05, 0.025):
            v = tf.smear_g2(tf.TestFunction.gaussian(0.0, width), y, a.m)
            print(f"gaussian,{width},{y},{v.imag:.12g},{oracle.imag:.12g},{abs(v - oracle) / abs(oracle):.3e}")
        g = g2_pi4_regularized(y, a.m)
        print(f"regulator,,{y},{g.extrapolated.imag:.12g},{oracle.imag:.12g},{g.rel_diff:.3e}")


if __name__ == "__main__":
    main()
