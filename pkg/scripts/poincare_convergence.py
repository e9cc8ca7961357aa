"""Refinement study of C_P for the closed-form oracle weights.

Prints n, C_P and the error against the known limit for the uniform weight
on [0, 1] (1/pi^2) and the standard Gaussian (1).
"""

import math

import numpy as np

from gaborstab.poincare import WeightPair, estimate_poincare


def gauss(x):
    return np.exp(-x * x / 2)


def main():
    print("weight,n,c_p,abs_error")
    for n in (64, 128, 256, 512, 1024, 2048):
        c = estimate_poincare(WeightPair.on_interval(np.ones_like, np.ones_like, 0.0, 1.0, n)).c_p
        print(f"uniform,{n},{c:.12g},{abs(c - 1 / math.pi ** 2):.3e}")
    for n in (64, 128, 256, 512, 1024, 2048):
        c = estimate_poincare(WeightPair.on_interval(gauss, gauss, -10.0, 10.0, n)).c_p
        print(f"gaussian,{n},{c:.12g},{abs(c - 1):.3e}")


if __name__ == "__main__":
    main()
