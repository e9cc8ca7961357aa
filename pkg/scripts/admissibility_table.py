"""Scan (a, b) for both exponential windows and print the admissibility verdicts.

Shows where the numerical tail slope changes sign, which locates the true
thresholds a = 2 and b = 2 pi^2 (ExpExp) and a = 2 (one-sided).
"""

import math

from gaborstab.tfcore import WindowSpec
from gaborstab.weights import GammaWeight, check_admissibility


def main():
    pi2 = 2 * math.pi ** 2
    grid = {
        "expexp": [(a, b) for a in (1.9, 2.1, 3.0, pi2 - 1, pi2 + 1) for b in (2.1, 3.0, pi2 - 1, pi2 + 1)],
        "onesided": [(a, b) for a in (1.5, 1.99, 2.01, 3.0) for b in (0.1, 1.0)],
    }
    print("window,a,b,admissible,tail_slope,stated_condition")
    for name, pairs in grid.items():
        window = WindowSpec(name)
        for a, b in pairs:
            rep = check_admissibility(window, GammaWeight(a, b))
            print(f"{name},{a:.4f},{b:.4f},{int(rep.admissible)},{rep.tail_slope:+.4f},"
                  f"{int(rep.stated_condition)}")


if __name__ == "__main__":
    main()
