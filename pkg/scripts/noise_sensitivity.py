"""Spread of the stability ratio over the standard suite as the noise model varies.

Each row changes the band limit and envelope of the perturbation noise and
reports max/min of the ratio over all 14 cases.
"""

import dataclasses

from gaborstab.stabilitylab import run_stability_experiment, standard_suite


def main():
    print("band,envelope,min_ratio,max_ratio,spread")
    for band in (1.0, 2.0, 4.0):
        for envelope in (2.0, 4.0, 8.0):
            cases = []
            for c in standard_suite():
                if c.recipe == "perturbation":
                    c = dataclasses.replace(c, recipe_params={**c.recipe_params, "band": band,
                                                              "envelope": envelope})
                cases.append(c)
            ratios = [run_stability_experiment(c).ratio for c in cases]
            print(f"{band:g},{envelope:g},{min(ratios):.4g},{max(ratios):.4g},{max(ratios) / min(ratios):.2f}")


if __name__ == "__main__":
    main()
