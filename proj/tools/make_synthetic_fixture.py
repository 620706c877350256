#!/usr/bin/env python3
"""Writes a small two-group landmark file in the pwshape TSV format.

Specimens are isotropic Gaussian perturbations of two hexagon-like mean
configurations. The file is a stand-in with the same layout as the
mouse vertebra data (six 2-D landmarks, two groups of 23).
"""
import argparse
import math

import numpy as np


def template(radius, squash):
    angles = np.arange(6) * math.pi / 3.0
    pts = np.stack([radius * np.cos(angles), squash * radius * np.sin(angles)], axis=1)
    pts[0, 0] += 0.15 * radius  # break the symmetry a little
    return pts


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/synthetic/two_groups.tsv")
    ap.add_argument("--per-group", type=int, default=23)
    ap.add_argument("--sigma2", type=float, default=50.0)
    ap.add_argument("--seed", type=int, default=1998)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    means = {"large": template(40.0, 0.8), "small": template(34.0, 0.75)}
    sd = math.sqrt(args.sigma2)
    with open(args.out, "w") as f:
        f.write("# group\tspecimen\tlandmark\tx\ty\n")
        for group, mu in means.items():
            for s in range(args.per_group):
                x = mu + sd * rng.standard_normal(mu.shape)
                sid = f"{group[0]}{s + 1:02d}"
                for i, (a, b) in enumerate(x, start=1):
                    f.write(f"{group}\t{sid}\t{i}\t{a:.4f}\t{b:.4f}\n")


if __name__ == "__main__":
    main()
