#!/usr/bin/env python3
"""Accepted-fraction trend of the second Melnikov condition under kappa and
k-cutoff sweeps, as plottable CSV."""

import argparse
import sys

import numpy as np

from wavekam.birkhoff import rescale, solve_homological
from wavekam.kamcheck import melnikov_scan
from wavekam.polyham import build_p4
from wavekam.spectrum import AdmissibleSet, FrequencySystem


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modes", default="1")
    ap.add_argument("--mass", type=float, default=1.31)
    ap.add_argument("--nu", type=float, default=1e-4)
    ap.add_argument("--kappas", default="1e-8,1e-7,1e-6,1e-5,5e-5")
    ap.add_argument("--kmax", type=int, default=10)
    ap.add_argument("--smax", type=int, default=40)
    ap.add_argument("--rho-grid", type=int, default=200)
    args = ap.parse_args()

    A = AdmissibleSet(int(x) for x in args.modes.split(","))
    fs = FrequencySystem(args.mass)
    nf = solve_homological(build_p4(max(A.n_bound + 2, 4), fs), fs, A)
    rnf = rescale(nf, fs, A, args.nu, np.full(A.n, 1.5))

    print("kappa,kmax,accepted_fraction,checked")
    for kappa in (float(x) for x in args.kappas.split(",")):
        for kmax in (args.kmax, 2 * args.kmax):
            rep = melnikov_scan(rnf, kappa, kmax, args.smax,
                                points_per_dim=args.rho_grid)
            print(f"{kappa!r},{kmax},{rep.accepted_fraction!r},{rep.checked_count}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
