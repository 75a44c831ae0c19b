"""Phase-estimation amplitudes with the sine window.

For an eigenvalue lambda the probability of reading grid point k has a
closed form; this script compares it with the direct DFT sum, shows how the
mass concentrates on the one or two nearest grid points, and checks the
quadratic tail bound that makes the sine window worthwhile.
"""

import numpy as np

from fidest import (
    SqrtParams,
    grid_eigenvalue,
    pe_coefficient,
    pe_coefficient_direct,
    pe_phase_offset,
    pe_tail_bound,
)


def table(lam, t):
    params = SqrtParams(kappa=1.0, t=t)
    T = params.T
    print(f"\nlambda = {lam}, t = {t} (grid size T = {T})")
    print(" k  grid-lambda     |alpha|^2   closed-vs-direct   tail bound")
    total = 0.0
    for k in range(T):
        a = pe_coefficient(lam, k, params)
        d = pe_coefficient_direct(lam, k, params)
        delta = pe_phase_offset(lam, k, params)
        tail = pe_tail_bound(delta, T) if abs(delta) > 2 * np.pi / T else float("inf")
        total += abs(a) ** 2
        print(f"{k:2d}  {grid_eigenvalue(k, params):11.4f}  {abs(a)**2:10.6f}"
              f"   {abs(a - d):.2e}           {min(tail, 9.99):.3f}")
    print(f"sum |alpha|^2 = {total:.12f}")


def main():
    # on a grid point: one dominant coefficient
    params = SqrtParams(kappa=1.0, t=8)
    lam_on = grid_eigenvalue(3, params)
    table(lam_on, 8)
    # midway between grid points: two near-equal dominant coefficients
    lam_mid = 0.5 * (grid_eigenvalue(3, params) + grid_eigenvalue(4, params))
    table(lam_mid, 8)


if __name__ == "__main__":
    main()
