"""Period matrix, Riemann relations and Weierstrass torsion for a curve given by coefficients."""
import argparse
import warnings

import numpy as np

from hypreg.curve import (HyperellipticModel, harmonic_dual_basis, k_class_torsion_check,
                          period_data, riemann_relations)

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("coeffs", nargs="*", type=float, default=[0, 24, -50, 35, -10, 1],
                    help="h_0 h_1 ... h_d of y^2 = h(x)")
    a = ap.parse_args()
    np.set_printoptions(precision=6, suppress=True)
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore")
        m = HyperellipticModel([int(c) if float(c).is_integer() else c for c in a.coeffs])
        pd = period_data(m)
        print("tau =\n", pd.tau)
        print(riemann_relations(pd))
        print("dual basis residual", harmonic_dual_basis(pd)[1])
        W = m.weierstrass_points()
        print("order of W0 - Wk:", [k_class_torsion_check(pd, W[0], Q)["difference_order"] for Q in W[1:]])
