#!/usr/bin/python3
import logging

import LPLab

logging.basicConfig(level=logging.INFO)

# A lab bundles the grid, the Littlewood-Paley family and the translations
lab = LPLab.setup_lab(L=64, N=2**18, Jmax=10, spacing=2)
print(lab)

# Counterexample for p=1, q=2: all atoms stacked at the origin
spec = LPLab.make_spec(LPLab.Case.PLT, 1.0, 2.0, 8, lab.ys)
f = LPLab.build_f(spec, lab.grid, lab.fam)
Tf = LPLab.apply_T(f, lab.fam, lab.ys)

params = spec.params
for norm in [LPLab.besov_norm, LPLab.tl_norm]:
    print(norm.__name__, "f, Tf:", norm(f, lab.fam, params), norm(Tf, lab.fam, params))
print("Oracle for Tf:", LPLab.oracle_norms(spec).tl_Tf)

# The Triebel-Lizorkin ratio grows with the truncation level,
# the Besov ratio does not
print(LPLab.tl_ratios(lab, 0.0, 1.0, 2.0, [2, 4, 6, 8]))
print(LPLab.besov_ratios(lab, 0.0, 1.0, 2.0, [2, 4, 6, 8]))

# The gradient of the multiplier at 2^5 is 2 pi |y_5|
print(LPLab.grad_m_dyadic(5, [1.0], lab.ys, lab.fam))
