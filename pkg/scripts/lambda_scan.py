"""Print norm growth rate per kick against lambda (qualitative PT-breaking scan)."""
import numpy as np

from ptkr_otoc import SimParams, norm_growth_scan

params = SimParams(N=1024)
lams = np.round(np.linspace(0.0, 1.2, 25), 3)
for lam, rate in norm_growth_scan(params, lams, n_steps=40):
    print(f"{lam:6.3f}  {rate:12.6g}")
