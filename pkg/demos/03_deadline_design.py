"""How much does a non-zero deadline buy?

For each OFF time, choose the mean compute time that minimises average AoI
under the power budget, once with ``tau = 0`` and once with ``tau`` free.
"""

import numpy as np

from tandem_aoi import CouplingModel, GammaFamily, SystemParams
from tandem_aoi.optimize import SearchSpec, minimize, strict_vs_best_threshold

coupling = CouplingModel(10.0, 1.0)
spec = SearchSpec(n_tau=21, n_meanP=41, refinement_rounds=3)  # T_o pinned by default

for lam in (1.0, 0.2):
    strict, best = [], []
    grid = np.linspace(0.5, 20, 40)
    for T_o in grid:
        cmp = strict_vs_best_threshold(SystemParams(lam=lam, T_o=T_o), GammaFamily(0.1), coupling, spec)
        strict.append(cmp.strict.avg_aoi)
        best.append(cmp.best.avg_aoi)
    i, j = int(np.argmin(strict)), int(np.argmin(best))
    gain = (strict[i] - best[j]) / strict[i]
    print(f"lam={lam}: strict min {strict[i]:.3f} at T_o={grid[i]:.2f}, "
          f"best min {best[j]:.3f} at T_o={grid[j]:.2f}, gain {100 * gain:.1f}%")

# Letting the optimiser choose T_o as well
r = minimize(SystemParams(lam=1.0, T_o=1.0), GammaFamily(0.1), coupling, spec.released("T_o"))
print(f"joint optimum: tau={r.best_tau:.3f} E[P]={r.best_meanP:.4f} T_o={r.best_To:.3f} "
      f"AoI={r.avg_aoi:.4f} slack={r.power_slack:.2e}")
