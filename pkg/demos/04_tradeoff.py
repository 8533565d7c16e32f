"""Average AoI against average peak AoI.

Weighted sums trace a trade-off curve; more variable compute times push the
whole curve up and to the right.
"""

from tandem_aoi import CouplingModel, GammaFamily, SystemParams
from tandem_aoi.optimize import SearchSpec, pareto_front

weights = [(1, 0), (1, 0.5), (1, 1), (0.5, 1), (0.1, 1), (0, 1)]
spec = SearchSpec(fixed=set(), refinement_rounds=3)
params = SystemParams(lam=1.0, T_o=1.0)

for k in (0.008, 0.005):
    results = pareto_front(params, GammaFamily(k), CouplingModel(10.0, 1.0), spec, weights)
    print(f"k={k}")
    for ratio, aoi, peak in results[0].pareto:
        print(f"  w1/w2={ratio:<6.3g} AoI {aoi:.4f}  peak {peak:.4f}")
