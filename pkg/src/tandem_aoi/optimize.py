"""Grid search over deadline, mean compute time and OFF time under the power budget.

The decision variables are searched in normalised coordinates:

* ``T_o`` directly on ``[T_min, T_max]``;
* ``E[P] = eps + u (E_max(T_o) - eps)`` with ``u`` in ``[0, 1]``, so every
  grid point meets the budget exactly at ``u = 1``;
* ``tau = f T_o`` with ``f`` in ``[0, 1]``, so ``tau <= T_o`` holds exactly and
  both named regimes ``tau = 0`` and ``tau = T_o`` lie on the grid.

Each refinement round re-grids a box four times narrower around the
incumbent.  The incumbent is always carried over, so rounds never make the
objective worse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import closed_form
from .model import (
    ComputeFamily,
    CouplingModel,
    ParameterError,
    SystemParams,
    average_power,
    max_feasible_mean_compute_array,
    transmission_rate,
)

__all__ = [
    "SearchSpec",
    "OptResult",
    "ThresholdComparison",
    "minimize",
    "strict_vs_best_threshold",
    "pareto_front",
    "front_points",
    "is_dominated",
]

AXES = ("tau", "mean_P", "T_o")


@dataclass(frozen=True)
class SearchSpec:
    """Grid densities, ranges and pinned variables.

    Pinned ``tau`` and ``T_o`` take their values from :class:`SystemParams`;
    a pinned ``mean_P`` takes ``mean_P``.
    """

    n_tau: int = 21
    n_meanP: int = 41
    n_To: int = 41
    T_o_range: tuple[float, float] = (0.0, 20.0)
    refinement_rounds: int = 3
    fixed: frozenset[str] = frozenset({"T_o"})
    mean_P: float | None = None
    mean_P_min: float = 1e-3
    mean_P_cap: float = 20.0

    def __post_init__(self) -> None:
        fixed = frozenset(self.fixed)
        object.__setattr__(self, "fixed", fixed)
        unknown = fixed - set(AXES)
        if unknown:
            raise ParameterError(f"unknown decision variables {sorted(unknown)}")
        for axis, n in (("tau", self.n_tau), ("mean_P", self.n_meanP), ("T_o", self.n_To)):
            if axis not in fixed and n < 2:
                raise ParameterError(f"grid for free axis {axis} needs at least 2 points")
        lo, hi = self.T_o_range
        if "T_o" not in fixed and not (0 <= lo < hi):
            raise ParameterError("T_o range must satisfy 0 <= T_min < T_max")
        if self.refinement_rounds < 0:
            raise ParameterError("refinement_rounds must be >= 0")
        if "mean_P" in fixed and (self.mean_P is None or not self.mean_P > 0):
            raise ParameterError("pinned mean_P needs a positive value")
        if not 0 < self.mean_P_min < self.mean_P_cap:
            raise ParameterError("need 0 < mean_P_min < mean_P_cap")

    def free(self, axis: str) -> bool:
        return axis not in self.fixed

    def pinned(self, *axes: str) -> "SearchSpec":
        return replace(self, fixed=self.fixed | set(axes))

    def released(self, *axes: str) -> "SearchSpec":
        return replace(self, fixed=self.fixed - set(axes))

    def doubled(self) -> "SearchSpec":
        """Halve every grid spacing (the old grid is a subset of the new one)."""
        return replace(self, n_tau=2 * self.n_tau - 1, n_meanP=2 * self.n_meanP - 1, n_To=2 * self.n_To - 1)


@dataclass(frozen=True)
class OptResult:
    feasible: bool
    best_tau: float = math.nan
    best_meanP: float = math.nan
    best_To: float = math.nan
    objective_value: float = math.inf
    avg_aoi: float = math.nan
    avg_peak_aoi: float = math.nan
    power_slack: float = math.nan
    n_evaluated: int = 0
    n_infeasible_pruned: int = 0
    omega1: float = math.nan
    omega2: float = math.nan
    round_objectives: tuple[float, ...] = ()
    violated: str = ""
    pareto: tuple[tuple[float, float, float], ...] = field(default=())


class _Box:
    """Current search box in normalised coordinates."""

    def __init__(self, lo: dict[str, float], hi: dict[str, float]):
        self.lo, self.hi = dict(lo), dict(hi)

    def shrink(self, center: dict[str, float], limits: dict[str, tuple[float, float]]) -> "_Box":
        lo, hi = {}, {}
        for ax in self.lo:
            half = (self.hi[ax] - self.lo[ax]) / 8.0
            a, b = limits[ax]
            lo[ax] = max(a, center[ax] - half)
            hi[ax] = min(b, center[ax] + half)
        return _Box(lo, hi)


def _axis(lo: float, hi: float, n: int, free: bool) -> np.ndarray:
    if not free or hi <= lo:
        return np.array([lo])
    return np.linspace(lo, hi, n)


def _evaluate(params, family, coupling, spec, To, u, f):
    """Objective on the grid ``To x u x f``; returns flat arrays of feasible points."""
    To = np.asarray(To, dtype=float)[:, None, None]
    u = np.asarray(u, dtype=float)[None, :, None]
    f = np.asarray(f, dtype=float)[None, None, :]
    shape = np.broadcast_shapes(To.shape, u.shape, f.shape)

    if spec.free("mean_P"):
        emax = max_feasible_mean_compute_array(params, To)
        emax = np.where(np.isinf(emax), spec.mean_P_cap, emax)
        ok_To = np.isfinite(emax) & (emax >= spec.mean_P_min)
        emax_safe = np.where(ok_To, emax, spec.mean_P_min)
        mean_P = spec.mean_P_min + u * (emax_safe - spec.mean_P_min)
        # u = 1 lands exactly on the bound
        mean_P = np.where(u == 1.0, emax_safe, mean_P)
    else:
        mean_P = np.full((To.shape[0], 1, 1), float(spec.mean_P))
        slack = params.C_avg - (1.0 / params.lam + params.p_c * mean_P) / (To + 1.0 / params.lam + mean_P)
        ok_To = slack >= -1e-12
    if spec.free("tau"):
        tau = f * To
        ok_tau = np.ones_like(To, dtype=bool)
    else:
        tau = np.full_like(f, params.tau)
        ok_tau = To >= params.tau

    ok = np.broadcast_to(ok_To & ok_tau, shape)
    To_b, mP_b, tau_b = (np.broadcast_to(a, shape) for a in (To, mean_P, tau))
    n_pruned = int((~ok).sum())
    To_v, mP_v, tau_v = To_b[ok], mP_b[ok], tau_b[ok]
    if To_v.size == 0:
        return None, n_pruned
    model = family(mP_v)
    mu = transmission_rate(coupling, mP_v)
    out = closed_form(params.lam, To_v, tau_v, mP_v, model.second_moment, model.log_mgf(mu), mu)
    obj = params.omega1 * out["avg_aoi"] + params.omega2 * out["avg_peak_aoi"]
    obj = np.where(np.isfinite(obj), obj, np.inf)
    pts = dict(
        T_o=To_v, mean_P=mP_v, tau=tau_v, obj=obj, aoi=out["avg_aoi"], peak=out["avg_peak_aoi"],
        u=np.broadcast_to(u, shape)[ok], f=np.broadcast_to(f, shape)[ok],
    )
    return pts, n_pruned


def _argbest(pts: dict) -> int:
    # lexsort: last key is primary
    order = np.lexsort((pts["tau"], pts["mean_P"], pts["T_o"], pts["obj"]))
    return int(order[0])


def _better(a: tuple, b: tuple | None) -> bool:
    """Compare (obj, T_o, mean_P, tau) tuples lexicographically."""
    return b is None or a < b


def minimize(
    params: SystemParams,
    compute_family: ComputeFamily,
    coupling: CouplingModel,
    spec: SearchSpec | None = None,
) -> OptResult:
    """Minimise ``omega1 E[AoI] + omega2 E[peak AoI]`` over the feasible box."""
    spec = spec or SearchSpec()
    T_lo, T_hi = (params.T_o, params.T_o) if not spec.free("T_o") else spec.T_o_range
    limits = {"T_o": (T_lo, T_hi), "u": (0.0, 1.0), "f": (0.0, 1.0)}
    box = _Box({"T_o": T_lo, "u": 0.0, "f": 0.0}, {"T_o": T_hi, "u": 1.0, "f": 1.0})
    free_any = any(spec.free(a) for a in AXES)
    rounds = spec.refinement_rounds if free_any else 0

    best = None  # (obj, T_o, mean_P, tau, aoi, peak, u, f)
    n_eval = n_pruned = 0
    history = []
    for _ in range(rounds + 1):
        To = _axis(box.lo["T_o"], box.hi["T_o"], spec.n_To, spec.free("T_o"))
        u = _axis(box.lo["u"], box.hi["u"], spec.n_meanP, spec.free("mean_P"))
        f = _axis(box.lo["f"], box.hi["f"], spec.n_tau, spec.free("tau"))
        pts, pruned = _evaluate(params, compute_family, coupling, spec, To, u, f)
        n_pruned += pruned
        if pts is not None:
            n_eval += pts["obj"].size
            i = _argbest(pts)
            cand = tuple(float(pts[k][i]) for k in ("obj", "T_o", "mean_P", "tau", "aoi", "peak", "u", "f"))
            if _better(cand[:4], best[:4] if best else None):
                best = cand
        if best is None:
            break
        history.append(best[0])
        box = box.shrink({"T_o": best[1], "u": best[6], "f": best[7]}, limits)

    if best is None:
        return OptResult(
            feasible=False,
            n_evaluated=n_eval,
            n_infeasible_pruned=n_pruned,
            omega1=params.omega1,
            omega2=params.omega2,
            violated="power budget (no mean compute time >= "
            f"{spec.mean_P_min:g} meets C_avg={params.C_avg:g} for any T_o in [{T_lo:g}, {T_hi:g}])"
            if spec.free("mean_P")
            else "power budget or deadline for the pinned design",
        )
    obj, To_b, mP_b, tau_b, aoi, peak = best[:6]
    slack = params.C_avg - average_power(params.with_(T_o=To_b, tau=min(params.tau, To_b)), mP_b)
    return OptResult(
        feasible=True,
        best_tau=tau_b,
        best_meanP=mP_b,
        best_To=To_b,
        objective_value=obj,
        avg_aoi=aoi,
        avg_peak_aoi=peak,
        power_slack=float(slack),
        n_evaluated=n_eval,
        n_infeasible_pruned=n_pruned,
        omega1=params.omega1,
        omega2=params.omega2,
        round_objectives=tuple(history),
    )


@dataclass(frozen=True)
class ThresholdComparison:
    strict: OptResult
    best: OptResult

    @property
    def improvement(self) -> float:
        """Relative objective reduction of the free deadline over ``tau = 0``."""
        return (self.strict.objective_value - self.best.objective_value) / self.strict.objective_value


def strict_vs_best_threshold(
    params: SystemParams,
    compute_family: ComputeFamily,
    coupling: CouplingModel,
    spec: SearchSpec | None = None,
) -> ThresholdComparison:
    spec = spec or SearchSpec()
    strict = minimize(params.with_(tau=0.0), compute_family, coupling, spec.pinned("tau"))
    best = minimize(params.with_(tau=0.0), compute_family, coupling, spec.released("tau"))
    return ThresholdComparison(strict, best)


def is_dominated(a: tuple[float, float], b: tuple[float, float]) -> bool:
    """True when ``b`` is at least as good as ``a`` in both coordinates and better in one."""
    return b[0] <= a[0] and b[1] <= a[1] and (b[0] < a[0] or b[1] < a[1])


def pareto_front(
    params: SystemParams,
    compute_family: ComputeFamily,
    coupling: CouplingModel,
    spec: SearchSpec | None,
    weight_list,
) -> list[OptResult]:
    """One weighted-sum optimum per ``(omega1, omega2)`` pair, in input order.

    Each weight is finally assigned the best of all optima found for any
    weight, so a design found under one weight can serve another; this keeps
    the returned points mutually non-dominated.
    """
    weights = [tuple(map(float, w)) for w in weight_list]
    if not weights:
        raise ParameterError("weight_list must not be empty")
    raw = [minimize(params.with_(omega1=w1, omega2=w2), compute_family, coupling, spec) for w1, w2 in weights]
    pool = [r for r in raw if r.feasible]
    if not pool:
        return raw
    out = []
    for (w1, w2), own in zip(weights, raw):
        # ties in the weighted objective go to the design better in the other coordinate
        pick = min(
            pool,
            key=lambda r: (w1 * r.avg_aoi + w2 * r.avg_peak_aoi, r.avg_peak_aoi if w2 == 0 else r.avg_aoi),
        )
        out.append(replace(
            pick,
            omega1=w1,
            omega2=w2,
            objective_value=w1 * pick.avg_aoi + w2 * pick.avg_peak_aoi,
            n_evaluated=own.n_evaluated,
            n_infeasible_pruned=own.n_infeasible_pruned,
            round_objectives=own.round_objectives,
        ))
    front = tuple(front_points(out))
    return [replace(r, pareto=front) for r in out]


def front_points(results: list[OptResult]) -> list[tuple[float, float, float]]:
    """``(omega1/omega2, avg_aoi, avg_peak_aoi)`` sorted by weight ratio, duplicates and dominated points removed."""
    pts = []
    for r in results:
        if not r.feasible:
            continue
        ratio = r.omega1 / r.omega2 if r.omega2 > 0 else math.inf
        pts.append((ratio, r.avg_aoi, r.avg_peak_aoi))
    pts.sort(key=lambda p: p[0])
    seen, uniq = set(), []
    for p in pts:
        key = (p[1], p[2])
        if key not in seen:
            seen.add(key)
            uniq.append(p)
    return [p for p in uniq if not any(is_dominated((p[1], p[2]), (q[1], q[2])) for q in uniq)]
