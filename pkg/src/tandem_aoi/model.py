"""Parameter space of the power-cycled computation/transmission pipeline.

The compute server loops OFF (fixed ``T_o``) -> ON-Idle (until the next
Poisson job, rate ``lam``) -> ON-Busy (random compute time ``P``) and costs
0, 1 and ``p_c`` power units per unit time in those states.  The transmitter
serves exponentially distributed jobs whose mean depends on ``E[P]`` through
:class:`CouplingModel`.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

__all__ = [
    "ParameterError",
    "SystemParams",
    "ComputeTimeModel",
    "GammaCompute",
    "GammaFamily",
    "CouplingModel",
    "FeasibleBound",
    "mgf",
    "transmission_rate",
    "average_power",
    "max_feasible_mean_compute",
    "validate",
    "random_feasible_point",
]


class ParameterError(ValueError):
    """Raised when a parameter block violates its invariants."""


@dataclass(frozen=True)
class SystemParams:
    """Scalar design and environment parameters.

    ``lam`` is the job arrival rate, ``T_o`` the OFF dwell time, ``tau`` the
    deadline of a packet sitting in the transmit buffer, ``p_c`` the ON-Busy
    power, ``C_avg`` the long-run power budget and ``omega1``/``omega2`` the
    weights of average AoI and average peak AoI in the design objective.
    """

    lam: float
    T_o: float
    tau: float = 0.0
    p_c: float = 10.0
    C_avg: float = 1.0
    omega1: float = 1.0
    omega2: float = 0.0

    def __post_init__(self) -> None:
        problems = _param_problems(self)
        if problems:
            raise ParameterError("; ".join(problems))

    def with_(self, **changes: float) -> "SystemParams":
        """Copy with some fields replaced (re-validated)."""
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return SystemParams(**values)


def _param_problems(p: SystemParams) -> list[str]:
    out = []
    for name in ("lam", "T_o", "tau", "p_c", "C_avg", "omega1", "omega2"):
        v = getattr(p, name)
        if not isinstance(v, (int, float)) or math.isnan(v):
            out.append(f"{name} must be a real number")
    if out:
        return out
    if not p.lam > 0:
        out.append("lambda must be positive")
    if p.T_o < 0:
        out.append("OFF time must be non-negative")
    if p.tau < 0:
        out.append("deadline must be non-negative")
    if p.tau > p.T_o:
        out.append("deadline exceeds OFF time")
    if not p.p_c > 1:
        out.append("busy power p_c must exceed 1")
    if not p.C_avg > 0:
        out.append("power budget must be positive")
    if p.omega1 < 0 or p.omega2 < 0:
        out.append("objective weights must be non-negative")
    elif p.omega1 + p.omega2 <= 0:
        out.append("degenerate objective")
    return out


class ComputeTimeModel(abc.ABC):
    """Distribution of the ON-Busy compute time ``P``.

    The closed forms only need the first two moments and the transform
    ``E[exp(-gamma * P)]``; the simulator needs a sampler.
    """

    @property
    @abc.abstractmethod
    def mean(self) -> float: ...

    @property
    @abc.abstractmethod
    def second_moment(self) -> float: ...

    @abc.abstractmethod
    def log_mgf(self, gamma: ArrayLike) -> np.ndarray | float:
        """``log E[exp(-gamma P)]``."""

    def mgf(self, gamma: ArrayLike) -> np.ndarray | float:
        return np.exp(self.log_mgf(gamma))

    def tilted_mean(self, gamma: ArrayLike) -> np.ndarray | float:
        """``E[P exp(-gamma P)]``; only the exact analysis uses it."""
        raise NotImplementedError(f"{type(self).__name__} has no tilted mean")

    @abc.abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray: ...


@dataclass(frozen=True)
class GammaCompute(ComputeTimeModel):
    """Gamma compute time with mean ``mean_P`` and shape ``k``.

    Density ``(k kappa)^k / Gamma(k) p^(k-1) exp(-k kappa p)`` with
    ``kappa = 1/mean_P``; the variance is ``mean_P**2 / k``.  ``mean_P`` may be
    an array, which the optimizer uses to evaluate many designs at once.
    """

    mean_P: float | np.ndarray
    k: float
    family: str = field(default="gamma", init=False)

    def __post_init__(self) -> None:
        if not (np.isfinite(self.k) and self.k > 0):
            raise ParameterError("gamma shape k must be positive")
        m = np.asarray(self.mean_P, dtype=float)
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise ParameterError("mean compute time must be positive")

    @property
    def mean(self):
        return self.mean_P

    @property
    def kappa(self):
        return 1.0 / np.asarray(self.mean_P, dtype=float)

    @property
    def rate(self):
        return self.k * self.kappa

    @property
    def second_moment(self):
        return np.asarray(self.mean_P, dtype=float) ** 2 * (1.0 + 1.0 / self.k)

    def log_mgf(self, gamma):
        gamma = np.asarray(gamma, dtype=float)
        if np.any(gamma < 0):
            raise ParameterError("transform argument must be non-negative")
        return -self.k * np.log1p(gamma * np.asarray(self.mean_P, dtype=float) / self.k)

    def tilted_mean(self, gamma):
        gamma = np.asarray(gamma, dtype=float)
        m = np.asarray(self.mean_P, dtype=float)
        return m * np.exp((-self.k - 1.0) * np.log1p(gamma * m / self.k))

    def sample(self, rng, size):
        # numpy's gamma sampler is valid for shape < 1
        return rng.gamma(self.k, float(self.mean_P) / self.k, size)


@dataclass(frozen=True)
class GammaFamily:
    """Gamma compute times of fixed shape ``k``, indexed by their mean."""

    k: float
    name: str = field(default="gamma", init=False)

    def __post_init__(self) -> None:
        if not (np.isfinite(self.k) and self.k > 0):
            raise ParameterError("gamma shape k must be positive")

    def __call__(self, mean_P) -> GammaCompute:
        return GammaCompute(mean_P, self.k)


ComputeFamily = Callable[..., ComputeTimeModel]


@dataclass(frozen=True)
class CouplingModel:
    """Mean transmit time ``B0 * exp(-alpha * E[P])``."""

    B0: float = 10.0
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not self.B0 > 0:
            raise ParameterError("base transmit time B0 must be positive")
        if not self.alpha >= 0:
            raise ParameterError("coupling exponent alpha must be non-negative")

    def mean_transmit_time(self, mean_P):
        return self.B0 * np.exp(-self.alpha * np.asarray(mean_P, dtype=float))


def mgf(model: ComputeTimeModel, gamma: float) -> float:
    """``E[exp(-gamma P)]`` in closed form."""
    if gamma < 0:
        raise ParameterError("transform argument must be non-negative")
    return float(model.mgf(gamma))


def transmission_rate(coupling: CouplingModel, mean_P):
    """Service rate ``mu = exp(alpha E[P]) / B0`` of the transmitter."""
    m = np.asarray(mean_P, dtype=float)
    if np.any(m < 0):
        raise ParameterError("mean compute time must be non-negative")
    mu = np.exp(coupling.alpha * m) / coupling.B0
    return float(mu) if mu.ndim == 0 else mu


def average_power(params: SystemParams, mean_P):
    """Long-run power of the compute server over one OFF/Idle/Busy cycle."""
    m = np.asarray(mean_P, dtype=float)
    idle = 1.0 / params.lam
    out = (idle + params.p_c * m) / (params.T_o + idle + m)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FeasibleBound:
    """Supremum of power-feasible ``E[P]``.

    ``status`` is ``"bounded"`` (``value`` holds the bound), ``"unbounded"``
    (any ``E[P]`` meets the budget) or ``"infeasible"`` (none does).
    """

    status: str
    value: float = math.nan

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"

    def admits(self, mean_P: float, rtol: float = 0.0) -> bool:
        if self.status == "infeasible":
            return False
        if self.status == "unbounded":
            return True
        return mean_P <= self.value * (1.0 + rtol)


def _budget_rhs(params: SystemParams, T_o=None):
    T_o = params.T_o if T_o is None else T_o
    return params.C_avg * T_o + (params.C_avg - 1.0) / params.lam


def max_feasible_mean_compute(params: SystemParams) -> FeasibleBound:
    """Solve ``(p_c - C_avg) E[P] <= C_avg T_o + (C_avg - 1)/lam`` for ``E[P]``."""
    rhs = _budget_rhs(params)
    coef = params.p_c - params.C_avg
    if rhs < 0:
        return FeasibleBound("infeasible")
    if coef <= 0:
        return FeasibleBound("unbounded", math.inf)
    return FeasibleBound("bounded", rhs / coef)


def max_feasible_mean_compute_array(params: SystemParams, T_o) -> np.ndarray:
    """Bound on ``E[P]`` per OFF time: ``inf`` when unbounded, ``nan`` when infeasible."""
    rhs = _budget_rhs(params, np.asarray(T_o, dtype=float))
    coef = params.p_c - params.C_avg
    bound = rhs / coef if coef > 0 else np.full_like(rhs, np.inf)
    return np.where(rhs < 0, np.nan, bound)


def validate(
    params: SystemParams | dict,
    compute: ComputeTimeModel | dict | None = None,
    coupling: CouplingModel | dict | None = None,
) -> list[str]:
    """Collect every violated invariant; an empty list means the inputs are usable.

    Accepts either constructed objects or raw keyword dicts, so it can report
    on inputs the constructors would refuse.
    """
    errors: list[str] = []
    if isinstance(params, dict):
        try:
            p_obj = SystemParams(**params)
        except ParameterError as exc:
            errors.extend(str(exc).split("; "))
            p_obj = None
        except TypeError as exc:
            errors.append(str(exc))
            p_obj = None
    else:
        p_obj = params
        errors.extend(_param_problems(params))
    c_obj = compute
    if isinstance(compute, dict):
        try:
            c_obj = GammaCompute(**compute)
        except (ParameterError, TypeError) as exc:
            errors.append(str(exc))
            c_obj = None
    if isinstance(coupling, dict):
        try:
            CouplingModel(**coupling)
        except (ParameterError, TypeError) as exc:
            errors.append(str(exc))
    if p_obj is not None and c_obj is not None:
        bound = max_feasible_mean_compute(p_obj)
        if not bound.feasible:
            errors.append("power budget infeasible for every mean compute time")
        elif not bound.admits(float(c_obj.mean), rtol=1e-12):
            errors.append(
                f"mean compute time {float(c_obj.mean):g} exceeds power-feasible bound {bound.value:g}"
            )
    return errors


def random_feasible_point(
    rng: np.random.Generator,
    lam_range: tuple[float, float] = (0.2, 2.0),
    T_o_range: tuple[float, float] = (1.0, 10.0),
    k_range: tuple[float, float] = (0.005, 1.0),
    alpha_range: tuple[float, float] = (0.0, 2.0),
    C_avg_range: tuple[float, float] = (1.0, 2.0),
    B0: float = 10.0,
    p_c: float = 10.0,
) -> tuple[SystemParams, GammaCompute, CouplingModel]:
    """Draw a power-feasible design with ``tau <= T_o``.

    ``lam`` and ``k`` are log-uniform, the rest uniform; ``E[P]`` is uniform on
    5%..100% of the feasible bound (capped at 5 when the budget is slack).
    """
    lam = float(np.exp(rng.uniform(*np.log(lam_range))))
    T_o = float(rng.uniform(*T_o_range))
    tau = float(rng.uniform(0.0, T_o))
    k = float(np.exp(rng.uniform(*np.log(k_range))))
    alpha = float(rng.uniform(*alpha_range))
    C_avg = float(rng.uniform(*C_avg_range))
    params = SystemParams(lam=lam, T_o=T_o, tau=tau, p_c=p_c, C_avg=C_avg)
    bound = max_feasible_mean_compute(params)
    top = min(bound.value, 5.0)
    mean_P = float(rng.uniform(0.05, 1.0) * top)
    return params, GammaCompute(mean_P, k), CouplingModel(B0, alpha)
