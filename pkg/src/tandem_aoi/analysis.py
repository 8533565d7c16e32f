"""Closed-form average AoI and average peak AoI.

Everything is built from one array-friendly core (:func:`closed_form`) so the
optimizer can evaluate whole grids with the same code the scalar API uses.

Notation used in the comments: a packet leaving the compute server finds
the transmitter idle (Id) or busy (B); ``q = lam exp(-mu T_o) M / (lam + mu)``
with ``M = E[exp(-mu P)]`` is the chance that one compute cycle
``T_o + I + P`` is shorter than an exponential service (or residual).

By default the predecessor's compute time is treated as independent of the
state it found at the transmitter, which keeps the result a function of
``M`` alone.  ``exact=True`` keeps that dependence through
``E[P exp(-mu P)]``; the difference is usually well under 1% for average AoI
but can reach a few percent for peak AoI when ``k`` is small.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    ComputeTimeModel,
    CouplingModel,
    ParameterError,
    SystemParams,
    transmission_rate,
)

__all__ = [
    "DomainError",
    "StationaryState",
    "WaitTimeTerms",
    "AoIReport",
    "closed_form",
    "effective_rate",
    "second_moment_interarrival",
    "busy_probability",
    "expected_wait",
    "expected_xt",
    "average_aoi",
    "average_peak_aoi",
    "truncated_exp_mean",
]

_SERIES_CUTOFF = 1e-4


class DomainError(ParameterError):
    """Inputs outside the region where the closed forms hold (``tau > T_o``)."""


@dataclass(frozen=True)
class StationaryState:
    p_B: float
    p_I: float
    trans_Id_to_B: float
    trans_B_to_B: float

    def residual(self) -> float:
        """Fixed-point residual of the two-state chain."""
        return abs(self.trans_Id_to_B * self.p_I + self.trans_B_to_B * self.p_B - self.p_B)


@dataclass(frozen=True)
class WaitTimeTerms:
    """Pieces of the expected buffer wait of a packet that finds the transmitter busy."""

    prob_a: float
    prob_b: float
    p_ntilde_zero: float
    geo_success: float
    mean_M_restricted: float
    expected_wait: float


@dataclass(frozen=True)
class AoIReport:
    mu: float
    lambda_tilde: float
    ex2: float
    exT: float
    exT_given_Id: float
    exT_given_B: float
    avg_aoi: float
    peak_numerator: float
    peak_numerator_given_Id: float
    peak_numerator_given_B: float
    prob_min_index: float
    prob_min_index_given_B: float
    avg_peak_aoi: float
    wait: WaitTimeTerms
    stationary: StationaryState
    exact: bool = False

    def as_dict(self) -> dict[str, float]:
        out = {k: v for k, v in self.__dict__.items() if not isinstance(v, (WaitTimeTerms, StationaryState))}
        out.update({f"wait.{k}": v for k, v in self.wait.__dict__.items()})
        out.update({f"stationary.{k}": v for k, v in self.stationary.__dict__.items()})
        return out


def truncated_exp_mean(mu, tau):
    """Mean of an Exp(mu) variable conditioned on ``[0, tau]``.

    Uses ``tau (1/2 - x/12 + x^3/720)``, ``x = mu tau``, near zero where the
    direct form cancels catastrophically.
    """
    mu = np.asarray(mu, dtype=float)
    tau = np.asarray(tau, dtype=float)
    x = mu * tau
    small = x < _SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = 1.0 / mu - tau / np.expm1(np.where(small, 1.0, x))
    series = tau * (0.5 - x / 12.0 + x**3 / 720.0)
    return np.where(small, series, direct)


def closed_form(lam, T_o, tau, mean_P, second_P, log_mgf_mu, mu, tilted_mu=None):
    """Evaluate every closed-form quantity; arguments broadcast as numpy arrays.

    ``log_mgf_mu`` is ``log E[exp(-mu P)]``.  Passing ``tilted_mu``
    (``E[P exp(-mu P)]``) switches on the exact predecessor correction.
    Returns a dict of arrays.
    """
    lam, T_o, tau, mean_P, second_P, log_m, mu = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (lam, T_o, tau, mean_P, second_P, log_mgf_mu, mu))
    )
    # exp(-mu T_o) M(mu) in the log domain; underflow to 0 is the right limit
    e_m = np.exp(log_m - mu * T_o)
    q = lam * e_m / (lam + mu)
    p_B = q / (1.0 - mu * tau * q)
    p_I = 1.0 - p_B

    emt = np.exp(-mu * tau)
    p_n0 = -np.expm1(-mu * tau)
    den = lam + mu - lam * e_m
    prob_a = (lam + mu - lam * np.exp(log_m - mu * (T_o - tau))) / den
    prob_b = 1.0 - prob_a
    m_tr = truncated_exp_mean(mu, tau)
    cycle = T_o + 1.0 / lam + mean_P
    # Wald: E[n | n > 0] = 1 / (1 - q)
    EW = (p_n0 + emt * prob_b) * m_tr + emt * (lam + mu) / den * cycle

    # E[P_{i-1}] given the state K_{i-1}; independent of it unless exact
    if tilted_mu is None:
        EP_given_B = mean_P
        EP_given_I = mean_P
    else:
        tilted = np.asarray(tilted_mu, dtype=float)
        EP_and_B = lam * np.exp(-mu * T_o) / (lam + mu) * tilted * (1.0 + mu * tau * p_B)
        with np.errstate(divide="ignore", invalid="ignore"):
            EP_given_B = np.where(p_B > 0, EP_and_B / p_B, mean_P)
            EP_given_I = np.where(p_I > 0, (mean_P - EP_and_B) / p_I, mean_P)

    def xt_given(prev_P, busy_boost):
        base = (prev_P + T_o + 1.0 / lam) * (mean_P + 1.0 / mu)
        # E[X_i exp(-mu (T_o + I_i + P_i))]
        x_hit = e_m * ((prev_P + T_o) * lam / (lam + mu) + lam / (lam + mu) ** 2)
        return base + busy_boost * x_hit * EW

    exT_Id = xt_given(EP_given_I, 1.0)
    exT_B = xt_given(EP_given_B, 1.0 + mu * tau)
    exT = p_B * exT_B + p_I * exT_Id

    lambda_tilde = lam / (lam * mean_P + lam * T_o + 1.0)
    ex2 = second_P + 2.0 * mean_P * (1.0 / lam + T_o) + 2.0 / lam**2 + T_o**2 + 2.0 * T_o / lam
    avg_aoi = lambda_tilde * (exT + ex2 / 2.0)

    rest = mean_P + T_o + 1.0 / lam + 1.0 / mu
    peak_Id = EP_given_I + rest + EW * q
    peak_B = (EP_given_B + rest) * p_n0 + EW * mu * tau * q
    peak_num = p_I * peak_Id + p_B * peak_B
    prob_min = 1.0 - p_B * emt
    avg_peak = peak_num / prob_min

    return dict(
        mu=mu,
        lambda_tilde=lambda_tilde,
        ex2=ex2,
        exT=exT,
        exT_given_Id=exT_Id,
        exT_given_B=exT_B,
        avg_aoi=avg_aoi,
        peak_numerator=peak_num,
        peak_numerator_given_Id=peak_Id,
        peak_numerator_given_B=peak_B,
        prob_min_index=prob_min,
        prob_min_index_given_B=p_n0,
        avg_peak_aoi=avg_peak,
        p_B=p_B,
        p_I=p_I,
        trans_Id_to_B=q,
        trans_B_to_B=(1.0 + mu * tau) * q,
        prob_a=prob_a,
        prob_b=prob_b,
        p_ntilde_zero=p_n0,
        geo_success=1.0 - q,
        mean_M_restricted=m_tr,
        expected_wait=EW,
    )


def _check_domain(params: SystemParams) -> None:
    if params.tau > params.T_o:
        raise DomainError("deadline exceeds OFF time; closed forms need tau <= T_o")


def _terms(params: SystemParams, compute: ComputeTimeModel, mu: float, exact: bool = False) -> dict:
    _check_domain(params)
    if not mu > 0:
        raise ParameterError("transmission rate must be positive")
    tilted = compute.tilted_mean(mu) if exact else None
    out = closed_form(
        params.lam,
        params.T_o,
        params.tau,
        compute.mean,
        compute.second_moment,
        compute.log_mgf(mu),
        mu,
        tilted,
    )
    return {k: float(v) for k, v in out.items()}


def effective_rate(params: SystemParams, mean_P: float) -> float:
    """Admission rate ``1 / (T_o + 1/lam + E[P])``."""
    return params.lam / (params.lam * mean_P + params.lam * params.T_o + 1.0)


def second_moment_interarrival(params: SystemParams, compute: ComputeTimeModel) -> float:
    """``E[X^2]`` for the inter-admission time ``X = P + T_o + I``."""
    lam, T_o, EP = params.lam, params.T_o, float(compute.mean)
    return float(
        compute.second_moment + 2 * EP * (1 / lam + T_o) + 2 / lam**2 + T_o**2 + 2 * T_o / lam
    )


def busy_probability(params: SystemParams, compute: ComputeTimeModel, mu: float) -> StationaryState:
    t = _terms(params, compute, mu)
    return StationaryState(t["p_B"], t["p_I"], t["trans_Id_to_B"], t["trans_B_to_B"])


def expected_wait(params: SystemParams, compute: ComputeTimeModel, mu: float) -> WaitTimeTerms:
    t = _terms(params, compute, mu)
    return _wait(t)


def _wait(t: dict) -> WaitTimeTerms:
    return WaitTimeTerms(
        prob_a=t["prob_a"],
        prob_b=t["prob_b"],
        p_ntilde_zero=t["p_ntilde_zero"],
        geo_success=t["geo_success"],
        mean_M_restricted=t["mean_M_restricted"],
        expected_wait=t["expected_wait"],
    )


def expected_xt(
    params: SystemParams, compute: ComputeTimeModel, mu: float, exact: bool = False
) -> tuple[float, float, float]:
    """``(E[XT], E[XT | Id], E[XT | B])``, conditioned on the predecessor's state."""
    t = _terms(params, compute, mu, exact)
    return t["exT"], t["exT_given_Id"], t["exT_given_B"]


def evaluate(
    params: SystemParams,
    compute: ComputeTimeModel,
    coupling: CouplingModel,
    exact: bool = False,
) -> AoIReport:
    """Full closed-form report at one design point (power budget not checked)."""
    mu = transmission_rate(coupling, float(compute.mean))
    t = _terms(params, compute, mu, exact)
    return AoIReport(
        mu=mu,
        lambda_tilde=t["lambda_tilde"],
        ex2=t["ex2"],
        exT=t["exT"],
        exT_given_Id=t["exT_given_Id"],
        exT_given_B=t["exT_given_B"],
        avg_aoi=t["avg_aoi"],
        peak_numerator=t["peak_numerator"],
        peak_numerator_given_Id=t["peak_numerator_given_Id"],
        peak_numerator_given_B=t["peak_numerator_given_B"],
        prob_min_index=t["prob_min_index"],
        prob_min_index_given_B=t["prob_min_index_given_B"],
        avg_peak_aoi=t["avg_peak_aoi"],
        wait=_wait(t),
        stationary=StationaryState(t["p_B"], t["p_I"], t["trans_Id_to_B"], t["trans_B_to_B"]),
        exact=exact,
    )


# both quantities come out of the same pass; the two names mirror how callers think
average_aoi = evaluate
average_peak_aoi = evaluate
