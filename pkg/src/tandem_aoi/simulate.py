"""Discrete-event simulation of the pipeline, used as ground truth for the closed forms.

Two variants share one event loop:

``original``
    The transmit buffer holds one packet.  A packet that has sat for ``tau``
    is discarded, and a newly emitted packet replaces a sitting one.
``equivalent``
    Expired packets are kept and leave together with the next packet that
    enters service.  Age sample paths are unchanged, and every admitted packet
    gets a system time ``T_i``, so ``E[X T]`` can be measured directly.

Confidence intervals come from independent replications (Student t).
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Protocol

import numpy as np
from scipy import stats

from . import _kernel as K
from .model import ComputeTimeModel, CouplingModel, ParameterError, SystemParams, transmission_rate

__all__ = [
    "SimConfig",
    "Interval",
    "SimEstimate",
    "Trace",
    "RandomStreams",
    "FixedStreams",
    "run",
    "run_replication",
    "trace",
    "measure_busy_found_fraction",
    "compare_variants",
    "VariantComparison",
    "stopping_process_wait",
    "cross_validate",
]

VARIANTS = ("original", "equivalent")
_CHUNK = 1 << 15


@dataclass(frozen=True)
class SimConfig:
    """Run length, warm-up and replication settings.

    ``horizon`` is simulated time when ``horizon_kind == "time"`` and the
    number of deliveries per replication when it is ``"deliveries"``.
    ``warmup`` below 1 is a fraction of the horizon, otherwise an absolute
    amount in the same unit.
    """

    horizon: float = 1e5
    horizon_kind: str = "time"
    warmup: float = 0.1
    seed: int = 0
    replications: int = 10
    model_variant: str = "original"
    tolerance: float | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.horizon_kind not in ("time", "deliveries"):
            raise ParameterError("horizon_kind must be 'time' or 'deliveries'")
        if not self.horizon > 0:
            raise ParameterError("horizon must be positive")
        if self.warmup < 0 or self.warmup_amount >= self.horizon:
            raise ParameterError("warmup must be shorter than the horizon")
        if self.replications < 1:
            raise ParameterError("replications must be at least 1")
        if self.model_variant not in VARIANTS:
            raise ParameterError(f"model_variant must be one of {VARIANTS}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be an unsigned 64-bit integer")

    @property
    def warmup_amount(self) -> float:
        return self.warmup * self.horizon if self.warmup < 1 else self.warmup

    def with_(self, **changes) -> "SimConfig":
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return SimConfig(**values)


@dataclass(frozen=True)
class Interval:
    """Replication mean with a 95% Student-t half-width."""

    mean: float
    half_width: float
    std_err: float
    n: int

    @classmethod
    def from_samples(cls, values: Iterable[float]) -> "Interval":
        x = np.asarray(list(values), dtype=float)
        n = x.size
        mean = float(x.mean()) if n else math.nan
        if n < 2:
            return cls(mean, math.nan, math.nan, n)
        se = float(x.std(ddof=1) / math.sqrt(n))
        return cls(mean, float(stats.t.ppf(0.975, n - 1) * se), se, n)

    @property
    def rel_half_width(self) -> float:
        return self.half_width / abs(self.mean) if self.mean else math.inf

    def agrees(self, value: float, rel: float = 0.01, n_sigma: float = 3.0) -> bool:
        """``|value - mean| <= max(rel |value|, n_sigma std_err)``."""
        tol = max(rel * abs(value), n_sigma * (self.std_err if np.isfinite(self.std_err) else 0.0))
        return abs(value - self.mean) <= tol


class Streams(Protocol):
    def arrival_gaps(self, n: int) -> np.ndarray: ...
    def compute_times(self, n: int) -> np.ndarray: ...
    def service_times(self, n: int) -> np.ndarray: ...


class RandomStreams:
    """One numpy generator per stochastic source, spawned from a seed sequence."""

    def __init__(self, seq: np.random.SeedSequence, lam: float, compute: ComputeTimeModel, mu: float):
        arr, comp, svc = (np.random.Generator(np.random.PCG64(s)) for s in seq.spawn(3))
        self._arr, self._comp, self._svc = arr, comp, svc
        self.lam, self.compute, self.mu = lam, compute, mu

    def arrival_gaps(self, n):
        return self._arr.exponential(1.0 / self.lam, n)

    def compute_times(self, n):
        return np.asarray(self.compute.sample(self._comp, n), dtype=float)

    def service_times(self, n):
        return self._svc.exponential(1.0 / self.mu, n)


class FixedStreams:
    """Deterministic samples, cycled; for hand-checked traces."""

    def __init__(self, arrival_gaps, compute_times, service_times):
        self._src = [np.asarray(a, dtype=float).ravel() for a in (arrival_gaps, compute_times, service_times)]
        if any(a.size == 0 for a in self._src) or any(np.any(a < 0) for a in self._src):
            raise ParameterError("fixed samples must be non-empty and non-negative")
        if not np.any(self._src[0] > 0):
            # arrivals would pile up at one instant forever
            raise ParameterError("at least one arrival gap must be positive")
        self._pos = [0, 0, 0]

    def _take(self, i, n):
        src = self._src[i]
        idx = (self._pos[i] + np.arange(n)) % src.size
        self._pos[i] += n
        return src[idx]

    def arrival_gaps(self, n):
        return self._take(0, n)

    def compute_times(self, n):
        return self._take(1, n)

    def service_times(self, n):
        return self._take(2, n)


@dataclass
class _Recorder:
    pk_gen: np.ndarray
    pk_enter: np.ndarray
    pk_start: np.ndarray
    pk_deliv: np.ndarray
    pk_fate: np.ndarray
    pk_busy: np.ndarray
    ev_t: np.ndarray
    ev_kind: np.ndarray
    ev_pid: np.ndarray
    ev_cs: np.ndarray
    ev_tx: np.ndarray

    @classmethod
    def empty(cls, n_packets: int = 0, n_events: int = 0) -> "_Recorder":
        nanv = lambda n: np.full(n, np.nan)  # noqa: E731
        return cls(
            nanv(n_packets), nanv(n_packets), nanv(n_packets), nanv(n_packets),
            np.full(n_packets, K.FATE_IN_FLIGHT, dtype=np.int8), np.zeros(n_packets, dtype=np.int8),
            np.zeros(n_events), np.zeros(n_events, dtype=np.int8), np.zeros(n_events, dtype=np.int64),
            np.zeros(n_events, dtype=np.int8), np.zeros(n_events, dtype=np.int8),
        )

    def arrays(self):
        return (self.pk_gen, self.pk_enter, self.pk_start, self.pk_deliv, self.pk_fate, self.pk_busy,
                self.ev_t, self.ev_kind, self.ev_pid, self.ev_cs, self.ev_tx)


def _refill(buf: np.ndarray, pos: int, draw, chunk: int) -> np.ndarray:
    return np.concatenate([buf[pos:], draw(chunk)])


def run_replication(
    params: SystemParams,
    mu: float,
    streams: Streams,
    config: SimConfig,
    recorder: _Recorder | None = None,
    p_c: float | None = None,
) -> dict:
    """Run one replication and return its raw counters and estimates."""
    rec = recorder or _Recorder.empty()
    equivalent = config.model_variant == "equivalent"
    time_mode = config.horizon_kind == "time"
    horizon = float(config.horizon)
    warm = float(config.warmup_amount)
    n_total = 0 if time_mode else int(round(horizon))
    n_warm = 0 if time_mode else int(math.floor(warm))

    fs, ist, acc = K.new_state(float(streams.arrival_gaps(1)[0]))
    idx = np.zeros(3, dtype=np.int64)
    gaps = streams.arrival_gaps(_CHUNK)
    ptimes = streams.compute_times(_CHUNK)
    stimes = streams.service_times(_CHUNK)
    while True:
        status = K.run_kernel(
            fs, ist, acc, idx, gaps, ptimes, stimes,
            float(params.T_o), float(params.tau), equivalent,
            time_mode, horizon, warm, n_warm, n_total,
            *rec.arrays(),
        )
        if status == K.DONE:
            break
        if idx[0] >= gaps.size:
            gaps = _refill(gaps, idx[0], streams.arrival_gaps, _CHUNK)
            idx[0] = 0
        if idx[1] >= ptimes.size:
            ptimes = _refill(ptimes, idx[1], streams.compute_times, _CHUNK)
            idx[1] = 0
        if idx[2] >= stimes.size:
            stimes = _refill(stimes, idx[2], streams.service_times, _CHUNK)
            idx[2] = 0

    T = acc[K.A_T]
    p_c = params.p_c if p_c is None else p_c
    occ = np.array([acc[K.A_T_OFF], acc[K.A_T_IDLE], acc[K.A_T_BUSY]]) / T if T > 0 else np.full(3, np.nan)
    in_flight = int(ist[K.I_TX_BUSY] * ist[K.I_BATCH_N] + ist[K.I_BUF] + (ist[K.I_CSTATE] == K.BUSY)
                    + (ist[K.I_HELD_N] if equivalent else 0))
    nan = math.nan
    div = lambda a, b: a / b if b > 0 else nan  # noqa: E731
    x_mean = div(acc[K.A_X_SUM], acc[K.A_N_X])
    x2_mean = div(acc[K.A_X2_SUM], acc[K.A_N_X])
    xt_mean = div(acc[K.A_XT_SUM], acc[K.A_N_XT])
    return dict(
        avg_aoi=div(acc[K.A_AREA], T),
        avg_peak_aoi=div(acc[K.A_PEAK_SUM], acc[K.A_N_PEAKS]),
        busy_found=div(acc[K.A_BUSY_FOUND], acc[K.A_EMITTED]),
        occupancy=occ,
        measured_power=occ[1] + p_c * occ[2],
        mean_cycle=x_mean,
        mean_x2=x2_mean,
        mean_xt=xt_mean,
        aoi_from_xt=div(1.0, x_mean) * (xt_mean + 0.5 * x2_mean) if x_mean == x_mean else nan,
        mean_wait=div(acc[K.A_WAIT_SUM], acc[K.A_N_WAIT]),
        max_wait=acc[K.A_MAX_WAIT],
        min_peak_trough_gap=acc[K.A_MIN_TROUGH_GAP],
        measured_time=T,
        n_peaks=int(acc[K.A_N_PEAKS]),
        n_admitted=int(ist[K.I_ADMITTED]),
        n_emitted=int(ist[K.I_EMITTED]),
        n_services=int(ist[K.I_SERVICES]),
        n_delivered=int(ist[K.I_DELIVERED]),
        n_blocked_at_compute=int(ist[K.I_BLOCKED]),
        n_discarded_replaced=int(ist[K.I_REPLACED]),
        n_discarded_deadline=int(ist[K.I_DEADLINE]),
        n_busy_found=int(ist[K.I_BUSY_FOUND]),
        in_flight=in_flight,
        deadline_violations=int(ist[K.I_MAX_SOJOURN_VIOL]),
        out_of_order=int(ist[K.I_OUT_OF_ORDER]),
        n_events=int(ist[K.I_N_EVENTS]),
        end_time=float(fs[K.F_T]),
    )


@dataclass(frozen=True)
class SimEstimate:
    avg_aoi: Interval
    avg_peak_aoi: Interval
    busy_found: Interval
    measured_power: Interval
    mean_cycle: Interval
    mean_x2: Interval
    mean_xt: Interval
    aoi_from_xt: Interval
    occupancy: dict[str, float]
    n_delivered: int
    n_blocked_at_compute: int
    n_discarded_replaced: int
    n_discarded_deadline: int
    n_admitted: int
    in_flight: int
    converged: bool
    variant: str
    replications: list[dict] = field(repr=False, default_factory=list)

    def summary(self) -> dict[str, float]:
        return {
            "avg_aoi": self.avg_aoi.mean,
            "avg_aoi_hw": self.avg_aoi.half_width,
            "avg_peak_aoi": self.avg_peak_aoi.mean,
            "avg_peak_aoi_hw": self.avg_peak_aoi.half_width,
            "busy_found": self.busy_found.mean,
            "measured_power": self.measured_power.mean,
            "mean_cycle": self.mean_cycle.mean,
            "occupancy_off": self.occupancy["off"],
            "occupancy_idle": self.occupancy["idle"],
            "occupancy_busy": self.occupancy["busy"],
            "n_delivered": self.n_delivered,
            "n_blocked_at_compute": self.n_blocked_at_compute,
            "n_discarded_replaced": self.n_discarded_replaced,
            "n_discarded_deadline": self.n_discarded_deadline,
            "converged": self.converged,
        }


def _seed_sequence(seed: int, variant_key: int, rep: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(variant_key, rep))


def _variant_key(config: SimConfig, streams_key: int | None) -> int:
    if streams_key is not None:
        return streams_key
    return VARIANTS.index(config.model_variant)


def run(
    params: SystemParams,
    compute: ComputeTimeModel,
    coupling: CouplingModel,
    config: SimConfig,
    streams_key: int | None = None,
) -> SimEstimate:
    """Simulate ``config.replications`` independent runs and pool them.

    Replication ``r`` draws its three streams from
    ``SeedSequence(seed, spawn_key=(variant, r))``; ``streams_key`` overrides
    the variant index, which lets two variants share random numbers.
    """
    if params.tau > params.T_o:
        raise ParameterError("deadline exceeds OFF time")
    mu = transmission_rate(coupling, float(compute.mean))
    key = _variant_key(config, streams_key)

    def one(r: int) -> dict:
        streams = RandomStreams(_seed_sequence(config.seed, key, r), params.lam, compute, mu)
        return run_replication(params, mu, streams, config)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            reps = list(pool.map(one, range(config.replications)))
    else:
        reps = [one(r) for r in range(config.replications)]
    return _pool(reps, params, config)


def _pool(reps: list[dict], params: SystemParams, config: SimConfig) -> SimEstimate:
    iv = lambda key: Interval.from_samples(r[key] for r in reps)  # noqa: E731
    occ = np.mean([r["occupancy"] for r in reps], axis=0)
    power_reps = iv("measured_power")
    # report the pooled power as the exact cost of the pooled occupancy
    power = Interval(float(occ[1] + params.p_c * occ[2]), power_reps.half_width, power_reps.std_err, power_reps.n)
    aoi = iv("avg_aoi")
    peak = iv("avg_peak_aoi")
    converged = True
    if config.tolerance is not None:
        converged = bool(aoi.rel_half_width <= config.tolerance and peak.rel_half_width <= config.tolerance)
    total = lambda key: int(sum(r[key] for r in reps))  # noqa: E731
    return SimEstimate(
        avg_aoi=aoi,
        avg_peak_aoi=peak,
        busy_found=iv("busy_found"),
        measured_power=power,
        mean_cycle=iv("mean_cycle"),
        mean_x2=iv("mean_x2"),
        mean_xt=iv("mean_xt"),
        aoi_from_xt=iv("aoi_from_xt"),
        occupancy={"off": float(occ[0]), "idle": float(occ[1]), "busy": float(occ[2])},
        n_delivered=total("n_delivered"),
        n_blocked_at_compute=total("n_blocked_at_compute"),
        n_discarded_replaced=total("n_discarded_replaced"),
        n_discarded_deadline=total("n_discarded_deadline"),
        n_admitted=total("n_admitted"),
        in_flight=total("in_flight"),
        converged=converged,
        variant=config.model_variant,
        replications=reps,
    )


_PACKET_DTYPE = np.dtype([
    ("id", np.int64),
    ("t_gen", float),
    ("t_buffer_enter", float),
    ("t_service_start", float),
    ("t_delivered", float),
    ("fate", "U18"),
    ("found_busy", bool),
])
_FATES = {K.FATE_IN_FLIGHT: "in_flight", K.FATE_DELIVERED: "delivered",
          K.FATE_REPLACED: "discarded_replaced", K.FATE_DEADLINE: "discarded_deadline"}
_CSTATES = ("OFF", "ON_IDLE", "ON_BUSY")
_TXSTATES = ("IDLE", "BUSY", "BUSY+WAIT")


@dataclass
class Trace:
    """Per-packet records and the event log of one replication."""

    packets: np.ndarray
    events: np.ndarray
    stats: dict
    variant: str
    events_truncated: bool

    def rows(self):
        for e in self.events:
            yield (float(e["time"]), K.EVENT_NAMES[e["kind"]], int(e["packet"]),
                   f"{_CSTATES[e['compute']]}/{_TXSTATES[e['tx']]}")

    def write_tsv(self, out) -> None:
        """Tab-separated ``time, event, packet, server-state`` lines."""
        close = False
        if isinstance(out, (str, os.PathLike)):
            out, close = open(out, "w"), True
        try:
            out.write("time\tevent\tpacket\tserver_state\n")
            for t, kind, pid, state in self.rows():
                out.write(f"{t!r}\t{kind}\t{pid}\t{state}\n")
        finally:
            if close:
                out.close()

    def to_tsv(self) -> str:
        buf = io.StringIO()
        self.write_tsv(buf)
        return buf.getvalue()


def trace(
    params: SystemParams,
    compute: ComputeTimeModel | None,
    coupling: CouplingModel | None,
    config: SimConfig,
    max_packets: int = 10_000,
    max_events: int = 100_000,
    streams: Streams | None = None,
    mu: float | None = None,
) -> Trace:
    """Run replication 0 with per-packet and per-event recording.

    ``streams`` (for example :class:`FixedStreams`) replaces the random
    sources, in which case ``compute`` and ``coupling`` may be ``None`` and
    ``mu`` is unused.
    """
    if streams is None:
        mu = transmission_rate(coupling, float(compute.mean))
        streams = RandomStreams(_seed_sequence(config.seed, _variant_key(config, None), 0), params.lam, compute, mu)
    rec = _Recorder.empty(max_packets, max_events)
    raw = run_replication(params, mu or 1.0, streams, config, recorder=rec)
    n_pk = min(raw["n_admitted"], max_packets)
    packets = np.zeros(n_pk, dtype=_PACKET_DTYPE)
    packets["id"] = np.arange(n_pk)
    packets["t_gen"] = rec.pk_gen[:n_pk]
    packets["t_buffer_enter"] = rec.pk_enter[:n_pk]
    packets["t_service_start"] = rec.pk_start[:n_pk]
    packets["t_delivered"] = rec.pk_deliv[:n_pk]
    packets["fate"] = [_FATES[int(f)] for f in rec.pk_fate[:n_pk]]
    packets["found_busy"] = rec.pk_busy[:n_pk].astype(bool)
    n_ev = min(raw["n_events"], max_events)
    events = np.zeros(n_ev, dtype=[("time", float), ("kind", np.int8), ("packet", np.int64),
                                   ("compute", np.int8), ("tx", np.int8)])
    events["time"] = rec.ev_t[:n_ev]
    events["kind"] = rec.ev_kind[:n_ev]
    events["packet"] = rec.ev_pid[:n_ev]
    events["compute"] = rec.ev_cs[:n_ev]
    events["tx"] = rec.ev_tx[:n_ev]
    return Trace(packets, events, raw, config.model_variant, raw["n_events"] > max_events)


def measure_busy_found_fraction(tr: Trace) -> float | None:
    """Share of emitted packets that found the transmitter mid-service (``None`` if none emitted)."""
    if tr.variant != "original":
        raise ParameterError("busy fraction is measured on the original variant")
    emitted = ~np.isnan(tr.packets["t_buffer_enter"])
    n = int(emitted.sum())
    if n == 0:
        return None
    return float(tr.packets["found_busy"][emitted].sum() / n)


@dataclass(frozen=True)
class VariantComparison:
    original: SimEstimate
    equivalent: SimEstimate
    aoi_delta: float
    peak_delta: float
    aoi_pooled_half_width: float
    peak_pooled_half_width: float
    aoi_pass: bool
    peak_pass: bool

    @property
    def passed(self) -> bool:
        return self.aoi_pass and self.peak_pass


def _variant_pass(a: Interval, b: Interval, rel: float) -> bool:
    gap = abs(a.mean - b.mean)
    overlap = gap <= (a.half_width + b.half_width) if np.isfinite(a.half_width + b.half_width) else False
    return bool(overlap or gap <= rel * abs(a.mean))


def compare_variants(
    params: SystemParams,
    compute: ComputeTimeModel,
    coupling: CouplingModel,
    config: SimConfig,
    common_random_numbers: bool = False,
    rel: float = 0.01,
) -> VariantComparison:
    """Simulate both variants and test that their age statistics agree.

    With independent streams (the default) the test passes when the 95%
    intervals overlap or the relative gap is below ``rel``.  With
    ``common_random_numbers`` both variants see identical samples, so their
    age sample paths coincide and the deltas vanish.
    """
    key = 0 if common_random_numbers else None
    orig = run(params, compute, coupling, config.with_(model_variant="original"), streams_key=key)
    equiv = run(params, compute, coupling, config.with_(model_variant="equivalent"), streams_key=key)
    pooled = lambda a, b: math.hypot(a.half_width, b.half_width)  # noqa: E731
    return VariantComparison(
        original=orig,
        equivalent=equiv,
        aoi_delta=equiv.avg_aoi.mean - orig.avg_aoi.mean,
        peak_delta=equiv.avg_peak_aoi.mean - orig.avg_peak_aoi.mean,
        aoi_pooled_half_width=pooled(orig.avg_aoi, equiv.avg_aoi),
        peak_pooled_half_width=pooled(orig.avg_peak_aoi, equiv.avg_peak_aoi),
        aoi_pass=_variant_pass(orig.avg_aoi, equiv.avg_aoi, rel),
        peak_pass=_variant_pass(orig.avg_peak_aoi, equiv.avg_peak_aoi, rel),
    )


def stopping_process_wait(
    params: SystemParams,
    compute: ComputeTimeModel,
    mu: float,
    n: int,
    rng: np.random.Generator,
    chunk: int = 1_000_000,
) -> Interval:
    """Monte Carlo of the buffer wait seen by a packet that finds the transmitter busy.

    Draw the residual service ``R ~ Exp(mu)``.  If ``R <= tau`` the wait is
    ``R``.  Otherwise add whole compute cycles ``T_o + I + P``: stop when a
    cycle outlasts what is left of ``R`` (the wait is the cycles' sum), or
    when the remainder drops to ``tau`` or less (the remainder is added too).
    """
    means, m2s, counts = [], [], []
    left = n
    while left > 0:
        m = min(chunk, left)
        left -= m
        R = rng.exponential(1.0 / mu, m)
        W = np.where(R <= params.tau, R, 0.0)
        active = R > params.tau
        rem = R.copy()
        while active.any():
            ia = np.flatnonzero(active)
            c = params.T_o + rng.exponential(1.0 / params.lam, ia.size) + compute.sample(rng, ia.size)
            r = rem[ia]
            over = c > r
            W[ia] += np.where(over, c, 0.0)
            r_left = r - c
            young = (~over) & (r_left <= params.tau)
            W[ia] += np.where(young, c + r_left, 0.0)
            go_on = (~over) & (~young)
            W[ia[go_on]] += c[go_on]
            rem[ia] = r_left
            active[ia[~go_on]] = False
        means.append(W.mean())
        m2s.append(W.var(ddof=1) if m > 1 else 0.0)
        counts.append(m)
    counts = np.asarray(counts, dtype=float)
    mean = float(np.dot(means, counts) / counts.sum())
    within = float(np.dot(np.asarray(m2s), counts - 1))
    between = float(np.dot((np.asarray(means) - mean) ** 2, counts))
    var = (within + between) / (counts.sum() - 1)
    se = math.sqrt(var / counts.sum())
    return Interval(mean, 1.96 * se, se, int(counts.sum()))


def _point_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(1 << 20, i)).generate_state(1, np.uint64)[0])


def cross_validate(
    points: Iterable[tuple[SystemParams, ComputeTimeModel, CouplingModel]],
    config: SimConfig,
    rel: float = 0.01,
    n_sigma: float = 3.0,
    exact: bool = False,
) -> list[dict]:
    """Compare closed-form and simulated average AoI / peak AoI at each point."""
    from .analysis import evaluate

    rows = []
    for i, (params, compute, coupling) in enumerate(points):
        report = evaluate(params, compute, coupling, exact=exact)
        # independent streams per point; a shared seed would correlate the errors
        est = run(params, compute, coupling, config.with_(seed=_point_seed(config.seed, i)))
        for metric, cf, iv in (
            ("avg_aoi", report.avg_aoi, est.avg_aoi),
            ("avg_peak_aoi", report.avg_peak_aoi, est.avg_peak_aoi),
        ):
            rows.append(dict(
                point=i,
                metric=metric,
                closed_form=cf,
                simulated=iv.mean,
                half_width=iv.half_width,
                std_err=iv.std_err,
                rel_error=(cf - iv.mean) / iv.mean,
                passed=iv.agrees(cf, rel, n_sigma),
                n_delivered=est.n_delivered,
            ))
    return rows
