"""Event loop of the two-stage pipeline, compiled with numba.

The loop draws nothing itself.  It consumes three pre-drawn sample arrays
(arrival gaps, compute times, service times) and returns ``NEED_SAMPLES``
when any of them runs dry; the caller refills and calls again with the same
state arrays.  Every event consumes at most one sample per stream, so the
check at the top of the loop never leaves an event half-processed.
"""

import numpy as np
from numba import njit

# event kinds, listed in tie-breaking order for the first five
EV_DEADLINE = 0
EV_EMIT = 1
EV_DELIVER = 2
EV_OFF_END = 3
EV_ARRIVAL = 4
# trace-only kinds
EV_BLOCK = 5
EV_SERVICE_START = 6
EV_HOLD = 7
EV_REPLACE = 8

EVENT_NAMES = (
    "deadline_discard",
    "emit",
    "deliver",
    "off_end",
    "admit",
    "block",
    "service_start",
    "hold",
    "replace",
)

OFF, IDLE, BUSY = 0, 1, 2

FATE_IN_FLIGHT = -1
FATE_DELIVERED = 0
FATE_REPLACED = 1
FATE_DEADLINE = 2

DONE = 0
NEED_SAMPLES = 1

# float state slots
F_T, F_OFF_END, F_BUSY_END, F_CUR_GEN, F_CUR_X, F_NEXT_ARR = 0, 1, 2, 3, 4, 5
F_SVC_END, F_SVC_GEN, F_BUF_GEN, F_BUF_ENTER, F_BUF_X, F_U = 6, 7, 8, 9, 10, 11
F_PREV_GEN, F_WIN_LO, F_WIN_HI, F_LAST_T = 12, 13, 14, 15
F_BATCH_SX, F_BATCH_SXG, F_HELD_SX, F_HELD_SXG = 16, 17, 18, 19
F_CUR_EMIT = 20
N_FSTATE = 21

# int state slots
I_CSTATE, I_TX_BUSY, I_BUF, I_CUR_ID, I_SVC_ID, I_BUF_ID = 0, 1, 2, 3, 4, 5
I_HELD_N, I_BATCH_N, I_ADMITTED, I_EMITTED, I_SERVICES, I_DELIVERED = 6, 7, 8, 9, 10, 11
I_REPLACED, I_DEADLINE, I_BLOCKED, I_BUSY_FOUND, I_DONE = 12, 13, 14, 15, 16
I_CUR_HAS_X, I_BUF_HAS_X, I_N_EVENTS, I_MAX_SOJOURN_VIOL = 17, 18, 19, 20
I_OUT_OF_ORDER = 21
N_ISTATE = 22

# accumulator slots (measurement window only)
A_AREA, A_T, A_T_OFF, A_T_IDLE, A_T_BUSY = 0, 1, 2, 3, 4
A_PEAK_SUM, A_N_PEAKS, A_XT_SUM, A_N_XT, A_X_SUM, A_X2_SUM, A_N_X = 5, 6, 7, 8, 9, 10, 11
A_BUSY_FOUND, A_EMITTED, A_WAIT_SUM, A_N_WAIT, A_MIN_TROUGH_GAP = 12, 13, 14, 15, 16
A_MAX_WAIT = 17
N_ACC = 18


def new_state(first_gap):
    fs = np.zeros(N_FSTATE)
    ist = np.zeros(N_ISTATE, dtype=np.int64)
    acc = np.zeros(N_ACC)
    fs[F_NEXT_ARR] = first_gap
    fs[F_WIN_LO] = np.inf
    fs[F_WIN_HI] = np.inf
    fs[F_SVC_END] = np.inf
    fs[F_OFF_END] = np.inf
    fs[F_BUSY_END] = np.inf
    acc[A_MIN_TROUGH_GAP] = np.inf
    ist[I_CSTATE] = IDLE
    ist[I_CUR_ID] = -1
    ist[I_SVC_ID] = -1
    ist[I_BUF_ID] = -1
    return fs, ist, acc


@njit(cache=True, nogil=True)
def _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, t, kind, pid):
    n = ist[I_N_EVENTS]
    if n < ev_t.shape[0]:
        ev_t[n] = t
        ev_kind[n] = kind
        ev_pid[n] = pid
        ev_cs[n] = ist[I_CSTATE]
        ev_tx[n] = ist[I_TX_BUSY] + ist[I_BUF]
    ist[I_N_EVENTS] = n + 1


@njit(cache=True, nogil=True)
def run_kernel(
    fs, ist, acc, idx,
    gaps, ptimes, stimes,
    T_o, tau, equivalent,
    time_mode, horizon, warm_time, n_warm, n_total,
    pk_gen, pk_enter, pk_start, pk_deliv, pk_fate, pk_busy,
    ev_t, ev_kind, ev_pid, ev_cs, ev_tx,
):
    """Advance the simulation until done or a sample array is exhausted.

    ``idx`` holds the read positions into ``gaps``, ``ptimes`` and ``stimes``.
    In time mode the window is ``[warm_time, horizon]``; otherwise it opens at
    delivery ``n_warm`` and closes at delivery ``n_total``.
    """
    n_pk_cap = pk_gen.shape[0]
    inf = np.inf
    if time_mode:
        fs[F_WIN_LO] = warm_time
        fs[F_WIN_HI] = horizon
    elif n_warm == 0 and ist[I_SERVICES] == 0 and fs[F_LAST_T] == 0.0:
        fs[F_WIN_LO] = 0.0

    while True:
        if ist[I_DONE] == 1:
            return DONE
        if idx[0] >= gaps.shape[0] or idx[1] >= ptimes.shape[0] or idx[2] >= stimes.shape[0]:
            return NEED_SAMPLES

        # pick the earliest event; strict '<' keeps the priority order on ties
        te = fs[F_BUF_ENTER] + tau if ist[I_BUF] == 1 else inf
        kind = EV_DEADLINE
        cand = fs[F_BUSY_END] if ist[I_CSTATE] == BUSY else inf
        if cand < te:
            te = cand
            kind = EV_EMIT
        cand = fs[F_SVC_END] if ist[I_TX_BUSY] == 1 else inf
        if cand < te:
            te = cand
            kind = EV_DELIVER
        cand = fs[F_OFF_END] if ist[I_CSTATE] == OFF else inf
        if cand < te:
            te = cand
            kind = EV_OFF_END
        cand = fs[F_NEXT_ARR]
        if cand < te:
            te = cand
            kind = EV_ARRIVAL

        if time_mode and te > horizon:
            te = horizon
            kind = -1

        # integrate age and state occupancy over [last_t, te] within the window
        lo = max(fs[F_LAST_T], fs[F_WIN_LO])
        hi = min(te, fs[F_WIN_HI])
        if hi > lo:
            dt = hi - lo
            acc[A_AREA] += dt * (0.5 * (lo + hi) - fs[F_U])
            acc[A_T] += dt
            cs = ist[I_CSTATE]
            if cs == OFF:
                acc[A_T_OFF] += dt
            elif cs == IDLE:
                acc[A_T_IDLE] += dt
            else:
                acc[A_T_BUSY] += dt
        fs[F_LAST_T] = te
        fs[F_T] = te
        in_win = te > fs[F_WIN_LO] and te <= fs[F_WIN_HI]

        if kind == -1:
            ist[I_DONE] = 1
            return DONE

        if kind == EV_ARRIVAL:
            if ist[I_CSTATE] == IDLE:
                pid = ist[I_ADMITTED]
                ist[I_ADMITTED] = pid + 1
                ist[I_CUR_ID] = pid
                fs[F_CUR_GEN] = te
                if pid > 0:
                    x = te - fs[F_PREV_GEN]
                    fs[F_CUR_X] = x
                    ist[I_CUR_HAS_X] = 1
                    if in_win:
                        acc[A_X_SUM] += x
                        acc[A_X2_SUM] += x * x
                        acc[A_N_X] += 1.0
                else:
                    ist[I_CUR_HAS_X] = 0
                fs[F_PREV_GEN] = te
                p = ptimes[idx[1]]
                idx[1] += 1
                fs[F_BUSY_END] = te + p
                ist[I_CSTATE] = BUSY
                if pid < n_pk_cap:
                    pk_gen[pid] = te
                _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_ARRIVAL, pid)
            else:
                ist[I_BLOCKED] += 1
                _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_BLOCK, -1)
            fs[F_NEXT_ARR] = te + gaps[idx[0]]
            idx[0] += 1

        elif kind == EV_OFF_END:
            ist[I_CSTATE] = IDLE
            _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_OFF_END, -1)

        elif kind == EV_EMIT:
            pid = ist[I_CUR_ID]
            ist[I_EMITTED] += 1
            ist[I_CSTATE] = OFF
            fs[F_OFF_END] = te + T_o
            if pid < n_pk_cap:
                pk_enter[pid] = te
            if in_win:
                acc[A_EMITTED] += 1.0
            _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_EMIT, pid)
            cur_x = fs[F_CUR_X] if ist[I_CUR_HAS_X] == 1 else 0.0
            if ist[I_TX_BUSY] == 0:
                # serve now, together with any held packets (equivalent variant)
                fs[F_BATCH_SX] = fs[F_HELD_SX] + cur_x
                fs[F_BATCH_SXG] = fs[F_HELD_SXG] + cur_x * fs[F_CUR_GEN]
                ist[I_BATCH_N] = ist[I_HELD_N] + 1
                fs[F_HELD_SX] = 0.0
                fs[F_HELD_SXG] = 0.0
                ist[I_HELD_N] = 0
                s = stimes[idx[2]]
                idx[2] += 1
                ist[I_TX_BUSY] = 1
                fs[F_SVC_END] = te + s
                fs[F_SVC_GEN] = fs[F_CUR_GEN]
                ist[I_SVC_ID] = pid
                # held packets are the ids just below the batch head
                for j in range(max(pid - ist[I_BATCH_N] + 1, 0), min(pid + 1, n_pk_cap)):
                    pk_start[j] = te
                if pid < n_pk_cap:
                    pk_busy[pid] = 0
                if in_win:
                    acc[A_N_WAIT] += 1.0
                _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_SERVICE_START, pid)
            else:
                ist[I_BUSY_FOUND] += 1
                if in_win:
                    acc[A_BUSY_FOUND] += 1.0
                if pid < n_pk_cap:
                    pk_busy[pid] = 1
                if ist[I_BUF] == 1:
                    old = ist[I_BUF_ID]
                    if equivalent:
                        fs[F_HELD_SX] += fs[F_BUF_X]
                        fs[F_HELD_SXG] += fs[F_BUF_X] * fs[F_BUF_GEN]
                        ist[I_HELD_N] += 1
                        _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_HOLD, old)
                    else:
                        ist[I_REPLACED] += 1
                        if old < n_pk_cap:
                            pk_fate[old] = FATE_REPLACED
                        _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_REPLACE, old)
                ist[I_BUF] = 1
                ist[I_BUF_ID] = pid
                fs[F_BUF_GEN] = fs[F_CUR_GEN]
                fs[F_BUF_ENTER] = te
                fs[F_BUF_X] = cur_x
            ist[I_CUR_ID] = -1

        elif kind == EV_DEADLINE:
            pid = ist[I_BUF_ID]
            if te > fs[F_BUF_ENTER] + tau:
                ist[I_MAX_SOJOURN_VIOL] += 1
            ist[I_BUF] = 0
            ist[I_BUF_ID] = -1
            if equivalent:
                fs[F_HELD_SX] += fs[F_BUF_X]
                fs[F_HELD_SXG] += fs[F_BUF_X] * fs[F_BUF_GEN]
                ist[I_HELD_N] += 1
                _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_HOLD, pid)
            else:
                ist[I_DEADLINE] += 1
                if pid < n_pk_cap:
                    pk_fate[pid] = FATE_DEADLINE
                _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_DEADLINE, pid)

        else:  # EV_DELIVER
            pid = ist[I_SVC_ID]
            peak = te - fs[F_U]
            if fs[F_SVC_GEN] <= fs[F_U] and ist[I_SERVICES] > 0:
                ist[I_OUT_OF_ORDER] += 1
            trough = te - fs[F_SVC_GEN]
            if in_win:
                acc[A_PEAK_SUM] += peak
                acc[A_N_PEAKS] += 1.0
                acc[A_XT_SUM] += fs[F_BATCH_SX] * te - fs[F_BATCH_SXG]
                # packet 0 has no inter-admission time
                acc[A_N_XT] += ist[I_BATCH_N] - (1 if pid - ist[I_BATCH_N] + 1 == 0 else 0)
                gap = peak - trough
                if gap < acc[A_MIN_TROUGH_GAP]:
                    acc[A_MIN_TROUGH_GAP] = gap
            fs[F_U] = fs[F_SVC_GEN]
            ist[I_SERVICES] += 1
            ist[I_DELIVERED] += ist[I_BATCH_N]
            ist[I_TX_BUSY] = 0
            for j in range(max(pid - ist[I_BATCH_N] + 1, 0), min(pid + 1, n_pk_cap)):
                pk_deliv[j] = te
                pk_fate[j] = FATE_DELIVERED
            _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_DELIVER, pid)
            if not time_mode:
                if ist[I_SERVICES] == n_warm:
                    fs[F_WIN_LO] = te
                if ist[I_SERVICES] >= n_total:
                    fs[F_WIN_HI] = te
                    ist[I_DONE] = 1
                    return DONE
            if ist[I_BUF] == 1:
                bid = ist[I_BUF_ID]
                # compare against the scheduled deadline, then clip the rounding
                if te > fs[F_BUF_ENTER] + tau:
                    ist[I_MAX_SOJOURN_VIOL] += 1
                    w = te - fs[F_BUF_ENTER]
                else:
                    w = min(te - fs[F_BUF_ENTER], tau)
                if in_win:
                    acc[A_WAIT_SUM] += w
                    acc[A_N_WAIT] += 1.0
                    if w > acc[A_MAX_WAIT]:
                        acc[A_MAX_WAIT] = w
                fs[F_BATCH_SX] = fs[F_HELD_SX] + fs[F_BUF_X]
                fs[F_BATCH_SXG] = fs[F_HELD_SXG] + fs[F_BUF_X] * fs[F_BUF_GEN]
                ist[I_BATCH_N] = ist[I_HELD_N] + 1
                fs[F_HELD_SX] = 0.0
                fs[F_HELD_SXG] = 0.0
                ist[I_HELD_N] = 0
                s = stimes[idx[2]]
                idx[2] += 1
                ist[I_TX_BUSY] = 1
                fs[F_SVC_END] = te + s
                fs[F_SVC_GEN] = fs[F_BUF_GEN]
                ist[I_SVC_ID] = bid
                ist[I_BUF] = 0
                ist[I_BUF_ID] = -1
                for j in range(max(bid - ist[I_BATCH_N] + 1, 0), min(bid + 1, n_pk_cap)):
                    pk_start[j] = te
                _record_event(ev_t, ev_kind, ev_pid, ev_cs, ev_tx, ist, te, EV_SERVICE_START, bid)
