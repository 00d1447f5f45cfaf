"""Compiled integration kernels.

The Hamiltonian along either leg of the triangle pulse is linear in time,
H(t) = B + diag(a) * (c0 + c1*t), so every kernel takes the slope vector
`a`, the constant matrix `b` and the leg coefficients (c0, c1).  The state
is propagated as the full density matrix with the commutator right-hand
side -i[H, rho].

Two independent steppers are provided: an embedded Dormand-Prince 5(4)
pair with FSAL and a standard error-per-step controller (the production
path), and a plain fixed-step classic RK4 (the brute-force oracle used by
the tests).  Both split every pulse at the apex where the sweep slope is
discontinuous.

Status codes: 0 ok, 1 step-size underflow, 2 trajectory buffer overflow.

All kernels are pure functions of their arguments; sweep parallelism is a
prange over cells writing to disjoint output slots, so results do not
depend on the number of threads.
"""

import numpy as np
from numba import njit, prange

# stats vector layout
N_ACCEPTED = 0
N_REJECTED = 1
N_RHS = 2
MAX_TRACE_DEV = 3
N_RECORDED = 4
STATS_LEN = 5

# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0,
)
# 5th-order minus embedded 4th-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0,
    22.0 / 525.0, -1.0 / 40.0,
)

_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0


@njit(cache=True, inline="always")
def _rhs(a, b, c0, c1, t, y, out):
    """out = -i [B + diag(a)*(c0 + c1*t), y]."""
    dphi = c0 + c1 * t
    dim = y.shape[0]
    for i in range(dim):
        di = a[i] * dphi
        for j in range(dim):
            acc = (di - a[j] * dphi) * y[i, j]
            for m in range(dim):
                acc += b[i, m] * y[m, j] - y[i, m] * b[m, j]
            out[i, j] = acc * (-1j)


@njit(cache=True)
def _dp45_segment(a, b, c0, c1, t0, t1, y,
                  rel_tol, abs_tol, max_step, h_init,
                  rec_t, rec_y, stats):
    """Adaptive leg integration in place; returns (status, t_reached)."""
    dim = y.shape[0]
    k1 = np.empty((dim, dim), np.complex128)
    k2 = np.empty((dim, dim), np.complex128)
    k3 = np.empty((dim, dim), np.complex128)
    k4 = np.empty((dim, dim), np.complex128)
    k5 = np.empty((dim, dim), np.complex128)
    k6 = np.empty((dim, dim), np.complex128)
    k7 = np.empty((dim, dim), np.complex128)
    yt = np.empty((dim, dim), np.complex128)
    y5 = np.empty((dim, dim), np.complex128)
    record = rec_t.size > 0

    span = t1 - t0
    if span <= 0.0:
        return 0, t0
    t = t0
    h = h_init
    if h > max_step:
        h = max_step
    if h > span:
        h = span
    _rhs(a, b, c0, c1, t, y, k1)
    stats[N_RHS] += 1.0

    h_floor = 1e-14 * (abs(t1) + abs(t0) + 1.0)

    while True:
        remaining = t1 - t
        if remaining <= 0.0:
            break
        last = h >= remaining
        if last:
            h = remaining
        if h < h_floor:
            return 1, t

        for i in range(dim):
            for j in range(dim):
                yt[i, j] = y[i, j] + h * _A21 * k1[i, j]
        _rhs(a, b, c0, c1, t + _C2 * h, yt, k2)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = y[i, j] + h * (_A31 * k1[i, j] + _A32 * k2[i, j])
        _rhs(a, b, c0, c1, t + _C3 * h, yt, k3)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = y[i, j] + h * (
                    _A41 * k1[i, j] + _A42 * k2[i, j] + _A43 * k3[i, j]
                )
        _rhs(a, b, c0, c1, t + _C4 * h, yt, k4)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = y[i, j] + h * (
                    _A51 * k1[i, j] + _A52 * k2[i, j]
                    + _A53 * k3[i, j] + _A54 * k4[i, j]
                )
        _rhs(a, b, c0, c1, t + _C5 * h, yt, k5)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = y[i, j] + h * (
                    _A61 * k1[i, j] + _A62 * k2[i, j] + _A63 * k3[i, j]
                    + _A64 * k4[i, j] + _A65 * k5[i, j]
                )
        _rhs(a, b, c0, c1, t + h, yt, k6)
        for i in range(dim):
            for j in range(dim):
                y5[i, j] = y[i, j] + h * (
                    _B1 * k1[i, j] + _B3 * k3[i, j] + _B4 * k4[i, j]
                    + _B5 * k5[i, j] + _B6 * k6[i, j]
                )
        _rhs(a, b, c0, c1, t + h, y5, k7)
        stats[N_RHS] += 6.0

        err = 0.0
        for i in range(dim):
            for j in range(dim):
                e = h * (
                    _E1 * k1[i, j] + _E3 * k3[i, j] + _E4 * k4[i, j]
                    + _E5 * k5[i, j] + _E6 * k6[i, j] + _E7 * k7[i, j]
                )
                ya = abs(y[i, j])
                yb = abs(y5[i, j])
                scale = abs_tol + rel_tol * (ya if ya > yb else yb)
                r = abs(e) / scale
                if r > err:
                    err = r

        if err <= 1.0:
            t = t1 if last else t + h
            tr_re = 0.0
            tr_im = 0.0
            for i in range(dim):
                for j in range(dim):
                    y[i, j] = y5[i, j]
                    k1[i, j] = k7[i, j]
                tr_re += y[i, i].real
                tr_im += y[i, i].imag
            dev = np.sqrt((tr_re - 1.0) ** 2 + tr_im ** 2)
            if dev > stats[MAX_TRACE_DEV]:
                stats[MAX_TRACE_DEV] = dev
            stats[N_ACCEPTED] += 1.0
            if record:
                n = int(stats[N_RECORDED])
                if n >= rec_t.size:
                    return 2, t
                rec_t[n] = t
                for i in range(dim):
                    for j in range(dim):
                        rec_y[n, i, j] = y[i, j]
                stats[N_RECORDED] += 1.0
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * err ** -0.2
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            h = h * fac
            if h > max_step:
                h = max_step
        else:
            stats[N_REJECTED] += 1.0
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            elif fac > 1.0:
                fac = 1.0
            h = h * fac

    return 0, t1


@njit(cache=True)
def _rk4_segment(a, b, c0, c1, t0, t1, h_nominal, y, rec_t, rec_y, stats):
    """Fixed-step classic RK4 leg; the step is rounded to divide the leg."""
    dim = y.shape[0]
    k1 = np.empty((dim, dim), np.complex128)
    k2 = np.empty((dim, dim), np.complex128)
    k3 = np.empty((dim, dim), np.complex128)
    k4 = np.empty((dim, dim), np.complex128)
    yt = np.empty((dim, dim), np.complex128)
    record = rec_t.size > 0

    span = t1 - t0
    if span <= 0.0:
        return 0, t0
    n = int(round(span / h_nominal))
    if n < 1:
        n = 1
    h = span / n

    for step in range(n):
        t = t0 + step * h
        _rhs(a, b, c0, c1, t, y, k1)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = y[i, j] + 0.5 * h * k1[i, j]
        _rhs(a, b, c0, c1, t + 0.5 * h, yt, k2)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = y[i, j] + 0.5 * h * k2[i, j]
        _rhs(a, b, c0, c1, t + 0.5 * h, yt, k3)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = y[i, j] + h * k3[i, j]
        _rhs(a, b, c0, c1, t + h, yt, k4)
        stats[N_RHS] += 4.0

        tr_re = 0.0
        tr_im = 0.0
        for i in range(dim):
            for j in range(dim):
                y[i, j] = y[i, j] + (h / 6.0) * (
                    k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j]
                )
            tr_re += y[i, i].real
            tr_im += y[i, i].imag
        dev = np.sqrt((tr_re - 1.0) ** 2 + tr_im ** 2)
        if dev > stats[MAX_TRACE_DEV]:
            stats[MAX_TRACE_DEV] = dev
        stats[N_ACCEPTED] += 1.0
        if record:
            nr = int(stats[N_RECORDED])
            if nr >= rec_t.size:
                return 2, t + h
            rec_t[nr] = t1 if step == n - 1 else t + h
            for i in range(dim):
                for j in range(dim):
                    rec_y[nr, i, j] = y[i, j]
            stats[N_RECORDED] += 1.0

    return 0, t1


@njit(cache=True)
def _pulse_legs(phi_i, phi_f, tau):
    """(c0, c1) coefficients of the rising and falling triangle legs."""
    k = 2.0 * (phi_f - phi_i) / tau
    return phi_i, k, phi_i + k * tau, -k


@njit(cache=True)
def _evolve_pulse_adaptive(a, b, phi_i, phi_f, tau,
                           rel_tol, abs_tol, max_step, h_init,
                           y, rec_t, rec_y, stats):
    c0r, c1r, c0f, c1f = _pulse_legs(phi_i, phi_f, tau)
    status, tr = _dp45_segment(
        a, b, c0r, c1r, 0.0, 0.5 * tau, y,
        rel_tol, abs_tol, max_step, h_init, rec_t, rec_y, stats,
    )
    if status != 0:
        return status, tr
    return _dp45_segment(
        a, b, c0f, c1f, 0.5 * tau, tau, y,
        rel_tol, abs_tol, max_step, h_init, rec_t, rec_y, stats,
    )


@njit(cache=True)
def _evolve_pulse_rk4(a, b, phi_i, phi_f, tau, h_nominal,
                      y, rec_t, rec_y, stats):
    c0r, c1r, c0f, c1f = _pulse_legs(phi_i, phi_f, tau)
    status, tr = _rk4_segment(
        a, b, c0r, c1r, 0.0, 0.5 * tau, h_nominal, y, rec_t, rec_y, stats,
    )
    if status != 0:
        return status, tr
    return _rk4_segment(
        a, b, c0f, c1f, 0.5 * tau, tau, h_nominal, y, rec_t, rec_y, stats,
    )


@njit(cache=True, parallel=True)
def _sweep_adaptive(a, b, phi_i, phi_f_axis, tau_axis,
                    rel_tol, abs_tol, max_step, h_init):
    """Population map over the (tau, phi_f) grid.

    Returns (w11, finals, trace_dev, steps, rhs_evals, status, t_fail);
    each cell is an independent pulse integration from the pure initial
    state, so the outputs are identical for any thread count.
    """
    dim = a.size
    n_tau = tau_axis.size
    n_pf = phi_f_axis.size
    n_cells = n_tau * n_pf
    w11 = np.empty((n_tau, n_pf))
    finals = np.empty((n_tau, n_pf, dim, dim), np.complex128)
    trace_dev = np.empty((n_tau, n_pf))
    steps = np.empty((n_tau, n_pf), np.int64)
    rhs_evals = np.empty((n_tau, n_pf), np.int64)
    status = np.zeros((n_tau, n_pf), np.int64)
    t_fail = np.zeros((n_tau, n_pf))
    empty_t = np.empty(0)
    empty_y = np.empty((0, dim, dim), np.complex128)

    for cell in prange(n_cells):
        i = cell // n_pf
        j = cell % n_pf
        y = np.zeros((dim, dim), np.complex128)
        y[0, 0] = 1.0 + 0.0j
        stats = np.zeros(STATS_LEN)
        st, tr = _evolve_pulse_adaptive(
            a, b, phi_i, phi_f_axis[j], tau_axis[i],
            rel_tol, abs_tol, max_step, h_init,
            y, empty_t, empty_y, stats,
        )
        status[i, j] = st
        t_fail[i, j] = tr
        w11[i, j] = y[0, 0].real
        for p in range(dim):
            for q in range(dim):
                finals[i, j, p, q] = y[p, q]
        trace_dev[i, j] = stats[MAX_TRACE_DEV]
        steps[i, j] = int(stats[N_ACCEPTED])
        rhs_evals[i, j] = int(stats[N_RHS])

    return w11, finals, trace_dev, steps, rhs_evals, status, t_fail
