"""Dormand-Prince 5(4) integrator for linear systems y' = M y with complex state.

The kernel is compiled with numba; the state here is a handful of density-matrix
entries, so per-step Python overhead would otherwise dominate long detuned runs.
Output is produced by the 4th-order continuous extension at the requested grid.
"""

import numpy as np
from numba import njit

# Butcher tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# 5th-order minus embedded 4th-order weights, 7 stages (last one is f(y_new))
E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# continuous extension: y(t + x h) = y + h * sum_s K_s * (P[s] . [x, x^2, x^3, x^4])
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


@njit(cache=True, error_model="numpy")
def _matvec(M, y, out):
    n = M.shape[0]
    for i in range(n):
        acc = 0j
        for j in range(n):
            acc += M[i, j] * y[j]
        out[i] = acc


@njit(cache=True, error_model="numpy")
def _err_norm(err, y, y_new, rtol, atol):
    n = err.shape[0]
    acc = 0.0
    for i in range(n):
        scale = atol + rtol * max(abs(y[i]), abs(y_new[i]))
        r = abs(err[i]) / scale
        acc += r * r
    return np.sqrt(acc / n)


@njit(cache=True, error_model="numpy")
def _tidy(y, conj_perm, diag_idx, renorm_tol):
    """Symmetrize to the Hermitian part and renormalize the trace if it drifted.

    Returns the trace drift seen before renormalization.
    """
    n = y.shape[0]
    if conj_perm.shape[0] == n:
        tmp = y.copy()
        for i in range(n):
            y[i] = 0.5 * (tmp[i] + np.conj(tmp[conj_perm[i]]))
    if diag_idx.shape[0] == 0:
        return 0.0
    tr = 0j
    for i in diag_idx:
        tr += y[i]
    drift = abs(tr - 1.0)
    if drift > renorm_tol:
        for i in range(n):
            y[i] = y[i] / tr
    return drift


@njit(cache=True, error_model="numpy")
def _initial_step(M, y0, f0, rtol, atol, max_step):
    n = y0.shape[0]
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        scale = atol + rtol * abs(y0[i])
        d0 += (abs(y0[i]) / scale) ** 2
        d1 += (abs(f0[i]) / scale) ** 2
    d0 = np.sqrt(d0 / n)
    d1 = np.sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    if not (h0 > 0 and np.isfinite(h0)):
        h0 = 1e-6
    h0 = min(h0, max_step)
    y1 = y0 + h0 * f0
    f1 = np.empty_like(y0)
    _matvec(M, y1, f1)
    d2 = 0.0
    for i in range(n):
        scale = atol + rtol * abs(y0[i])
        d2 += (abs(f1[i] - f0[i]) / scale) ** 2
    d2 = np.sqrt(d2 / n) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 5.0)
    h = min(100 * h0, h1, max_step)
    return h if h > 0 else h0


@njit(cache=True, error_model="numpy")
def dopri5_grid(M, y0, t_grid, rtol, atol, max_step, first_step,
                conj_perm, diag_idx, renorm_tol, max_steps):
    """Integrate y' = M y from t_grid[0], returning samples at every t_grid point.

    Returns (Y, n_accepted, n_rejected, max_drift, status, t_fail).
    """
    n = y0.shape[0]
    nt = t_grid.shape[0]
    Y = np.zeros((nt, n), dtype=np.complex128)
    Y[0] = y0
    K = np.zeros((7, n), dtype=np.complex128)
    ys = np.empty(n, dtype=np.complex128)
    y = y0.copy()
    y_new = np.empty(n, dtype=np.complex128)
    err = np.empty(n, dtype=np.complex128)
    Q = np.empty((4, n), dtype=np.complex128)

    t = t_grid[0]
    t_end = t_grid[nt - 1]
    _matvec(M, y, K[0])
    if first_step > 0:
        h = min(first_step, max_step)
    else:
        h = _initial_step(M, y, K[0], rtol, atol, max_step)
    n_acc = 0
    n_rej = 0
    max_drift = 0.0
    next_out = 1
    eps = np.finfo(np.float64).eps

    while next_out < nt:
        if n_acc + n_rej >= max_steps:
            return Y, n_acc, n_rej, max_drift, STATUS_MAX_STEPS, t
        min_step = 10 * eps * max(abs(t), 1.0)
        if h < min_step:
            return Y, n_acc, n_rej, max_drift, STATUS_UNDERFLOW, t
        h = min(h, max_step)
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True

        _matvec(M, y, K[0])
        for s in range(1, 6):
            for i in range(n):
                acc = y[i]
                for r in range(s):
                    acc += h * A[s, r] * K[r, i]
                ys[i] = acc
            _matvec(M, ys, K[s])
        for i in range(n):
            acc = y[i]
            for s in range(6):
                acc += h * B[s] * K[s, i]
            y_new[i] = acc
        _matvec(M, y_new, K[6])
        for i in range(n):
            acc = 0j
            for s in range(7):
                acc += E[s] * K[s, i]
            err[i] = h * acc
        en = _err_norm(err, y, y_new, rtol, atol)

        if not en <= 1.0:  # also rejects NaN
            n_rej += 1
            if np.isfinite(en):
                h *= max(MIN_FACTOR, SAFETY * en ** -0.2)
            else:
                h *= MIN_FACTOR
            continue

        t_new = t_end if last else t + h
        for j in range(4):
            for i in range(n):
                acc = 0j
                for s in range(7):
                    acc += K[s, i] * P[s, j]
                Q[j, i] = acc
        while next_out < nt and t_grid[next_out] <= t_new:
            x = (t_grid[next_out] - t) / h
            if next_out == nt - 1 and last:
                x = 1.0
            xp = x
            for i in range(n):
                Y[next_out, i] = y[i]
            for j in range(4):
                for i in range(n):
                    Y[next_out, i] += h * xp * Q[j, i]
                xp *= x
            _tidy(Y[next_out], conj_perm, diag_idx, renorm_tol)
            next_out += 1

        drift = _tidy(y_new, conj_perm, diag_idx, renorm_tol)
        max_drift = max(max_drift, drift)
        n_acc += 1
        t = t_new
        y[:] = y_new

        if en == 0.0:
            factor = MAX_FACTOR
        else:
            factor = min(MAX_FACTOR, SAFETY * en ** -0.2)
        h *= factor

    return Y, n_acc, n_rej, max_drift, STATUS_OK, t
