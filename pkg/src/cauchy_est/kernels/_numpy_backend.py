"""Pure-numpy replication kernels (fallback backend).

Each function processes a block of replications at once: ``x`` is a C-ordered
(reps, n) float64 matrix whose rows are independent sample batches.  Per-row
arithmetic matches the scalar implementations in ``estimators``/``mle``
operation for operation, so a one-row block reproduces those results bit for
bit.  Rows never interact, which keeps results independent of how blocks are
chunked across workers.

Status codes: 0 = ok, 1 = boundary hit (Im <= 0), 2 = branch point or
vanished mean, 3 = solver did not converge.
"""

from __future__ import annotations

import numpy as np

from ..errors import SolverError

_LOG_PI = np.log(np.pi)
_RECIPROCAL_FLOOR = 1e-300
_MAX_HALVINGS = 60
_MAX_BACKTRACKS = 60
# Rounding slack of the monotone-likelihood test; see the scalar solver.
_LL_SLACK_SCALE = 16.0 * 2.220446049250313e-16

KIND_LOG = 0
KIND_RECIPROCAL = 1

STATUS_OK = 0
STATUS_BOUNDARY = 1
STATUS_BRANCH = 2
STATUS_NO_CONVERGENCE = 3


def qam_rows(x, kind, alpha, shifts):
    """Quasi-arithmetic mean per row: shift + f^-1(mean f(row - shift)).

    Returns (raw values complex128[m], status uint8[m]); raw values of
    non-ok rows are present but not meaningful.
    """
    x = np.ascontiguousarray(x, dtype=float)
    shifts = np.asarray(shifts, dtype=float)
    m = x.shape[0]
    alpha = complex(alpha)
    status = np.zeros(m, dtype=np.uint8)
    xs = x - shifts[:, None]
    z = xs.astype(np.complex128)
    z += alpha
    with np.errstate(all="ignore"):
        if kind == KIND_LOG:
            if alpha.imag == 0.0:
                branch = np.any(xs == -alpha.real, axis=1)
                status[branch] = STATUS_BRANCH
            f = np.log(z)
            mean = f.mean(axis=1)
            y = np.exp(mean) - alpha
        elif kind == KIND_RECIPROCAL:
            f = 1.0 / z
            mean = f.mean(axis=1)
            tiny = np.abs(mean) < _RECIPROCAL_FLOOR
            status[tiny] = STATUS_BRANCH
            safe = np.where(tiny, 1.0, mean)
            y = 1.0 / safe - alpha
        else:
            raise ValueError(f"unknown generator kind code {kind!r}")
    y = shifts + y
    boundary = (status == STATUS_OK) & ~(y.imag > 0.0)
    status[boundary] = STATUS_BOUNDARY
    return y, status


def score_rows(x, t):
    """Row-wise mean of (x - t)/(x - conj(t))."""
    x = np.ascontiguousarray(x, dtype=float)
    t = np.asarray(t, dtype=np.complex128)
    h = (x - t[:, None]) / (x - np.conj(t)[:, None])
    return h.mean(axis=1)


def loglik_rows(x, t):
    """Row-wise Cauchy log-likelihood at t."""
    x = np.ascontiguousarray(x, dtype=float)
    t = np.asarray(t, dtype=np.complex128)
    n = x.shape[1]
    dx = x - t.real[:, None]
    sig = t.imag
    return n * (np.log(sig) - _LOG_PI) - np.sum(
        np.log(dx * dx + (sig * sig)[:, None]), axis=1
    )


def one_step_rows(x, y):
    """One guarded scoring step per row from the points y (Im > 0 assumed)."""
    x = np.ascontiguousarray(x, dtype=float)
    y = np.asarray(y, dtype=np.complex128)
    s = score_rows(x, y)
    step = 2j * y.imag * s
    z = y + step
    halvings = np.zeros(y.shape, dtype=np.int32)
    bad = ~(z.imag > 0.0)
    while np.any(bad):
        halvings[bad] += 1
        if halvings.max() > _MAX_HALVINGS:
            raise SolverError("step halving failed to restore Im > 0")
        step = np.where(bad, step * 0.5, step)
        z = np.where(bad, y + step, z)
        bad = ~(z.imag > 0.0)
    return z, halvings


def mle_rows(x, start, score_tol, step_tol, max_iters):
    """Damped scoring iteration per row.

    Returns (theta complex128[m], iterations int32[m], final score norm
    float64[m], converged bool[m]).  Mirrors the scalar solver: converge on
    the score norm, backtrack on Im positivity and monotone log-likelihood,
    stop early when the relative move falls below step_tol.
    """
    x = np.ascontiguousarray(x, dtype=float)
    theta = np.array(start, dtype=np.complex128, copy=True)
    m = theta.shape[0]
    ll = loglik_rows(x, theta)
    iters = np.zeros(m, dtype=np.int32)
    final_norm = np.full(m, np.nan)
    # pending rows still need a final score evaluation at their theta
    active = np.ones(m, dtype=bool)
    pending = np.ones(m, dtype=bool)
    while np.any(active):
        rows = np.flatnonzero(active)
        xa = x[rows]
        s = score_rows(xa, theta[rows])
        norm = np.abs(s)
        done_score = norm < score_tol
        if np.any(done_score):
            idx = rows[done_score]
            final_norm[idx] = norm[done_score]
            active[idx] = False
            pending[idx] = False
        stepping = ~done_score
        if not np.any(stepping):
            continue
        rows = rows[stepping]
        xa = xa[stepping]
        s = s[stepping]
        norm = norm[stepping]
        th = theta[rows]
        step = 2j * th.imag * s
        lam = np.ones(rows.size)
        accepted = np.zeros(rows.size, dtype=bool)
        cand = th + step
        ll_new = np.copy(ll[rows])
        slack = _LL_SLACK_SCALE * (1.0 + np.abs(ll[rows]))
        for _ in range(_MAX_BACKTRACKS):
            trial = np.flatnonzero(~accepted)
            if trial.size == 0:
                break
            ok_im = cand[trial].imag > 0.0
            if np.any(ok_im):
                ev = trial[ok_im]
                ll_cand = loglik_rows(xa[ev], cand[ev])
                good = ll_cand >= ll[rows[ev]] - slack[ev]
                acc = ev[good]
                accepted[acc] = True
                ll_new[acc] = ll_cand[good]
            retry = np.flatnonzero(~accepted)
            if retry.size == 0:
                break
            lam[retry] *= 0.5
            cand[retry] = th[retry] + lam[retry] * step[retry]
        stuck = ~accepted
        if np.any(stuck):
            idx = rows[stuck]
            final_norm[idx] = norm[stuck]
            active[idx] = False
            pending[idx] = False
        moved_rows = np.flatnonzero(accepted)
        if moved_rows.size:
            idx = rows[moved_rows]
            moved = np.abs(cand[moved_rows] - theta[idx]) / theta[idx].imag
            theta[idx] = cand[moved_rows]
            ll[idx] = ll_new[moved_rows]
            iters[idx] += 1
            small = moved < step_tol
            exhausted = iters[idx] >= max_iters
            stop = small | exhausted
            active[idx[stop]] = False
    if np.any(pending):
        rows = np.flatnonzero(pending)
        final_norm[rows] = np.abs(score_rows(x[rows], theta[rows]))
    converged = final_norm < score_tol
    return theta, iters, final_norm, converged
