"""Pure-Python fallback for the hot loops.

Mirrors ``_kernels.pyx`` operation for operation (same order of floating-point
operations, same comparisons) so that both lanes produce bit-identical
accumulators on the same uniform stream.  Used when the compiled extension is
unavailable; much slower, but correct.
"""

from __future__ import annotations

import math

COMPILED = False


def orbit_chunk(
    uniforms,
    fstate,
    istate,
    a,
    gamma,
    p_minus,
    x_plus,
    ell,
    r_thresh,
    separated,
    ln_a,
    t_plus,
    far_gap,
    tail_res,
    integrand_left,
    integrand_right,
    integrand_bulk,
    burn_in,
    batch_len,
    counts_M,
    counts_left,
    counts_right,
    counts_L,
    counts_C,
    counts_R,
    integrand_sum,
    hist,
    tail_hist_left,
    tail_hist_right,
    kac,
):
    n = uniforms.shape[0]
    nbins = hist.shape[0]
    levels = tail_hist_left.shape[0]
    mag = float(fstate[0])
    depth = float(fstate[1])
    region = int(istate[0])
    side = int(istate[1])
    ups = int(istate[2])
    downs = int(istate[3])
    gidx = int(istate[4])
    batch = int(istate[5])
    boundary = int(istate[6])
    exp = math.exp
    log = math.log
    floor = math.floor
    for k in range(n):
        if gidx >= burn_in:
            j = gidx - burn_in
            while j >= boundary and batch < 99:
                batch += 1
                boundary += batch_len
            if region == 0:
                counts_M[batch] += 1
                x = mag if side == 0 else 1.0 - mag
                idx = int(x * nbins)
                if idx > nbins - 1:
                    idx = nbins - 1
                hist[idx] += 1
                if x == x_plus:
                    integrand_sum[batch] += integrand_left
                else:
                    integrand_sum[batch] += integrand_bulk
                if side == 0:
                    if mag < ell:
                        counts_L[batch] += 1
                    elif mag > r_thresh:
                        counts_R[batch] += 1
                    elif separated:
                        counts_C[batch] += 1
                else:
                    if mag < ell:
                        counts_R[batch] += 1
                    elif mag > r_thresh:
                        counts_L[batch] += 1
                    elif separated:
                        counts_C[batch] += 1
                if kac[0] < 0:
                    kac[0] = j
                kac[1] = j
            else:
                w = float(ups) - gamma * float(downs)
                t = t_plus + (depth + w)
                lvl = int(floor(t * tail_res))
                if lvl < 0:
                    lvl = 0
                if lvl > levels - 1:
                    lvl = levels - 1
                if region == 1:
                    counts_left[batch] += 1
                    integrand_sum[batch] += integrand_left
                    tail_hist_left[lvl] += 1
                else:
                    counts_right[batch] += 1
                    integrand_sum[batch] += integrand_right
                    tail_hist_right[lvl] += 1
        minus = uniforms[k] < p_minus
        if region == 0:
            if minus:
                xl = mag if side == 0 else 1.0 - mag
                nm = a * xl
                if nm < x_plus:
                    region = 1
                    depth = (log(xl) / ln_a - t_plus) + 1.0
                    ups = 0
                    downs = 0
                else:
                    mag = nm
                    side = 0
            else:
                xl = mag if side == 1 else 1.0 - mag
                nm = a * xl
                if nm < x_plus:
                    region = 2
                    depth = (log(xl) / ln_a - t_plus) + 1.0
                    ups = 0
                    downs = 0
                else:
                    mag = nm
                    side = 1
        else:
            deeper = minus if region == 1 else (not minus)
            if deeper:
                ups += 1
            else:
                downs += 1
            w = float(ups) - gamma * float(downs)
            dd = depth + w
            if dd <= 0.0:
                # exit lands in M; it can overshoot almost to the far endpoint,
                # so store it from whichever endpoint it is nearer.  The far
                # distance is 1 - (1-far_gap)*a^(dd+gamma), evaluated without
                # cancellation (far_gap is the breakpoint image gap).
                mag = x_plus * exp(dd * ln_a)
                side = 0 if region == 1 else 1
                if mag > 0.5:
                    dprev = dd + gamma
                    mag = -math.expm1(dprev * ln_a) + far_gap * exp(dprev * ln_a)
                    side = 1 - side
                region = 0
        gidx += 1
    fstate[0] = mag
    fstate[1] = depth
    istate[0] = region
    istate[1] = side
    istate[2] = ups
    istate[3] = downs
    istate[4] = gidx
    istate[5] = batch
    istate[6] = boundary


def walk_chunk(uniforms, gamma, p_up, cap, out_n, out_s, out_c, wstate):
    """Consume uniforms to advance stopping-time walk trials; resumable.

    Returns the number of uniforms consumed (all of them unless the trial
    buffer filled first).
    """
    n = uniforms.shape[0]
    n_trials = out_n.shape[0]
    ti = int(wstate[0])
    ups = int(wstate[1])
    downs = int(wstate[2])
    draws = int(wstate[3])
    k = 0
    while k < n and ti < n_trials:
        if uniforms[k] < p_up:
            ups += 1
        else:
            downs += 1
        draws += 1
        k += 1
        w = float(ups) - gamma * float(downs)
        if w <= -1.0:
            out_n[ti] = draws + 1
            out_s[ti] = w
            out_c[ti] = 0
            ti += 1
            ups = 0
            downs = 0
            draws = 0
        elif draws >= cap:
            out_n[ti] = draws + 1
            out_s[ti] = w
            out_c[ti] = 1
            ti += 1
            ups = 0
            downs = 0
            draws = 0
    wstate[0] = ti
    wstate[1] = ups
    wstate[2] = downs
    wstate[3] = draws
    return k
