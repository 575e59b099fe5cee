# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: orbit iteration and stopping-time walk sampling.

Must stay operation-for-operation identical to ``_kernels_py.py`` (same order
of floating-point operations, same comparisons); the extension is compiled
with contraction disabled so both lanes produce bit-identical accumulators.
"""

from libc.math cimport exp, expm1, log, floor

COMPILED = True


def orbit_chunk(const double[::1] uniforms,
                double[::1] fstate, long long[::1] istate,
                double a, double gamma, double p_minus,
                double x_plus, double ell, double r_thresh,
                bint separated, double ln_a, double t_plus, double far_gap,
                long long tail_res,
                double integrand_left, double integrand_right, double integrand_bulk,
                long long burn_in, long long batch_len,
                long long[::1] counts_M, long long[::1] counts_left,
                long long[::1] counts_right, long long[::1] counts_L,
                long long[::1] counts_C, long long[::1] counts_R,
                double[::1] integrand_sum,
                long long[::1] hist,
                long long[::1] tail_hist_left, long long[::1] tail_hist_right,
                long long[::1] kac):
    cdef Py_ssize_t n = uniforms.shape[0]
    cdef long long nbins = hist.shape[0]
    cdef long long levels = tail_hist_left.shape[0]
    cdef double mag = fstate[0]
    cdef double depth = fstate[1]
    cdef long long region = istate[0]
    cdef long long side = istate[1]
    cdef long long ups = istate[2]
    cdef long long downs = istate[3]
    cdef long long gidx = istate[4]
    cdef long long batch = istate[5]
    cdef long long boundary = istate[6]
    cdef Py_ssize_t k
    cdef long long j, idx, lvl
    cdef double x, w, t, xl, nm, dd, dprev
    cdef bint minus, deeper
    with nogil:
        for k in range(n):
            if gidx >= burn_in:
                j = gidx - burn_in
                while j >= boundary and batch < 99:
                    batch += 1
                    boundary += batch_len
                if region == 0:
                    counts_M[batch] += 1
                    x = mag if side == 0 else 1.0 - mag
                    idx = <long long>(x * nbins)
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
                    w = <double>ups - gamma * <double>downs
                    t = t_plus + (depth + w)
                    lvl = <long long>floor(t * tail_res)
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
                w = <double>ups - gamma * <double>downs
                dd = depth + w
                if dd <= 0.0:
                    # exit lands in M; it can overshoot almost to the far
                    # endpoint, so store it from whichever endpoint it is
                    # nearer.  The far distance is 1 - (1-far_gap)*a^(dd+gamma),
                    # evaluated without cancellation (far_gap is the breakpoint
                    # image gap).
                    mag = x_plus * exp(dd * ln_a)
                    side = 0 if region == 1 else 1
                    if mag > 0.5:
                        dprev = dd + gamma
                        mag = -expm1(dprev * ln_a) + far_gap * exp(dprev * ln_a)
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


def walk_chunk(const double[::1] uniforms, double gamma, double p_up, long long cap,
               long long[::1] out_n, double[::1] out_s, unsigned char[::1] out_c,
               long long[::1] wstate):
    """Consume uniforms to advance stopping-time walk trials; resumable."""
    cdef Py_ssize_t n = uniforms.shape[0]
    cdef long long n_trials = out_n.shape[0]
    cdef long long ti = wstate[0]
    cdef long long ups = wstate[1]
    cdef long long downs = wstate[2]
    cdef long long draws = wstate[3]
    cdef Py_ssize_t k = 0
    cdef double w
    with nogil:
        while k < n and ti < n_trials:
            if uniforms[k] < p_up:
                ups += 1
            else:
                downs += 1
            draws += 1
            k += 1
            w = <double>ups - gamma * <double>downs
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
