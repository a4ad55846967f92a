"""Numba kernels for the message-passing decoders.

Every kernel operates on flat per-edge arrays indexed by the TannerGraph
layout (row-major edges; check c owns check_ptr[c]:check_ptr[c+1]). The
step kernels are shared between the fused per-frame decode loops and the
step-by-step Python API so both produce bit-identical trajectories.

Saturation: message magnitudes are capped at LLR_MAX after every update;
tanh arguments are clipped to ±TANH_CLIP and atanh inputs to ±ATANH_LIM to
keep the check update inside the representable domain.
"""

import math

import numpy as np
from numba import njit

LLR_MAX = 30.0
TANH_CLIP = 19.0
ATANH_LIM = 1.0 - 1e-12
RHO_EPS = 1e-3


@njit(cache=True, nogil=True)
def clamp(x, bound):
    if x > bound:
        return bound
    if x < -bound:
        return -bound
    return x


@njit(cache=True, nogil=True)
def boxplus(a, b):
    # exact LLR check combination 2*atanh(tanh(a/2)*tanh(b/2)) in the
    # overflow-safe min-plus-correction form
    s = min(abs(a), abs(b))
    if (a < 0.0) != (b < 0.0):
        s = -s
    return s + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))


@njit(cache=True, nogil=True)
def softplus(x):
    m = x if x > 0.0 else 0.0
    return m + math.log1p(math.exp(-abs(x)))


@njit(cache=True, nogil=True)
def cn_update_kernel(check_ptr, lam_prime, tanh_buf, Lam_out, llr_max):
    # Lambda on edge e of check c = 2*atanh(prod of tanh(lam'/2) over the
    # other edges of c); exclusion via prefix/suffix products, no division.
    C = check_ptr.size - 1
    for c in range(C):
        lo, hi = check_ptr[c], check_ptr[c + 1]
        for e in range(lo, hi):
            tanh_buf[e] = math.tanh(clamp(0.5 * lam_prime[e], TANH_CLIP))
        suffix = 1.0
        for e in range(hi - 1, lo - 1, -1):
            Lam_out[e] = suffix
            suffix *= tanh_buf[e]
        prefix = 1.0
        for e in range(lo, hi):
            prod = prefix * Lam_out[e]
            prefix *= tanh_buf[e]
            # a fully polarized product (|prod| at the atanh limit, e.g. the
            # empty product of a degree-1 check) saturates straight to the bound
            if prod >= ATANH_LIM:
                Lam_out[e] = llr_max
            elif prod <= -ATANH_LIM:
                Lam_out[e] = -llr_max
            else:
                Lam_out[e] = clamp(2.0 * math.atanh(prod), llr_max)


@njit(cache=True, nogil=True)
def vn_update_spa_kernel(
    var_ptr, var_edge_idx, lam_prime, Lam, exclusive, lam_out, llr_max
):
    V = var_ptr.size - 1
    for v in range(V):
        lo, hi = var_ptr[v], var_ptr[v + 1]
        total = 0.0
        for k in range(lo, hi):
            total += Lam[var_edge_idx[k]]
        for k in range(lo, hi):
            e = var_edge_idx[k]
            s = total - Lam[e] if exclusive else total
            lam_out[e] = clamp(lam_prime[e] + s, llr_max)


@njit(cache=True, nogil=True)
def vn_update_arsbp_kernel(
    var_ptr,
    var_edge_idx,
    lam_prime,
    lam_prev,
    Lam,
    beta,
    gamma,
    exclusive,
    clamp_rho,
    lam_out,
    rho_out,
    delta_out,
    llr_max,
):
    # rho = gamma - beta * ||lam'|-|S|| / (|lam'|+|S|) * Delta, with
    # Delta = sign(previous lambda + S), sign(0) = +1, and lambda =
    # rho*(lam' + S). beta = 0 collapses to the plain SPA update bit-exactly.
    V = var_ptr.size - 1
    for v in range(V):
        lo, hi = var_ptr[v], var_ptr[v + 1]
        total = 0.0
        for k in range(lo, hi):
            total += Lam[var_edge_idx[k]]
        for k in range(lo, hi):
            e = var_edge_idx[k]
            s = total - Lam[e] if exclusive else total
            delta = 1.0 if lam_prev[e] + s >= 0.0 else -1.0
            denom = abs(lam_prime[e]) + abs(s)
            frac = 0.0 if denom == 0.0 else abs(abs(lam_prime[e]) - abs(s)) / denom
            rho = gamma - beta * frac * delta
            if clamp_rho:
                if rho > 1.0:
                    rho = 1.0
                elif rho < RHO_EPS:
                    rho = RHO_EPS
            lam_out[e] = clamp(rho * (lam_prime[e] + s), llr_max)
            rho_out[e] = rho
            delta_out[e] = delta


@njit(cache=True, nogil=True)
def posterior_kernel(var_ptr, var_edge_idx, Lam, y, bits_out):
    # bit = 1 iff y[v] + sum of incoming Lambda <= 0
    V = var_ptr.size - 1
    for v in range(V):
        total = y[v]
        for k in range(var_ptr[v], var_ptr[v + 1]):
            total += Lam[var_edge_idx[k]]
        bits_out[v] = 1 if total <= 0.0 else 0


@njit(cache=True, nogil=True)
def syndrome_kernel(check_ptr, edge_var, bits):
    C = check_ptr.size - 1
    for c in range(C):
        parity = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            parity ^= bits[edge_var[e]]
        if parity:
            return False
    return True


@njit(cache=True, nogil=True)
def init_lam_prime_kernel(edge_var, y, out, llr_max):
    for e in range(edge_var.size):
        out[e] = clamp(y[edge_var[e]], llr_max)


@njit(cache=True, nogil=True)
def refresh_arsbp_kernel(rho, lam, lam_prime_out, llr_max):
    # continuation rule: lam' <- rho * lambda
    for e in range(lam.size):
        lam_prime_out[e] = clamp(rho[e] * lam[e], llr_max)


@njit(cache=True, nogil=True)
def _trace_row(lam, rho, gamma, stats, row):
    msk_min = lam[0] if lam.size else 0.0
    msk_max = msk_min
    dev = 0.0
    for e in range(lam.size):
        if lam[e] < msk_min:
            msk_min = lam[e]
        if lam[e] > msk_max:
            msk_max = lam[e]
        dev += abs(rho[e] - gamma)
    stats[row, 0] = dev / lam.size if lam.size else 0.0
    stats[row, 1] = msk_min
    stats[row, 2] = msk_max


@njit(cache=True, nogil=True)
def spa_loop(
    check_ptr,
    edge_var,
    var_ptr,
    var_edge_idx,
    y,
    t_max,
    exclusive,
    llr_max,
    want_trace,
    trace_bits,
    trace_stats,
):
    E = edge_var.size
    V = var_ptr.size - 1
    lam_prime = np.empty(E)
    lam = np.empty(E)
    Lam = np.zeros(E)
    tanh_buf = np.empty(E)
    rho = np.ones(E)
    bits = np.zeros(V, np.uint8)
    init_lam_prime_kernel(edge_var, y, lam_prime, llr_max)
    iters = t_max
    ok = False
    for t in range(1, t_max + 1):
        cn_update_kernel(check_ptr, lam_prime, tanh_buf, Lam, llr_max)
        vn_update_spa_kernel(
            var_ptr, var_edge_idx, lam_prime, Lam, exclusive, lam, llr_max
        )
        posterior_kernel(var_ptr, var_edge_idx, Lam, y, bits)
        ok = syndrome_kernel(check_ptr, edge_var, bits)
        if want_trace:
            for v in range(V):
                trace_bits[t - 1, v] = bits[v]
            _trace_row(lam, rho, 1.0, trace_stats, t - 1)
            trace_stats[t - 1, 3] = 1.0 if ok else 0.0
        if ok:
            iters = t
            break
        for e in range(E):
            lam_prime[e] = lam[e]
    return bits, iters, ok


@njit(cache=True, nogil=True)
def arsbp_loop(
    check_ptr,
    edge_var,
    var_ptr,
    var_edge_idx,
    y,
    t_max,
    beta,
    gamma,
    exclusive,
    clamp_rho,
    llr_max,
    want_trace,
    trace_bits,
    trace_stats,
):
    E = edge_var.size
    V = var_ptr.size - 1
    lam_prime = np.empty(E)
    lam_prev = np.empty(E)
    lam = np.empty(E)
    Lam = np.zeros(E)
    tanh_buf = np.empty(E)
    rho = np.ones(E)
    delta = np.ones(E)
    bits = np.zeros(V, np.uint8)
    init_lam_prime_kernel(edge_var, y, lam_prime, llr_max)
    for e in range(E):
        lam_prev[e] = lam_prime[e]
    iters = t_max
    ok = False
    for t in range(1, t_max + 1):
        cn_update_kernel(check_ptr, lam_prime, tanh_buf, Lam, llr_max)
        vn_update_arsbp_kernel(
            var_ptr,
            var_edge_idx,
            lam_prime,
            lam_prev,
            Lam,
            beta,
            gamma,
            exclusive,
            clamp_rho,
            lam,
            rho,
            delta,
            llr_max,
        )
        posterior_kernel(var_ptr, var_edge_idx, Lam, y, bits)
        ok = syndrome_kernel(check_ptr, edge_var, bits)
        if want_trace:
            for v in range(V):
                trace_bits[t - 1, v] = bits[v]
            _trace_row(lam, rho, 1.0, trace_stats, t - 1)
            trace_stats[t - 1, 3] = 1.0 if ok else 0.0
        if ok:
            iters = t
            break
        refresh_arsbp_kernel(rho, lam, lam_prime, llr_max)
        tmp = lam_prev
        lam_prev = lam
        lam = tmp
    return bits, iters, ok


@njit(cache=True, nogil=True)
def _cn_one(c, check_ptr, lam, tanh_buf, Lam_new, llr_max):
    lo, hi = check_ptr[c], check_ptr[c + 1]
    for e in range(lo, hi):
        tanh_buf[e] = math.tanh(clamp(0.5 * lam[e], TANH_CLIP))
    suffix = 1.0
    for e in range(hi - 1, lo - 1, -1):
        Lam_new[e] = suffix
        suffix *= tanh_buf[e]
    prefix = 1.0
    for e in range(lo, hi):
        prod = prefix * Lam_new[e]
        prefix *= tanh_buf[e]
        if prod >= ATANH_LIM:
            Lam_new[e] = llr_max
        elif prod <= -ATANH_LIM:
            Lam_new[e] = -llr_max
        else:
            Lam_new[e] = clamp(2.0 * math.atanh(prod), llr_max)


@njit(cache=True, nogil=True)
def _check_residual(c, check_ptr, Lam, Lam_new):
    r = 0.0
    for e in range(check_ptr[c], check_ptr[c + 1]):
        d = abs(Lam_new[e] - Lam[e])
        if d > r:
            r = d
    return r


@njit(cache=True, nogil=True)
def nwrbp_loop(
    check_ptr,
    edge_check,
    edge_var,
    var_ptr,
    var_edge_idx,
    y,
    budget,
    llr_max,
):
    # Residual-scheduled BP: commit the check with the largest pending
    # change, then refresh its neighborhood. One iteration-equivalent is C
    # commits; the returned count is ceil(commits / C), at least 1.
    E = edge_var.size
    V = var_ptr.size - 1
    C = check_ptr.size - 1
    lam = np.empty(E)
    Lam = np.zeros(E)
    Lam_new = np.empty(E)
    tanh_buf = np.empty(E)
    resid = np.empty(C)
    total = np.empty(V)
    bits = np.empty(V, np.uint8)
    parity = np.zeros(C, np.uint8)
    stamp = np.full(C, -1, np.int64)

    for v in range(V):
        total[v] = y[v]
    init_lam_prime_kernel(edge_var, y, lam, llr_max)
    for c in range(C):
        _cn_one(c, check_ptr, lam, tanh_buf, Lam_new, llr_max)
        resid[c] = _check_residual(c, check_ptr, Lam, Lam_new)
    for v in range(V):
        bits[v] = 1 if total[v] <= 0.0 else 0
    unsat = 0
    for c in range(C):
        p = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            p ^= bits[edge_var[e]]
        parity[c] = p
        unsat += p
    if unsat == 0:
        return bits, 1, True

    max_commits = budget * C
    commits = 0
    converged = False
    while commits < max_commits:
        best = 0
        best_r = resid[0]
        for c in range(1, C):
            if resid[c] > best_r:
                best_r = resid[c]
                best = c
        if best_r <= 0.0:
            break
        commits += 1
        lo, hi = check_ptr[best], check_ptr[best + 1]
        for e in range(lo, hi):
            d = Lam_new[e] - Lam[e]
            if d != 0.0:
                Lam[e] = Lam_new[e]
                total[edge_var[e]] += d
        resid[best] = 0.0
        for e in range(lo, hi):
            v = edge_var[e]
            nb = 1 if total[v] <= 0.0 else 0
            if nb != bits[v]:
                bits[v] = nb
                for k in range(var_ptr[v], var_ptr[v + 1]):
                    c2 = edge_check[var_edge_idx[k]]
                    if parity[c2]:
                        parity[c2] = 0
                        unsat -= 1
                    else:
                        parity[c2] = 1
                        unsat += 1
            for k in range(var_ptr[v], var_ptr[v + 1]):
                e2 = var_edge_idx[k]
                lam[e2] = clamp(total[v] - Lam[e2], llr_max)
        if unsat == 0:
            converged = True
            break
        for e in range(lo, hi):
            v = edge_var[e]
            for k in range(var_ptr[v], var_ptr[v + 1]):
                c2 = edge_check[var_edge_idx[k]]
                if c2 != best and stamp[c2] != commits:
                    stamp[c2] = commits
                    _cn_one(c2, check_ptr, lam, tanh_buf, Lam_new, llr_max)
                    resid[c2] = _check_residual(c2, check_ptr, Lam, Lam_new)
    iters = (commits + C - 1) // C if C else 1
    if iters < 1:
        iters = 1
    return bits, iters, converged
