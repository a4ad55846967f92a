"""Baseline decoders on the polar transform itself.

* ``sc_decode``: successive cancellation with exact LLR combining.
* ``scl_decode``: list decoding; keeps up to L candidate paths scored by
  the exact penalty metric, so large L approaches maximum likelihood.
* ``dense_bp_decode``: flooding belief propagation over the n-stage
  butterfly factor graph (every stage kept, no sparsification).

All three return the re-encoded codeword estimate, not the message; use
polar_transform to recover the input-domain bits (the transform is its
own inverse).

The SC/SCL machinery follows the usual iterative formulation: a flat LLR
workspace of 2N-1 entries (level l occupies 2N - 2*(N>>l) onward) plus
two partial-sum bit columns per level. Decision ties (LLR exactly 0)
resolve to bit 1, matching the sparse decoders' hard-decision rule.
"""

import numpy as np
from numba import njit

from .codes import CodeSpec, polar_transform
from .kernels import LLR_MAX, boxplus, clamp, softplus


@njit(cache=True, nogil=True)
def _sc_kernel(frozen_mask, y, n):
    N = y.size
    P = np.empty(2 * N - 1)
    C = np.zeros(2 * (2 * N - 1), np.uint8)
    for j in range(N):
        P[j] = y[j]
    for i in range(N):
        if i == 0:
            d = 1
        else:
            z = 0
            t = i
            while t & 1 == 0:
                t >>= 1
                z += 1
            d = n - z
        for lev in range(d, n + 1):
            m = N >> lev
            po = 2 * N - 2 * (m << 1)  # parent offset, level lev-1
            so = 2 * N - 2 * m  # own offset
            if lev == d and i > 0:
                co = 2 * so  # left-sibling bits live in slot 0
                for j in range(m):
                    a = P[po + j]
                    b = P[po + j + m]
                    P[so + j] = b - a if C[co + j] else b + a
            else:
                for j in range(m):
                    P[so + j] = boxplus(P[po + j], P[po + j + m])
        lam = P[2 * N - 2]
        if frozen_mask[i]:
            u = 0
        else:
            u = 0 if lam > 0.0 else 1
        C[2 * (2 * N - 2) + (i & 1)] = u
        lev = n
        phi = i
        while phi & 1:
            psi = phi >> 1
            m = N >> lev
            cc = 2 * (2 * N - 2 * m)
            cp = 2 * (2 * N - 2 * (m << 1))
            s = (psi & 1) * (m << 1)
            for j in range(m):
                left = C[cc + j]
                right = C[cc + m + j]
                C[cp + s + j] = left ^ right
                C[cp + s + m + j] = right
            phi = psi
            lev -= 1
    return C[0:N].copy()


@njit(cache=True, nogil=True)
def _scl_kernel(frozen_mask, y, n, L):
    N = y.size
    sz_p = 2 * N - 1
    sz_c = 2 * sz_p
    P = np.empty((L, sz_p))
    C = np.zeros((L, sz_c), np.uint8)
    metric = np.zeros(L)
    active = np.zeros(L, np.uint8)
    active[0] = 1
    for j in range(N):
        P[0, j] = y[j]

    pref = np.zeros(L, np.uint8)
    m_pref = np.zeros(L)
    m_oth = np.zeros(L)
    surv_pref = np.zeros(L, np.uint8)
    surv_oth = np.zeros(L, np.uint8)
    decided = np.zeros(L, np.uint8)
    cand_m = np.zeros(2 * L)
    cand_p = np.zeros(2 * L, np.int64)
    cand_u = np.zeros(2 * L, np.uint8)
    order = np.zeros(2 * L, np.int64)

    for i in range(N):
        if i == 0:
            d = 1
        else:
            z = 0
            t = i
            while t & 1 == 0:
                t >>= 1
                z += 1
            d = n - z
        for p in range(L):
            if not active[p]:
                continue
            for lev in range(d, n + 1):
                m = N >> lev
                po = 2 * N - 2 * (m << 1)
                so = 2 * N - 2 * m
                if lev == d and i > 0:
                    co = 2 * so
                    for j in range(m):
                        a = P[p, po + j]
                        b = P[p, po + j + m]
                        P[p, so + j] = b - a if C[p, co + j] else b + a
                else:
                    for j in range(m):
                        P[p, so + j] = boxplus(P[p, po + j], P[p, po + j + m])

        if frozen_mask[i]:
            for p in range(L):
                if not active[p]:
                    continue
                metric[p] += softplus(-P[p, sz_p - 1])
                decided[p] = 0
        else:
            nc = 0
            for p in range(L):
                if not active[p]:
                    continue
                lam = P[p, sz_p - 1]
                pu = 0 if lam > 0.0 else 1
                pref[p] = pu
                pen0 = softplus(-lam)
                pen1 = softplus(lam)
                mp = metric[p] + (pen0 if pu == 0 else pen1)
                mo = metric[p] + (pen1 if pu == 0 else pen0)
                m_pref[p] = mp
                m_oth[p] = mo
                cand_p[nc] = p
                cand_u[nc] = pu
                cand_m[nc] = mp
                nc += 1
                cand_p[nc] = p
                cand_u[nc] = 1 - pu
                cand_m[nc] = mo
                nc += 1
            keep = L if nc > L else nc
            # stable insertion sort: equal metrics keep candidate order,
            # which makes pruning (and therefore output) deterministic
            for k in range(nc):
                order[k] = k
            for k in range(1, nc):
                key = order[k]
                km = cand_m[key]
                j = k - 1
                while j >= 0 and cand_m[order[j]] > km:
                    order[j + 1] = order[j]
                    j -= 1
                order[j + 1] = key
            for p in range(L):
                surv_pref[p] = 0
                surv_oth[p] = 0
            for k in range(keep):
                c = order[k]
                p = cand_p[c]
                if cand_u[c] == pref[p]:
                    surv_pref[p] = 1
                else:
                    surv_oth[p] = 1
            for p in range(L):
                if active[p] and not surv_pref[p] and not surv_oth[p]:
                    active[p] = 0
            fq = 0
            for p in range(L):
                if surv_pref[p] and surv_oth[p]:
                    while active[fq]:
                        fq += 1
                    for j in range(sz_p):
                        P[fq, j] = P[p, j]
                    for j in range(sz_c):
                        C[fq, j] = C[p, j]
                    active[fq] = 1
                    decided[p] = pref[p]
                    metric[p] = m_pref[p]
                    decided[fq] = 1 - pref[p]
                    metric[fq] = m_oth[p]
                elif surv_pref[p]:
                    decided[p] = pref[p]
                    metric[p] = m_pref[p]
                elif surv_oth[p]:
                    decided[p] = 1 - pref[p]
                    metric[p] = m_oth[p]

        for p in range(L):
            if not active[p]:
                continue
            C[p, 2 * (2 * N - 2) + (i & 1)] = decided[p]
            lev = n
            phi = i
            while phi & 1:
                psi = phi >> 1
                m = N >> lev
                cc = 2 * (2 * N - 2 * m)
                cp = 2 * (2 * N - 2 * (m << 1))
                s = (psi & 1) * (m << 1)
                for j in range(m):
                    left = C[p, cc + j]
                    right = C[p, cc + m + j]
                    C[p, cp + s + j] = left ^ right
                    C[p, cp + s + m + j] = right
                phi = psi
                lev -= 1

    best = -1
    best_m = 0.0
    for p in range(L):
        if active[p] and (best < 0 or metric[p] < best_m):
            best = p
            best_m = metric[p]
    return C[best, 0:N].copy()


@njit(cache=True, nogil=True)
def _transform_bits(u):
    x = u.copy()
    N = x.size
    h = 1
    while h < N:
        for i in range(N):
            if i & h == 0:
                x[i] ^= x[i + h]
        h <<= 1
    return x


@njit(cache=True, nogil=True)
def _dense_bp_kernel(frozen_mask, y, n, t_max, llr_max):
    # Stage s couples level s (codeword side) with level s+1 (input side)
    # through butterflies pairing j and j + N>>(s+1) inside blocks of
    # N>>s. The four outputs per butterfly are the standard processing
    # element equations with exact combining.
    N = y.size
    Lm = np.zeros((n + 1, N))
    Rm = np.zeros((n + 1, N))
    for i in range(N):
        Lm[0, i] = clamp(y[i], llr_max)
        Rm[n, i] = llr_max if frozen_mask[i] else 0.0
    u_hat = np.zeros(N, np.uint8)
    x_hat = np.zeros(N, np.uint8)
    xw = np.zeros(N, np.uint8)
    iters = t_max
    ok = False
    for t in range(1, t_max + 1):
        for s in range(n):
            m = N >> s
            h = m >> 1
            for base in range(0, N, m):
                for a in range(base, base + h):
                    b = a + h
                    la = boxplus(Lm[s, a], Lm[s, b] + Rm[s + 1, b])
                    lb = boxplus(Rm[s + 1, a], Lm[s, a]) + Lm[s, b]
                    Lm[s + 1, a] = clamp(la, llr_max)
                    Lm[s + 1, b] = clamp(lb, llr_max)
        for s in range(n - 1, -1, -1):
            m = N >> s
            h = m >> 1
            for base in range(0, N, m):
                for a in range(base, base + h):
                    b = a + h
                    rc = boxplus(Rm[s + 1, a], Rm[s + 1, b] + Lm[s, b])
                    rd = boxplus(Rm[s + 1, a], Lm[s, a]) + Rm[s + 1, b]
                    Rm[s, a] = clamp(rc, llr_max)
                    Rm[s, b] = clamp(rd, llr_max)
        for i in range(N):
            if frozen_mask[i]:
                u_hat[i] = 0
            else:
                u_hat[i] = 1 if Lm[n, i] + Rm[n, i] <= 0.0 else 0
            x_hat[i] = 1 if Lm[0, i] + Rm[0, i] <= 0.0 else 0
        xw = _transform_bits(u_hat)
        ok = True
        for i in range(N):
            if xw[i] != x_hat[i]:
                ok = False
                break
        if ok:
            iters = t
            break
    return xw, iters, ok


def _check_input(spec: CodeSpec, y) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape != (spec.N,):
        raise ValueError(f"expected {spec.N} channel LLRs, got shape {y.shape}")
    return y


def sc_decode(spec: CodeSpec, y) -> np.ndarray:
    """Successive cancellation; returns the codeword estimate."""
    y = _check_input(spec, y)
    if spec.n == 0:
        bit = 0 if (spec.frozen_mask[0] or y[0] > 0.0) else 1
        return np.array([bit], dtype=np.uint8)
    return np.asarray(_sc_kernel(spec.frozen_mask, y, spec.n))


def scl_decode(spec: CodeSpec, y, L: int) -> np.ndarray:
    """List decoding with up to L paths; L=1 reproduces sc_decode
    exactly, large L approaches maximum likelihood."""
    if L < 1:
        raise ValueError("list size must be >= 1")
    y = _check_input(spec, y)
    if spec.n == 0:
        return sc_decode(spec, y)
    return np.asarray(_scl_kernel(spec.frozen_mask, y, spec.n, L))


def dense_bp_decode(spec: CodeSpec, y, t_max: int = 60) -> np.ndarray:
    """Flooding BP over the full butterfly factor graph; returns the
    codeword estimate after convergence or t_max iterations."""
    xw, _, _ = dense_bp_details(spec, y, t_max)
    return xw


def dense_bp_details(spec: CodeSpec, y, t_max: int = 60):
    """Like dense_bp_decode but also reports (iterations, converged)."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    y = _check_input(spec, y)
    if spec.n == 0:
        bit = 0 if (spec.frozen_mask[0] or y[0] > 0.0) else 1
        return np.array([bit], dtype=np.uint8), 1, True
    xw, iters, ok = _dense_bp_kernel(spec.frozen_mask, y, spec.n, t_max, LLR_MAX)
    return np.asarray(xw), int(iters), bool(ok)


def ml_decode(spec: CodeSpec, received) -> np.ndarray:
    """Exhaustive minimum-distance decoding, O(2^K); small codes only.

    received is the real channel output (pre-LLR); the winner minimizes
    squared Euclidean distance to the modulated codeword.
    """
    if spec.K > 20:
        raise ValueError("exhaustive search is limited to K <= 20")
    received = np.ascontiguousarray(received, dtype=np.float64)
    best = None
    best_d = np.inf
    data = np.zeros(spec.K, dtype=np.uint8)
    for idx in range(1 << spec.K):
        for k in range(spec.K):
            data[k] = (idx >> k) & 1
        u = np.zeros(spec.N, dtype=np.uint8)
        u[spec.info_set] = data
        cw = polar_transform(u)
        s = 1.0 - 2.0 * cw.astype(np.float64)
        d = float(np.sum((received - s) ** 2))
        if d < best_d:
            best_d = d
            best = cw
    return best
