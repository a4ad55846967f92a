"""Parity-check matrix and Tanner graph for the sparse decoders.

Because the polar generator matrix G is an involution, u = x * G, and each
frozen constraint u_f = 0 becomes a parity check on the codeword: row t of H
is column f_t of G, i.e. the set {j : f_t is a bitwise subset of j}. H is
exact (same code), with row weights 2^(n - popcount(f)).
"""

import numpy as np


class ParityCheckMatrix:
    """Sparse parity-check matrix stored as per-row sorted column indices."""

    def __init__(self, num_checks, num_vars, rows):
        if len(rows) != num_checks:
            raise ValueError(
                f"expected {num_checks} rows, got {len(rows)}"
            )
        self.num_checks = int(num_checks)
        self.num_vars = int(num_vars)
        self.rows = []
        for row in rows:
            r = np.asarray(row, dtype=np.int64)
            if r.size and (r.min() < 0 or r.max() >= num_vars):
                raise ValueError("column index out of range")
            if np.unique(r).size != r.size:
                raise ValueError("duplicate column index within a row")
            r = np.sort(r)
            r.setflags(write=False)
            self.rows.append(r)

    @property
    def edge_count(self):
        return int(sum(r.size for r in self.rows))

    def row_weights(self):
        return np.array([r.size for r in self.rows], dtype=np.int64)


def derive_parity_check(spec):
    """Build H for the code: one row per frozen index f, supported on the
    columns {j : (j AND f) == f}. K = N returns an empty (zero-row) matrix.
    """
    idx = np.arange(spec.N, dtype=np.int64)
    rows = [np.flatnonzero((idx & f) == f) for f in spec.frozen_set]
    return ParityCheckMatrix(len(rows), spec.N, rows)


class TannerGraph:
    """Bipartite check/variable graph with stable row-major edge indices.

    Edge e runs between check ``edge_check[e]`` and variable ``edge_var[e]``.
    Edges of check c are the contiguous range check_ptr[c]:check_ptr[c+1];
    edges of variable v are var_edge_idx[var_ptr[v]:var_ptr[v+1]], ascending.
    """

    def __init__(self, num_checks, num_vars, edge_check, edge_var):
        self.C = int(num_checks)
        self.V = int(num_vars)
        self.edge_check = np.asarray(edge_check, dtype=np.int32)
        self.edge_var = np.asarray(edge_var, dtype=np.int32)
        self.E = self.edge_var.size
        if self.edge_check.size != self.E:
            raise ValueError("edge arrays must have equal length")
        # row-major input: check ids must be non-decreasing
        if self.E and np.any(np.diff(self.edge_check) < 0):
            raise ValueError("edges must be supplied in row-major order")
        counts = np.bincount(self.edge_check, minlength=self.C)
        self.check_ptr = np.zeros(self.C + 1, dtype=np.int32)
        np.cumsum(counts, out=self.check_ptr[1:])
        vcounts = np.bincount(self.edge_var, minlength=self.V)
        self.var_ptr = np.zeros(self.V + 1, dtype=np.int32)
        np.cumsum(vcounts, out=self.var_ptr[1:])
        self.var_edge_idx = np.argsort(self.edge_var, kind="stable").astype(
            np.int32
        )
        for arr in (
            self.edge_check,
            self.edge_var,
            self.check_ptr,
            self.var_ptr,
            self.var_edge_idx,
        ):
            arr.setflags(write=False)

    @property
    def edges(self):
        return list(zip(self.edge_check.tolist(), self.edge_var.tolist()))

    def check_edges(self, c):
        return np.arange(self.check_ptr[c], self.check_ptr[c + 1])

    def var_edges(self, v):
        return self.var_edge_idx[self.var_ptr[v] : self.var_ptr[v + 1]]

    def check_degree(self, c):
        return int(self.check_ptr[c + 1] - self.check_ptr[c])

    def var_degree(self, v):
        return int(self.var_ptr[v + 1] - self.var_ptr[v])


def build_tanner(H):
    """Transcribe H into a TannerGraph with deterministic row-major edges."""
    if H.num_checks == 0:
        empty = np.zeros(0, dtype=np.int32)
        return TannerGraph(0, H.num_vars, empty, empty)
    edge_check = np.concatenate(
        [np.full(r.size, c, dtype=np.int32) for c, r in enumerate(H.rows)]
    )
    edge_var = np.concatenate(H.rows).astype(np.int32)
    return TannerGraph(H.num_checks, H.num_vars, edge_check, edge_var)


def syndrome(H, x_hat):
    """True iff every row of H has even parity against the bit vector."""
    x_hat = np.asarray(x_hat)
    if x_hat.size != H.num_vars:
        raise ValueError(
            f"vector length {x_hat.size} does not match {H.num_vars} variables"
        )
    if H.num_checks == 0:
        return True
    cols = np.concatenate(H.rows)
    starts = np.zeros(H.num_checks, dtype=np.int64)
    np.cumsum([r.size for r in H.rows[:-1]], out=starts[1:])
    parities = np.add.reduceat(x_hat[cols].astype(np.int64), starts) & 1
    return not parities.any()


def to_alist(H):
    """Serialize H in the classic alist text format (1-based, zero-padded)."""
    n_var, n_chk = H.num_vars, H.num_checks
    col_lists = [[] for _ in range(n_var)]
    for c, row in enumerate(H.rows):
        for v in row:
            col_lists[v].append(c + 1)
    row_w = [r.size for r in H.rows]
    col_w = [len(cl) for cl in col_lists]
    max_col = max(col_w, default=0)
    max_row = max(row_w, default=0)
    lines = [
        f"{n_var} {n_chk}",
        f"{max_col} {max_row}",
        " ".join(str(w) for w in col_w),
        " ".join(str(w) for w in row_w),
    ]
    for cl in col_lists:
        padded = cl + [0] * (max_col - len(cl))
        lines.append(" ".join(str(i) for i in padded))
    for row in H.rows:
        padded = [v + 1 for v in row.tolist()] + [0] * (max_row - row.size)
        lines.append(" ".join(str(i) for i in padded))
    return "\n".join(lines) + "\n"
