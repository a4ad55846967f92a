"""Convergence diagnostics for the reweighted decoder.

Two spectral-style conditions are evaluated on message snapshots, each
under an L1 normalization (variable-side for the row condition,
check-side for the column condition), plus the trajectory of the edge
weights toward their limit target gamma. Degenerate nodes whose messages
are all zero are skipped; if every node is degenerate the margin is -1
by convention (trivially satisfied).

These are observers only: nothing here mutates decoder state, and
decoding never gates on the outcome.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .graph import TannerGraph
from .sparse import DecoderConfig, EdgeState, arsbp_decode


@dataclass
class ConvergenceReport:
    row_sum_margin: Optional[float] = None
    row_sum_satisfied: Optional[bool] = None
    column_sum_margin: Optional[float] = None
    column_sum_satisfied: Optional[bool] = None
    rho_deviation_series: Optional[List[float]] = None
    final_below_first: Optional[bool] = None


def check_row_sum(state: EdgeState, graph: TannerGraph):
    """Row condition: for every edge e of variable v,
    ((rho_V - rho_e) + (1 - rho_V)) * lam_n_e < 1, where rho_V sums rho
    over v's edges and lam_n is |lam| normalized to unit sum per
    variable. Returns (satisfied, margin) with margin = max LHS - 1."""
    margin = -1.0
    for v in range(graph.V):
        edges = graph.var_edges(v)
        if edges.size == 0:
            continue
        mags = np.abs(state.lam[edges])
        total = mags.sum()
        if total == 0.0:
            continue
        lam_n = mags / total
        rho_v = state.rho[edges].sum()
        lhs = ((rho_v - state.rho[edges]) + (1.0 - rho_v)) * lam_n
        m = float(lhs.max()) - 1.0
        if m > margin:
            margin = m
    return margin < 0.0, margin


def check_column_sum(state: EdgeState, graph: TannerGraph, rho_c: float = 1.0):
    """Column condition: for every edge e of check c,
    rho_c * sum_{e' of c, e' != e} Lam_n_e' + (1 - rho_c) * Lam_n_e < 1
    with |Lam| normalized to unit sum per check."""
    margin = -1.0
    for c in range(graph.C):
        lo, hi = graph.check_ptr[c], graph.check_ptr[c + 1]
        if hi == lo:
            continue
        mags = np.abs(state.Lam[lo:hi])
        total = mags.sum()
        if total == 0.0:
            continue
        lam_n = mags / total
        lhs = rho_c * (1.0 - lam_n) + (1.0 - rho_c) * lam_n
        m = float(lhs.max()) - 1.0
        if m > margin:
            margin = m
    return margin < 0.0, margin


def rho_trajectory(trace, gamma: float = 1.0) -> ConvergenceReport:
    """Per-iteration mean |rho - gamma| from a traced decode, plus
    whether the final mean sits below the first (the contraction trend
    expected on converging frames)."""
    if not trace:
        raise ValueError("rho_trajectory requires a decode run with tracing enabled")
    series = []
    for row in trace:
        if row.state is not None:
            rho = row.state.rho
            series.append(float(np.mean(np.abs(rho - gamma))) if rho.size else 0.0)
        else:
            series.append(row.mean_abs_rho_minus_1)
    return ConvergenceReport(
        rho_deviation_series=series,
        final_below_first=series[-1] < series[0],
    )


def iteration_reports(graph, H, y, config: Optional[DecoderConfig] = None):
    """Runs the reweighted decoder with full tracing and evaluates both
    conditions on every iteration's state. Returns a list of dicts ready
    for CSV emission: iter, row_margin, col_margin, mean_abs_rho_dev,
    syndrome_ok."""
    config = config or DecoderConfig()
    outcome = arsbp_decode(graph, H, y, config, trace="full")
    rows = []
    for t, snap in enumerate(outcome.trace, start=1):
        _, row_margin = check_row_sum(snap.state, graph)
        _, col_margin = check_column_sum(snap.state, graph)
        dev = snap.state.rho
        rows.append(
            {
                "iter": t,
                "row_margin": row_margin,
                "col_margin": col_margin,
                "mean_abs_rho_dev": float(np.mean(np.abs(dev - config.gamma))) if dev.size else 0.0,
                "syndrome_ok": snap.syndrome_ok,
            }
        )
    return rows
