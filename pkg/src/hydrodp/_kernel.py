"""Compiled backward-induction sweeps.

Only additions, subtractions and comparisons happen here; every payoff,
successor level and terminal value is computed beforehand in numpy so that
the solver and the forward simulation share bit-identical inputs.

Ties resolve to staying in the current mode, then to the lowest mode index.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _stage(v_next, payoff, succ, costs, v_out, pol_out):
    n_levels, n_modes = payoff.shape
    w = np.empty(n_modes)
    for lev in range(n_levels):
        for j in range(n_modes):
            w[j] = payoff[lev, j] + v_next[succ[lev, j], j]
        for i in range(n_modes):
            best = w[i] - costs[i, i]
            arg = i
            for j in range(n_modes):
                if j != i:
                    val = w[j] - costs[i, j]
                    if val > best:
                        best = val
                        arg = j
            v_out[lev, i] = best
            pol_out[lev, i] = arg


@njit(cache=True)
def backward_full(payoff_bank, pay_idx, succ_bank, succ_idx, costs, terminal):
    """Value and policy tables for every stage.

    values has one more stage than the horizon; its last slice is the
    terminal valuation.
    """
    horizon = pay_idx.shape[0]
    n_levels, n_modes = terminal.shape
    values = np.empty((horizon + 1, n_levels, n_modes))
    policy = np.empty((horizon, n_levels, n_modes), dtype=np.int8)
    values[horizon] = terminal
    for t in range(horizon - 1, -1, -1):
        _stage(values[t + 1], payoff_bank[pay_idx[t]], succ_bank[succ_idx[t]],
               costs, values[t], policy[t])
    return values, policy


@njit(cache=True)
def backward_first(payoff_bank, pay_idx, succ_bank, succ_idx, costs, terminal):
    """Stage-0 values and policy only, keeping two value slices in memory."""
    horizon = pay_idx.shape[0]
    n_levels, n_modes = terminal.shape
    nxt = terminal.copy()
    cur = np.empty((n_levels, n_modes))
    policy = np.empty((n_levels, n_modes), dtype=np.int8)
    for t in range(horizon - 1, -1, -1):
        _stage(nxt, payoff_bank[pay_idx[t]], succ_bank[succ_idx[t]], costs, cur, policy)
        nxt, cur = cur, nxt
    return nxt, policy
