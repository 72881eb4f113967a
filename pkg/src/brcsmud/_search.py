"""Compiled depth-first search kernel used by ``detector.sphere_detect``."""

import math

import numpy as np
from numba import njit

_TIE_RTOL = 1e-10


@njit(cache=True)
def _tie_tol(value):
    return _TIE_RTOL * (1.0 + abs(value))


@njit(cache=True)
def search(r, y_tilde, residual_const, symbols, penalties):
    """Return ``(best_ranks, best_metric, nodes, accepted_metrics)``.

    ``r`` is K x K upper triangular, ``symbols`` is A0 in enumeration order
    and ``penalties[i]`` is the nonnegative cost of ``symbols[i]``. Levels
    run from K-1 down to 0; children are tried in ascending increment.
    """
    k_dim = r.shape[0]
    n_sym = symbols.shape[0]
    x = np.zeros(k_dim)
    ranks = np.zeros(k_dim, dtype=np.int64)
    best_ranks = np.full(k_dim, -1, dtype=np.int64)
    order = np.zeros((k_dim, n_sym), dtype=np.int64)
    incs = np.zeros((k_dim, n_sym))
    pos = np.zeros(k_dim, dtype=np.int64)
    partial = np.zeros(k_dim + 1)
    partial[k_dim] = residual_const
    best = math.inf
    bound = math.inf
    nodes = 0
    accepted = [0.0]
    accepted.pop()

    level = k_dim - 1
    expand = True
    while True:
        if expand:
            b = y_tilde[level]
            for j in range(level + 1, k_dim):
                b -= r[level, j] * x[j]
            d_ll = r[level, level]
            # insertion sort by (increment, symbol index)
            for i in range(n_sym):
                d = b - d_ll * symbols[i]
                inc = d * d + penalties[i]
                p = i
                while p > 0 and incs[level, p - 1] > inc:
                    incs[level, p] = incs[level, p - 1]
                    order[level, p] = order[level, p - 1]
                    p -= 1
                incs[level, p] = inc
                order[level, p] = i
            nodes += n_sym
            pos[level] = 0
            expand = False

        if pos[level] >= n_sym:
            level += 1
            if level == k_dim:
                break
            continue
        p = pos[level]
        pos[level] = p + 1
        metric = partial[level + 1] + incs[level, p]
        if metric > bound:
            pos[level] = n_sym
            continue
        i = order[level, p]
        x[level] = symbols[i]
        ranks[level] = i
        if level == 0:
            take = metric < best - _tie_tol(best) or best_ranks[0] < 0
            if not take:
                for j in range(k_dim):
                    if ranks[j] != best_ranks[j]:
                        take = ranks[j] < best_ranks[j]
                        break
            if take:
                best = metric
                bound = metric + _tie_tol(metric)
                best_ranks[:] = ranks
                accepted.append(metric)
        else:
            partial[level] = metric
            level -= 1
            expand = True
    return best_ranks, best, nodes, np.array(accepted)
