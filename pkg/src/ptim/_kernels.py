"""Numba push-form diffusion kernels over CSR adjacency.

Each kernel runs one diffusion to completion. Activation uses synchronous
rounds: contributions from nodes activated at round t land before any
round-(t+1) activation check. A node's received influence is frozen the
moment it activates; amplified weights are applied to an edge exactly once,
when its source activates, before the edge is ever read again.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def lt_run(out_ptr, out_idx, w_out, theta, seeds):
    n = theta.shape[0]
    round_of = np.full(n, -1, np.int64)
    received = np.zeros(n)
    frontier = np.empty(n, np.int64)
    m = 0
    for s in seeds:
        round_of[s] = 0
        frontier[m] = s
        m += 1
    count = m
    start = 0
    r = 0
    while m > start:
        stop = m
        r += 1
        for fi in range(start, stop):
            u = frontier[fi]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_idx[e]
                if round_of[v] == -1:
                    received[v] += w_out[e]
        for fi in range(start, stop):
            u = frontier[fi]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_idx[e]
                if round_of[v] == -1 and received[v] >= theta[v]:
                    round_of[v] = r
                    frontier[m] = v
                    m += 1
                    count += 1
        start = stop
    rounds = 0
    for i in range(n):
        if round_of[i] > rounds:
            rounds = round_of[i]
    return count, rounds, round_of, received


@njit(cache=True, nogil=True)
def pt_run(out_ptr, out_idx, w_out, theta, seeds, alpha):
    n = theta.shape[0]
    round_of = np.full(n, -1, np.int64)
    received = np.zeros(n)
    frontier = np.empty(n, np.int64)
    m = 0
    for s in seeds:
        round_of[s] = 0
        frontier[m] = s
        m += 1
    n_edges = out_idx.shape[0]
    amp_edge = np.empty(n_edges, np.int64)
    amp_old = np.empty(n_edges)
    amp_new = np.empty(n_edges)
    amp_count = 0
    count = m
    start = 0
    r = 0
    while m > start:
        stop = m
        r += 1
        for fi in range(start, stop):
            u = frontier[fi]
            # Seeds never amplify: they have no received influence.
            amplifies = alpha > 0.0 and round_of[u] > 0
            iu = received[u]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_idx[e]
                w = w_out[e]
                if amplifies and (round_of[v] == -1 or round_of[v] == round_of[u]):
                    nw = w + alpha * iu
                    if nw > 1.0:
                        nw = 1.0
                    amp_edge[amp_count] = e
                    amp_old[amp_count] = w
                    amp_new[amp_count] = nw
                    amp_count += 1
                    w = nw
                if round_of[v] == -1:
                    received[v] += w
        for fi in range(start, stop):
            u = frontier[fi]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_idx[e]
                if round_of[v] == -1 and received[v] >= theta[v]:
                    round_of[v] = r
                    frontier[m] = v
                    m += 1
                    count += 1
        start = stop
    rounds = 0
    for i in range(n):
        if round_of[i] > rounds:
            rounds = round_of[i]
    return count, rounds, round_of, received, amp_edge[:amp_count], amp_old[:amp_count], amp_new[:amp_count]


@njit(cache=True, nogil=True)
def pt_spread(out_ptr, out_idx, w_out, theta, seeds, alpha):
    """Active-set size only; no per-run records allocated."""
    n = theta.shape[0]
    round_of = np.full(n, -1, np.int64)
    received = np.zeros(n)
    frontier = np.empty(n, np.int64)
    m = 0
    for s in seeds:
        round_of[s] = 0
        frontier[m] = s
        m += 1
    count = m
    start = 0
    r = 0
    while m > start:
        stop = m
        r += 1
        for fi in range(start, stop):
            u = frontier[fi]
            amplifies = alpha > 0.0 and round_of[u] > 0
            iu = received[u]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_idx[e]
                if round_of[v] == -1:
                    w = w_out[e]
                    if amplifies:
                        w = w + alpha * iu
                        if w > 1.0:
                            w = 1.0
                    received[v] += w
        for fi in range(start, stop):
            u = frontier[fi]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_idx[e]
                if round_of[v] == -1 and received[v] >= theta[v]:
                    round_of[v] = r
                    frontier[m] = v
                    m += 1
                    count += 1
        start = stop
    return count


@njit(cache=True, nogil=True)
def lt_spread(out_ptr, out_idx, w_out, theta, seeds):
    n = theta.shape[0]
    active = np.zeros(n, np.uint8)
    received = np.zeros(n)
    frontier = np.empty(n, np.int64)
    m = 0
    for s in seeds:
        active[s] = 1
        frontier[m] = s
        m += 1
    count = m
    start = 0
    while m > start:
        stop = m
        for fi in range(start, stop):
            u = frontier[fi]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_idx[e]
                if active[v] == 0:
                    received[v] += w_out[e]
        for fi in range(start, stop):
            u = frontier[fi]
            for e in range(out_ptr[u], out_ptr[u + 1]):
                v = out_idx[e]
                if active[v] == 0 and received[v] >= theta[v]:
                    active[v] = 1
                    frontier[m] = v
                    m += 1
                    count += 1
        start = stop
    return count
