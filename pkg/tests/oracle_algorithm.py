"""Unoptimized reference transcription of the smooth-state update.

Written from the algorithm's pseudo-code with 1-based frame indices and a
dict of every smooth state ever computed, sharing no code with the package.
It follows the package's documented conventions for the parts the
pseudo-code leaves open: the epsilon floor, tie-breaking, warm-up frames and
the final frame.
"""

import math

EPS = 1e-9


def ref_argmax(v, previous=None):
    """1-based label of the max; ties -> previous if tied, else lowest."""
    top = max(v)
    tied = [i + 1 for i in range(5) if v[i] == top]
    if previous is not None and previous in tied:
        return previous
    return tied[0]


def ref_normalize(v):
    total = math.fsum(v)
    q = [x / total for x in v]
    floor = set()
    while True:
        below = [i for i in range(5) if i not in floor and q[i] < EPS]
        if not below:
            return q
        floor.update(below)
        rest = [i for i in range(5) if i not in floor]
        scale = (1.0 - EPS * len(floor)) / math.fsum(q[i] for i in rest)
        q = [EPS if i in floor else q[i] * scale for i in range(5)]


def ref_fuse(emissions, T, l_w):
    """Returns (decisions, posteriors), both 1-based lists padded at index 0."""
    N = len(emissions)
    x = [None] + [list(e) for e in emissions]  # x[t] = p(x_t | z_t)
    p = {}  # p[t] = p(s_t)
    decision = [None] * (N + 1)
    s_opt_last = None

    for t in range(1, N + 1):
        if t <= l_w:
            p[t] = x[t]
            continue
        p_bar = [math.fsum(p[k][i] for k in range(t - l_w, t)) / l_w for i in range(5)]
        p_hat_last = [
            math.fsum(p_bar[i] * T[i][j] * x[t][j] for j in range(5)) for i in range(5)
        ]
        s_opt = ref_argmax(p_hat_last, s_opt_last)
        decision[t - 1] = s_opt
        s_opt_last = s_opt
        i = s_opt - 1
        p_hat = [p_bar[i] * T[i][j] * x[t][j] for j in range(5)]
        p[t] = ref_normalize(p_hat)

    prev = None
    for t in range(1, min(l_w, N) + 1):
        if decision[t] is None:
            decision[t] = ref_argmax(p[t], prev)
        prev = decision[t]
    if N > l_w:
        decision[N] = ref_argmax(p[N], decision[N - 1])
    return decision, [None] + [p[t] for t in range(1, N + 1)]
