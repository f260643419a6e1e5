"""Compiled inner loops for trial simulation.

The per-round recursion (policy -> sample -> environment loss -> perturbation
-> weight update) is inherently sequential, so long horizons are run through
numba.  The arithmetic here mirrors ``players._policy_probs``,
``players._sample_index``, ``players.update`` and the attacker perturbations
operation-for-operation; the test suite checks both paths produce
bit-identical traces.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .players import RENORM_THRESHOLD, WEIGHT_FLOOR

STRATEGY_CODES = {"none": 0, "easy": 1, "general": 2}


@njit(cache=True)
def general_cap(t: float, cap_exponent: float) -> float:
    """Target-arm loss ceiling 1 - t**(alpha + epsilon - 1) at round t >= 1.

    Computed via exp/log in full precision; equals 0 at t = 1.
    """
    return 1.0 - math.exp(cap_exponent * math.log(t))


@njit(cache=True)
def fill_general_target_column(out, env_col, cap_exponent):
    """Template target column: min(1 - t**(alpha+eps-1), env loss) per round."""
    for i in range(out.shape[0]):
        cap = 1.0 - math.exp(cap_exponent * math.log(i + 1.0))
        v = env_col[i]
        out[i] = cap if cap < v else v


@njit(cache=True)
def play_rounds(K, T, eta, gamma, target, strategy, cap_exponent,
                row, table, use_table, us, record_policy):
    """Run T rounds of the attack protocol and return the trace columns.

    Per round t = 1..T: form the policy from the weights, draw the arm by
    inverse CDF against us[t-1], read the clean loss from the environment,
    apply the perturbation for ``strategy`` (0 none, 1 easy template,
    2 general template), then update the chosen arm's weight with the
    importance-weighted loss under the perturbed value.
    """
    w = np.ones(K)
    p = np.empty(K)
    arms = np.empty(T, dtype=np.int64)
    clean = np.empty(T)
    pert = np.empty(T)
    costs = np.empty(T)
    if record_policy:
        policies = np.empty((T, K))
    else:
        policies = np.empty((0, K))

    for t in range(1, T + 1):
        s = 0.0
        for i in range(K):
            s += w[i]
        for i in range(K):
            p[i] = (1.0 - gamma) * (w[i] / s) + gamma / K
        if record_policy:
            for i in range(K):
                policies[t - 1, i] = p[i]

        u = us[t - 1]
        a = K - 1
        acc = 0.0
        for i in range(K):
            acc += p[i]
            if u <= acc:
                a = i
                break

        if use_table:
            loss = table[t - 1, a]
        else:
            loss = row[a]

        if strategy == 0:
            tilde = loss
        elif strategy == 1:
            tilde = loss if a == target else 1.0
        else:
            if a == target:
                cap = 1.0 - math.exp(cap_exponent * math.log(t))
                tilde = cap if cap < loss else loss
            else:
                tilde = 1.0

        arms[t - 1] = a
        clean[t - 1] = loss
        pert[t - 1] = tilde
        costs[t - 1] = abs(tilde - loss)

        w[a] = w[a] * math.exp(-eta * (tilde / p[a]))
        if w[a] < WEIGHT_FLOOR:
            w[a] = WEIGHT_FLOOR
        m = w[0]
        for i in range(1, K):
            if w[i] > m:
                m = w[i]
        if m < RENORM_THRESHOLD:
            for i in range(K):
                w[i] = w[i] / m

    return arms, clean, pert, costs, policies
