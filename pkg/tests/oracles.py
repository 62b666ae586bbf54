"""Independent reference implementations used to cross-check the package.

Everything in here is deliberately written in the most literal way
possible (python loops, lists, truncated infinite sums) so that it shares
no code with the production modules it is checking.
"""

import numpy as np

SERIES_TERMS = 500


# --- certificate quantities as truncated series over the gap length ---

def omega_l_series(length, p0, rho, alpha, terms=SERIES_TERMS):
    """Gap-contraction factor for a stored sequence of `length`, summed term by term.

    The closed form collapses sum_{j<=l} p0^{j-1} rho^j plus the geometric
    tail sum_{j>l} p0^{j-1} alpha^(j-l) rho^l.
    """
    total = 0.0
    for j in range(1, terms + 1):
        if j <= length:
            total += p0 ** (j - 1) * rho ** j
        else:
            total += p0 ** (j - 1) * alpha ** (j - length) * rho ** length
    return total


def omega_series(pmf, rho, alpha, terms=SERIES_TERMS):
    pmf = np.asarray(pmf, dtype=float)
    p0 = pmf[0]
    return sum(pmf[l] * omega_l_series(l, p0, rho, alpha, terms)
               for l in range(1, pmf.size))


def upsilon_series(transition, cond_pmfs, rho, alpha, terms=SERIES_TERMS):
    """Per-state gap contraction for the Markov processor model, term by term.

    For each state s with idle probability below one, sums
    (1/(1-p0|s)) * sum_l p_{l|s} * qbar_s (sum_{j<=l} Qbar^{j-1} rho^j
    + rho^l sum_{j>l} Qbar^{j-1} alpha^{j-l}) pbar.
    """
    q = np.asarray(transition, dtype=float)
    pmfs = np.asarray(cond_pmfs, dtype=float)
    g = q.shape[0]
    p0s = pmfs[:, 0]
    q_damped = np.diag(p0s) @ q
    p_bar = 1.0 - p0s
    out = np.full(g, np.nan)
    # precompute Qbar^{j-1} once, shared across states and lengths
    powers = [np.eye(g)]
    for _ in range(terms - 1):
        powers.append(powers[-1] @ q_damped)
    for s in range(g):
        if p0s[s] >= 1.0:
            continue
        acc = 0.0
        for l in range(1, pmfs.shape[1]):
            inner = np.zeros((g, g))
            for j in range(1, terms + 1):
                if j <= l:
                    inner += powers[j - 1] * rho ** j
                else:
                    inner += powers[j - 1] * rho ** l * alpha ** (j - l)
            acc += pmfs[s, l] * float(q[s] @ inner @ p_bar)
        out[s] = acc / (1.0 - p0s[s])
    return out


def gap_pmf_series(transition, cond_pmfs, state, gap):
    """Pr{gap between computations = gap | state at last computation}, literally.

    Enumerates nothing: multiplies out qbar_s Qbar^{gap-1} pbar with an
    explicit python product loop.
    """
    q = np.asarray(transition, dtype=float)
    p0s = np.asarray(cond_pmfs, dtype=float)[:, 0]
    vec = q[state].copy()
    for _ in range(gap - 1):
        vec = (vec * p0s) @ q
    return float(np.sum(vec * (1.0 - p0s)))


# --- effective-length bookkeeping recursions, straight off the definitions ---

def lam_sequence_a1(n_seq):
    lam, out = 0, []
    for n in n_seq:
        lam = n if n >= 1 else max(lam - 1, 0)
        out.append(lam)
    return out


def lam_sequence_a2(n_seq):
    lam, out = 0, []
    for n in n_seq:
        lam = max(n, lam - 1) if n >= 1 else max(lam - 1, 0)
        out.append(lam)
    return out


# --- a from-scratch re-implementation of the buffered controllers ---

def naive_tentative(plant, x, length):
    """Roll the policy forward on the nominal model; no certificate checking."""
    controls = []
    chi = np.array(x, dtype=float)
    w0 = np.zeros(plant.m)
    for _ in range(length):
        u = np.atleast_1d(np.asarray(plant.policy(chi), dtype=float))
        controls.append(u)
        chi = plant.f(chi, u, w0)
    return controls


def naive_closed_loop(kind, plant, x0, n_seq, cap, buffer_cap=None, w_seq=None):
    """Simulate the buffered loop with plain python lists.

    Returns (states, inputs, lambdas, buffers) where buffers[k] is the
    buffer content after the step-k update, as a (cap, p) array.
    """
    p = plant.p
    zero = np.zeros(p)
    buf = [zero.copy() for _ in range(cap)]
    lam = 0
    x = np.array(x0, dtype=float)
    states, inputs, lams, buffers = [], [], [], []
    for k, n in enumerate(n_seq):
        if buffer_cap is not None:
            n = min(n, buffer_cap)
        if kind == "baseline":
            u = (np.atleast_1d(np.asarray(plant.policy(x), dtype=float))
                 if n >= 1 else zero.copy())
        elif n == 0:
            buf = buf[1:] + [zero.copy()]
            lam = max(lam - 1, 0)
            u = buf[0].copy()
        else:
            fresh = naive_tentative(plant, x, n)
            if kind == "a1":
                buf = fresh + [zero.copy() for _ in range(cap - n)]
                lam = n
            else:
                shifted = buf[1:] + [zero.copy()]
                buf = fresh + shifted[n:]
                lam = max(n, lam - 1)
            u = buf[0].copy()
        states.append(x.copy())
        inputs.append(u.copy())
        lams.append(lam)
        buffers.append(np.array(buf))
        w = np.zeros(plant.m) if w_seq is None else np.asarray(w_seq[k], dtype=float)
        x = plant.f(x, u, w)
    return states, inputs, lams, buffers
