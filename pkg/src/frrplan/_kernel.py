"""Compiled RK4 integrator for the aggregated frequency response model.

State layout: ``y[0]`` is the frequency deviation in Hz, then for each fuel
type ``k`` the two lag states ``y[1 + 2k]`` and ``y[2 + 2k]`` in MW.
"""

import numpy as np
from numba import njit

N_TYPES = 4


@njit(cache=True)
def _mech(y, k, frac, headroom):
    p = frac[k] * y[1 + 2 * k] + (1.0 - frac[k]) * y[2 + 2 * k]
    if p < 0.0:
        return 0.0
    if p > headroom[k]:
        return headroom[k]
    return p


@njit(cache=True)
def _deriv(y, out, a, p_loss, damp, gain, deadband, t1, t2, frac, headroom):
    df = y[0]
    pm = 0.0
    for k in range(N_TYPES):
        pm += _mech(y, k, frac, headroom)
        db = deadband[k]
        if df > db:
            dfe = df - db
        elif df < -db:
            dfe = df + db
        else:
            dfe = 0.0
        pref = -gain[k] * dfe
        x1 = y[1 + 2 * k]
        out[1 + 2 * k] = (pref - x1) / t1[k]
        out[2 + 2 * k] = (x1 - y[2 + 2 * k]) / t2[k]
    out[0] = a * (pm - p_loss - damp * df)


@njit(cache=True)
def integrate(n_steps, dt, a, p_loss, damp, gain, deadband, t1, t2, frac, headroom):
    """Classical fixed-step RK4 from a zero initial state.

    ``a`` is f_N / (2 K), ``damp`` is D * P_load / f_N (MW per Hz) and
    ``gain`` is the per-type droop gain in MW per Hz. Returns the frequency
    deviation samples, delivered mechanical response per type, and the first
    step index with a non-finite state (-1 if none).
    """
    n_state = 1 + 2 * N_TYPES
    dev = np.zeros(n_steps + 1)
    mech = np.zeros((N_TYPES, n_steps + 1))
    y = np.zeros(n_state)
    tmp = np.zeros(n_state)
    k1 = np.zeros(n_state)
    k2 = np.zeros(n_state)
    k3 = np.zeros(n_state)
    k4 = np.zeros(n_state)
    half = 0.5 * dt
    for i in range(n_steps):
        _deriv(y, k1, a, p_loss, damp, gain, deadband, t1, t2, frac, headroom)
        for j in range(n_state):
            tmp[j] = y[j] + half * k1[j]
        _deriv(tmp, k2, a, p_loss, damp, gain, deadband, t1, t2, frac, headroom)
        for j in range(n_state):
            tmp[j] = y[j] + half * k2[j]
        _deriv(tmp, k3, a, p_loss, damp, gain, deadband, t1, t2, frac, headroom)
        for j in range(n_state):
            tmp[j] = y[j] + dt * k3[j]
        _deriv(tmp, k4, a, p_loss, damp, gain, deadband, t1, t2, frac, headroom)
        for j in range(n_state):
            y[j] = y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if not np.isfinite(y[j]):
                return dev, mech, i + 1
        dev[i + 1] = y[0]
        for k in range(N_TYPES):
            mech[k, i + 1] = _mech(y, k, frac, headroom)
    return dev, mech, -1
