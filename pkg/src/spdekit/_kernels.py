"""Hot time-stepping loops, JIT-compiled when numba is available.

Each kernel advances the full half spectrum of a path in place and mirrors,
operation for operation, the per-step arithmetic of the corresponding pure
numpy step function in :mod:`spdekit.integrators`, so the two lanes agree to
floating rounding.  The numpy lane is selected by ``SPDEKIT_DISABLE_NUMBA=1``
(see :mod:`spdekit._jit`).

Kernels return -1 on success or the first step index at which the state blew
up (non-finite amplitude or squared L2 norm above ``blow_sq``).
"""

import numpy as np

from ._jit import NUMBA_ENABLED, njit

__all__ = [
    "NUMBA_ENABLED",
    "transport_em_path",
    "transport_heun_path",
    "transport_exp_path",
    "linear_additive_path",
]


@njit(cache=True)
def _row_blown(row, blow_sq):
    total = 0.0
    for k in range(row.shape[0]):
        re = row[k].real
        im = row[k].imag
        if not (np.isfinite(re) and np.isfinite(im)):
            return True
        if k == 0:
            total += re * re
        else:
            total += 2.0 * (re * re + im * im)
    return total > blow_sq


@njit(cache=True)
def transport_em_path(states, mu, ak, dt, noise_amp, blow_sq):
    """Euler-Maruyama for du = Lap u dt + sum_j sqrt(sigma_j) u_x dbeta_j.

    ``noise_amp[n]`` is the step's collapsed channel sum(sqrt(sigma_j) * dbeta_j);
    the transport term is diagonal, i*2*pi*k per mode.
    """
    n_steps = noise_amp.shape[0]
    n_modes1 = mu.shape[0]
    for n in range(n_steps):
        s = noise_amp[n]
        for k in range(n_modes1):
            c = states[n, k]
            states[n + 1, k] = c + (c * (-mu[k])) * dt + (c * (1j * ak[k])) * s
        if _row_blown(states[n + 1], blow_sq):
            return n + 1
    return -1


@njit(cache=True)
def transport_heun_path(states, mu, ak, dt, noise_amp, sigma_total, blow_sq):
    """Heun predictor-corrector for the Stratonovich transport form.

    Drift (1 - sigma/2) Lap u is explicit; the noise term is integrated by
    averaging the transported slope at the base point and the predictor.
    """
    n_steps = noise_amp.shape[0]
    n_modes1 = mu.shape[0]
    drift_fac = 1.0 - 0.5 * sigma_total
    for n in range(n_steps):
        s = noise_amp[n]
        for k in range(n_modes1):
            c = states[n, k]
            slope = c * (1j * ak[k])
            pred = c + slope * s
            pred_slope = pred * (1j * ak[k])
            states[n + 1, k] = (
                c + (c * (-mu[k]) * drift_fac) * dt + (0.5 * (slope + pred_slope)) * s
            )
        if _row_blown(states[n + 1], blow_sq):
            return n + 1
    return -1


@njit(cache=True)
def transport_exp_path(states, decay, ak, noise_amp, blow_sq):
    """Exponential Euler: exact heat factor applied to state plus noise term."""
    n_steps = noise_amp.shape[0]
    n_modes1 = decay.shape[0]
    for n in range(n_steps):
        s = noise_amp[n]
        for k in range(n_modes1):
            c = states[n, k]
            states[n + 1, k] = decay[k] * (c + (c * (1j * ak[k])) * s)
        if _row_blown(states[n + 1], blow_sq):
            return n + 1
    return -1


@njit(cache=True)
def linear_additive_path(states, decay, eta, blow_sq):
    """Diagonal linear recursion c' = decay * c + eta_n (EM, exp-Euler, exact OU)."""
    n_steps = eta.shape[0]
    n_modes1 = decay.shape[0]
    for n in range(n_steps):
        for k in range(n_modes1):
            states[n + 1, k] = decay[k] * states[n, k] + eta[n, k]
        if _row_blown(states[n + 1], blow_sq):
            return n + 1
    return -1
