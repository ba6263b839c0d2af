"""Hot inner loops with numba and pure-numpy implementations.

Each kernel exists twice with identical semantics. The public name binds to
the numba variant when numba is importable and not disabled by the
``BFAMILY_DISABLE_NUMBA`` flag, otherwise to the numpy variant.
"""

import math

import numpy as np

from ._accel import HAVE_NUMBA, njit


def circular_convolve_numpy(kernel, f):
    """out[i] = (1/n) * sum_j kernel[(i - j) % n] * f[j]."""
    n = f.shape[0]
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return kernel[idx] @ f / n


@njit(cache=True)
def circular_convolve_numba(kernel, f):
    n = f.shape[0]
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            k = i - j
            if k < 0:
                k += n
            acc += kernel[k] * f[j]
        out[i] = acc / n
    return out


def eval_modes_numpy(coef, x):
    """Evaluate sum_k Re(coef[k] * exp(2*pi*i*k*x)) at every point of ``x``.

    ``coef`` is a half spectrum (index = non-negative wavenumber) with the
    real-signal weights already folded in.
    """
    return eval_modes_pair_numpy(coef, coef, x)[0]


def eval_modes_pair_numpy(coef_a, coef_b, x):
    """Two half spectra evaluated at the same points, sharing the phase table."""
    k = np.arange(coef_a.shape[0])
    x = x - np.floor(x)
    phase = np.exp(2j * np.pi * np.multiply.outer(x, k))
    return (phase @ coef_a).real, (phase @ coef_b).real


@njit(cache=True)
def eval_modes_pair_numba(coef_a, coef_b, x):
    nk = coef_a.shape[0]
    out_a = np.empty(x.shape[0])
    out_b = np.empty(x.shape[0])
    two_pi = 2.0 * math.pi
    for i in range(x.shape[0]):
        xi = x[i] - math.floor(x[i])
        step = complex(math.cos(two_pi * xi), math.sin(two_pi * xi))
        acc_a = 0.0
        acc_b = 0.0
        z = 1.0 + 0.0j
        for k in range(nk):
            # re-anchor the phase recurrence every 32 modes to bound drift
            if k % 32 == 0 and k:
                z = complex(math.cos(two_pi * k * xi), math.sin(two_pi * k * xi))
            acc_a += (coef_a[k] * z).real
            acc_b += (coef_b[k] * z).real
            z *= step
        out_a[i] = acc_a
        out_b[i] = acc_b
    return out_a, out_b


@njit(cache=True)
def eval_modes_numba(coef, x):
    return eval_modes_pair_numba(coef, coef, x)[0]


if HAVE_NUMBA:
    circular_convolve = circular_convolve_numba
    eval_modes = eval_modes_numba
    eval_modes_pair = eval_modes_pair_numba
else:
    circular_convolve = circular_convolve_numpy
    eval_modes = eval_modes_numpy
    eval_modes_pair = eval_modes_pair_numpy
