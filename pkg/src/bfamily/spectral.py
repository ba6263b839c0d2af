"""Fourier collocation on the unit circle and the Helmholtz operator 1 - d^2/dx^2.

A field is a 1-D float array of ``n`` samples at the nodes ``x_j = j / n`` of
[0, 1). All operations are pure and infer ``n`` from the array length.
Wavenumber ``k`` corresponds to ``exp(2*pi*i*k*x)``, so the Helmholtz symbol
of mode ``k`` is ``1 + 4*pi**2*k**2``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import NumericDomainError

TWO_PI = 2.0 * np.pi
_SINH_HALF = np.sinh(0.5)


@dataclass(frozen=True)
class Grid:
    """Equispaced periodic grid of ``n`` nodes on [0, 1)."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            raise ValueError(f"grid size must be an even integer >= 8, got {self.n!r}")

    @property
    def dx(self) -> float:
        return 1.0 / self.n

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) / self.n


def kernel_g(x):
    """Periodic Green's function of 1 - d^2/dx^2 on the unit circle."""
    r = np.asarray(x, dtype=float)
    r = r - np.floor(r)
    return np.cosh(r - 0.5) / (2.0 * _SINH_HALF)


def kernel_g_prime(x):
    """Derivative of :func:`kernel_g` away from the integers."""
    r = np.asarray(x, dtype=float)
    r = r - np.floor(r)
    return np.sinh(r - 0.5) / (2.0 * _SINH_HALF)


@lru_cache(maxsize=32)
def _symbols(n):
    k = np.arange(n // 2 + 1, dtype=float)
    ik = 1j * TWO_PI * k
    ik_odd = ik.copy()
    ik_odd[-1] = 0.0  # odd derivatives drop the Nyquist mode
    helm = 1.0 + (TWO_PI * k) ** 2
    for arr in (k, ik, ik_odd, helm):
        arr.setflags(write=False)
    return k, ik, ik_odd, helm


def check_field(f, name="field"):
    """Return ``f`` as a float array after shape and finiteness checks."""
    arr = np.asarray(f, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 8 or arr.shape[0] % 2:
        raise ValueError(f"{name} must be 1-D with even length >= 8, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise NumericDomainError(f"{name} contains non-finite values")
    return arr


def _finite(out, what):
    if not np.isfinite(out).all():
        raise NumericDomainError(f"{what} produced non-finite values")
    return out


def _derivative_symbol(n, order):
    _, ik, ik_odd, _ = _symbols(n)
    return (ik_odd if order % 2 else ik) ** order


def derivative(f, order=1):
    """Spectral derivative of the given order (1 to 4)."""
    if order not in (1, 2, 3, 4):
        raise ValueError(f"derivative order must be 1..4, got {order!r}")
    f = check_field(f)
    n = f.shape[0]
    out = np.fft.irfft(np.fft.rfft(f) * _derivative_symbol(n, order), n)
    return _finite(out, "derivative")


def helmholtz_apply(f):
    """Return ``f - f_xx``."""
    f = check_field(f)
    n = f.shape[0]
    return _finite(np.fft.irfft(np.fft.rfft(f) * _symbols(n)[3], n), "helmholtz_apply")


def helmholtz_invert_spectral(f):
    """Solve ``u - u_xx = f`` for periodic ``u`` by dividing each mode by its symbol."""
    f = check_field(f)
    n = f.shape[0]
    return _finite(np.fft.irfft(np.fft.rfft(f) / _symbols(n)[3], n), "helmholtz_invert_spectral")


@lru_cache(maxsize=32)
def _kernel_samples(n):
    g = kernel_g(np.arange(n) / n)
    g.setflags(write=False)
    return g


def helmholtz_invert_convolution(f):
    """Trapezoidal quadrature of ``(g * f)(x_i)`` at every node.

    Second-order accurate because ``g`` has a derivative jump at lag 0. Kept
    as an oracle for :func:`helmholtz_invert_spectral`.
    """
    f = check_field(f)
    out = _kernels.circular_convolve(_kernel_samples(f.shape[0]), np.ascontiguousarray(f))
    return _finite(out, "helmholtz_invert_convolution")


def grad_inv(f):
    """Return d/dx of the Helmholtz inverse of ``f``."""
    f = check_field(f)
    n = f.shape[0]
    _, _, ik_odd, helm = _symbols(n)
    return _finite(np.fft.irfft(np.fft.rfft(f) * (ik_odd / helm), n), "grad_inv")


def grad_inv_hat(fhat, n):
    """:func:`grad_inv` acting on a half spectrum, returning grid values."""
    _, _, ik_odd, helm = _symbols(n)
    return np.fft.irfft(fhat * (ik_odd / helm), n)


def invert_hat(fhat, n):
    """:func:`helmholtz_invert_spectral` acting on a half spectrum."""
    return np.fft.irfft(fhat / _symbols(n)[3], n)


def integrate(f):
    """Integral over the circle; exact for trigonometric polynomials of degree < n."""
    return float(np.mean(f))


def _weighted_half_spectrum(f, order=0):
    n = f.shape[0]
    coef = np.fft.rfft(f) / n
    coef[1 : n // 2] *= 2.0
    if order:
        coef = coef * _derivative_symbol(n, order)
    return coef


def interpolate(f, x, order=0):
    """Evaluate the trigonometric interpolant of ``f`` (or a derivative) at points ``x``."""
    f = check_field(f)
    pts = np.atleast_1d(np.asarray(x, dtype=float))
    if order not in (0, 1, 2, 3, 4):
        raise ValueError(f"interpolation derivative order must be 0..4, got {order!r}")
    out = _kernels.eval_modes(_weighted_half_spectrum(f, order), np.ascontiguousarray(pts))
    return out if np.ndim(x) else float(out[0])


def integrate_between(f, a, b):
    """Exact integral of the trigonometric interpolant of ``f`` over [a, b]."""
    f = check_field(f)
    coef = _weighted_half_spectrum(f)
    mean = coef[0].real
    anti = np.zeros_like(coef)
    anti[1:] = coef[1:] / (1j * TWO_PI * np.arange(1, coef.shape[0]))
    ends = _kernels.eval_modes(anti, np.array([float(a), float(b)]))
    return float(mean * (b - a) + ends[1] - ends[0])


def shift(f, s):
    """Translate a field by ``s`` grid cells: ``out[j] = f[j - s]``."""
    return np.roll(np.asarray(f, dtype=float), int(s))


def padded_size(n, degree):
    """Smallest even grid size that resolves degree-``degree`` products of n-mode fields without aliasing."""
    m = -(-(degree + 1) * n // 2)
    return m + (m % 2)


def to_padded(fhat, n, m):
    """Grid values on ``m`` nodes of the band-limited field with half spectrum ``fhat`` (from ``n`` nodes)."""
    big = np.zeros(m // 2 + 1, dtype=complex)
    big[: n // 2 + 1] = fhat
    big[n // 2] *= 0.5  # split the Nyquist mode between +-n/2
    return np.fft.irfft(big, m) * (m / n)


def from_padded(values, n):
    """Half spectrum on ``n`` nodes of a field sampled on a padded grid; Nyquist dropped."""
    m = values.shape[0]
    big = np.fft.rfft(values)
    out = big[: n // 2 + 1] * (n / m)
    out[n // 2] = 0.0
    return out
