"""Right-hand sides of u_t - u_txx + (b+c) u^p u_x = b u^(p-1) u_x u_xx + c u^p u_xxx.

Two equivalent formulations are provided:

* the non-local velocity form
  ``u_t = -c u^p u_x - d/dx L(f) - (p-1)(b-pc)/2 * L(u^(p-2) u_x^3)``
  where ``L`` is the inverse Helmholtz operator and
  ``f = (3pc-b)/2 u^(p-1) u_x^2 + b/(p+1) u^(p+1)``;
* the momentum transport form ``m_t = -c u^p m_x - b u^(p-1) u_x m`` with
  ``m = u - u_xx``.

Nonlinear products are formed on a zero-padded grid by default, which removes
aliasing for every product of degree ``p + 1``. With ``dealias=False`` they are
formed pointwise on the collocation nodes.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .errors import NumericDomainError


def _isclose(a, b):
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)


@dataclass(frozen=True)
class Parameters:
    """Equation parameters ``b >= 0``, ``c > 0`` and integer ``p >= 1``."""

    b: float
    c: float
    p: int

    def __post_init__(self):
        b, c, p = self.b, self.c, self.p
        if not (isinstance(b, (int, float)) and math.isfinite(b) and b >= 0):
            raise ValueError(f"b must be a finite non-negative real, got {b!r}")
        if not (isinstance(c, (int, float)) and math.isfinite(c) and c > 0):
            raise ValueError(f"c must be a finite positive real, got {c!r}")
        if isinstance(p, float) and p.is_integer():
            p = int(p)
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p < 1:
            raise ValueError(f"p must be a positive integer, got {p!r}")
        object.__setattr__(self, "b", float(b))
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "p", int(p))

    @property
    def is_H1(self) -> bool:
        return self.p == 1 and 0.0 <= self.b <= 3.0 * self.c * (1 + 1e-12)

    @property
    def is_H2(self) -> bool:
        return _isclose(self.b, self.p * self.c)

    @property
    def conserves_mean(self) -> bool:
        return self.p == 1 or self.is_H2

    @property
    def conserves_energy(self) -> bool:
        return _isclose(self.b, (self.p + 1) * self.c)

    @property
    def f_coefficients(self):
        """Coefficients of ``u^(p-1) u_x^2`` and ``u^(p+1)`` in ``f``."""
        p, b, c = self.p, self.b, self.c
        return (3 * p * c - b) / 2.0, b / (p + 1)

    @property
    def cubic_coefficient(self) -> float:
        """``(p-1)(b-pc)/2``; exactly zero whenever ``p == 1`` or ``b == pc``."""
        if self.p == 1 or self.is_H2:
            return 0.0
        return (self.p - 1) * (self.b - self.p * self.c) / 2.0

    @property
    def flow_exponent(self) -> float:
        """Power ``b/(pc)`` of the Jacobian in the conserved flow quantity."""
        return self.b / (self.p * self.c)


@dataclass(frozen=True)
class State:
    t: float
    u: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ValueError(f"time must be finite and non-negative, got {self.t!r}")
        object.__setattr__(self, "u", spectral.check_field(self.u, "u"))

    @property
    def m(self) -> np.ndarray:
        return spectral.helmholtz_apply(self.u)


def _upow(u, k):
    # k == 0 returns ones so that u^0 never turns into 0**0 ambiguity
    return np.ones_like(u) if k == 0 else u**k


def _check_out(*arrs):
    for a in arrs:
        if not np.isfinite(a).all():
            raise NumericDomainError("non-finite value in a nonlinear term")


def _velocity_terms(u, par, dealias):
    """Half spectra of ``c u^p u_x``, ``f`` and ``u^(p-2) u_x^3``, plus ``u_x`` at the nodes.

    The cubic spectrum is ``None`` when its prefactor vanishes.
    """
    n = u.shape[0]
    uhat = np.fft.rfft(u)
    _, _, ik_odd, _ = spectral._symbols(n)
    uxhat = uhat * ik_odd
    ux_nodes = np.fft.irfft(uxhat, n)
    p = par.p
    a2, ap1 = par.f_coefficients
    c3 = par.cubic_coefficient
    if dealias:
        m = spectral.padded_size(n, p + 1)
        uu = spectral.to_padded(uhat, n, m)
        ux = spectral.to_padded(uxhat, n, m)
    else:
        uu, ux = u, ux_nodes
    with np.errstate(over="ignore", invalid="ignore"):
        up1 = _upow(uu, p - 1)
        adv = par.c * up1 * uu * ux
        f = a2 * up1 * ux * ux + ap1 * up1 * uu * uu
        cubic = _upow(uu, p - 2) * ux**3 if c3 != 0.0 else None
    _check_out(adv, f, *(() if cubic is None else (cubic,)))
    if dealias:
        to_hat = lambda v: spectral.from_padded(v, n)  # noqa: E731
    else:
        to_hat = np.fft.rfft
    return to_hat(adv), to_hat(f), None if cubic is None else to_hat(cubic), ux_nodes


def _nonlocal_hat(u, par, dealias):
    n = u.shape[0]
    adv_h, f_h, cub_h, ux = _velocity_terms(u, par, dealias)
    _, _, ik_odd, helm = spectral._symbols(n)
    out = -adv_h - f_h * (ik_odd / helm)
    if cub_h is not None:
        out = out - par.cubic_coefficient * cub_h / helm
    return out, ux


def rhs_nonlocal(u, par, dealias=True, return_slope=False):
    """Time derivative ``u_t`` from the non-local velocity form.

    Args:
        u: velocity samples.
        par: equation parameters.
        dealias: form products on a padded grid.
        return_slope: also return ``u_x`` at the nodes (reused by the guard).
    """
    u = spectral.check_field(u, "u")
    out_h, ux = _nonlocal_hat(u, par, dealias)
    out = np.fft.irfft(out_h, u.shape[0])
    _check_out(out)
    return (out, ux) if return_slope else out


def rhs_momentum(m, par, dealias=True, return_velocity=False):
    """Time derivative ``m_t = -c u^p m_x - b u^(p-1) u_x m`` with ``u`` recovered from ``m``.

    With ``return_velocity`` the reconstructed ``u`` and ``u_x`` at the nodes
    are returned as well.
    """
    m = spectral.check_field(m, "m")
    n = m.shape[0]
    _, _, ik_odd, helm = spectral._symbols(n)
    mhat = np.fft.rfft(m)
    uhat = mhat / helm
    uxhat = uhat * ik_odd
    mxhat = mhat * ik_odd
    p = par.p
    if dealias:
        size = spectral.padded_size(n, p + 1)
        uu, ux, mm, mx = (spectral.to_padded(h, n, size) for h in (uhat, uxhat, mhat, mxhat))
    else:
        uu, ux, mm, mx = (np.fft.irfft(h, n) for h in (uhat, uxhat, mhat, mxhat))
    with np.errstate(over="ignore", invalid="ignore"):
        up1 = _upow(uu, p - 1)
        prod = -par.c * up1 * uu * mx - par.b * up1 * ux * mm
    _check_out(prod)
    if dealias:
        out = np.fft.irfft(spectral.from_padded(prod, n), n)
    else:
        out = prod
    if return_velocity:
        return out, np.fft.irfft(uhat, n), np.fft.irfft(uxhat, n)
    return out


def advection(u, par, dealias=True):
    """The transport term ``c u^p u_x``, formed exactly as inside :func:`rhs_nonlocal`."""
    u = spectral.check_field(u, "u")
    adv_h = _velocity_terms(u, par, dealias)[0]
    return np.fft.irfft(adv_h, u.shape[0])


def f_family(u, par):
    """Pointwise ``(3pc-b)/2 u^(p-1) u_x^2 + b/(p+1) u^(p+1)`` at the nodes."""
    u = spectral.check_field(u, "u")
    ux = spectral.derivative(u, 1)
    a2, ap1 = par.f_coefficients
    with np.errstate(over="ignore", invalid="ignore"):
        up1 = _upow(u, par.p - 1)
        f = a2 * up1 * ux * ux + ap1 * up1 * u * u
    _check_out(f)
    return f


def F_family(u, par, dealias=True):
    """``d/dx`` of the Helmholtz inverse of ``f``.

    With ``dealias`` the spectrum of ``f`` is the one used by
    :func:`rhs_nonlocal`, so that ``rhs_nonlocal + advection + F_family``
    vanishes to round-off whenever the cubic term is absent.
    """
    u = spectral.check_field(u, "u")
    if dealias:
        f_h = _velocity_terms(u, par, True)[1]
        return spectral.grad_inv_hat(f_h, u.shape[0])
    return spectral.grad_inv(f_family(u, par))
