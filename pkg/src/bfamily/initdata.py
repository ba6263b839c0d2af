"""Initial conditions, including data built from a prescribed momentum."""

from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import ConstraintViolation

KINDS = ("fourier-modes", "momentum-first", "gaussian-bump-periodic", "peakon-profile")
SIGNS = ("none", "non-negative", "non-positive")


@dataclass(frozen=True)
class InitSpec:
    """Named recipe for ``u0``.

    ``fourier-modes`` and ``momentum-first`` build
    ``offset + amplitude * cos(2*pi*mode*x + phase)`` (for ``u0`` and ``m0``
    respectively); a non-zero ``random_modes`` replaces the cosine by a random
    smooth field with that many modes, unit sup-norm, drawn from ``seed``.
    ``gaussian-bump-periodic`` is ``offset`` plus a periodised Gaussian of
    the given ``width`` at ``center``; ``peakon-profile`` is
    ``amplitude * g(x - center)``.
    """

    kind: str = "fourier-modes"
    offset: float = 0.0
    amplitude: float = 1.0
    mode: int = 1
    phase: float = 0.0
    center: float = 0.5
    width: float = 0.05
    sign: str = "none"
    random_modes: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"init kind must be one of {KINDS}, got {self.kind!r}")
        if self.sign not in SIGNS:
            raise ValueError(f"init sign must be one of {SIGNS}, got {self.sign!r}")
        if self.sign != "none" and self.kind != "momentum-first":
            raise ValueError("a sign constraint is only meaningful for momentum-first data")
        if self.mode < 0 or self.random_modes < 0:
            raise ValueError("mode counts must be non-negative")
        if self.kind == "gaussian-bump-periodic" and not self.width > 0:
            raise ValueError("bump width must be positive")


def random_smooth_field(n, n_modes, rng):
    """Zero-mean real field with ``n_modes`` decaying random modes, scaled to unit sup-norm."""
    if not 0 < n_modes < n // 2:
        raise ValueError(f"random mode count must lie in (0, {n // 2}), got {n_modes}")
    k = np.arange(1, n_modes + 1)
    hat = np.zeros(n // 2 + 1, dtype=complex)
    hat[1 : n_modes + 1] = (rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)) / k
    f = np.fft.irfft(hat, n)
    return f / np.max(np.abs(f))


def _profile(spec, x):
    if spec.random_modes:
        shape = random_smooth_field(x.shape[0], spec.random_modes, np.random.default_rng(spec.seed))
    else:
        shape = np.cos(2 * np.pi * spec.mode * x + spec.phase)
    return spec.offset + spec.amplitude * shape


def build_with_metadata(spec: InitSpec, grid: spectral.Grid):
    """Return ``(u0, meta)`` where ``meta`` records the momentum range and data class."""
    x = grid.x
    meta = {"kind": spec.kind, "stress_test": False}
    if spec.kind == "fourier-modes":
        u0 = _profile(spec, x)
        m0 = spectral.helmholtz_apply(u0)
    elif spec.kind == "momentum-first":
        m0 = _profile(spec, x)
        lo, hi = float(m0.min()), float(m0.max())
        if spec.sign == "non-negative" and lo < 0:
            raise ConstraintViolation(f"momentum-first data requested non-negative but min m0 = {lo:.6g}")
        if spec.sign == "non-positive" and hi > 0:
            raise ConstraintViolation(f"momentum-first data requested non-positive but max m0 = {hi:.6g}")
        u0 = spectral.helmholtz_invert_spectral(m0)
    elif spec.kind == "gaussian-bump-periodic":
        shifts = np.arange(-3, 4)[:, None]
        u0 = spec.offset + spec.amplitude * np.exp(-(((x - spec.center + shifts) / spec.width) ** 2)).sum(axis=0)
        m0 = spectral.helmholtz_apply(u0)
    else:
        # the momentum of a peakon is a point mass; this is below the H^3 class
        u0 = spec.amplitude * spectral.kernel_g(x - spec.center)
        m0 = spectral.helmholtz_apply(u0)
        meta["stress_test"] = True
    meta["sign"] = spec.sign
    meta["min_m0"] = float(np.min(m0))
    meta["max_m0"] = float(np.max(m0))
    return spectral.check_field(u0, "u0"), meta


def build(spec: InitSpec, grid: spectral.Grid) -> np.ndarray:
    return build_with_metadata(spec, grid)[0]
