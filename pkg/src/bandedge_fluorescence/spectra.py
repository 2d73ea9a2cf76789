"""Fluorescence intensity and quadrature spectra, squeezing and peak analysis.

Normalization constants are fixed to one: the incoherent intensity density is
``C_{+-}(omega)`` and the quadrature density is

    S_theta(omega) = 1/4 [ C_{--}(omega) e^{-2i theta} + C_{+-}(omega)
                           + C_{+-}(-omega) + C_{++}(omega) e^{+2i theta} ]

``C_{++}(omega)`` is the Hermitian partner of ``C_{--}(omega)``, so the
bracket is real.  The anomalous densities keep the fixed operator order of
``<x_j(omega) x_k(-omega)>``; their imaginary parts are odd in ``omega``, so
only ``theta = 0`` and ``theta = pi/2`` give spectra that are even in the
free-space limit.  The elastic line at ``omega = 0`` is reported separately
as ``|<sigma_->|^2`` and never added to the densities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bloch import MINUS, PLUS, SteadyState, fluctuation_spectra, steady_state
from .errors import NumericalError
from .kernels import FrequencyGrid, ModelParams

IMAG_TOLERANCE = 1e-10
SQUEEZING_TOLERANCE = 1e-12


class Interval(NamedTuple):
    omega_start: float
    omega_end: float
    min_value: float


class Peak(NamedTuple):
    omega: float
    height: float


@dataclass
class SpectrumTable:
    omega: np.ndarray
    intensity: np.ndarray
    coherent_weight: float
    steady: SteadyState
    quadratures: dict[float, np.ndarray] = field(default_factory=dict)


def _as_omega(grid):
    if isinstance(grid, FrequencyGrid):
        return grid.samples()
    return np.asarray(grid, dtype=float)


def _real(values, what):
    values = np.asarray(values)
    scale = np.max(np.abs(values), initial=0.0)
    residue = np.max(np.abs(values.imag), initial=0.0)
    if residue > IMAG_TOLERANCE * max(scale, np.finfo(float).tiny):
        raise NumericalError(f"{what}: imaginary residue {residue:.3e} (scale {scale:.3e})")
    return np.ascontiguousarray(values.real)


def _combine(theta, c_pos, c_neg):
    phase = np.exp(2j * theta)
    total = (
        c_pos[..., MINUS, MINUS] / phase
        + c_pos[..., PLUS, MINUS]
        + c_neg[..., PLUS, MINUS]
        + c_pos[..., PLUS, PLUS] * phase
    )
    return 0.25 * total


def intensity_spectrum(p: ModelParams, grid, ss: SteadyState | None = None):
    """Incoherent density ``C_{+-}(omega)`` and the elastic line weight."""
    ss = steady_state(p) if ss is None else ss
    omega = _as_omega(grid)
    C = fluctuation_spectra(omega, p, ss)
    return _real(C[..., PLUS, MINUS], "intensity"), ss.coherent_weight


def quadrature_spectrum(theta, p: ModelParams, grid, ss: SteadyState | None = None):
    """Normally ordered quadrature density ``S_theta(omega)``.

    ``theta = 0`` is the in-phase and ``theta = pi/2`` the out-of-phase
    component.  Negative values are squeezing.
    """
    ss = steady_state(p) if ss is None else ss
    omega = _as_omega(grid)
    c_pos = fluctuation_spectra(omega, p, ss)
    c_neg = fluctuation_spectra(-omega, p, ss)
    return _real(_combine(theta, c_pos, c_neg), f"S_theta(theta={theta})")


def compute_spectra(p: ModelParams, grid, thetas=()) -> SpectrumTable:
    """Intensity plus any requested quadratures, sharing one correlation sweep."""
    ss = steady_state(p)
    omega = _as_omega(grid)
    c_pos = fluctuation_spectra(omega, p, ss)
    c_neg = fluctuation_spectra(-omega, p, ss)
    table = SpectrumTable(
        omega=omega,
        intensity=_real(c_pos[..., PLUS, MINUS], "intensity"),
        coherent_weight=ss.coherent_weight,
        steady=ss,
    )
    for theta in thetas:
        table.quadratures[float(theta)] = _real(
            _combine(theta, c_pos, c_neg), f"S_theta(theta={theta})"
        )
    return table


def detect_squeezing(omega, values, tolerance=SQUEEZING_TOLERANCE):
    """Maximal runs of grid points with ``values < -tolerance * max|values|``."""
    omega = np.asarray(omega, dtype=float)
    values = np.asarray(values, dtype=float)
    threshold = -tolerance * np.max(np.abs(values), initial=0.0)
    below = values < threshold
    if not below.any():
        return []
    edges = np.diff(np.concatenate(([0], below.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return [
        Interval(float(omega[a]), float(omega[b - 1]), float(values[a:b].min()))
        for a, b in zip(starts, stops)
    ]


def peak_analysis(omega, values, min_height=None):
    """Local maxima with parabolic sub-grid refinement, sorted by frequency.

    A point is a peak when it exceeds its left neighbour and is not below its
    right one.  ``min_height`` drops maxima lower than that absolute value.
    """
    omega = np.asarray(omega, dtype=float)
    y = np.asarray(values, dtype=float)
    if y.size < 3:
        raise ValueError("peak_analysis needs at least 3 points")
    mid = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])) + 1
    step = omega[1] - omega[0]
    peaks = []
    for i in mid:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        curv = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / curv if curv < 0 else 0.0
        height = y1 - 0.25 * (y0 - y2) * shift
        if min_height is not None and height < min_height:
            continue
        peaks.append(Peak(float(omega[i] + shift * step), float(height)))
    return peaks
