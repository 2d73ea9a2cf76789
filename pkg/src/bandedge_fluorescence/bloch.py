"""Linearized generalized Bloch equations: stationary means and fluctuation spectra.

After the equal-time (zeroth-order Born) reduction the equations of motion
are linear in the atomic operators, so every operator splits exactly into a
constant mean plus a fluctuation driven by the reservoir noise.  In the
frequency domain the fluctuations obey ``M(omega) x(omega) = n(omega)`` for
``x = (sigma_-, sigma_+, sigma_z)`` and the noise has zero-temperature
densities ``N(omega)`` with only four nonzero entries.

Arrays carry the operator index in their last axes, ordered
``(MINUS, PLUS, Z)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularResponse, SingularSteadyState
from .kernels import ModelParams, kernels_at

MINUS, PLUS, Z = 0, 1, 2
DC_TOLERANCE = 1e-10
DET_TOLERANCE = 1e-14


@dataclass(frozen=True)
class SteadyState:
    s_minus: complex
    s_plus: complex
    s_z: complex

    def as_array(self):
        return np.array([self.s_minus, self.s_plus, self.s_z], dtype=complex)

    @property
    def coherent_weight(self):
        """Weight of the elastic line, ``|<sigma_->|^2``."""
        return abs(self.s_minus) ** 2


def dc_system(p: ModelParams):
    """Matrix and right-hand side of the DC mean equations ``A s = b``."""
    g0, gc0 = kernels_at(0.0, p)
    half = 0.5j * p.rabi
    A = np.array(
        [
            [-g0, 0.0, half],
            [0.0, -gc0, -half],
            [1j * p.rabi, -1j * p.rabi, -(g0 + gc0)],
        ],
        dtype=complex,
    )
    b = np.array([0.0, 0.0, g0 + gc0], dtype=complex)
    return A, b


def steady_state(p: ModelParams) -> SteadyState:
    """Stationary means of the reduced Bloch equations at resonance.

    Raises SingularSteadyState when ``Re[g(0) + gc(0)]`` vanishes, e.g. for a
    transition sitting exactly on the bandedge: the population equation then
    has no damping and the means are undetermined.
    """
    g0, gc0 = kernels_at(0.0, p)
    if (g0 + gc0).real <= DC_TOLERANCE * p.beta:
        raise SingularSteadyState(
            f"DC dissipation Re[g(0)+gc(0)] = {(g0 + gc0).real:.3e} is below "
            f"{DC_TOLERANCE:g}*beta; the atom has no damping channel"
        )
    A, b = dc_system(p)
    s = np.linalg.solve(A, b)
    return SteadyState(complex(s[MINUS]), complex(s[PLUS]), complex(s[Z]))


def response_matrix(omega, p: ModelParams):
    """``M(omega)`` with shape ``omega.shape + (3, 3)``."""
    omega = np.asarray(omega, dtype=float)
    g, gc = kernels_at(omega, p)
    g = np.broadcast_to(g, omega.shape)
    gc = np.broadcast_to(gc, omega.shape)
    half = 0.5j * p.rabi
    M = np.zeros(omega.shape + (3, 3), dtype=complex)
    M[..., MINUS, MINUS] = -1j * omega + g
    M[..., MINUS, Z] = -half
    M[..., PLUS, PLUS] = -1j * omega + gc
    M[..., PLUS, Z] = half
    M[..., Z, MINUS] = -1j * p.rabi
    M[..., Z, PLUS] = 1j * p.rabi
    M[..., Z, Z] = -1j * omega + g + gc
    return M


def noise_density(omega, p: ModelParams, ss: SteadyState):
    """Zero-temperature noise densities ``N_jk(omega)``.

    ``<n_j(omega) n_k(omega')> = 2 pi delta(omega + omega') N_jk(omega)``.
    Every nonzero entry is proportional to the two-sided reservoir spectrum
    ``2 Re g(omega)``, which vanishes identically inside the gap.
    """
    omega = np.asarray(omega, dtype=float)
    g, _ = kernels_at(omega, p)
    K = np.broadcast_to(2.0 * np.real(g), omega.shape)
    N = np.zeros(omega.shape + (3, 3), dtype=complex)
    N[..., MINUS, PLUS] = K
    N[..., MINUS, Z] = 2.0 * ss.s_minus * K
    N[..., Z, PLUS] = 2.0 * ss.s_plus * K
    N[..., Z, Z] = 2.0 * (1.0 + ss.s_z) * K
    return N


def _inverse3(M):
    """Batched closed-form 3x3 inverse; raises on near-singular matrices."""
    a, b, c = M[..., 0, 0], M[..., 0, 1], M[..., 0, 2]
    d, e, f = M[..., 1, 0], M[..., 1, 1], M[..., 1, 2]
    g, h, i = M[..., 2, 0], M[..., 2, 1], M[..., 2, 2]
    cof = np.empty_like(M)
    cof[..., 0, 0] = e * i - f * h
    cof[..., 0, 1] = c * h - b * i
    cof[..., 0, 2] = b * f - c * e
    cof[..., 1, 0] = f * g - d * i
    cof[..., 1, 1] = a * i - c * g
    cof[..., 1, 2] = c * d - a * f
    cof[..., 2, 0] = d * h - e * g
    cof[..., 2, 1] = b * g - a * h
    cof[..., 2, 2] = a * e - b * d
    det = a * cof[..., 0, 0] + b * cof[..., 1, 0] + c * cof[..., 2, 0]
    scale = np.max(np.abs(M), axis=(-2, -1))
    bad = np.abs(det) <= DET_TOLERANCE * scale**3
    if np.any(bad):
        raise SingularResponse(
            f"response matrix singular at {int(np.count_nonzero(bad))} frequency point(s)"
        )
    return cof / det[..., None, None]


def fluctuation_spectra(omega, p: ModelParams, ss: SteadyState | None = None):
    """Correlation densities ``C_jk(omega)`` of ``<x_j(omega) x_k(-omega)>``.

    ``C(omega) = M(omega)^{-1} N(omega) M(-omega)^{-T}``.  ``C[..., PLUS, MINUS]``
    is the incoherent fluorescence density at offset ``omega``.
    """
    if ss is None:
        ss = steady_state(p)
    omega = np.asarray(omega, dtype=float)
    left = _inverse3(response_matrix(omega, p))
    right = _inverse3(response_matrix(-omega, p))
    N = noise_density(omega, p, ss)
    return left @ N @ np.swapaxes(right, -1, -2)
