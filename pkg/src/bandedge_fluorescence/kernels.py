"""Photonic density of states and the frequency-domain memory kernels.

The reservoir enters the reduced Bloch equations only through the two
causal kernels ``G(tau)`` and ``Gc(tau) = conj(G(tau))``.  With the Fourier
convention ``f(omega) = int dt exp(+i omega t) f(t)`` their transforms for the
anisotropic bandedge model are

    g(omega)  = -i beta^{3/2} / (sqrt(omega_c) + sqrt(omega_c - omega_a - omega))
    gc(omega) = +i beta^{3/2} / (sqrt(omega_c) + sqrt(omega_c - omega_a + omega))

Real frequencies are boundary values from the upper half plane, so a negative
radicand of ``g`` takes the root ``-i sqrt(|x|)`` and a negative radicand of
``gc`` takes ``+i sqrt(|x|)``.  This is the choice that keeps
``Re g >= 0`` (the reservoir only absorbs) and makes ``gc(w) == conj(g(-w))``
hold identically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

BRANCH_RULE = "continuation-from-below"


class Mode(str, enum.Enum):
    BANDGAP = "bandgap"
    MARKOVIAN = "markovian"


def _finite(name, value):
    if not math.isfinite(value):
        raise ParameterError(name, f"must be finite, got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs of one calculation.

    All frequencies share the unit of ``beta`` (normally ``beta = 1``).
    ``gamma`` is only used, and then required, in Markovian mode.
    """

    omega_a: float = 0.0
    omega_c: float = 0.0
    beta: float = 1.0
    rabi: float = 0.0
    detuning: float = 0.0
    mode: Mode = Mode.BANDGAP
    gamma: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        for name in ("omega_a", "omega_c", "beta", "rabi", "detuning"):
            _finite(name, getattr(self, name))
        if self.beta <= 0:
            raise ParameterError("beta", f"must be > 0, got {self.beta}")
        if self.rabi < 0:
            raise ParameterError("rabi", f"must be >= 0, got {self.rabi}")
        if self.detuning != 0:
            raise ParameterError(
                "detuning", "only resonant driving (detuning = 0) is supported"
            )
        if self.mode is Mode.MARKOVIAN:
            if self.gamma is None:
                raise ParameterError("gamma", "required in markovian mode")
            _finite("gamma", self.gamma)
            if self.gamma <= 0:
                raise ParameterError("gamma", f"must be > 0, got {self.gamma}")
        else:
            if self.omega_c <= 0:
                raise ParameterError("omega_c", f"must be > 0, got {self.omega_c}")
            if self.omega_a < self.omega_c:
                raise ParameterError(
                    "omega_a",
                    f"transition must lie at or above the bandedge "
                    f"(omega_a={self.omega_a} < omega_c={self.omega_c})",
                )

    @classmethod
    def bandgap(cls, omega_c, offset, rabi, beta=1.0):
        """Bandgap model with ``omega_a = omega_c + offset``."""
        return cls(omega_a=omega_c + offset, omega_c=omega_c, beta=beta, rabi=rabi)

    @classmethod
    def markovian(cls, gamma, rabi):
        return cls(rabi=rabi, mode=Mode.MARKOVIAN, gamma=gamma)

    @property
    def offset(self):
        """Distance of the transition above the bandedge, ``omega_a - omega_c``."""
        return self.omega_a - self.omega_c

    def as_dict(self):
        out = {
            "mode": self.mode.value,
            "rabi": self.rabi,
            "detuning": self.detuning,
            "beta": self.beta,
        }
        if self.mode is Mode.MARKOVIAN:
            out["gamma"] = self.gamma
        else:
            out["omega_a"] = self.omega_a
            out["omega_c"] = self.omega_c
        return out


@dataclass(frozen=True)
class CouplingParams:
    """Microscopic constants that fold into ``beta``."""

    omega_a: float
    dipole_magnitude: float
    average_coupling: float
    curvature: float
    vacuum_permittivity: float
    reduced_planck: float

    def __post_init__(self):
        for name in (
            "omega_a",
            "dipole_magnitude",
            "average_coupling",
            "curvature",
            "vacuum_permittivity",
            "reduced_planck",
        ):
            value = getattr(self, name)
            _finite(name, value)
            if value <= 0:
                raise ParameterError(name, f"must be > 0, got {value}")


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of offsets from the drive frequency."""

    omega_min: float
    omega_max: float
    n_points: int

    def __post_init__(self):
        _finite("omega_min", self.omega_min)
        _finite("omega_max", self.omega_max)
        if not self.omega_min < self.omega_max:
            raise ParameterError(
                "omega_max",
                f"must exceed omega_min ({self.omega_max} <= {self.omega_min})",
            )
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ParameterError("n_points", f"must be an integer >= 2, got {self.n_points}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def step(self):
        return (self.omega_max - self.omega_min) / (self.n_points - 1)

    def samples(self):
        return np.linspace(self.omega_min, self.omega_max, self.n_points)


@dataclass(frozen=True)
class KernelPair:
    omega: np.ndarray
    g: np.ndarray
    gc: np.ndarray
    branch_rule: str = field(default=BRANCH_RULE)


def dos_anisotropic(omega, omega_c, A):
    """Density of states ``A^{-3/2} sqrt(omega - omega_c)`` above the edge, 0 below."""
    if A <= 0:
        raise ParameterError("A", f"must be > 0, got {A}")
    omega = np.asarray(omega, dtype=float)
    out = np.sqrt(np.clip(omega - omega_c, 0.0, None)) / A**1.5
    return out if out.ndim else float(out)


def compute_beta(cp: CouplingParams) -> float:
    """Coupling scale from ``beta^{3/2} = omega_a^2 d^2 eta / (6 hbar eps0 pi A^{3/2})``."""
    beta_32 = (cp.omega_a**2 * cp.dipole_magnitude**2 * cp.average_coupling) / (
        6.0 * cp.reduced_planck * cp.vacuum_permittivity * math.pi * cp.curvature**1.5
    )
    return beta_32 ** (2.0 / 3.0)


def reservoir_density(omega_abs, p: ModelParams):
    """Coupling-weighted mode density ``sum_k |g_k|^2 delta(omega_abs - omega_k)``.

    Equals ``beta^{3/2} sqrt(w - omega_c) / (pi w)``; the ``1/w`` comes from
    the ``1/sqrt(omega_k)`` normalization of the coupling constants.  Its
    Hilbert transform reproduces ``kernel_g`` and ``2 pi`` times it is the
    dissipative part ``2 Re g``.
    """
    w = np.asarray(omega_abs, dtype=float)
    safe = np.where(w > p.omega_c, w, 1.0)
    out = np.where(
        w > p.omega_c,
        p.beta**1.5 / math.pi * dos_anisotropic(safe, p.omega_c, 1.0) / safe,
        0.0,
    )
    return out if out.ndim else float(out)


def _root(x, sign):
    """sqrt with a fixed branch on the negative real axis.

    Real ``x < 0`` maps to ``sign * 1j * sqrt(|x|)``.  Complex input is taken
    as a point off the axis and uses the principal root, which is the
    analytic continuation of that boundary value when ``Im x`` has the
    matching sign.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return np.sqrt(x)
    mag = np.sqrt(np.abs(x))
    return np.where(x >= 0, mag + 0j, sign * 1j * mag)


def _scalar(out):
    return complex(out) if np.ndim(out) == 0 else out


def kernel_g(omega, p: ModelParams):
    """Closed-form ``g(omega)``; accepts real grids or points with ``Im omega >= 0``."""
    if p.mode is not Mode.BANDGAP:
        raise ParameterError("mode", "kernel_g needs bandgap mode")
    root = _root(p.omega_c - p.omega_a - np.asarray(omega), -1)
    return _scalar(-1j * p.beta**1.5 / (math.sqrt(p.omega_c) + root))


def kernel_gc(omega, p: ModelParams):
    """Closed-form ``gc(omega)``, equal to ``conj(g(-conj(omega)))``."""
    if p.mode is not Mode.BANDGAP:
        raise ParameterError("mode", "kernel_gc needs bandgap mode")
    root = _root(p.omega_c - p.omega_a + np.asarray(omega), +1)
    return _scalar(1j * p.beta**1.5 / (math.sqrt(p.omega_c) + root))


def kernel_markovian(omega, gamma):
    """Flat reservoir: both kernels equal ``gamma / 2`` at every frequency."""
    if gamma <= 0:
        raise ParameterError("gamma", f"must be > 0, got {gamma}")
    return _scalar(np.full(np.shape(omega), 0.5 * gamma, dtype=complex))


def kernels_at(omega, p: ModelParams):
    """``(g, gc)`` at ``omega`` for either reservoir mode."""
    if p.mode is Mode.MARKOVIAN:
        flat = kernel_markovian(omega, p.gamma)
        return flat, flat
    return kernel_g(omega, p), kernel_gc(omega, p)


def evaluate_kernels(omega, p: ModelParams) -> KernelPair:
    """Tabulate both kernels on a grid (``FrequencyGrid`` or array of offsets)."""
    if isinstance(omega, FrequencyGrid):
        omega = omega.samples()
    omega = np.asarray(omega, dtype=float)
    g, gc = kernels_at(omega, p)
    return KernelPair(omega=omega, g=np.asarray(g), gc=np.asarray(gc))
