"""Independent numerical checks of the closed-form and frequency-domain results.

* ``kernel_numeric_oracle`` evaluates the memory kernel directly from the
  coupling-weighted density of states by adaptive quadrature.
* ``ExponentialMemory`` rebuilds the time-domain kernel ``G(tau)`` as a
  superposition of decaying exponentials, and ``timedomain_means`` integrates
  the mean equations with their convolutions in the time domain.
* ``markovian_reference`` and ``markovian_correlations`` give free-space
  answers: the textbook Bloch steady state and two-time correlation spectra
  from a Lindblad master equation via the quantum regression theorem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .bloch import MINUS, PLUS, Z
from .errors import NonConvergence, ParameterError, StepSizeTooLarge
from .kernels import Mode, ModelParams, kernels_at, reservoir_density

STEP_RESOLUTION = 0.5


def _quad(func, a, b, **kwargs):
    out = integrate.quad(func, a, b, full_output=1, **kwargs)
    if len(out) > 3:
        raise NonConvergence(f"quadrature on [{a}, {b}] failed: {out[3]}")
    return out[0]


def kernel_numeric_oracle(omega, p: ModelParams, *, cutoff=None, epsrel=1e-12, limit=400):
    """``g(omega)`` from ``int dw' rho(w') i / (omega + omega_a - w' + i0)``.

    The ``+i0`` limit splits into the half residue ``pi rho(omega + omega_a)``
    and ``i`` times a principal-value integral.  With ``w' = omega_c + t^2`` the
    PV integrand is smooth apart from a simple pole, which is handed to QUADPACK's
    Cauchy-weight rule; beyond ``cutoff`` (default ``omega_a + 1e4 beta``) the
    remaining tail is integrated to infinity without a weight.
    """
    if p.mode is not Mode.BANDGAP:
        raise ParameterError("mode", "the DOS oracle needs bandgap mode")
    nu = float(omega) + p.omega_a
    wc = p.omega_c
    scale = 2.0 * p.beta**1.5 / math.pi
    if cutoff is None:
        cutoff = p.omega_a + 1e4 * p.beta
    t_cut = math.sqrt(max(cutoff, nu + 1.0) - wc)
    opts = dict(epsabs=0.0, epsrel=epsrel, limit=limit)

    if nu > wc:
        t0 = math.sqrt(nu - wc)

        def smooth(t):
            # rho dw' / (nu - w') = smooth(t) / (t0 - t)
            return scale * t * t / ((wc + t * t) * (t0 + t))

        pv = -_quad(smooth, 0.0, t_cut, weight="cauchy", wvar=t0, **opts)
        pv += _quad(lambda t: smooth(t) / (t0 - t), t_cut, np.inf, **opts)
        return complex(math.pi * reservoir_density(nu, p), pv)

    gap = wc - nu

    def regular(t):
        return -scale * t * t / ((wc + t * t) * (t * t + gap))

    im = _quad(regular, 0.0, t_cut, **opts) + _quad(regular, t_cut, np.inf, **opts)
    return complex(0.0, im)


class ExponentialMemory:
    """``G(tau) ~= sum_j w_j exp(lam_j tau)`` for ``tau > 0``.

    Starting from ``G(tau) = int dw' rho(w') exp(i (omega_a - w') tau)`` and
    rotating the contour ``w' - omega_c = -i v`` (no singularities are crossed
    in the fourth quadrant) gives

        G(tau) = exp(i delta tau) int_0^inf phi(v) exp(-v tau) dv,
        phi(v) = beta^{3/2}/pi exp(-3 i pi/4) sqrt(v) / (omega_c - i v),

    with ``delta = omega_a - omega_c``.  The ``v`` integral is discretized with
    the trapezoidal rule in ``log v``, which converges geometrically.
    """

    def __init__(self, rates, weights):
        self.rates = np.asarray(rates, dtype=complex)
        self.weights = np.asarray(weights, dtype=complex)

    @classmethod
    def from_dos(cls, p: ModelParams, *, step=0.25, span=(-45.0, 55.0)):
        if p.mode is not Mode.BANDGAP:
            raise ParameterError("mode", "ExponentialMemory.from_dos needs bandgap mode")
        x = math.log(p.omega_c) + np.arange(span[0], span[1] + 0.5 * step, step)
        v = np.exp(x)
        phi = (
            p.beta**1.5 / math.pi * np.exp(-0.75j * math.pi) * np.sqrt(v) / (p.omega_c - 1j * v)
        )
        return cls(1j * p.offset - v, step * phi * v)

    def conjugate(self):
        """Memory of ``Gc(tau) = conj(G(tau))``."""
        return ExponentialMemory(np.conj(self.rates), np.conj(self.weights))

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        return np.exp(np.multiply.outer(tau, self.rates)) @ self.weights

    def transform(self, omega):
        """``int_0^inf G(tau) exp(i omega tau) dtau`` for ``Im omega >= 0``."""
        omega = np.asarray(omega)
        return -(1.0 / (np.add.outer(1j * omega, self.rates))) @ self.weights


def _phi12(z):
    """``phi1 = (e^z-1)/z`` and ``phi2 = (e^z-1-z)/z^2`` without cancellation."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-2
    zs = np.where(small, 1.0, z)
    with np.errstate(over="ignore", invalid="ignore"):
        ez = np.exp(zs)
        p1 = np.where(small, 0, (ez - 1.0) / zs)
        p2 = np.where(small, 0, (ez - 1.0 - zs) / zs**2)
    series1 = 1 + z / 2 + z**2 / 6 + z**3 / 24 + z**4 / 120
    series2 = 0.5 + z / 6 + z**2 / 24 + z**3 / 120 + z**4 / 720
    return np.where(small, series1, p1), np.where(small, series2, p2)


def atomic_rate(p: ModelParams):
    """Fastest atomic frequency scale, ``max(Omega, |g(0)| + |gc(0)|)``."""
    g0, gc0 = kernels_at(0.0, p)
    return max(p.rabi, abs(g0) + abs(gc0))


class _MeanStepper:
    """Trapezoidal stepping of the mean equations with exponential memory.

    Memory modes are advanced exactly for an input that is linear over each
    step, so the scheme is second order and, for constant input, reproduces
    ``int_0^inf G = sum_j -w_j / lam_j`` exactly: the fixed point does not
    depend on ``dt``.
    """

    def __init__(self, p: ModelParams, dt, memory=None):
        self.dt = dt
        if p.mode is Mode.MARKOVIAN:
            inst = 0.5 * p.gamma
            rates = np.zeros((4, 0), dtype=complex)
            weights = rates
        else:
            inst = 0.0
            mem = memory if memory is not None else ExponentialMemory.from_dos(p)
            conj = mem.conjugate()
            rates = np.stack([mem.rates, conj.rates, mem.rates, conj.rates])
            weights = np.stack([mem.weights, conj.weights, mem.weights, conj.weights])
        self.W = weights
        self.E = np.exp(rates * dt)
        p1, p2 = _phi12(rates * dt)
        self.a = (p1 - p2) * dt
        self.b = p2 * dt
        B = np.sum(self.W * self.b, axis=1)
        self.D = np.array([B[0] + inst, B[1] + inst, B[2] + B[3] + 2 * inst])
        self.c = np.array([0.0, 0.0, self.D[2]])
        self.inst = inst
        half = 0.5j * p.rabi
        self.A = np.array(
            [[0, 0, half], [0, 0, -half], [1j * p.rabi, -1j * p.rabi, 0]], dtype=complex
        )
        lhs = np.eye(3) - 0.5 * dt * self.A + 0.5 * dt * np.diag(self.D)
        self.solve = np.linalg.inv(lhs)
        self.x = np.array([0, 0, -1], dtype=complex)
        self.y = np.zeros_like(self.W)
        self.t = 0.0
        self.conv = self._convolution(self.y, self.x)

    def _inputs(self, x):
        return np.array([x[MINUS], x[PLUS], 1 + x[Z], 1 + x[Z]])

    def _convolution(self, y, x):
        s = np.sum(self.W * y, axis=1)
        u = self._inputs(x)
        return np.array(
            [
                s[0] + self.inst * u[0],
                s[1] + self.inst * u[1],
                s[2] + s[3] + 2 * self.inst * u[2],
            ]
        )

    def advance(self, n_steps, *, with_mean=False):
        """Take ``n_steps``; optionally also return the mean state over them."""
        dt = self.dt
        x, y, conv = self.x, self.y, self.conv
        total = np.zeros(3, dtype=complex)
        for _ in range(n_steps):
            y_part = self.E * y + self.a * self._inputs(x)[:, None]
            s = np.sum(self.W * y_part, axis=1)
            P = np.array([s[0], s[1], s[2] + s[3]])
            rhs = x + 0.5 * dt * (self.A @ x - conv) - 0.5 * dt * (P + self.c)
            x = self.solve @ rhs
            y = y_part + self.b * self._inputs(x)[:, None]
            conv = P + self.D * x + self.c
            if with_mean:
                total += x
        self.x, self.y, self.conv = x, y, conv
        self.t += n_steps * dt
        if with_mean:
            return x, total / max(n_steps, 1)
        return x


def _check_step(p, dt, t_max=None):
    if not dt > 0:
        raise ParameterError("dt", f"must be > 0, got {dt}")
    if t_max is not None and not t_max > 0:
        raise ParameterError("t_max", f"must be > 0, got {t_max}")
    nu = atomic_rate(p)
    if dt * nu > STEP_RESOLUTION:
        raise StepSizeTooLarge(
            f"dt={dt} exceeds {STEP_RESOLUTION}/{nu:.4g}; the atomic dynamics "
            f"(Rabi frequency and kernel magnitude at DC) is under-resolved"
        )


def default_step(p: ModelParams):
    return 0.25 / atomic_rate(p)


def timedomain_means(p: ModelParams, t_max, dt, *, sample_every=1, memory=None):
    """Integrate the mean equations from the ground state.

    Returns ``(t, states)`` where ``states[:, k]`` holds
    ``(<sigma_->, <sigma_+>, <sigma_z>)`` at the sample times.
    """
    _check_step(p, dt, t_max)
    stepper = _MeanStepper(p, dt, memory)
    n_steps = int(math.ceil(t_max / dt - 1e-9))
    times = [0.0]
    states = [stepper.x.copy()]
    done = 0
    while done < n_steps:
        chunk = min(sample_every, n_steps - done)
        states.append(stepper.advance(chunk).copy())
        done += chunk
        times.append(done * dt)
    return np.array(times), np.array(states)


class FixedPoint(NamedTuple):
    state: np.ndarray
    t_final: float
    last_change: float


def timedomain_fixed_point(p: ModelParams, dt=None, *, tol=1e-7, t_start=None, t_cap=2e5,
                           memory=None):
    """Long-time limit of ``timedomain_means``.

    Integration continues over doubling windows ``[T, 2T], [2T, 4T], ...``
    until the window means differ by less than ``tol``.  Near a bandedge the
    relaxation is algebraic and oscillates at the edge frequency; averaging
    over a window suppresses that tail much faster than sampling end points.
    """
    dt = default_step(p) if dt is None else dt
    _check_step(p, dt)
    if t_start is None:
        g0, gc0 = kernels_at(0.0, p)
        t_start = max(20.0 / (g0 + gc0).real, 200 * dt)
    stepper = _MeanStepper(p, dt, memory)
    stepper.advance(int(math.ceil(t_start / dt)))
    _, prev = stepper.advance(int(math.ceil(t_start / dt)), with_mean=True)
    while True:
        _, current = stepper.advance(int(round(stepper.t / dt)), with_mean=True)
        change = float(np.max(np.abs(current - prev)))
        if change < tol:
            return FixedPoint(current, stepper.t, change)
        if stepper.t >= t_cap:
            raise NonConvergence(
                f"time-domain window means still moving by {change:.2e} at t={stepper.t:.4g}"
            )
        prev = current


@dataclass(frozen=True)
class MarkovianReference:
    s_z: float
    peaks: tuple[float, float, float]
    squeezing_predicate: bool


def markovian_reference(p: ModelParams) -> MarkovianReference:
    """Free-space closed forms: ``s_z``, the Mollow peak set, and the
    out-of-phase squeezing condition ``Omega^2 <= Gamma^2 / 4`` as stated for
    free space."""
    if p.mode is not Mode.MARKOVIAN:
        raise ParameterError("mode", "markovian_reference needs markovian mode")
    gam, om = p.gamma, p.rabi
    return MarkovianReference(
        s_z=-(gam**2) / (gam**2 + 2 * om**2),
        peaks=(-om, 0.0, om),
        squeezing_predicate=om**2 <= 0.25 * gam**2,
    )


_SM = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e| in the basis (|e>, |g>)
_SP = _SM.T.copy()
_SZ = np.diag([1.0, -1.0]).astype(complex)


def _liouvillian(p: ModelParams):
    """Row-major superoperator of ``d rho/dt`` at resonance in the drive frame."""
    eye = np.eye(2)
    H = 0.5 * p.rabi * (_SM + _SP)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    c = math.sqrt(p.gamma) * _SM
    cdc = c.conj().T @ c
    L += np.kron(c, c.conj()) - 0.5 * np.kron(cdc, eye) - 0.5 * np.kron(eye, cdc.T)
    return L


def markovian_correlations(omega, p: ModelParams):
    """``C_jk(omega)`` for free space from the quantum regression theorem.

    ``C_jk(omega) = int dtau e^{i omega tau} <dA_j(tau) dA_k(0)>`` over the whole
    real line, where the ``tau < 0`` half is ``<dA_j(0) dA_k(|tau|)>``.  This is
    the operator ordering of ``<x_j(omega) x_k(-omega)>``.
    """
    if p.mode is not Mode.MARKOVIAN:
        raise ParameterError("mode", "markovian_correlations needs markovian mode")
    L = _liouvillian(p)
    trace_row = np.eye(2).reshape(-1)
    # null vector of L with unit trace
    system = np.vstack([L, trace_row])
    rhs = np.zeros(5, dtype=complex)
    rhs[-1] = 1.0
    rho = np.linalg.lstsq(system, rhs, rcond=None)[0].reshape(2, 2)
    # identical to L on traceless operators, invertible on the full space
    L_reg = L - np.outer(rho.reshape(-1), trace_row)
    ops = (_SM, _SP, _SZ)
    means = [np.trace(op @ rho) for op in ops]
    left = [op @ rho - m * rho for op, m in zip(ops, means)]
    right = [rho @ op - m * rho for op, m in zip(ops, means)]

    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.empty(omega.shape + (3, 3), dtype=complex)
    eye4 = np.eye(4)
    for n, w in enumerate(omega):
        res_p = -np.linalg.inv(L_reg + 1j * w * eye4)
        res_m = -np.linalg.inv(L_reg - 1j * w * eye4)
        fwd = [(res_p @ X.reshape(-1)).reshape(2, 2) for X in left]
        bwd = [(res_m @ X.reshape(-1)).reshape(2, 2) for X in right]
        for j in range(3):
            for k in range(3):
                out[n, j, k] = np.trace(ops[j] @ fwd[k]) + np.trace(ops[k] @ bwd[j])
    return out


def memory_time_ratio(p: ModelParams):
    """Kernel bandwidth over atomic rate, ``4 omega_c / max(Omega, 2 Re g(0))``.

    Large values mean the memory is short compared with the atomic response,
    which is where the equal-time reduction is expected to hold.
    """
    if p.mode is Mode.MARKOVIAN:
        return math.inf
    g0, _ = kernels_at(0.0, p)
    denom = max(p.rabi, 2 * g0.real)
    return math.inf if denom == 0 else 4 * p.omega_c / denom
