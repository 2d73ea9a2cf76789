"""Oracle suites behind the ``validate`` subcommand.

Each check compares a production result against an independent computation
and records the worst error next to its tolerance.
"""

from __future__ import annotations

import numpy as np

from .bloch import fluctuation_spectra, steady_state
from .kernels import Mode, ModelParams, kernel_g
from .oracles import (
    ExponentialMemory,
    kernel_numeric_oracle,
    markovian_correlations,
    markovian_reference,
    timedomain_fixed_point,
)

REFERENCE_BANDGAP = ModelParams.bandgap(100.0, 0.5, 0.25)
REFERENCE_MARKOVIAN = ModelParams.markovian(1.0, 1.0)


def _check(name, error, tolerance, **detail):
    error = float(error)
    return {
        "name": name,
        "error": error,
        "tolerance": tolerance,
        "passed": bool(error <= tolerance),
        "detail": detail,
    }


def check_kernel_oracle(p=None, n_points=201):
    """Closed-form kernel against the DOS-integral oracle (relative error)."""
    p = ModelParams.bandgap(100.0, 0.5, 0.0) if p is None else p
    omega = np.linspace(-300.0, 500.0, n_points)
    # stay clear of the branch point at omega = omega_c - omega_a
    omega = omega[np.abs(omega + p.offset) > 1e-3]
    ref = np.array([kernel_numeric_oracle(w, p) for w in omega])
    rel = np.abs(np.asarray(kernel_g(omega, p)) - ref) / np.abs(ref)
    return _check("kernel_closed_form_vs_dos_integral", rel.max(), 1e-6,
                  n_points=int(omega.size))


def check_gap_imaginary(p=None):
    """Inside the gap the kernel is purely imaginary (no propagating modes)."""
    p = REFERENCE_BANDGAP if p is None else p
    omega = np.linspace(-300.0, -p.offset, 200, endpoint=False)
    return _check("kernel_real_part_in_gap", np.abs(np.real(kernel_g(omega, p))).max(), 0.0)


def check_exponential_memory(p=None):
    """Laplace transform of the time-domain memory against ``g(omega)``."""
    p = REFERENCE_BANDGAP if p is None else p
    omega = np.linspace(-50.0, 50.0, 101)
    g = np.asarray(kernel_g(omega, p))
    approx = ExponentialMemory.from_dos(p).transform(omega)
    return _check("exponential_memory_transform", (np.abs(approx - g) / np.abs(g)).max(), 1e-8)


def check_markovian_steady(rabis=(0.0, 0.3, 1.0, 10.0), gamma=1.0):
    err = 0.0
    for om in rabis:
        p = ModelParams.markovian(gamma, om)
        err = max(err, abs(steady_state(p).s_z - markovian_reference(p).s_z))
    return _check("markovian_steady_state_closed_form", err, 1e-10)


def check_markovian_regression(p=None):
    """Langevin correlation spectra against the quantum regression theorem."""
    p = ModelParams.markovian(1.0, 2.0) if p is None else p
    omega = np.linspace(-8.0, 8.0, 81) + 1e-3
    ours = fluctuation_spectra(omega, p)
    ref = markovian_correlations(omega, p)
    return _check("markovian_regression_theorem", np.abs(ours - ref).max() / np.abs(ref).max(),
                  1e-10)


def check_timedomain(p):
    fp = timedomain_fixed_point(p)
    err = np.abs(fp.state - steady_state(p).as_array()).max()
    return _check(f"timedomain_fixed_point_{p.mode.value}", err, 1e-6, t_final=fp.t_final)


def run_validation(params: ModelParams | None = None):
    """Run every suite; ``params`` adds checks for that configuration."""
    checks = [
        check_kernel_oracle(),
        check_gap_imaginary(),
        check_exponential_memory(),
        check_markovian_steady(),
        check_markovian_regression(),
        check_timedomain(REFERENCE_BANDGAP),
        check_timedomain(REFERENCE_MARKOVIAN),
    ]
    if params is not None:
        check = check_timedomain(params)
        check["name"] += "_configured"
        checks.append(check)
        if params.mode is Mode.MARKOVIAN:
            checks.append(check_markovian_regression(params))
            checks[-1]["name"] += "_configured"
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}
