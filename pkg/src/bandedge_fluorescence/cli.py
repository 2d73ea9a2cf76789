"""Command-line front end.

Usage::

    bandedge-fluor SUBCOMMAND [--config FILE] [--key value ...]

Configuration is a flat ``key = value`` file (``#`` starts a comment).
Precedence is preset < config file < command-line overrides.  Exit codes:
0 success, 1 configuration error, 2 numerical failure, 3 validation failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bloch import steady_state
from .errors import ConfigError, NumericalError, ParameterError
from .kernels import FrequencyGrid, Mode, ModelParams, evaluate_kernels, kernels_at
from .output import fmt, write_csv, write_json, write_svg
from .spectra import compute_spectra, detect_squeezing, peak_analysis, SQUEEZING_TOLERANCE

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION = 0, 1, 2, 3

PRESETS = {
    "fig1": {
        "mode": "bandgap",
        "omega_c": "100",
        "omega_a": "100",
        "omega_min": "-500",
        "omega_max": "1000",
        "n_points": "3001",
    },
    "fig2": {
        "mode": "bandgap",
        "omega_c": "100",
        "rabi": "0.25",
        "omega_min": "-1",
        "omega_max": "1",
        "n_points": "4001",
    },
    "fig3": {
        "mode": "bandgap",
        "omega_c": "100",
        "rabi": "0.25",
        "omega_min": "-1",
        "omega_max": "1",
        "n_points": "4001",
        "theta": "0, pi/2",
    },
}
# presets whose transition offset is deliberately left to the user
OFFSET_REQUIRED = ("fig2", "fig3")

DEFAULTS = {
    "mode": "bandgap",
    "beta": "1",
    "rabi": "0",
    "detuning": "0",
    "omega_min": "-1",
    "omega_max": "1",
    "n_points": "2001",
    "theta": "0, pi/2",
    "out": ".",
    "plot": "false",
    "squeezing_tolerance": repr(SQUEEZING_TOLERANCE),
}

_ANGLE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/(\d+\.?\d*))?$")


def _float(key, text):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite, got {text!r}")
    return value


def _int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _bool(key, text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {text!r}")


def _angle(key, text):
    text = text.strip().replace(" ", "")
    m = _ANGLE.match(text)
    if m is None:
        return _float(key, text)
    coef = m.group(1)
    scale = {"": 1.0, "+": 1.0, "-": -1.0}.get(coef)
    scale = float(coef) if scale is None else scale
    denom = float(m.group(2)) if m.group(2) else 1.0
    return scale * math.pi / denom


def _text(key, text):
    return text.strip()


def _float_list(key, text, item=_float):
    parts = [s for s in text.split(",") if s.strip()]
    if not parts:
        raise ConfigError(f"{key}: expected a comma-separated list")
    return [item(key, s.strip()) for s in parts]


PARSERS = {
    "preset": _text,
    "mode": _text,
    "omega_a": _float,
    "omega_c": _float,
    "offset": _float,
    "beta": _float,
    "rabi": _float,
    "detuning": _float,
    "gamma": _float,
    "omega_min": _float,
    "omega_max": _float,
    "n_points": _int,
    "theta": lambda k, t: _float_list(k, t, _angle),
    "offsets": _float_list,
    "out": _text,
    "plot": _bool,
    "squeezing_tolerance": _float,
}


def read_config_file(path):
    """Parse a flat ``key = value`` file into raw strings."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    raw = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config: line {n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key.replace("-", "_")] = value
    return raw


def parse_overrides(tokens):
    """``--key value`` / ``--key=value`` pairs; a bare ``--plot`` means true."""
    raw = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or len(tok) == 2:
            raise ConfigError(f"{tok}: expected an option of the form --key value")
        key, eq, value = tok[2:].partition("=")
        key = key.replace("-", "_")
        if not eq:
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is None or (nxt.startswith("--") and len(nxt) > 2):
                if key != "plot":
                    raise ConfigError(f"{key}: missing value")
                value = "true"
            else:
                value = nxt
                i += 1
        raw[key] = value
        i += 1
    return raw


@dataclass
class RunConfig:
    """Validated inputs of one CLI run."""

    params: ModelParams | None
    grid: FrequencyGrid
    thetas: list
    out: Path
    plot: bool = False
    preset: str | None = None
    offsets: list | None = None
    squeezing_tolerance: float = SQUEEZING_TOLERANCE
    model_given: bool = False
    raw: dict = field(default_factory=dict)

    def record(self, **extra):
        """Every input as text, for CSV comments and JSON reports."""
        rec = {}
        if self.params is not None:
            rec.update({k: (fmt(v) if isinstance(v, float) else str(v))
                        for k, v in self.params.as_dict().items()})
        rec.update(
            omega_min=fmt(self.grid.omega_min),
            omega_max=fmt(self.grid.omega_max),
            n_points=str(self.grid.n_points),
            preset=self.preset or "none",
        )
        rec.update({k: (fmt(v) if isinstance(v, float) else str(v)) for k, v in extra.items()})
        return rec


def _model(values, offset=None):
    mode = values.get("mode", "bandgap")
    try:
        mode = Mode(mode)
    except ValueError:
        raise ConfigError(f"mode: expected 'bandgap' or 'markovian', got {mode!r}") from None
    common = dict(beta=values["beta"], rabi=values["rabi"], detuning=values["detuning"])
    if mode is Mode.MARKOVIAN:
        if "gamma" not in values:
            raise ConfigError("gamma: required in markovian mode")
        return ModelParams(mode=mode, gamma=values["gamma"], **common)
    if "omega_c" not in values:
        raise ConfigError("omega_c: required in bandgap mode")
    omega_c = values["omega_c"]
    if offset is not None:
        omega_a = omega_c + offset
    elif "offset" in values:
        omega_a = omega_c + values["offset"]
        if "omega_a" in values and not math.isclose(values["omega_a"], omega_a, rel_tol=1e-15):
            raise ConfigError("offset: conflicts with omega_a; give only one of them")
    elif "omega_a" in values:
        omega_a = values["omega_a"]
    else:
        raise ConfigError("offset: set the transition via 'offset' or 'omega_a'")
    return ModelParams(omega_a=omega_a, omega_c=omega_c, mode=mode, **common)


def build_config(command, file_raw, cli_raw):
    preset = cli_raw.get("preset", file_raw.get("preset"))
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"preset: unknown preset {preset!r} (choose from {', '.join(PRESETS)})")
    raw = dict(DEFAULTS)
    if preset:
        raw.update(PRESETS[preset])
    user_keys = set(file_raw) | set(cli_raw)
    raw.update(file_raw)
    raw.update(cli_raw)
    values = {}
    for key, text in raw.items():
        if key not in PARSERS:
            raise ConfigError(f"{key}: unknown configuration key")
        values[key] = PARSERS[key](key, text)

    if (preset in OFFSET_REQUIRED and command != "sweep"
            and not {"offset", "omega_a"} & user_keys):
        raise ConfigError(f"offset: required by preset {preset} (transition offset above the edge)")

    if "offset" in user_keys and "omega_a" not in user_keys:
        values.pop("omega_a", None)

    model_given = bool(preset) or bool({"omega_c", "gamma", "mode"} & user_keys)
    params = None
    if command == "sweep":
        if "offsets" not in values:
            raise ConfigError("offsets: required for sweep (comma-separated list)")
        if Mode(values["mode"]) is not Mode.BANDGAP:
            raise ConfigError("mode: sweep needs bandgap mode")
        for off in values["offsets"]:
            _model(values, off)
    elif command != "validate" or model_given:
        params = _model(values)

    grid = FrequencyGrid(values["omega_min"], values["omega_max"], values["n_points"])
    if values["squeezing_tolerance"] < 0:
        raise ConfigError("squeezing_tolerance: must be >= 0")
    return RunConfig(
        params=params,
        grid=grid,
        thetas=values["theta"],
        out=Path(values["out"]),
        plot=values["plot"],
        preset=preset,
        offsets=values.get("offsets"),
        squeezing_tolerance=values["squeezing_tolerance"],
        model_given=model_given,
        raw=values,
    )


# --------------------------------------------------------------------------- commands


def cmd_kernel(cfg: RunConfig):
    kp = evaluate_kernels(cfg.grid, cfg.params)
    g = kp.g
    write_csv(
        cfg.out / "kernel.csv",
        ["omega", "re_g", "im_g", "abs_g", "arg_g"],
        [kp.omega, g.real, g.imag, np.abs(g), np.angle(g)],
        params=cfg.record(),
        version=__version__,
        comments=[f"branch_rule={kp.branch_rule}"],
    )
    if cfg.plot:
        write_svg(cfg.out / "kernel.svg", kp.omega,
                  [("|g|", np.abs(g)), ("Re g", g.real), ("Im g", g.imag)],
                  title="memory kernel")
    return EXIT_OK


def _steady_payload(p: ModelParams):
    from .oracles import memory_time_ratio

    ss = steady_state(p)
    g0, gc0 = kernels_at(0.0, p)
    return {
        "s_minus": ss.s_minus,
        "s_plus": ss.s_plus,
        "s_z": ss.s_z,
        "diagnostics": {
            "excited_population": (1.0 + ss.s_z.real) / 2.0,
            "coherent_weight": ss.coherent_weight,
            "dc_dissipation": (g0 + gc0).real,
            "g0": complex(g0),
            "gc0": complex(gc0),
            "memory_time_ratio": memory_time_ratio(p),
        },
    }


def cmd_steady(cfg: RunConfig):
    payload = _steady_payload(cfg.params)
    payload.update(version=__version__, params=cfg.record())
    write_json(cfg.out / "steady.json", payload)
    return EXIT_OK


def _write_spectrum(cfg, p, path, extra=None):
    table = compute_spectra(p, cfg.grid)
    write_csv(
        path,
        ["omega", "intensity"],
        [table.omega, table.intensity],
        params=cfg.record(**(extra or {})),
        version=__version__,
        comments=[
            f"coherent_weight={fmt(table.coherent_weight)} "
            "(elastic delta line at omega=0, not included in the intensity column)"
        ],
    )
    if cfg.plot:
        write_svg(path.with_suffix(".svg"), table.omega, [("S", table.intensity)],
                  title="fluorescence spectrum")
    return table


def cmd_spectrum(cfg: RunConfig):
    _write_spectrum(cfg, cfg.params, cfg.out / "spectrum.csv")
    return EXIT_OK


def cmd_quadrature(cfg: RunConfig):
    table = compute_spectra(cfg.params, cfg.grid, cfg.thetas)
    thetas = list(table.quadratures)
    names = [f"S_theta_{fmt(t)}" for t in thetas]
    write_csv(
        cfg.out / "quadrature.csv",
        ["omega"] + names,
        [table.omega] + [table.quadratures[t] for t in thetas],
        params=cfg.record(theta=",".join(fmt(t) for t in thetas)),
        version=__version__,
    )
    report = []
    for t in thetas:
        intervals = detect_squeezing(table.omega, table.quadratures[t], cfg.squeezing_tolerance)
        report.append({
            "theta": t,
            "n_intervals": len(intervals),
            "intervals": [iv._asdict() for iv in intervals],
        })
    write_json(cfg.out / "squeezing.json", {
        "version": __version__,
        "params": cfg.record(),
        "tolerance": cfg.squeezing_tolerance,
        "quadratures": report,
    })
    if cfg.plot:
        write_svg(cfg.out / "quadrature.svg", table.omega,
                  [(f"theta={t:.4g}", table.quadratures[t]) for t in thetas],
                  title="quadrature spectra")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig):
    values = cfg.raw
    summary = []
    for k, off in enumerate(cfg.offsets):
        p = _model(values, off)
        path = cfg.out / f"spectrum_offset_{k:03d}.csv"
        sub = RunConfig(p, cfg.grid, cfg.thetas, cfg.out, cfg.plot, cfg.preset)
        table = _write_spectrum(sub, p, path, {"offset": off})
        peaks = peak_analysis(table.omega, table.intensity)
        summary.append({
            "offset": off,
            "file": path.name,
            "coherent_weight": table.coherent_weight,
            "peaks": [pk._asdict() for pk in peaks],
        })
    write_json(cfg.out / "sweep.json", {
        "version": __version__,
        "params": cfg.record(offsets=",".join(fmt(o) for o in cfg.offsets)),
        "spectra": summary,
    })
    return EXIT_OK


def cmd_validate(cfg: RunConfig):
    from .validation import run_validation

    report = run_validation(cfg.params if cfg.model_given else None)
    report.update(version=__version__, params=cfg.record() if cfg.params else {})
    write_json(cfg.out / "validation.json", report)
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {check['name']}: error={check['error']:.3e} "
              f"tolerance={check['tolerance']:.1e}")
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


COMMANDS = {
    "kernel": (cmd_kernel, "tabulate the memory kernel g(omega)"),
    "steady": (cmd_steady, "stationary Bloch vector and diagnostics (JSON)"),
    "spectrum": (cmd_spectrum, "incoherent fluorescence spectrum (CSV)"),
    "quadrature": (cmd_quadrature, "quadrature spectra and squeezing intervals"),
    "sweep": (cmd_sweep, "one spectrum per transition offset in 'offsets'"),
    "validate": (cmd_validate, "run the independent oracle checks"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"arguments: {message}")


def make_parser():
    parser = _Parser(prog="bandedge-fluor", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    sub.required = True
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text,
                            description=f"{help_text}. Extra options: --key value, "
                            f"keys: {', '.join(PARSERS)}.")
        sp.add_argument("--config", help="flat key = value configuration file")
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args, rest = make_parser().parse_known_args(argv)
        file_raw = read_config_file(args.config) if args.config else {}
        cfg = build_config(args.command, file_raw, parse_overrides(rest))
        cfg.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command][0](cfg)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: out: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
