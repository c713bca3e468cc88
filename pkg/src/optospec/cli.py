"""Config-driven command line front end.

Three commands:

    optospec run CONFIG     -- compute a spectrum, write CSV + .meta sidecar
    optospec check CONFIG   -- compare the closed forms against the ODE oracle
    optospec peaks CSV      -- list extrema of a previously written spectrum

Configs are YAML mappings with flat keys (all frequencies in units of
omega_M, which the CLI fixes to 1).  Exit codes: 0 success, 1 config
validation failure, 2 numerical failure, 3 tolerance failure in check
mode.  The only environment variable honored is OPTOSPEC_THREADS, which
caps the BLAS thread count; solver imports happen after it is applied.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import click
import yaml

__all__ = [
    "ConfigError",
    "OracleSettings",
    "RunConfig",
    "parse_config",
    "serialize_config",
    "run_config",
    "check_config",
    "main",
]

DEFAULT_GRID = (-6.0, 6.0, 4001)
DEFAULT_MIN_PEAK_HEIGHT = 0.05
MODES = ("emission", "scattering", "oracle-check")

_SCALAR_KEYS = {
    "mode": str,
    "g": float,
    "gamma_c": float,
    "delta_0": float,
    "epsilon": float,
    "n_phonon_max": int,
    "tail_tolerance": float,
    "output": str,
    "oracle_span": float,
    "oracle_dk": float,
    "oracle_dt": float,
    "oracle_t_final": float,
    "oracle_n_phonon_max": int,
    "check_tolerance": float,
}
_KNOWN_KEYS = set(_SCALAR_KEYS) | {"mirror", "grid"}
_ORACLE_KEYS = (
    "oracle_span",
    "oracle_dk",
    "oracle_dt",
    "oracle_t_final",
    "oracle_n_phonon_max",
    "check_tolerance",
)


class ConfigError(ValueError):
    """Carries every validation error found in a config document."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class OracleSettings:
    """Optional overrides for check mode; None means 'derive a default'."""

    span: float | None = None
    dk: float | None = None
    dt: float | None = None
    t_final: float | None = None
    n_phonon_max: int | None = None
    tolerance: float | None = None


@dataclass(frozen=True)
class RunConfig:
    mode: str
    g: float
    gamma_c: float
    mirror: object
    grid: tuple[float, float, int] = DEFAULT_GRID
    packet: object | None = None
    n_phonon_max: int = 64
    tail_tolerance: float = 1e-10
    output: str | None = None
    oracle: OracleSettings = field(default_factory=OracleSettings)


def _coerce_scalar(key: str, value, errors: list[str]):
    want = _SCALAR_KEYS[key]
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            errors.append(f"{key}: expected a number, got {value!r}")
            return None
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            errors.append(f"{key}: expected an integer, got {value!r}")
            return None
        return value
    if not isinstance(value, str):
        errors.append(f"{key}: expected a string, got {value!r}")
        return None
    return value


def _parse_mirror(value, errors: list[str]):
    from . import model

    if isinstance(value, str):
        tokens = value.split()
        kind = tokens[0] if tokens else ""
        try:
            if kind == "number" and len(tokens) == 2:
                return model.NumberState(int(tokens[1]))
            if kind == "displaced-ground" and len(tokens) == 1:
                return model.DisplacedGround()
            if kind == "coherent" and len(tokens) == 2:
                return model.CoherentState(float(tokens[1]))
            if kind == "thermal" and len(tokens) == 2:
                return model.ThermalState(float(tokens[1]))
        except ValueError:
            pass
        errors.append(
            f"mirror: cannot parse {value!r}; expected 'number <int>', "
            "'displaced-ground', 'coherent <float>', or 'thermal <float>'"
        )
        return None
    if isinstance(value, dict) and set(value) == {"superposition"}:
        entries = value["superposition"]
        if not isinstance(entries, list) or not entries:
            errors.append("mirror.superposition: expected a non-empty list")
            return None
        coeffs = []
        for idx, entry in enumerate(entries):
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                coeffs.append(complex(entry))
            elif (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(p, (int, float)) for p in entry)
            ):
                coeffs.append(complex(entry[0], entry[1]))
            else:
                errors.append(
                    f"mirror.superposition[{idx}]: expected a number or [re, im] pair"
                )
                return None
        return model.SuperpositionState(tuple(coeffs))
    errors.append(f"mirror: unsupported value {value!r}")
    return None


def _mirror_to_config(mirror) -> object:
    from . import model

    if isinstance(mirror, model.NumberState):
        return f"number {mirror.n0}"
    if isinstance(mirror, model.DisplacedGround):
        return "displaced-ground"
    if isinstance(mirror, model.CoherentState):
        return f"coherent {mirror.beta!r}"
    if isinstance(mirror, model.ThermalState):
        return f"thermal {mirror.nbar!r}"
    if isinstance(mirror, model.SuperpositionState):
        return {"superposition": [[c.real, c.imag] for c in mirror.coeffs]}
    raise ConfigError([f"mirror: cannot serialize {mirror!r}"])


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML config document.

    Raises:
        ConfigError: carrying the full list of validation errors.
    """
    from . import model
    from .scattering import PhotonWavepacket

    errors: list[str] = []
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"not valid YAML: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError(["config must be a key/value mapping"])

    for key in sorted(set(raw) - _KNOWN_KEYS):
        errors.append(f"{key}: unknown key")

    values: dict = {}
    for key in set(raw) & set(_SCALAR_KEYS):
        values[key] = _coerce_scalar(key, raw[key], errors)

    mode = values.get("mode")
    if "mode" not in raw:
        errors.append("mode: required (emission, scattering, or oracle-check)")
    elif mode not in MODES:
        errors.append(f"mode: must be one of {', '.join(MODES)}, got {mode!r}")

    for key in ("g", "gamma_c"):
        if key not in raw:
            errors.append(f"{key}: required (units of omega_M)")
    g = values.get("g")
    gamma_c = values.get("gamma_c")
    if g is not None and g < 0:
        errors.append(f"g: must be >= 0, got {g}")
    if gamma_c is not None and gamma_c <= 0:
        errors.append(f"gamma_c: must be > 0, got {gamma_c}")

    mirror = model.NumberState(0)
    if "mirror" in raw:
        parsed = _parse_mirror(raw["mirror"], errors)
        if parsed is not None:
            mirror = parsed

    grid = DEFAULT_GRID
    if "grid" in raw:
        entry = raw["grid"]
        ok = (
            isinstance(entry, list)
            and len(entry) == 3
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry[:2])
            and isinstance(entry[2], int)
        )
        if ok and entry[0] < entry[1] and entry[2] >= 2:
            grid = (float(entry[0]), float(entry[1]), int(entry[2]))
        else:
            errors.append(f"grid: expected [min, max, points] with min < max, got {entry!r}")

    n_phonon_max = values.get("n_phonon_max", 64)
    if n_phonon_max is not None and n_phonon_max < 1:
        errors.append(f"n_phonon_max: must be >= 1, got {n_phonon_max}")
    tail_tolerance = values.get("tail_tolerance", 1e-10)
    if tail_tolerance is not None and not (0.0 < tail_tolerance < 1.0):
        errors.append(f"tail_tolerance: must be in (0, 1), got {tail_tolerance}")

    packet = None
    has_packet_keys = ("epsilon" in raw) or ("delta_0" in raw)
    if mode == "emission" and has_packet_keys:
        for key in ("epsilon", "delta_0"):
            if key in raw:
                errors.append(f"{key}: forbidden for mode=emission")
    elif mode == "scattering" or (mode == "oracle-check" and has_packet_keys):
        for key in ("epsilon", "delta_0"):
            if key not in raw:
                errors.append(f"{key}: required for a scattering run")
        epsilon = values.get("epsilon")
        delta_0 = values.get("delta_0")
        if epsilon is not None and epsilon <= 0:
            errors.append(f"epsilon: must be > 0, got {epsilon}")
        elif epsilon is not None and delta_0 is not None:
            packet = PhotonWavepacket(delta_0=delta_0, epsilon=epsilon)

    oracle = OracleSettings()
    present_oracle = [key for key in _ORACLE_KEYS if key in raw]
    if mode == "oracle-check":
        if not isinstance(mirror, model.NumberState):
            errors.append("mirror: oracle-check supports number states only")
        oracle = OracleSettings(
            span=values.get("oracle_span"),
            dk=values.get("oracle_dk"),
            dt=values.get("oracle_dt"),
            t_final=values.get("oracle_t_final"),
            n_phonon_max=values.get("oracle_n_phonon_max"),
            tolerance=values.get("check_tolerance"),
        )
        for key, bound in (("oracle_span", 0.0), ("oracle_dk", 0.0), ("oracle_dt", 0.0)):
            value = values.get(key)
            if value is not None and value <= bound:
                errors.append(f"{key}: must be > {bound}, got {value}")
        n_oracle = values.get("oracle_n_phonon_max")
        if n_oracle is not None and n_oracle < 1:
            errors.append(f"oracle_n_phonon_max: must be >= 1, got {n_oracle}")
    else:
        for key in present_oracle:
            errors.append(f"{key}: only allowed for mode=oracle-check")

    if errors:
        raise ConfigError(sorted(errors))
    return RunConfig(
        mode=mode,
        g=g,
        gamma_c=gamma_c,
        mirror=mirror,
        grid=grid,
        packet=packet,
        n_phonon_max=n_phonon_max,
        tail_tolerance=tail_tolerance,
        output=values.get("output"),
        oracle=oracle,
    )


def serialize_config(config: RunConfig) -> str:
    """Canonical YAML for a config; parse_config(serialize_config(c)) == c."""
    doc: dict = {
        "mode": config.mode,
        "g": config.g,
        "gamma_c": config.gamma_c,
        "mirror": _mirror_to_config(config.mirror),
        "grid": [config.grid[0], config.grid[1], config.grid[2]],
        "n_phonon_max": config.n_phonon_max,
        "tail_tolerance": config.tail_tolerance,
    }
    if config.packet is not None:
        doc["delta_0"] = config.packet.delta_0
        doc["epsilon"] = config.packet.epsilon
    if config.output is not None:
        doc["output"] = config.output
    oracle = config.oracle
    for key, value in (
        ("oracle_span", oracle.span),
        ("oracle_dk", oracle.dk),
        ("oracle_dt", oracle.dt),
        ("oracle_t_final", oracle.t_final),
        ("oracle_n_phonon_max", oracle.n_phonon_max),
        ("check_tolerance", oracle.tolerance),
    ):
        if value is not None:
            doc[key] = value
    return yaml.safe_dump(doc, sort_keys=True, default_flow_style=None)


# --- execution ----------------------------------------------------------------


def _solver_inputs(config: RunConfig):
    from .model import TruncationConfig, derive_params

    params = derive_params(1.0, config.g, config.gamma_c)
    trunc = TruncationConfig(config.n_phonon_max, config.tail_tolerance)
    return params, trunc


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _meta_lines(config: RunConfig, spectrum, peaks) -> list[str]:
    lines = [
        "# optospec run metadata",
        f"timestamp: {datetime.now(timezone.utc).isoformat()}",
        f"mode: {config.mode}",
        f"g: {_format(config.g)}",
        f"gamma_c: {_format(config.gamma_c)}",
        f"mirror: {_mirror_to_config(config.mirror)}",
        f"grid: [{_format(config.grid[0])}, {_format(config.grid[1])}, {config.grid[2]}]",
        f"n_phonon_max: {config.n_phonon_max}",
        f"tail_tolerance: {_format(config.tail_tolerance)}",
    ]
    if config.packet is not None:
        lines.append(f"delta_0: {_format(config.packet.delta_0)}")
        lines.append(f"epsilon: {_format(config.packet.epsilon)}")
    meta = spectrum.metadata
    lines.append(f"norm_deficit: {_format(spectrum.norm_deficit)}")
    lines.append(f"state_tail_deficit: {_format(meta.get('state_tail_deficit', 0.0))}")
    lines.append(f"expansion_deficit: {_format(meta.get('expansion_deficit', 0.0))}")
    lines.append(f"peak_count: {len(peaks)}")
    for peak in peaks:
        kind = "dip" if peak.is_dip else "peak"
        lines.append(
            f"peak: location={_format(peak.location)} height={_format(peak.height)} "
            f"width={_format(peak.width)} kind={kind}"
        )
    return lines


def _write_lines(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def run_config(config: RunConfig, output: Path) -> tuple[Path, Path]:
    """Execute a run-mode config; returns (csv_path, meta_path)."""
    from .emission import emission_spectrum
    from .peaks import detect_peaks
    from .scattering import scattering_spectrum
    from .spectrum import uniform_grid

    params, trunc = _solver_inputs(config)
    grid = uniform_grid(*config.grid)
    if config.mode == "scattering":
        spectrum = scattering_spectrum(params, config.mirror, config.packet, grid, trunc)
    else:
        spectrum = emission_spectrum(params, config.mirror, grid, trunc)
    peaks = detect_peaks(spectrum, DEFAULT_MIN_PEAK_HEIGHT)

    csv_lines = ["delta_k,S"]
    csv_lines.extend(
        f"{_format(float(x))},{_format(float(s))}"
        for x, s in zip(spectrum.grid, spectrum.density)
    )
    _write_lines(output, csv_lines)
    meta_path = output.with_suffix(".meta")
    _write_lines(meta_path, _meta_lines(config, spectrum, peaks))
    return output, meta_path


def _resolved_oracle(config: RunConfig):
    settings = config.oracle
    family = "scattering" if config.packet is not None else "emission"
    gamma_c = config.gamma_c
    span = settings.span or (8.0 if family == "emission" else 24.0)
    dk = settings.dk or gamma_c / 20.0
    if settings.t_final is not None:
        t_final = settings.t_final
    elif family == "emission":
        t_final = 10.0 / gamma_c
    else:
        t_final = 15.0 / min(gamma_c, 2.0 * config.packet.epsilon)
    n_phonon = settings.n_phonon_max or min(config.n_phonon_max, 16)
    f_max = max(n_phonon * 1.0, span, gamma_c)
    dt = settings.dt or 0.02 / f_max
    tolerance = settings.tolerance or (1e-2 if family == "emission" else 2e-2)
    return family, span, dk, dt, t_final, n_phonon, tolerance


def check_config(config: RunConfig) -> dict:
    """Run the analytic/oracle comparison; returns the report mapping."""
    from .emission import emission_spectrum
    from .model import NumberState
    from .oracle import (
        ContinuumGrid,
        emission_initial,
        integrate_amplitudes,
        oracle_spectrum,
        scattering_initial,
    )
    from .scattering import scattering_spectrum

    if not isinstance(config.mirror, NumberState):
        raise ConfigError(["mirror: oracle-check supports number states only"])
    params, trunc = _solver_inputs(config)
    family, span, dk, dt, t_final, n_phonon, tolerance = _resolved_oracle(config)
    n_modes = int(round(2.0 * span / dk)) + 1
    cont = ContinuumGrid(-span, span, n_modes)
    n0 = config.mirror.n0

    if family == "scattering":
        initial = scattering_initial(params, n0, config.packet, n_phonon, cont)
        analytic = scattering_spectrum(
            params, NumberState(n0), config.packet, cont.deltas, trunc,
            norm_warn_tolerance=1.0,
        )
    else:
        initial = emission_initial(params, n0, n_phonon, cont)
        analytic = emission_spectrum(
            params, NumberState(n0), cont.deltas, trunc, norm_warn_tolerance=1.0
        )
    final = integrate_amplitudes(params, initial, cont, t_final, dt)
    oracle = oracle_spectrum(final, cont)
    max_diff = float(abs(analytic.density - oracle.density).max())
    return {
        "family": family,
        "span": span,
        "dk": cont.dk,
        "dt": dt,
        "t_final": t_final,
        "oracle_n_phonon_max": n_phonon,
        "norm_drift": final.norm_drift,
        "max_abs_diff": max_diff,
        "tolerance": tolerance,
        "passed": max_diff <= tolerance,
        "grid": cont.deltas,
        "analytic_density": analytic.density,
        "oracle_density": oracle.density,
    }


# --- click wiring ---------------------------------------------------------


@click.group()
def cli():
    """Single-photon spectra of an optomechanical cavity."""


def _load_config(path: str) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _numerical_errors():
    from .errors import LaguerreRangeError, ParameterError, StepSizeError, TruncationError

    return (LaguerreRangeError, ParameterError, StepSizeError, TruncationError)


@cli.command("run")
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
def run_command(config_file):
    """Compute the spectrum described by CONFIG_FILE."""
    try:
        config = _load_config(config_file)
    except ConfigError as exc:
        for line in exc.errors:
            click.echo(f"config error: {line}", err=True)
        sys.exit(1)
    output = Path(config.output) if config.output else Path(config_file).with_suffix(".csv")
    try:
        csv_path, meta_path = run_config(config, output)
    except _numerical_errors() as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(2)
    click.echo(f"wrote {csv_path} and {meta_path}")


@cli.command("check")
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
def check_command(config_file):
    """Compare the closed-form spectrum with the ODE oracle."""
    try:
        config = _load_config(config_file)
    except ConfigError as exc:
        for line in exc.errors:
            click.echo(f"config error: {line}", err=True)
        sys.exit(1)
    try:
        report = check_config(config)
    except ConfigError as exc:
        for line in exc.errors:
            click.echo(f"config error: {line}", err=True)
        sys.exit(1)
    except _numerical_errors() as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(2)
    click.echo(
        f"{report['family']} check: max |S_analytic - S_oracle| = "
        f"{report['max_abs_diff']:.3e} (tolerance {report['tolerance']:.1e}, "
        f"t = {report['t_final']:g}, span = +-{report['span']:g}, "
        f"dk = {report['dk']:.4g}, norm drift = {report['norm_drift']:.2e})"
    )
    if config.output:
        lines = ["delta_k,S_analytic,S_oracle"]
        lines.extend(
            f"{_format(float(x))},{_format(float(a))},{_format(float(o))}"
            for x, a, o in zip(
                report["grid"], report["analytic_density"], report["oracle_density"]
            )
        )
        _write_lines(Path(config.output), lines)
        click.echo(f"wrote {config.output}")
    if not report["passed"]:
        click.echo("tolerance exceeded", err=True)
        sys.exit(3)


@cli.command("peaks")
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--min-height",
    default=DEFAULT_MIN_PEAK_HEIGHT,
    show_default=True,
    help="Ignore maxima below this fraction of the global maximum.",
)
def peaks_command(csv_file, min_height):
    """List extrema of a spectrum CSV written by `optospec run`."""
    import numpy as np

    from .peaks import detect_peaks
    from .spectrum import make_spectrum

    try:
        data = np.loadtxt(csv_file, delimiter=",", skiprows=1)
        if data.ndim != 2 or data.shape[1] < 2:
            raise ValueError("expected two columns: delta_k,S")
        spectrum = make_spectrum(data[:, 0], data[:, 1], {"mode": "csv"})
        found = detect_peaks(spectrum, min_height)
    except _numerical_errors() + (ValueError, OSError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(2)
    click.echo(f"{'location':>14} {'height':>14} {'width':>14} kind")
    for peak in found:
        kind = "dip" if peak.is_dip else "peak"
        click.echo(
            f"{peak.location:>14.6g} {peak.height:>14.6g} {peak.width:>14.6g} {kind}"
        )


def main(argv=None):
    """Console entry point; applies OPTOSPEC_THREADS before solver imports."""
    threads = os.environ.get("OPTOSPEC_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    cli(args=argv)


if __name__ == "__main__":
    main()
