"""
Named experiments behind the CLI: sweep orchestration, worker fan-out, and
CSV/JSON emission.

Sweep rows may be computed by a thread pool (size from CONTPHASE_WORKERS,
all cores when unset), but results are buffered and written in ascending k
order, so output bytes do not depend on the worker count.  CSV bodies are
byte-identical across runs of the same config; only the '# timestamp' header
comment varies.
"""

from __future__ import annotations

import datetime
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, ResultRecord, config_digest
from .core import NumericsError, QuadratureScheme, SpectralBand, TimeWindow
from .dirac import (
    DiracContinuumModel,
    constant_theta_circle,
    solid_angle,
    spherical_parameters,
)
from .engine import geometric_phase
from .oracles import (
    BoxDiscretization,
    TwoLevelSystem,
    adiabatic_phase_from_evolution,
    box_berry_phase,
    kernel_x_quadrature,
)
from .reflectionless import (
    ReflectionlessParameters,
    connection_kernel_smooth,
    crossing_model,
    crossing_sweep,
    extrapolated_crossing_phase,
    reflectionless_phase_closed_form,
    transmission_phase_exact,
)
from .scattering import reflectionless_split, s_matrix_eigenvalue

__all__ = ["run_experiment", "write_record", "worker_count",
           "REFLECTIONLESS_COLUMNS", "DIRAC_COLUMNS", "ORACLE_COLUMNS"]

WORKERS_ENV = "CONTPHASE_WORKERS"

# normative column contracts consumed by the plotting component
REFLECTIONLESS_COLUMNS = ("k", "gamma_geo_closed", "gamma_geo_numeric",
                          "delta0_rad", "delta_exact_rad", "abs_diff",
                          "est_error")
DIRAC_COLUMNS = ("theta", "omega_solid", "gamma_geo_numeric",
                 "gamma_geo_closed", "abs_diff")
ORACLE_COLUMNS = ("criterion", "measured", "target", "passed")


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {n}")
    return n


def _map_ordered(fn: Callable, items: Sequence) -> list:
    """Apply fn across items on a pool; results come back in input order."""
    n = min(worker_count(), len(items)) or 1
    if n == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _require_sweep(cfg: ExperimentConfig) -> SpectralBand:
    if cfg.sweep is None:
        raise ConfigError(f"experiment {cfg.experiment!r} requires a sweep section")
    return cfg.sweep


def _check_excluded_band(ks: np.ndarray, k1: float) -> None:
    bad = [float(k) for k in ks if abs(k) < k1 or k == 0.0]
    if bad:
        raise ConfigError(
            f"sweep enters the discrete-spectrum region |k| < k1 = {k1} "
            f"(or k = 0): offending k = {bad}")


def _rows_reflectionless(cfg: ExperimentConfig) -> tuple[tuple, ...]:
    m = cfg.model
    ks = _require_sweep(cfg).values()
    _check_excluded_band(ks, m["k1"])

    def row(k: float) -> tuple:
        closed = reflectionless_phase_closed_form(
            _params_static(m), k, cfg.constants)
        res = extrapolated_crossing_phase(
            m["k1"], m["mass"], k, cfg.scheme,
            base_half_length=m["half_length"], constants=cfg.constants)
        numeric = res.gamma_geometric
        delta0 = closed / cfg.constants.hbar
        delta = transmission_phase_exact(_params_static(m), k)
        return (float(k), closed, numeric, delta0, delta,
                abs(closed - numeric), res.estimated_error)

    return tuple(_map_ordered(row, [float(k) for k in ks]))


def _params_static(model_cfg: dict) -> ReflectionlessParameters:
    path, dot = crossing_sweep(model_cfg["half_length"])
    return ReflectionlessParameters(k1=model_cfg["k1"], mass=model_cfg["mass"],
                                    x0_path=path, x0_dot=dot)


def _rows_smatrix(cfg: ExperimentConfig) -> tuple[tuple, ...]:
    m = cfg.model
    ks = _require_sweep(cfg).values()
    _check_excluded_band(ks, m["k1"])

    def row(k: float) -> tuple:
        split = reflectionless_split(m["k1"], m["mass"], m["half_length"],
                                     cfg.constants)
        s = s_matrix_eigenvalue(split, k, cfg.scheme)
        res = geometric_phase(split.full_model, k, split.window, cfg.scheme)
        if s.phase_rad != res.phase_geometric_rad:
            raise NumericsError("S-matrix phase diverged from the engine's "
                                "geometric phase on the same model")
        closed = reflectionless_phase_closed_form(_params_static(m), k,
                                                  cfg.constants)
        numeric = s.phase_rad * cfg.constants.hbar
        delta = transmission_phase_exact(_params_static(m), k)
        return (float(k), closed, numeric, closed / cfg.constants.hbar, delta,
                abs(closed - numeric), res.estimated_error)

    return tuple(_map_ordered(row, [float(k) for k in ks]))


def _rows_dirac(cfg: ExperimentConfig) -> tuple[tuple, ...]:
    m = cfg.model
    window = TimeWindow(0.0, 1.0)
    hbar = cfg.constants.hbar

    def row(theta: float) -> tuple:
        path = constant_theta_circle(theta, omega0=m["omega0"], window=window)
        params = spherical_parameters(path, m["k"], branch=m["branch"],
                                      sigma3_sector=m["sigma3_sector"],
                                      constants=cfg.constants)
        model = DiracContinuumModel(params, cfg.constants)
        res = geometric_phase(model, m["k"], window, cfg.scheme)
        omega = solid_angle(path, window, cfg.scheme)
        closed = -0.5 * hbar * omega
        return (float(theta), omega, res.gamma_geometric, closed,
                abs(res.gamma_geometric - closed))

    return tuple(row(t) for t in m["thetas"])


def _rows_oracle(cfg: ExperimentConfig) -> tuple[tuple, ...]:
    m = cfg.model
    k1, mass = m["k1"], m["mass"]
    rows = []

    # closed-form kernel vs direct spatial quadrature
    path, dot = crossing_sweep(16.0)
    params = ReflectionlessParameters(k1=k1, mass=mass, x0_path=path, x0_dot=dot)
    worst = 0.0
    for q in (0.5, 1.0, 2.0):
        for k in (1.3 * k1, 2.5 * k1, 5.0 * k1):
            a = connection_kernel_smooth(params, k - q, k, 0.37, cfg.constants)
            b = kernel_x_quadrature(params, k - q, k, 0.37,
                                    truncation=cfg.scheme.space_truncation * 2,
                                    points=cfg.scheme.space_points,
                                    constants=cfg.constants)
            worst = max(worst, abs(a - b))
    rows.append(("kernel-certification", worst, 1e-8, worst < 1e-8))

    # box sum vs closed form at k = k1
    model = crossing_model(k1, mass, 50.0, cfg.constants)
    band = SpectralBand(k1 - cfg.scheme.kprime_truncation,
                        k1 + cfg.scheme.kprime_truncation, 2)
    g = box_berry_phase(model, band, BoxDiscretization(200.0, 2000),
                        TimeWindow(0.0, 1.0), cfg.scheme)
    target = reflectionless_phase_closed_form(params, k1, cfg.constants)
    diff = abs(g - target)
    rows.append(("box-sum-vs-closed-form", diff, 1e-3, diff < 1e-3))

    # two-level adiabatic convergence on a pi/3 circuit
    window = TimeWindow(0.0, 1.0)
    circle = constant_theta_circle(np.pi / 3, omega0=1.0, window=window)
    dparams = spherical_parameters(circle, 1.0, branch=-1,
                                   constants=cfg.constants)
    from .dirac import dirac_two_level_hamiltonian

    h = dirac_two_level_hamiltonian(dparams, 1.0, cfg.constants)
    errs = []
    for slowness in (100.0, 200.0):
        sys = TwoLevelSystem(hamiltonian=h, slowness=slowness,
                             constants=cfg.constants)
        ph = adiabatic_phase_from_evolution(sys, ode_steps=int(50 * slowness))
        expected = -0.5 * solid_angle(circle, window, cfg.scheme)
        errs.append(abs(ph - expected))
    ok = errs[1] < 0.6 * errs[0] and errs[1] < 0.02
    rows.append(("two-level-adiabatic", errs[1], 0.02, ok))
    return tuple(rows)


_RUNNERS = {
    "reflectionless-phase": (_rows_reflectionless, REFLECTIONLESS_COLUMNS),
    "smatrix-compare": (_rows_smatrix, REFLECTIONLESS_COLUMNS),
    "dirac-circuit": (_rows_dirac, DIRAC_COLUMNS),
    "oracle-verify": (_rows_oracle, ORACLE_COLUMNS),
}


def run_experiment(cfg: ExperimentConfig) -> ResultRecord:
    """Execute the configured experiment and return its rows + provenance.

    Deterministic for identical configs regardless of worker count.
    """
    runner, columns = _RUNNERS[cfg.experiment]
    rows = runner(cfg)
    return ResultRecord(
        experiment=cfg.experiment,
        config=cfg.to_dict(),
        config_digest=config_digest(cfg),
        tool_version=__version__,
        columns=columns,
        rows=rows,
        generated_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_record(record: ResultRecord, path: str, fmt: str) -> None:
    """Write CSV (comment header, then normative columns) or JSON."""
    if fmt == "csv":
        lines = [
            f"# contphase {record.tool_version}",
            f"# experiment: {record.experiment}",
            f"# config-digest: {record.config_digest}",
            f"# timestamp: {record.generated_at}",
        ]
        # well scale travels with sweep tables so plots can mark the
        # discrete-spectrum band without recomputing anything
        if "k1" in record.config.get("model", {}):
            lines.append(f"# k1: {record.config['model']['k1']!r}")
        lines.append(",".join(record.columns))
        for row in record.rows:
            lines.append(",".join(_cell(v) for v in row))
        body = "\n".join(lines) + "\n"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
    elif fmt == "json":
        import json

        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(record.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
