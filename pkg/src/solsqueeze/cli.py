"""Batch driver: config-driven sweeps, the validation suite, and mode dumps.

Subcommands:
    simulate <config>   run the configured sweep, emit CSV/JSON rows
    validate <config>   run the cross-module invariant suite, exit nonzero on failure
    modes <config>      dump sampled discrete modes and adjoints as CSV

Exit codes: 0 success, 1 config error, 2 physics-invariant violation, 3 I/O.
Output files are deterministic for a fixed config (fixed 9-significant-digit
formatting, ordering restored after any parallel dispatch).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import __version__
from .cascade import (
    SqueezedInputModel,
    StageChain,
    StageSpec,
    advance_model,
    maps_for_lengths,
    run_dss,
    reduce_stages,
)
from .config import (
    ExperimentConfig,
    FilterSpec,
    config_hash,
    load_config,
)
from .errors import (
    ConfigError,
    GridMismatchError,
    InvariantViolation,
    RealizabilityError,
    UnphysicalStateError,
)
from .filters import (
    SpectralFilter,
    apply_filter,
    calibrate_bandwidth,
    custom_filter,
    identity_filter,
    parabolic_filter,
)
from .grid import ComplexField, SampledGrid, inner_product_re, make_grid
from .measurement import squeezing, squeezing_db
from .propagator import (
    apply_map,
    boundary_contamination,
    compose_maps,
    physicality_floor,
    propagate_map,
    soliton_period_to_xi,
    symplectic_residual,
    vacuum_state,
)
from .soliton import (
    MODE_NAMES,
    discrete_modes,
    gram_matrix,
    mean_field,
    mode_evolution_check,
)

JOBS_ENV = "SOLSQUEEZE_JOBS"


# ---------------------------------------------------------------- building


def build_grid(cfg: ExperimentConfig) -> SampledGrid:
    return make_grid(cfg.n_points, cfg.window)


def build_filter(spec: FilterSpec, grid: SampledGrid, config_dir: Path) -> SpectralFilter:
    if spec.kind == "identity":
        return identity_filter(grid)
    if spec.kind == "parabolic":
        eta = spec.eta if spec.eta is not None else calibrate_bandwidth(grid, spec.loss)
        return parabolic_filter(grid, eta)
    # custom table: rows of omega, Re H, Im H; linear interpolation, zero outside
    path = Path(spec.table)
    if not path.is_absolute():
        path = config_dir / path
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [float(x) for x in line.replace(",", " ").split()]
        if len(parts) == 2:
            parts.append(0.0)
        if len(parts) != 3:
            raise ConfigError(f"filter table {path}: expected 'omega, ReH, ImH' rows")
        rows.append(parts)
    if not rows:
        raise ConfigError(f"filter table {path} is empty")
    table = np.array(sorted(rows))
    w = grid.frequencies
    re = np.interp(w, table[:, 0], table[:, 1], left=0.0, right=0.0)
    im = np.interp(w, table[:, 0], table[:, 2], left=0.0, right=0.0)
    return custom_filter(grid, re + 1j * im, label=str(spec.table))


def build_stages(cfg: ExperimentConfig, grid: SampledGrid, config_dir: Path) -> List[StageSpec]:
    return [
        StageSpec(entry.length, build_filter(entry.filter, grid, config_dir))
        for entry in cfg.stages
    ]


# ---------------------------------------------------------------- simulate


def _measure_final_stage(payload: dict) -> Tuple[float, float, float]:
    """Kernel assembly and measurement for one sweep point (pool worker)."""
    grid = make_grid(payload["n_points"], payload["window"])
    from .propagator import BogoliubovMap

    bmap = BogoliubovMap(grid, payload["block_a"], payload["block_b"], payload["xi"])
    state = apply_map(bmap, vacuum_state(grid))
    model = SqueezedInputModel(
        payload["r"], ComplexField(grid, payload["delta_a0"])
    )
    filt = SpectralFilter(grid, payload["transfer"], ("custom", "sweep"))
    chain = StageChain(
        (StageSpec(0.0, identity_filter(grid)), StageSpec(payload["length"], filt))
    )
    points, _ = run_dss(
        chain,
        grid,
        input_model=model,
        maps={payload["length"]: bmap},
    )
    p = points[0]
    return p.length_soliton_periods, p.s_value, p.db


def sweep_rows(cfg: ExperimentConfig, config_dir: Path, jobs: int = 1) -> List[Tuple[float, float, float]]:
    """(length, S, dB) rows for the configured sweep, in config order."""
    grid = build_grid(cfg)
    stages = build_stages(cfg, grid, config_dir)
    idx = cfg.sweep_stage_index
    values = [float(v) for v in cfg.sweep_lengths]
    if not values:
        raise ConfigError("sweep lengths are empty")

    if idx == len(stages) - 1:
        # shared-map fast path: reduce the fixed prefix once, sweep the last stage
        _, model = reduce_stages(stages[:-1], grid, cfg.backend, cfg.step)
        maps = maps_for_lengths(grid, values, cfg.backend, cfg.step)
        final = stages[-1]
        if jobs > 1:
            payloads = [
                {
                    "n_points": cfg.n_points,
                    "window": cfg.window,
                    "block_a": maps[v].block_a,
                    "block_b": maps[v].block_b,
                    "xi": maps[v].length_xi,
                    "length": v,
                    "transfer": np.asarray(final.filter.transfer),
                    "r": model.r,
                    "delta_a0": model.delta_a0.samples,
                }
                for v in values
            ]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_measure_final_stage, payloads))
            return rows
        chain = StageChain((StageSpec(0.0, identity_filter(grid)), final))
        points, _ = run_dss(
            chain, grid, sweep_lengths=values, input_model=model, maps=maps
        )
        return [(p.length_soliton_periods, p.s_value, p.db) for p in points]

    # sweeping an upstream stage: re-characterize the chain per point
    rows = []
    swept_maps = maps_for_lengths(grid, values, cfg.backend, cfg.step)
    for v in values:
        model = SqueezedInputModel.coherent(grid)
        s_out = None
        for k, stage in enumerate(stages):
            here = StageSpec(v, stage.filter) if k == idx else stage
            bmap = swept_maps[v] if k == idx else None
            s_out, model = advance_model(model, here, grid, bmap, cfg.backend, cfg.step)
        rows.append((v, s_out, squeezing_db(s_out)))
    return rows


def format_float(x: float) -> str:
    return f"{x:.9g}"


def emit_rows(cfg: ExperimentConfig, rows, destination: Path, fmt: str) -> None:
    meta = {
        "generator": f"solsqueeze {__version__}",
        "config_hash": config_hash(cfg),
        "numpy": np.__version__,
    }
    if fmt == "csv":
        lines = [f"# {k}={v}" for k, v in meta.items()]
        lines.append("length_soliton_periods,s_value,squeezing_db")
        for length, s, db in rows:
            lines.append(",".join(format_float(x) for x in (length, s, db)))
        destination.write_text("\n".join(lines) + "\n")
    else:
        doc = {
            "meta": meta,
            "points": [
                {"length_soliton_periods": length, "s_value": s, "squeezing_db": db}
                for length, s, db in rows
            ],
        }
        destination.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def run_simulate(cfg: ExperimentConfig, config_dir: Path, output=None, fmt=None, jobs=1) -> int:
    fmt = fmt or cfg.output_format
    destination = Path(output) if output else Path(cfg.output_path)
    rows = sweep_rows(cfg, config_dir, jobs=jobs)
    emit_rows(cfg, rows, destination, fmt)
    print(f"wrote {len(rows)} sweep points to {destination}")
    return 0


# ---------------------------------------------------------------- validate


class _Suite:
    def __init__(self):
        self.lines: List[Tuple[str, bool, str]] = []

    def check(self, name: str, ok: bool, detail: str):
        self.lines.append((name, bool(ok), detail))

    def report(self) -> int:
        width = max(len(name) for name, _, _ in self.lines)
        failures = 0
        for name, ok, detail in self.lines:
            status = "PASS" if ok else "FAIL"
            if not ok:
                failures += 1
            print(f"{status}  {name.ljust(width)}  {detail}")
        print(f"{len(self.lines) - failures}/{len(self.lines)} checks passed")
        return 0 if failures == 0 else 2


def run_validate(cfg: ExperimentConfig, config_dir: Path) -> int:
    suite = _Suite()
    grid = build_grid(cfg)
    stages = build_stages(cfg, grid, config_dir)  # realizability enforced here
    mean = mean_field(grid)

    # transforms and quadrature
    rng = np.random.default_rng(7)
    probe = ComplexField(grid, rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(grid.n_points))
    from .grid import forward_transform, inverse_transform

    roundtrip = np.abs(inverse_transform(forward_transform(probe)).samples - probe.samples).max()
    rel = roundtrip / np.abs(probe.samples).max()
    suite.check("transform_roundtrip", rel <= 1e-12, f"relative residual {rel:.2e} (<= 1e-12)")
    two = inner_product_re(mean.envelope, mean.envelope)
    suite.check("soliton_quadrature", abs(two - 2.0) <= 1e-8, f"|int sech^2 - 2| = {abs(two-2):.2e}")

    # mode basis
    modes = discrete_modes(grid, validate=False)
    gram = gram_matrix(modes)
    gram_res = np.abs(gram - np.eye(4)).max()
    suite.check("mode_orthogonality", gram_res <= 1e-6, f"Gram residual {gram_res:.2e} (<= 1e-6)")

    # propagation maps on the config grid
    xi_full = soliton_period_to_xi(3.0)
    cache: Dict[float, object] = {}

    def propagate_cached(xi: float):
        key = round(float(xi), 12)
        if key not in cache:
            cache[key] = propagate_map(grid, xi)
        return cache[key]

    map_full = propagate_cached(xi_full)
    sym = symplectic_residual(map_full)
    suite.check("symplectic", sym <= 1e-8, f"residual {sym:.2e} at 3 periods (<= 1e-8)")

    a, b = propagate_cached(0.4), propagate_cached(0.35)
    ab = compose_maps(a, b)
    direct = propagate_cached(0.75)
    comp = max(
        np.abs(ab.block_a - direct.block_a).max(), np.abs(ab.block_b - direct.block_b).max()
    )
    suite.check("composition", comp <= 1e-8, f"semigroup residual {comp:.2e} (<= 1e-8)")

    try:
        report = mode_evolution_check(modes, propagate_cached, xi_full)
        suite.check(
            "mode_conservation",
            True,
            f"V_number/V_momentum residual {report.conservation_residual:.2e} (<= 1e-4); "
            f"secular dV_phase/dxi per V_number = {report.secular_coefficients['phase_per_number']:.4f}, "
            f"dV_time/dxi per V_momentum = {report.secular_coefficients['time_per_momentum']:.4f}",
        )
    except InvariantViolation as exc:
        suite.check("mode_conservation", False, str(exc))

    # backend cross-check on a coarse auxiliary grid; dt >= 0.5 keeps the
    # fixed-step RK4 truncation error under the 1e-6 agreement budget
    aux_n = 2 ** int(np.floor(np.log2(max(8.0, 4.0 * cfg.window))))
    aux = make_grid(max(8, min(cfg.n_points, 64, aux_n)), cfg.window)
    xi_check = soliton_period_to_xi(3.0)
    m_exp = propagate_map(aux, xi_check, "matrix_exponential")
    m_rk4 = propagate_map(aux, xi_check, "stepped_rk4", step=cfg.step)
    gap = max(
        np.abs(m_exp.block_a - m_rk4.block_a).max(),
        np.abs(m_exp.block_b - m_rk4.block_b).max(),
    )
    suite.check(
        "backend_equivalence",
        gap <= 1e-6,
        f"expm vs rk4(step={cfg.step:g}) differ by {gap:.2e} at 3 periods on "
        f"{aux.n_points}-point grid (<= 1e-6)",
    )

    # conservation: identity filter keeps S = 1 at any length
    ident = identity_filter(grid)
    worst = 0.0
    for periods in (0.5, 1.0, 2.0, 3.0):
        bmap = propagate_cached(soliton_period_to_xi(periods))
        state = apply_map(bmap, vacuum_state(grid))
        worst = max(worst, abs(squeezing(state, ident, mean) - 1.0))
    suite.check("number_conservation", worst <= 1e-4, f"|S - 1| = {worst:.2e} unfiltered (<= 1e-4)")

    # vacuum fixed point of every configured filter
    vac_gap = 0.0
    for stage in stages:
        filtered, _ = apply_filter(stage.filter, vacuum_state(grid), mean)
        vac_gap = max(
            vac_gap,
            np.abs(filtered.moment_nn).max(),
            np.abs(filtered.moment_aa).max(),
            abs(squeezing(filtered, stage.filter, mean) - 1.0),
        )
    suite.check("vacuum_fixed_point", vac_gap <= 1e-10, f"residual {vac_gap:.2e} (<= 1e-10)")

    # physicality and boundary contamination of the worst-case propagated state
    state = apply_map(map_full, vacuum_state(grid))
    floor = physicality_floor(state) * grid.dt
    suite.check("physicality", floor >= -1e-8, f"min moment eigenvalue {floor:.2e} x (1/dt) (>= -1e-8)")
    contamination = boundary_contamination(state)
    raw_edge = _raw_edge_fraction(state)
    suite.check(
        "boundary_energy",
        contamination <= 1e-6,
        f"detection-weighted edge fraction {contamination:.2e} (<= 1e-6); raw edge fraction {raw_edge:.2e}",
    )

    # degenerate cascade: coherent-input reduction reproduces the single stage
    gap7 = 0.0
    filt = stages[0].filter
    from .cascade import run_sss

    for periods in (0.5, 1.5, 3.0):
        bmap = propagate_cached(soliton_period_to_xi(periods))
        s_single, _ = run_sss(StageSpec(periods, filt), grid, bmap)
        chain = StageChain((StageSpec(0.0, identity_filter(grid)), StageSpec(periods, filt)))
        points, _ = run_dss(
            chain,
            grid,
            input_model=SqueezedInputModel.coherent(grid),
            maps={periods: bmap},
        )
        gap7 = max(gap7, abs(points[0].s_value - s_single))
    suite.check("cascade_degeneracy", gap7 <= 1e-8, f"|S_dss(r=0) - S_sss| = {gap7:.2e} (<= 1e-8)")

    return suite.report()


def _raw_edge_fraction(state) -> float:
    tau = state.grid.times
    density = np.abs(np.diag(state.moment_nn).real) + np.abs(state.mean.samples) ** 2
    edge = np.abs(tau) >= 0.9 * state.grid.window
    total = density.sum()
    return float(density[edge].sum() / total) if total else 0.0


# ---------------------------------------------------------------- modes


def run_modes(cfg: ExperimentConfig, output=None) -> int:
    grid = build_grid(cfg)
    modes = discrete_modes(grid)
    destination = Path(output) if output else Path("modes.csv")
    columns = ["tau"]
    for name in MODE_NAMES:
        columns += [f"f_{name}_re", f"f_{name}_im"]
    for name in MODE_NAMES:
        columns += [f"adj_{name}_re", f"adj_{name}_im"]
    lines = [
        f"# solsqueeze {__version__} sampled soliton perturbation modes",
        "# f_<name>: discrete modes; adj_<name>: adjoint modes; inner product Re int f adj* dtau",
        ",".join(columns),
    ]
    for j in range(grid.n_points):
        row = [grid.times[j]]
        for name in MODE_NAMES:
            v = modes.modes[name].samples[j]
            row += [v.real, v.imag]
        for name in MODE_NAMES:
            v = modes.adjoints[name].samples[j]
            row += [v.real, v.imag]
        # full precision: downstream checks recompute inner products from the dump
        lines.append(",".join(repr(float(x)) for x in row))
    destination.write_text("\n".join(lines) + "\n")
    print(f"wrote mode profiles to {destination}")
    return 0


# ---------------------------------------------------------------- entry


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solsqueeze",
        description="Soliton photon-number squeezing simulator (batch driver)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "run the configured sweep and write data rows"),
        ("validate", "run the physics invariant suite"),
        ("modes", "dump sampled perturbation modes as CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to the TOML experiment config")
        p.add_argument("--output", help="override the output path")
        p.add_argument("--format", choices=("csv", "json"), help="override the output format")
        p.add_argument(
            "--jobs",
            type=int,
            default=int(os.environ.get(JOBS_ENV, "1")),
            help=f"worker processes for sweep points (default ${JOBS_ENV} or 1)",
        )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        config_dir = Path(args.config).resolve().parent
        if args.command == "simulate":
            return run_simulate(cfg, config_dir, args.output, args.format, max(1, args.jobs))
        if args.command == "validate":
            return run_validate(cfg, config_dir)
        return run_modes(cfg, args.output)
    except (RealizabilityError, UnphysicalStateError, InvariantViolation) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, GridMismatchError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
