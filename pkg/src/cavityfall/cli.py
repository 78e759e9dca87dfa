"""Command dispatch and reproducible output artifacts.

Commands (all scenario-driven, SI units in, SI units out):

    dispersion        (k_par, omega, v_g) CSV over a wavenumber grid
    freefall-analytic closed-form (t, y, v, k_y, phase gradient) CSV
    freefall-numeric  propagated envelope trace CSV plus run manifest
    fig2b             per-Q interference SNR CSVs plus summary JSON
    qthreshold        quality-factor bisection result plus iteration log

Every run writes its files atomically (temp file + rename) and finishes with
run_manifest.json: resolved parameters, derived quantities, and sha256
checksums of each artifact.  Re-running a command with the manifest's
resolved scenario reproduces the CSV bytes exactly.  Floats are printed as
shortest round-trip decimals to keep regression diffs clean.

Exit codes: 0 success, 2 validation error, 3 numerical-domain error, 4 I/O.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .dispersion import dispersion_table, effective_mass
from .errors import DomainError, ValidationError
from .gravity import freefall_trajectory, phase_gradient
from .interferometry import snr_trace, q_threshold
from .propagator import Grid1D, PropagationScenario, init_gaussian, propagate
from .scenario import ScenarioFile, load_scenario, scenario_to_dict
from .units import c, hbar, make_scaling, to_dimensionless

DEFAULT_Q_SWEEP = (3e10, 5e10, 7e10)
_FIG2B_SAMPLES = 2001
_DEFAULT_RECORDS = 256


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_csv(path: Path, header: tuple[str, ...], columns: list[np.ndarray]) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _require(scenario: ScenarioFile, command: str, *sections: str) -> None:
    for name in sections:
        if getattr(scenario, name) is None:
            raise ValidationError(f"{command} requires a '{name}' section in the scenario")


def _derived_block(scenario: ScenarioFile) -> dict:
    derived: dict = {}
    if scenario.cavity is not None:
        cav = scenario.cavity
        derived["omega0"] = cav.omega0
        derived["m_parallel"] = cav.rest_energy / c**2
        derived["m_s_parallel"] = effective_mass(cav)
    elif scenario.experiment is not None:
        exp = scenario.experiment
        derived["omega0"] = exp.omega0
        derived["m_parallel"] = hbar * exp.omega0 / c**2
        derived["m_s_parallel"] = exp.n_s**2 * hbar * exp.omega0 / c**2
    if scenario.gravity is not None:
        derived["g_tilde"] = scenario.gravity.g_tilde
    elif scenario.experiment is not None:
        derived["g_tilde"] = scenario.experiment.g / scenario.experiment.n_s**2
    return derived


def _recording_schedule(n_steps: int, stride: int) -> list[int]:
    steps = [0]
    steps += [i for i in range(stride, n_steps + 1, stride)]
    if steps[-1] != n_steps:
        steps.append(n_steps)
    return steps


def _resolve_stride(scenario: ScenarioFile, n_steps: int) -> int:
    if scenario.output.stride is not None:
        return scenario.output.stride
    return max(1, n_steps // _DEFAULT_RECORDS)


def _run_dispersion(scenario: ScenarioFile, out_dir: Path, args: dict) -> list[Path]:
    _require(scenario, "dispersion", "cavity")
    cav = scenario.cavity
    k_max = args["k_max"] if args["k_max"] is not None else 2.0 * cav.omega0 / cav.c_medium
    if not k_max > args["k_min"]:
        raise ValidationError(f"dispersion needs k_max > k_min, got {k_max!r} <= {args['k_min']!r}")
    args["k_max"] = k_max
    k_grid = np.linspace(args["k_min"], k_max, args["k_points"])
    points = dispersion_table(cav, k_grid)
    path = out_dir / "dispersion.csv"
    _write_csv(
        path,
        ("k_par", "omega", "v_g"),
        [k_grid, np.array([p.omega for p in points]), np.array([p.v_g for p in points])],
    )
    return [path]


def _run_freefall_analytic(scenario: ScenarioFile, out_dir: Path, stride: int, n_steps: int) -> list[Path]:
    cav, profile, prop = scenario.cavity, scenario.gravity, scenario.propagation
    times = np.array([i * prop.dt for i in _recording_schedule(n_steps, stride)])
    states = [freefall_trajectory(cav, profile, float(t)) for t in times]
    grads = np.array([phase_gradient(cav.omega0, profile, float(t)) for t in times])
    path = out_dir / "freefall_analytic.csv"
    _write_csv(
        path,
        ("t_si", "y_si", "v_si", "k_si", "phase_grad_si"),
        [
            times,
            np.array([s.y for s in states]),
            np.array([s.v for s in states]),
            np.array([s.k_y for s in states]),
            grads,
        ],
    )
    return [path]


def _run_freefall_numeric(
    scenario: ScenarioFile, out_dir: Path, stride: int, n_steps: int
) -> tuple[list[Path], dict]:
    cav, profile, prop = scenario.cavity, scenario.gravity, scenario.propagation
    scaling = make_scaling(mass=effective_mass(cav), length=prop.sigma0)
    grid = Grid1D(
        y_min=to_dimensionless(prop.y_min, "length", scaling),
        y_max=to_dimensionless(prop.y_max, "length", scaling),
        n_points=prop.n_points,
    )
    boundary = None
    if prop.boundary is not None:
        boundary = replace(
            prop.boundary,
            width=to_dimensionless(prop.boundary.width, "length", scaling),
            strength=prop.boundary.strength * scaling.T_ref,
        )
    dt_scaled = to_dimensionless(prop.dt, "time", scaling)
    run = PropagationScenario(
        mass=1.0,
        g_tilde=to_dimensionless(profile.g_tilde, "acceleration", scaling),
        dt=dt_scaled,
        t_final=n_steps * dt_scaled,
        record_stride=stride,
        boundary=boundary,
    )
    state = init_gaussian(grid, sigma0=to_dimensionless(prop.sigma0, "length", scaling))
    state.scaling = scaling
    _, trace = propagate(state, run)

    # exact SI recording times (multiples of the SI step), bit-identical to
    # the analytic command's time column
    times_si = np.array([i * prop.dt for i in _recording_schedule(n_steps, stride)])
    path = out_dir / "freefall_numeric.csv"
    _write_csv(
        path,
        ("t_si", "y_si", "sigma_si", "k_si", "norm", "energy_si", "phase_grad_si"),
        [
            times_si,
            trace.centroid * scaling.L_ref,
            trace.width * scaling.L_ref,
            trace.mean_k / scaling.L_ref,
            trace.norm,
            trace.energy * scaling.E_ref,
            trace.phase_gradient / scaling.L_ref,
        ],
    )
    convergence = {
        "dt_scaled": dt_scaled,
        "g_tilde_scaled": run.g_tilde,
        "n_steps": n_steps,
        "record_stride": stride,
        "splitting_order": 2,
        "norm_drift": float(np.max(np.abs(trace.norm - trace.norm[0]))),
        "energy_drift": float(np.max(np.abs(trace.energy - trace.energy[0]) / abs(trace.energy[0]))),
    }
    return [path], convergence


def _run_fig2b(scenario: ScenarioFile, out_dir: Path, args: dict) -> tuple[list[Path], dict]:
    _require(scenario, "fig2b", "experiment")
    base = scenario.experiment
    q_values = tuple(args["q_values"])
    if not q_values or any(q <= 0 for q in q_values):
        raise ValidationError(f"fig2b needs positive Q values, got {q_values!r}")
    paths: list[Path] = []
    traces_summary = []
    divergence = []
    for q in q_values:
        cfg = replace(base, Q=q)
        trace = snr_trace(cfg, n_samples=_FIG2B_SAMPLES)
        path = out_dir / f"fig2b_Q{q:g}.csv"
        _write_csv(path, ("t_si", "i_signal", "sn"), [trace.t, trace.i_signal, trace.sn])
        paths.append(path)
        traces_summary.append(
            {"Q": q, "t_peak": trace.t_peak, "sn_peak": trace.sn_peak, "t_cross": trace.t_cross}
        )
        peak_by_model = {
            model: snr_trace(replace(base, Q=q, width_model=model), n_samples=_FIG2B_SAMPLES).sn_peak
            for model in ("paper_verbatim", "corrected")
        }
        divergence.append(
            {
                "Q": q,
                "sn_peak_paper": peak_by_model["paper_verbatim"],
                "sn_peak_corrected": peak_by_model["corrected"],
                "peak_ratio": peak_by_model["paper_verbatim"] / peak_by_model["corrected"],
            }
        )
    summary_path = out_dir / "fig2b_summary.json"
    _write_json(
        summary_path,
        {
            "width_model": base.width_model,
            "n_samples": _FIG2B_SAMPLES,
            "traces": traces_summary,
            "width_model_divergence": divergence,
        },
    )
    paths.append(summary_path)
    return paths, {"q_values": list(q_values)}


def _run_qthreshold(scenario: ScenarioFile, out_dir: Path, args: dict) -> tuple[list[Path], dict]:
    _require(scenario, "qthreshold", "experiment")
    result = q_threshold(scenario.experiment, args["q_lo"], args["q_hi"])
    iterations = np.array(result.iterations)
    log_path = out_dir / "qthreshold_iterations.csv"
    _write_csv(
        log_path,
        ("iteration", "q_lo", "q_hi", "q_mid", "sn_peak_mid"),
        [
            np.arange(len(result.iterations), dtype=float),
            iterations[:, 0],
            iterations[:, 1],
            iterations[:, 2],
            iterations[:, 3],
        ],
    )
    result_path = out_dir / "qthreshold_result.json"
    _write_json(
        result_path,
        {
            "q_lo": args["q_lo"],
            "q_hi": args["q_hi"],
            "q_min": result.q_min,
            "sn_peak": result.sn_peak,
            "n_iterations": len(result.iterations),
        },
    )
    return [log_path, result_path], {"q_lo": args["q_lo"], "q_hi": args["q_hi"]}


def run(
    command: str,
    scenario: ScenarioFile,
    out_dir,
    *,
    width_model: str | None = None,
    q_values=None,
    q_lo: float = 1e9,
    q_hi: float = 1e12,
    k_min: float = 0.0,
    k_max: float | None = None,
    k_points: int = 256,
    quiet: bool = True,
) -> dict:
    """Execute one command against a validated scenario; returns the manifest."""
    started = time.perf_counter()
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)

    if width_model is not None:
        if scenario.experiment is None:
            raise ValidationError(f"--width-model given but {command} scenario has no experiment section")
        canonical = {"paper": "paper_verbatim", "paper_verbatim": "paper_verbatim", "corrected": "corrected"}
        if width_model not in canonical:
            raise ValidationError(f"unknown width model {width_model!r}")
        scenario = replace(scenario, experiment=replace(scenario.experiment, width_model=canonical[width_model]))

    command_args: dict = {}
    convergence: dict | None = None
    resolved_stride = scenario.output.stride

    if command == "dispersion":
        command_args = {"k_min": k_min, "k_max": k_max, "k_points": k_points}
        outputs = _run_dispersion(scenario, out_path, command_args)
    elif command in ("freefall-analytic", "freefall-numeric"):
        _require(scenario, command, "cavity", "gravity", "propagation")
        prop = scenario.propagation
        n_steps = int(round(prop.t_final / prop.dt))
        if n_steps < 1:
            raise ValidationError("propagation.t_final: must cover at least one step")
        resolved_stride = _resolve_stride(scenario, n_steps)
        if command == "freefall-analytic":
            outputs = _run_freefall_analytic(scenario, out_path, resolved_stride, n_steps)
        else:
            outputs, convergence = _run_freefall_numeric(scenario, out_path, resolved_stride, n_steps)
    elif command == "fig2b":
        command_args = {"q_values": list(q_values if q_values is not None else DEFAULT_Q_SWEEP)}
        outputs, command_args = _run_fig2b(scenario, out_path, command_args)
    elif command == "qthreshold":
        outputs, command_args = _run_qthreshold(scenario, out_path, {"q_lo": q_lo, "q_hi": q_hi})
    else:
        raise ValidationError(f"unknown command {command!r}")

    manifest = {
        "tool": "cavityfall",
        "version": __version__,
        "command": command,
        "command_args": command_args,
        "resolved_scenario": scenario_to_dict(scenario, resolved_stride=resolved_stride),
        "derived": _derived_block(scenario),
        "outputs": [
            {"file": p.name, "sha256": _sha256(p), "bytes": p.stat().st_size} for p in outputs
        ],
        "duration_s": time.perf_counter() - started,
    }
    if convergence is not None:
        manifest["convergence"] = convergence
    manifest_path = out_path / "run_manifest.json"
    _write_json(manifest_path, manifest)

    if not quiet:
        for p in outputs:
            print(f"wrote {p}")
        print(f"wrote {manifest_path}")
    return manifest


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityfall",
        description="Massive cavity photons: dispersion, gravitational free fall, interferometer SNR.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", required=True, help="path to a JSON scenario file (SI units)")
        p.add_argument("--out", default=None, help="output directory (default: scenario output.directory)")
        p.add_argument("--quiet", action="store_true", help="suppress per-file progress lines")

    p_disp = sub.add_parser("dispersion", help="dump (k_par, omega, v_g) over a wavenumber grid")
    common(p_disp)
    p_disp.add_argument("--k-min", type=float, default=0.0)
    p_disp.add_argument("--k-max", type=float, default=None, help="default: 2*omega0/c_medium")
    p_disp.add_argument("--k-points", type=int, default=256)

    common(sub.add_parser("freefall-analytic", help="closed-form free-fall trace"))
    common(sub.add_parser("freefall-numeric", help="propagated envelope free-fall trace"))

    p_fig = sub.add_parser("fig2b", help="interference SNR traces over a Q sweep")
    common(p_fig)
    p_fig.add_argument("--width-model", choices=("paper", "corrected"), default=None)
    p_fig.add_argument("--q", type=float, nargs="+", default=None, help="Q sweep (default: 3e10 5e10 7e10)")

    p_qt = sub.add_parser("qthreshold", help="bisect for the smallest Q with peak SNR >= 1")
    common(p_qt)
    p_qt.add_argument("--width-model", choices=("paper", "corrected"), default=None)
    p_qt.add_argument("--q-lo", type=float, default=1e9)
    p_qt.add_argument("--q-hi", type=float, default=1e12)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        out_dir = args.out if args.out is not None else scenario.output.directory
        run(
            args.command,
            scenario,
            out_dir,
            width_model=getattr(args, "width_model", None),
            q_values=getattr(args, "q", None),
            q_lo=getattr(args, "q_lo", 1e9),
            q_hi=getattr(args, "q_hi", 1e12),
            k_min=getattr(args, "k_min", 0.0),
            k_max=getattr(args, "k_max", None),
            k_points=getattr(args, "k_points", 256),
            quiet=args.quiet,
        )
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"numerical-domain error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
