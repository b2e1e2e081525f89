"""Config-driven runs: each writes its data files and then ``manifest.json``."""
from __future__ import annotations

import math
import os
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import analytic as an
from . import diagnostics as dg
from . import io
from . import potentials as pot
from .config import RunConfig
from .exceptions import ConfigError
from .propagator import EvolutionConfig, evolve
from .stability import DEVIATION_DEFINITION, stability_run

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1
THREADS_ENV = "DROPLET_FALL_THREADS"


def max_workers() -> int:
    """Parallelism cap from ``DROPLET_FALL_THREADS`` (unset or 0 = all CPUs)."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError(f"{THREADS_ENV} must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def write_manifest(out_dir, command: str, files, started: float, *, resolved_config=None,
                   convention=None, entropy_variant=None, extra=None) -> dict:
    """Write the manifest last; its presence marks a completed run."""
    out_dir = Path(out_dir)
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "software": {"name": "droplet-fall", "version": __version__},
        "command": command,
        "convention": convention,
        "entropy_variant": entropy_variant,
        "stability_definition": DEVIATION_DEFINITION,
        "duration_s": round(time.perf_counter() - started, 6),
        "files": io.file_inventory(out_dir, files),
    }
    if resolved_config is not None:
        manifest["resolved_config"] = resolved_config
    if extra:
        manifest.update(extra)
    io.write_json(out_dir / MANIFEST_NAME, manifest)
    return manifest


def _prepare(cfg: RunConfig) -> Path:
    out = Path(cfg.values["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    stale = out / MANIFEST_NAME
    if stale.exists():
        stale.unlink()
    return out


def _entropy_variant(cfg: RunConfig) -> dict:
    kw = cfg.entropy_kwargs()
    w = kw["window"]
    return {"normalize": kw["normalize"], "window": list(w) if w else None,
            "base": cfg.values["diagnostics"]["entropy"]["base"]}


def _finish(cfg, command, files, started, extra=None) -> dict:
    return write_manifest(cfg.values["output_dir"], command, files, started,
                          resolved_config=cfg.to_dict(),
                          convention=cfg.values["droplet"]["convention"],
                          entropy_variant=_entropy_variant(cfg), extra=extra)


def _probe_header(xs) -> list[str]:
    return [f"rho@{x:g}" for x in xs]


def run(cfg: RunConfig) -> dict:
    """Seed the closed-form droplet, evolve it and write every requested output.

    Files: ``series.csv`` (norm, moments, entropy per record), ``trajectory.csv``
    (recorded against predicted center of mass), ``probes.csv`` when probe
    positions are configured, ``field_final.csv`` and, with
    ``evolution.snapshot_every = k > 0``, every k-th record under ``fields/``.
    """
    started = time.perf_counter()
    out = _prepare(cfg)
    state, grid, spec = cfg.state, cfg.grid, cfg.potential
    ecfg = cfg.evolution_config()
    probes = list(cfg.values["diagnostics"]["probes"])
    every = cfg.values["evolution"]["snapshot_every"]
    ent_kw = cfg.entropy_kwargs()

    s_rho, probe_rows, files, last = [], [], [], {}

    def observe(t, psi):
        idx = len(s_rho)
        s_rho.append(dg.shannon_entropy(psi, **ent_kw))
        if probes:
            probe_rows.append(np.atleast_1d(dg.density_at(psi, probes)))
        if every and idx % every == 0:
            files.append(io.write_field(out / "fields" / f"field_{idx:06d}.csv", psi))
        last["psi"] = psi

    psi0 = an.full_wavefunction(state, grid, 0.0)
    record = evolve(psi0, spec, ecfg, observers=[observe])
    arr = record.as_arrays()
    files.append(io.write_series(out / "series.csv", arr["t"], arr["norm"], arr["x_cm"],
                                 arr["x_peak"], s_rho))
    pred = pot.predict_trajectory(spec, arr["t"])
    files.append(io.write_columns(out / "trajectory.csv",
                                  ["t", "x_cm", "x_predicted", "v_predicted"],
                                  [arr["t"], arr["x_cm"], pred.positions, pred.velocities]))
    if probes:
        files.append(io.write_columns(out / "probes.csv", ["t"] + _probe_header(probes),
                                      [arr["t"]] + list(np.array(probe_rows).T)))
    files.append(io.write_field(out / "field_final.csv", last["psi"]))
    norm0 = arr["norm"][0]
    extra = {"summary": {
        "t_final": float(arr["t"][-1]),
        "x_cm_final": float(arr["x_cm"][-1]),
        "x_cm_predicted": float(pred.positions[-1]),
        "norm_initial": float(norm0),
        "max_relative_norm_drift": float(np.max(np.abs(arr["norm"] - norm0)) / norm0),
        "mu_ratio": state.params.mu_ratio,
    }}
    return _finish(cfg, "evolve", files, started, extra)


def run_analytic(cfg: RunConfig) -> dict:
    """Closed-form fields at ``diagnostics.times`` plus their observables."""
    started = time.perf_counter()
    out = _prepare(cfg)
    state, grid = cfg.state, cfg.grid
    times = np.asarray(cfg.values["diagnostics"]["times"], dtype=float)
    ent_kw = cfg.entropy_kwargs()
    files, rows = [], []
    for i, t in enumerate(times):
        psi = an.full_wavefunction(state, grid, float(t))
        files.append(io.write_field(out / f"field_{i:03d}.csv", psi))
        rows.append((t, dg.norm(psi), dg.center_of_mass(psi), dg.peak_position(psi),
                     dg.shannon_entropy(psi, **ent_kw)))
    if rows:
        cols = np.array(rows).T
        files.append(io.write_series(out / "series.csv", *cols))
    p = state.params
    extra = {"droplet": {**p.to_dict(), "N": an.droplet_norm(p)}, "times": times.tolist()}
    return _finish(cfg, "analytic", files, started, extra)


def _state_at(cfg: RunConfig, t: float, source: str):
    state, grid = cfg.state, cfg.grid
    if source == "analytic":
        return an.full_wavefunction(state, grid, t)
    dt = cfg.values["evolution"]["dt"]
    n = int(round(t / dt))
    if not math.isclose(n * dt, t, rel_tol=1e-9, abs_tol=1e-12):
        raise ConfigError(f"t={t} is not a multiple of evolution.dt={dt}", key="evolution.dt")
    g1, g2 = state.couplings
    ecfg = EvolutionConfig(dt, n, max(n, 1), g1, g2, keep_snapshots=True)
    return evolve(an.full_wavefunction(state, grid, 0.0), state.potential, ecfg).final


def run_wigner(cfg: RunConfig) -> dict:
    """Wigner map at ``diagnostics.wigner.t`` around the droplet's phase-space center.

    Unset windows default to ``p_c +- 8`` and ``x_c +- 40`` where
    ``(x_c, p_c) = (-gamma(t), -gamma'(t))``.
    """
    started = time.perf_counter()
    out = _prepare(cfg)
    w = cfg.values["diagnostics"]["wigner"]
    spec = cfg.potential
    t = float(w["t"])
    psi = _state_at(cfg, t, w["source"])
    pc, xc = -float(pot.gamma_dot(spec, t)), -float(pot.gamma(spec, t))
    p_min = pc - 8.0 if w["p_min"] is None else w["p_min"]
    p_max = pc + 8.0 if w["p_max"] is None else w["p_max"]
    x_lo = xc - 40.0 if w["x_min"] is None else w["x_min"]
    x_hi = xc + 40.0 if w["x_max"] is None else w["x_max"]
    wm = dg.wigner(psi, p_min, p_max, w["n_p"], x_window=(x_lo, x_hi))
    files = [io.write_map(out / "wigner.csv", "x", wm.x_values, "p", wm.p_values, wm.values)]
    rho = np.interp(wm.x_values, psi.grid.x, psi.density)
    files.append(io.write_columns(out / "wigner_marginal.csv", ["x", "x_marginal", "density"],
                                  [wm.x_values, wm.x_marginal(), rho]))
    extra = {"wigner": {"t": t, "total": wm.total(), "norm": dg.norm(psi),
                        "x_marginal_error": float(np.max(np.abs(wm.x_marginal() - rho))),
                        "imag_residue": wm.imag_residue, "p_window": [p_min, p_max],
                        "x_window": [x_lo, x_hi]}}
    return _finish(cfg, "wigner", files, started, extra)


def run_entropy(cfg: RunConfig) -> dict:
    """Entropy time series: closed form at ``diagnostics.times`` or every evolution record."""
    started = time.perf_counter()
    out = _prepare(cfg)
    kw = cfg.entropy_kwargs()
    source = cfg.values["diagnostics"]["entropy"]["source"]
    if source == "analytic":
        times = np.asarray(cfg.values["diagnostics"]["times"], dtype=float)
        s = [dg.shannon_entropy(an.full_wavefunction(cfg.state, cfg.grid, float(t)), **kw)
             for t in times]
    else:
        ts, s = [], []
        evolve(an.full_wavefunction(cfg.state, cfg.grid, 0.0), cfg.potential,
               cfg.evolution_config(),
               observers=[lambda t, psi: (ts.append(t), s.append(dg.shannon_entropy(psi, **kw)))])
        times = np.asarray(ts)
    files = [io.write_columns(out / "entropy.csv", ["t", "S_rho"], [times, s])]
    return _finish(cfg, "entropy", files, started, {"entropy_source": source})


def run_stability(cfg: RunConfig) -> tuple[dict, bool]:
    """Noise-robustness protocol; returns the manifest and whether it passed."""
    started = time.perf_counter()
    out = _prepare(cfg)
    report = stability_run(cfg.state, cfg.potential, cfg.evolution_config(), cfg.noise,
                           grid=cfg.grid, max_workers=max_workers())
    files = [
        io.write_columns(out / "stability.csv",
                         ["x", "analytic", "clean", "noisy_mean", "noisy_sd"],
                         [report.x, report.analytic_density, report.clean_density,
                          report.mean_noisy_density, report.per_x_sd]),
        io.write_json(out / "stability.json", report.summary()),
    ]
    manifest = _finish(cfg, "stability", files, started, {"stability": report.summary()})
    return manifest, report.passed


TASKS = {"evolve": run, "analytic": run_analytic, "wigner": run_wigner,
         "entropy": run_entropy}


def run_preset(name: str, out_dir, seed: int = 0) -> dict:
    """Run one figure preset into ``out_dir`` and write its manifest."""
    from .presets import FIGURE_CONVENTION, PRESETS, entropy_variant

    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}",
                          key="preset")
    started = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if (out / MANIFEST_NAME).exists():
        (out / MANIFEST_NAME).unlink()
    files, info = PRESETS[name].build(out, int(seed))
    return write_manifest(
        out, "preset", files, started, convention=FIGURE_CONVENTION.value,
        entropy_variant=entropy_variant() if name == "fig9" else None,
        extra={"preset": name, "seed": int(seed), "preset_parameters": info,
               "reproduce": f"droplet-fall preset {name} --seed {int(seed)}"},
    )
