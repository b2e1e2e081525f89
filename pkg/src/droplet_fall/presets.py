"""Data-generating presets, one per figure (``fig1`` ... ``fig10``).

Every preset writes gnuplot-ready CSV files into an output directory and
returns the list of written paths plus a dictionary of preset parameters.
The figure droplet is quoted as ``mu = mu0 = -2/9, G1 = -1, G2 = 0.9999``; these
values are mapped onto the positive-coupling convention by :func:`figure_params`, and the
presets use the FULL kinetic convention (see README).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import analytic as an
from . import diagnostics as dg
from . import io
from . import potentials as pot
from .core import ComplexField, SpatialGrid, make_grid
from .propagator import EvolutionConfig, evolve
from .stability import NoiseSpec, stability_run

FIGURE_CONVENTION = an.KineticConvention.FULL
FIGURE_G1 = -1.0
FIGURE_G2 = 0.9999
FIGURE_GRID = dict(n_points=4096, x_min=-80.0, dx=0.0488)
FIGURE_DT = 1e-4
FIGURE_STEPS = 10_000
# fig9 entropy is evaluated on x >= ENTROPY_WINDOW_START
ENTROPY_WINDOW_START = 20.0


def figure_params(mu: float = an.MU0, G1: float = FIGURE_G1, G2: float = FIGURE_G2,
                  N: float | None = None,
                  convention=FIGURE_CONVENTION) -> an.DropletParams:
    """Map figure values (signed ``G1``, ``mu``) onto :class:`DropletParams`.

    ``r = (mu / mu0) (G2 / |G1|)`` with ``|G1|`` and ``|mu|``.  When ``N`` is
    given it fixes the droplet instead of ``mu``.
    """
    g1 = abs(G1)
    if N is not None:
        return an.DropletParams.from_norm(N, g1, G2, convention)
    return an.DropletParams.from_ratio(abs(mu) / abs(an.MU0), g1, G2, convention)


def _state(spec: pot.PotentialSpec, **kw) -> an.DropletState:
    return an.DropletState(figure_params(**kw), spec)


def _label(v: float) -> str:
    return f"{v:g}"


def _space_time_map(path, state, x_grid: SpatialGrid, times) -> Path:
    rho = np.vstack([an.density_values(state, x_grid.x, t) for t in times])
    return io.write_map(path, "t", times, "x", x_grid.x, rho)


def _probe(state, x_probe: float, times) -> np.ndarray:
    return np.array([float(an.density_values(state, x_probe, t)) for t in times])


def _constant(a):
    return pot.PotentialSpec.free_space() if a == 0 else pot.PotentialSpec.constant(a)


# --------------------------------------------------------------------- presets

def fig1(out: Path, seed: int):
    """Density at t = 1 for a in {0, 9.8, 0.98, 0.098}: closed form and split-step."""
    accels = [0.0, 9.8, 0.98, 0.098]
    grid = make_grid(**FIGURE_GRID)
    cols, names = [grid.x], ["x"]
    for a in accels:
        state = _state(_constant(a))
        g1, g2 = state.couplings
        cfg = EvolutionConfig(FIGURE_DT, FIGURE_STEPS, FIGURE_STEPS, g1, g2, keep_snapshots=True)
        rec = evolve(an.full_wavefunction(state, grid, 0.0), state.potential, cfg)
        cols += [an.density_values(state, grid.x, 1.0), rec.final.density]
        names += [f"analytic_a={_label(a)}", f"numeric_a={_label(a)}"]
    path = io.write_columns(out / "fig1_density_t1.csv", names, cols)
    return [path], {"accelerations": accels, "t": 1.0, "grid": FIGURE_GRID,
                    "dt": FIGURE_DT, "n_steps": FIGURE_STEPS}


MAP_GRID = dict(n_points=1024, x_min=-60.0, dx=0.25)


def fig2(out: Path, seed: int):
    """Space-time density maps for six accelerations."""
    accels = [0.0, 0.098, 0.54, 0.98, 4.9, 9.8]
    times = np.linspace(0.0, 5.0, 101)
    xg = make_grid(**MAP_GRID)
    files = [_space_time_map(out / f"fig2_map_a={_label(a)}.csv", _state(_constant(a)), xg, times)
             for a in accels]
    return files, {"accelerations": accels, "t": [0.0, 5.0, 101], "x_grid": MAP_GRID}


def fig3(out: Path, seed: int):
    """Space-time maps at a = 0.098 for four cubic couplings G2."""
    g2s = [0.9, 0.999, 0.9999, 0.999999]
    times = np.linspace(0.0, 10.0, 101)
    xg = make_grid(n_points=1024, x_min=-102.4, dx=0.2)
    files = [_space_time_map(out / f"fig3_map_G2={_label(g)}.csv",
                             _state(pot.PotentialSpec.constant(0.098), G2=g), xg, times)
             for g in g2s]
    return files, {"a": 0.098, "G2": g2s, "t": [0.0, 10.0, 101], "x_grid": xg.to_dict()}


def fig4(out: Path, seed: int):
    """Probe at x = 20 and t = 7 profiles for N in {1, 3, 5}; a-sweep at N = 5."""
    ns = [1.0, 3.0, 5.0]
    times = np.round(np.arange(0.0, 30.0 + 1e-9, 0.01), 10)
    spec = pot.PotentialSpec.constant(0.98)
    files = [io.write_columns(out / "fig4a_probe_x20.csv",
                              ["t"] + [f"N={_label(n)}" for n in ns],
                              [times] + [_probe(_state(spec, N=n), 20.0, times) for n in ns])]
    grid = make_grid(**FIGURE_GRID)
    xs = grid.x[(grid.x >= -20.0) & (grid.x <= 80.0)]
    files.append(io.write_columns(out / "fig4b_profile_t7.csv",
                                  ["x"] + [f"N={_label(n)}" for n in ns],
                                  [xs] + [an.density_values(_state(spec, N=n), xs, 7.0)
                                          for n in ns]))
    accels = [9.8, 0.98, 0.098]
    files.append(io.write_columns(
        out / "fig4c_probe_x20_N5.csv", ["t"] + [f"a={_label(a)}" for a in accels],
        [times] + [_probe(_state(pot.PotentialSpec.constant(a), N=5.0), 20.0, times)
                   for a in accels]))
    return files, {"N": ns, "a": 0.98, "probe_x": 20.0, "profile_t": 7.0,
                   "N5_accelerations": accels}


def fig5(out: Path, seed: int):
    """Probe at x = 20 under modulation: alpha sweep (a=0.98) and omega sweep (a=9.8)."""
    ns = [1.0, 3.0, 5.0]
    times = np.round(np.arange(0.0, 15.0 + 1e-9, 0.01), 10)
    panels = {
        "fig5a_probe_x20_alpha.csv": [(0.98, al, 0.5) for al in (0.1, 0.2, 0.3)],
        "fig5b_probe_x20_omega.csv": [(9.8, 0.3, om) for om in (0.5, 0.55, 0.6)],
    }
    files = []
    for name, cases in panels.items():
        cols, names = [times], ["t"]
        for a, al, om in cases:
            for n in ns:
                state = _state(pot.PotentialSpec.modulated(a, al, om), N=n)
                cols.append(_probe(state, 20.0, times))
                names.append(f"a={_label(a)};alpha={_label(al)};omega={_label(om)};N={_label(n)}")
        files.append(io.write_columns(out / name, names, cols))
    return files, {"N": ns, "probe_x": 20.0, "panels": {k: v for k, v in panels.items()}}


def fig6(out: Path, seed: int):
    """Probe at x = 50 for alpha in {0, 20, -20}; space-time maps at a = 0.098."""
    alphas = [0.0, 20.0, -20.0]
    times = np.round(np.arange(0.0, 15.0 + 1e-9, 0.01), 10)
    cols = [times] + [_probe(_state(pot.PotentialSpec.modulated(0.98, al, 1.0)), 50.0, times)
                      for al in alphas]
    files = [io.write_columns(out / "fig6a_probe_x50.csv",
                              ["t"] + [f"alpha={_label(al)}" for al in alphas], cols)]
    map_t = np.linspace(0.0, 15.0, 151)
    xg = make_grid(n_points=1024, x_min=-102.4, dx=0.2)
    for al in (20.0, -20.0):
        files.append(_space_time_map(out / f"fig6_map_alpha={_label(al)}.csv",
                                     _state(pot.PotentialSpec.modulated(0.098, al, 1.0)),
                                     xg, map_t))
    return files, {"probe_x": 50.0, "a": 0.98, "omega": 1.0, "alphas": alphas,
                   "map_a": 0.098, "x_grid": xg.to_dict()}


P_HALF_WIDTH = 8.0
X_HALF_WIDTH = 40.0
N_P = 256


def _wigner_case(path, spec, t=1.0):
    state = _state(spec)
    psi = an.full_wavefunction(state, make_grid(**FIGURE_GRID), t)
    pc = -float(pot.gamma_dot(spec, t))
    xc = -float(pot.gamma(spec, t))
    wm = dg.wigner(psi, pc - P_HALF_WIDTH, pc + P_HALF_WIDTH, N_P,
                   x_window=(xc - X_HALF_WIDTH, xc + X_HALF_WIDTH))
    io.write_map(path, "x", wm.x_values, "p", wm.p_values, wm.values)
    return path, {"x_center": xc, "p_center": pc, "total": wm.total(),
                  "imag_residue": wm.imag_residue}


def fig7(out: Path, seed: int):
    """Wigner maps at t = 1 for alpha in {0, 0.1, 0.2, 0.3} (a = 9.8, omega = 0.5)."""
    files, info = [], {}
    for al in (0.0, 0.1, 0.2, 0.3):
        spec = pot.PotentialSpec.modulated(9.8, al, 0.5)
        p, meta = _wigner_case(out / f"fig7_wigner_alpha={_label(al)}.csv", spec)
        files.append(p)
        info[_label(al)] = meta
    return files, {"a": 9.8, "omega": 0.5, "t": 1.0, "n_p": N_P, "cases": info}


def fig8(out: Path, seed: int):
    """Wigner maps at t = 1 for omega in {1, 5, 10} (a = 9.8, alpha = 0.3)."""
    files, info = [], {}
    for om in (1.0, 5.0, 10.0):
        spec = pot.PotentialSpec.modulated(9.8, 0.3, om)
        p, meta = _wigner_case(out / f"fig8_wigner_omega={_label(om)}.csv", spec)
        files.append(p)
        info[_label(om)] = meta
    return files, {"a": 9.8, "alpha": 0.3, "t": 1.0, "n_p": N_P, "cases": info}


ENTROPY_TIMES = np.round(np.linspace(0.0, 40.0, 401), 10)
ENTROPY_PANELS = {
    "a": [pot.PotentialSpec.constant(a) for a in (9.8, 0.98, 0.098)],
    "b": [pot.PotentialSpec.constant(9.8), pot.PotentialSpec.modulated(9.8, 0.3, 0.5)],
    "c": [pot.PotentialSpec.modulated(9.8, al, 0.5) for al in (0.1, 0.2, 0.3)],
    "d": [pot.PotentialSpec.modulated(9.8, 0.3, om) for om in (0.5, 0.55, 0.6)],
}


def windowed_entropy(state: an.DropletState, t: float,
                     window_start: float = ENTROPY_WINDOW_START) -> float:
    """Normalized entropy of the density restricted to ``x >= window_start``.

    A 4096-point grid is placed per time so that it covers the droplet when
    it is inside the window and the exponential tail when it is not.
    """
    centre = -float(pot.gamma(state.potential, t))
    grid = make_grid(4096, max(window_start, centre - 100.0), FIGURE_GRID["dx"])
    # no edge check: before arrival the window deliberately holds only the tail
    psi = ComplexField(grid, an.wavefunction_values(state, grid.x, t))
    return dg.shannon_entropy(psi, normalize=True, window=(window_start, None))


def _spec_label(spec: pot.PotentialSpec) -> str:
    if spec.variant is pot.Variant.CONSTANT:
        return f"a={_label(spec.a)}"
    return f"a={_label(spec.a)};alpha={_label(spec.alpha)};omega={_label(spec.omega)}"


def fig9(out: Path, seed: int):
    """Windowed Shannon entropy versus time for the four panels, t in [0, 40]."""
    files = []
    for panel, specs in ENTROPY_PANELS.items():
        cols = [ENTROPY_TIMES]
        for spec in specs:
            state = _state(spec)
            cols.append(np.array([windowed_entropy(state, t) for t in ENTROPY_TIMES]))
        files.append(io.write_columns(out / f"fig9{panel}_entropy.csv",
                                      ["t"] + [_spec_label(s) for s in specs], cols))
    return files, {"entropy_variant": entropy_variant(),
                   "panels": {k: [s.to_dict() for s in v] for k, v in ENTROPY_PANELS.items()}}


def entropy_variant() -> dict:
    return {"normalize": True, "window": [ENTROPY_WINDOW_START, None], "base": "e",
            "grid": "4096 points, dx=0.0488, x_min=max(20, centre-100) per time"}


FIG10_TRAPS = {
    "constant": pot.PotentialSpec.constant(9.8),
    "modulated": pot.PotentialSpec.modulated(9.8, 0.3, 0.5),
}


def fig10(out: Path, seed: int):
    """Noise robustness for both traps on the 4096-point figure grid."""
    grid = make_grid(**FIGURE_GRID)
    noise = NoiseSpec(fraction=0.01, seed=seed, n_realizations=8)
    files, reports = [], {}
    for name, spec in FIG10_TRAPS.items():
        state = _state(spec, N=1.0)
        g1, g2 = state.couplings
        cfg = EvolutionConfig(FIGURE_DT, FIGURE_STEPS, 100, g1, g2)
        s_rho = []
        rec = evolve(an.full_wavefunction(state, grid, 0.0), spec, cfg,
                     observers=[lambda t, psi: s_rho.append(dg.shannon_entropy(psi))])
        arr = rec.as_arrays()
        files.append(io.write_series(out / f"fig10_{name}_series.csv", arr["t"], arr["norm"],
                                     arr["x_cm"], arr["x_peak"], s_rho))
        report = stability_run(state, spec, cfg, noise, grid=grid)
        files.append(io.write_columns(
            out / f"fig10_{name}_profile.csv",
            ["x", "analytic", "clean", "noisy_mean", "noisy_sd"],
            [report.x, report.analytic_density, report.clean_density,
             report.mean_noisy_density, report.per_x_sd]))
        files.append(io.write_json(out / f"fig10_{name}_report.json", report.summary()))
        reports[name] = report.summary()
    return files, {"noise": noise.to_dict(), "grid": FIGURE_GRID, "dt": FIGURE_DT,
                   "n_steps": FIGURE_STEPS, "N": 1.0, "reports": reports,
                   "passed": all(r["passed"] for r in reports.values())}


@dataclass(frozen=True)
class Preset:
    name: str
    build: Callable
    description: str


PRESETS = {f.__name__: Preset(f.__name__, f, (f.__doc__ or "").strip().splitlines()[0])
           for f in (fig1, fig2, fig3, fig4, fig5, fig6, fig7, fig8, fig9, fig10)}
