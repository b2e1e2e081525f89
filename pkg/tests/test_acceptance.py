"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as they
are produced; they are also collected into the terminal summary.
"""
import hashlib
import time

import numpy as np
import pytest

from droplet_fall import analytic as an
from droplet_fall import diagnostics as dg
from droplet_fall import potentials as pot
from droplet_fall.core import ComplexField, SpatialGrid, centered_grid, integrate, make_grid
from droplet_fall.presets import (ENTROPY_PANELS, ENTROPY_TIMES, FIGURE_DT, FIGURE_GRID,
                                  FIGURE_STEPS, PRESETS, figure_params, windowed_entropy)
from droplet_fall.propagator import EvolutionConfig, evolve
from droplet_fall.runner import run_preset

DX = FIGURE_GRID["dx"]


def figure_grid():
    return make_grid(**FIGURE_GRID)


def evolve_droplet(spec, params, dt, n_steps, record_every):
    state = an.DropletState(params, spec)
    g1, g2 = state.couplings
    psi0 = an.full_wavefunction(state, figure_grid(), 0.0)
    return evolve(psi0, spec, EvolutionConfig(dt, n_steps, record_every, g1, g2)).as_arrays()


def coherent(grid, sigma=1.0, x0=0.0, p0=0.0):
    return ComplexField(grid, (np.pi * sigma**2) ** -0.25
                        * np.exp(-((grid.x - x0) ** 2) / (2 * sigma**2) + 1j * p0 * grid.x))


# ----------------------------------------------------------------- criterion 1
def test_01_stationary_residual(acceptance_report):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for conv in ("half", "full"):
        for _ in range(50):
            r = rng.uniform(0.05, 0.999)
            G1, G2 = rng.uniform(0.5, 2.0, size=2)
            p = an.DropletParams.from_flat_top_ratio(r, G1, G2, conv)
            g = an.fitting_grid(p)
            worst = max(worst, an.stationary_residual(an.stationary_profile(p, g), p, g))
    elapsed = time.perf_counter() - start
    passed = worst < 1e-8 and elapsed < 5.0
    acceptance_report(1, passed, f"max residual {worst:.2e} over 2x50 draws, {elapsed:.2f} s")
    assert passed


# ----------------------------------------------------------------- criterion 2
@pytest.mark.slow
def test_02_norm_conservation(acceptance_report):
    p = figure_params(N=1.0)
    details, ok = [], True
    for name, spec in (("constant", pot.PotentialSpec.constant(9.8)),
                       ("modulated", pot.PotentialSpec.modulated(9.8, 0.3, 0.5))):
        start = time.perf_counter()
        arr = evolve_droplet(spec, p, FIGURE_DT, FIGURE_STEPS, 1000)
        elapsed = time.perf_counter() - start
        drift = float(np.max(np.abs(arr["norm"] / arr["norm"][0] - 1)))
        ok &= drift < 1e-8 and elapsed < 60.0
        details.append(f"{name} drift {drift:.1e} in {elapsed:.1f} s")
    acceptance_report(2, ok, "; ".join(details))
    assert ok


# ----------------------------------------------------------------- criterion 3
@pytest.mark.slow
def test_03_newtonian_trajectory(acceptance_report):
    p = figure_params(N=1.0)
    errors, finals = {}, {}
    for a, t_end in ((9.8, 1.0), (0.98, 5.0), (0.098, 5.0)):
        dt = 1e-4 if a == 9.8 else 1e-3
        n = int(round(t_end / dt))
        arr = evolve_droplet(pot.PotentialSpec.constant(a), p, dt, n, n // 50)
        errors[a] = float(np.max(np.abs(arr["x_cm"] - 0.5 * a * arr["t"] ** 2)))
        finals[a] = float(np.interp(1.0, arr["t"], arr["x_cm"]))
    ordered = finals[9.8] > finals[0.98] > finals[0.098]
    passed = max(errors.values()) < DX and ordered
    acceptance_report(3, passed, "max |x_cm - at^2/2| "
                      + ", ".join(f"a={a:g}: {e:.1e}" for a, e in errors.items())
                      + f" (dx={DX}); drift ordering at t=1 {'holds' if ordered else 'broken'}")
    assert passed


# ----------------------------------------------------------------- criterion 4
@pytest.mark.slow
def test_04_norm_and_coupling_independence(acceptance_report):
    spec = pot.PotentialSpec.constant(0.98)
    by_norm = [evolve_droplet(spec, figure_params(N=n), 1e-3, 5000, 100)["x_cm"]
               for n in (1.0, 3.0, 5.0)]
    by_g2 = [evolve_droplet(spec, figure_params(N=1.0, G2=g2), 1e-3, 5000, 100)["x_cm"]
             for g2 in (0.9, 0.999, 0.9999)]

    def pairwise(series):
        return max(float(np.max(np.abs(a - b))) for i, a in enumerate(series)
                   for b in series[i + 1:])

    dn, dg2 = pairwise(by_norm), pairwise(by_g2)
    passed = dn < DX and dg2 < DX
    acceptance_report(4, passed, f"pairwise max |d<x>| N-sweep {dn:.1e}, G2-sweep {dg2:.1e} "
                      f"(dx={DX}, a=0.98, t<=5)")
    assert passed


# ----------------------------------------------------------------- criterion 5
@pytest.mark.slow
def test_05_modulated_trajectory(acceptance_report):
    a, alpha, omega = 0.98, 0.3, 0.5
    arr = evolve_droplet(pot.PotentialSpec.modulated(a, alpha, omega), figure_params(N=1.0),
                         1e-3, 5000, 100)
    t = arr["t"]
    closed = 0.5 * a * t**2 - (a * alpha / omega**2) * (np.cos(omega * t) - 1)
    err = float(np.max(np.abs(arr["x_cm"] - closed)))
    passed = err < 2 * DX
    acceptance_report(5, passed, f"max |<x> - closed form| {err:.1e} (< 2dx = {2 * DX:.4f})")
    assert passed


# ----------------------------------------------------------------- criterion 6
def test_06_norm_mu_relation(acceptance_report):
    start = time.perf_counter()
    ladder = 1.0 - np.geomspace(0.95, 1e-5, 20)
    rel = 0.0
    for m in ladder:
        p = an.DropletParams.from_ratio(m)
        g = an.fitting_grid(p, dx=min(0.02, 0.05 / p.decay_rate))
        quad = integrate(an.stationary_profile(p, g) ** 2, g.dx)
        rel = max(rel, abs(an.norm_of_mu(m) / quad - 1))
    trip = max(abs(an.mu_of_norm(an.norm_of_mu(m)) - m) for m in ladder)
    elapsed = time.perf_counter() - start
    passed = rel < 1e-6 and trip < 1e-10 and elapsed < 1.0
    acceptance_report(6, passed, f"quadrature rel err {rel:.1e}, round trip {trip:.1e}, "
                      f"{elapsed:.2f} s")
    assert passed


# ----------------------------------------------------------------- criterion 7
@pytest.mark.slow
def test_07_wigner_marginals(acceptance_report):
    grid = figure_grid()
    worst_marg, worst_total, slowest = 0.0, 0.0, 0.0
    for alpha in (0.0, 0.1, 0.2, 0.3):
        spec = pot.PotentialSpec.modulated(9.8, alpha, 0.5)
        psi = an.full_wavefunction(an.DropletState(figure_params(), spec), grid, 1.0)
        pc = -float(pot.gamma_dot(spec, 1.0))
        start = time.perf_counter()
        wm = dg.wigner(psi, pc - 8.0, pc + 8.0, 256, marginal_tol=None)
        slowest = max(slowest, time.perf_counter() - start)
        worst_marg = max(worst_marg, float(np.max(np.abs(wm.x_marginal() - psi.density))))
        worst_total = max(worst_total, abs(wm.total() - dg.norm(psi)))
    g = centered_grid(512, 0.05)
    wm = dg.wigner(coherent(g, 1.2, 1.0, -2.0), -8.0, 4.0, 128)
    x, p = wm.x_values[:, None], wm.p_values[None, :]
    closed = np.exp(-((x - 1.0) ** 2) / 1.44 - 1.44 * (p + 2.0) ** 2) / np.pi
    gauss = float(np.max(np.abs(wm.values - closed)))
    passed = worst_marg < 1e-6 and worst_total < 1e-6 and gauss < 1e-8 and slowest < 30.0
    acceptance_report(7, passed, f"x-marginal {worst_marg:.1e}, |total - N| {worst_total:.1e}, "
                      f"Gaussian {gauss:.1e}, slowest map {slowest:.2f} s")
    assert passed


# ----------------------------------------------------------------- criterion 8
def test_08_entropy(acceptance_report):
    L = 7.3
    box_grid = SpatialGrid(1024, 0.0, L / 1023)
    box = abs(dg.shannon_entropy(ComplexField(box_grid, np.full(1024, 1 / np.sqrt(L))))
              - np.log(L))
    g = centered_grid(4096, 0.02)
    gauss = max(abs(dg.shannon_entropy(coherent(g, s))
                    - 0.5 * np.log(2 * np.pi * np.e * s**2 / 2)) for s in (0.5, 1.0, 3.0))
    base = dg.shannon_entropy(coherent(g))
    rng = np.random.default_rng(8)
    invariance = max(
        abs(dg.shannon_entropy(ComplexField(g, np.roll(coherent(g).values, int(shift))
                                            * np.exp(1j * (ph + k * g.x)))) - base)
        for shift, ph, k in zip(rng.integers(-300, 300, 10), rng.uniform(0, 2 * np.pi, 10),
                                rng.uniform(-3, 3, 10)))

    # windowed-entropy plateau and saturation ordering for the panel (a) traps
    plateau, t_sat = {}, {}
    for spec in ENTROPY_PANELS["a"]:
        state = an.DropletState(figure_params(), spec)
        s = np.array([windowed_entropy(state, t) for t in ENTROPY_TIMES])
        plateau[spec.a] = float(s[-1])
        t_sat[spec.a] = float(ENTROPY_TIMES[np.argmax(s >= 0.95 * s[-1])])
    in_band = all(abs(v / 3.2 - 1) <= 0.15 for v in plateau.values())
    ordered = t_sat[9.8] < t_sat[0.98] < t_sat[0.098]
    passed = box < 1e-6 and gauss < 1e-6 and invariance < 1e-10 and in_band and ordered
    acceptance_report(8, passed, f"box {box:.1e}, Gaussian {gauss:.1e}, invariance "
                      f"{invariance:.1e}; plateaus "
                      + ", ".join(f"a={a:g}: {v:.3f}" for a, v in plateau.items())
                      + "; 95% saturation at t = "
                      + ", ".join(f"{t_sat[a]:g}" for a in (9.8, 0.98, 0.098)))
    assert passed


# ---------------------------------------------------------- criteria 9 and 11
def _digests(out):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(out.glob("*.csv"))}


@pytest.fixture(scope="module")
def preset_runs(tmp_path_factory):
    """Every preset run twice with seed 0; returns manifests, digests and timings."""
    runs = {}
    for name in PRESETS:
        entry = {"manifests": [], "digests": [], "seconds": []}
        for rep in range(2):
            out = tmp_path_factory.mktemp(f"{name}_{rep}")
            start = time.perf_counter()
            entry["manifests"].append(run_preset(name, out, seed=0))
            entry["seconds"].append(time.perf_counter() - start)
            entry["digests"].append(_digests(out))
        runs[name] = entry
    return runs


@pytest.mark.slow
def test_09_stability_protocol(acceptance_report, preset_runs):
    run = preset_runs["fig10"]
    reports = run["manifests"][0]["preset_parameters"]["reports"]
    const = reports["constant"]["max_relative_deviation"]
    mod = reports["modulated"]["max_relative_deviation"]
    elapsed = run["seconds"][0]
    passed = const < 0.10 and mod < 0.12 and elapsed < 600.0
    acceptance_report(9, passed, f"max relative deviation constant {const:.4f} (< 0.10), "
                      f"modulated {mod:.4f} (< 0.12), {elapsed:.0f} s")
    assert passed


# ---------------------------------------------------------------- criterion 10
@pytest.mark.slow
def test_10_splitting_order(acceptance_report):
    spec = pot.PotentialSpec.modulated(9.8, 0.3, 0.5)
    p = figure_params(N=1.0)
    # records every 0.1 time units for all three step sizes
    traj = [evolve_droplet(spec, p, dt, int(round(1.0 / dt)), int(round(0.1 / dt)))["x_cm"]
            for dt in (4e-4, 2e-4, 1e-4)]
    e_coarse = float(np.max(np.abs(traj[0] - traj[1])))
    e_fine = float(np.max(np.abs(traj[1] - traj[2])))
    ratio = e_coarse / e_fine
    passed = 3.2 <= ratio <= 4.8
    acceptance_report(10, passed, f"self-convergence ratio {ratio:.4f} "
                      f"(errors {e_coarse:.2e}, {e_fine:.2e})")
    assert passed


# ---------------------------------------------------------------- criterion 11
@pytest.mark.slow
def test_11_determinism(acceptance_report, preset_runs):
    differing = [name for name, run in preset_runs.items()
                 if run["digests"][0] != run["digests"][1] or not run["digests"][0]]
    n_files = sum(len(run["digests"][0]) for run in preset_runs.values())
    passed = not differing
    acceptance_report(11, passed, f"{len(preset_runs)} presets x 2 runs, {n_files} CSVs "
                      + ("byte-identical" if passed else f"differ: {', '.join(differing)}"))
    assert passed
