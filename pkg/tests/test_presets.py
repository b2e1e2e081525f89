import json

import numpy as np
import pytest

from droplet_fall import analytic as an
from droplet_fall import potentials as pot
from droplet_fall import presets
from droplet_fall.exceptions import ConfigError
from droplet_fall.runner import run_preset


def test_figure_params_maps_signed_values():
    p = presets.figure_params()
    assert p.kinetic_convention is an.KineticConvention.FULL
    assert (p.G1, p.G2) == (1.0, 0.9999)
    assert p.mu_ratio == pytest.approx(1.0)
    assert an.droplet_norm(p) == pytest.approx(8.106, abs=1e-3)


def test_figure_params_by_norm():
    p = presets.figure_params(N=3.0)
    assert an.droplet_norm(p) == pytest.approx(3.0, rel=1e-10)


def test_every_preset_has_a_description():
    assert list(presets.PRESETS) == [f"fig{i}" for i in range(1, 11)]
    assert all(p.description for p in presets.PRESETS.values())


def test_probe_arrival_is_independent_of_norm():
    # the droplet reaches x = 20 at t = sqrt(2 * 20 / a) whatever its size
    spec = pot.PotentialSpec.constant(0.98)
    times = np.arange(0.0, 12.0, 0.01)
    peaks = [times[np.argmax(presets._probe(presets._state(spec, N=n), 20.0, times))]
             for n in (1.0, 3.0, 5.0)]
    np.testing.assert_allclose(peaks, np.sqrt(40 / 0.98), atol=0.01)


def test_large_modulation_revisits_probe():
    # alpha = 20: the droplet passes x = 50, retreats, and returns
    spec = pot.PotentialSpec.modulated(0.98, 20.0, 1.0)
    times = np.round(np.arange(0.0, 15.0, 0.01), 10)
    rho = presets._probe(presets._state(spec), 50.0, times)
    high = rho > 0.5 * rho.max()
    segments = np.flatnonzero(np.diff(high.astype(int)) == 1)
    assert segments.size >= 2
    x = -pot.gamma(spec, times)
    retreat = np.flatnonzero(np.diff(x) < 0)
    assert retreat.size > 0 and times[retreat[0]] == pytest.approx(3.31, abs=0.02)


def test_windowed_entropy_orders_saturation():
    times = np.arange(0.0, 40.1, 2.0)
    first_high = []
    for spec in presets.ENTROPY_PANELS["a"]:
        state = presets._state(spec)
        s = np.array([presets.windowed_entropy(state, t) for t in times])
        assert s[-1] == pytest.approx(3.2034, abs=1e-3)
        first_high.append(times[np.argmax(s >= 0.95 * s[-1])])
    assert first_high[0] < first_high[1] < first_high[2]


def test_windowed_entropy_starts_low():
    state = presets._state(pot.PotentialSpec.constant(9.8))
    assert presets.windowed_entropy(state, 0.0) < 1.5


def test_preset_writes_manifest(tmp_path):
    manifest = run_preset("fig4", tmp_path, seed=3)
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk == json.loads(json.dumps(manifest))
    assert manifest["convention"] == "full"
    assert {f["path"] for f in manifest["files"]} == {
        "fig4a_probe_x20.csv", "fig4b_profile_t7.csv", "fig4c_probe_x20_N5.csv"}


def test_fig9_manifest_records_entropy_variant(tmp_path):
    manifest = run_preset("fig9", tmp_path)
    assert manifest["entropy_variant"]["window"] == [presets.ENTROPY_WINDOW_START, None]


def test_unknown_preset():
    with pytest.raises(ConfigError) as info:
        run_preset("fig0", "unused")
    assert info.value.key == "preset"
