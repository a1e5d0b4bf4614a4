import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coexsim.errors import InvalidInputError
from coexsim.geometry import ArrayConfig
from coexsim.nulling import effective_rank
from coexsim.scenario import (DEFAULT, PRESET_NAMES, Scenario, ScenarioPath, digest, from_toml, load, preset,
                              to_channel, to_toml)


def test_presets_carry_figure_geometry():
    a = preset("fig1a")
    assert a.target_angle == 0.0 and [p.radar_angle for p in a.paths] == [-7.0, -6.0]
    assert a.blocked_sector == (-10.0, -3.0)
    b = preset("fig1b")
    assert b.target_angle == 0.0 and [p.radar_angle for p in b.paths] == [-3.0, -2.0]
    assert b.blocked_sector == (-5.0, -2.0)
    c = preset("fig2")
    assert c.paths == a.paths and c.blocked_sector == a.blocked_sector and c.sweep_grid[2] == 1.0
    with pytest.raises(InvalidInputError):
        preset("fig3")


def test_preset_link_defaults():
    s = preset("fig1a")
    los, nlos = s.paths
    assert (los.attenuation, los.base_distance) == (1.0, 10_000.0)
    assert (nlos.attenuation, nlos.base_distance) == (0.5, 10_025.0)
    assert s.radar.carrier_wavelength == 0.0857 and s.radar.normalized_spacing == 0.5


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_preset_channel_rank(name):
    s = preset(name)
    H = to_channel(s)
    assert H.shape == (s.bs.num_elements, s.radar.num_elements)
    assert effective_rank(np.linalg.svd(H, compute_uv=False)) == 2


def test_channel_single_path_and_linearity():
    s = Scenario(ArrayConfig(8), ArrayConfig(4), (ScenarioPath(1.0, 1e4, -7.0, -7.0),))
    assert effective_rank(np.linalg.svd(to_channel(s), compute_uv=False)) == 1
    f = preset("fig1a")
    np.testing.assert_allclose(to_channel(f.with_scaled_attenuation(2.0)), 2 * to_channel(f), rtol=0, atol=1e-13)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_serialization_stable_and_roundtrips(name):
    s = preset(name)
    text = to_toml(s)
    assert text == to_toml(preset(name))
    assert from_toml(text) == s
    assert digest(s) == digest(from_toml(text))


scen_st = st.builds(
    Scenario,
    radar=st.builds(ArrayConfig, st.integers(1, 64), st.floats(0.1, 2.0), st.just(0.0857)),
    bs=st.builds(ArrayConfig, st.integers(1, 8), st.floats(0.1, 2.0), st.just(0.0857)),
    paths=st.lists(st.builds(ScenarioPath, st.floats(1e-3, 10.0), st.floats(1.0, 1e5),
                             st.floats(-89.0, 89.0), st.floats(-89.0, 89.0)), min_size=1, max_size=3).map(tuple),
    target_angle=st.floats(-90.0, 90.0),
    blocked_sector=st.tuples(st.floats(-90.0, 0.0), st.floats(0.0, 90.0)),
    pfa=st.floats(1e-9, 0.5),
    snr_db=st.floats(-50.0, 50.0),
    sweep_grid=st.tuples(st.just(-90.0), st.just(90.0), st.floats(0.01, 5.0)),
    seed=st.integers(0, 2**63 - 1),
    normalization_mode=st.sampled_from(["fixed_K", "peak"]),
)


@given(scen_st)
def test_roundtrip_property(s):
    assert from_toml(to_toml(s)) == s


def test_partial_file_uses_defaults_and_base(tmp_path):
    f = tmp_path / "s.toml"
    f.write_text("snr_db = 3\nseed = 9\n[radar]\nnum_elements = 16\n")
    s = load(f)
    assert s.snr_db == 3.0 and s.seed == 9 and s.radar.num_elements == 16
    assert s.paths == DEFAULT.paths and s.bs == DEFAULT.bs
    s2 = load(f, preset("fig1b"))
    assert s2.blocked_sector == (-5.0, -2.0)


@pytest.mark.parametrize("text,match", [
    ("bogus = 1\n", "unknown key"),
    ("[radar]\nelements = 3\n", "unknown key"),
    ("[[paths]]\nattenuation = 1.0\nbase_distance = 1.0\nradar_angle = 0.0\nbs_angle = 0.0\ncolor = 1\n",
     "unknown key"),
    ("[[paths]]\nattenuation = 1.0\n", "missing"),
    ("pfa = 1.5\n", "pfa"),
    ("blocked_sector = [3.0, -3.0]\n", "blocked_sector"),
    ("sweep_grid = [-90.0, 90.0, 0.0]\n", "sweep_grid"),
    ("seed = -1\n", "seed"),
    ("normalization_mode = \"loud\"\n", "normalization_mode"),
    ("target_angle = \"zero\"\n", "number"),
    ("target_angle = \n", "malformed"),
    ("[radar]\nnum_elements = 0\n", "num_elements"),
    ("[bs]\ncarrier_wavelength = 0.1\n", "wavelength"),
])
def test_invalid_files_rejected(text, match):
    with pytest.raises(InvalidInputError, match=match):
        from_toml(text)


def test_missing_file(tmp_path):
    with pytest.raises(InvalidInputError):
        load(tmp_path / "nope.toml")


def test_num_samples_grows_with_array():
    assert preset("fig1b").num_samples == 128
    s = Scenario(ArrayConfig(200), ArrayConfig(4), (ScenarioPath(1.0, 1e4, -7.0, -7.0),))
    assert s.num_samples == 200
