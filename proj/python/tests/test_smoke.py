from pathlib import Path

import numpy as np
import pytest

import mlamr

ROOT = Path(__file__).resolve().parents[2]
DEMO = ROOT / "configs" / "shelf_demo.cfg"


def small_demo():
    cfg = mlamr.load_config(str(DEMO))
    cfg.coarse_nx = 40
    cfg.coarse_ny = 10
    cfg.ratios = [(2, 2, 2)]
    cfg.final_time = 0.2
    cfg.frame_times = [0.0, 0.2]
    return cfg


def test_demo_config_loads():
    cfg = mlamr.load_config(str(DEMO))
    assert (cfg.coarse_nx, cfg.coarse_ny) == (200, 50)
    assert cfg.ratios == [(4, 4, 4), (4, 4, 4)]
    assert "levels = 3" in cfg.echo()
    uni = cfg.uniform_equivalent()
    assert (uni.coarse_nx, uni.coarse_ny) == (3200, 800)


def test_bad_config_raises():
    with pytest.raises(mlamr.ConfigError, match="amr.cfl"):
        mlamr.parse_config("[amr]\ncfl = 2\n")


def test_minmod():
    assert mlamr.minmod(1.0, 2.0) == 1.0
    assert mlamr.minmod(-3.0, -1.0) == -1.0
    assert mlamr.minmod(1.0, -2.0) == 0.0


def test_surface_round_trip():
    eta = mlamr.surfaces_from_depths(-1.0, [0.6, 0.4])
    assert eta == pytest.approx([0.0, -0.6])
    assert mlamr.depths_from_surfaces(-1.0, eta) == pytest.approx([0.6, 0.4])
    assert mlamr.depths_from_surfaces(-0.45, [0.0, -0.6]) == pytest.approx([0.45, 0.0])


def test_lake_at_rest_stays_at_rest():
    cfg = small_demo()
    cfg.wave_amplitude = 0.0
    sim = mlamr.Simulation(cfg)
    sim.initialize()
    for _ in range(5):
        sim.step()
    for _, arr in sim.patches(1):
        eta0 = arr[0] + arr[1] + arr[4]
        assert np.max(np.abs(eta0)) < 1e-12
        assert np.max(np.abs(arr[2])) < 1e-12


def test_run_writes_frames_and_closes_mass(tmp_path):
    stats = mlamr.run(small_demo(), tmp_path)
    assert stats["final_time"] == 0.2
    for m in range(2):
        assert abs(stats["final_mass"][m] - stats["accounted_mass"][m]) <= 1e-12 * stats["initial_mass"][m]
    frames = sorted(tmp_path.glob("frame_*.frame"))
    assert [f.name for f in frames] == ["frame_0000.frame", "frame_0001.frame"]
    frame = mlamr.read_frame(str(frames[1]))
    assert frame["time"] == pytest.approx(0.2)
    assert frame["num_layers"] == 2
    top = [mlamr.surface(p["values"]) for p in frame["patches"]]
    assert max(np.max(np.abs(t)) for t in top) < 0.05
    assert mlamr.compare_l1(str(frames[1]), str(frames[1])) == 0.0
    assert mlamr.compare_l1(str(frames[0]), str(frames[1])) > 0.0
