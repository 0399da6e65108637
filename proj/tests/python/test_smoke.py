import math
from pathlib import Path

import pytest

import acrobot_rl as ar

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_baseline_state_count():
    assert ar.find_study("ICO").disc.state_count() == 1441
    assert ar.state_count(ar.Discretization(5, -5, 5, 0.1)) == 7201


def test_discretize_out_of_band_is_terminal():
    disc = ar.Discretization()
    assert ar.discretize(math.radians(195), 1.3, disc) == 785
    assert ar.discretize(0.0, 9.0, disc) == disc.terminal_index


def test_hamiltonian_values():
    p = ar.AcrobotParams.simulation_baseline()
    assert ar.hamiltonian(math.pi, 0.0, p) == pytest.approx(156.96)
    assert ar.scaled_hamiltonian(math.pi, 0.0, 2.0) == pytest.approx(4.0)


def test_step_keeps_angle_wrapped():
    p = ar.AcrobotParams.simulation_baseline()
    s = ar.SimState(theta=6.2, theta_dot=3.0)
    s = ar.step_rk4(s, p, ar.ServoCommand.Idle, ar.ServoModel(), 0.05)
    assert 0.0 <= s.theta < 2 * math.pi


def test_frictionless_calibration():
    p = ar.AcrobotParams.simulation_baseline()
    p.d1 = 0.0
    p.m2 = 0.0
    p.J2 = 0.0
    report = ar.simulate_calibration(p, math.radians(60))
    assert report.c_exp == pytest.approx(9.81 / 4, rel=1e-3)


def test_parse_config_with_overrides():
    text = (CONFIGS / "ico_exp.cfg").read_text()
    cfg = ar.parse_config(text, ["episode.episodes=4", "study.seed=3"])
    assert cfg.n_episodes == 4
    assert cfg.base_seed == 3
    with pytest.raises(ar._core.ConfigError, match="missing required section"):
        ar.parse_config("")


def test_serialize_round_trip():
    cfg = ar.find_study("rotation")
    again = ar.parse_config(ar.serialize_config(cfg))
    assert ar.serialize_config(again) == ar.serialize_config(cfg)


def test_train_and_study():
    cfg = ar.find_study("ICO_exp")
    cfg.n_episodes = 3
    cfg.n_runs = 2
    single = ar.train(cfg, 5)
    assert len(single["curve"]) == 3
    assert all(v <= 0.0 for v in single["curve"])
    study = ar.run_study(cfg, threads=1)
    assert len(study["mean"]) == 3
    assert [r["seed"] for r in study["runs"]] == [cfg.base_seed, cfg.base_seed + 1]
    assert study["runs"][0]["error"] is None


def test_moving_average_and_plot():
    assert ar.moving_average([1.0, 2.0, 3.0], 2) == [1.0, 1.5, 2.5]
    svg = ar.render_svg("episode,mean,std,lc30\n1,-2,0,-2\n2,-1,0,-1.5\n", "learning-curve")
    assert svg.lstrip().startswith("<?xml")
    with pytest.raises(ValueError):
        ar.render_svg("a,b\n1,2\n", "energy")
