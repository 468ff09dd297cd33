import math

import pytest

from spinpump.config import parse_config, parse_config_text, serialize_config
from spinpump.errors import ConfigError

TWO_PI = 2 * math.pi


def test_empty_file_gives_paper_defaults(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("")
    rc = parse_config(path)
    d = rc.experiment.drive
    assert d.eta == pytest.approx(TWO_PI * 1e6)
    assert d.omega1 == pytest.approx(TWO_PI * 50e3)
    assert d.omega2 == pytest.approx(TWO_PI * 80.9e3)
    assert d.phi01 == pytest.approx(math.pi / 10)
    assert d.phi02 == 0.0
    assert rc.experiment.integration.dt == 5e-9
    assert rc.experiment.integration.t_final == 250e-6
    assert rc.experiment.noise is None
    assert rc.experiment.dd is None
    assert rc.experiment.instances == 1


def test_two_pi_hz_conversion():
    rc = parse_config_text("[drive]\nomega1_two_pi_hz = 50e3\n")
    assert rc.experiment.drive.omega1 == pytest.approx(3.14159e5, rel=1e-5)


def test_rad_per_s_spelling():
    rc = parse_config_text("[drive]\neta_rad_per_s = 1.0e6\n")
    assert rc.experiment.drive.eta == 1.0e6


def test_ambiguous_units_error():
    with pytest.raises(ConfigError, match="ambiguous"):
        parse_config_text(
            "[drive]\neta_rad_per_s = 1e6\neta_two_pi_hz = 1e6\n"
        )


def test_unknown_keys_listed():
    with pytest.raises(ConfigError, match=r"\[drive\] bogus"):
        parse_config_text("[drive]\nbogus = 1\n")
    with pytest.raises(ConfigError, match=r"\[shenanigans\]"):
        parse_config_text("[shenanigans]\nx = 1\n")


def test_noise_requires_strength():
    with pytest.raises(ConfigError, match="t2star_s"):
        parse_config_text("[noise]\nenabled = true\n")
    with pytest.raises(ConfigError, match="ambiguous"):
        parse_config_text(
            "[noise]\nt2star_s = 1e-6\nvariance_rad2_s2 = 5e11\n"
        )


def test_noise_and_dd_sections():
    rc = parse_config_text(
        "[noise]\nt2star_s = 1e-7\ntau_s = 1e-3\n"
        "[dd]\nenabled = true\ndelta_t_s = 5e-8\n"
        "[ensemble]\ninstances = 10\nbase_seed = 7\n"
    )
    exp = rc.experiment
    assert exp.noise is not None
    assert exp.noise.variance == pytest.approx(5e13)
    assert exp.noise.tau == 1e-3
    assert exp.dd is not None
    assert exp.dd.delta_t == 5e-8
    assert exp.instances == 10
    assert exp.base_seed == 7


def test_noise_section_disabled_flag():
    rc = parse_config_text("[noise]\nenabled = false\n")
    assert rc.experiment.noise is None


def test_round_trip_identity():
    text = (
        "[drive]\nm = 1.3\nomega1_two_pi_hz = 44e3\n"
        "[noise]\nt2star_s = 5e-7\ntau_s = 2e-5\n"
        "[dd]\nenabled = true\n"
        "[integration]\ndt_s = 1e-9\nt_final_s = 1e-5\nsampling = end\n"
        "[ensemble]\ninstances = 3\nbase_seed = 99\nworkers = 2\n"
        "[run]\nband = upper\nfit_start_s = 1e-6\nfit_end_s = 9e-6\n"
        "[sweep]\nm_values = 0.3,0.9\ntau_values_s = 1e-6,1e-3\n"
        "[chern]\ngrid_n = 32\n"
        "[htraj]\nstride = 10\n"
    )
    rc = parse_config_text(text)
    echoed = serialize_config(rc)
    rc2 = parse_config_text(echoed)
    assert rc2 == rc
    # and the echo is a fixed point
    assert serialize_config(rc2) == echoed


def test_bad_value_type():
    with pytest.raises(ConfigError, match="cannot parse"):
        parse_config_text("[integration]\nrecord_stride = often\n")


def test_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/path.ini")
