import pytest

from rydswm.config import ENV_VAR, Config, bundled_config_path, default_config_path, load_config
from rydswm.eit import FourLevelSystem
from rydswm.errors import ConfigError
from rydswm.atomic import validate_loop
from rydswm.units import TWO_PI

from conftest import mhz


def test_bundled_config_values(paper_cfg):
    s = paper_cfg.system()
    assert s.rabi("P") == pytest.approx(mhz(1.14))
    assert s.rabi("A") == pytest.approx(mhz(6.2))
    assert s.gamma(5) == pytest.approx(mhz(0.129))
    assert s.dipole("45") == pytest.approx(387 * 8.4783536e-30, rel=1e-6)


def test_unknown_key_names_the_key(paper_cfg):
    text = paper_cfg.text().replace("[rates]", "[rates]\ngamma71_over_2pi_mhz = 1")
    with pytest.raises(ConfigError) as exc:
        Config.from_text(text)
    assert exc.value.key == "rates.gamma71_over_2pi_mhz"


def test_unknown_section_rejected(paper_cfg):
    with pytest.raises(ConfigError):
        Config.from_text(paper_cfg.text() + "\n[plotting]\ncolor = red\n")


def test_bad_number_rejected(paper_cfg):
    with pytest.raises(ConfigError) as exc:
        paper_cfg.with_override("fields.P.rabi_over_2pi_mhz", "fast")
    assert exc.value.key == "fields.P.rabi_over_2pi_mhz"


def test_env_var_selects_default(tmp_path, monkeypatch, paper_cfg):
    p = tmp_path / "c.ini"
    p.write_text(paper_cfg.with_override("fields.A.rabi_over_2pi_mhz", 3.0).text())
    monkeypatch.setenv(ENV_VAR, str(p))
    assert default_config_path() == str(p)
    assert load_config().system().rabi("A") == pytest.approx(mhz(3.0))
    monkeypatch.delenv(ENV_VAR)
    assert default_config_path() == bundled_config_path()


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "nope.ini"))


def test_closure_sets_L_on_the_loop(paper_cfg):
    r = validate_loop(paper_cfg.system())
    assert r.residual == pytest.approx(0.0, abs=TWO_PI * 1.0)


def test_override_round_trips(paper_cfg):
    c2 = paper_cfg.with_override("fields.LO.rabi_over_2pi_mhz", 2.5)
    assert c2.system().rabi("LO") == pytest.approx(mhz(2.5))
    assert paper_cfg.system().rabi("LO") == pytest.approx(mhz(1.4))
    assert c2.digest() != paper_cfg.digest()
    assert Config.from_text(c2.text()).digest() == c2.digest()


def test_eit_from_swm_shares_optics(paper_cfg):
    e = paper_cfg.system("eit4")
    s = paper_cfg.system("swm6")
    assert isinstance(e, FourLevelSystem)
    for x in ("P", "C", "LO"):
        assert e.rabi(x) == s.rabi(x)
    for j in (2, 3, 4):
        assert e.gamma(j) == s.gamma(j)


def test_bundled_eit_config():
    c = load_config(bundled_config_path("paper_eit4.ini"))
    assert c.scheme == "eit4"
    assert c.readout == "rho41"
    assert c.system().n_levels == 4


def test_unknown_scheme_rejected(paper_cfg):
    with pytest.raises(ConfigError):
        paper_cfg.with_override("system.scheme", "swm8")
