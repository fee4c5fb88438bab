import pytest

from adaptive_eccm.config import config_to_text, defaults_help, parse_config
from adaptive_eccm.engine import EngagementConfig
from adaptive_eccm.errors import ConfigError


def write(tmp_path, text):
    path = tmp_path / "cfg.txt"
    path.write_text(text, encoding="utf-8")
    return path


def test_empty_config_gives_defaults(tmp_path):
    s = parse_config(write(tmp_path, "# nothing\n\n"))
    assert s.config == EngagementConfig() and s.seeds == 1
    c = s.config
    assert (c.d, c.K, c.lam, c.theta_true, c.theta_hat0) == (4, 50, 0.5, None, None)


def test_override_wins(tmp_path):
    s = parse_config(write(tmp_path, "lambda=0.7\nK = 12  # short\n"), {"lambda": "0.5"})
    assert s.config.lam == 0.5 and s.config.K == 12


def test_unknown_key_names_key_and_line(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "K=3\nlamda=0.5\n"))
    assert info.value.key == "lamda" and info.value.line == 2
    assert "lamda" in str(info.value) and "line 2" in str(info.value)


@pytest.mark.parametrize(
    "text, key, line",
    [
        ("d=4\nK=abc\n", "K", 2),
        ("theta_true=0.5,0.5,1.5,0.5\n", "theta_true", 1),
        ("mode=oracle\n", "mode", 1),
        ("exploration=maybe\n", "exploration", 1),
        ("K=1\nK=2\n", "K", 2),
        ("seeds=0\n", "seeds", 1),
    ],
)
def test_bad_values(tmp_path, text, key, line):
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, text))
    assert info.value.key == key and info.value.line == line


def test_missing_equals(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "K 5\n"))
    assert info.value.line == 1


def test_vectors_and_round_trip(tmp_path):
    s = parse_config(
        write(tmp_path, "theta_true = 0.1, 0.2, 0.3, 0.4\ntheta_hat0=0.3,0.3,0.3,0.3\nseeds=3\ntracker=off\n")
    )
    assert s.config.theta_true == (0.1, 0.2, 0.3, 0.4) and not s.config.tracker
    again = parse_config(write(tmp_path, config_to_text(s)))
    assert again == s


def test_help_lists_every_default():
    text = defaults_help()
    for key in ("lambda", "theta_hat0", "c_j", "seeds"):
        assert key in text
