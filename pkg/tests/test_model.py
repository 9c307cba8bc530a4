from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hetcache.model import ConfigError, Demand, SubfileLabel, SystemConfig, generate_library, validate_config


def test_example1_config_is_valid(example1):
    assert validate_config(example1) is example1


def test_capacity_above_file_count_rejected():
    with pytest.raises(ConfigError, match="M_1=3"):
        validate_config(SystemConfig(2, 1000, 1, (3,)))


def test_zero_caches_allowed():
    validate_config(SystemConfig(5, 10, 2, (0, 0)))


def test_every_violation_reported():
    with pytest.raises(ConfigError) as exc:
        validate_config(SystemConfig(0, 0, 2, (1,)))
    assert len(exc.value.problems) == 4


def test_library_deterministic_per_seed():
    cfg = SystemConfig(2, 8, 1, (0,))
    a, b = generate_library(cfg, 7), generate_library(cfg, 7)
    assert a == b
    assert a.bits.shape == (2, 8)
    assert generate_library(cfg, 8) != a


def test_library_minimal():
    lib = generate_library(SystemConfig(1, 1, 1, (0,)), 0)
    assert lib.bits.shape == (1, 1)


def test_library_bits_balanced():
    lib = generate_library(SystemConfig(3, 10**4, 1, (0,)), 11)
    frac = lib.bits.mean(axis=1)
    assert np.all(np.abs(frac - 0.5) <= 0.02)


def test_library_is_read_only():
    lib = generate_library(SystemConfig(1, 4, 1, (0,)), 0)
    with pytest.raises(ValueError):
        lib.bits[0, 0] = 1


def test_demand_validation():
    cfg = SystemConfig(2, 8, 3, (0, 0, 0))
    Demand((1, 2, 2)).validate(cfg)
    with pytest.raises(ConfigError):
        Demand((1, 3, 2)).validate(cfg)
    with pytest.raises(ConfigError):
        Demand((1, 2)).validate(cfg)
    assert Demand.parse("2,1,2")[1] == 2


def test_subfile_label_text():
    assert str(SubfileLabel.of(1, [3, 2])) == "1:{2,3}"
    assert str(SubfileLabel.of(2)) == "2:{}"


def test_text_rejects_missing_key():
    with pytest.raises(ConfigError):
        SystemConfig.from_text("N=2\nF=10\n")


capacities = st.fractions(min_value=0, max_value=4, max_denominator=64)


@st.composite
def configs(draw):
    N = draw(st.integers(1, 4))
    mu = draw(st.lists(st.fractions(min_value=0, max_value=N, max_denominator=64), min_size=1, max_size=8))
    return SystemConfig(N, draw(st.integers(1, 10**6)), len(mu), tuple(mu))


@given(configs())
def test_text_round_trip(cfg):
    text = cfg.to_text()
    assert text.splitlines()[3].startswith("mu=")
    assert SystemConfig.from_text(text) == cfg


def test_text_format_example():
    cfg = SystemConfig.from_text("N=2\nF=1000\nK=4\nmu=1/8,1/4,1/2,1\n")
    assert cfg.mu == (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1))
