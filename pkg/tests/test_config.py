import numpy as np
import pytest

from qubitengine.config import (ConfigError, check_keys, config_hash, cycle_spec_from, number, number_list,
                                parse_config, sweep_values)


def test_number():
    assert number("pi/2") == pytest.approx(np.pi / 2)
    assert number("-2**3 + 1") == -7.0
    assert number(" 1e-3 ") == 1e-3
    for bad in ("__import__('os')", "abs(1)", "x", "1/0", "1 +", "'a'"):
        with pytest.raises(ConfigError):
            number(bad)


def test_number_list():
    assert number_list("1, 2, pi") == pytest.approx([1.0, 2.0, np.pi])
    assert number_list("") == []


def test_parse_config():
    cfg = parse_config("# c\nkind = local-otto  # trailing\n\nT_h = 10\n")
    assert cfg == {"kind": "local-otto", "T_h": "10"}
    with pytest.raises(ConfigError):
        parse_config("kind local-otto")
    with pytest.raises(ConfigError):
        parse_config("a = 1\na = 2")


def test_hash_is_order_independent():
    assert config_hash({"a": "1", "b": "2"}) == config_hash({"b": "2", "a": "1"})
    assert config_hash({"a": "1"}) != config_hash({"a": "2"})


def test_check_keys():
    check_keys({"kind": "local-otto", "Omega_1": "9"})
    with pytest.raises(ConfigError):
        check_keys({"kind": "local-otto", "Tc": "5"})


def test_cycle_spec_from():
    spec = cycle_spec_from({"kind": "global-otto", "tau_cyc": "30", "tau_unit": "omega_min", "coupling": "no",
                            "l": "2", "Omega_1": "10"})
    assert spec.omegas[0] == 10.0
    assert spec.tau_cyc == pytest.approx(30 * 2 * np.pi / (20 / 3))
    assert spec.coupling is False and spec.l == 2
    lc = cycle_spec_from({"kind": "local-carnot", "Omega_min": "2", "compression": "4"}, strict=True)
    assert lc.omegas == (8.0, 4.0, 2.0, 4.0) and lc.strict
    with pytest.raises(ConfigError):
        cycle_spec_from({"T_h": "1"})
    with pytest.raises(ConfigError):
        cycle_spec_from({"kind": "diesel"})
    with pytest.raises(ConfigError):
        cycle_spec_from({"kind": "local-otto", "strict": "maybe"})


def test_sweep_values():
    assert sweep_values({"sweep_values": "1, 2"}) == [1.0, 2.0]
    assert sweep_values({"sweep_min": "1", "sweep_max": "100", "sweep_n": "3"}) == pytest.approx([1, 10, 100])
    lin = sweep_values({"k_d_min": "0", "k_d_max": "1", "k_d_n": "3", "k_d_scale": "linear"}, "k_d")
    assert lin == pytest.approx([0, 0.5, 1])
    for bad in ({}, {"sweep_values": ""}, {"sweep_min": "1", "sweep_max": "2", "sweep_n": "0"},
                {"sweep_min": "1", "sweep_max": "2", "sweep_scale": "cubic"}):
        with pytest.raises(ConfigError):
            sweep_values(bad)
