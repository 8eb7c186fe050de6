import math

import numpy as np
import pytest

import sagnacsr as s


def test_sagnac_phase_earth_rate():
    cfg = s.SagnacConfig()
    cfg.angular_velocity = 7.292e-5
    expected = 8 * math.pi * 1.0 * 7.292e-5 / (632.8e-9 * 299792458.0)
    assert s.sagnac_phase(cfg) == pytest.approx(expected, rel=1e-12)


def test_nth_order_matches_closed_form():
    grid = s.period_grid(64 * 16)
    r = s.nth_order(grid, s.phase_schedule(8))
    assert r.order == 16
    assert r.fringe_count == 16
    closed = np.sin(8 * grid) ** 2
    assert np.max(np.abs(r.trace.values - closed)) <= 1e-9


def test_block_fields_dark_port():
    f = s.block_fields(s.sagnac_output(0.0), 0, 0.0, 4)
    assert f.e1.intensity() <= 1e-15
    assert f.e2.intensity() == pytest.approx(2 * s.physical_block_norm(1.0, 4))


def test_errors_are_typed():
    with pytest.raises(s.DomainError):
        s.phase_schedule(0)
    with pytest.raises(s.ConfigError):
        s.sagnac_output(0.1, s.NoiseSpec(s.NoiseKind.differential_arm, 0.5, 1))
    assert issubclass(s.ResolutionError, s.Error)


def test_parse_config():
    cfg = s.parse_config("[bank]\nblock_count = 8\n")
    assert cfg.bank.block_count == 8
    assert s.parse_config(cfg.serialize()) == cfg
    assert cfg.validate() == []
    diags = s.parse_config("[bank]\nblock_count = zero")
    assert diags == [(2, 15, "error", "expected integer")]


def test_poisson_detection_is_seeded():
    grid = s.period_grid(256)
    trace = s.nth_order(grid, s.phase_schedule(2)).trace
    model = s.DetectionModel(s.DetectionKind.poisson, 1e4, 7)
    a = s.detect(trace, model).values
    b = s.detect(trace, model).values
    assert np.array_equal(a, b)
