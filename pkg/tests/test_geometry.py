import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lisout.config import ConfigError, SystemConfig
from lisout.geometry import (Device, assign_resource_groups, build_device_grid, build_lis_unit, lattice_offsets,
                             set_transmit_power, units_overlap)


@pytest.mark.parametrize("mult,count", [(2, 81), (4, 25), (8, 9)])
def test_device_counts(mult, count):
    cfg = SystemConfig(spacing=mult * 0.25)
    assert len(build_device_grid(cfg)) == count


def test_grid_positions_and_power():
    devs = build_device_grid(SystemConfig(spacing=2.0))
    assert [d.position for d in devs] == [(x, y, 1.0) for y in (0.0, 2.0, 4.0) for x in (-2.0, 0.0, 2.0)]
    assert all(d.snr == pytest.approx(10 ** 0.3 * 4 * math.pi) for d in devs)
    assert [d.id for d in devs] == list(range(9))


def test_single_point_region():
    devs = build_device_grid(SystemConfig(region_x=(0.5, 0.5), region_y=(1.0, 1.0)))
    assert len(devs) == 1 and devs[0].position == (0.5, 1.0, 1.0)


def test_empty_region_rejected():
    cfg = SystemConfig()
    object.__setattr__(cfg, "region_x", (1.0, 0.0))  # bypass construction-time validation
    with pytest.raises(ConfigError):
        build_device_grid(cfg)


def test_small_lattice():
    unit = build_lis_unit(Device(0, (0.0, 0.0, 1.0)), SystemConfig(antennas=4))
    assert unit.spacing == pytest.approx(0.25)
    assert sorted(set(np.round(unit.antennas[:, 0], 12))) == [-0.125, 0.125]
    assert unit.antennas.shape == (4, 3) and np.all(unit.antennas[:, 2] == 0)
    moved = build_lis_unit(Device(0, (1.0, 1.0, 1.0)), SystemConfig(antennas=4))
    assert sorted(set(np.round(moved.antennas[:, 0], 12))) == [0.875, 1.125]


def test_offsets():
    np.testing.assert_allclose(lattice_offsets(10, 0.25), -0.225 + 0.05 * np.arange(10))


def test_antenna_order_matches_kronecker():
    unit = build_lis_unit(Device(0, (0.0, 0.0, 1.0)), SystemConfig(antennas=9))
    off = lattice_offsets(3, 0.25)
    for a, b in itertools.product(range(3), range(3)):
        np.testing.assert_allclose(unit.antennas[a * 3 + b, :2], [off[a], off[b]])


@settings(max_examples=40, deadline=None)
@given(side=st.integers(1, 12), L=st.floats(0.01, 3.0), x=st.floats(-5, 5), y=st.floats(-5, 5))
def test_lattice_invariants(side, L, x, y):
    cfg = SystemConfig(antennas=side * side, half_side=L)
    unit = build_lis_unit(Device(0, (x, y, 1.0)), cfg)
    dl = 2 * L / side
    assert np.all(np.abs(unit.antennas[:, 0] - x) <= L - dl / 2 + 1e-9)
    assert np.all(np.abs(unit.antennas[:, 1] - y) <= L - dl / 2 + 1e-9)
    np.testing.assert_allclose(unit.antennas[:, :2].mean(axis=0), [x, y], atol=1e-9)


def _units(spacing, L=0.25, n=2):
    cfg = SystemConfig(half_side=L, spacing=spacing, antennas=4)
    devs = [Device(i, (i * spacing, 0.0, 1.0)) for i in range(n)]
    return [build_lis_unit(d, cfg) for d in devs]


def test_touching_units_share_a_group():
    a, b = _units(0.5)
    assert not units_overlap(a, b)
    assert len(assign_resource_groups([a, b])) == 1


def test_overlapping_units_split():
    a, b = _units(0.25)
    assert units_overlap(a, b)
    groups = assign_resource_groups([a, b])
    assert groups.groups == ((0,), (1,))
    assert groups.group_of(1) == 1


def test_dense_grid_single_group_bruteforce():
    cfg = SystemConfig(spacing=0.5)
    units = [build_lis_unit(d, cfg) for d in build_device_grid(cfg)]
    # independent rectangle check
    for u, v in itertools.combinations(units, 2):
        wx = 2 * 0.25 - abs(u.center[0] - v.center[0])
        wy = 2 * 0.25 - abs(u.center[1] - v.center[1])
        assert not (wx > 1e-12 and wy > 1e-12)
    assert len(assign_resource_groups(units)) == 1


def test_grouping_independent_of_order():
    cfg = SystemConfig(spacing=0.3, region_x=(0, 1.2), region_y=(0, 0.9))
    units = [build_lis_unit(d, cfg) for d in build_device_grid(cfg)]
    ref = assign_resource_groups(units)
    shuffled = units[:]
    random.Random(3).shuffle(shuffled)
    assert assign_resource_groups(shuffled) == ref
    assert assign_resource_groups(units) == ref  # idempotent
    assert sorted(itertools.chain(*ref)) == list(range(len(units)))
    for g in ref:
        for i, j in itertools.combinations(g, 2):
            assert not units_overlap(units[i], units[j])


def test_transmit_power():
    assert set_transmit_power(Device(0, (0, 0, 1.0)), 0.0) == 0.0
    assert set_transmit_power(Device(0, (0, 0, 1.0)), 1.0) == pytest.approx(12.566370614359172)
    assert set_transmit_power(Device(0, (0, 0, 2.0)), 1.0) == pytest.approx(16 * math.pi)
    with pytest.raises(ValueError):
        set_transmit_power(Device(0, (0, 0, 1.0)), -1.0)


def test_non_square_rejected():
    with pytest.raises(ConfigError):
        SystemConfig(antennas=99)
