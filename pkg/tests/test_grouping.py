from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hetcache.analysis import expected_totals
from hetcache.grouping import enumerate_demands, group_users, worst_case_demand
from hetcache.model import ConfigError, Demand, SystemConfig

from conftest import EXAMPLE1_MU


def test_example1_grouping():
    cfg = SystemConfig(2, 8, 4, EXAMPLE1_MU)
    g = group_users(cfg, Demand((1, 2, 1, 2)))
    assert g.groups == ((1, 3), (2, 4))
    assert g.boundaries == (0, 2, 4)
    assert g.relabel == (1, 3, 2, 4)


def test_single_request():
    cfg = SystemConfig(3, 8, 4, (1, 0, 2, 0))
    g = group_users(cfg, Demand((1, 1, 1, 1)))
    assert g.groups == ((2, 4, 1, 3), (), ())
    assert g.boundaries == (0, 4, 4, 4)
    assert g.nonempty() == [1]


def test_permutation_demand():
    cfg = SystemConfig(3, 8, 3, (0, 0, 0))
    g = group_users(cfg, Demand((3, 2, 1)))
    assert g.groups == ((3,), (2,), (1,))
    assert g.boundaries == (0, 1, 2, 3)


@st.composite
def instances(draw):
    N = draw(st.integers(1, 4))
    K = draw(st.integers(1, 8))
    mu = tuple(draw(st.fractions(0, N, max_denominator=8)) for _ in range(K))
    d = tuple(draw(st.integers(1, N)) for _ in range(K))
    return SystemConfig(N, 8, K, mu), Demand(d)


@given(instances())
def test_grouping_invariants(inst):
    cfg, demand = inst
    g = group_users(cfg, demand)
    assert sorted(g.relabel) == list(range(1, cfg.K + 1))
    assert g.boundaries[0] == 0 and g.boundaries[-1] == cfg.K
    # relabeled demand follows the staircase d_k = i on (S_{i-1}, S_i]
    relabeled = [demand[u] for u in g.relabel]
    assert relabeled == g.canonical_demand()
    for i in range(1, cfg.N + 1):
        lo, hi = g.boundaries[i - 1], g.boundaries[i]
        assert relabeled[lo:hi] == [i] * (hi - lo)
        caps = [cfg.capacity(u) for u in g.relabel[lo:hi]]
        assert caps == sorted(caps)


def test_worst_case_example1():
    cfg = SystemConfig(2, 8, 4, EXAMPLE1_MU)
    assert worst_case_demand(cfg).requests == (1, 2, 1, 2)


def test_worst_case_distinct_when_files_suffice():
    cfg = SystemConfig(5, 8, 3, (0, 1, 2))
    assert worst_case_demand(cfg).requests == (1, 2, 3)


def test_worst_case_follows_capacity_order():
    cfg = SystemConfig(2, 8, 4, (1, Fraction(1, 2), 1, 0))
    # order: 4, 2, 1, 3 (tie 1 < 3 by index)
    assert worst_case_demand(cfg).requests == (1, 2, 2, 1)


def test_enumeration_counts():
    assert len(list(enumerate_demands(SystemConfig(2, 1, 2, (0, 0))))) == 4
    assert len(list(enumerate_demands(SystemConfig(1, 1, 5, (0,) * 5)))) == 1
    ds = [d.requests for d in enumerate_demands(SystemConfig(3, 1, 3, (0, 0, 0)))]
    assert len(ds) == 27 and len(set(ds)) == 27


def test_enumeration_cap():
    with pytest.raises(ConfigError):
        list(enumerate_demands(SystemConfig(10, 1, 7, (0,) * 7)))


@pytest.mark.parametrize(
    "mu",
    [(0, Fraction(1, 3), Fraction(2, 3), 1), (Fraction(1, 2),) * 4, EXAMPLE1_MU, (2, 0, 1, Fraction(1, 4))],
)
def test_worst_case_attains_enumeration_max(mu):
    cfg = SystemConfig(2, 8, 4, mu)
    worst = expected_totals(cfg, worst_case_demand(cfg)).rate
    assert worst == max(expected_totals(cfg, d).rate for d in enumerate_demands(cfg))
