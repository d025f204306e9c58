import math
import random
from fractions import Fraction as Fr

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsnsim.model import FieldGeometry, Position, RadioParams
from wsnsim.monch import (
    bs_distance,
    cluster_capacity,
    field_diagonal,
    form_clusters,
    optimal_head_count,
    optimal_head_count_raw,
    plan_round,
    rank_head_candidates,
)

from .conftest import field_with_bs, make_node, rel_close


def kopt_oracle(bs, length, width, n, pt):
    """High-precision evaluation of the head-count formula from exact default constants."""
    mpmath.mp.dps = 40
    e_elec, e_da, e_fs = Fr(50, 10**9), Fr(5, 10**9), Fr(13, 10**15)
    eh = (e_elec + e_da) * 6400 + e_fs * 6400
    ec = e_elec * 200 + e_fs * 6400
    ratio = mpmath.mpf(eh.numerator) / eh.denominator / (mpmath.mpf(ec.numerator) / ec.denominator)
    diag = mpmath.sqrt(length**2 + width**2)
    return mpmath.sqrt(ratio * 2 * pt * diag / (bs[0] ** 2 + bs[1] ** 2) * n)


def test_bs_distance():
    assert bs_distance(field_with_bs(50, 50)) == pytest.approx(70.7106781186548, rel=1e-12)
    assert bs_distance(field_with_bs(3, 4)) == 5.0
    assert bs_distance(field_with_bs(0, 100)) == 100.0


def test_field_diagonal():
    assert field_diagonal(FieldGeometry()) == pytest.approx(math.sqrt(20000), rel=1e-15)
    assert field_diagonal(field_with_bs(1, 1, length=3, width=4)) == 5.0


def test_kopt_defaults_bs_center():
    field = field_with_bs(50, 50)
    raw = optimal_head_count_raw(RadioParams(), field, 100, math.pi)
    oracle = kopt_oracle((50, 50), 100, 100, 100, mpmath.pi)
    assert rel_close(raw, float(oracle), 1e-12)
    assert raw == pytest.approx(25.01, abs=0.01)
    assert optimal_head_count(RadioParams(), field, 100, math.pi) == 25


def test_kopt_acceptance_geometry():
    # BS on the top edge midpoint, as used by the paired comparison
    raw = optimal_head_count_raw(RadioParams(), FieldGeometry(), 100, math.pi)
    assert rel_close(raw, float(kopt_oracle((50, 100), 100, 100, 100, mpmath.pi)), 1e-12)
    assert optimal_head_count(RadioParams(), FieldGeometry(), 100, math.pi) == 16


def test_kopt_clamps():
    assert optimal_head_count(RadioParams(), field_with_bs(50, 50), 1, math.pi) == 1
    far = field_with_bs(1e6, 1e6)
    assert optimal_head_count(RadioParams(), far, 100, math.pi) == 1
    near = field_with_bs(0.01, 0)
    assert optimal_head_count(RadioParams(), near, 10, math.pi) == 10


def test_kopt_rounds_half_up(monkeypatch):
    import wsnsim.monch as monch

    monkeypatch.setattr(monch, "optimal_head_count_raw", lambda *a: 4.5)
    assert monch.optimal_head_count(RadioParams(), FieldGeometry(), 100, 1.0) == 5
    monkeypatch.setattr(monch, "optimal_head_count_raw", lambda *a: 4.4999)
    assert monch.optimal_head_count(RadioParams(), FieldGeometry(), 100, 1.0) == 4


def test_kopt_scale_consistency():
    radio = RadioParams()
    base = FieldGeometry(100, 100, Position(50, 50))
    scaled = FieldGeometry(200, 200, Position(100, 100))
    ratio = optimal_head_count_raw(radio, scaled, 100, math.pi) / optimal_head_count_raw(radio, base, 100, math.pi)
    assert rel_close(ratio, math.sqrt(0.5), 1e-12)


@pytest.mark.parametrize("alive, kopt, cap", [(100, 25, 4), (100, 1, 100), (10, 3, 4), (7, 7, 1)])
def test_cluster_capacity(alive, kopt, cap):
    assert cluster_capacity(alive, kopt) == cap


def test_rank_by_distance():
    field = field_with_bs(0, 100)
    nodes = [make_node(0, 0, 70), make_node(1, 0, 90), make_node(2, 0, 80)]
    assert rank_head_candidates(nodes, field) == [1, 2, 0]


def test_rank_tie_prefers_energy():
    field = field_with_bs(0, 100)
    nodes = [make_node(0, 10, 100, energy=1.0), make_node(1, -10, 100, energy=1.5), make_node(2, 0, 0, energy=0.2)]
    # mean is 0.9, both equidistant nodes pass the filter
    assert rank_head_candidates(nodes, field) == [1, 0]


def test_rank_tie_then_lower_id():
    field = field_with_bs(0, 100)
    nodes = [make_node(5, 10, 100), make_node(2, -10, 100)]
    assert rank_head_candidates(nodes, field) == [2, 5]


def test_rank_filters_below_mean_energy():
    field = field_with_bs(0, 100)
    nodes = [make_node(0, 0, 99, energy=0.1), make_node(1, 0, 50, energy=2.0), make_node(2, 0, 10, energy=2.0)]
    assert rank_head_candidates(nodes, field) == [1, 2]


def test_rank_ignores_dead():
    field = field_with_bs(0, 100)
    nodes = [make_node(0, 0, 99, alive=False, energy=0.0), make_node(1, 0, 50)]
    assert rank_head_candidates(nodes, field) == [1]


def brute_rank_front(pool, bs):
    mean = math.fsum(n.residual_energy for n in pool) / len(pool)
    eligible = [n for n in pool if n.residual_energy >= mean] or pool
    return min(
        eligible,
        key=lambda n: (math.dist((n.position.x, n.position.y), bs), -n.residual_energy, n.id),
    ).id


def random_nodes(rnd, count):
    return [make_node(i, rnd.uniform(0, 100), rnd.uniform(0, 100), energy=rnd.uniform(0.1, 2.0)) for i in range(count)]


@pytest.mark.parametrize("instance", range(30))
def test_rank_front_matches_brute_force(instance):
    rnd = random.Random(1000 + instance)
    nodes = random_nodes(rnd, 30)
    field = field_with_bs(rnd.uniform(1, 100), rnd.uniform(1, 120))
    bs = (field.bs_position.x, field.bs_position.y)
    assert rank_head_candidates(nodes, field)[0] == brute_rank_front(nodes, bs)


def test_single_cluster_takes_everyone():
    nodes = [make_node(i, 10 * i, 0) for i in range(5)]
    plan = form_clusters(nodes, field_with_bs(0, 0.5), kopt=1, capacity=5)
    assert plan.head_order == (0,)
    assert plan.assignment.membership == {1: 0, 2: 0, 3: 0, 4: 0}


def test_collinear_hand_trace():
    nodes = [make_node(i, x, 0) for i, x in enumerate([10, 20, 80, 90])]
    plan = form_clusters(nodes, field_with_bs(0, 0), kopt=2, capacity=2)
    assert plan.head_order == (0, 2)
    assert plan.assignment.membership == {1: 0, 3: 2}
    assert not plan.assignment.overflow


def test_leftovers_join_nearest_head():
    nodes = [make_node(i, x, 0) for i, x in enumerate([10, 20, 30, 40, 95])]
    plan = form_clusters(nodes, field_with_bs(0, 0), kopt=2, capacity=2)
    assert plan.head_order == (0, 2)
    assert plan.assignment.membership == {1: 0, 3: 2, 4: 2}
    assert plan.assignment.overflow == {4}


def replay_check(plan, nodes, field):
    """Re-run each formation step against the pool it saw and check the greedy choice."""
    bs = (field.bs_position.x, field.bs_position.y)
    pool = {n.id: n for n in nodes if n.alive}
    members_of = {}
    for m, h in plan.assignment.membership.items():
        if m not in plan.assignment.overflow:
            members_of.setdefault(h, set()).add(m)
    for head in plan.head_order:
        assert head == brute_rank_front(list(pool.values()), bs)
        h = pool.pop(head)
        got = members_of.get(head, set())
        assert len(got) <= plan.capacity - 1
        by_distance = sorted(
            pool.values(), key=lambda n: (math.dist((n.position.x, n.position.y), (h.position.x, h.position.y)), n.id)
        )
        assert got == {n.id for n in by_distance[: plan.capacity - 1]}
        for m in got:
            del pool[m]
    assert set(pool) == set(plan.assignment.overflow)


def assert_covers_once(plan, nodes):
    a = plan.assignment
    alive = sorted(n.id for n in nodes if n.alive)
    assert sorted([*a.heads, *a.membership]) == alive
    assert len(a.heads) == len(plan.head_order)
    assert set(a.membership.values()) <= a.heads


@pytest.mark.parametrize("instance", range(100))
def test_form_clusters_step_replay(instance):
    rnd = random.Random(instance)
    nodes = random_nodes(rnd, 25)
    field = field_with_bs(rnd.uniform(1, 100), rnd.uniform(1, 120))
    kopt = rnd.randint(1, 8)
    capacity = rnd.choice([cluster_capacity(25, kopt), rnd.randint(1, 6)])
    plan = form_clusters(nodes, field, kopt, capacity)
    replay_check(plan, nodes, field)
    assert_covers_once(plan, nodes)


def test_plan_round_defaults():
    rnd = random.Random(3)
    nodes = [make_node(i, rnd.uniform(0, 100), rnd.uniform(0, 100)) for i in range(100)]
    plan = plan_round(nodes, FieldGeometry(), RadioParams(), math.pi)
    assert plan.kopt == 16 and plan.capacity == 7
    assert plan.head_order[0] == rank_head_candidates(nodes, FieldGeometry())[0]
    assert_covers_once(plan, nodes)
    for h in plan.assignment.heads:
        assert len(plan.assignment.members_of(h)) <= plan.capacity


pt = st.floats(min_value=0, max_value=100, allow_nan=False)


@settings(max_examples=50)
@given(
    st.lists(st.tuples(pt, pt, st.floats(min_value=0.01, max_value=2.0)), min_size=1, max_size=30),
    st.integers(1, 10),
    st.integers(1, 10),
    st.randoms(use_true_random=False),
)
def test_form_clusters_order_independent(points, kopt, capacity, rnd):
    nodes = [make_node(i, x, y, energy=e) for i, (x, y, e) in enumerate(points)]
    field = field_with_bs(50, 100)
    plan = form_clusters(nodes, field, kopt, capacity)
    shuffled = nodes[:]
    rnd.shuffle(shuffled)
    assert form_clusters(shuffled, field, kopt, capacity) == plan
    assert_covers_once(plan, nodes)
