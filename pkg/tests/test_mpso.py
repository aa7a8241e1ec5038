from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jrcc.bargaining import evaluate
from jrcc.channel import draw_channels
from jrcc.mpso import (SwarmConfig, SwarmState, allocation_bounds, decode, init_state,
                       optimize_allocation, position_dimension, run, step)
from jrcc.scenario import load_bundled


def sphere(x):
    return -float(np.sum(x ** 2))


def rastrigin(x):
    return -float(10 * x.size + np.sum(x ** 2 - 10 * np.cos(2 * np.pi * x)))


def textbook_pso(fitness, lower, upper, particles, iterations, w, c1, c2, vfrac, seed):
    """Plain global-best PSO, written particle by particle."""
    rng = np.random.default_rng(seed)
    D = len(lower)
    x = rng.uniform(lower, upper, size=(particles, D))
    v = np.zeros((particles, D))
    pbest = x.copy()
    pval = [fitness(xi) for xi in x]
    g = int(np.argmax(pval))
    gbest, gval = pbest[g].copy(), pval[g]
    history = []
    vmax = vfrac * (upper - lower)
    for _ in range(iterations):
        r1 = rng.uniform(size=(particles, D))
        r2 = rng.uniform(size=(particles, D))
        for i in range(particles):
            for d in range(D):
                vel = w * v[i, d] + c1 * r1[i, d] * (pbest[i, d] - x[i, d]) \
                    + c2 * r2[i, d] * (gbest[d] - x[i, d])
                v[i, d] = min(max(vel, -vmax[d]), vmax[d])
                x[i, d] = min(max(x[i, d] + v[i, d], lower[d]), upper[d])
        for i in range(particles):
            f = fitness(x[i])
            if f > pval[i]:
                pval[i], pbest[i] = f, x[i].copy()
        for i in range(particles):
            if pval[i] > gval:
                gval, gbest = pval[i], pbest[i].copy()
        history.append(gval)
    return gbest, gval, history


def test_inertia_schedule():
    cfg = SwarmConfig(iterations=300)
    assert cfg.inertia(0) == 0.9
    assert cfg.inertia(299) == pytest.approx(0.4, abs=1e-15)
    assert cfg.baseline().inertia(150) == 0.9


def test_config_validation():
    with pytest.raises(ValueError):
        SwarmConfig(particles=1)
    with pytest.raises(ValueError):
        SwarmConfig(inertia_start=0.3, inertia_end=0.4)


def test_baseline_matches_textbook():
    lower, upper = np.full(4, -5.12), np.full(4, 5.12)
    cfg = SwarmConfig(particles=8, iterations=60, seed=42).baseline()
    best_x, best, trace = run(cfg, rastrigin, (lower, upper))
    ref_x, ref, history = textbook_pso(rastrigin, lower, upper, 8, 60, 0.9, 2.0, 2.0, 0.2, 42)
    np.testing.assert_allclose(trace.global_best, history, rtol=0, atol=1e-12)
    np.testing.assert_allclose(best_x, ref_x, rtol=0, atol=1e-12)


def test_fixed_point():
    cfg = SwarmConfig(particles=4, iterations=10, local_search_probability=0.0)
    x = np.tile([0.3, -0.2], (4, 1))
    vals = np.array([sphere(r) for r in x])
    state = SwarmState(x.copy(), np.zeros_like(x), vals.copy(), x.copy(), vals.copy(), x[0].copy(),
                       float(vals[0]), np.full(2, -1.0), np.full(2, 1.0), np.random.default_rng(0))
    step(state, cfg, sphere)
    np.testing.assert_array_equal(state.positions, x)
    np.testing.assert_array_equal(state.velocities, 0)
    assert state.global_best_value == vals[0] and state.iteration == 1


def test_sphere():
    bounds = (np.full(3, -5.0), np.full(3, 5.0))
    _, best, _ = run(SwarmConfig(particles=10, iterations=200, seed=0), sphere, bounds)
    assert best >= -1e-4


def test_rastrigin_mpso_beats_pso_on_average():
    bounds = (np.full(2, -5.12), np.full(2, 5.12))
    m, p = [], []
    for seed in range(20):
        cfg = SwarmConfig(particles=10, iterations=200, seed=seed)
        m.append(-run(cfg, rastrigin, bounds)[1])
        p.append(-run(cfg.baseline(), rastrigin, bounds)[1])
    assert np.mean(m) <= np.mean(p)


def test_trace_monotone_and_box():
    bounds = (np.full(3, -1.0), np.full(3, 2.0))
    cfg = SwarmConfig(particles=6, iterations=50, seed=3)
    state = init_state(cfg, rastrigin, bounds)
    prev = state.global_best_value
    for _ in range(cfg.iterations):
        step(state, cfg, rastrigin)
        assert np.all(state.positions >= -1.0) and np.all(state.positions <= 2.0)
        assert state.global_best_value >= prev
        assert state.global_best_value == state.personal_best_values.max()
        prev = state.global_best_value


def test_deterministic_across_mappers():
    bounds = (np.full(3, -5.12), np.full(3, 5.12))
    cfg = SwarmConfig(particles=10, iterations=40, seed=9)
    a = run(cfg, rastrigin, bounds)
    with ThreadPoolExecutor(4) as pool:
        b = run(cfg, rastrigin, bounds, mapper=pool.map)
    np.testing.assert_array_equal(a[0], b[0])
    assert a[2].global_best == b[2].global_best


def test_state_copy_is_independent():
    bounds = (np.zeros(2), np.ones(2))
    cfg = SwarmConfig(particles=4, iterations=5, seed=1)
    s = init_state(cfg, sphere, bounds)
    c = s.copy()
    step(s, cfg, sphere)
    step(c, cfg, sphere)
    np.testing.assert_array_equal(s.positions, c.positions)


def test_decode_examples(fig5):
    x = np.concatenate([[1, 1, 1], [0, 0, 0], [0.5, 0.25, 0.25], [1.0]])
    a = decode(x, fig5)
    assert a.modules_per_user == (5, 2, 2)
    assert sum(a.power_per_user) == pytest.approx(fig5.budgets.total_power)
    assert a.bandwidth_per_user == (fig5.budgets.total_bandwidth / 3,) * 3
    assert position_dimension(fig5) == 10
    with pytest.raises(ValueError):
        decode(np.zeros(9), fig5)


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=10, max_size=10), st.booleans())
def test_decode_always_within_budgets(values, opt_bw):
    sc = load_bundled("paper_fig5")
    sc = replace(sc, budgets=replace(sc.budgets, optimize_bandwidth=opt_bw))
    a = decode(np.array(values), sc)
    assert a.within_budgets(sc)
    assert min(a.power_per_user) >= 0 and min(a.bandwidth_per_user) >= 0
    assert sum(a.modules_per_user) == sc.budgets.total_modules


def test_optimize_allocation_feasible(fig5):
    ch = draw_channels(fig5, 0)
    alloc, best, trace = optimize_allocation(fig5, ch, SwarmConfig(iterations=30, seed=0))
    rep = evaluate(fig5, ch, alloc)
    assert rep.feasible and best == pytest.approx(rep.nash_log, rel=1e-12)
    assert np.all(np.diff(trace.global_best) >= 0)
    lo, hi = allocation_bounds(fig5)
    assert lo.shape == hi.shape == (10,)
