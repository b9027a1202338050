import io
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given

from pmatch import oracles
from pmatch.corpus import chain_corpus, cycle, grid
from pmatch.exact import count_omega
from pmatch.gadgets import torpid_gadget
from pmatch.graph import PERFECT, HolePattern, Matching
from pmatch.mcmc import (ChainModel, StateSpaceTooLarge, broder_step, build_chain_model,
                         conductance, constant_weights, detailed_balance_error, eq2_weights,
                         is_symmetric, jsv_step, jsv_weights, mixing_time, power_iteration,
                         read_weights, row_sum_error, simulate, stationarity_residual, tv_profile)
from pmatch.structure import maximum_matching

from conftest import graphs

SMALL = [(name, g) for name, g in chain_corpus() if sum(count_omega(g)) and len(g) <= 8]


@pytest.mark.parametrize("name,g", SMALL[:20], ids=[n for n, _ in SMALL[:20]])
def test_support_matches_one_step_rule(name, g):
    model = build_chain_model(g)
    for s in range(len(model)):
        m = model.matching(s)
        row = model.kernel.getrow(s)
        targets = {frozenset(model.matching(t).pairs) for t in row.indices if t != s}
        assert targets == oracles.one_step_targets(g, m) - {m.pairs}


@given(graphs(min_n=2, max_n=8))
def test_models_are_valid(g):
    if sum(count_omega(g)) == 0:
        with pytest.raises(StateSpaceTooLarge):
            build_chain_model(g)
        return
    broder = build_chain_model(g)
    assert row_sum_error(broder) < 1e-12
    assert is_symmetric(broder)
    jsv = build_chain_model(g, jsv_weights(g))
    assert row_sum_error(jsv) < 1e-12
    assert detailed_balance_error(jsv) < 1e-10
    assert stationarity_residual(jsv) < 1e-12
    masses = list(jsv.class_masses().values())
    assert max(masses) - min(masses) < 1e-12


def test_c4_kernel_by_hand():
    g = cycle(4)
    model = build_chain_model(g)
    assert len(model) == 6
    perfect = model.state_of(Matching.of([(0, 1), (2, 3)]))
    near = model.state_of(Matching.of([(2, 3)]))
    P = model.kernel.toarray()
    assert P[perfect, near] == 0.5
    # holes 0, 1 adjacent: re-adding has probability 2/n; shifts 1/(2n) each
    assert P[near, perfect] == 0.5
    shifted = model.state_of(Matching.of([(1, 2)]))
    assert P[near, shifted] == 1 / 8
    np.testing.assert_allclose(model.pi, np.full(6, 1 / 6))


def test_power_iteration_finds_pi():
    model = build_chain_model(torpid_gadget(1).graph, jsv_weights(torpid_gadget(1).graph))
    x, _ = power_iteration(model)
    assert np.abs(x - model.pi).sum() < 1e-9


def test_weights_must_cover_patterns():
    g = cycle(4)
    w = jsv_weights(g)
    w.pop(PERFECT)
    with pytest.raises(KeyError):
        build_chain_model(g, w)
    w[PERFECT] = 0.0
    with pytest.raises(ValueError):
        build_chain_model(g, w)


def test_state_cap():
    with pytest.raises(StateSpaceTooLarge):
        build_chain_model(grid(2, 4), cap=5)


def test_eq2_weights_skip_empty_patterns():
    table = {PERFECT: 2, HolePattern.near(0, 1): 4, HolePattern.near(0, 3): 0}
    assert eq2_weights(table) == {PERFECT: 0.5, HolePattern.near(0, 1): 0.25}


def test_read_weights():
    w = read_weights(io.StringIO("# weights\nperfect 2\n1 0 0.5\n"))
    assert w == {PERFECT: 2.0, HolePattern.near(0, 1): 0.5}
    with pytest.raises(ValueError, match="line 1"):
        read_weights(["perfect"])
    with pytest.raises(ValueError):
        read_weights(["0 1 -3"])


def test_two_state_conductance_and_mixing():
    p = 0.1
    model = ChainModel.from_kernel([[1 - p, p], [p, 1 - p]], [0.5, 0.5])
    rep = conductance(model, [0])
    assert rep.phi == pytest.approx(p)
    assert rep.mixing_lower_bound == pytest.approx(2.5)
    # worst TV after t steps is 0.8^t / 2
    assert mixing_time(model).steps == 4
    assert tv_profile(model, 3) == pytest.approx(0.8 ** 3 / 2)
    assert mixing_time(model, delta=0.5).steps == 0


def test_cut_on_heavy_side_gives_no_bound():
    model = ChainModel.from_kernel([[0.5, 0.5], [0.25, 0.75]], [1 / 3, 2 / 3])
    assert conductance(model, [1]).mixing_lower_bound is None
    with pytest.raises(ValueError):
        conductance(model, [0, 1])


def test_mixing_time_cap_and_dense_limit():
    model = ChainModel.from_kernel([[1.0, 0.0], [0.0, 1.0]], [0.5, 0.5])
    assert mixing_time(model, t_max=64) == (64, True)
    with pytest.raises(StateSpaceTooLarge):
        mixing_time(build_chain_model(cycle(6)), dense_cap=3)


@pytest.mark.parametrize("k,phi,t_jsv,t_broder", [
    (1, 1 / 30, 134, 127),
    (2, 1 / 90, 510, 614),
])
def test_torpid_values(k, phi, t_jsv, t_broder):
    h = torpid_gadget(k)
    g = h.graph
    jsv = build_chain_model(g, jsv_weights(g))
    rep = conductance(jsv, jsv.pattern_mask(HolePattern.near(h["u"], h["v"])))
    assert rep.phi == pytest.approx(phi, rel=1e-12)
    assert mixing_time(jsv).steps == t_jsv
    assert mixing_time(build_chain_model(g)).steps == t_broder


def test_same_seed_same_trajectory():
    g = grid(2, 4)
    m = maximum_matching(g)
    a = simulate(g, m, 500, seed=9)
    b = simulate(g, m, 500, seed=9)
    assert a.final == b.final and a.occupancy == b.occupancy


def test_constant_weights_replay_broder():
    g = torpid_gadget(1).graph
    m = maximum_matching(g)
    a = simulate(g, m, 3000, seed=4)
    b = simulate(g, m, 3000, seed=4, weights=constant_weights(g))
    assert a.final == b.final and a.occupancy == b.occupancy
    assert broder_step(g, m, 7) == jsv_step(g, m, constant_weights(g), 7)


def test_step_frequencies_follow_kernel():
    g = cycle(6)
    w = jsv_weights(g)
    model = build_chain_model(g, w)
    start = Matching.of([(1, 2), (3, 4)])
    rng = random.Random(1)
    counts = Counter(model.state_of(jsv_step(g, start, w, rng)) for _ in range(20000))
    row = model.kernel.getrow(model.state_of(start)).toarray().ravel()
    for t, p in enumerate(row):
        assert abs(counts[t] / 20000 - p) < 0.015


def test_long_run_approaches_pattern_masses():
    g = cycle(6)
    w = jsv_weights(g)
    model = build_chain_model(g, w)
    out = simulate(g, maximum_matching(g), 40000, seed=2, weights=w, model=model,
                   checkpoints=[1000, 40000])
    assert out.checkpoints[-1][0] == 40000
    assert out.checkpoints[-1][2] < 0.03
    assert out.fraction(lambda p: p.is_perfect) == out.perfect_visits / 40001


def test_start_outside_omega_rejected():
    g = cycle(6)
    with pytest.raises(ValueError):
        simulate(g, Matching.of([(0, 1)]), 10, seed=0)


def test_state_lookup_rejects_unknown_matching():
    model = build_chain_model(cycle(4))
    with pytest.raises(ValueError):
        model.state_of(Matching.of([(0, 2)]))
