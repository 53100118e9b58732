import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from helpers import ref_hitting
from setcsp.acac import ExplicitGraph, from_explicit, hypercube, path_graph, star_graph
from setcsp.core import ValidationError
from setcsp.walk import (DELTA_CAP, VerifierParams, WalkConfig, check_escape_lemma, escape_step_budget,
                         hitting_probability, lazy_walk, ma_verify, trial_rng)

seeds = st.integers(0, 2**64 - 1)


def test_parameters_are_frozen():
    p = VerifierParams(Fraction(1, 8), 3, 7)
    assert (p.q1, p.q2, p.trials) == (100189, 96, 672)
    p = VerifierParams(Fraction(1, 4), 1, 3)
    assert (p.q2, p.trials) == (16, 48)
    # an edgeless instance still gets positive walk lengths
    assert VerifierParams(Fraction(1, 2), 0, 2).q2 == 8


def test_parameter_validation():
    with pytest.raises(ValidationError):
        VerifierParams(None, 3, 4)
    with pytest.raises(ValidationError):
        VerifierParams(Fraction(3, 2), 3, 4)
    with pytest.raises(ValidationError):
        VerifierParams.for_instance(from_explicit(hypercube(2)))
    with pytest.raises(ValidationError):
        WalkConfig(10, 10, 0, Fraction(1, 3))


def test_rng_streams_are_reproducible_and_distinct():
    a = trial_rng(42, 3).random(5)
    assert list(a) == list(trial_rng(42, 3).random(5))
    assert list(a) != list(trial_rng(42, 4).random(5))
    assert list(a) != list(trial_rng(43, 3).random(5))


@given(seeds, st.integers(2, 5), st.booleans())
def test_scalar_and_vector_engines_agree(seed, q, audit):
    rng = random.Random(seed)
    g = hypercube(q, marked=rng.sample(range(1 << q), 1))
    acac = from_explicit(g, Fraction(1, 4))
    params = VerifierParams.for_instance(acac)
    start = g.label(next(v for v in range(1 << q) if v not in g.marked))
    kw = dict(audit=audit, trials_override=12, steps_override=rng.randint(1, 40))
    a = ma_verify(acac, start, params, seed, engine="scalar", **kw)
    b = ma_verify(acac, start, params, seed, engine="vector", batch=5, **kw)
    assert a == b


@given(seeds)
def test_single_walk_matches_engine_hit_step(seed):
    g = path_graph(8, marked=[7])
    acac = from_explicit(g, Fraction(1, 4))
    out = lazy_walk(acac, "000", 200, trial_rng(seed, 0))
    res = ma_verify(acac, "000", VerifierParams.for_instance(acac), seed, trials_override=1,
                    steps_override=200, engine="vector")
    assert out.hit == (not res.accepted)
    if out.hit:
        assert out.step == res.first_hit_step and out.vertex == "111"


def test_marked_witness_rejects_at_once():
    acac = from_explicit(hypercube(3, marked=[5]), Fraction(1, 4))
    res = ma_verify(acac, "101", VerifierParams.for_instance(acac), 0)
    assert res.verdict == "reject" and res.first_hit_step == 0 and res.trials_run == 1


def test_clean_component_always_accepts():
    g = ExplicitGraph.from_edges(4, [(0, 1), (2, 3)], marked=[3])
    acac = from_explicit(g, Fraction(1, 4))
    res = ma_verify(acac, "00", VerifierParams.for_instance(acac), 5, audit=True)
    assert res.accepted and res.trials_run == res.config.trials


def test_audit_runs_every_trial():
    acac = from_explicit(star_graph(3, marked=[1, 2, 3]), Fraction(1, 2))
    params = VerifierParams.for_instance(acac)
    quick = ma_verify(acac, "00", params, 9)
    full = ma_verify(acac, "00", params, 9, audit=True)
    assert quick.first_hit_trial == full.first_hit_trial == 0
    assert quick.trials_run == 1 and full.trials_run == params.trials


def test_empirical_hit_rate_matches_exact_probability():
    g = path_graph(4, marked=[3])
    acac = from_explicit(g, Fraction(1, 4))
    exact = float(hitting_probability(g, 0, 6))
    hits = sum(lazy_walk(acac, "00", 6, trial_rng(11, t)).hit for t in range(4000))
    assert abs(hits / 4000 - exact) < 0.03


@given(seeds, st.integers(3, 8), st.integers(0, 12))
def test_hitting_dp_matches_fraction_recursion(seed, k, steps):
    rng = random.Random(seed)
    G = nx.gnp_random_graph(k, 0.5, seed=rng.randrange(2**31))
    g = ExplicitGraph.from_edges(k, G.edges(), marked=[rng.randrange(k)])
    start = rng.randrange(k)
    assert hitting_probability(g, start, steps) == ref_hitting(g.adjacency, g.marked, start, steps)


def test_hitting_probability_is_monotone():
    g = hypercube(3, marked=[0])
    probs = [hitting_probability(g, 7, k) for k in range(10)]
    assert probs == sorted(probs)
    assert probs[:3] == [0, 0, 0]
    assert probs[3] == Fraction(1, 8) * Fraction(2, 3) * Fraction(1, 3)


def test_escape_budget_formula():
    assert escape_step_budget(3, Fraction(3, 7), 3) == 4422


def test_escape_lemma_reports():
    rep = check_escape_lemma(hypercube(3, marked=[0]))
    assert rep.hypothesis_met and rep.holds and not rep.clamped
    assert rep.delta == Fraction(3, 7) and rep.threshold == Fraction(1, 28)
    # a star with its center marked: every leaf set has ratio 1, clamped below 1/2
    rep = check_escape_lemma(star_graph(4, marked=[0]))
    assert rep.clamped and rep.delta == DELTA_CAP and rep.holds
    # no boundary at all: the hypothesis fails and is reported, not raised
    rep = check_escape_lemma(ExplicitGraph.from_edges(4, [(0, 1), (2, 3)], marked=[3]))
    assert not rep.hypothesis_met and rep.holds is None
    rep = check_escape_lemma(hypercube(3, marked=[0]), d=2)
    assert not rep.hypothesis_met
    with pytest.raises(ValidationError):
        check_escape_lemma(hypercube(2))


def test_escape_report_json_uses_rationals():
    obj = check_escape_lemma(path_graph(4, marked=[0])).to_json()
    assert obj["delta"] == "1/3" and obj["holds"] is True
