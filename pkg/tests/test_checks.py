"""Invariant suites: green on the corpus, and they catch sabotage."""

import dataclasses
import random

from qspectral.checks import (corpus, exemplars, run_all, suite_oracle,
                              suite_pointwise, suite_regions)
from qspectral.opmodel import Membership, classify
from qspectral.specio import operator_dump


def test_corpus_is_deterministic():
    a = [operator_dump(op) for op in corpus(42, 20)]
    b = [operator_dump(op) for op in corpus(42, 20)]
    assert a == b
    c = [operator_dump(op) for op in corpus(43, 20)]
    assert a != c


def test_corpus_starts_with_exemplars():
    ops = corpus(0, 15)
    ex = exemplars()
    assert ops[:len(ex)] == ex


def test_suites_green_on_small_corpus():
    ops = corpus(11, 14)
    results = run_all(ops, 11, include_oracle=False, include_matrices=True)
    for r in results:
        assert r.cases > 0, r.name
        assert r.failures == 0, (r.name, r.counterexamples)


def test_oracle_suite_green_on_exemplars():
    results = suite_oracle(exemplars()[:5], random.Random(3))
    (res,) = results
    assert res.cases > 0 and res.failures == 0, res.counterexamples


def _sabotaged(op, p):
    """A classifier that reports every Weyl verdict inverted."""
    cls = classify(op, p)
    if cls.weyl is Membership.DELEGATED:
        return cls
    flipped = (Membership.OUT if cls.weyl is Membership.IN else Membership.IN)
    return dataclasses.replace(cls, weyl=flipped)


def test_pointwise_suites_detect_sabotage():
    ops = corpus(11, 6)
    results = suite_pointwise(ops, random.Random(11), classify_fn=_sabotaged)
    by_name = {r.name: r for r in results}
    assert by_name["weyl_schechter_identity"].failures > 0
    assert by_name["weyl_schechter_identity"].counterexamples


def _resolvent_everywhere(op, p):
    cls = classify(op, p)
    return dataclasses.replace(
        cls, in_spectrum=Membership.OUT, point_spectrum=Membership.OUT,
        residual_spectrum=Membership.OUT, continuous_spectrum=Membership.OUT)


def test_oracle_suite_detects_sabotage():
    (res,) = suite_oracle(exemplars()[:4], random.Random(3),
                          classify_fn=_resolvent_everywhere)
    assert res.failures > 0


def test_region_suite_names():
    names = {r.name for r in suite_regions(exemplars()[:4])}
    assert names == {"weyl_set_identities", "browder_set_identity",
                     "weyl_adjoint_symmetry"}
