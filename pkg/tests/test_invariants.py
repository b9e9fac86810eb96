import pytest

from secat.cdga import CDGAMorphism, FreeCDGA, augmentation, multiplication_model
from secat.freealg import GeneratorSet
from secat.ideals import DStableIdeal
from secat.invariants import (CONCLUSIVE, INCONCLUSIVE, BoundReport, Certificate, RetractionInvalid,
                              cohomology_kernel_nil, hsecat, known_top, lscat_bounds, relcat_check, secat_hierarchy,
                              tc_bounds, toomer, zero_divisor_cup_length)
from secat.sullivan import relative_model
from secat.modelio import corpus_model, corpus_names

import oracle
from conftest import to_oracle

# Toomer invariants and zero-divisor cup lengths from the dense oracle, frozen.
FROZEN_TOOMER = {"S2": 1, "S3": 1, "S4": 1, "S7": 1, "CP2": 2, "CP3": 3, "S2xS3": 2, "NF": 3}
FROZEN_ZCL = {"S2": 2, "S3": 1, "S4": 2, "S5": 1, "S6": 2, "S7": 1, "CP2": 4, "S2xS3": 3}


def algebra(name):
    return corpus_model(name).algebra()


def test_frozen_toomer_matches_the_oracle():
    for name, value in FROZEN_TOOMER.items():
        m = corpus_model(name)
        assert oracle.toomer(to_oracle(m.algebra()), m.top) == value


def test_frozen_zcl_matches_the_oracle():
    for name, value in FROZEN_ZCL.items():
        m = corpus_model(name)
        assert oracle.zero_divisor_cup_length(oracle.Ring(to_oracle(m.algebra()), m.top), 2) == value


@pytest.mark.parametrize("name", sorted(FROZEN_TOOMER))
def test_toomer_values(name):
    rep = toomer(algebra(name))
    assert rep.conclusive and rep.lower == FROZEN_TOOMER[name]
    assert rep.witness


@pytest.mark.parametrize("name", sorted(FROZEN_ZCL))
def test_htc_equals_zero_divisor_cup_length_on_formal_spaces(name):
    a = algebra(name)
    power, mu = multiplication_model(a, 2)
    rep = hsecat(mu, source_top=power.top)
    assert rep.conclusive and rep.lower == FROZEN_ZCL[name]
    zcl = zero_divisor_cup_length(a)
    assert zcl.conclusive and zcl.value == FROZEN_ZCL[name]


@pytest.mark.parametrize("name", [n for n in corpus_names() if corpus_model(n).top is not None])
def test_hsecat_dominates_zero_divisor_cup_length(name):
    m = corpus_model(name)
    a = m.algebra()
    power, mu = multiplication_model(a, 2)
    rep = hsecat(mu, source_top=power.top)
    assert rep.lower >= oracle.zero_divisor_cup_length(oracle.Ring(to_oracle(a), m.top), 2)


def test_non_formal_model_exceeds_cup_length():
    m = corpus_model("NF")
    ring = oracle.Ring(to_oracle(m.algebra()), m.top)
    assert oracle.cup_length(ring) == 2
    assert toomer(m.algebra()).lower == 3


def test_cat_brackets():
    for name, value in [("S2", 1), ("S3", 1), ("CP2", 2), ("CP3", 3), ("S2xS3", 2)]:
        rep = lscat_bounds(algebra(name))
        assert (rep.lower, rep.upper, rep.conclusive) == (value, value, True)
        assert rep.upper_cert.status == CONCLUSIVE


def test_tc_values():
    assert tc_bounds(algebra("S3")).conclusive_value == 1
    assert tc_bounds(algebra("S2")).conclusive_value == 2
    assert tc_bounds(algebra("CP2")).conclusive_value == 4
    assert tc_bounds(algebra("S2"), n=3).conclusive_value == 3


def test_polynomial_model_without_top_is_not_conclusive():
    a = FreeCDGA(GeneratorSet.of(("x", 2)))
    rep = toomer(a, bound=8)
    assert not rep.conclusive and rep.upper_cert.status == INCONCLUSIVE
    assert known_top(a) == (None, "")


def test_known_top_sources():
    assert known_top(algebra("S2"))[0] == 2
    assert known_top(algebra("L2_point_x3"))[0] == 3
    assert known_top(algebra("S2"), 7) == (7, "asserted by the model")


def test_report_rejects_crossed_bounds():
    with pytest.raises(ValueError):
        BoundReport("x", 3, Certificate(CONCLUSIVE), 2, Certificate(CONCLUSIVE))


def test_report_dictionary_is_plain_data():
    d = lscat_bounds(algebra("CP2")).as_dict()
    assert d["invariant"] == "cat" and d["lower"] == d["upper"] == 2
    assert d["witness"] == "x^2" and d["certificates"]
    assert all(isinstance(n, str) for n in d["notes"])


def test_kernel_nil_of_augmentation_is_cup_length():
    for name, cup in [("S2", 1), ("CP2", 2), ("CP3", 3), ("NF", 2)]:
        res = cohomology_kernel_nil(augmentation(algebra(name)))
        assert res.conclusive and res.value == cup


def test_hierarchy_for_the_sphere_diagonal():
    a = algebra("S3")
    _, mu = multiplication_model(a, 2)
    rep = secat_hierarchy(mu)
    names = [n for n, _ in rep.entries]
    assert names == ["nil", "Hsecat", "msecat", "secat"]
    assert rep.chain().startswith("1 ≤ 1")
    values = [r.lower for _, r in rep.entries]
    assert values == sorted(values)


def test_relcat_of_the_desk_example():
    m = corpus_model("RC_desk")
    phi = m.morphism("phi")
    res = relcat_check(phi, 1, bound=4)
    assert res.level == 1 and res.homotopy is not None
    assert "verified" in res.describe()


def test_relcat_rejects_a_map_that_is_not_a_retraction():
    m = corpus_model("RC_desk")
    phi = m.morphism("phi")
    a = phi.source
    model = relative_model(a, DStableIdeal.kernel_of(phi).power(2), 4)
    bad = CDGAMorphism(model.total, a, {})
    with pytest.raises(RetractionInvalid):
        relcat_check(phi, 1, r=bad, bound=4, model=model)
