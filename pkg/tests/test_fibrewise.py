import pytest

from secat.cdga import CDGAMorphism, FreeCDGA, PathElement
from secat.fibrewise import (FibrewiseError, FibrewiseObject, LemmaTwoInput, NotClosed, build_lemma_two_N,
                             product_nil, relative_nil, verify_lemma_two)
from secat.freealg import GeneratorSet
from secat.modelio import corpus_model

# (model, nil_B C): relative nilpotency of the corpus instances, by hand.
INSTANCES = [("L2_trivial", 0), ("L2_point_x3", 1), ("L2_over_S3", 1), ("L2_point_x3y3", 2)]


def over_s3():
    b = FreeCDGA(GeneratorSet.of(("x", 3)), name="B")
    x = FreeCDGA(GeneratorSet.of(("x", 3), ("u", 3)), name="X")
    s = CDGAMorphism(b, x, {"x": x.gen("x")})
    p = CDGAMorphism(x, b, {"x": b.gen("x")})
    return FibrewiseObject(b, x, s, p)


@pytest.mark.parametrize("name,nil_c", INSTANCES)
def test_corpus_instances(name, nil_c):
    verdict = verify_lemma_two(corpus_model(name).lemma_two_input())
    assert verdict.ok and verdict.conclusive and not verdict.overflow
    assert verdict.nil_c.value == nil_c and verdict.nil_n == nil_c + 1
    assert verdict.witness_has_shape and verdict.predicted_nonzero
    assert verdict.witness[-1].endswith("⊗dt")


def test_even_generator_in_v():
    c = FreeCDGA(GeneratorSet.of(("x", 3), ("y", 5)))
    data = LemmaTwoInput(FibrewiseObject.over_point(c), GeneratorSet.of(("v", 2)), {})
    verdict = verify_lemma_two(data)
    assert verdict.ok and (verdict.nil_c.value, verdict.nil_n) == (2, 3)


def test_hypothesis_failure_breaks_closure():
    fo = over_s3()
    data = LemmaTwoInput(fo, GeneratorSet.of(("v", 2)), {"v": fo.total.gen("x")})
    assert data.hypothesis_violations() == ["v"]
    with pytest.raises(NotClosed) as info:
        verify_lemma_two(data)
    assert info.value.what == "the differential"


def test_empty_v_is_not_applicable():
    verdict = verify_lemma_two(LemmaTwoInput(over_s3(), GeneratorSet((), ()), {}))
    assert not verdict.applicable and not verdict.ok
    assert verdict.notes


def test_section_must_split_projection():
    fo = over_s3()
    fo.s = CDGAMorphism(fo.base, fo.total, {"x": fo.total.gen("u")})
    with pytest.raises(FibrewiseError):
        fo.validate()


def test_relative_nil():
    assert relative_nil(over_s3()).value == 1
    trivial = FibrewiseObject.trivial(corpus_model("S3").algebra())
    res = relative_nil(trivial)
    assert res.value == 0 and res.conclusive


def test_products_with_two_dt_vanish():
    ext = corpus_model("L2_point_x3").lemma_two_input().ext
    x = PathElement(ext, {(1, 1): ext.gen("x")})
    y = PathElement(ext, {(0, 1): ext.gen("v")})
    assert not (x * y)


def test_pieces_and_membership():
    data = corpus_model("L2_point_x3").lemma_two_input()
    out = build_lemma_two_N(data, t_max=3)
    assert {p.label for p in out.pieces} == {"J1", "J2", "J3"}
    ext = data.ext
    v_dt = PathElement(ext, {(0, 1): ext.gen("v")})
    assert out.contains(v_dt, 3)
    assert not out.contains(PathElement.constant(ext, ext.gen("v")), 2)
    pn = product_nil(out)
    assert pn.value == 2 and pn.product
