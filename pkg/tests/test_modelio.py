import pytest
from hypothesis import given, settings

from secat.cohomology import betti
from secat.modelio import (DegreeError, DuplicateGenerator, ModelError, ModelSyntaxError, ModelValidationError,
                           UnknownGenerator, UnknownModel, corpus_model, corpus_names, load, parse, parse_expression,
                           serialize)
from secat.freealg import GeneratorSet
from conftest import model_texts

# One targeted invalid input per documented error class: (text, class, line, column).
INVALID = [
    ("name A\ngen x 2\nfoo x\n", ModelSyntaxError, 3, 1),
    ("gen x 2\n", ModelSyntaxError, 1, 1),
    ("name A\ngen x 2\ngen y 3\nd y = x x\n", ModelSyntaxError, 4, 9),
    ("name A\ngen x 2\ngen y 3\nd y = x\n", DegreeError, 4, 7),
    ("name A\ngen x 0\n", DegreeError, 2, 7),
    ("name A\ngen x 2\ngen y 3\nd y = w^2\n", UnknownGenerator, 4, 7),
    ("name A\ngen x 2\ngen x 3\n", DuplicateGenerator, 3, 5),
    ("name A\ngen x 2\nmorphism f : A -> Nowhere\n", UnknownModel, 3, None),
    ("name A\ngen x 2\ngen y 3\ngen z 4\nd y = x^2\nd z = x*y\n", ModelValidationError, 6, 1),
]


def test_corpus_round_trip_is_a_fixpoint():
    for name in corpus_names():
        m = corpus_model(name)
        text = serialize(m)
        again = parse(text)
        assert serialize(again) == text
        assert again.gens == m.gens and again.differential == m.differential


def test_corpus_files_parse_from_disk(corpus_dir):
    import os
    for name in corpus_names():
        m = load(os.path.join(corpus_dir, name + ".cdga"))
        assert m.name == name


@given(model_texts())
@settings(max_examples=100)
def test_fuzzed_models_round_trip(pair):
    text, algebra = pair
    m = parse(text)
    canon = serialize(m)
    assert serialize(parse(canon)) == canon
    a = m.algebra()
    assert sorted(zip(a.gens.names, a.gens.degrees)) == sorted(zip(algebra.gens.names, algebra.gens.degrees))
    assert [betti(a, k) for k in range(8)] == [betti(algebra, k) for k in range(8)]


@pytest.mark.parametrize("text,cls,line,column", INVALID)
def test_error_classes_are_positioned(text, cls, line, column):
    with pytest.raises(cls) as info:
        parse(text)
    err = info.value
    assert isinstance(err, ModelError)
    assert err.line == line
    if column is not None:
        assert err.column == column
        assert str(err).startswith(f"line {line}, column {column}: ")


def test_expressions():
    g = GeneratorSet.of(("x", 2), ("y", 3))
    e = parse_expression("-1/2*x*y + 3 x*y - x*y", g, degree=5)
    assert str(e) == "3/2*x*y"
    assert not parse_expression("0", g)
    assert str(parse_expression("1", g, degree=0)) == "1"
    with pytest.raises(ModelSyntaxError):
        parse_expression("x +", g)
    with pytest.raises(ModelSyntaxError):
        parse_expression("1/0*x", g)


def test_morphisms_and_fibrewise_blocks():
    m = corpus_model("RC_desk")
    phi = m.morphism("phi")
    phi.validate()
    with pytest.raises(UnknownModel):
        m.morphism("missing")
    fw = corpus_model("L2_over_S3").fibrewise_object()
    fw.validate()
    assert fw.base.name == "S3"


def test_validation_can_be_deferred():
    text = "name A\ngen x 2\ngen y 3\ngen z 4\nd y = x^2\nd z = x*y\n"
    m = parse(text, validate=False)
    assert m.name == "A"


def test_map_outside_a_block():
    with pytest.raises(ModelSyntaxError) as info:
        parse("name A\ngen x 2\nmap x = x\n")
    assert info.value.line == 3
