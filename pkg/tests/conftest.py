import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from secat.cdga import FreeCDGA  # noqa: E402
from secat.freealg import Element, GeneratorSet, format_element  # noqa: E402
from secat.qlinalg import kernel_basis  # noqa: E402

import oracle  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow],
                          derandomize=True)
settings.load_profile("default")

CORPUS_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "src", "secat", "corpus")


@st.composite
def cdgas(draw, max_gens=4, max_degree=5, min_degree=1):
    """Random CDGA: each generator's d is a random cocycle built from the earlier ones."""
    n = draw(st.integers(1, max_gens))
    degrees = sorted(draw(st.lists(st.integers(min_degree, max_degree), min_size=n, max_size=n)))
    names = tuple(f"g{i}" for i in range(n))
    diff = {}
    for i in range(n):
        sub_gens = GeneratorSet(names[:i], tuple(degrees[:i]))
        sub = FreeCDGA(sub_gens, {g: v.embed(sub_gens) for g, v in diff.items()})
        k = degrees[i] + 1
        cocycles = kernel_basis(sub.dmatrix(k)) if sub.dim(k) else []
        if not cocycles:
            continue
        coeffs = draw(st.lists(st.integers(-2, 2), min_size=len(cocycles), max_size=len(cocycles)))
        vec = {}
        for c, z in zip(coeffs, cocycles):
            for j, v in z.items():
                vec[j] = vec.get(j, 0) + c * v
        el = sub.element({j: v for j, v in vec.items() if v}, k)
        if el:
            diff[names[i]] = el
    gens = GeneratorSet(names, tuple(degrees))
    return FreeCDGA(gens, {g: v.embed(gens) for g, v in diff.items()}, name="R")


def to_oracle(a: FreeCDGA) -> "oracle.Model":
    """Hand the generator data of a model to the reference implementation."""
    n = len(a.gens)

    def expo(m):
        e = [0] * n
        for i, k in m:
            e[i] = k
        return tuple(e)

    d = {a.gens.names[i]: {expo(m): c for m, c in dg.terms.items()} for i, dg in enumerate(a.dgen) if dg}
    return oracle.Model(list(zip(a.gens.names, a.gens.degrees)), d)


def elements(a: FreeCDGA, k: int):
    """Strategy for elements of degree k with small integer coefficients."""
    basis = a.basis(k)
    if not basis:
        return st.just(a.zero())
    return st.lists(st.integers(-3, 3), min_size=len(basis), max_size=len(basis)).map(
        lambda cs: Element(a.gens, {m: Fraction(c) for m, c in zip(basis, cs) if c}))


@pytest.fixture(scope="session")
def corpus_dir():
    return os.path.abspath(CORPUS_DIR)


IDENTIFIERS = st.from_regex(r"[a-z][a-z0-9_]{0,3}", fullmatch=True).filter(
    lambda s: s not in ("name", "top", "gen", "d", "morphism", "map", "fibrewise", "s", "p", "ext"))


@st.composite
def model_texts(draw):
    """Valid model source with random names, line order, spacing and comments.

    Returns (text, algebra) where algebra is the model the text describes.
    """
    a = draw(cdgas(max_gens=4, max_degree=5))
    names = draw(st.lists(IDENTIFIERS, min_size=len(a.gens), max_size=len(a.gens), unique=True))
    gens = GeneratorSet(tuple(names), a.gens.degrees)
    diff = {names[i]: Element(gens, dict(dg.terms)) for i, dg in enumerate(a.dgen) if dg}
    renamed = FreeCDGA(gens, diff, name="R")

    def pad():
        return draw(st.sampled_from(["", " ", "  "]))

    gen_lines = [f"gen{pad()} {n} {k}" for n, k in zip(names, gens.degrees)]
    d_lines = [f"d {n}{pad()} = {pad()}{format_element(v)}" for n, v in diff.items()]
    gen_lines = draw(st.permutations(gen_lines))
    d_lines = draw(st.permutations(d_lines))
    lines = [f"name {draw(IDENTIFIERS).upper()}"]
    if draw(st.booleans()):
        lines.append(f"top {draw(st.integers(0, 30))}")
    lines += gen_lines + d_lines
    if draw(st.booleans()):
        lines.append("morphism ident : self -> self")
    out = []
    for line in lines:
        if draw(st.integers(0, 4)) == 0:
            out.append("# " + draw(st.text(alphabet="abc xyz=^*", max_size=12)))
        out.append(pad() + line + (draw(st.sampled_from(["", "  # note"]))))
    text = "\n".join(out) + "\n"
    name = lines[0].split()[1]
    text = text.replace("self -> self", f"{name} -> {name}")
    if "morphism ident" in text:
        text += "".join(f"map {n} = {n}\n" for n in names)
    return text, renamed
