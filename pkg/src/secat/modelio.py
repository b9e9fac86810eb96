"""Line-oriented text format for models, morphisms and fibrewise data.

    name S2
    top 2
    gen x 2
    gen y 3
    d y = x^2
    morphism aug : S2 -> Q
    fibrewise base Q
    ext v 2
    D v = x

Expressions are sums of terms ``[coeff][*]g^e*h...`` with coefficients
``p/q`` or integers; ``0`` and ``1`` are literals.  ``map`` lines belong to
the last ``morphism`` header, ``s``/``p`` lines to the ``fibrewise`` header.
``ext`` and ``D`` declare the extension C⊗ΛV used by the lemma2 command.
Model references are the file's own name, ``Q`` (the ground field) or a
corpus model name.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable, Dict, List, Optional, Tuple

from .cdga import CDGAError, CDGAMorphism, FreeCDGA
from .freealg import Element, GeneratorSet, format_element


class ModelError(Exception):
    """Any problem with a model file, positioned at a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class ModelSyntaxError(ModelError):
    pass


class DegreeError(ModelError):
    pass


class UnknownGenerator(ModelError):
    pass


class DuplicateGenerator(ModelError):
    pass


class UnknownModel(ModelError):
    pass


class ModelValidationError(ModelError):
    pass


POINT = FreeCDGA(GeneratorSet((), ()), name="Q", top=0)

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<ident>[A-Za-z][A-Za-z0-9_']*)|(?P<op>[-+*^]))")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_']*$")
_INT = re.compile(r"-?\d+$")


def _tokens(text: str, col0: int):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            k = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ModelSyntaxError(f"unexpected character {text[k]!r}", 0, col0 + k)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), col0 + start, start > pos))
        pos = m.end()
    return out


def parse_expression(text: str, gens: GeneratorSet, degree: Optional[int] = None,
                     line: int = 0, col0: int = 1) -> Element:
    """Parse a sum of terms over ``gens``; every term must have ``degree`` if given."""
    try:
        toks = _tokens(text, col0)
    except ModelSyntaxError as e:
        raise ModelSyntaxError(e.message, line, e.column) from None
    if not toks:
        raise ModelSyntaxError("empty expression", line, col0 + len(text))
    result = gens.zero()
    i = 0

    def err(msg, at=None):
        col = toks[at][2] if at is not None and at < len(toks) else col0 + len(text.rstrip())
        return ModelSyntaxError(msg, line, col)

    first = True
    while i < len(toks):
        sign = 1
        if toks[i][0] == "op" and toks[i][1] in "+-":
            sign = -1 if toks[i][1] == "-" else 1
            i += 1
        elif not first:
            raise err("expected '+' or '-' between terms", i)
        first = False
        if i >= len(toks):
            raise err("term missing after sign")
        term_col = toks[i][2]
        coeff = Fraction(1)
        has_coeff = False
        if toks[i][0] == "num":
            num = toks[i][1]
            if "/" in num:
                p, q = num.split("/")
                if int(q) == 0:
                    raise err("zero denominator", i)
                coeff = Fraction(int(p), int(q))
            else:
                coeff = Fraction(int(num))
            has_coeff = True
            i += 1
            if i < len(toks) and toks[i][:2] == ("op", "*"):
                i += 1
                if i >= len(toks) or toks[i][0] != "ident":
                    raise err("expected a generator after '*'", i)
        mono = gens.one()
        tdeg = 0
        nfac = 0
        while i < len(toks) and toks[i][0] == "ident":
            if nfac and not (toks[i - 1][0] == "op" and toks[i - 1][1] == "*"):
                raise err("juxtaposed generators need '*'", i)
            name = toks[i][1]
            try:
                g = gens.gen(name)
            except KeyError:
                raise UnknownGenerator(f"unknown generator {name!r}", line, toks[i][2]) from None
            gdeg = gens.degrees[gens.index(name)]
            i += 1
            exp = 1
            if i < len(toks) and toks[i][0] == "op" and toks[i][1] == "^":
                i += 1
                if i >= len(toks) or toks[i][0] != "num" or "/" in toks[i][1]:
                    raise err("expected an integer exponent", i)
                exp = int(toks[i][1])
                i += 1
            mono = mono * g ** exp if exp else mono
            tdeg += gdeg * exp
            nfac += 1
            if i < len(toks) and toks[i][0] == "op" and toks[i][1] == "*":
                i += 1
                if i >= len(toks) or toks[i][0] != "ident":
                    raise err("expected a generator after '*'", i)
        if not has_coeff and not nfac:
            raise err("expected a coefficient or a generator", i)
        if i < len(toks) and toks[i][0] == "num":
            raise err("a coefficient must start its term", i)
        if degree is not None and coeff != 0 and tdeg != degree:
            raise DegreeError(f"term has degree {tdeg}, expected {degree}", line, term_col)
        result = result + mono.scale(sign * coeff)
    return result


@dataclass
class MorphismSpec:
    name: str
    source: str
    target: str
    values: Dict[str, Element]        # source generator -> element of the target
    line: int = 0


@dataclass
class FibrewiseSpec:
    base: str
    s: Dict[str, Element]             # base generator -> element of the model
    p: Dict[str, Element]             # model generator -> element of the base
    line: int = 0


@dataclass
class ModelFile:
    name: str
    gens: GeneratorSet
    differential: Dict[str, Element]
    top: Optional[int] = None
    morphisms: Dict[str, MorphismSpec] = field(default_factory=dict)
    fibrewise: Optional[FibrewiseSpec] = None
    ext: Optional[GeneratorSet] = None           # generators of C⊗ΛV, the model's first
    ext_d: Dict[str, Element] = field(default_factory=dict)
    resolver: Optional[Callable[[str], FreeCDGA]] = field(default=None, repr=False, compare=False)

    def algebra(self) -> FreeCDGA:
        cache = self.__dict__.setdefault("_algebra", [])
        if not cache:
            cache.append(FreeCDGA(self.gens, self.differential, name=self.name, top=self.top))
        return cache[0]

    def resolve(self, name: str) -> FreeCDGA:
        if name == self.name:
            return self.algebra()
        return (self.resolver or resolve_model)(name)

    def morphism(self, name: str) -> CDGAMorphism:
        if name not in self.morphisms:
            raise UnknownModel(f"model {self.name} has no morphism {name!r}")
        spec = self.morphisms[name]
        return CDGAMorphism(self.resolve(spec.source), self.resolve(spec.target), spec.values, name=name)

    def fibrewise_object(self):
        from .fibrewise import FibrewiseObject
        total = self.algebra()
        if self.fibrewise is None:
            return FibrewiseObject.over_point(total)
        base = self.resolve(self.fibrewise.base)
        s = CDGAMorphism(base, total, self.fibrewise.s, name="s")
        p = CDGAMorphism(total, base, self.fibrewise.p, name="p")
        return FibrewiseObject(base, total, s, p)

    def lemma_two_input(self):
        from .fibrewise import LemmaTwoInput
        if self.ext is None:
            v = GeneratorSet((), ())
            return LemmaTwoInput(self.fibrewise_object(), v, {})
        n = len(self.gens)
        v = GeneratorSet(self.ext.names[n:], self.ext.degrees[n:])
        return LemmaTwoInput(self.fibrewise_object(), v, self.ext_d)


_KEYWORDS = ("name", "top", "gen", "d", "morphism", "map", "fibrewise", "s", "p", "ext", "D")


def _canonical(pairs: List[Tuple[str, int]]) -> GeneratorSet:
    return GeneratorSet.of(*sorted(pairs, key=lambda p: (p[1], p[0])))


def parse(text: str, resolver: Optional[Callable[[str], FreeCDGA]] = None, validate: bool = True) -> ModelFile:
    """Parse one model.  ``resolver`` maps other model names to algebras (default: corpus)."""
    if resolver is None:
        resolver = resolve_model
    records = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        indent = len(body) - len(body.lstrip())
        kw = body.split()[0]
        if kw not in _KEYWORDS:
            raise ModelSyntaxError(f"unknown keyword {kw!r}", ln, indent + 1)
        # column of the first character after the keyword
        records.append((ln, kw, body[indent + len(kw):], indent + len(kw) + 1))

    name = None
    top = None
    gen_pairs: List[Tuple[str, int]] = []
    ext_pairs: List[Tuple[str, int]] = []
    seen: Dict[str, int] = {}
    for ln, kw, rest, col in records:
        words = rest.split()
        if kw == "name":
            if len(words) != 1 or not _IDENT.match(words[0]):
                raise ModelSyntaxError("expected 'name <identifier>'", ln, col)
            if name is not None:
                raise ModelSyntaxError("model name given twice", ln, 1)
            name = words[0]
        elif kw == "top":
            if len(words) != 1 or not _INT.match(words[0]):
                raise ModelSyntaxError("expected 'top <integer>'", ln, col)
            if int(words[0]) < 0:
                raise DegreeError("top degree must be non-negative", ln, col)
            if top is not None:
                raise ModelSyntaxError("top given twice", ln, 1)
            top = int(words[0])
        elif kw in ("gen", "ext"):
            if len(words) != 2 or not _IDENT.match(words[0]) or not _INT.match(words[1]):
                raise ModelSyntaxError(f"expected '{kw} <identifier> <positive integer>'", ln, col)
            if int(words[1]) < 1:
                raise DegreeError(f"generator {words[0]} needs a positive degree", ln, col + rest.index(words[1]))
            if words[0] in seen:
                raise DuplicateGenerator(f"generator {words[0]!r} already declared on line {seen[words[0]]}", ln, col + rest.index(words[0]))
            seen[words[0]] = ln
            (gen_pairs if kw == "gen" else ext_pairs).append((words[0], int(words[1])))
    if name is None:
        raise ModelSyntaxError("missing 'name' line", 1, 1)
    gens = _canonical(gen_pairs)
    ext = gens.extend(sorted(ext_pairs, key=lambda p: (p[1], p[0]))) if ext_pairs else None
    model = ModelFile(name, gens, {}, top, ext=ext, resolver=resolver)
    d_lines: Dict[str, int] = {}

    def lookup(ref: str, ln: int, col: int) -> FreeCDGA:
        if ref == name:
            return model.algebra()
        try:
            return resolver(ref)
        except UnknownModel:
            raise UnknownModel(f"unknown model {ref!r}", ln, col) from None

    def equation(rest: str, col: int, ln: int):
        m = re.match(r"\s*([A-Za-z][A-Za-z0-9_']*)\s*=(.*)$", rest)
        if not m:
            raise ModelSyntaxError("expected '<generator> = <expression>'", ln, col)
        return m.group(1), m.group(2), col + m.start(2)

    block = None
    for ln, kw, rest, col in records:
        if kw == "d":
            g, expr, ecol = equation(rest, col, ln)
            if g not in gens.names:
                raise UnknownGenerator(f"unknown generator {g!r}", ln, col + rest.index(g))
            if g in d_lines:
                raise ModelSyntaxError(f"differential of {g} already given on line {d_lines[g]}", ln, 1)
            d_lines[g] = ln
            model.differential[g] = parse_expression(expr, gens, gens.degrees[gens.index(g)] + 1, ln, ecol)
            block = None
        elif kw == "D":
            g, expr, ecol = equation(rest, col, ln)
            if ext is None or g not in ext.names[len(gens):]:
                raise UnknownGenerator(f"{g!r} is not an extension generator", ln, col + rest.index(g))
            if g in model.ext_d:
                raise ModelSyntaxError(f"D {g} given twice", ln, 1)
            model.ext_d[g] = parse_expression(expr, ext, ext.degrees[ext.index(g)] + 1, ln, ecol)
        elif kw == "morphism":
            m = re.match(r"\s*([A-Za-z][A-Za-z0-9_']*)\s*:\s*([A-Za-z][A-Za-z0-9_']*)\s*->\s*([A-Za-z][A-Za-z0-9_']*)\s*$", rest)
            if not m:
                raise ModelSyntaxError("expected 'morphism <name> : <model> -> <model>'", ln, col)
            if m.group(1) in model.morphisms:
                raise ModelSyntaxError(f"morphism {m.group(1)} declared twice", ln, col)
            src = lookup(m.group(2), ln, col + m.start(2))
            tgt = lookup(m.group(3), ln, col + m.start(3))
            spec = MorphismSpec(m.group(1), m.group(2), m.group(3), {}, ln)
            model.morphisms[spec.name] = spec
            block = ("morphism", spec, src, tgt)
        elif kw == "map":
            if block is None or block[0] != "morphism":
                raise ModelSyntaxError("'map' outside a morphism block", ln, 1)
            _, spec, src, tgt = block
            g, expr, ecol = equation(rest, col, ln)
            if g not in src.gens.names:
                raise UnknownGenerator(f"{g!r} is not a generator of {spec.source}", ln, col + rest.index(g))
            if g in spec.values:
                raise ModelSyntaxError(f"map {g} given twice", ln, 1)
            spec.values[g] = parse_expression(expr, tgt.gens, src.gens.degrees[src.gens.index(g)], ln, ecol)
        elif kw == "fibrewise":
            m = re.match(r"\s*base\s+([A-Za-z][A-Za-z0-9_']*)\s*$", rest)
            if not m:
                raise ModelSyntaxError("expected 'fibrewise base <model>'", ln, col)
            if model.fibrewise is not None:
                raise ModelSyntaxError("fibrewise block given twice", ln, 1)
            base = lookup(m.group(1), ln, col + m.start(1))
            model.fibrewise = FibrewiseSpec(m.group(1), {}, {}, ln)
            block = ("fibrewise", model.fibrewise, base)
        elif kw in ("s", "p"):
            if block is None or block[0] != "fibrewise":
                raise ModelSyntaxError(f"'{kw}' outside a fibrewise block", ln, 1)
            _, spec, base = block
            g, expr, ecol = equation(rest, col, ln)
            src, tgt, table = (base, gens, spec.s) if kw == "s" else (model.algebra(), base.gens, spec.p)
            if g not in src.gens.names:
                raise UnknownGenerator(f"{g!r} is not a generator of the {'base' if kw == 's' else 'model'}",
                                       ln, col + rest.index(g))
            if g in table:
                raise ModelSyntaxError(f"{kw} {g} given twice", ln, 1)
            table[g] = parse_expression(expr, tgt, src.gens.degrees[src.gens.index(g)], ln, ecol)
    model.differential = {g: v for g, v in model.differential.items() if v}
    model.__dict__.pop("_algebra", None)    # may have been built before all d lines were read
    if validate:
        validate_model(model, d_lines)
    return model


def validate_model(model: ModelFile, d_lines: Optional[Dict[str, int]] = None) -> None:
    """d² = 0, morphisms commute with d, and p∘s = id for a fibrewise block."""
    d_lines = d_lines or {}
    a = model.algebra()
    for v in a.violations():
        raise ModelValidationError(f"d(d {v.generator}) = {v.residue} is not zero", d_lines.get(v.generator, 0), 1)
    if model.ext is not None:
        try:
            model.lemma_two_input().ext.validate()
        except CDGAError as e:
            raise ModelValidationError(f"extension: {e}") from None
    for spec in model.morphisms.values():
        for v in model.morphism(spec.name).violations():
            raise ModelValidationError(f"morphism {spec.name} is not a chain map at {v.generator}", spec.line, 1)
    if model.fibrewise is not None:
        try:
            model.fibrewise_object().validate()
        except CDGAError as e:
            raise ModelValidationError(f"fibrewise block: {e}", model.fibrewise.line, 1) from None


def serialize(model: ModelFile) -> str:
    """Canonical text: generators by (degree, name), nonzero equations only, no comments."""
    out = [f"name {model.name}"]
    if model.top is not None:
        out.append(f"top {model.top}")
    out += [f"gen {n} {d}" for n, d in zip(model.gens.names, model.gens.degrees)]
    out += [f"d {n} = {format_element(model.differential[n])}"
            for n in model.gens.names if model.differential.get(n)]
    if model.ext is not None:
        k = len(model.gens)
        out += [f"ext {n} {d}" for n, d in zip(model.ext.names[k:], model.ext.degrees[k:])]
        out += [f"D {n} = {format_element(model.ext_d[n])}" for n in model.ext.names[k:] if model.ext_d.get(n)]
    if model.fibrewise is not None:
        fw = model.fibrewise
        out.append(f"fibrewise base {fw.base}")
        base = model.resolve(fw.base)
        out += [f"s {n} = {format_element(fw.s[n])}" for n in base.gens.names if fw.s.get(n)]
        out += [f"p {n} = {format_element(fw.p[n])}" for n in model.gens.names if fw.p.get(n)]
    for name in sorted(model.morphisms):
        spec = model.morphisms[name]
        out.append(f"morphism {name} : {spec.source} -> {spec.target}")
        src = model.resolve(spec.source)
        out += [f"map {n} = {format_element(spec.values[n])}" for n in src.gens.names if spec.values.get(n)]
    return "\n".join(out) + "\n"


def load(path, resolver=None) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), resolver)


# -- corpus -------------------------------------------------------------------

_CORPUS: Dict[str, ModelFile] = {}


def corpus_names() -> List[str]:
    files = resources.files("secat").joinpath("corpus")
    return sorted(f.name[:-5] for f in files.iterdir() if f.name.endswith(".cdga"))


def corpus_model(name: str) -> ModelFile:
    if name not in _CORPUS:
        if name not in corpus_names():
            raise UnknownModel(f"unknown model {name!r}")
        text = resources.files("secat").joinpath("corpus").joinpath(f"{name}.cdga").read_text(encoding="utf-8")
        _CORPUS[name] = parse(text)
    return _CORPUS[name]


def resolve_model(name: str) -> FreeCDGA:
    if name == "Q":
        return POINT
    return corpus_model(name).algebra()


def corpus() -> Dict[str, ModelFile]:
    return {n: corpus_model(n) for n in corpus_names()}
