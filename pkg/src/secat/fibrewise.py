"""Objects B -> X -> B under and over a fixed CDGA, relative nilpotency, and the
pullback model N whose relative nilpotency is one more than that of C.

N is realised inside W = (C⊗ΛV) ⊗ Λ(t,dt): the B summand is kept apart and
ker p_N is spanned by pure tensors

    J1 = ker p_C ⊗ Λ⁺(t,dt)
    J2 = ker p_C ⊗ Λ⁺V ⊗ K_ε        (K_ε: kills t -> 1)
    J3 = R ⊗ Λ⁺V ⊗ dt               (C = ker p_C ⊕ R)

W is infinite in t, so it is cut at t-weight T (power of t plus one per dt).
Weight is additive and every element of ker p_N has weight >= 1, so a
product of ℓ factors has weight >= ℓ.  A product of pure tensors vanishes
exactly when its C⊗ΛV parts multiply to zero or two dt meet, independently of
the t-powers, so replacing every t-power by t itself loses nothing: when the
computed index is below T, no nonzero product was cut away.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from .cdga import CDGAError, CDGAMorphism, FreeCDGA, PathElement, TruncatedPathComplex
from .freealg import Element, GeneratorSet
from .ideals import DStableIdeal, NilResult, free_algebra_top, kernel_degreewise, nil_index
from .qlinalg import Span


class FibrewiseError(CDGAError):
    pass


class NotClosed(FibrewiseError):
    def __init__(self, what: str, witness):
        self.what = what
        self.witness = witness
        super().__init__(f"N is not closed under {what}: {witness} leaves N")


class MismatchReport(FibrewiseError):
    def __init__(self, nil_c: int, nil_n: int, witnesses: List[str], overflow: bool):
        self.nil_c = nil_c
        self.nil_n = nil_n
        self.witnesses = witnesses
        self.overflow = overflow
        cause = "t-truncation overflow" if overflow else "implementation error"
        super().__init__(f"nil_B N = {nil_n} but nil_B C + 1 = {nil_c + 1} ({cause})")


@dataclass
class FibrewiseObject:
    """B --s--> X --p--> B with p∘s = id_B; X may be a quotient by ``relations``."""

    base: FreeCDGA
    total: FreeCDGA
    s: CDGAMorphism
    p: CDGAMorphism
    relations: Optional[DStableIdeal] = None
    algebra_top: Optional[int] = None

    def validate(self) -> None:
        self.s.validate()
        self.p.validate()
        for i in range(len(self.base.gens)):
            if self.p(self.s.values[i]) != self.base.gens.gen(i):
                raise FibrewiseError(f"p∘s differs from the identity at {self.base.gens.names[i]}")

    @property
    def top(self) -> Optional[int]:
        if self.algebra_top is not None:
            return self.algebra_top
        if self.relations is None:
            return free_algebra_top(self.total)
        return None

    def kernel(self) -> DStableIdeal:
        return DStableIdeal.kernel_of(self.p)

    @classmethod
    def over_point(cls, x: FreeCDGA) -> "FibrewiseObject":
        point = FreeCDGA(GeneratorSet((), ()), name="Q", top=0)
        return cls(point, x, CDGAMorphism(point, x, {}, name="s"), CDGAMorphism(x, point, {}, name="p"))

    @classmethod
    def trivial(cls, b: FreeCDGA) -> "FibrewiseObject":
        ident = {i: b.gens.gen(i) for i in range(len(b.gens))}
        return cls(b, b, CDGAMorphism(b, b, ident, name="s"), CDGAMorphism(b, b, ident, name="p"))


def relative_nil(x: FibrewiseObject, bound: int = 16) -> NilResult:
    """nil_B X = nil ker p_X."""
    return nil_index(x.kernel(), bound, ambient_top=x.top, modulo=x.relations)


@dataclass
class LemmaTwoInput:
    c: FibrewiseObject
    v: GeneratorSet
    dv: Dict[str, Element]           # D on V, elements of C⊗ΛV
    ext: FreeCDGA = field(init=False)

    def __post_init__(self):
        if self.c.relations is not None:
            raise FibrewiseError("the N construction needs a free C")
        cg = self.c.total.gens
        self.ext = self.c.total.extend(list(zip(self.v.names, self.v.degrees)), self.dv,
                                       name=f"{self.c.total.name}⊗ΛV")
        self._nc = len(cg)

    def v_indices(self) -> List[int]:
        return list(range(self._nc, len(self.ext.gens)))

    def v_word_length(self, m) -> int:
        return sum(e for i, e in m if i >= self._nc)

    def hypothesis_violations(self) -> List[str]:
        """Generators v whose Dv has a part in C⊗1 outside ker p_C."""
        out = []
        for i in self.v_indices():
            dv = self.ext.dgen[i]
            part = Element(self.c.total.gens, {m: c for m, c in dv.terms.items() if self.v_word_length(m) == 0})
            if self.c.p(part):
                out.append(self.ext.gens.names[i])
        return out

    def validate(self) -> None:
        self.c.validate()
        self.ext.validate()


@dataclass
class Piece:
    label: str            # J1, J2, J3
    element: PathElement
    degree: int

    def __repr__(self):
        return f"{self.label}:{self.element}"


@dataclass
class LemmaTwoOutput:
    input: LemmaTwoInput
    t_max: int
    degree_bound: int
    pieces: List[Piece]
    kernel_basis_c: List[str]
    splitting: List[str]           # basis of the chosen complement R
    complex: TruncatedPathComplex

    def span(self, k: int) -> Span:
        cache = self.__dict__.setdefault("_spans", {})
        if k not in cache:
            sp = Span()
            for pc in self.pieces:
                if pc.degree == k:
                    sp.add(self.complex.coords(pc.element, k))
            cache[k] = sp
        return cache[k]

    def contains(self, x: PathElement, k: int) -> bool:
        if k > self.degree_bound:
            return True
        return not self.span(k).reduce(self.complex.coords(x, k))

    def dims(self) -> Dict[int, int]:
        return {k: len(self.span(k)) for k in range(self.degree_bound + 1)}


def _path(ext: FreeCDGA, c: Element, a: int, e: int) -> PathElement:
    return PathElement(ext, {(a, e): c})


def _homogeneous_degree(x: PathElement) -> int:
    for (a, e), c in x.parts.items():
        return c.degree() + e
    return 0


def build_lemma_two_N(data: LemmaTwoInput, t_max: int = 4, bound: Optional[int] = None,
                      check: bool = True) -> LemmaTwoOutput:
    """Spanning pure tensors of the image of ker p_N in W cut at weight t_max.

    Only degrees <= bound are built; closure is checked in the truncated quotient.
    """
    c, ext = data.c, data.ext
    if bound is None:
        top = c.top
        vmax = max(data.v.degrees, default=0)
        bound = (top + vmax + 1) if top is not None else 16
    cgens = c.total.gens
    embed_c = lambda el: el.embed(ext.gens)
    ker = {k: kernel_degreewise(c.p, k) for k in range(1, bound + 1)}
    rbasis: Dict[int, List[Element]] = {}
    for k in range(0, bound + 1):
        sp = Span(el.to_vector(k) for el in ker.get(k, []))
        pivots = set(sp.pivots)
        rbasis[k] = [Element(cgens, {m: Fraction(1)}) for j, m in enumerate(cgens.basis(k)) if j not in pivots]
    vgens = data.v
    vmap = data.v_indices()
    words: Dict[int, List[Element]] = {}
    for k in range(1, bound + 1):
        words[k] = [Element(vgens, {m: Fraction(1)}).embed(ext.gens, vmap) for m in vgens.basis(k)]
    pieces: List[Piece] = []
    for k, basis in ker.items():
        for i in basis:
            ie = embed_c(i)
            for a in range(1, t_max + 1):
                pieces.append(Piece("J1", _path(ext, ie, a, 0), k))
            if k + 1 <= bound:
                for a in range(0, t_max):
                    pieces.append(Piece("J1", _path(ext, ie, a, 1), k + 1))
            for kw, ws in words.items():
                for w in ws:
                    iw = ie * w
                    deg = k + kw
                    if deg <= bound:
                        # a = t_max is the image of t^{T+1} - t^T under the truncation
                        for a in range(1, t_max + 1):
                            el, _ = PathElement(ext, {(a + 1, 0): iw, (a, 0): -iw}).truncate(t_max)
                            pieces.append(Piece("J2", el, deg))
                    if deg + 1 <= bound:
                        for a in range(0, t_max):
                            pieces.append(Piece("J2", _path(ext, iw, a, 1), deg + 1))
    for k, rs in rbasis.items():
        for r in rs:
            re_ = embed_c(r)
            for kw, ws in words.items():
                if k + kw + 1 <= bound:
                    for w in ws:
                        pieces.append(Piece("J3", _path(ext, re_ * w, 0, 1), k + kw + 1))
    out = LemmaTwoOutput(data, t_max, bound, pieces,
                         [str(i) for k in sorted(ker) for i in ker[k]],
                         [str(r) for k in sorted(rbasis) for r in rbasis[k]],
                         TruncatedPathComplex(ext, t_max))
    if check:
        check_closure(out)
    return out


def check_closure(out: LemmaTwoOutput) -> None:
    """d(N) ⊆ N, N·N ⊆ N and B·N ⊆ N, all within the truncation."""
    ext = out.input.ext
    bound = out.degree_bound
    for pc in out.pieces:
        dx = pc.element.d()
        if dx and not out.contains(dx, pc.degree + 1):
            raise NotClosed("the differential", f"d({pc.element}) = {dx}")
    s = out.input.c.s
    for i in range(len(out.input.c.base.gens)):
        sb = PathElement.constant(ext, s.values[i].embed(ext.gens))
        for pc in out.pieces:
            prod, _ = (sb * pc.element).truncate(out.t_max)
            k = pc.degree + out.input.c.base.gens.degrees[i]
            if prod and k <= bound and not out.contains(prod, k):
                raise NotClosed("the B-action", f"s({out.input.c.base.gens.names[i]})·{pc.element}")
    by_degree: Dict[int, List[Piece]] = {}
    for pc in out.pieces:
        by_degree.setdefault(pc.degree, []).append(pc)
    for k1 in sorted(by_degree):
        for k2 in sorted(by_degree):
            if k2 < k1 or k1 + k2 > bound:
                continue
            for x in by_degree[k1]:
                for y in by_degree[k2]:
                    prod, _ = (x.element * y.element).truncate(out.t_max)
                    if prod and not out.contains(prod, k1 + k2):
                        raise NotClosed("products", f"({x.element})·({y.element})")


@dataclass
class ProductNil:
    value: int
    witness: List[PathElement]
    product: Optional[PathElement]


def product_nil(out: LemmaTwoOutput) -> ProductNil:
    """Largest ℓ with a nonzero product of ℓ elements of ker p_N (within the truncation)."""
    cx = out.complex
    bound, t_max = out.degree_bound, out.t_max
    gens = []
    for k in range(1, bound + 1):
        sp = Span()
        for pc in out.pieces:
            if pc.degree == k and sp.add(cx.coords(pc.element, k)):
                gens.append((k, pc.element))
    level = [(k, x, [x]) for k, x in gens]
    value = 1 if level else 0
    best = level[0] if level else None
    while level:
        spans: Dict[int, Span] = {}
        nxt = []
        for k, x, factors in level:
            for kg, g in gens:
                kk = k + kg
                if kk > bound:
                    continue
                prod, _ = (x * g).truncate(t_max)
                if not prod:
                    continue
                if spans.setdefault(kk, Span()).add(cx.coords(prod, kk)):
                    nxt.append((kk, prod, factors + [g]))
        if not nxt:
            break
        value += 1
        best = min(nxt, key=lambda item: item[0])
        level = nxt
    if best is None:
        return ProductNil(0, [], None)
    return ProductNil(value, best[2], best[1])


@dataclass
class LemmaTwoVerdict:
    ok: bool
    applicable: bool
    nil_c: NilResult
    nil_n: int
    conclusive: bool
    overflow: bool
    t_max: int
    degree_bound: int
    witness: List[str]
    witness_product: str
    witness_has_shape: bool
    predicted: str
    predicted_nonzero: bool
    splitting: List[str]
    notes: List[str] = field(default_factory=list)


def _has_dt_shape(data: LemmaTwoInput, x: Optional[PathElement]) -> bool:
    """A nonzero part c⊗t^a dt with c of positive word length in V."""
    if x is None:
        return False
    for (a, e), c in x.parts.items():
        if e == 1 and any(data.v_word_length(m) > 0 for m in c.terms):
            return True
    return False


def verify_lemma_two(data: LemmaTwoInput, t_max: int = 4, bound: Optional[int] = None,
                     max_t: int = 12) -> LemmaTwoVerdict:
    """Build N, compute both relative nilpotency indices and compare nil_B N with nil_B C + 1."""
    data.validate()
    notes = []
    bad = data.hypothesis_violations()
    if bad:
        notes.append("hypothesis fails for " + ", ".join(bad))
    ext = data.ext
    while True:
        out = build_lemma_two_N(data, t_max, bound)
        pn = product_nil(out)
        overflow = pn.value >= t_max
        if not overflow or t_max >= max_t:
            break
        t_max = min(max_t, max(t_max + 1, pn.value + 1))
    nil_c = relative_nil(data.c, out.degree_bound)
    # the product the construction predicts: z·(1⊗v⊗dt), z = Π (i_j ⊗ t)
    vi = min(data.v_indices(), key=lambda i: (ext.gens.degrees[i], i)) if data.v_indices() else None
    predicted, predicted_nonzero = "", False
    if vi is not None:
        z = PathElement.constant(ext, ext.one())
        for f in nil_c.witness:
            z = z * _path(ext, f.embed(ext.gens), 1, 0)
        pw = z * _path(ext, ext.gens.gen(vi), 0, 1)
        predicted = str(pw)
        predicted_nonzero = bool(pw) and pw.weight() <= out.t_max
    applicable = vi is not None
    top = data.c.top
    vmax = max(data.v.degrees, default=0)
    degree_ok = top is not None and out.degree_bound >= top + vmax + 1
    conclusive = nil_c.conclusive and not overflow and degree_ok
    if not degree_ok:
        notes.append("degree bound does not reach the top of C⊗ΛV needed for exactness")
    shape = _has_dt_shape(data, pn.product)
    ok = applicable and pn.value == nil_c.value + 1 and shape and predicted_nonzero
    verdict = LemmaTwoVerdict(ok, applicable, nil_c, pn.value, conclusive, overflow, out.t_max,
                              out.degree_bound, [str(w) for w in pn.witness], str(pn.product),
                              shape, predicted, predicted_nonzero, out.splitting, notes)
    if applicable and pn.value != nil_c.value + 1:
        raise MismatchReport(nil_c.value, pn.value, verdict.witness, overflow)
    if not applicable:
        notes.append("V is empty: the construction degenerates and the comparison does not apply")
    return verdict
