"""d-stable ideals of free CDGAs, their powers, quotients and nilpotency."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .cdga import CDGAError, CDGAMorphism, FreeCDGA
from .freealg import Element, Monomial
from .qlinalg import QMatrix, Span, Vector, kernel_basis, rank


class NotSurjective(CDGAError):
    def __init__(self, degree: int):
        self.degree = degree
        super().__init__(f"morphism is not surjective in degree {degree}")


class NotDStable(CDGAError):
    def __init__(self, degree: int, witness: Element):
        self.degree = degree
        self.witness = witness
        super().__init__(f"d(ideal) leaves the ideal in degree {degree}: d({witness}) ∉ I")


class DStableIdeal:
    """An ideal of a free CDGA known through degreewise bases.

    Bases are computed lazily.  Every stored basis vector comes with a list of
    ideal elements whose product it is, which is what nilpotency witnesses
    are made of.
    """

    def __init__(self, ambient: FreeCDGA, provenance: str,
                 compute: Callable[[int], List[Tuple[Element, List[Element]]]],
                 monomial: Optional[Callable[[Monomial], bool]] = None,
                 base: Optional["DStableIdeal"] = None, power_of: int = 1):
        self.ambient = ambient
        self.provenance = provenance
        self._compute = compute
        self._monomial = monomial
        self.base = base
        self.power_of = power_of
        self._bases: Dict[int, Tuple[List[Vector], List[List[Element]], Span]] = {}
        self._gens: Dict[int, List[Element]] = {}
        self._powers: Dict[int, DStableIdeal] = {1: self}

    def __repr__(self):
        return f"DStableIdeal({self.provenance})"

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, ambient: FreeCDGA) -> "DStableIdeal":
        return cls(ambient, "0", lambda k: [], monomial=lambda m: False)

    @classmethod
    def word_length(cls, ambient: FreeCDGA, p: int) -> "DStableIdeal":
        """Λ^{≥p}V, the p-th power of the augmentation ideal."""
        gens = ambient.gens

        def compute(k):
            out = []
            for m in gens.basis(k):
                if gens.mono_word_length(m) >= p:
                    out.append((Element(gens, {m: Fraction(1)}), _split_monomial(gens, m, p)))
            return out

        return cls(ambient, f"Λ^≥{p}V", compute,
                   monomial=lambda m: gens.mono_word_length(m) >= p, power_of=p)

    @classmethod
    def augmentation(cls, ambient: FreeCDGA) -> "DStableIdeal":
        return cls.word_length(ambient, 1)

    @classmethod
    def kernel_of(cls, phi: CDGAMorphism) -> "DStableIdeal":
        src = phi.source

        def compute(k):
            vecs = kernel_degreewise_vectors(phi, k)
            return [(src.element(v, k), [src.element(v, k)]) for v in vecs]

        return cls(src, f"ker {phi.name or 'φ'}", compute)

    @classmethod
    def generated_by(cls, ambient: FreeCDGA, elements: List[Element]) -> "DStableIdeal":
        gens = ambient.gens
        elems = [e for e in elements if e]
        for e in elems:
            if not e.is_homogeneous():
                raise ValueError(f"ideal generator {e} is not homogeneous")

        def compute(k):
            out = []
            for g in elems:
                for m in gens.basis(k - g.degree()):
                    out.append((Element(gens, {m: Fraction(1)}) * g, [Element(gens, {m: Fraction(1)}) * g]))
            return out

        ideal = cls(ambient, "generated by " + ", ".join(map(str, elems)), compute)
        return ideal

    # -- degreewise data -------------------------------------------------

    def _data(self, k: int):
        if k not in self._bases:
            span = Span()
            vecs, facs = [], []
            if k >= 1:
                for elem, factors in self._compute(k):
                    v = elem.to_vector(k) if elem else {}
                    if v and span.add(v):
                        vecs.append(v)
                        facs.append(factors)
            self._bases[k] = (vecs, facs, span)
        return self._bases[k]

    def basis(self, k: int) -> List[Vector]:
        return self._data(k)[0]

    def elements(self, k: int) -> List[Element]:
        return [self.ambient.element(v, k) for v in self.basis(k)]

    def factorizations(self, k: int) -> List[List[Element]]:
        return self._data(k)[1]

    def span(self, k: int) -> Span:
        return self._data(k)[2]

    def dim(self, k: int) -> int:
        return len(self.basis(k))

    def contains(self, a: Element) -> bool:
        for k, piece in a.homogeneous_components().items():
            if self.span(k).reduce(piece.to_vector(k)):
                return False
        return True

    def ideal_generators(self, k: int) -> List[Element]:
        """Elements of degree k completing the lower-degree generators to a generating set."""
        if k not in self._gens:
            gens = self.ambient.gens
            span = Span()
            for j in range(1, k):
                for g in self.ideal_generators(j):
                    for m in gens.basis(k - j):
                        v = (Element(gens, {m: Fraction(1)}) * g).to_vector(k)
                        if v:
                            span.add(v)
            new = []
            for v in self.basis(k):
                if span.add(v):
                    new.append(self.ambient.element(v, k))
            self._gens[k] = new
        return self._gens[k]

    def min_degree(self, bound: int) -> Optional[int]:
        for k in range(1, bound + 1):
            if self.dim(k):
                return k
        return None

    def power(self, p: int) -> "DStableIdeal":
        """I^p, built as span{b·g : b ∈ I^{p-1}, g an ideal generator of I}."""
        if p < 1:
            raise ValueError("powers start at 1")
        if p in self._powers:
            return self._powers[p]
        if self._monomial is not None and self.provenance.startswith("Λ^≥"):
            out = DStableIdeal.word_length(self.ambient, self.power_of * p)
            self._powers[p] = out
            return out
        prev = self.power(p - 1)

        def compute(k):
            out = []
            for j in range(1, k):
                for g in self.ideal_generators(j):
                    for vec, factors in zip(prev.basis(k - j), prev.factorizations(k - j)):
                        prod = prev.ambient.element(vec, k - j) * g
                        if prod:
                            out.append((prod, factors + [g]))
            return out

        out = DStableIdeal(self.ambient, f"({self.provenance})^{p}", compute, base=self, power_of=p)
        self._powers[p] = out
        return out

    def check_d_stable(self, bound: int) -> None:
        for k in range(1, bound):
            for v in self.basis(k):
                dv = self.ambient.dmatrix(k).apply(v)
                if dv and self.span(k + 1).reduce(dv):
                    raise NotDStable(k + 1, self.ambient.element(v, k))


def _split_monomial(gens, m: Monomial, p: int) -> List[Element]:
    """Write a monomial of word length >= p as a product of p monomials of positive length."""
    letters = [i for i, e in m for _ in range(e)]
    parts = [letters[i:i + 1] for i in range(p - 1)] + [letters[p - 1:]]
    out = []
    for part in parts:
        exps: Dict[int, int] = {}
        for i in part:
            exps[i] = exps.get(i, 0) + 1
        out.append(Element(gens, {tuple(sorted(exps.items())): Fraction(1)}))
    return out


def kernel_degreewise_vectors(phi: CDGAMorphism, k: int) -> List[Vector]:
    mat = phi.matrix(k)
    if rank(mat) != phi.target.dim(k):
        raise NotSurjective(k)
    return kernel_basis(mat)


def kernel_degreewise(phi: CDGAMorphism, k: int) -> List[Element]:
    """Basis of (ker φ) in degree k; φ must be surjective there."""
    return [phi.source.element(v, k) for v in kernel_degreewise_vectors(phi, k)]


def ideal_power_degreewise(ideal: DStableIdeal, p: int, k: int) -> List[Element]:
    return ideal.power(p).elements(k)


class QuotientCDGA:
    """A/I with coset representatives spanned by monomials that are not pivots of I."""

    def __init__(self, ambient: FreeCDGA, ideal: DStableIdeal, name: str = ""):
        self.ambient = ambient
        self.ideal = ideal
        self.name = name or f"{ambient.name}/{ideal.provenance}"
        self._coset: Dict[int, Tuple[List[int], Dict[int, int]]] = {}
        self._dmat: Dict[int, QMatrix] = {}

    def __repr__(self):
        return f"QuotientCDGA({self.name})"

    @property
    def gens(self):
        return self.ambient.gens

    def _cosets(self, k: int):
        if k not in self._coset:
            pivots = set(self.ideal.span(k).pivots) if k >= 1 else set()
            keep = [i for i in range(self.ambient.dim(k)) if i not in pivots]
            self._coset[k] = (keep, {i: n for n, i in enumerate(keep)})
        return self._coset[k]

    def coset_basis(self, k: int) -> List[Monomial]:
        basis = self.ambient.basis(k)
        return [basis[i] for i in self._cosets(k)[0]]

    def dim(self, k: int) -> int:
        return len(self._cosets(k)[0])

    def reduce_vector(self, vec: Vector, k: int) -> Vector:
        return self.ideal.span(k).reduce(vec) if k >= 1 else dict(vec)

    def coords(self, a: Element, k: int) -> Vector:
        rem = self.reduce_vector(a.to_vector(k), k)
        pos = self._cosets(k)[1]
        return {pos[i]: c for i, c in rem.items()}

    def element(self, vec: Vector, k: int) -> Element:
        keep = self._cosets(k)[0]
        return self.ambient.element({keep[i]: c for i, c in vec.items()}, k)

    def normal_form(self, a: Element) -> Element:
        out = self.ambient.zero()
        for k, piece in a.homogeneous_components().items():
            out = out + self.element(self.coords(piece, k), k)
        return out

    def dmatrix(self, k: int) -> QMatrix:
        if k not in self._dmat:
            cols = [self.coords(self.ambient.d_mono(m), k + 1) for m in self.coset_basis(k)]
            self._dmat[k] = QMatrix.from_columns(self.dim(k + 1), cols)
        return self._dmat[k]

    def projection(self) -> CDGAMorphism:
        a = self.ambient
        return CDGAMorphism(a, self, {i: a.gens.gen(i) for i in range(len(a.gens))}, name="ρ")

    def validate(self, bound: int) -> None:
        for k in range(0, bound):
            if not (self.dmatrix(k + 1) @ self.dmatrix(k)).is_zero():
                raise CDGAError(f"induced differential squares to nonzero in degree {k}")


def quotient(ambient: FreeCDGA, ideal: DStableIdeal, bound: int, check: bool = True):
    """The quotient CDGA and the projection ρ: A -> A/I, d-stability checked up to bound."""
    if check:
        ideal.check_d_stable(bound)
    q = QuotientCDGA(ambient, ideal)
    return q, q.projection()


@dataclass
class NilResult:
    value: int
    conclusive: bool
    witness: List[Element] = field(default_factory=list)
    bound: int = 0
    note: str = ""

    @property
    def witness_product(self) -> Optional[Element]:
        if not self.witness:
            return None
        out = self.witness[0]
        for f in self.witness[1:]:
            out = out * f
        return out


def free_algebra_top(a: FreeCDGA) -> Optional[int]:
    """Top nonzero degree of ΛV as an algebra: finite iff every generator is odd."""
    if all(d % 2 for d in a.gens.degrees):
        return sum(a.gens.degrees)
    return None


def nil_index(ideal: DStableIdeal, bound: int, ambient_top: Optional[int] = None,
              modulo: Optional[DStableIdeal] = None) -> NilResult:
    """Largest ℓ with I^ℓ ≠ 0 among degrees <= bound (nil 0 means I = 0).

    With ``modulo`` = J the question is asked in the quotient algebra A/J,
    and ``ambient_top`` must then be the top degree of A/J if known.
    Conclusive when every degree where I^{ℓ+1} could live has been checked:
    either the ambient algebra vanishes above a top degree <= bound, or
    (ℓ+1)·(min degree of I) already exceeds that top.
    """
    if ambient_top is None and modulo is None:
        ambient_top = free_algebra_top(ideal.ambient)
    value, witness = 0, []
    p = 1
    while True:
        power = ideal.power(p)
        found = None
        for k in range(1, bound + 1):
            for vec, factors in zip(power.basis(k), power.factorizations(k)):
                if modulo is None or modulo.span(k).reduce(vec):
                    found = factors
                    break
            if found is not None:
                break
        if found is None:
            break
        value, witness = p, found
        p += 1
    conclusive = False
    note = ""
    if ambient_top is not None:
        if ambient_top <= bound:
            conclusive = True
        else:
            delta = ideal.min_degree(bound)
            if delta is None or (value + 1) * delta > ambient_top:
                conclusive = True
    if not conclusive:
        note = f"I^{value + 1} vanishes only through degree {bound}"
    return NilResult(value, conclusive, witness, bound, note)
