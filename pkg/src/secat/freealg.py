"""Free graded-commutative algebras on finitely many positively graded generators.

A monomial is a tuple of ``(generator index, exponent)`` pairs sorted by
index; the empty tuple is the unit.  Odd generators occur with exponent 1
only, so every tuple of that shape is a basis element of the algebra and the
sign of a product is fixed by counting odd transpositions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

Monomial = Tuple[Tuple[int, int], ...]

ONE: Monomial = ()

_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_']*$")


@dataclass(frozen=True)
class GeneratorSet:
    names: Tuple[str, ...]
    degrees: Tuple[int, ...]
    # (factor, index in factor) per generator, for tensor products
    origins: Optional[Tuple[Tuple[int, int], ...]] = None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise ValueError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate generator names in {self.names}")
        for n, d in zip(self.names, self.degrees):
            if not _IDENT.match(n):
                raise ValueError(f"bad generator name {n!r}")
            if not isinstance(d, int) or d < 1:
                raise ValueError(f"generator {n} must have positive degree, got {d}")

    @classmethod
    def of(cls, *pairs: Tuple[str, int]) -> "GeneratorSet":
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    def __len__(self) -> int:
        return len(self.names)

    @property
    def simply_connected(self) -> bool:
        return all(d >= 2 for d in self.degrees)

    def index(self, name: str) -> int:
        try:
            return self._cache.setdefault("index", {n: i for i, n in enumerate(self.names)})[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def is_odd(self, i: int) -> bool:
        return self.degrees[i] % 2 == 1

    def extend(self, pairs: Sequence[Tuple[str, int]]) -> "GeneratorSet":
        return GeneratorSet(self.names + tuple(p[0] for p in pairs),
                            self.degrees + tuple(p[1] for p in pairs))

    # -- monomials -------------------------------------------------------

    def mono_degree(self, m: Monomial) -> int:
        return sum(self.degrees[i] * e for i, e in m)

    def mono_word_length(self, m: Monomial) -> int:
        return sum(e for _, e in m)

    def mono_mul(self, a: Monomial, b: Monomial) -> Tuple[int, Monomial]:
        """Product of two monomials as ``(sign, monomial)``; sign 0 means zero."""
        if not a:
            return 1, b
        if not b:
            return 1, a
        key = (a, b)
        cache = self._cache.setdefault("mul", {})
        hit = cache.get(key)
        if hit is not None:
            return hit
        odd_a = [i for i, _ in a if self.degrees[i] % 2]
        odd_b = [i for i, _ in b if self.degrees[i] % 2]
        if set(odd_a) & set(odd_b):
            res = (0, ONE)
        else:
            swaps = 0
            for j in odd_b:
                for i in odd_a:
                    if i > j:
                        swaps += 1
            exps = dict(a)
            for i, e in b:
                exps[i] = exps.get(i, 0) + e
            res = (-1 if swaps % 2 else 1, tuple(sorted(exps.items())))
        cache[key] = res
        return res

    def mono_str(self, m: Monomial) -> str:
        if not m:
            return "1"
        parts = []
        for i, e in m:
            parts.append(self.names[i] if e == 1 else f"{self.names[i]}^{e}")
        return "*".join(parts)

    # -- degreewise bases --------------------------------------------------

    def basis(self, k: int) -> List[Monomial]:
        """Monomial basis of the degree-k part, in a fixed deterministic order."""
        if k < 0:
            return []
        bases = self._cache.setdefault("basis", {})
        if k in bases:
            return bases[k]
        out: List[Monomial] = []
        n = len(self.degrees)

        def rec(i: int, remaining: int, acc: List[Tuple[int, int]]):
            if remaining == 0:
                out.append(tuple(acc))
                return
            if i == n:
                return
            d = self.degrees[i]
            top = 1 if d % 2 else remaining // d
            for e in range(min(top, remaining // d), 0, -1):
                acc.append((i, e))
                rec(i + 1, remaining - e * d, acc)
                acc.pop()
            rec(i + 1, remaining, acc)

        rec(0, k, [])
        bases[k] = out
        return out

    def basis_index(self, k: int) -> Dict[Monomial, int]:
        idx = self._cache.setdefault("basis_index", {})
        if k not in idx:
            idx[k] = {m: i for i, m in enumerate(self.basis(k))}
        return idx[k]

    def dim(self, k: int) -> int:
        return len(self.basis(k))

    def gen(self, name_or_index) -> "Element":
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        return Element(self, {((i, 1),): Fraction(1)})

    def one(self) -> "Element":
        return Element(self, {ONE: Fraction(1)})

    def zero(self) -> "Element":
        return Element(self, {})


def basis_of_degree(gens: GeneratorSet, k: int) -> List[Monomial]:
    return gens.basis(k)


def tensor_generators(v: GeneratorSet, w: GeneratorSet) -> GeneratorSet:
    """Generators of ΛV ⊗ ΛW = Λ(V ⊕ W); clashing names get factor suffixes."""
    if not len(w):
        return v
    if not len(v):
        return w
    clash = set(v.names) & set(w.names)
    vn = tuple(f"{n}_1" for n in v.names) if clash else v.names
    wn = tuple(f"{n}_2" for n in w.names) if clash else w.names
    origins = tuple((0, i) for i in range(len(v))) + tuple((1, i) for i in range(len(w)))
    return GeneratorSet(vn + wn, v.degrees + w.degrees, origins)


def tensor_power(v: GeneratorSet, n: int) -> GeneratorSet:
    names = tuple(f"{name}_{j + 1}" for j in range(n) for name in v.names)
    degrees = tuple(d for _ in range(n) for d in v.degrees)
    origins = tuple((j, i) for j in range(n) for i in range(len(v)))
    return GeneratorSet(names, degrees, origins)


class Element:
    """Exact rational linear combination of monomials of one generator set."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: GeneratorSet, terms: Optional[Mapping[Monomial, Fraction]] = None):
        self.gens = gens
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = Fraction(c)

    @classmethod
    def from_vector(cls, gens: GeneratorSet, k: int, vec: Mapping[int, Fraction]) -> "Element":
        basis = gens.basis(k)
        return cls(gens, {basis[i]: c for i, c in vec.items()})

    def to_vector(self, k: Optional[int] = None) -> Dict[int, Fraction]:
        if not self.terms:
            return {}
        if k is None:
            k = self.degree()
        idx = self.gens.basis_index(k)
        try:
            return {idx[m]: c for m, c in self.terms.items()}
        except KeyError:
            raise ValueError(f"element {self} is not homogeneous of degree {k}") from None

    def _check(self, other: "Element"):
        if other.gens is not self.gens and other.gens != self.gens:
            raise ValueError("elements live in different algebras")

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Element(self.gens, {ONE: Fraction(other)})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        out = Element(self.gens)
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Element(self.gens)
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Element":
        c = Fraction(c)
        out = Element(self.gens)
        if c:
            out.terms = {m: v * c for m, v in self.terms.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Element):
            return NotImplemented
        self._check(other)
        mul = self.gens.mono_mul
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                s, m = mul(m1, m2)
                if not s:
                    continue
                v = terms.get(m, 0) + (c1 * c2 if s > 0 else -c1 * c2)
                if v:
                    terms[m] = v
                else:
                    terms.pop(m, None)
        out = Element(self.gens)
        out.terms = terms
        return out

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        out = self.gens.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Element(self.gens, {ONE: Fraction(other)})
        if not isinstance(other, Element):
            return NotImplemented
        return self.gens == other.gens and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> List[int]:
        return sorted({self.gens.mono_degree(m) for m in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        """Degree of a homogeneous element (the zero element has degree 0)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError(f"element {self} is not homogeneous")
        return ds[0] if ds else 0

    def homogeneous_components(self) -> Dict[int, "Element"]:
        out: Dict[int, Element] = {}
        for m, c in self.terms.items():
            out.setdefault(self.gens.mono_degree(m), Element(self.gens)).terms[m] = c
        return out

    def word_length_split(self) -> Dict[int, "Element"]:
        out: Dict[int, Element] = {}
        for m, c in self.terms.items():
            out.setdefault(self.gens.mono_word_length(m), Element(self.gens)).terms[m] = c
        return out

    def constant_term(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    def embed(self, gens: GeneratorSet, index_map: Optional[Sequence[int]] = None) -> "Element":
        """Re-express in a larger generator set; ``index_map[i]`` is the new index of i."""
        if index_map is None:
            if gens.names[: len(self.gens)] != self.gens.names:
                raise ValueError("target generator set does not extend this one")
            out = Element(gens)
            out.terms = dict(self.terms)
            return out
        terms = {}
        for m, c in self.terms.items():
            # index_map may reorder generators, so rebuild with signs via products
            acc_sign, acc = 1, ONE
            for i, e in m:
                for _ in range(e):
                    s, acc = gens.mono_mul(acc, ((index_map[i], 1),))
                    acc_sign *= s
            if acc_sign:
                terms[acc] = terms.get(acc, 0) + c * acc_sign
        return Element(gens, terms)

    def sort_key_terms(self) -> List[Tuple[Monomial, Fraction]]:
        g = self.gens
        return sorted(self.terms.items(), key=lambda mc: (g.mono_degree(mc[0]), _mono_order_key(g, mc[0])))

    def __repr__(self):
        return format_element(self)


def _mono_order_key(gens: GeneratorSet, m: Monomial):
    # same order as GeneratorSet.basis within a degree
    exps = dict(m)
    return tuple(-exps.get(i, 0) for i in range(len(gens)))


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_element(a: Element) -> str:
    if not a.terms:
        return "0"
    out = []
    for m, c in a.sort_key_terms():
        neg = c < 0
        c = abs(c)
        if not m:
            body = format_coefficient(c)
        elif c == 1:
            body = a.gens.mono_str(m)
        else:
            body = f"{format_coefficient(c)}*{a.gens.mono_str(m)}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)


def monomial_element(gens: GeneratorSet, m: Monomial, c=1) -> Element:
    return Element(gens, {m: Fraction(c)})


def product(elements: Iterable[Element], gens: GeneratorSet) -> Element:
    out = gens.one()
    for e in elements:
        out = out * e
    return out
