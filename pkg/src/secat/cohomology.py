"""Degreewise cohomology, induced maps and injectivity certificates.

Anything exposing ``dim(k)`` and ``dmatrix(k)`` (degree k -> k+1) is a
complex here: free CDGAs, quotient CDGAs, truncated path complexes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Tuple

from .qlinalg import QMatrix, Span, Vector, kernel_basis, rank, vec_add


class CohomologyGroup:
    """H^k of a complex with chosen cocycle representatives."""

    def __init__(self, complex_, k: int):
        self.complex = complex_
        self.degree = k
        dk = complex_.dmatrix(k)
        span = Span(track=True)
        if k > 0:
            for j, col in enumerate(complex_.dmatrix(k - 1).columns()):
                if col:
                    span.add(col, tag=("b", j))
        self.boundary_rank = len(span)
        reps: List[Vector] = []
        for z in kernel_basis(dk):
            if span.add(z, tag=("h", len(reps))):
                reps.append(z)
        self.reps = reps
        self._span = span

    @property
    def dim(self) -> int:
        return len(self.reps)

    def is_cocycle(self, vec: Vector) -> bool:
        return not self.complex.dmatrix(self.degree).apply(vec)

    def _coords(self, vec: Vector):
        if not self.is_cocycle(vec):
            raise ValueError(f"not a cocycle in degree {self.degree}")
        coords = self._span.coordinates(vec)
        assert coords is not None
        return coords

    def classify(self, vec: Vector) -> List[Fraction]:
        """Coordinates of the class of a cocycle in the representative basis."""
        coords = self._coords(vec)
        return [coords.get(("h", i), Fraction(0)) for i in range(self.dim)]

    def primitive(self, vec: Vector) -> Optional[Vector]:
        """Some x with d x = vec when vec is a coboundary, else None."""
        coords = self._coords(vec)
        if any(t[0] == "h" for t in coords):
            return None
        return {j: c for (kind, j), c in coords.items()}

    def rep_elements(self):
        return [self.complex.element(r, self.degree) for r in self.reps]


def cohomology(complex_, k: int) -> CohomologyGroup:
    cache = complex_.__dict__.setdefault("_cohomology_cache", {})
    if k not in cache:
        cache[k] = CohomologyGroup(complex_, k)
    return cache[k]


def betti(complex_, k: int) -> int:
    """dim H^k computed from ranks only (no representatives)."""
    dk = complex_.dmatrix(k)
    prev = rank(complex_.dmatrix(k - 1)) if k > 0 else 0
    return complex_.dim(k) - rank(dk) - prev


def induced_map(phi, k: int) -> QMatrix:
    """Matrix of H^k(phi) in the representative bases of source and target."""
    src = cohomology(phi.source, k)
    tgt = cohomology(phi.target, k)
    mat = phi.matrix(k)
    cols = []
    for rep in src.reps:
        cls = tgt.classify(mat.apply(rep))
        cols.append({i: c for i, c in enumerate(cls) if c})
    return QMatrix.from_columns(tgt.dim, cols)


@dataclass
class InjectivityCertificate:
    injective: bool
    bound: int
    conclusive: bool
    degree: Optional[int] = None
    witness: Optional[object] = None       # cocycle of the source, as an element
    witness_vector: Optional[Vector] = None
    note: str = ""

    def describe(self) -> str:
        if self.injective:
            tag = "conclusive" if self.conclusive else "up to degree bound"
            return f"injective through degree {self.bound} ({tag})"
        return f"fails in degree {self.degree}: class of {self.witness} dies"


def window_vanishes(complex_, bound: int, width: int) -> bool:
    """Heuristic: H^k = 0 for the last `width` degrees below the bound."""
    return all(cohomology(complex_, k).dim == 0 for k in range(max(1, bound - width + 1), bound + 1))


def injectivity(phi, bound: int, source_top: Optional[int] = None) -> InjectivityCertificate:
    """Find the first degree where H(phi) has a kernel, or certify injectivity.

    A failure is always exact.  Injectivity is conclusive only when the
    source's cohomology is known to vanish above ``source_top <= bound``.
    """
    last = bound if source_top is None else min(bound, source_top)
    for k in range(0, last + 1):
        src = cohomology(phi.source, k)
        if not src.dim:
            continue
        m = induced_map(phi, k)
        ker = kernel_basis(m)
        if ker:
            coeffs = ker[0]
            w: Vector = {}
            for i, c in coeffs.items():
                w = vec_add(w, src.reps[i], c)
            # the three defining properties of a witness, checked exactly
            assert src.is_cocycle(w)
            assert any(src.classify(w))
            assert cohomology(phi.target, k).primitive(phi.matrix(k).apply(w)) is not None
            return InjectivityCertificate(False, bound, True, degree=k,
                                          witness=phi.source.element(w, k), witness_vector=w)
    conclusive = source_top is not None and source_top <= bound
    note = ""
    if source_top is None:
        gens = getattr(phi.source, "gens", None)
        width = (max(gens.degrees) + 1) if gens is not None and len(gens) else 1
        if window_vanishes(phi.source, bound, width):
            note = f"source cohomology vanishes in the last {width} degrees (heuristic, not a proof)"
    return InjectivityCertificate(True, bound, conclusive, note=note)


# -- finite-dimensional graded commutative algebras ------------------------

Key = Hashable


class FiniteGradedAlgebra:
    """Finite-dimensional graded-commutative algebra given by structure constants.

    ``basis[k]`` lists hashable keys of degree k; ``mul(x, y)`` returns the
    product of two basis keys as a dict key -> coefficient.
    """

    def __init__(self, basis: Dict[int, List[Key]], mul, name: str = ""):
        self.basis = {k: list(v) for k, v in basis.items() if v}
        self.name = name
        self._mul = mul
        self._deg = {key: k for k, keys in self.basis.items() for key in keys}
        self._cache: Dict[Tuple[Key, Key], Dict[Key, Fraction]] = {}

    @property
    def top(self) -> int:
        return max(self.basis, default=0)

    def degree_of(self, key: Key) -> int:
        return self._deg[key]

    def dim(self, k: int) -> int:
        return len(self.basis.get(k, ()))

    def mul_keys(self, x: Key, y: Key) -> Dict[Key, Fraction]:
        if (x, y) not in self._cache:
            self._cache[(x, y)] = {k: v for k, v in self._mul(x, y).items() if v}
        return self._cache[(x, y)]

    def mul(self, a: Dict[Key, Fraction], b: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
        out: Dict[Key, Fraction] = {}
        for x, c in a.items():
            for y, e in b.items():
                for z, f in self.mul_keys(x, y).items():
                    v = out.get(z, 0) + c * e * f
                    if v:
                        out[z] = v
                    else:
                        out.pop(z, None)
        return out

    def to_vector(self, a: Dict[Key, Fraction], k: int) -> Vector:
        idx = {key: i for i, key in enumerate(self.basis.get(k, ()))}
        return {idx[key]: c for key, c in a.items()}

    def from_vector(self, vec: Vector, k: int) -> Dict[Key, Fraction]:
        keys = self.basis.get(k, [])
        return {keys[i]: c for i, c in vec.items()}

    def tensor(self, other: "FiniteGradedAlgebra") -> "FiniteGradedAlgebra":
        basis: Dict[int, List[Key]] = {}
        for k1, keys1 in sorted(self.basis.items()):
            for k2, keys2 in sorted(other.basis.items()):
                basis.setdefault(k1 + k2, []).extend((x, y) for x in keys1 for y in keys2)

        def mul(p, q):
            (x1, y1), (x2, y2) = p, q
            sign = -1 if (other.degree_of(y1) * self.degree_of(x2)) % 2 else 1
            out = {}
            for a, c in self.mul_keys(x1, x2).items():
                for b, e in other.mul_keys(y1, y2).items():
                    out[(a, b)] = out.get((a, b), 0) + sign * c * e
            return out

        return FiniteGradedAlgebra(basis, mul, name=f"{self.name}⊗{other.name}")


def tensor_power_keys(alg: FiniteGradedAlgebra, n: int) -> FiniteGradedAlgebra:
    out = alg
    for _ in range(n - 1):
        out = out.tensor(alg)
    return out


def flatten_key(key, n: int) -> Tuple:
    """((a, b), c) -> (a, b, c) for an n-fold left-nested tensor key."""
    parts = []
    for _ in range(n - 1):
        key, last = key
        parts.append(last)
    parts.append(key)
    return tuple(reversed(parts))


def cohomology_algebra(a, top: int) -> FiniteGradedAlgebra:
    """H(A) through degree ``top`` as a finite graded algebra (keys (degree, i))."""
    groups = {k: cohomology(a, k) for k in range(top + 1)}
    basis = {k: [(k, i) for i in range(g.dim)] for k, g in groups.items()}
    reps = {k: g.rep_elements() for k, g in groups.items()}

    def mul(x, y):
        (k1, i), (k2, j) = x, y
        k = k1 + k2
        if k > top:
            return {}
        prod = reps[k1][i] * reps[k2][j]
        cls = groups[k].classify(a.coords(prod, k))
        return {(k, n): c for n, c in enumerate(cls) if c}

    return FiniteGradedAlgebra(basis, mul, name=a.name)


def multiplication_kernel(h: FiniteGradedAlgebra, n: int, max_degree: Optional[int] = None):
    """H^{⊗n} and degreewise bases of ker(H^{⊗n} -> H) as dicts.

    With ``max_degree`` only kernel elements of degree <= max_degree are kept,
    which is what stays trustworthy when H is only known up to that degree.
    """
    hn = tensor_power_keys(h, n)
    kernel: Dict[int, List[Dict[Key, Fraction]]] = {}
    for k, keys in hn.basis.items():
        if max_degree is not None and k > max_degree:
            continue
        cols = []
        for key in keys:
            factors = flatten_key(key, n)
            prod = {factors[0]: Fraction(1)}
            for f in factors[1:]:
                prod = h.mul(prod, {f: Fraction(1)})
            cols.append(h.to_vector(prod, k))
        m = QMatrix.from_columns(h.dim(k), cols)
        kernel[k] = [hn.from_vector(v, k) for v in kernel_basis(m)]
    return hn, kernel


def nil_of_subspace(alg: FiniteGradedAlgebra, ideal: Dict[int, List[Dict[Key, Fraction]]]):
    """Largest ℓ with I^ℓ ≠ 0 for a graded ideal I of a finite algebra, with witness.

    Products are formed only among the given spanning elements, which is
    enough when the spanning set is an ideal.  Returns (ℓ, witness factors).
    """
    gens = [(k, v) for k, vs in sorted(ideal.items()) for v in vs if v]
    if not gens:
        return 0, []
    # level p: list of (degree, element, factor list), reduced to a basis per degree
    level = {}
    for k, v in gens:
        level.setdefault(k, []).append((v, [v]))
    length = 1
    witness = [gens[0][1]]
    while True:
        nxt: Dict[int, list] = {}
        spans: Dict[int, Span] = {}
        for k, items in level.items():
            for v, factors in items:
                for kg, g in gens:
                    kk = k + kg
                    if kk > alg.top:
                        continue
                    prod = alg.mul(v, g)
                    if not prod:
                        continue
                    vec = alg.to_vector(prod, kk)
                    sp = spans.setdefault(kk, Span())
                    if sp.add(vec):
                        nxt.setdefault(kk, []).append((prod, factors + [g]))
        if not nxt:
            return length, witness
        length += 1
        kk = min(nxt)
        witness = nxt[kk][0][1]
        level = nxt
