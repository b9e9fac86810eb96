"""Free CDGAs, morphisms between them, and homotopies through Λ(t, dt)."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .freealg import ONE, Element, GeneratorSet, Monomial, tensor_generators, tensor_power
from .qlinalg import QMatrix, Vector


class CDGAError(Exception):
    pass


class Violation(CDGAError):
    """A generator on which a structural identity fails, with the residue."""

    def __init__(self, generator: str, residue, reason: str):
        self.generator = generator
        self.residue = residue
        self.reason = reason
        super().__init__(f"{reason} at {generator}: {residue}")


class FreeCDGA:
    """(ΛV, d) with d given on generators and extended by the Leibniz rule."""

    def __init__(self, gens: GeneratorSet, differential: Optional[Mapping[Union[str, int], Element]] = None,
                 name: str = "", top: Optional[int] = None):
        self.gens = gens
        self.name = name
        self.top = top
        dvals: List[Element] = [gens.zero() for _ in range(len(gens))]
        for key, val in (differential or {}).items():
            i = key if isinstance(key, int) else gens.index(key)
            if isinstance(val, (int, Fraction)):
                val = Element(gens, {ONE: Fraction(val)})
            if val.gens != gens:
                raise CDGAError(f"differential of {gens.names[i]} lives in another algebra")
            dvals[i] = val
        self.dgen: Tuple[Element, ...] = tuple(dvals)
        self._dmono: Dict[Monomial, Element] = {}
        self._dmat: Dict[int, QMatrix] = {}

    def __repr__(self):
        return f"FreeCDGA({self.name or ','.join(self.gens.names)})"

    @property
    def ambient(self) -> "FreeCDGA":
        return self

    @property
    def simply_connected(self) -> bool:
        return self.gens.simply_connected

    def gen(self, name) -> Element:
        return self.gens.gen(name)

    def one(self) -> Element:
        return self.gens.one()

    def zero(self) -> Element:
        return self.gens.zero()

    # -- differential ----------------------------------------------------

    def d_mono(self, m: Monomial) -> Element:
        hit = self._dmono.get(m)
        if hit is not None:
            return hit
        gens = self.gens
        out = gens.zero()
        deg_prefix = 0
        for j, (i, e) in enumerate(m):
            dg = self.dgen[i]
            if dg:
                prefix = Element(gens, {m[:j]: Fraction(1)})
                suffix = Element(gens, {m[j + 1:]: Fraction(1)})
                if e > 1:
                    core = Element(gens, {((i, e - 1),): Fraction(e)}) * dg
                else:
                    core = dg
                term = prefix * core * suffix
                out = out - term if deg_prefix % 2 else out + term
            deg_prefix += gens.degrees[i] * e
        self._dmono[m] = out
        return out

    def d(self, a: Element) -> Element:
        out = self.gens.zero()
        for m, c in a.terms.items():
            if m:
                out = out + self.d_mono(m).scale(c)
        return out

    # -- degreewise linear algebra ---------------------------------------

    def basis(self, k: int) -> List[Monomial]:
        return self.gens.basis(k)

    def dim(self, k: int) -> int:
        return self.gens.dim(k)

    def coords(self, a: Element, k: int) -> Vector:
        return a.to_vector(k)

    def element(self, vec: Mapping[int, Fraction], k: int) -> Element:
        return Element.from_vector(self.gens, k, vec)

    def dmatrix(self, k: int) -> QMatrix:
        """Matrix of d: degree k -> degree k+1 in the monomial bases."""
        if k not in self._dmat:
            cols = [self.d_mono(m).to_vector(k + 1) for m in self.basis(k)]
            self._dmat[k] = QMatrix.from_columns(self.dim(k + 1), cols)
        return self._dmat[k]

    # -- checks ----------------------------------------------------------

    def violations(self) -> List[Violation]:
        out = []
        for i, dg in enumerate(self.dgen):
            name = self.gens.names[i]
            if dg and dg.degrees() != [self.gens.degrees[i] + 1]:
                out.append(Violation(name, dg, f"d raises degree {self.gens.degrees[i]} to {dg.degrees()}"))
                continue
            dd = self.d(dg)
            if dd:
                out.append(Violation(name, dd, "d∘d is nonzero"))
        return out

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            raise bad[0]

    def tensor(self, other: "FreeCDGA", name: str = "") -> "FreeCDGA":
        gens = tensor_generators(self.gens, other.gens)
        n = len(self.gens)
        diff = {}
        for i, dg in enumerate(self.dgen):
            diff[i] = dg.embed(gens, list(range(n)))
        for i, dg in enumerate(other.dgen):
            diff[n + i] = dg.embed(gens, [n + j for j in range(len(other.gens))])
        top = self.top + other.top if self.top is not None and other.top is not None else None
        return FreeCDGA(gens, diff, name=name or f"{self.name}x{other.name}", top=top)

    def extend(self, new: Sequence[Tuple[str, int]], new_d: Mapping[str, Element],
               name: str = "") -> "FreeCDGA":
        """Λ(V ⊕ W) with d on V kept and d on W given in the extended algebra."""
        gens = self.gens.extend(new)
        diff: Dict[Union[int, str], Element] = {i: dg.embed(gens) for i, dg in enumerate(self.dgen)}
        for n, val in new_d.items():
            diff[n] = val if val.gens == gens else val.embed(gens)
        return FreeCDGA(gens, diff, name=name or self.name, top=None)


class CDGAMorphism:
    """Multiplicative map determined by its values on the source generators.

    The target is a FreeCDGA or a QuotientCDGA; values are elements of the
    target's ambient free algebra (coset representatives for a quotient).
    """

    def __init__(self, source: FreeCDGA, target, values: Mapping[Union[str, int], Element], name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        tg = target.ambient.gens
        vals: List[Element] = [tg.zero() for _ in range(len(source.gens))]
        for key, val in values.items():
            i = key if isinstance(key, int) else source.gens.index(key)
            if isinstance(val, (int, Fraction)):
                val = Element(tg, {ONE: Fraction(val)})
            if val.gens != tg:
                raise CDGAError(f"value on {source.gens.names[i]} is not in the target algebra")
            vals[i] = val
        self.values: Tuple[Element, ...] = tuple(vals)
        self._mono: Dict[Monomial, Element] = {}
        self._mat: Dict[int, QMatrix] = {}

    def __repr__(self):
        return f"CDGAMorphism({self.name or '?'}: {self.source!r} -> {self.target!r})"

    def image_mono(self, m: Monomial) -> Element:
        hit = self._mono.get(m)
        if hit is not None:
            return hit
        tg = self.target.ambient.gens
        if not m:
            out = tg.one()
        else:
            i, e = m[-1]
            rest = m[:-1] + (((i, e - 1),) if e > 1 else ())
            out = self.image_mono(rest) * self.values[i]
        self._mono[m] = out
        return out

    def __call__(self, a: Element) -> Element:
        out = self.target.ambient.gens.zero()
        for m, c in a.terms.items():
            out = out + self.image_mono(m).scale(c)
        return out

    def matrix(self, k: int) -> QMatrix:
        if k not in self._mat:
            cols = [self.target.coords(self.image_mono(m), k) for m in self.source.basis(k)]
            self._mat[k] = QMatrix.from_columns(self.target.dim(k), cols)
        return self._mat[k]

    def violations(self) -> List[Violation]:
        out = []
        amb = self.target.ambient
        for i, val in enumerate(self.values):
            name = self.source.gens.names[i]
            deg = self.source.gens.degrees[i]
            if val and val.degrees() != [deg]:
                out.append(Violation(name, val, "morphism is not of degree 0"))
                continue
            residue = self(self.source.dgen[i]) - amb.d(val)
            if residue and self.target.coords(residue, deg + 1):
                out.append(Violation(name, residue, "not a chain map"))
        return out

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            raise bad[0]

    def compose(self, inner: "CDGAMorphism", name: str = "") -> "CDGAMorphism":
        """self ∘ inner."""
        if inner.target is not self.source and inner.target != self.source:
            if getattr(inner.target, "ambient", None) is not self.source:
                raise CDGAError("morphisms are not composable")
        vals = {i: self(v) for i, v in enumerate(inner.values)}
        return CDGAMorphism(inner.source, self.target, vals, name=name)

    def is_surjective(self, k: int) -> bool:
        from .qlinalg import rank
        return rank(self.matrix(k)) == self.target.dim(k)


def identity(a: FreeCDGA) -> CDGAMorphism:
    return CDGAMorphism(a, a, {i: a.gens.gen(i) for i in range(len(a.gens))}, name="id")


def augmentation(a: FreeCDGA) -> CDGAMorphism:
    """ΛV -> Q, all generators to zero."""
    point = FreeCDGA(GeneratorSet((), ()), name="Q", top=0)
    return CDGAMorphism(a, point, {}, name="aug")


def multiplication_model(a: FreeCDGA, n: int) -> Tuple[FreeCDGA, CDGAMorphism]:
    """(ΛV)^{⊗n} = Λ(V ⊕ ... ⊕ V) and the multiplication μ_n onto ΛV."""
    if n < 2:
        raise ValueError("n must be at least 2")
    gens = tensor_power(a.gens, n)
    k = len(a.gens)
    diff = {}
    for j in range(n):
        shift = [j * k + i for i in range(k)]
        for i, dg in enumerate(a.dgen):
            diff[j * k + i] = dg.embed(gens, shift)
    top = n * a.top if a.top is not None else None
    power = FreeCDGA(gens, diff, name=f"{a.name}^{n}", top=top)
    mu = CDGAMorphism(power, a, {j * k + i: a.gens.gen(i) for j in range(n) for i in range(k)},
                      name=f"mu_{n}")
    return power, mu


def factor_inclusion(a: FreeCDGA, power: FreeCDGA, j: int = 0) -> CDGAMorphism:
    k = len(a.gens)
    return CDGAMorphism(a, power, {i: power.gens.gen(j * k + i) for i in range(k)}, name=f"in_{j + 1}")


# -- the path object C ⊗ Λ(t, dt) -----------------------------------------

PathKey = Tuple[int, int]  # (power of t, number of dt factors)


class PathElement:
    """Element of C ⊗ Λ(t, dt), |t| = 0, dt = d(t): a map (a, e) -> c for c ⊗ t^a dt^e."""

    __slots__ = ("base", "parts")

    def __init__(self, base: FreeCDGA, parts: Optional[Mapping[PathKey, Element]] = None):
        self.base = base
        self.parts: Dict[PathKey, Element] = {}
        for key, c in (parts or {}).items():
            if c:
                self.parts[key] = c

    @classmethod
    def constant(cls, base: FreeCDGA, c: Element) -> "PathElement":
        return cls(base, {(0, 0): c})

    def __add__(self, other: "PathElement") -> "PathElement":
        parts = dict(self.parts)
        for k, c in other.parts.items():
            v = parts[k] + c if k in parts else c
            if v:
                parts[k] = v
            else:
                parts.pop(k, None)
        return PathElement(self.base, parts)

    def __neg__(self):
        return PathElement(self.base, {k: -c for k, c in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "PathElement":
        return PathElement(self.base, {k: c.scale(s) for k, c in self.parts.items()})

    def __mul__(self, other: "PathElement") -> "PathElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        gens = self.base.gens
        parts: Dict[PathKey, Element] = {}
        for (a, e), c in self.parts.items():
            for (b, f), c2 in other.parts.items():
                if e + f > 1:
                    continue
                if e:
                    # moving dt past c2 costs (-1)^{|c2|}
                    prod = gens.zero()
                    for deg, piece in c2.homogeneous_components().items():
                        term = c * piece
                        prod = prod - term if deg % 2 else prod + term
                else:
                    prod = c * c2
                if prod:
                    key = (a + b, e + f)
                    parts[key] = parts[key] + prod if key in parts else prod
        return PathElement(self.base, parts)

    def __eq__(self, other):
        if not isinstance(other, PathElement):
            return NotImplemented
        return self.parts == other.parts

    def __bool__(self):
        return bool(self.parts)

    def d(self) -> "PathElement":
        parts: Dict[PathKey, Element] = {}

        def put(key, c):
            if not c:
                return
            parts[key] = parts[key] + c if key in parts else c

        for (a, e), c in self.parts.items():
            put((a, e), self.base.d(c))
            if e == 0 and a > 0:
                for deg, piece in c.homogeneous_components().items():
                    term = piece.scale(a)
                    put((a - 1, 1), -term if deg % 2 else term)
        return PathElement(self.base, {k: v for k, v in parts.items() if v})

    def evaluate(self, s) -> Element:
        """ev_s: t -> s, dt -> 0."""
        s = Fraction(s)
        out = self.base.zero()
        for (a, e), c in self.parts.items():
            if e == 0:
                out = out + c.scale(s ** a)
        return out

    def weight(self) -> int:
        return max((a + e for a, e in self.parts), default=0)

    def truncate(self, t_max: int) -> Tuple["PathElement", bool]:
        """Drop parts of weight > t_max; the flag reports whether anything was dropped."""
        kept = {k: c for k, c in self.parts.items() if k[0] + k[1] <= t_max}
        return PathElement(self.base, kept), len(kept) != len(self.parts)

    def __repr__(self):
        if not self.parts:
            return "0"
        out = []
        for (a, e), c in sorted(self.parts.items()):
            tpart = ("" if a == 0 else ("t" if a == 1 else f"t^{a}")) + ("dt" if e else "")
            out.append(f"({c})" + (f"⊗{tpart}" if tpart else ""))
        return " + ".join(out)


def path_evaluate(base: FreeCDGA, s) -> "callable":
    """The evaluation morphism ev_s: C ⊗ Λ(t,dt) -> C as a function on PathElements."""
    if Fraction(s) not in (0, 1):
        raise ValueError("only s = 0 and s = 1 are endpoints")
    return lambda p: p.evaluate(s)


class TruncatedPathComplex:
    """C ⊗ Λ(t,dt) restricted to t-weight <= T as a cochain complex.

    Weight (power of t, plus 1 for dt) is preserved by d, so this is an
    honest quotient complex.  With ``augmented=True`` only Λ⁺(t,dt), the
    kernel of t -> 0, is kept.
    """

    def __init__(self, base: FreeCDGA, t_max: int, augmented: bool = False):
        self.base = base
        self.t_max = t_max
        self.augmented = augmented
        self._keys: Dict[int, List[Tuple[int, int, int]]] = {}
        self._dmat: Dict[int, QMatrix] = {}

    def keys(self, k: int) -> List[Tuple[int, int, int]]:
        """Basis of degree k as (t-power, dt?, base monomial index)."""
        if k not in self._keys:
            out = []
            lo = 1 if self.augmented else 0
            for a in range(lo, self.t_max + 1):
                out.extend((a, 0, i) for i in range(self.base.dim(k)))
            for a in range(0, self.t_max):
                out.extend((a, 1, i) for i in range(self.base.dim(k - 1)))
            self._keys[k] = out
        return self._keys[k]

    def dim(self, k: int) -> int:
        return len(self.keys(k))

    def coords(self, p: PathElement, k: int) -> Vector:
        index = {key: n for n, key in enumerate(self.keys(k))}
        out: Vector = {}
        for (a, e), c in p.parts.items():
            for i, v in c.to_vector(k - e).items():
                out[index[(a, e, i)]] = v
        return out

    def element(self, vec: Mapping[int, Fraction], k: int) -> PathElement:
        keys = self.keys(k)
        parts: Dict[PathKey, Dict[int, Fraction]] = {}
        for n, v in vec.items():
            a, e, i = keys[n]
            parts.setdefault((a, e), {})[i] = v
        return PathElement(self.base, {key: self.base.element(vv, k - key[1]) for key, vv in parts.items()})

    def dmatrix(self, k: int) -> QMatrix:
        if k not in self._dmat:
            cols = []
            for a, e, i in self.keys(k):
                c = Element(self.base.gens, {self.base.basis(k - e)[i]: Fraction(1)})
                cols.append(self.coords(PathElement(self.base, {(a, e): c}).d(), k + 1))
            self._dmat[k] = QMatrix.from_columns(self.dim(k + 1), cols)
        return self._dmat[k]


# -- homotopies -------------------------------------------------------------

class HomotopyError(CDGAError):
    pass


class NotChainMap(HomotopyError):
    def __init__(self, generator: str, residue):
        self.generator = generator
        self.residue = residue
        super().__init__(f"H is not a chain map at {generator}: residue {residue}")


class EndpointMismatch(HomotopyError):
    def __init__(self, which: int, generator: str):
        self.which = which
        self.generator = generator
        super().__init__(f"ev_{which}∘H differs from the claimed morphism at {generator}")


class RelViolation(HomotopyError):
    def __init__(self, generator: str):
        self.generator = generator
        super().__init__(f"H is not constant on {generator}, which lies in the rel subset")


class Homotopy:
    """A morphism H: A -> C ⊗ Λ(t,dt) given on generators."""

    def __init__(self, source: FreeCDGA, target: FreeCDGA, values: Mapping[Union[str, int], PathElement]):
        self.source = source
        self.target = target
        vals = [PathElement(target) for _ in range(len(source.gens))]
        for key, v in values.items():
            i = key if isinstance(key, int) else source.gens.index(key)
            vals[i] = v
        self.values: Tuple[PathElement, ...] = tuple(vals)
        self._mono: Dict[Monomial, PathElement] = {}

    @classmethod
    def constant(cls, f: CDGAMorphism) -> "Homotopy":
        return cls(f.source, f.target, {i: PathElement.constant(f.target, v) for i, v in enumerate(f.values)})

    def image_mono(self, m: Monomial) -> PathElement:
        hit = self._mono.get(m)
        if hit is not None:
            return hit
        if not m:
            out = PathElement.constant(self.target, self.target.one())
        else:
            i, e = m[-1]
            rest = m[:-1] + (((i, e - 1),) if e > 1 else ())
            out = self.image_mono(rest) * self.values[i]
        self._mono[m] = out
        return out

    def __call__(self, a: Element) -> PathElement:
        out = PathElement(self.target)
        for m, c in a.terms.items():
            out = out + self.image_mono(m).scale(c)
        return out

    def endpoint(self, s) -> CDGAMorphism:
        return CDGAMorphism(self.source, self.target, {i: v.evaluate(s) for i, v in enumerate(self.values)},
                            name=f"ev{s}H")


def verify_homotopy(f: CDGAMorphism, g: CDGAMorphism, h: Homotopy, rel: Iterable[Union[str, int]] = ()) -> None:
    """Check that h is a homotopy f ≃ g (rel the given generators); raise on failure."""
    src = f.source
    rel_idx = {r if isinstance(r, int) else src.gens.index(r) for r in rel}
    for i in range(len(src.gens)):
        name = src.gens.names[i]
        if i in rel_idx:
            if h.values[i] != PathElement.constant(f.target, f.values[i]):
                raise RelViolation(name)
        residue = h(src.dgen[i]) - h.values[i].d()
        if residue:
            raise NotChainMap(name, residue)
        if h.values[i].evaluate(0) != f.values[i]:
            raise EndpointMismatch(0, name)
        if h.values[i].evaluate(1) != g.values[i]:
            raise EndpointMismatch(1, name)
