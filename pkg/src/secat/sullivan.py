"""Relative Sullivan models of projections A -> A/I, and retraction/homotopy search.

The model is built by killing the cohomology of K = ker θ degree by degree:
θ: A⊗ΛZ -> A/I is surjective from the start, so it is a quasi-isomorphism
exactly when K is acyclic.  Every added generator z has θ(z) = 0.

Retraction search is obstruction theory.  Extending r over z requires
[r(Dz)] = 0 in H(A); the remaining freedom in r(z) is a cocycle, and up to
homotopy rel A only its class matters, so free choices are tracked as
parameters multiplying representatives of H^{|z|}(A).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .cdga import (CDGAError, CDGAMorphism, FreeCDGA, Homotopy, HomotopyError, PathElement,
                   TruncatedPathComplex, verify_homotopy)
from .cohomology import cohomology, induced_map
from .freealg import Element
from .ideals import DStableIdeal, QuotientCDGA, quotient
from .qlinalg import NO_SOLUTION, QMatrix, Span, kernel_basis, rank, solve


class BudgetExceeded(CDGAError):
    def __init__(self, degree: int, count: int, limit: int):
        self.degree = degree
        self.count = count
        self.limit = limit
        super().__init__(f"relative model needs {count} generators in degree {degree} (limit {limit})")


class RetractionError(CDGAError):
    pass


class NotRetraction(RetractionError):
    def __init__(self, generator: str):
        self.generator = generator
        super().__init__(f"r∘i differs from the identity at {generator}")


class NotChainMap(RetractionError):
    def __init__(self, generator: str, residue):
        self.generator = generator
        self.residue = residue
        super().__init__(f"r is not a chain map at {generator}: residue {residue}")


@dataclass
class Budget:
    max_generators_per_degree: int = 256
    max_parameters: int = 64
    max_weight: int = 8


@dataclass
class RelativeModel:
    base: FreeCDGA
    ideal: DStableIdeal
    quotient: QuotientCDGA
    total: FreeCDGA
    added: Tuple[str, ...]
    theta: CDGAMorphism
    inclusion: CDGAMorphism
    bound: int
    counts: Dict[int, int] = field(default_factory=dict)

    def added_indices(self) -> List[int]:
        return [self.total.gens.index(n) for n in self.added]

    def check(self, bound: Optional[int] = None) -> None:
        """Validate D, θ, θ∘i = ρ and that H(θ) is an isomorphism through ``bound``."""
        bound = self.bound if bound is None else bound
        self.total.validate()
        self.theta.validate()
        for i in range(len(self.base.gens)):
            if self.theta.values[i] != self.base.gens.gen(i):
                raise CDGAError(f"θ∘i differs from ρ at {self.base.gens.names[i]}")
        for k in range(bound + 1):
            m = induced_map(self.theta, k)
            if not (m.nrows == m.ncols == rank(m)):
                raise CDGAError(f"H^{k}(θ) is not an isomorphism")


def _fresh_names(taken: set, degree: int, count: int) -> List[str]:
    out, i = [], 0
    while len(out) < count:
        name = f"z{degree}_{i}"
        if name not in taken:
            out.append(name)
            taken.add(name)
        i += 1
    return out


def _theta(total: FreeCDGA, q: QuotientCDGA, nbase: int) -> CDGAMorphism:
    return CDGAMorphism(total, q, {i: q.ambient.gens.gen(i) for i in range(nbase)}, name="θ")


def _kill_classes(total: FreeCDGA, theta: CDGAMorphism, k: int) -> List[Element]:
    """Representatives of a basis of H^k(ker θ)."""
    kern = kernel_basis(theta.matrix(k))
    if not kern:
        return []
    dk = total.dmatrix(k)
    images = [dk.apply(v) for v in kern]
    cycles = kernel_basis(QMatrix.from_columns(total.dim(k + 1), images))
    span = Span()
    if k > 0:
        dprev = total.dmatrix(k - 1)
        for v in kernel_basis(theta.matrix(k - 1)):
            b = dprev.apply(v)
            if b:
                span.add(b)
    out = []
    for c in cycles:
        vec: Dict[int, Fraction] = {}
        for j, coef in c.items():
            for i, x in kern[j].items():
                vec[i] = vec.get(i, 0) + coef * x
        vec = {i: x for i, x in vec.items() if x}
        if vec and span.add(vec):
            out.append(total.element(vec, k))
    return out


def relative_model(a: FreeCDGA, ideal: DStableIdeal, bound: int, budget: Optional[Budget] = None,
                   check_stable: bool = True) -> RelativeModel:
    """(A⊗ΛZ, D) -> A/I with generators of degree <= bound, θ an isomorphism in H^{<=bound}."""
    budget = budget or Budget()
    q, _ = quotient(a, ideal, bound + 2, check=check_stable)
    total = a
    added: List[str] = []
    counts: Dict[int, int] = {}
    taken = set(a.gens.names)
    theta = _theta(total, q, len(a.gens))
    for k in range(1, bound + 2):
        while True:
            classes = _kill_classes(total, theta, k)
            if not classes:
                break
            if k == 1:
                raise CDGAError("ker θ has cohomology in degree 1; a degree-0 generator would be needed")
            counts[k - 1] = counts.get(k - 1, 0) + len(classes)
            if counts[k - 1] > budget.max_generators_per_degree:
                raise BudgetExceeded(k - 1, counts[k - 1], budget.max_generators_per_degree)
            names = _fresh_names(taken, k - 1, len(classes))
            new_total = total.extend([(n, k - 1) for n in names], {}, name=f"{a.name}⊗ΛZ")
            diff = {i: dg for i, dg in enumerate(new_total.dgen)}
            for n, c in zip(names, classes):
                diff[n] = c.embed(new_total.gens)
            total = FreeCDGA(new_total.gens, diff, name=new_total.name)
            added.extend(names)
            theta = _theta(total, q, len(a.gens))
            if all(d >= 2 for d in total.gens.degrees):
                break  # without degree-1 generators nothing new appears in degree k
    inclusion = CDGAMorphism(a, total, {i: total.gens.gen(i) for i in range(len(a.gens))}, name="i")
    return RelativeModel(a, ideal, q, total, tuple(added), theta, inclusion, bound, counts)


def verify_retraction(model: RelativeModel, r: CDGAMorphism) -> None:
    """Check r: A⊗ΛZ -> A has r∘i = id_A, degree 0 and commutes with d; raise on failure."""
    a = model.base
    if r.source.gens != model.total.gens or r.target.gens != a.gens:
        raise RetractionError("r must go from the relative model to its base")
    for i in range(len(a.gens)):
        if r.values[i] != a.gens.gen(i):
            raise NotRetraction(a.gens.names[i])
    for v in r.violations():
        raise NotChainMap(v.generator, v.residue)


# -- parametrised elements: polynomial in parameters with coefficients in A --

ParamPoly = Dict[Tuple[int, ...], Element]


def _pp_add(p: ParamPoly, q: ParamPoly, scale=Fraction(1)) -> ParamPoly:
    out = dict(p)
    for k, e in q.items():
        v = out[k] + e.scale(scale) if k in out else e.scale(scale)
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _pp_mul(p: ParamPoly, q: ParamPoly) -> ParamPoly:
    out: ParamPoly = {}
    for k1, e1 in p.items():
        for k2, e2 in q.items():
            prod = e1 * e2
            if prod:
                out = _pp_add(out, {tuple(sorted(k1 + k2)): prod})
    return out


def _pp_subst(p: ParamPoly, sub: Dict[int, Tuple[Fraction, Dict[int, Fraction]]]) -> ParamPoly:
    """Replace parameter j by c + Σ coef·μ for the linear substitutions given."""
    out: ParamPoly = {}
    for key, e in p.items():
        terms: ParamPoly = {(): e}
        for j in key:
            if j in sub:
                c, lin = sub[j]
                factor: Dict[Tuple[int, ...], Fraction] = {}
                if c:
                    factor[()] = c
                for mu, coef in lin.items():
                    factor[(mu,)] = coef
            else:
                factor = {(j,): Fraction(1)}
            nxt: ParamPoly = {}
            for k1, e1 in terms.items():
                for k2, c2 in factor.items():
                    nxt = _pp_add(nxt, {tuple(sorted(k1 + k2)): e1.scale(c2)})
            terms = nxt
        out = _pp_add(out, terms)
    return out


@dataclass
class RetractionOutcome:
    verdict: str                      # "found" | "obstructed" | "budget"
    retraction: Optional[CDGAMorphism] = None
    degree: Optional[int] = None      # degree of the obstruction class
    generator: Optional[str] = None
    obstruction: Optional[Element] = None
    conclusive: bool = False
    scope: str = ""
    parameters: int = 0

    @property
    def found(self) -> bool:
        return self.verdict == "found"


def search_retraction(model: RelativeModel, budget: Optional[Budget] = None) -> RetractionOutcome:
    """Look for r: A⊗ΛZ -> A with r∘i = id, generator by generator."""
    budget = budget or Budget()
    a, total = model.base, model.total
    values: List[ParamPoly] = [{(): a.gens.gen(i)} for i in range(len(a.gens))]
    nparams = 0
    dropped = False
    for zi in model.added_indices():
        name = total.gens.names[zi]
        deg = total.gens.degrees[zi]

        def image(elem: Element) -> ParamPoly:
            out: ParamPoly = {}
            for m, c in elem.terms.items():
                term: ParamPoly = {(): a.one().scale(c)}
                for i, e in m:
                    for _ in range(e):
                        term = _pp_mul(term, values[i])
                out = _pp_add(out, term)
            return out

        obs = image(total.dgen[zi])
        if any(len(k) > 1 for k in obs):
            return RetractionOutcome("budget", degree=deg + 1, generator=name, parameters=nparams,
                                     scope="obstruction depends non-linearly on earlier free choices")
        h = cohomology(a, deg + 1)
        classes = {k: h.classify(a.coords(e, deg + 1)) for k, e in obs.items()}
        params = sorted(k[0] for k in obs if k)
        const = classes.get((), [Fraction(0)] * h.dim)
        cols = [{i: c for i, c in enumerate(classes[(j,)]) if c} for j in params]
        if any(const) or any(cols):
            mat = QMatrix.from_columns(h.dim, cols)
            sol = solve(mat, {i: -c for i, c in enumerate(const) if c})
            if sol is NO_SOLUTION:
                influenced = any(cols)
                scope = ("no earlier free choice reaches this class" if not influenced else
                         f"the class survives every value of {len(params)} tracked parameters")
                return RetractionOutcome("obstructed", degree=deg + 1, generator=name,
                                         obstruction=obs.get((), a.zero()),
                                         conclusive=not influenced and not dropped,
                                         scope=scope, parameters=nparams)
            if params:
                kern = kernel_basis(mat)
                fresh = list(range(nparams, nparams + len(kern)))
                nparams += len(kern)
                sub = {}
                for pos, j in enumerate(params):
                    lin = {fresh[n]: v[pos] for n, v in enumerate(kern) if pos in v}
                    sub[j] = (sol.get(pos, Fraction(0)), lin)
                values = [_pp_subst(v, sub) for v in values]
                obs = image(total.dgen[zi])
        # every coefficient of obs is now exact; integrate it
        val: ParamPoly = {}
        for k, e in obs.items():
            prim = h.primitive(a.coords(e, deg + 1))
            assert prim is not None
            val = _pp_add(val, {k: a.element(prim, deg)})
        reps = cohomology(a, deg).rep_elements()
        if reps:
            if nparams + len(reps) > budget.max_parameters:
                dropped = True
            else:
                for rep in reps:
                    val = _pp_add(val, {(nparams,): rep})
                    nparams += 1
        values.append(val)
    # all parameters set to zero
    concrete = {i: v.get((), a.zero()) for i, v in enumerate(values)}
    r = CDGAMorphism(total, a, concrete, name="r")
    verify_retraction(model, r)
    scope = "all generators of the model" + (" (some free choices not tracked)" if dropped else "")
    return RetractionOutcome("found", retraction=r, conclusive=True, scope=scope, parameters=nparams)


def obstructions_vanish_above(model: RelativeModel, top: Optional[int]) -> bool:
    """Whether generators beyond the model's bound can never be obstructed.

    Obstructions for z live in H^{|z|+1}(A), which is zero once |z| >= top.
    """
    return top is not None and top <= model.bound + 1


# -- homotopy search ---------------------------------------------------------

@dataclass
class HomotopyOutcome:
    found: Optional[Homotopy]
    conclusive: bool
    reason: str = ""
    generator: Optional[str] = None
    degree: Optional[int] = None
    overflow: bool = False


def _ev_rows(cx: TruncatedPathComplex, k: int, s: int) -> Dict[int, Dict[int, Fraction]]:
    rows: Dict[int, Dict[int, Fraction]] = {}
    for n, (a, e, i) in enumerate(cx.keys(k)):
        if e == 0 and (s == 1 or a == 0):
            rows.setdefault(i, {})[n] = Fraction(1)
    return rows


def search_homotopy(f: CDGAMorphism, g: CDGAMorphism, rel: Sequence = (), bound: int = 12,
                    budget: Optional[Budget] = None) -> HomotopyOutcome:
    """Try to build H: f ≃ g (rel the given source generators) by lifting generator by generator.

    Each step solves dξ = Ψ with ξ vanishing at both ends; when a solution
    exists one of t-weight at most weight(Ψ)+1 exists, so a failed step is a
    genuine obstruction for the choices made so far.
    """
    budget = budget or Budget()
    src, tgt = f.source, f.target
    if not isinstance(tgt, FreeCDGA):
        raise HomotopyError("homotopy search needs a free target algebra")
    for k in range(bound + 1):
        if induced_map(f, k) != induced_map(g, k):
            return HomotopyOutcome(None, True, f"the two maps differ on H^{k}", degree=k)
    rel_idx = {r if isinstance(r, int) else src.gens.index(r) for r in rel}
    values: Dict[int, PathElement] = {}
    for i in rel_idx:
        if f.values[i] != g.values[i]:
            return HomotopyOutcome(None, True, "the maps differ on a generator held fixed",
                                   generator=src.gens.names[i])
        values[i] = PathElement.constant(tgt, f.values[i])
    order = sorted((i for i in range(len(src.gens)) if i not in rel_idx),
                   key=lambda i: (src.gens.degrees[i], i))
    free_before = False
    for i in order:
        name = src.gens.names[i]
        deg = src.gens.degrees[i]
        partial = Homotopy(src, tgt, values)
        phi = partial(src.dgen[i])
        base = PathElement(tgt, {(0, 0): f.values[i], (1, 0): g.values[i] - f.values[i]})
        psi = phi - base.d()
        if psi:
            t_max = max(psi.weight() + 2, 2)
            if t_max > budget.max_weight:
                return HomotopyOutcome(None, False, f"needs t-weight {t_max} > {budget.max_weight}",
                                       generator=name, overflow=True)
            cx = TruncatedPathComplex(tgt, t_max)
            rows = dict(cx.dmatrix(deg).rows)
            rhs = dict(cx.coords(psi, deg + 1))
            off = cx.dim(deg + 1)
            for s in (0, 1):
                for r, row in _ev_rows(cx, deg, s).items():
                    rows[off + r] = row
                off += tgt.dim(deg)
            mat = QMatrix(off, cx.dim(deg), rows)
            sol = solve(mat, rhs)
            if sol is NO_SOLUTION:
                return HomotopyOutcome(None, not free_before,
                                       "no lift for this generator" +
                                       ("" if not free_before else " with the choices made so far"),
                                       generator=name, degree=deg)
            base = base + cx.element(sol, deg)
        values[i] = base
        if cohomology(tgt, deg - 1).dim:
            free_before = True
    h = Homotopy(src, tgt, values)
    verify_homotopy(f, g, h, rel=list(rel_idx))
    return HomotopyOutcome(h, True, "homotopy verified")
