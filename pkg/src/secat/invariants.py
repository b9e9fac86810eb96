"""Sectional-category type invariants computed from CDGA models.

Every value uses the reduced convention: an invariant equal to m means m+1
open sets.  Lower bounds always come with a witness; upper bounds are only
claimed from an explicit certificate (injectivity that is proven, or a
retraction that was found).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .cdga import CDGAMorphism, FreeCDGA, multiplication_model
from .cohomology import (FiniteGradedAlgebra, cohomology, cohomology_algebra, flatten_key, induced_map,
                         injectivity, multiplication_kernel, nil_of_subspace)
from .ideals import DStableIdeal, NotSurjective, free_algebra_top, quotient
from .qlinalg import kernel_basis
from .sullivan import (Budget, BudgetExceeded, RetractionError, obstructions_vanish_above, relative_model,
                       search_homotopy, search_retraction, verify_retraction)

CONCLUSIVE = "conclusive"
LOWER_ONLY = "lower-bound-only"
INCONCLUSIVE = "inconclusive"


@dataclass
class Certificate:
    status: str
    witness: Optional[str] = None
    degree: Optional[int] = None
    detail: str = ""


@dataclass
class BoundReport:
    invariant: str
    lower: int
    lower_cert: Certificate
    upper: Optional[int] = None
    upper_cert: Optional[Certificate] = None
    degree_bound: int = 0
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper:
            raise ValueError(f"{self.invariant}: lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def conclusive(self) -> bool:
        return (self.upper is not None and self.upper == self.lower
                and self.upper_cert is not None and self.upper_cert.status == CONCLUSIVE)

    @property
    def conclusive_value(self) -> Optional[int]:
        return self.lower if self.conclusive else None

    @property
    def witness(self) -> Optional[str]:
        return self.lower_cert.witness

    def as_dict(self) -> Dict:
        return {
            "invariant": self.invariant,
            "lower": self.lower,
            "upper": self.upper,
            "conclusive": self.conclusive,
            "witness": self.lower_cert.witness,
            "witness_degree": self.lower_cert.degree,
            "upper_certificate": self.upper_cert.status if self.upper_cert else None,
            "certificates": [c.detail for c in (self.lower_cert, self.upper_cert) if c is not None and c.detail],
            "degree_bound": self.degree_bound,
            "notes": list(self.notes),
        }


REDUCED_NOTE = "reduced convention: value m means m+1 open sets"


def _simply_connected_note(a: FreeCDGA, notes: List[str]):
    if not a.simply_connected:
        notes.append("model has degree-1 generators: values are algebraic only, no topological claim")


def known_top(a: FreeCDGA, given: Optional[int] = None) -> Tuple[Optional[int], str]:
    """Degree above which H(a) vanishes, and where that knowledge comes from."""
    if given is not None:
        return given, "asserted by the model"
    if a.top is not None:
        return a.top, "asserted by the model"
    top = free_algebra_top(a)
    if top is not None:
        return top, "all generators odd, so the algebra vanishes above it"
    return None, ""


def _first_injective(a: FreeCDGA, ideal_for, bound: int, top: Optional[int], source: str = ""):
    """Run m = 0, 1, ... until H(A -> A/I_m) is injective through the bound."""
    last = bound if top is None else min(bound, top)
    lower, lower_cert = 0, Certificate(CONCLUSIVE, detail="trivial bound")
    m = 0
    while True:
        ideal = ideal_for(m)
        _, rho = quotient(a, ideal, last + 1)
        cert = injectivity(rho, last, source_top=top)
        if not cert.injective:
            lower = m + 1
            lower_cert = Certificate(CONCLUSIVE, witness=str(cert.witness), degree=cert.degree,
                                     detail=f"class dies under ρ_{m}")
            m += 1
            continue
        status = CONCLUSIVE if cert.conclusive else INCONCLUSIVE
        detail = f"H(ρ_{m}) injective through degree {last}"
        if top is not None and cert.conclusive:
            detail += f" (cohomology top {top} {source or 'asserted by the model'})"
        elif cert.note:
            detail += "; " + cert.note
        return lower, lower_cert, m, Certificate(status, detail=detail)


def toomer(a: FreeCDGA, bound: int = 16) -> BoundReport:
    """Toomer invariant: least m with H(ΛV -> ΛV/Λ^{>m}V) injective."""
    top, source = known_top(a)
    lower, lc, upper, uc = _first_injective(a, lambda m: DStableIdeal.word_length(a, m + 1), bound, top, source)
    notes = [REDUCED_NOTE]
    _simply_connected_note(a, notes)
    return BoundReport("toomer", lower, lc, upper, uc, bound, notes)


def hsecat(phi: CDGAMorphism, bound: int = 16, source_top: Optional[int] = None,
           name: str = "Hsecat") -> BoundReport:
    """Least m with H(ρ_m) injective, ρ_m: A -> A/(ker φ)^{m+1}."""
    src = phi.source
    top, source = known_top(src, source_top)
    last = bound if top is None else min(bound, top)
    for k in range(last + 2):
        if not phi.is_surjective(k):
            raise NotSurjective(k)
    kern = DStableIdeal.kernel_of(phi)
    lower, lc, upper, uc = _first_injective(src, lambda m: kern.power(m + 1), bound, top, source)
    notes = [REDUCED_NOTE]
    _simply_connected_note(src, notes)
    return BoundReport(name, lower, lc, upper, uc, bound, notes)


# -- cohomological lower bounds ---------------------------------------------

def _class_names(a: FreeCDGA, h: FiniteGradedAlgebra) -> Dict:
    names = {}
    for k, keys in h.basis.items():
        reps = cohomology(a, k).rep_elements()
        for key in keys:
            names[key] = "1" if k == 0 else f"[{reps[key[1]]}]"
    return names


def _render_tensor(vec: Dict, n: int, names: Dict) -> str:
    from .freealg import format_coefficient
    parts = []
    for key, c in sorted(vec.items(), key=lambda kc: repr(kc[0])):
        body = "⊗".join(names[f] for f in (flatten_key(key, n) if n > 1 else (key,)))
        coef = abs(c)
        text = body if coef == 1 else f"{format_coefficient(coef)}*{body}"
        parts.append(("- " if c < 0 else "+ ") + text)
    if not parts:
        return "0"
    out = " ".join(parts)
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


@dataclass
class CupLength:
    value: int
    conclusive: bool
    factors: List[str]
    product: str
    degree: Optional[int]


def _nil_with_witness(h: FiniteGradedAlgebra, ideal, n: int, names) -> Tuple[int, List, Dict]:
    length, factors = nil_of_subspace(h, ideal)
    prod: Dict = {}
    if factors:
        prod = factors[0]
        for f in factors[1:]:
            prod = h.mul(prod, f)
    return length, factors, prod


def zero_divisor_cup_length(a: FreeCDGA, n: int = 2, bound: int = 16) -> CupLength:
    """nil ker(H(μ_n): H^{⊗n} -> H), with the product of zero-divisors that realises it."""
    top, _ = known_top(a)
    trunc = top if top is not None else bound
    h = cohomology_algebra(a, trunc)
    hn, kern = multiplication_kernel(h, n, max_degree=None if top is not None else bound)
    names = _class_names(a, h)
    length, factors, prod = _nil_with_witness(hn, kern, n, names)
    degree = None
    if prod:
        degree = hn.degree_of(next(iter(prod)))
    return CupLength(length, top is not None, ["(" + _render_tensor(f, n, names) + ")" for f in factors],
                     _render_tensor(prod, n, names), degree)


def cohomology_kernel_nil(phi: CDGAMorphism, bound: int = 16, source_top: Optional[int] = None) -> CupLength:
    """nil ker H(φ) as an ideal of H(source)."""
    src = phi.source
    top, _ = known_top(src, source_top)
    trunc = top if top is not None else bound
    h = cohomology_algebra(src, trunc)
    kern = {}
    for k in range(trunc + 1):
        if not h.dim(k):
            continue
        vecs = kernel_basis(induced_map(phi, k))
        kern[k] = [h.from_vector(v, k) for v in vecs]
    names = _class_names(src, h)
    length, factors, prod = _nil_with_witness(h, kern, 1, names)
    degree = h.degree_of(next(iter(prod))) if prod else None
    return CupLength(length, top is not None, ["(" + _render_tensor(f, 1, names) + ")" for f in factors],
                     _render_tensor(prod, 1, names), degree)


# -- upper bounds from retractions --------------------------------------------

def _retraction_upper(a: FreeCDGA, ideal_for, start: int, bound: int, budget: Budget, span: int,
                      lower: int, lower_cert: Certificate, notes: List[str]):
    top, _ = known_top(a)
    gen_bound = bound if top is None else max(1, min(bound, top - 1))
    upper, upper_cert = None, None
    for m in range(start, start + span + 1):
        try:
            model = relative_model(a, ideal_for(m), gen_bound, budget)
        except BudgetExceeded as exc:
            notes.append(f"retraction search at m = {m} stopped: {exc}")
            break
        out = search_retraction(model, budget)
        if out.found:
            full = obstructions_vanish_above(model, top)
            status = CONCLUSIVE if (full and out.conclusive) else INCONCLUSIVE
            detail = f"strict retraction of a relative model of ρ_{m} (generators up to degree {gen_bound})"
            if not full:
                detail += "; higher generators not examined"
            upper, upper_cert = m, Certificate(status, detail=detail)
            break
        if out.verdict == "obstructed" and out.conclusive:
            if m + 1 > lower:
                lower = m + 1
                lower_cert = Certificate(CONCLUSIVE, witness=str(out.obstruction), degree=out.degree,
                                         detail=f"no retraction for ρ_{m}: obstruction at {out.generator}")
            continue
        notes.append(f"retraction search at m = {m}: {out.verdict} ({out.scope})")
        break
    return lower, lower_cert, upper, upper_cert


def lscat_bounds(a: FreeCDGA, bound: int = 16, budget: Optional[Budget] = None, span: int = 2) -> BoundReport:
    """cat: Toomer invariant below, retraction search on word-length projections above."""
    budget = budget or Budget()
    e = toomer(a, bound)
    notes = list(e.notes)
    lower, lc = e.lower, e.lower_cert
    lower, lc, upper, uc = _retraction_upper(a, lambda m: DStableIdeal.word_length(a, m + 1), e.lower,
                                             bound, budget, span, lower, lc, notes)
    if upper is None and e.conclusive and e.lower == lower:
        notes.append("only the Toomer lower bound is certified")
    return BoundReport("cat", lower, lc, upper, uc, bound, notes)


def tc_bounds(a: FreeCDGA, n: int = 2, bound: int = 16, budget: Optional[Budget] = None,
              span: int = 2) -> BoundReport:
    """TC_n with φ = μ_n: (ΛV)^{⊗n} -> ΛV."""
    budget = budget or Budget()
    power, mu = multiplication_model(a, n)
    zcl = zero_divisor_cup_length(a, n, bound)
    hs = hsecat(mu, bound, source_top=power.top, name=f"HTC_{n}")
    notes = [REDUCED_NOTE]
    _simply_connected_note(a, notes)
    if hs.lower >= zcl.value:
        lower, lc = hs.lower, hs.lower_cert
    else:
        lower, lc = zcl.value, Certificate(CONCLUSIVE, witness=zcl.product, degree=zcl.degree,
                                           detail="zero-divisor product")
    if zcl.value:
        notes.append(f"zero-divisor cup length {zcl.value}: {' * '.join(zcl.factors)} = {zcl.product}")
    kern = DStableIdeal.kernel_of(mu)
    lower, lc, upper, uc = _retraction_upper(power, lambda m: kern.power(m + 1), lower, bound, budget,
                                             span, lower, lc, notes)
    name = "TC" if n == 2 else f"TC_{n}"
    return BoundReport(name, lower, lc, upper, uc, bound, notes)


# -- relcat ----------------------------------------------------------------------

class RelcatError(Exception):
    pass


class RetractionInvalid(RelcatError):
    pass


class HomotopyNotVerified(RelcatError):
    def __init__(self, details: str, conclusive: bool):
        self.details = details
        self.conclusive = conclusive
        super().__init__(f"homotopy φ∘r ≃ φ̄∘θ rel A not verified ({'conclusive' if conclusive else 'inconclusive'}): {details}")


@dataclass
class RelcatResult:
    level: int
    model: object
    retraction: CDGAMorphism
    homotopy: object

    def describe(self) -> str:
        return f"relcat ≤ {self.level}: retraction and homotopy rel A verified"


def relcat_check(phi: CDGAMorphism, m: int, r: Optional[CDGAMorphism] = None, bound: int = 8,
                 budget: Optional[Budget] = None, model=None) -> RelcatResult:
    """Certify relcat ≤ m from a retraction r of the relative model of ρ_m with φ∘r ≃ φ̄∘θ rel A."""
    budget = budget or Budget()
    a = phi.source
    if model is None:
        kern = DStableIdeal.kernel_of(phi)
        model = relative_model(a, kern.power(m + 1), bound, budget)
    if r is None:
        out = search_retraction(model, budget)
        if not out.found:
            raise RetractionInvalid(f"no retraction found: {out.verdict} ({out.scope})")
        r = out.retraction
    try:
        verify_retraction(model, r)
    except RetractionError as exc:
        raise RetractionInvalid(str(exc)) from exc
    tgt = phi.target
    f = CDGAMorphism(model.total, tgt, {i: phi(v) for i, v in enumerate(r.values)}, name="φ∘r")
    gvals = {i: phi(model.quotient.normal_form(v)) for i, v in enumerate(model.theta.values)}
    g = CDGAMorphism(model.total, tgt, gvals, name="φ̄∘θ")
    out = search_homotopy(f, g, rel=list(range(len(a.gens))), bound=bound + 1, budget=budget)
    if out.found is None:
        where = f" at {out.generator}" if out.generator else ""
        raise HomotopyNotVerified(out.reason + where, out.conclusive)
    return RelcatResult(m, model, r, out.found)


# -- the whole chain ---------------------------------------------------------------

@dataclass
class HierarchyReport:
    entries: List[Tuple[str, BoundReport]]

    def chain(self) -> str:
        def show(rep: BoundReport):
            if rep.conclusive:
                return str(rep.lower)
            if rep.upper is None:
                return f"≥{rep.lower}"
            return f"[{rep.lower},{rep.upper}]"
        return " ≤ ".join(show(rep) for _, rep in self.entries)


def secat_hierarchy(phi: CDGAMorphism, bound: int = 16, budget: Optional[Budget] = None,
                    source_top: Optional[int] = None) -> HierarchyReport:
    """nil ker H(φ) ≤ Hsecat ≤ msecat ≤ secat, msecat only bracketed."""
    budget = budget or Budget()
    src = phi.source
    top, _ = known_top(src, source_top)
    nil = cohomology_kernel_nil(phi, bound, top)
    nil_rep = BoundReport("nil ker H(φ)", nil.value,
                          Certificate(CONCLUSIVE, witness=nil.product, degree=nil.degree),
                          nil.value if nil.conclusive else None,
                          Certificate(CONCLUSIVE) if nil.conclusive else None, bound)
    hs = hsecat(phi, bound, top)
    lower, lc = max((hs.lower, hs.lower_cert), (nil.value, nil_rep.lower_cert), key=lambda p: p[0])
    notes: List[str] = ["φ is assumed to come with a section that is a cofibration; this is not checked"]
    kern = DStableIdeal.kernel_of(phi)
    lower, lc, upper, uc = _retraction_upper(src, lambda m: kern.power(m + 1), hs.lower, bound, budget, 2,
                                             lower, lc, notes)
    secat = BoundReport("secat", lower, lc, upper, uc, bound, notes)
    m_upper = upper
    msecat = BoundReport("msecat", hs.lower, hs.lower_cert, m_upper, uc, bound,
                         ["not computed; bracketed by Hsecat and secat"])
    return HierarchyReport([("nil", nil_rep), ("Hsecat", hs), ("msecat", msecat), ("secat", secat)])
