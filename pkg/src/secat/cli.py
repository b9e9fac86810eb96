"""Command-line driver: ``secat <command> <model file> [options]``.

Exit status 0 when the computation ran (whatever the verdict), 1 when a
check asked for by the user fails or an internal consistency check trips,
2 for unreadable or invalid input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional

from . import __version__
from .cdga import CDGAError, CDGAMorphism
from .cohomology import cohomology
from .fibrewise import FibrewiseError, MismatchReport, NotClosed, verify_lemma_two
from .ideals import DStableIdeal, NotSurjective
from .invariants import (HomotopyNotVerified, RelcatError, RetractionInvalid, hsecat, lscat_bounds,
                         relcat_check, tc_bounds, toomer)
from .modelio import ModelError, ModelFile, load, parse, resolve_model
from .sullivan import Budget, BudgetExceeded, relative_model

SCHEMA_VERSION = 1
BATCH_INVARIANTS = ("toomer", "cat", "tc")


class InputError(Exception):
    pass


def result_entry(invariant: str, lower, upper, conclusive: bool, witness=None, degree_bound: int = 0,
                 notes=(), **extra) -> Dict:
    out = {"invariant": invariant, "lower": lower, "upper": upper, "conclusive": conclusive,
           "witness": witness, "degree_bound": degree_bound, "notes": list(notes)}
    out.update(extra)
    return out


def report_entry(rep) -> Dict:
    d = rep.as_dict()
    extra = {k: v for k, v in d.items() if k not in ("invariant", "lower", "upper", "conclusive",
                                                       "witness", "degree_bound", "notes")}
    return result_entry(d["invariant"], d["lower"], d["upper"], d["conclusive"], d["witness"],
                        d["degree_bound"], d["notes"], **extra)


# -- wording ----------------------------------------------------------------------

def describe(entry: Dict) -> str:
    """The one place where bounds are turned into words."""
    name, lo, up = entry["invariant"], entry["lower"], entry["upper"]
    if entry.get("verified") is False:
        how = "conclusively refuted" if entry["conclusive"] else "not established"
        return f"{name} ≤ {entry['level']}: {how} for this retraction"
    if lo is None and up is None and entry["conclusive"]:
        return f"{name}: yes"
    if entry["conclusive"]:
        return f"{name} = {lo if lo is not None else up} (conclusive)"
    if lo is not None and up is not None:
        if lo == up:
            return f"{name} = {lo} (within degree {entry['degree_bound']}, not proven beyond it)"
        return f"{lo} ≤ {name} ≤ {up} (bounds)"
    if lo is not None:
        return f"{name} ≥ {lo} (lower bound)"
    if up is not None:
        return f"{name} ≤ {up} (upper bound)"
    return f"{name}: no bound"


def render_text(report: Dict) -> str:
    lines = [f"model {report['model']} (degree bound {report['degree_bound']})"]
    for entry in report["results"]:
        lines.append(describe(entry))
        if entry.get("witness"):
            deg = entry.get("witness_degree")
            lines.append(f"  witness: {entry['witness']}" + (f" (degree {deg})" if deg is not None else ""))
        for cert in entry.get("certificates", []):
            lines.append(f"  certificate: {cert}")
        for note in entry["notes"]:
            lines.append(f"  note: {note}")
    return "\n".join(lines)


def emit(report: Dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(render_text(report))


# -- commands ------------------------------------------------------------------

def _budget(args) -> Budget:
    return Budget(max_parameters=args.budget) if args.budget is not None else Budget()


def _load(path: str) -> ModelFile:
    if not os.path.exists(path):
        raise InputError(f"{path}: no such file")
    return load(path)


def run_validate(model: ModelFile, args) -> List[Dict]:
    a = model.algebra()
    notes = [f"{len(a.gens)} generators, d² = 0 checked"]
    if model.morphisms:
        notes.append("morphisms: " + ", ".join(sorted(model.morphisms)))
    if model.fibrewise is not None:
        notes.append(f"fibrewise over {model.fibrewise.base}, p∘s = id checked")
    return [result_entry("valid", None, None, True, notes=notes)]


def run_cohomology(model: ModelFile, args) -> List[Dict]:
    a = model.algebra()
    out = []
    for k in range(args.max_degree + 1):
        h = cohomology(a, k)
        reps = [str(e) for e in h.rep_elements()]
        out.append(result_entry(f"b{k}", h.dim, h.dim, True, "; ".join(reps) or None, args.max_degree,
                                witness_degree=k if reps else None))
    return out


def run_toomer(model: ModelFile, args) -> List[Dict]:
    return [report_entry(toomer(model.algebra(), args.max_degree))]


def run_cat(model: ModelFile, args) -> List[Dict]:
    return [report_entry(lscat_bounds(model.algebra(), args.max_degree, _budget(args)))]


def run_tc(model: ModelFile, args) -> List[Dict]:
    return [report_entry(tc_bounds(model.algebra(), args.n, args.max_degree, _budget(args)))]


def run_hsecat(model: ModelFile, args) -> List[Dict]:
    phi = model.morphism(args.morphism)
    return [report_entry(hsecat(phi, args.max_degree, source_top=model.top, name=f"Hsecat({phi.name})"))]


def run_lemma2(model: ModelFile, args) -> List[Dict]:
    data = model.lemma_two_input()
    v = verify_lemma_two(data, t_max=args.t_trunc)
    notes = list(v.notes)
    notes.append(f"t-truncation {v.t_max}, degree bound {v.degree_bound}")
    notes.append("splitting R: " + (", ".join(v.splitting) or "none"))
    c = v.nil_c
    out = [result_entry("nil_B C", c.value, c.value if c.conclusive else None, c.conclusive,
                        " * ".join(str(w) for w in c.witness) or None, v.degree_bound)]
    if v.applicable:
        notes.append(f"predicted witness z(1⊗v⊗dt) = {v.predicted}"
                     + ("" if v.predicted_nonzero else " vanishes"))
        notes.append("found witness has a z(1⊗v⊗dt) component" if v.witness_has_shape
                     else "found witness has no z(1⊗v⊗dt) component")
        verdict = "ok" if v.ok else "failed"
        notes.insert(0, f"nil_B N = nil_B C + 1: {verdict}")
        out.append(result_entry("nil_B N", v.nil_n, v.nil_n if v.conclusive else None, v.conclusive,
                                v.witness_product, v.degree_bound, notes, overflow=v.overflow))
    else:
        out.append(result_entry("nil_B N", None, None, False, None, v.degree_bound, notes, overflow=False))
    return out


def run_relcat(model: ModelFile, args) -> List[Dict]:
    if args.morphism:
        phi = model.morphism(args.morphism)
    elif len(model.morphisms) == 1:
        phi = model.morphism(next(iter(model.morphisms)))
    else:
        raise InputError("relcat-check needs --morphism when the model does not declare exactly one")
    a = phi.source
    bound = args.max_degree
    rel = relative_model(a, DStableIdeal.kernel_of(phi).power(args.level + 1), bound, _budget(args))

    def resolver(name):
        if name == "relative":
            return rel.total
        return a if name == model.name else resolve_model(name)

    if not os.path.exists(args.retraction):
        raise InputError(f"{args.retraction}: no such file")
    with open(args.retraction, encoding="utf-8") as fh:
        rfile = parse(fh.read(), resolver=resolver, validate=False)
    specs = [s for s in rfile.morphisms.values() if s.source == "relative"]
    if len(specs) != 1:
        raise InputError("retraction file must declare one morphism from 'relative'")
    values = {n: a.gen(n) for n in a.gens.names}
    values.update(specs[0].values)
    r = CDGAMorphism(rel.total, a, values, name=specs[0].name)
    shown = [f"{n} (D = {rel.total.dgen[rel.total.gens.index(n)]})" for n in rel.added[:4]]
    if len(rel.added) > 4:
        shown.append(f"and {len(rel.added) - 4} more")
    notes = [f"relative model of ρ_{args.level} through degree {bound}: added " + ", ".join(shown)]
    try:
        res = relcat_check(phi, args.level, r, bound, _budget(args), model=rel)
    except HomotopyNotVerified as exc:
        notes.append(str(exc))
        entry = result_entry("relcat", None, None, exc.conclusive, None, bound, notes, verified=False,
                             level=args.level)
        return [entry]
    notes.append(res.describe())
    return [result_entry("relcat", None, args.level, False, None, bound, notes, verified=True, level=args.level)]


COMMANDS = {
    "validate": run_validate,
    "cohomology": run_cohomology,
    "toomer": run_toomer,
    "cat": run_cat,
    "tc": run_tc,
    "hsecat": run_hsecat,
    "lemma2": run_lemma2,
    "relcat-check": run_relcat,
}


def model_report(command: str, model: ModelFile, args) -> Dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "model": model.name,
            "degree_bound": args.max_degree, "results": COMMANDS[command](model, args)}


# -- batch ----------------------------------------------------------------------

def _batch_row(job):
    path, invariants, opts = job
    args = argparse.Namespace(**opts)
    name = os.path.basename(path)
    try:
        model = load(path)
    except (ModelError, CDGAError) as exc:
        return {"file": name, "error": str(exc)}
    results = []
    for inv in invariants:
        try:
            results.extend(COMMANDS[inv](model, args))
        except (CDGAError, FibrewiseError, RelcatError) as exc:
            results.append(result_entry(inv, None, None, False, None, args.max_degree, [f"error: {exc}"]))
    return {"file": name, "model": model.name, "results": results}


def run_batch(args) -> int:
    if not os.path.isdir(args.directory):
        print(f"secat: {args.directory}: not a directory", file=sys.stderr)
        return 2
    files = sorted(f for f in os.listdir(args.directory) if f.endswith(".cdga"))
    invariants = [s.strip() for s in args.invariants.split(",") if s.strip()]
    for inv in invariants:
        if inv not in COMMANDS or inv in ("relcat-check", "hsecat"):
            print(f"secat: batch cannot run {inv!r}", file=sys.stderr)
            return 2
    opts = {"max_degree": args.max_degree, "budget": args.budget, "n": 2, "t_trunc": args.t_trunc}
    jobs = [(os.path.join(args.directory, f), invariants, opts) for f in files]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_batch_row, jobs))
    else:
        rows = [_batch_row(j) for j in jobs]
    report = {"schema_version": SCHEMA_VERSION, "command": "batch", "invariants": invariants,
              "degree_bound": args.max_degree, "models": rows}
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(render_table(rows))
    return 2 if any("error" in row for row in rows) else 0


def render_table(rows: List[Dict]) -> str:
    table = [("file", "invariant", "lower", "upper", "status")]
    for row in rows:
        if "error" in row:
            table.append((row["file"], "-", "-", "-", "error: " + row["error"]))
            continue
        for e in row["results"]:
            status = "conclusive" if e["conclusive"] else ("bounds" if e["upper"] is not None else "lower bound")
            show = lambda v: "-" if v is None else str(v)
            table.append((row["file"], e["invariant"], show(e["lower"]), show(e["upper"]), status))
    widths = [max(len(r[i]) for r in table) for i in range(4)]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r[:4], widths)) + "  " + r[4] for r in table)


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-degree", type=int, default=16, help="degree bound N (default 16)")
    common.add_argument("--t-trunc", type=int, default=4, help="power of t kept in Λ(t,dt) (default 4)")
    common.add_argument("--budget", type=int, default=None, help="parameter budget of the retraction search")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--timing", action="store_true", help="print elapsed time to standard error")

    parser = argparse.ArgumentParser(prog="secat", description="Sectional-category invariants of CDGA models.")
    parser.add_argument("--version", action="version", version=f"secat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"validate": "parse and check a model", "cohomology": "cohomology dimensions and representatives",
             "toomer": "Toomer invariant", "cat": "bounds on LS category", "tc": "bounds on TC_n",
             "hsecat": "homology sectional category of a morphism",
             "lemma2": "check nil_B N = nil_B C + 1 for a fibrewise model with extension",
             "relcat-check": "verify a retraction certifying relcat ≤ m"}
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("file")
        if name == "tc":
            p.add_argument("-n", type=int, default=2, help="number of factors (default 2)")
        if name in ("hsecat", "relcat-check"):
            p.add_argument("--morphism", required=(name == "hsecat"))
        if name == "relcat-check":
            p.add_argument("--retraction", required=True, help="file with 'morphism r : relative -> <model>'")
            p.add_argument("--level", type=int, default=1, help="m in ρ_m (default 1)")
    b = sub.add_parser("batch", parents=[common], help="run invariants over every .cdga file in a directory")
    b.add_argument("directory")
    b.add_argument("--invariants", default=",".join(BATCH_INVARIANTS))
    b.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    if args.max_degree < 1 or args.t_trunc < 1 or (getattr(args, "n", 2) or 2) < 2:
        print("secat: --max-degree and --t-trunc must be positive and -n at least 2", file=sys.stderr)
        return 2
    try:
        if args.command == "batch":
            code = run_batch(args)
        else:
            model = _load(args.file)
            report = model_report(args.command, model, args)
            emit(report, args.format)
            failed = any(e.get("verified") is False for e in report["results"])
            code = 1 if failed else 0
    except (InputError, ModelError, NotSurjective, NotClosed, RetractionInvalid, BudgetExceeded) as exc:
        print(f"secat: {exc}", file=sys.stderr)
        return 2
    except (MismatchReport, CDGAError, RelcatError) as exc:
        print(f"secat: {exc}", file=sys.stderr)
        return 1
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
