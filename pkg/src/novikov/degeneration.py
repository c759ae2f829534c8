"""Degeneration-witness verification and the component reachability graph.

A witness asserts that one family, evaluated along a parametrized index
f(t), acquires the target's structure constants in the limit t -> 0 of the
stated basis E_i^t.  Verification has two tiers:

* exact: every expression is a rational function (integer powers of t); the
  conjugated constants are rational functions of t over Q(i)(params), and
  the check is "no pole at t = 0 and value at 0 equals the target", with
  zero tolerance;
* numeric: radical-bearing rows are evaluated on a shrinking t-schedule at
  high precision; each conjugated constant must approach its target
  monotonically and land within tolerance at the final t.

The tier is chosen automatically by expression inspection and can be forced
through the witness's ``tier`` field.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import mpmath
import sympy as sp

from . import linalg
from .algebras import (AlgebraError, change_basis_table, derivation_dim,
                       instantiate_table)
from .catalog import Catalog, load as load_catalog
from .scalars import (T, NumericDivisionError, grammar_str, is_root_free,
                      parse_scalar)

__all__ = [
    "DegenerationWitness",
    "WitnessReport",
    "NecessaryReport",
    "ReachabilityReport",
    "TierError",
    "DEFAULT_SCHEDULE",
    "DEFAULT_DIGITS",
    "RESIDUAL_TOLERANCE",
    "witness_from_json",
    "witness_to_json",
    "load_witnesses",
    "free_symbols_of",
    "detect_tier",
    "conjugate_constants",
    "verify_exact",
    "verify_numeric",
    "verify_witness",
    "verify_all",
    "check_necessary",
    "build_reachability",
]


class TierError(AlgebraError):
    """Raised when verify_exact is asked to handle a radical-bearing row."""


#: Schedule t_k = 10^(-6k); the final point 10^(-30) leaves the slowest
#: radical decay (exponent 1/3) two orders below the acceptance tolerance.
DEFAULT_SCHEDULE = tuple(sp.Rational(1, 10) ** (6 * k) for k in range(1, 6))
DEFAULT_DIGITS = 120
RESIDUAL_TOLERANCE = mpmath.mpf(10) ** -8


@dataclass(frozen=True)
class DegenerationWitness:
    id: str
    source: str
    source_params: dict
    target: str
    target_params: dict
    basis: tuple[tuple[str, ...], ...]
    tier: str = "auto"
    avoid: tuple[str, ...] = ()
    symbols: tuple[str, ...] = ()
    necessary_t: tuple[str, ...] = ()
    fallback: dict | None = None
    note: str = ""


def witness_from_json(obj: Mapping) -> DegenerationWitness:
    return DegenerationWitness(
        id=obj["id"],
        source=obj["source"],
        source_params=dict(obj.get("source_params", {})),
        target=obj["target"],
        target_params=dict(obj.get("target_params", {})),
        basis=tuple(tuple(row) for row in obj["basis"]),
        tier=obj.get("tier", "auto"),
        avoid=tuple(obj.get("avoid", ())),
        symbols=tuple(obj.get("symbols", ())),
        necessary_t=tuple(obj.get("necessary_t", ())),
        fallback=obj.get("fallback"),
        note=obj.get("note", ""),
    )


def witness_to_json(w: DegenerationWitness) -> dict:
    out = {"id": w.id, "source": w.source, "source_params": w.source_params,
           "target": w.target, "target_params": w.target_params,
           "basis": [list(row) for row in w.basis], "tier": w.tier}
    if w.avoid:
        out["avoid"] = list(w.avoid)
    if w.symbols:
        out["symbols"] = list(w.symbols)
    if w.necessary_t:
        out["necessary_t"] = list(w.necessary_t)
    if w.fallback:
        out["fallback"] = w.fallback
    if w.note:
        out["note"] = w.note
    return out


def load_witnesses(catalog: Catalog | None = None) -> list[DegenerationWitness]:
    cat = catalog or load_catalog()
    return [witness_from_json(obj) for obj in cat.degeneration_rows]


def _all_exprs(w: DegenerationWitness) -> list[sp.Expr]:
    exprs = [parse_scalar(x) for row in w.basis for x in row]
    exprs += [parse_scalar(v) for v in w.source_params.values()]
    exprs += [parse_scalar(v) for v in w.target_params.values() if v != "free"]
    return exprs


def free_symbols_of(w: DegenerationWitness) -> tuple[sp.Symbol, ...]:
    syms: set[sp.Symbol] = set(sp.Symbol(s) for s in w.symbols)
    for p, v in w.target_params.items():
        if v == "free":
            syms.add(sp.Symbol(p))
    for e in _all_exprs(w):
        syms |= (e.free_symbols - {T})
    return tuple(sorted(syms, key=str))


def detect_tier(w: DegenerationWitness) -> str:
    if w.tier in ("exact", "numeric"):
        return w.tier
    return "exact" if all(is_root_free(e) for e in _all_exprs(w)) else "numeric"


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class WitnessReport:
    id: str
    source: str
    target: str
    tier: str
    passed: bool
    failures: list[dict] = field(default_factory=list)
    max_residual: str | None = None
    decay_exponent: float | None = None
    samples: list[dict] = field(default_factory=list)
    heuristic: bool = False
    used_fallback: bool = False
    literal_outcome: dict | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "target": self.target,
            "tier": self.tier,
            "passed": self.passed,
            "failures": self.failures,
            "max_residual": self.max_residual,
            "decay_exponent": self.decay_exponent,
            "samples": self.samples,
            "heuristic": self.heuristic,
            "used_fallback": self.used_fallback,
            "literal_outcome": self.literal_outcome,
            "note": self.note,
        }


# ---------------------------------------------------------------------------
# Conjugated structure constants
# ---------------------------------------------------------------------------

def conjugate_constants(table: Sequence, basis_rows: Sequence[Sequence]):
    """Structure constants of the product in the basis E_i = sum_j rows[i][j] e_j.

    ``table`` may carry any scalar entries (t, parameters).  Raises on a
    singular basis.
    """
    return change_basis_table(table, basis_rows)


def _source_table(cat: Catalog, w: DegenerationWitness):
    name, param_map = w.source, w.source_params
    entry = cat.entry(name)
    source = entry.algebra
    subs = {p: parse_scalar(v) for p, v in param_map.items()}
    for cons in source.constraints:
        value = cons.subs({sp.Symbol(k): v for k, v in subs.items()})
        if sp.cancel(value) == 0:
            raise AlgebraError(
                f"{w.id}: source constraint {grammar_str(cons)} vanishes identically")
    return instantiate_table(source, subs), name


def _target_table(cat: Catalog, w: DegenerationWitness):
    entry = cat.entry(w.target)
    subs = {p: (sp.Symbol(p) if v == "free" else parse_scalar(v))
            for p, v in w.target_params.items()}
    return instantiate_table(entry.algebra, subs)


# ---------------------------------------------------------------------------
# Exact tier
# ---------------------------------------------------------------------------

def verify_exact(w: DegenerationWitness,
                 catalog: Catalog | None = None) -> WitnessReport:
    """Zero-tolerance verification over the rational-function field in t."""
    cat = catalog or load_catalog()
    if detect_tier(w) != "exact":
        raise TierError(f"{w.id}: radical-bearing witness; use verify_numeric")
    table, source_name = _source_table(cat, w)
    n = len(table)
    rows = [[parse_scalar(x) for x in row] for row in w.basis]
    report = WitnessReport(w.id, source_name, w.target, "exact", True, note=w.note)
    if sp.cancel(linalg.det(rows)) == 0:
        report.passed = False
        report.failures.append({"problem": "basis matrix singular as an expression"})
        return report
    new_table = change_basis_table(table, rows)
    target = _target_table(cat, w)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                r = sp.cancel(new_table[i][j][k])
                num, den = sp.fraction(r)
                den0 = sp.cancel(den.subs(T, 0))
                if den0 == 0:
                    report.passed = False
                    report.failures.append({
                        "at": [i + 1, j + 1, k + 1],
                        "problem": "pole at t = 0",
                        "value": grammar_str(r)})
                    continue
                limit = sp.cancel(num.subs(T, 0) / den0)
                diff = sp.cancel(limit - target[i][j][k])
                if diff != 0:
                    report.passed = False
                    report.failures.append({
                        "at": [i + 1, j + 1, k + 1],
                        "problem": "limit differs from target",
                        "limit": grammar_str(limit),
                        "target": grammar_str(target[i][j][k])})
    return report


# ---------------------------------------------------------------------------
# Numeric tier
# ---------------------------------------------------------------------------

def _random_rational(rng: random.Random) -> sp.Rational:
    num = rng.choice([x for x in range(-9, 10) if x != 0])
    den = rng.randint(1, 7)
    return sp.Rational(num, den)


def _sample_assignment(w: DegenerationWitness, cat: Catalog,
                       rng: random.Random) -> dict[sp.Symbol, sp.Rational]:
    syms = free_symbols_of(w)
    avoid = [parse_scalar(x) for x in w.avoid]
    target_cons = cat.entry(w.target).algebra.constraints
    target_vals = {sp.Symbol(p): (sp.Symbol(p) if v == "free" else parse_scalar(v))
                   for p, v in w.target_params.items()}
    for _ in range(500):
        assign = {s: _random_rational(rng) for s in syms}
        if any(sp.cancel(g.subs(assign)) == 0 for g in avoid):
            continue
        ok = True
        for cons in target_cons:
            value = cons.subs(target_vals).subs(assign)
            if sp.cancel(value) == 0:
                ok = False
        if ok:
            return assign
    raise AlgebraError(f"{w.id}: failed to sample admissible parameters")


def _num(e: sp.Expr, digits: int) -> mpmath.mpc:
    v = sp.N(e, digits)
    if v.has(sp.zoo) or v.has(sp.nan):
        raise NumericDivisionError("division by zero while evaluating witness")
    re_part, im_part = v.as_real_imag()

    def to_mpf(x):
        x = sp.N(x, digits)
        if x.is_Float:
            return mpmath.mpf(x._mpf_)
        if x.is_Rational:
            return mpmath.mpf(x.p) / mpmath.mpf(x.q)
        return mpmath.mpf(float(x))

    return mpmath.mpc(to_mpf(re_part), to_mpf(im_part))


def verify_numeric(w: DegenerationWitness, catalog: Catalog | None = None,
                   schedule: Sequence = DEFAULT_SCHEDULE,
                   digits: int = DEFAULT_DIGITS, samples: int = 3,
                   seed: int = 20260810) -> WitnessReport:
    """High-precision schedule verification for radical-bearing witnesses.

    Residuals must be non-increasing along the schedule (up to the numeric
    noise floor) and at most 1e-8 at the final t.  Verdicts from this tier
    are flagged heuristic in the report.
    """
    cat = catalog or load_catalog()
    rng = random.Random(seed)
    table, source_name = _source_table(cat, w)
    target = _target_table(cat, w)
    n = len(table)
    basis_rows = [[parse_scalar(x) for x in row] for row in w.basis]
    schedule = [sp.Rational(tv) for tv in schedule]
    report = WitnessReport(w.id, source_name, w.target, "numeric", True,
                           heuristic=True, note=w.note)
    syms = free_symbols_of(w)
    sample_count = samples if syms else 1
    floor = mpmath.mpf(10) ** (-sp.Rational(digits, 2))
    max_residual = mpmath.mpf(0)
    decay = None

    with mpmath.workdps(digits + 20):
        for _ in range(sample_count):
            assign = _sample_assignment(w, cat, rng) if syms else {}
            report.samples.append({str(k): grammar_str(v)
                                   for k, v in sorted(assign.items(), key=str)})
            target_num = [[[_num(target[i][j][k].subs(assign), digits)
                            for k in range(n)] for j in range(n)]
                          for i in range(n)]
            residuals: dict[tuple, list] = {}
            for t_val in schedule:
                subs = dict(assign)
                subs[T] = t_val
                raw = [[_num(x.subs(subs), digits) for x in row]
                       for row in basis_rows]
                # Row-scale the basis: Laurent rows span hundreds of orders
                # of magnitude at the final t, which would otherwise wreck
                # the LU solve.  E_i = s_i * Ehat_i rescales the conjugated
                # constants by the exact factor s_i s_j / s_k.
                scales = [max((mpmath.fabs(x) for x in row), default=0)
                          for row in raw]
                if any(s == 0 for s in scales):
                    report.passed = False
                    report.failures.append({
                        "problem": "basis numerically singular",
                        "t": str(t_val)})
                    continue
                b_num = mpmath.matrix([[x / s for x in row]
                                       for row, s in zip(raw, scales)])
                c_num = [[[_num(table[i][j][k].subs(subs), digits)
                           for k in range(n)] for j in range(n)]
                         for i in range(n)]
                b_t = b_num.T
                try:
                    mpmath.lu_solve(b_t, mpmath.matrix([mpmath.mpc(0)] * n))
                except ZeroDivisionError:
                    report.passed = False
                    report.failures.append({
                        "problem": "basis numerically singular",
                        "t": str(t_val)})
                    continue
                for i in range(n):
                    for j in range(n):
                        prod = [mpmath.mpc(0)] * n
                        for p in range(n):
                            if b_num[i, p] == 0:
                                continue
                            for q in range(n):
                                if b_num[j, q] == 0:
                                    continue
                                f = b_num[i, p] * b_num[j, q]
                                for k in range(n):
                                    prod[k] += f * c_num[p][q][k]
                        x = mpmath.lu_solve(b_t, mpmath.matrix(prod))
                        for k in range(n):
                            value = x[k] * scales[i] * scales[j] / scales[k]
                            res = mpmath.fabs(value - target_num[i][j][k])
                            residuals.setdefault((i, j, k), []).append(res)
            for key, series in sorted(residuals.items()):
                if len(series) != len(schedule):
                    continue
                eff = [max(r, floor) for r in series]
                if any(eff[m + 1] > eff[m] * (1 + mpmath.mpf(10) ** -6)
                       for m in range(len(eff) - 1)):
                    report.passed = False
                    report.failures.append({
                        "at": [key[0] + 1, key[1] + 1, key[2] + 1],
                        "problem": "residual not non-increasing",
                        "residuals": [mpmath.nstr(r, 8) for r in series]})
                final = series[-1]
                if final > RESIDUAL_TOLERANCE:
                    report.passed = False
                    report.failures.append({
                        "at": [key[0] + 1, key[1] + 1, key[2] + 1],
                        "problem": "final residual above tolerance",
                        "residual": mpmath.nstr(final, 8)})
                if final > max_residual:
                    max_residual = final
                    if series[-2] > floor and final > floor:
                        ratio_r = mpmath.log(final / series[-2])
                        ratio_t = mpmath.log(schedule[-1] / schedule[-2])
                        decay = float(ratio_r / ratio_t)
    report.max_residual = mpmath.nstr(max_residual, 8)
    report.decay_exponent = decay
    return report


# ---------------------------------------------------------------------------
# Dispatch, fallback protocol, batch runner
# ---------------------------------------------------------------------------

def apply_fallback(w: DegenerationWitness) -> DegenerationWitness:
    """The corrected variant recorded alongside a defective literal row."""
    if not w.fallback:
        raise AlgebraError(f"{w.id}: no fallback recorded")
    return replace(
        w,
        source=w.fallback.get("source", w.source),
        source_params=dict(w.fallback.get("source_params", w.source_params)),
        basis=tuple(tuple(row) for row in w.fallback.get("basis", w.basis)),
        fallback=None,
    )


def verify_witness(w: DegenerationWitness, catalog: Catalog | None = None,
                   schedule: Sequence = DEFAULT_SCHEDULE,
                   digits: int = DEFAULT_DIGITS, samples: int = 3,
                   seed: int = 20260810) -> WitnessReport:
    """Verify one witness, honoring the tier hint and the fallback protocol.

    A witness with a recorded fallback is always run literally first; only
    if the literal run fails is the fallback patch applied, and both
    outcomes are kept in the report.  Nothing is substituted silently.
    """
    cat = catalog or load_catalog()

    def run(witness):
        tier = detect_tier(witness)
        if tier == "exact":
            return verify_exact(witness, cat)
        return verify_numeric(witness, cat, schedule, digits, samples, seed)

    report = run(w)
    if not report.passed and w.fallback:
        literal = report.to_dict()
        patched = apply_fallback(w)
        report = run(patched)
        report.id = w.id
        report.used_fallback = True
        report.literal_outcome = {
            "source": literal["source"],
            "passed": literal["passed"],
            "failures": literal["failures"][:4],
        }
        changed = sorted(set(w.fallback) - {"reason"})
        reason = w.fallback.get("reason", "")
        report.note = (report.note + " | " if report.note else "") + \
            f"literal row failed; verified with corrected {'/'.join(changed)}" + \
            (f" ({reason})" if reason else "")
    return report


def verify_all(catalog: Catalog | None = None, ids: Sequence[str] | None = None,
               schedule: Sequence = DEFAULT_SCHEDULE, digits: int = DEFAULT_DIGITS,
               samples: int = 3, seed: int = 20260810) -> list[WitnessReport]:
    cat = catalog or load_catalog()
    reports = []
    for w in load_witnesses(cat):
        if ids and w.id not in ids:
            continue
        reports.append(verify_witness(w, cat, schedule, digits, samples, seed))
    return sorted(reports, key=lambda r: r.id)


# ---------------------------------------------------------------------------
# Necessary condition: strict derivation-dimension increase
# ---------------------------------------------------------------------------

@dataclass
class NecessaryReport:
    id: str
    source: str
    target: str
    skipped: bool
    passed: bool
    mode: str = "strict"
    rows: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"id": self.id, "source": self.source, "target": self.target,
                "skipped": self.skipped, "passed": self.passed,
                "mode": self.mode, "rows": self.rows}


_DEFAULT_T_POOL = ("1/2", "1/3", "2/7", "3/5", "5/2")


def check_necessary(w: DegenerationWitness, catalog: Catalog | None = None,
                    samples: int = 3, seed: int = 20260810) -> NecessaryReport:
    """Derivation-dimension necessary condition at sampled parameters.

    A row whose index is constant in t asserts a proper degeneration between
    fixed algebras, where dim Der must strictly increase.  A row with a
    genuinely parametrized index f(t) asserts only that the target lies in
    the closure of the one-parameter family sweep, which costs one orbit
    dimension: there the necessary condition is the weak inequality
    dim Der(source) <= dim Der(target) (equality occurs, e.g. when the
    target also realizes the minimal derivation dimension).  Identical
    source and target are skipped.
    """
    cat = catalog or load_catalog()
    if w.source == w.target and not w.source_params:
        return NecessaryReport(w.id, w.source, w.target, True, True)
    rng = random.Random(seed)
    source = cat.entry(w.source).algebra
    target = cat.entry(w.target).algebra
    syms = free_symbols_of(w)
    uses_t = any(parse_scalar(v).has(T) for v in w.source_params.values())
    t_pool = [sp.Rational(x) for x in (w.necessary_t or _DEFAULT_T_POOL)]
    mode = "weak-family-index" if uses_t else "strict"
    report = NecessaryReport(w.id, w.source, w.target, False, True, mode)

    made = 0
    attempt = 0
    while made < samples and attempt < 200:
        attempt += 1
        assign = _sample_assignment(w, cat, rng) if syms else {}
        t_val = t_pool[made % len(t_pool)] if uses_t else None

        src_vals = {}
        ok = True
        for p, v in w.source_params.items():
            value = parse_scalar(v).subs(assign)
            if t_val is not None:
                value = value.subs(T, t_val)
            value = sp.nsimplify(value, rational=False)
            if not is_root_free(value):
                ok = False
                break
            src_vals[p] = sp.cancel(value)
        if not ok:
            continue
        try:
            d_src = derivation_dim(source, src_vals) if source.params else \
                derivation_dim(source)
            tgt_vals = {p: (assign.get(sp.Symbol(p), sp.Symbol(p))
                            if v == "free" else parse_scalar(v).subs(assign))
                        for p, v in w.target_params.items()}
            d_tgt = derivation_dim(target, tgt_vals) if target.params else \
                derivation_dim(target)
        except AlgebraError:
            continue
        made += 1
        required_ok = d_src < d_tgt if mode == "strict" else d_src <= d_tgt
        row = {"assignment": {str(k): grammar_str(v) for k, v in
                              sorted(assign.items(), key=str)},
               "t": grammar_str(t_val) if t_val is not None else None,
               "source_params": {k: grammar_str(v) for k, v in sorted(src_vals.items())},
               "dim_der_source": d_src, "dim_der_target": d_tgt,
               "strict_increase": d_src < d_tgt,
               "required_ok": required_ok}
        report.rows.append(row)
        if not required_ok:
            report.passed = False
        if not syms and not uses_t:
            break
    if made == 0:
        report.passed = False
        report.rows.append({"problem": "no admissible sample found"})
    return report


# ---------------------------------------------------------------------------
# Reachability of the two-component statement
# ---------------------------------------------------------------------------

SOURCES = ("N4_20", "N4_22")


@dataclass
class ReachabilityReport:
    edges: list[tuple[str, str]]
    reachable: dict[str, bool]
    all_expected_reachable: bool
    sources_never_targets: bool

    @property
    def passed(self) -> bool:
        return self.all_expected_reachable and self.sources_never_targets

    def to_dict(self) -> dict:
        return {
            "edges": [list(e) for e in self.edges],
            "reachable": self.reachable,
            "all_expected_reachable": self.all_expected_reachable,
            "sources_never_targets": self.sources_never_targets,
            "passed": self.passed,
        }

    def to_dot(self) -> str:
        lines = ["digraph degenerations {"]
        for name, ok in sorted(self.reachable.items()):
            shape = "doubleoctagon" if name in SOURCES else "box"
            color = "black" if ok else "red"
            lines.append(f'    "{name}" [shape={shape}, color={color}];')
        for src, dst in sorted(set(self.edges)):
            lines.append(f'    "{src}" -> "{dst}";')
        lines.append("}")
        return "\n".join(lines)


def build_reachability(reports: Sequence[WitnessReport],
                       catalog: Catalog | None = None) -> ReachabilityReport:
    """Family-level reachability of every classified family from the two
    source families, using only witnesses that verified."""
    cat = catalog or load_catalog()
    edges = []
    for r in reports:
        if not r.passed:
            continue
        edges.append((r.source, r.target))

    expected = sorted(e.name for e in cat.entries.values()
                      if e.listing in ("dim4", "limit"))
    nodes = set(expected) | {s for s, _ in edges} | {d for _, d in edges}
    reached = set(SOURCES)
    changed = True
    while changed:
        changed = False
        for src, dst in edges:
            if src in reached and dst not in reached:
                reached.add(dst)
                changed = True
    reachable = {name: name in reached for name in sorted(nodes)}
    all_expected = all(reachable.get(name, False) for name in expected)
    no_incoming = all(dst not in SOURCES for _, dst in edges)
    return ReachabilityReport(edges, reachable, all_expected, no_incoming)
