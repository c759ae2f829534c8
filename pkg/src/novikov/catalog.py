"""The shipped catalog: every classified algebra plus its witness data.

Algebras, extension witnesses, automorphism-action cases, the golden
cohomology table and the degeneration rows are all JSON files under
``novikov/data`` in the public schemas, so user-supplied files can extend
them.  Names are ASCII (``N4_20``, ``N3s_04`` for the starred families,
``Ntriv_2/3`` for the two limit families, ``zero_n`` for zero products);
common unicode spellings are accepted as aliases and canonicalized.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

import sympy as sp

from .algebras import (Algebra, AlgebraError, algebra_from_json, annihilator_basis,
                       check_identities, derived_power_dims, invariant_profile,
                       substitute)
from .cohomology import (ActionCase, central_extension, cocycle_from_expr,
                         has_trivial_intersection, is_cocycle)
from .scalars import grammar_str, parse_scalar

__all__ = [
    "CatalogEntry",
    "ExtensionWitness",
    "Catalog",
    "load",
    "get",
    "list_entries",
    "canonical_name",
    "verify_catalog",
    "CatalogReport",
]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    listing: str           # dim1 | dim2 | dim3 | dim4 | limit | aux
    source: str
    pure_expected: bool
    algebra: Algebra

    @property
    def family_params(self) -> tuple[str, ...]:
        return tuple(str(p) for p in self.algebra.params)


@dataclass(frozen=True)
class ExtensionWitness:
    """A representative cocycle and the algebra its extension must equal."""

    id: str
    base: str
    base_params: dict
    cocycle_expr: str
    params: tuple[str, ...]
    constraints_printed: tuple[str, ...]
    target: str
    target_params: dict
    case: str
    note: str = ""


@dataclass(frozen=True)
class Catalog:
    entries: dict[str, CatalogEntry]
    witnesses: tuple[ExtensionWitness, ...]
    action_cases: tuple[ActionCase, ...]
    golden_cohomology: tuple[dict, ...]
    degeneration_rows: tuple[dict, ...]

    # -- access ------------------------------------------------------------

    def entry(self, name: str) -> CatalogEntry:
        key = canonical_name(name)
        if key not in self.entries:
            raise AlgebraError(f"unknown algebra {name!r}")
        return self.entries[key]

    def get(self, name: str, params: Mapping | None = None) -> Algebra:
        """Instantiated algebra; generic (symbolic) when params is None."""
        entry = self.entry(name)
        a = entry.algebra
        if params:
            return substitute(a, params)
        return a

    def list_entries(self, dim: int | None = None, table: str | None = None,
                     pure: bool | None = None) -> list[CatalogEntry]:
        """Entries of the classification listings, deterministic order.

        ``dim`` selects the published listing for that dimension (auxiliary
        presentations and the limit families are excluded unless asked for
        via ``table``); ``table`` filters on the listing key directly
        ('A' is an alias for the 4-dimensional table).
        """
        out = []
        for entry in self.entries.values():
            if table is not None:
                key = "dim4" if table in ("A", "a") else table
                if entry.listing != key:
                    continue
            elif dim is not None:
                if entry.listing != f"dim{dim}":
                    continue
            if dim is not None and entry.algebra.dim != dim:
                continue
            if pure is not None and entry.pure_expected != pure:
                continue
            out.append(entry)
        return out

    def witness_target_algebra(self, w: ExtensionWitness) -> Algebra:
        subs = {sp.Symbol(k): parse_scalar(v) for k, v in w.target_params.items()}
        entry = self.entry(w.target)
        missing = [p for p in entry.algebra.params if p not in subs]
        if missing:
            raise AlgebraError(f"{w.id}: target params missing {missing}")
        table = tuple(tuple(tuple(sp.cancel(x.subs(subs)) for x in row)
                            for row in plane) for plane in entry.algebra.table)
        return Algebra(w.target, entry.algebra.dim, (), table, ())

    def witness_base_algebra(self, w: ExtensionWitness) -> Algebra:
        base = self.entry(w.base).algebra
        if w.base_params:
            base = substitute(base, w.base_params)
        return base


_SUPERS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")
_SUBS = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")


def canonical_name(name: str) -> str:
    """Canonicalize unicode/typographic aliases to the ASCII catalog keys."""
    s = str(name).strip()
    had_params = bool(re.search(r"\(.*\)$", s))
    s = re.sub(r"\(.*\)$", "", s).strip()
    s = s.replace("𝒩", "N").replace("𝑁", "N").replace("ℕ", "N")
    s = s.translate(_SUPERS).translate(_SUBS)
    s = s.replace("∗", "*").replace("꙳", "*")
    if s.startswith("𝔑"):
        rest = s[1:]
        if rest.isdigit():
            # The fraktur label is overloaded: bare means a zero algebra,
            # with parameters it means one of the two limit families.
            return f"Ntriv_{rest}" if had_params else f"zero_{rest}"
        s = "Ntriv" + rest
    if s.startswith("trivial_"):
        return "zero_" + s[len("trivial_"):]
    m = re.fullmatch(r"N(\d)(\*?)_?(\d+)", s)
    if m:
        d, star, idx = m.groups()
        star = "s" if star else ""
        suffix = idx if len(idx) > 1 else f"0{int(idx)}"
        return f"N{d}{star}_{suffix}"
    return s


@lru_cache(maxsize=1)
def load() -> Catalog:
    data = resources.files("novikov") / "data"

    def read(fname):
        with (data / fname).open("r", encoding="utf-8") as fh:
            return json.load(fh)

    entries: dict[str, CatalogEntry] = {}
    for obj in read("algebras.json"):
        meta = obj.get("meta", {})
        a = algebra_from_json(obj)
        entries[a.name] = CatalogEntry(
            name=a.name,
            listing=meta.get("listing", "aux"),
            source=meta.get("source", ""),
            pure_expected=bool(meta.get("pure", False)),
            algebra=a,
        )

    witnesses = tuple(
        ExtensionWitness(
            id=w["id"], base=w["base"], base_params=w.get("base_params", {}),
            cocycle_expr=w["cocycle"], params=tuple(w.get("params", ())),
            constraints_printed=tuple(w.get("constraints_printed", ())),
            target=w["target"], target_params=w.get("target_params", {}),
            case=w["case"], note=w.get("note", ""),
        )
        for w in read("extension_witnesses.json"))

    cases = []
    for c in read("action_cases.json"):
        base = entries[c["base"]].algebra
        cases.append(ActionCase(
            case_id=c["id"],
            base=base,
            template=tuple(tuple(parse_scalar(x) for x in row)
                           for row in c["template"]),
            template_vars=tuple(sp.Symbol(v) for v in c["template_vars"]),
            invertibility=tuple(parse_scalar(x) for x in c.get("invertibility", ())),
            nablas=tuple(cocycle_from_expr(base, s) for s in c["nablas"]),
            coeff_vars=tuple(sp.Symbol(v) for v in c["coeff_vars"]),
            alpha_star=tuple(parse_scalar(x) for x in c["alpha_star"]),
            matrix_reading=tuple((i, j, parse_scalar(x))
                                 for i, j, x in c.get("matrix_reading", ())),
            note=c.get("note", ""),
        ))

    return Catalog(
        entries=entries,
        witnesses=witnesses,
        action_cases=tuple(cases),
        golden_cohomology=tuple(read("cohomology_golden.json")),
        degeneration_rows=tuple(read("degenerations.json")),
    )


def get(name: str, params: Mapping | None = None) -> Algebra:
    return load().get(name, params)


def list_entries(dim: int | None = None, table: str | None = None,
                 pure: bool | None = None) -> list[CatalogEntry]:
    return load().list_entries(dim=dim, table=table, pure=pure)


# ---------------------------------------------------------------------------
# Whole-catalog verification
# ---------------------------------------------------------------------------

@dataclass
class CatalogReport:
    entry_failures: list[dict] = field(default_factory=list)
    witness_failures: list[dict] = field(default_factory=list)
    indistinguishable: list[dict] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)
    checked_entries: int = 0
    checked_witnesses: int = 0

    @property
    def passed(self) -> bool:
        return not self.entry_failures and not self.witness_failures

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checked_entries": self.checked_entries,
            "checked_witnesses": self.checked_witnesses,
            "entry_failures": self.entry_failures,
            "witness_failures": self.witness_failures,
            "indistinguishable": self.indistinguishable,
            "flags": self.flags,
        }


def _admissible_samples(entry: CatalogEntry, rng, count: int) -> list[dict]:
    if not entry.algebra.params:
        return [{}]
    out = []
    seen = set()
    while len(out) < count:
        assign = {}
        ok = True
        for p in entry.algebra.params:
            num = rng.choice([n for n in range(-9, 10) if n != 0])
            den = rng.randint(1, 7)
            assign[str(p)] = sp.Rational(num, den)
        for cons in entry.algebra.constraints:
            if sp.cancel(cons.subs({sp.Symbol(k): v for k, v in assign.items()})) == 0:
                ok = False
        key = tuple(sorted((k, str(v)) for k, v in assign.items()))
        if ok and key not in seen:
            seen.add(key)
            out.append(assign)
    return out


def check_entry(entry: CatalogEntry, samples: Sequence[Mapping] = ({},)) -> list[dict]:
    """Invariant failures of a single entry at the given assignments."""
    failures = []
    for assign in samples:
        label = entry.name if not assign else \
            entry.name + "(" + ", ".join(f"{k}={grammar_str(v)}" for k, v in
                                         sorted(assign.items())) + ")"
        a = substitute(entry.algebra, assign) if assign else entry.algebra
        flags = check_identities(a)
        if not flags.novikov:
            failures.append({"entry": label, "problem": "identities fail",
                             "flags": flags.to_dict()})
        dims = derived_power_dims(a)
        if dims[-1] != 0:
            failures.append({"entry": label, "problem": "not nilpotent",
                             "dims_derived": dims})
        if flags.two_step == entry.pure_expected:
            failures.append({"entry": label, "problem": "purity flag mismatch",
                             "two_step": flags.two_step})
        if a.dim >= 1 and len(annihilator_basis(a)) < 1:
            failures.append({"entry": label, "problem": "empty annihilator"})
    return failures


def check_witness(cat: Catalog, w: ExtensionWitness) -> list[dict]:
    """A witness must be a cocycle with trivial annihilator intersection whose
    extension has exactly the target's structure constants."""
    failures = []
    base = cat.witness_base_algebra(w)
    theta = cocycle_from_expr(base, w.cocycle_expr)
    if not is_cocycle(base, theta):
        failures.append({"witness": w.id, "problem": "not a cocycle"})
        return failures
    if not has_trivial_intersection(base, [theta]):
        failures.append({"witness": w.id,
                         "problem": "annihilator intersection nonzero"})
    ext = central_extension(base, [theta]).result
    target = cat.witness_target_algebra(w)
    if ext.dim != target.dim:
        failures.append({"witness": w.id, "problem": "dimension mismatch"})
        return failures
    n = ext.dim
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if sp.cancel(ext.table[i][j][k] - target.table[i][j][k]) != 0:
                    failures.append({
                        "witness": w.id,
                        "problem": "structure constants differ",
                        "at": [i + 1, j + 1, k + 1],
                        "extension": grammar_str(ext.table[i][j][k]),
                        "target": grammar_str(target.table[i][j][k]),
                    })
    return failures


def verify_catalog(samples: int = 5, distinct_samples: int = 3,
                   seed: int = 20260810) -> CatalogReport:
    """Run every entry invariant, every extension witness, and the pairwise
    invariant-profile distinctness scan."""
    import random

    cat = load()
    rng = random.Random(seed)
    report = CatalogReport()

    for entry in cat.entries.values():
        plans: list[Mapping] = [{}]
        if entry.algebra.params:
            plans += _admissible_samples(entry, rng, samples)
        report.entry_failures.extend(check_entry(entry, plans))
        report.checked_entries += 1

    for w in cat.witnesses:
        report.witness_failures.extend(check_witness(cat, w))
        report.checked_witnesses += 1
        if w.constraints_printed and w.target in cat.entries:
            target_cons = {grammar_str(c) for c in
                           cat.entries[w.target].algebra.constraints}
            printed = set(w.constraints_printed)
            if printed - target_cons:
                report.flags.append(
                    f"{w.id}: recorded case constraints {sorted(printed)} are "
                    f"narrower than the target family's {sorted(target_cons)}; "
                    "kept as recorded")

    # Distinctness scan across the dimension-4 listing plus the limit families.
    scan = [e for e in cat.entries.values() if e.listing in ("dim4", "limit")]
    profiles = {}
    for entry in scan:
        plans = [{}] if not entry.algebra.params else \
            _admissible_samples(entry, rng, distinct_samples)
        profiles[entry.name] = tuple(sorted(
            str(invariant_profile(entry.algebra, assign or None).as_tuple())
            for assign in plans))
    names = sorted(profiles)
    for i, a_name in enumerate(names):
        for b_name in names[i + 1:]:
            if profiles[a_name] == profiles[b_name]:
                report.indistinguishable.append({
                    "pair": [a_name, b_name],
                    "note": "indistinguishable by implemented invariants",
                })
    return report
