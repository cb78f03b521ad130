"""End-to-end verification pipeline.

Seeds a worklist with the safety properties at the minimum concretization,
solves inductive proof obligations against the blocking store, generalizes
each counterexample solution into a concise auxiliary invariant, blocks it
together with its symmetric images, and feeds it back as a new obligation
target.  When no obligation is satisfiable, the concrete invariants are
promoted to quantified form, merged, and rechecked for inductiveness at a
range of instance sizes.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .ast import ProtocolSpec
from .checker import DEFAULT_STATE_LIMIT, Checker
from .concrete import min_concretization, rule_instance_representatives, uniform_sizes
from .cti import BlockedAssertionStore, EquationSet, block_assertion, build_obligation, solve_obligation
from .errors import PromotionError, ResourceLimitError
from .formulas import Clause, ParamInvariant, clause_values_by_type, ground_expand, param_from_safety
from .generalize import GeneralizeContext, generalize
from .promote import merge_invariants, promote
from .symmetry import QuantInfo, get_symmetry_invs, orbit_representative


@dataclass(frozen=True)
class PipelineConfig:
    strategy: str = "decreasing"  # "increasing" | "decreasing"
    heuristic: bool = True
    symmetry: bool = True
    final_sizes: tuple[int, ...] | None = None  # default: binder min .. +2
    impl_bound: int | None = None  # default: max reference size + 2
    state_limit: int = DEFAULT_STATE_LIMIT
    phase_time_limit: float | None = None
    report_format: str = "json"

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "heuristic": self.heuristic,
            "symmetry": self.symmetry,
            "final_sizes": list(self.final_sizes) if self.final_sizes else None,
            "impl_bound": self.impl_bound,
            "state_limit": self.state_limit,
            "phase_time_limit": self.phase_time_limit,
        }


@dataclass
class SolveEvent:
    """One obligation solve, replayable against the store prefix."""

    rule_label: str
    rule_name: str
    binding: tuple[int, ...]
    target: Clause
    store_upto: int
    satisfiable: bool
    solution: EquationSet | None


@dataclass
class VerificationReport:
    protocol: str
    outcome: str  # verified | unsafe | unresolved-cti | resource-limit
    config: dict
    reference_sizes: dict
    invariants: list[ParamInvariant]
    counts: dict
    final_check: list[dict]
    violation: dict | None
    unresolved: dict | None
    merge_events: list[dict]
    timings: dict
    # Runtime-only attachments for callers and tests; not serialized.
    solve_log: list[SolveEvent] = field(default_factory=list, repr=False)
    aux_invariants: list[Clause] = field(default_factory=list, repr=False)
    pre_merge_invariants: list[ParamInvariant] = field(default_factory=list, repr=False)
    checker: Checker | None = field(default=None, repr=False)
    store: BlockedAssertionStore | None = field(default=None, repr=False)


@dataclass
class _WorkItem:
    clause: Clause
    label: str
    used_values: dict[str, tuple[int, ...]]


class _PhaseClock:
    def __init__(self, limit: float | None):
        self.limit = limit
        self.timings: dict[str, float] = {}
        self._start = 0.0
        self._phase = ""

    def begin(self, phase: str) -> None:
        self._phase = phase
        self._start = time.perf_counter()

    def end(self) -> None:
        self.timings[self._phase] = round(time.perf_counter() - self._start, 6)

    def tick(self) -> None:
        if self.limit is not None and time.perf_counter() - self._start > self.limit:
            raise ResourceLimitError(f"time limit exceeded in phase {self._phase!r}")


def reference_sizes(spec: ProtocolSpec) -> dict[str, int]:
    """Per-type maximum of the minimum concretizations over all properties."""
    sizes = {t: 1 for t in spec.param_types}
    for prop in spec.safety:
        for t, n in min_concretization(spec, prop).items():
            sizes[t] = max(sizes[t], n)
    return sizes


def _canonical_binding(prop) -> tuple[int, ...]:
    counters: dict[str, int] = {}
    out = []
    for _, t in prop.binders:
        counters[t] = counters.get(t, 0) + 1
        out.append(counters[t])
    return tuple(out)


def _all_forall(spec: ProtocolSpec) -> QuantInfo:
    return {t: "forall" for t in spec.param_types}


def run_pipeline(
    spec: ProtocolSpec,
    cfg: PipelineConfig | None = None,
    checker: Checker | None = None,
) -> VerificationReport:
    """Verify every safety property of the protocol; deterministic per config.

    A pre-warmed checker may be supplied to reuse reachable-state sets, the
    in-process analog of a persistent checking service.
    """
    cfg = cfg or PipelineConfig()
    clock = _PhaseClock(cfg.phase_time_limit)
    if checker is None:
        checker = Checker(spec, cfg.state_limit)
    reference = reference_sizes(spec)
    counts = {
        "solver_calls": 0,
        "ctis_found": 0,
        "ctis_filtered_trivial": 0,
        "generalize_checker_calls": 0,
        "checker_calls_total": 0,
        "checker_cache_hits": 0,
        "blocked_assertions": 0,
        "aux_invariants": 0,
        "param_invariants": 0,
    }
    report = VerificationReport(
        protocol=spec.name or "protocol",
        outcome="verified",
        config=cfg.to_dict(),
        reference_sizes=dict(sorted(reference.items())),
        invariants=[],
        counts=counts,
        final_check=[],
        violation=None,
        unresolved=None,
        merge_events=[],
        timings=clock.timings,
        checker=checker,
    )

    def finish(outcome: str) -> VerificationReport:
        report.outcome = outcome
        counts["checker_calls_total"] = checker.computed_checks
        counts["checker_cache_hits"] = checker.cache_hits
        report.counts = counts
        return report

    try:
        return _run(spec, cfg, clock, checker, reference, counts, report, finish)
    except ResourceLimitError as exc:
        clock.end()
        report.unresolved = {"reason": "resource-limit", "detail": str(exc)}
        return finish("resource-limit")


def _run(spec, cfg, clock, checker, reference, counts, report, finish):
    # Pre-pass: the safety properties must hold at the reference instance.
    clock.begin("precheck")
    p_ref = checker.protocol(reference)
    for gp in p_ref.properties:
        r = checker.check_invariant(p_ref, gp.clause)
        clock.tick()
        if not r.holds:
            report.violation = {
                "property": gp.name,
                "instance": gp.label(),
                "witness": r.witness,
            }
            clock.end()
            return finish("unsafe")
    clock.end()

    # Counterexample-guided search for auxiliary invariants.
    clock.begin("cti_search")
    store = BlockedAssertionStore()
    report.store = store
    known: list[Clause] = []
    worklist: deque[_WorkItem] = deque()
    seen_targets: set[tuple] = set()

    def symmetries_fn(inv: Clause) -> list[Clause]:
        if not cfg.symmetry:
            return []
        return get_symmetry_invs(inv, _all_forall(spec), reference, spec)

    def enqueue(clause: Clause, label: str) -> None:
        rep = orbit_representative(clause, reference, spec)
        if rep.literals in seen_targets:
            return
        seen_targets.add(rep.literals)
        worklist.append(_WorkItem(rep, label, {
            t: tuple(v) for t, v in clause_values_by_type(rep, spec).items()
        }))

    for prop in spec.safety:
        gp = p_ref.ground_property_at(prop, _canonical_binding(prop))
        known.append(gp.clause)
        block_assertion(gp.clause, symmetries_fn(gp.clause), store)
        enqueue(gp.clause, gp.label())

    aux_records: list[tuple[Clause, dict]] = []
    while worklist:
        item = worklist.popleft()
        for rule in spec.rules:
            for binding in rule_instance_representatives(item.used_values, rule, reference):
                ground_rule = p_ref.ground_rule_at(rule, binding)
                obl = build_obligation(ground_rule, item.clause)
                if obl is None:
                    counts["ctis_filtered_trivial"] += 1
                    continue
                while True:
                    clock.tick()
                    counts["solver_calls"] += 1
                    snapshot = store.snapshot()
                    sol = solve_obligation(obl, store, p_ref, node_limit=cfg.state_limit)
                    report.solve_log.append(SolveEvent(
                        ground_rule.label(), rule.name, binding, item.clause,
                        snapshot, sol is not None, sol,
                    ))
                    if sol is None:
                        break
                    counts["ctis_found"] += 1
                    ctx = GeneralizeContext(tuple(known), cfg.strategy, cfg.heuristic)
                    before = checker.computed_checks
                    aux = generalize(sol, ctx, checker, reference, store, symmetries_fn)
                    counts["generalize_checker_calls"] += checker.computed_checks - before
                    if aux is None:
                        report.unresolved = {
                            "reason": "generalization-failed",
                            "rule": ground_rule.label(),
                            "invariant": item.label,
                            "solution": _eqs_text(sol),
                        }
                        clock.end()
                        return finish("unresolved-cti")
                    provenance = {
                        "kind": "aux",
                        "source_rule": ground_rule.label(),
                        "source_invariant": item.label,
                        "solution": _eqs_text(sol),
                        "strategy": cfg.strategy,
                        "heuristic": cfg.heuristic,
                        "generalize_checker_calls": checker.computed_checks - before,
                    }
                    aux_records.append((aux, provenance))
                    known.append(aux)
                    enqueue(aux, f"aux{len(aux_records)}")
    report.aux_invariants = [a for a, _ in aux_records]
    counts["aux_invariants"] = len(aux_records)
    clock.end()

    # Promotion to quantified parameterized invariants.
    clock.begin("promotion")
    params: list[ParamInvariant] = []
    for prop in spec.safety:
        params.append(param_from_safety(prop, spec))
    for aux, provenance in aux_records:
        clock.tick()
        try:
            inv = promote(aux, spec, reference, checker)
        except PromotionError as exc:
            report.unresolved = {"reason": "promotion-failed", "detail": str(exc)}
            clock.end()
            return finish("unresolved-cti")
        merged_prov = dict(provenance)
        merged_prov.update(inv.provenance)
        merged_prov["concrete"] = aux.text()
        inv.provenance.clear()
        inv.provenance.update(merged_prov)
        params.append(inv)
        _reblock_refined(aux, inv, spec, reference, store, cfg)
    report.pre_merge_invariants = list(params)
    counts["blocked_assertions"] = len(store)
    clock.end()

    # Merging.
    clock.begin("merging")
    impl_bound = cfg.impl_bound or (max(reference.values()) + 2)
    merged, merge_events = merge_invariants(params, spec, impl_bound, checker, reference)
    report.merge_events = merge_events
    report.invariants = merged
    counts["param_invariants"] = len(merged)
    clock.end()

    # Multi-size inductiveness of the final set.
    clock.begin("final_check")
    sizes_list = cfg.final_sizes
    if sizes_list is None:
        base = _binder_minimum(merged)
        sizes_list = (base, base + 1, base + 2)
    report.final_check = final_inductive_check(spec, merged, sizes_list, checker)
    clock.end()
    checked = [e for e in report.final_check if e["verdict"] != "skipped"]
    if not checked or any(e["verdict"] != "holds" for e in checked):
        failing = next((e for e in report.final_check if e["verdict"] == "violated"), None)
        report.unresolved = {
            "reason": "final-check-failed",
            "detail": failing if failing else "no size could be checked",
        }
        return finish("unresolved-cti")
    return finish("verified")


def _binder_minimum(invs: list[ParamInvariant]) -> int:
    base = 1
    for inv in invs:
        sizes = inv.min_sizes()
        if sizes:
            base = max(base, max(sizes.values()))
    return base


def _eqs_text(sol: EquationSet) -> list[str]:
    out = []
    for (name, idx), val in sol.literals:
        var = name + "".join(f"[{i}]" for i in idx)
        v = ("true" if val else "false") if isinstance(val, bool) else str(val)
        out.append(f"{var} = {v}")
    return out


def _reblock_refined(aux: Clause, inv: ParamInvariant, spec, reference, store, cfg) -> None:
    """Re-generate blocking assertions under the post-promotion classification."""
    if not cfg.symmetry:
        return
    values = clause_values_by_type(aux, spec)
    groups = inv.provenance.get("groups", {})
    info: QuantInfo = {}
    for t in spec.param_types:
        if t in groups:
            exists_vals = tuple(
                int(v) for v, q in groups[t].items() if q == "exists"
            )
            forall_vals = tuple(v for v in values.get(t, []) if v not in exists_vals)
            info[t] = ("split", exists_vals, forall_vals)
        else:
            info[t] = "forall"
    images = get_symmetry_invs(aux, info, reference, spec)
    block_assertion(aux, images, store)


def final_inductive_check(
    spec: ProtocolSpec,
    invs: list[ParamInvariant],
    sizes_list,
    checker: Checker,
) -> list[dict]:
    """Ground-expand the set at each size and check inductiveness.

    Sizes below the binder minimum of the set are skipped with a note.
    """
    if not invs:
        raise ValueError("final check requires a nonempty invariant set")
    need = _binder_minimum(invs)
    results = []
    for n in sizes_list:
        if n < need:
            results.append({
                "size": n, "verdict": "skipped",
                "note": f"below binder minimum {need}",
            })
            continue
        sizes = uniform_sizes(spec, n)
        p = checker.protocol(sizes)
        clauses: list[Clause] = []
        seen: set[tuple] = set()
        for inv in invs:
            for c in ground_expand(inv, sizes):
                if c.literals not in seen:
                    seen.add(c.literals)
                    clauses.append(c)
        r = checker.check_inductive(p, clauses)
        entry: dict = {"size": n, "verdict": r.verdict}
        if not r.holds:
            entry["witness"] = r.witness
            entry["detail"] = {k: v for k, v in r.stats.items()}
        results.append(entry)
    return results
