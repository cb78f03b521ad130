"""Value-permutation symmetry over concrete invariants.

Protocols are symmetric in parameter values, so permuting the values of a
clause yields clauses with identical verdicts.  Quantifier structure
restricts which permutations preserve a promoted invariant's grouping:
purely universal types permute freely, while types split into existential
and universal value blocks permute within each block only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ast import ParamSort, ProtocolSpec
from .formulas import Clause, literal_key

# Per-type classification: "forall" for free permutation, or a partition
# ("split", exists_values, forall_values) permuting within each block.
QuantInfo = dict[str, "str | tuple"]


@dataclass(frozen=True)
class PermutationPlan:
    """Per-type blocks of interchangeable values; permutations act blockwise."""

    blocks: tuple[tuple[str, tuple[int, ...]], ...]  # (type, values) in block order

    def permutations(self) -> list[dict[str, dict[int, int]]]:
        """Every blockwise permutation as per-type value maps."""
        per_block = []
        for t, values in self.blocks:
            maps = []
            for perm in itertools.permutations(values):
                maps.append((t, {a: b for a, b in zip(values, perm)}))
            per_block.append(maps)
        out = []
        for combo in itertools.product(*per_block):
            merged: dict[str, dict[int, int]] = {}
            for t, mapping in combo:
                merged.setdefault(t, {}).update(mapping)
            out.append(merged)
        return out


def build_plan(types: list[str], quant_info: QuantInfo, sizes: dict[str, int]) -> PermutationPlan:
    blocks: list[tuple[str, tuple[int, ...]]] = []
    for t in types:
        info = quant_info.get(t)
        if info is None:
            raise ValueError(f"no quantifier classification for type {t!r}")
        all_values = tuple(range(1, sizes[t] + 1))
        if info == "forall":
            blocks.append((t, all_values))
        else:
            _, exists_vals, forall_vals = info
            rest = tuple(v for v in all_values if v not in exists_vals and v not in forall_vals)
            for block in (tuple(exists_vals), tuple(forall_vals) + rest):
                if block:
                    blocks.append((t, block))
    return PermutationPlan(tuple(blocks))


def apply_permutation(
    clause: Clause, mapping: dict[str, dict[int, int]], spec: ProtocolSpec
) -> Clause:
    """Rename parameter values in index positions and parameter-sorted values."""
    lits = []
    for (name, idx), val in clause.literals:
        decl = spec.var(name)
        new_idx = tuple(
            mapping.get(t, {}).get(i, i) for i, t in zip(idx, decl.index_types)
        )
        new_val = val
        if isinstance(decl.sort, ParamSort) and isinstance(val, int):
            new_val = mapping.get(decl.sort.param_type, {}).get(val, val)
        lits.append(((name, new_idx), new_val))
    return Clause(tuple(lits)).canonical()


def get_symmetry_invs(
    inv: Clause, quant_info: QuantInfo, sizes: dict[str, int], spec: ProtocolSpec
) -> list[Clause]:
    """Orbit of the invariant under admissible value permutations.

    The original invariant is excluded; output is canonically ordered.
    Raises ``ValueError`` when a parameter type occurring in the invariant
    has no classification.
    """
    from .formulas import clause_values_by_type

    types = sorted(clause_values_by_type(inv, spec))
    for t in types:
        if t not in quant_info:
            raise ValueError(f"no quantifier classification for type {t!r}")
    plan = build_plan(types, quant_info, sizes)
    origin = inv.canonical()
    seen = {origin.literals}
    out = []
    for mapping in plan.permutations():
        image = apply_permutation(inv, mapping, spec)
        if image.literals not in seen:
            seen.add(image.literals)
            out.append(image)
    out.sort(key=lambda c: tuple(literal_key(l) for l in c.literals))
    return out


def canonical_form(inv: Clause) -> Clause:
    """Literals sorted by (variable, index tuple, value); stable and idempotent."""
    return inv.canonical()


def orbit_representative(inv: Clause, sizes: dict[str, int], spec: ProtocolSpec) -> Clause:
    """Least canonical clause in the full-permutation orbit.

    Used to name worklist entries: symmetric rediscoveries map to one
    representative whose values are compact and first-used-first.
    """
    types = sorted({t for t in _types_of(inv, spec)})
    quant_info: QuantInfo = {t: "forall" for t in types}
    candidates = [inv.canonical()] + get_symmetry_invs(inv, quant_info, sizes, spec)
    return min(candidates, key=lambda c: tuple(literal_key(l) for l in c.literals))


def _types_of(inv: Clause, spec: ProtocolSpec):
    from .formulas import clause_values_by_type

    return clause_values_by_type(inv, spec).keys()
