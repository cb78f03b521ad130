"""Report serialization: versioned JSON and a human-readable text form.

JSON output is deterministic for a given (protocol, config) pair except
for the ``timings`` subtree, and round-trips through ``json.loads`` /
``emit`` byte-identically.
"""

from __future__ import annotations

import json

from .ast import BinderRef
from .formulas import ParamInvariant
from .pipeline import VerificationReport

SCHEMA_VERSION = "paraverify-report/1"


def invariant_ast(inv: ParamInvariant) -> dict:
    def term(x):
        if isinstance(x, BinderRef):
            return {"binder": x.name}
        return {"value": x}

    return {
        "binders": [
            {"name": n, "type": t, "quantifier": q} for n, t, q in inv.binders
        ],
        "distinct": [[a, b] for a, b in inv.distinct],
        "body": [
            {"var": l.var, "indices": [term(i) for i in l.indices], "value": term(l.value)}
            for l in inv.body
        ],
    }


def report_dict(report: VerificationReport) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "protocol": report.protocol,
        "outcome": report.outcome,
        "config": report.config,
        "reference_sizes": report.reference_sizes,
        "counts": report.counts,
        "invariants": [
            {
                "text": inv.text(),
                "ast": invariant_ast(inv),
                "provenance": _jsonable(inv.provenance),
            }
            for inv in report.invariants
        ],
        "final_check": _jsonable(report.final_check),
        "violation": _jsonable(report.violation),
        "unresolved": _jsonable(report.unresolved),
        "merge_events": _jsonable(report.merge_events),
        "timings": report.timings,
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def emit_report(report: VerificationReport | dict, fmt: str = "json") -> str:
    """Render a report (or an already-parsed report dict) as json or text."""
    data = report if isinstance(report, dict) else report_dict(report)
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        return _text_report(data)
    raise ValueError(f"unknown report format {fmt!r}")


def _text_report(d: dict) -> str:
    lines = [
        f"protocol: {d['protocol']}",
        f"outcome: {d['outcome']}",
        f"reference sizes: {d['reference_sizes']}",
    ]
    invs = d.get("invariants", [])
    lines.append(f"{len(invs)} parameterized invariants")
    for inv in invs:
        lines.append(f"  {inv['text']}")
    counts = d.get("counts", {})
    lines.append(
        "counts: "
        + ", ".join(f"{k}={counts[k]}" for k in sorted(counts))
    )
    for entry in d.get("final_check", []):
        extra = "" if entry["verdict"] != "skipped" else f" ({entry.get('note', '')})"
        lines.append(f"final check at size {entry['size']}: {entry['verdict']}{extra}")
    if d.get("violation"):
        v = d["violation"]
        lines.append(f"safety violation of {v['property']} at instance {v['instance']}")
        lines.append(f"  witness: {v['witness']}")
    if d.get("unresolved"):
        lines.append(f"unresolved: {d['unresolved']}")
    timings = d.get("timings", {})
    if timings:
        lines.append("timings: " + ", ".join(f"{k}={v}s" for k, v in timings.items()))
    return "\n".join(lines) + "\n"
