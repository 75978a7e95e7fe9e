"""Deterministic synthetic method corpus for fixtures and smoke runs.

Real severity-labeled corpora come from issue trackers this repo does not
scrape; these generated Java methods stand in. Structure (nesting, loops,
size) correlates weakly with severity so metric models have signal, and
each severity class leans on its own callee vocabulary so token models
have a stronger one.
"""

from __future__ import annotations

import random

from .corpus import MethodRecord

RAW_LABELS = {
    0: ["Critical", "Blocker", "CRITICAL", "blocker"],
    1: ["Major", "High", "major", "HIGH"],
    2: ["Medium", "medium", "MEDIUM"],
    3: ["Low", "Trivial", "Minor", "minor", "trivial"],
}

CLASS_WEIGHTS = [0.08, 0.62, 0.09, 0.21]

CALL_POOLS = {
    0: ["abortTransaction", "corruptionGuard", "forceShutdown", "invalidateCache",
        "lockTable", "releaseAllLocks", "rollbackState", "quarantineSegment"],
    1: ["dispatchEvent", "mergeBranch", "parseHeader", "rebuildQueue",
        "resolveConflict", "syncReplica", "updateRegistry", "validateSchema"],
    2: ["adjustLayout", "collectStats", "refreshView", "reorderColumns",
        "scanDirectory", "trackUsage", "repaintWidget", "throttleTimer"],
    3: ["appendSuffix", "formatLabel", "padString", "renameField",
        "trimWhitespace", "tweakSpacing", "capitalizeWord", "stripQuotes"],
}

FILLER_CALLS = ["log", "checkState", "size", "touch", "emit"]

PROJECTS = ["Chart", "Closure", "Lang", "Math", "Time", "Accumulo", "Camel",
            "Flink", "Maven", "Wicket"]

VAR_NAMES = ["count", "index", "limit", "total", "offset", "cursor", "width", "depth"]

# complexity level means per severity class; heavy overlap keeps metric
# models honest
_COMPLEXITY_MEANS = {0: 2.4, 1: 1.4, 2: 1.0, 3: 0.6}


def _pick_call(rng: random.Random, severity: int) -> str:
    if rng.random() < 0.75:
        return rng.choice(CALL_POOLS[severity])
    other = rng.choice([c for c in range(4) if c != severity])
    return rng.choice(CALL_POOLS[other])


def _method_body(rng: random.Random, severity: int, index: int) -> str:
    a, b = rng.sample(VAR_NAMES, 2)
    level = max(0, min(3, round(rng.gauss(_COMPLEXITY_MEANS[severity], 1.1))))
    call1 = _pick_call(rng, severity)
    call2 = _pick_call(rng, severity)
    filler = rng.choice(FILLER_CALLS)
    name = f"handleCase{index}"
    lines = [f"int {name}(int {a}, int {b}) {{"]
    lines.append(f"    int v{index % 7} = {a} + {rng.randint(1, 9)};")
    if level == 0:
        lines.append(f"    {filler}({a});")
        lines.append(f"    {call1}({a});")
    elif level == 1:
        lines.append(f"    if ({a} < {b}) {{")
        lines.append(f"        {call1}({a});")
        lines.append("    }")
        lines.append(f"    {filler}({b});")
    elif level == 2:
        lines.append(f"    for (int i = 0; i < {b}; i++) {{")
        lines.append(f"        if (i % 2 == 0) {{")
        lines.append(f"            {call1}(i);")
        lines.append("        }")
        lines.append(f"        {call2}({a});")
        lines.append("    }")
    else:
        lines.append(f"    while ({a} > 0 && {b} > 0) {{")
        lines.append(f"        if ({a} % 3 == 0) {{")
        lines.append(f"            {call1}({a});")
        lines.append("        } else {")
        lines.append(f"            {call2}({b});")
        lines.append("        }")
        lines.append(f"        {a}--;")
        lines.append("    }")
        lines.append(f"    {filler}({b});")
    lines.append(f"    return v{index % 7} + {b};")
    lines.append("}")
    return "\n".join(lines)


def generate_raw_records(count: int, seed: int) -> list[MethodRecord]:
    """Raw-export records: severity_class unset, label only in severity_raw."""
    rng = random.Random(seed)
    records = []
    for i in range(count):
        severity = rng.choices(range(4), weights=CLASS_WEIGHTS, k=1)[0]
        project = rng.choice(PROJECTS)
        records.append(MethodRecord(
            id=f"m{i:05d}",
            project=project,
            dataset_origin=rng.choice(["defects4j", "bugsjar"]),
            issue_id=f"{project.upper()}-{rng.randint(100, 9999)}",
            severity_raw=rng.choice(RAW_LABELS[severity]),
            severity_class=None,
            source=_method_body(rng, severity, i),
        ))
    return records
