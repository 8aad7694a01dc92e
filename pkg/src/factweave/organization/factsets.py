"""Redundancy resolution: group facts asserting the same claim into fact sets.

Different articles restate the same statistic in different wording; an LLM
judges factual equivalence from content and data points. Facts making the
same claim with conflicting values are deliberately kept in separate sets,
both tagged conflicting — reconciling contradictory sources is out of scope.
"""

from __future__ import annotations

from ..ids import IdAllocator, id_sort_key
from ..model import Cluster, Fact, FactSet
from ..providers.llm import StructuredRequest, build_prompt
from .merging import canonical_fact

_INSTRUCTIONS = (
    "Partition the facts into sets of factually equivalent claims: same quantity, "
    "same subject, same time, wording may differ. Every fact id must appear in "
    "exactly one set; singletons are fine. When two facts state the same claim "
    "with contradicting values, keep them in separate sets and mark both "
    "conflicting."
)


def build_fact_sets(cluster: Cluster, llm, ids: IdAllocator) -> list[FactSet]:
    """One FactSet per equivalence class of the cluster's facts.

    Proposals referencing unknown or repeated fact ids are repaired by
    falling back to singletons for the affected facts, so the result always
    partitions the cluster.
    """
    payload = {
        "cluster_id": cluster.id,
        "facts": [
            {
                "id": f.id,
                "content": f.content,
                "data_points": [
                    {"label": p.label, "value": str(p.value), "unit": p.unit, "series_key": p.series_key}
                    for p in f.data_points
                ],
            }
            for f in cluster.facts
        ],
    }
    doc = llm.complete_structured(
        StructuredRequest(
            task_name="build_fact_sets",
            prompt=build_prompt(_INSTRUCTIONS, payload),
            schema_name="fact_set_grouping",
        )
    )

    facts_by_id = {f.id: f for f in cluster.facts}
    unassigned = [f.id for f in cluster.facts]
    groups: list[tuple[list[str], bool]] = []
    for proposed in doc["sets"]:
        member_ids = [fid for fid in proposed["fact_ids"] if fid in unassigned]
        if len(member_ids) != len(set(member_ids)):
            continue
        if not member_ids:
            continue
        for fid in member_ids:
            unassigned.remove(fid)
        groups.append((member_ids, bool(proposed.get("conflicting", False))))
    for fid in unassigned:
        groups.append(([fid], False))
    groups.sort(key=lambda g: min(id_sort_key(fid) for fid in g[0]))

    sets = []
    for member_ids, conflicting in groups:
        members_sorted = sorted(member_ids, key=id_sort_key)
        draft = FactSet(
            id=ids.next("s"),
            cluster_id=cluster.id,
            fact_ids=members_sorted,
            canonical_content="",
            conflicting=conflicting,
        )
        canonical = canonical_fact(draft, facts_by_id)
        sets.append(
            FactSet(
                id=draft.id,
                cluster_id=cluster.id,
                fact_ids=members_sorted,
                canonical_content=canonical.content,
                conflicting=conflicting,
            )
        )
    return sets


def refresh_canonical_contents(sets: list[FactSet], facts_by_id: dict[str, Fact]) -> list[FactSet]:
    """Re-derive canonical contents after member facts changed (entity fills)."""
    out = []
    for s in sets:
        canonical = canonical_fact(s, facts_by_id)
        if canonical.content != s.canonical_content:
            s = FactSet(
                id=s.id,
                cluster_id=s.cluster_id,
                fact_ids=s.fact_ids,
                canonical_content=canonical.content,
                conflicting=s.conflicting,
            )
        out.append(s)
    return out
