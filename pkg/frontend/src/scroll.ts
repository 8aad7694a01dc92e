/**
 * Scroll-driven navigation state machine.
 *
 * Scroll offsets map onto the global unit sequence (clusters in document
 * order, units by order_in_cluster): step 0 is the overview, step k is the
 * k-th narrative unit. All functions are pure; the renderer applies the
 * returned transition commands.
 */

import type { NarrativeUnit, ScrollPosition, StoryDocument } from "./types.js";
import { OVERVIEW_POSITION } from "./types.js";

export interface UnitRef {
  globalIndex: number;
  clusterIndex: number;
  unitIndex: number;
  unit: NarrativeUnit;
}

export type TransitionCommand =
  | { kind: "pan-zoom-to-cluster"; clusterId: string }
  | { kind: "highlight-unit"; unitId: string; factIds: string[]; topSlotFactIds: string[] }
  | { kind: "return-to-overview" };

export function globalUnitSequence(doc: StoryDocument): UnitRef[] {
  const clusterIndexById = new Map(doc.clusters.map((c, i) => [c.id, i]));
  return doc.units.map((unit, globalIndex) => ({
    globalIndex,
    clusterIndex: clusterIndexById.get(unit.cluster_id) ?? -1,
    unitIndex: unit.order_in_cluster,
    unit,
  }));
}

/** Offset is measured in "steps" of one unit; fractional offsets belong to
 * the step they are inside. Anything past the last unit clamps to it. */
export function positionForOffset(doc: StoryDocument, scrollOffset: number): ScrollPosition {
  const step = Math.floor(Math.max(0, scrollOffset));
  if (step === 0 || doc.units.length === 0) {
    return OVERVIEW_POSITION;
  }
  const sequence = globalUnitSequence(doc);
  const ref = sequence[Math.min(step - 1, sequence.length - 1)];
  return { mode: "story", clusterIndex: ref.clusterIndex, unitIndex: ref.unitIndex };
}

export function offsetForPosition(doc: StoryDocument, pos: ScrollPosition): number {
  if (pos.mode === "overview") {
    return 0;
  }
  const sequence = globalUnitSequence(doc);
  const ref = sequence.find((r) => r.clusterIndex === pos.clusterIndex && r.unitIndex === pos.unitIndex);
  return ref ? ref.globalIndex + 1 : 0;
}

export function unitAt(doc: StoryDocument, pos: ScrollPosition): NarrativeUnit | null {
  if (pos.mode !== "story") {
    return null;
  }
  const cluster = doc.clusters[pos.clusterIndex];
  if (!cluster) {
    return null;
  }
  return doc.units.find((u) => u.cluster_id === cluster.id && u.order_in_cluster === pos.unitIndex) ?? null;
}

/** Fact ids the current unit draws on, plus which of the cluster's top-3
 * text slots belong to it (those get highlighted in the zoomed circle). */
export function highlightTargets(doc: StoryDocument, pos: ScrollPosition): { factIds: string[]; topSlotFactIds: string[] } {
  const unit = unitAt(doc, pos);
  if (!unit) {
    return { factIds: [], topSlotFactIds: [] };
  }
  const cluster = doc.clusters[pos.clusterIndex];
  const setById = new Map(cluster.fact_sets.map((s) => [s.id, s]));
  const factIds = unit.fact_set_ids.flatMap((sid) => setById.get(sid)?.fact_ids ?? []);
  const memberSet = new Set(factIds);
  const topSlotFactIds = cluster.top_fact_ids.filter((fid) => memberSet.has(fid));
  return { factIds, topSlotFactIds };
}

export function transitionsBetween(doc: StoryDocument, prev: ScrollPosition, next: ScrollPosition): TransitionCommand[] {
  const commands: TransitionCommand[] = [];
  if (next.mode === "overview") {
    if (prev.mode !== "overview") {
      commands.push({ kind: "return-to-overview" });
    }
    return commands;
  }
  const cluster = doc.clusters[next.clusterIndex];
  const unit = unitAt(doc, next);
  if (!cluster || !unit) {
    return commands;
  }
  if (prev.mode !== "story" || prev.clusterIndex !== next.clusterIndex) {
    commands.push({ kind: "pan-zoom-to-cluster", clusterId: cluster.id });
  }
  if (prev.mode !== "story" || prev.clusterIndex !== next.clusterIndex || prev.unitIndex !== next.unitIndex) {
    const targets = highlightTargets(doc, next);
    commands.push({
      kind: "highlight-unit",
      unitId: unit.id,
      factIds: targets.factIds,
      topSlotFactIds: targets.topSlotFactIds,
    });
  }
  return commands;
}

/** Clicking a thematic circle jumps to that cluster's first narrative unit. */
export function clickCluster(doc: StoryDocument, clusterIndex: number): ScrollPosition {
  if (!doc.clusters[clusterIndex]) {
    return OVERVIEW_POSITION;
  }
  return { mode: "story", clusterIndex, unitIndex: 0 };
}

/** Clicking outside the zoomed circle returns to the overview. */
export function clickOutside(): ScrollPosition {
  return OVERVIEW_POSITION;
}
