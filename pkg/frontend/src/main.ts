/**
 * App bootstrap: query submission with job polling, the filterable thematic
 * overview, and pan-and-zoom scrollytelling through the narrative units.
 */

import { createStoryJob, pollJob } from "./api.js";
import { applyOverviewFilters } from "./filters.js";
import { el, renderArticleList, renderOverview, renderUnitPanel } from "./render.js";
import type { OverviewView } from "./render.js";
import {
  clickCluster,
  clickOutside,
  globalUnitSequence,
  offsetForPosition,
  positionForOffset,
  transitionsBetween,
  unitAt,
} from "./scroll.js";
import type { OverviewFilterState, ScrollPosition, StoryDocument } from "./types.js";
import { DEFAULT_FILTERS, OVERVIEW_POSITION } from "./types.js";

const STAGE_W = 1000;
const STAGE_H = 640;
const ZOOM = 2.2;
const TRANSITION_MS = 600;

interface AppState {
  doc: StoryDocument | null;
  filters: OverviewFilterState;
  position: ScrollPosition;
  view: OverviewView | null;
}

const state: AppState = { doc: null, filters: { ...DEFAULT_FILTERS }, position: OVERVIEW_POSITION, view: null };

const reducedMotion = window.matchMedia("(prefers-reduced-motion: reduce)").matches;

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node;
}

// --- query submission ----------------------------------------------------------

function setupQueryBox(): void {
  const form = $("query-form") as HTMLFormElement;
  const input = $("query-input") as HTMLInputElement;
  const status = $("job-status");
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const query = input.value.trim();
    if (!query) {
      return;
    }
    status.textContent = "submitting…";
    try {
      const jobId = await createStoryJob(query);
      const doc = await pollJob(jobId, (job) => {
        status.textContent = `${job.state} ${(job.progress * 100).toFixed(0)}%`;
      });
      status.textContent = "ready";
      setStory(doc);
    } catch (err) {
      status.textContent = `failed: ${err instanceof Error ? err.message : err}`;
    }
  });
}

// --- filter widget ---------------------------------------------------------------

function setupFilters(): void {
  const topics = $("filter-topics") as HTMLInputElement;
  const topicsValue = $("filter-topics-value");
  const weightMin = $("filter-weight-min") as HTMLInputElement;
  const weightMax = $("filter-weight-max") as HTMLInputElement;
  const dots = $("filter-dots") as HTMLInputElement;

  const apply = () => {
    const maxRaw = weightMax.value.trim();
    state.filters = {
      maxTopics: Number(topics.value),
      linkWeightRange: [Number(weightMin.value) || 0, maxRaw === "" ? Number.POSITIVE_INFINITY : Number(maxRaw)],
      showFactDots: dots.checked,
    };
    topicsValue.textContent = topics.value;
    renderAll();
  };
  for (const control of [topics, weightMin, weightMax, dots]) {
    control.addEventListener("input", apply);
  }
}

// --- hover panels ---------------------------------------------------------------

function showHover(html: HTMLElement, event: MouseEvent): void {
  const panel = $("hover-panel");
  panel.replaceChildren(html);
  panel.style.display = "block";
  panel.style.left = `${Math.min(event.clientX + 14, window.innerWidth - 320)}px`;
  panel.style.top = `${event.clientY + 14}px`;
}

function hideHover(): void {
  $("hover-panel").style.display = "none";
}

// --- overview + scrollytelling ---------------------------------------------------

function renderAll(): void {
  const doc = state.doc;
  if (!doc) {
    return;
  }
  const visible = applyOverviewFilters(doc, state.filters);

  const summary = $("summary-panel");
  summary.replaceChildren(
    el("h2", {}, "This story"),
    el(
      "p",
      {},
      `${visible.stats.shownClusters} of ${doc.stats.total_clusters} topics · ` +
        `${visible.stats.shownFacts} of ${doc.stats.total_facts} facts · ` +
        `${visible.stats.contributingArticles} of ${doc.stats.total_articles} articles`,
    ),
    el("p", { class: "query-echo" }, `“${doc.query}”`),
  );

  const articlesById = new Map(doc.articles.map((a) => [a.id, a]));
  const clusterById = new Map(doc.clusters.map((c) => [c.id, c]));
  const view = renderOverview(doc, visible, STAGE_W, STAGE_H, state.filters.showFactDots, {
    onCircleClick(clusterId) {
      const index = doc.clusters.findIndex((c) => c.id === clusterId);
      jumpTo(clickCluster(doc, index));
    },
    onBackgroundClick() {
      jumpTo(clickOutside());
    },
    onDotHover(factId, clusterId, event) {
      const cluster = clusterById.get(clusterId);
      const fact = cluster?.facts.find((f) => f.id === factId);
      if (!fact) {
        return;
      }
      const article = articlesById.get(fact.article_id);
      const box = el("div", {});
      box.appendChild(el("p", { class: "hover-fact" }, fact.content));
      if (article) {
        box.appendChild(
          el(
            "p",
            { class: "hover-meta" },
            `${article.source_domain} · ${article.published_year || "undated"}`,
          ),
        );
      }
      showHover(box, event);
    },
    onDotLeave: hideHover,
    onLinkHover(linkIndex, event) {
      const link = visible.links[linkIndex];
      const box = el("div", {});
      const a = clusterById.get(link.cluster_a);
      const b = clusterById.get(link.cluster_b);
      box.appendChild(el("p", { class: "hover-title" }, `${a?.topic} ↔ ${b?.topic}`));
      const shared = link.shared_article_ids
        .map((aid) => articlesById.get(aid))
        .filter((x): x is NonNullable<typeof x> => Boolean(x));
      box.appendChild(renderArticleList(shared));
      showHover(box, event);
    },
    onLinkLeave: hideHover,
    onBarHover(kind, clusterId, event) {
      const cluster = clusterById.get(clusterId);
      if (!cluster) {
        return;
      }
      const box = el("div", {});
      if (kind === "facts") {
        box.appendChild(el("p", {}, `${cluster.fact_ids.length} related facts`));
      } else {
        const contributing = [...new Set(cluster.facts.map((f) => f.article_id))]
          .map((aid) => articlesById.get(aid))
          .filter((x): x is NonNullable<typeof x> => Boolean(x));
        box.appendChild(el("p", {}, `${contributing.length} related articles`));
        box.appendChild(renderArticleList(contributing));
      }
      showHover(box, event);
    },
    onBarLeave: hideHover,
  });

  const stageBox = $("stage");
  stageBox.replaceChildren(view.svg);
  state.view = view;

  // one scroll section per narrative unit, plus the overview band on top
  const sections = $("scroll-sections");
  sections.replaceChildren();
  sections.appendChild(el("section", { class: "scroll-step overview-step" }));
  for (const ref of globalUnitSequence(doc)) {
    sections.appendChild(el("section", { class: "scroll-step", "data-unit": ref.unit.id }));
  }

  applyPosition(state.position, true);
}

function applyPosition(next: ScrollPosition, force = false): void {
  const doc = state.doc;
  const view = state.view;
  if (!doc || !view) {
    return;
  }
  const prev = state.position;
  if (!force && prev.mode === next.mode && prev.clusterIndex === next.clusterIndex && prev.unitIndex === next.unitIndex) {
    return;
  }
  const commands = transitionsBetween(doc, force ? OVERVIEW_POSITION : prev, next);
  state.position = next;

  const duration = reducedMotion ? 0 : TRANSITION_MS;
  view.stage.style.transition = `transform ${duration}ms ease-in-out`;

  for (const command of commands) {
    if (command.kind === "return-to-overview") {
      view.stage.style.transform = "";
      view.svg.classList.remove("zoomed");
    } else if (command.kind === "pan-zoom-to-cluster") {
      const pos = view.layout.positions.get(command.clusterId);
      if (pos) {
        const tx = STAGE_W / 2 - pos.x * ZOOM + STAGE_W * 0.17;
        const ty = STAGE_H / 2 - pos.y * ZOOM;
        view.stage.style.transform = `translate(${tx}px, ${ty}px) scale(${ZOOM})`;
        view.stage.style.transformOrigin = "0 0";
        view.svg.classList.add("zoomed");
      }
    } else {
      for (const [factId, dot] of view.dotsByFact) {
        dot.classList.toggle("highlighted", command.factIds.includes(factId));
        dot.classList.toggle("dimmed", !command.factIds.includes(factId));
      }
    }
  }
  if (next.mode === "overview") {
    for (const dot of view.dotsByFact.values()) {
      dot.classList.remove("highlighted", "dimmed");
    }
  }

  const unitBox = $("unit-box");
  const unit = unitAt(doc, next);
  if (unit) {
    unitBox.replaceChildren(renderUnitPanel(doc, unit));
    unitBox.classList.add("visible");
  } else {
    unitBox.classList.remove("visible");
  }
}

function jumpTo(position: ScrollPosition): void {
  const doc = state.doc;
  if (!doc) {
    return;
  }
  const offset = offsetForPosition(doc, position);
  window.scrollTo({ top: offset * window.innerHeight + 1, behavior: reducedMotion ? "auto" : "smooth" });
  applyPosition(position);
}

function onScroll(): void {
  const doc = state.doc;
  if (!doc) {
    return;
  }
  const offset = window.scrollY / window.innerHeight;
  applyPosition(positionForOffset(doc, offset));
}

// --- articles drawer -------------------------------------------------------------

function setupDrawer(): void {
  const toggle = $("drawer-toggle");
  const drawer = $("articles-drawer");
  toggle.addEventListener("click", () => {
    drawer.classList.toggle("open");
    toggle.textContent = drawer.classList.contains("open") ? "▼ articles" : "▲ articles";
  });
}

function setStory(doc: StoryDocument): void {
  state.doc = doc;
  state.position = OVERVIEW_POSITION;
  $("articles-drawer-content").replaceChildren(renderArticleList(doc.articles));
  window.scrollTo({ top: 0 });
  renderAll();
}

function boot(): void {
  setupQueryBox();
  setupFilters();
  setupDrawer();
  window.addEventListener("scroll", onScroll, { passive: true });

  // a story can be preloaded for demos: /?story=<id>
  const params = new URLSearchParams(window.location.search);
  const storyId = params.get("story");
  if (storyId) {
    void fetch(`/api/stories/${storyId}`)
      .then((resp) => (resp.ok ? resp.json() : null))
      .then((doc) => doc && setStory(doc as StoryDocument));
  }
}

boot();
