/**
 * DOM/SVG construction. Everything here is a thin projection of the pure
 * models (filters, layout, charts, scroll) onto elements; no domain logic.
 */

import { chartModel } from "./charts.js";
import type { VisibleOverview } from "./filters.js";
import { articleCount, ellipsizeMiddle, ringLayout, thematicCircleModel } from "./layout.js";
import type { CircleModel, RingLayout } from "./layout.js";
import { renderableCaption } from "./highlights.js";
import type { Article, ChartSpec, Cluster, NarrativeUnit, StoryDocument } from "./types.js";
import { paletteColor } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  return node;
}

export interface OverviewHandlers {
  onCircleClick(clusterId: string): void;
  onBackgroundClick(): void;
  onDotHover(factId: string, clusterId: string, event: MouseEvent): void;
  onDotLeave(): void;
  onLinkHover(linkIndex: number, event: MouseEvent): void;
  onLinkLeave(): void;
  onBarHover(kind: "facts" | "articles", clusterId: string, event: MouseEvent): void;
  onBarLeave(): void;
}

export interface OverviewView {
  svg: SVGSVGElement;
  stage: SVGGElement;
  layout: RingLayout;
  dotsByFact: Map<string, SVGCircleElement>;
  circlesByCluster: Map<string, SVGGElement>;
}

export function renderOverview(
  doc: StoryDocument,
  visible: VisibleOverview,
  width: number,
  height: number,
  showFactDots: boolean,
  handlers: OverviewHandlers,
): OverviewView {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${width} ${height}`,
    class: "overview-svg",
    role: "img",
  }) as SVGSVGElement;
  const stage = svgEl("g", { class: "stage" }) as SVGGElement;
  svg.appendChild(stage);

  const background = svgEl("rect", { x: "0", y: "0", width: `${width}`, height: `${height}`, fill: "transparent" });
  background.addEventListener("click", () => handlers.onBackgroundClick());
  stage.appendChild(background);

  const layout = ringLayout(visible.clusters.map((c) => c.id), width, height);
  const articlesById = new Map(doc.articles.map((a) => [a.id, a]));
  const years = doc.articles.map((a) => a.published_year).filter((y) => y > 0);
  const minYear = years.length ? Math.min(...years) : 0;
  const maxYear = years.length ? Math.max(...years) : 0;
  const maxFacts = Math.max(...visible.clusters.map((c) => c.facts.length), 1);
  const maxArticles = Math.max(...visible.clusters.map((c) => articleCount(c)), 1);

  // links underneath the circles; thickness carries the shared-article count
  visible.links.forEach((link, i) => {
    const a = layout.positions.get(link.cluster_a);
    const b = layout.positions.get(link.cluster_b);
    if (!a || !b) {
      return;
    }
    const line = svgEl("line", {
      x1: `${a.x}`,
      y1: `${a.y}`,
      x2: `${b.x}`,
      y2: `${b.y}`,
      class: "cluster-link",
      "stroke-width": `${1 + 1.5 * link.shared_article_ids.length}`,
    });
    line.addEventListener("mousemove", (e) => handlers.onLinkHover(i, e as MouseEvent));
    line.addEventListener("mouseleave", () => handlers.onLinkLeave());
    stage.appendChild(line);
  });

  const dotsByFact = new Map<string, SVGCircleElement>();
  const circlesByCluster = new Map<string, SVGGElement>();

  for (const cluster of visible.clusters) {
    const pos = layout.positions.get(cluster.id);
    if (!pos) {
      continue;
    }
    const model = thematicCircleModel(cluster, {
      radius: layout.circleRadius,
      maxFactCount: maxFacts,
      maxArticleCount: maxArticles,
      articlesById,
      minYear,
      maxYear,
    });
    const group = svgEl("g", {
      class: "thematic-circle",
      transform: `translate(${pos.x}, ${pos.y})`,
      "data-cluster": cluster.id,
    }) as SVGGElement;
    group.appendChild(renderCircleBody(model, showFactDots, dotsByFact, cluster, handlers));
    group.addEventListener("click", (event) => {
      event.stopPropagation();
      handlers.onCircleClick(cluster.id);
    });
    circlesByCluster.set(cluster.id, group);
    stage.appendChild(group);
  }

  return { svg, stage, layout, dotsByFact, circlesByCluster };
}

function describeArc(radius: number, startAngle: number, endAngle: number): string {
  const sx = radius * Math.cos(startAngle);
  const sy = radius * Math.sin(startAngle);
  const ex = radius * Math.cos(endAngle);
  const ey = radius * Math.sin(endAngle);
  const large = Math.abs(endAngle - startAngle) > Math.PI ? 1 : 0;
  return `M ${sx} ${sy} A ${radius} ${radius} 0 ${large} 1 ${ex} ${ey}`;
}

function renderCircleBody(
  model: CircleModel,
  showFactDots: boolean,
  dotsByFact: Map<string, SVGCircleElement>,
  cluster: Cluster,
  handlers: OverviewHandlers,
): SVGGElement {
  const g = svgEl("g") as SVGGElement;
  const r = model.radius;

  g.appendChild(svgEl("circle", { r: `${r}`, class: "circle-outer" }));
  g.appendChild(svgEl("circle", { r: `${r * 0.52}`, cy: `${-r * 0.12}`, class: "circle-inner" }));

  // two radial bars hugging the upper rim: facts on the left, articles right
  const factBar = svgEl("path", {
    d: describeArc(r * 1.08, -Math.PI / 2 - 0.9 * model.factBar.fraction, -Math.PI / 2),
    class: "radial-bar facts-bar",
  });
  factBar.addEventListener("mousemove", (e) => handlers.onBarHover("facts", model.clusterId, e as MouseEvent));
  factBar.addEventListener("mouseleave", () => handlers.onBarLeave());
  g.appendChild(factBar);
  const articleBar = svgEl("path", {
    d: describeArc(r * 1.16, -Math.PI / 2 - 0.9 * model.articleBar.fraction, -Math.PI / 2),
    class: "radial-bar articles-bar",
  });
  articleBar.addEventListener("mousemove", (e) => handlers.onBarHover("articles", model.clusterId, e as MouseEvent));
  articleBar.addEventListener("mouseleave", () => handlers.onBarLeave());
  g.appendChild(articleBar);

  const topicText = svgEl("text", { y: `${-r - 14}`, class: "topic-label", "text-anchor": "middle" });
  topicText.textContent = model.topic;
  g.appendChild(topicText);

  const rep = svgEl("foreignObject", {
    x: `${-r * 0.48}`,
    y: `${-r * 0.55}`,
    width: `${r * 0.96}`,
    height: `${r * 0.8}`,
  });
  const repDiv = document.createElementNS("http://www.w3.org/1999/xhtml", "div");
  repDiv.setAttribute("class", "representative-fact");
  repDiv.textContent = ellipsizeMiddle(model.representativeText, 140);
  rep.appendChild(repDiv);
  g.appendChild(rep);

  if (showFactDots) {
    for (const connector of model.connectors) {
      const points = connector.points.map((p) => `${p.x},${p.y}`).join(" ");
      g.appendChild(svgEl("polyline", { points, class: "set-connector" }));
    }
    for (const dot of model.dots) {
      const circle = svgEl("circle", {
        cx: `${dot.x}`,
        cy: `${dot.y}`,
        r: `${Math.max(3, model.radius * 0.05)}`,
        fill: dot.color,
        class: "fact-dot",
        "data-fact": dot.factId,
      }) as SVGCircleElement;
      circle.addEventListener("mousemove", (e) => {
        e.stopPropagation();
        handlers.onDotHover(dot.factId, cluster.id, e as MouseEvent);
      });
      circle.addEventListener("mouseleave", () => handlers.onDotLeave());
      dotsByFact.set(dot.factId, circle);
      g.appendChild(circle);
    }
  }
  return g;
}

// --- narrative unit panel -----------------------------------------------------

export function renderUnitPanel(doc: StoryDocument, unit: NarrativeUnit): HTMLElement {
  const articlesById = new Map(doc.articles.map((a) => [a.id, a]));
  const panel = el("article", { class: "unit-panel", "data-unit": unit.id });

  panel.appendChild(el("h3", { class: "unit-title" }, unit.title));

  const caption = el("p", { class: "unit-caption" });
  caption.innerHTML = renderableCaption(unit.caption_html);
  for (const span of caption.querySelectorAll("span[class^=hl-]")) {
    const index = Number(span.className.slice(3));
    (span as HTMLElement).style.backgroundColor = paletteColor(index) + "33";
    (span as HTMLElement).style.borderBottom = `2px solid ${paletteColor(index)}`;
  }
  panel.appendChild(caption);

  const sources = el("p", { class: "unit-sources" });
  for (const articleId of unit.source_article_ids) {
    const article = articlesById.get(articleId);
    if (!article) {
      continue;
    }
    const anchor = el("a", { href: article.url, target: "_blank", rel: "noopener", title: article.title });
    const icon = el("img", { src: article.favicon_url, alt: article.source_domain, class: "favicon" });
    icon.addEventListener("error", () => {
      const glyph = el("span", { class: "favicon-fallback" }, article.source_domain[0].toUpperCase());
      anchor.replaceChildren(glyph);
    });
    anchor.appendChild(icon);
    sources.appendChild(anchor);
  }
  panel.appendChild(sources);

  panel.appendChild(renderChart(unit.chart));
  return panel;
}

export function renderChart(spec: ChartSpec): HTMLElement {
  const wrap = el("figure", { class: `chart chart-${spec.kind}` });
  const model = chartModel(spec);
  const width = 360;
  const height = 220;
  const svg = svgEl("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart-svg" });

  switch (model.kind) {
    case "bar": {
      const rowH = Math.min(34, height / Math.max(1, model.bars.length));
      model.bars.forEach((bar, i) => {
        const y = 8 + i * rowH;
        svg.appendChild(
          svgEl("rect", {
            x: "120",
            y: `${y}`,
            width: `${Math.max(2, bar.fraction * (width - 190))}`,
            height: `${rowH * 0.55}`,
            fill: paletteColor(bar.colorIndex),
          }),
        );
        const label = svgEl("text", { x: "114", y: `${y + rowH * 0.42}`, "text-anchor": "end", class: "chart-label" });
        label.textContent = ellipsizeMiddle(bar.label, 18);
        svg.appendChild(label);
        const value = svgEl("text", {
          x: `${124 + Math.max(2, bar.fraction * (width - 190))}`,
          y: `${y + rowH * 0.42}`,
          class: "chart-value",
        });
        value.textContent = bar.valueText;
        svg.appendChild(value);
      });
      break;
    }
    case "pie": {
      const cx = width / 2;
      const cy = height / 2;
      const r = Math.min(width, height) * 0.36;
      for (const slice of model.slices) {
        const sx = cx + r * Math.cos(slice.startAngle);
        const sy = cy + r * Math.sin(slice.startAngle);
        const ex = cx + r * Math.cos(slice.endAngle);
        const ey = cy + r * Math.sin(slice.endAngle);
        const large = slice.endAngle - slice.startAngle > Math.PI ? 1 : 0;
        svg.appendChild(
          svgEl("path", {
            d: `M ${cx} ${cy} L ${sx} ${sy} A ${r} ${r} 0 ${large} 1 ${ex} ${ey} Z`,
            fill: paletteColor(slice.colorIndex),
            class: "pie-slice",
          }),
        );
        const mid = (slice.startAngle + slice.endAngle) / 2;
        const label = svgEl("text", {
          x: `${cx + r * 1.22 * Math.cos(mid)}`,
          y: `${cy + r * 1.22 * Math.sin(mid)}`,
          "text-anchor": "middle",
          class: "chart-label",
        });
        label.textContent = slice.valueText;
        svg.appendChild(label);
      }
      break;
    }
    case "line": {
      const pad = 38;
      const toX = (f: number) => pad + f * (width - 2 * pad);
      const toY = (f: number) => height - pad - f * (height - 2 * pad);
      const path = model.points.map((p, i) => `${i ? "L" : "M"} ${toX(p.xFraction)} ${toY(p.yFraction)}`).join(" ");
      svg.appendChild(svgEl("path", { d: path, class: "line-path" }));
      for (const p of model.points) {
        svg.appendChild(
          svgEl("circle", { cx: `${toX(p.xFraction)}`, cy: `${toY(p.yFraction)}`, r: "5", fill: paletteColor(p.colorIndex) }),
        );
        const tick = svgEl("text", { x: `${toX(p.xFraction)}`, y: `${height - 12}`, "text-anchor": "middle", class: "chart-label" });
        tick.textContent = p.key;
        svg.appendChild(tick);
        const value = svgEl("text", { x: `${toX(p.xFraction)}`, y: `${toY(p.yFraction) - 10}`, "text-anchor": "middle", class: "chart-value" });
        value.textContent = p.valueText;
        svg.appendChild(value);
      }
      break;
    }
    case "isotype": {
      const rowH = Math.min(40, height / Math.max(1, model.rows.length));
      model.rows.forEach((row, i) => {
        const y = 16 + i * rowH;
        for (let j = 0; j < row.total; j += 1) {
          const filled = j < row.filled;
          const icon = svgEl("text", {
            x: `${120 + j * 20}`,
            y: `${y + 8}`,
            class: filled ? "isotype-icon filled" : "isotype-icon",
          });
          if (filled) {
            icon.setAttribute("fill", paletteColor(row.colorIndex));
          }
          icon.textContent = "●";
          svg.appendChild(icon);
        }
        const label = svgEl("text", { x: "114", y: `${y + 8}`, "text-anchor": "end", class: "chart-label" });
        label.textContent = `${ellipsizeMiddle(row.label, 16)} ${row.valueText}`;
        svg.appendChild(label);
      });
      break;
    }
    case "range": {
      const rowH = Math.min(44, height / Math.max(1, model.pairs.length));
      const pad = 60;
      model.pairs.forEach((pair, i) => {
        const y = 20 + i * rowH;
        const x1 = pad + pair.loFraction * (width - 2 * pad);
        const x2 = pad + pair.hiFraction * (width - 2 * pad);
        svg.appendChild(svgEl("line", { x1: `${x1}`, y1: `${y}`, x2: `${x2}`, y2: `${y}`, class: "range-line" }));
        svg.appendChild(svgEl("circle", { cx: `${x1}`, cy: `${y}`, r: "6", fill: paletteColor(pair.loColorIndex) }));
        svg.appendChild(svgEl("circle", { cx: `${x2}`, cy: `${y}`, r: "6", fill: paletteColor(pair.hiColorIndex) }));
        const label = svgEl("text", { x: `${pad - 8}`, y: `${y + 4}`, "text-anchor": "end", class: "chart-label" });
        label.textContent = ellipsizeMiddle(pair.key, 12);
        svg.appendChild(label);
      });
      break;
    }
    case "text": {
      model.statements.forEach((s, i) => {
        const value = svgEl("text", { x: `${width / 2}`, y: `${70 + i * 70}`, "text-anchor": "middle", class: "big-value" });
        value.setAttribute("fill", paletteColor(s.colorIndex));
        value.textContent = s.valueText;
        svg.appendChild(value);
        const label = svgEl("text", { x: `${width / 2}`, y: `${96 + i * 70}`, "text-anchor": "middle", class: "chart-label" });
        label.textContent = s.label;
        svg.appendChild(label);
      });
      break;
    }
  }

  wrap.appendChild(svg);
  if (spec.kind !== "text") {
    wrap.appendChild(el("figcaption", { class: "chart-axes" }, `${spec.x_label} · ${spec.y_label}`));
  }
  return wrap;
}

export function renderArticleList(articles: Article[]): HTMLElement {
  const list = el("ul", { class: "article-list" });
  for (const article of articles) {
    const item = el("li", {});
    const link = el("a", { href: article.url, target: "_blank", rel: "noopener" }, article.title);
    item.appendChild(link);
    const year = article.published_year ? `${article.published_year}` : "undated";
    item.appendChild(el("span", { class: "article-meta" }, ` — ${article.source_domain}, ${year}`));
    if (article.snippet) {
      item.appendChild(el("p", { class: "article-snippet" }, article.snippet));
    }
    list.appendChild(item);
  }
  return list;
}
