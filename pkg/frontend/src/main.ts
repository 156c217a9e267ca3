import { PolicyClient, ServiceError } from "./api.js";
import { buildGraphView, GraphView, toggleAction } from "./graphView.js";
import { SessionState } from "./state.js";
import { Stage } from "./types.js";

// Browser entry point. Renders the graph view as SVG and wires the
// staged-edit loop: click an edge (or an absent pair in the side list)
// to stage a change, see the what-if report, then commit or discard.

const SVG_NS = "http://www.w3.org/2000/svg";
const SIZE = 520;

const state = new SessionState(new PolicyClient(""));

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  text?: string,
  className?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  if (className) node.className = className;
  return node;
}

function svgLine(x1: number, y1: number, x2: number, y2: number) {
  const line = document.createElementNS(SVG_NS, "line");
  line.setAttribute("x1", String(x1));
  line.setAttribute("y1", String(y1));
  line.setAttribute("x2", String(x2));
  line.setAttribute("y2", String(y2));
  return line;
}

function renderGraph(view: GraphView, onEdgeClick: (f: string, t: string) => void) {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `${-SIZE / 2} ${-SIZE / 2} ${SIZE} ${SIZE}`);
  svg.setAttribute("width", String(SIZE));
  svg.setAttribute("height", String(SIZE));

  const pos = new Map(view.nodes.map((n) => [n.name, n]));
  for (const edge of view.edges) {
    const a = pos.get(edge.from);
    const b = pos.get(edge.to);
    if (!a || !b) continue;
    const line = svgLine(a.x, a.y, b.x, b.y);
    line.classList.add("edge");
    if (edge.bidirectional) line.classList.add("stateful");
    if (edge.offending) line.classList.add("offending");
    if (edge.hypothetical) line.classList.add("hypothetical");
    line.addEventListener("click", () => onEdgeClick(edge.from, edge.to));
    svg.appendChild(line);
  }
  for (const node of view.nodes) {
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", "16");
    svg.appendChild(circle);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(node.x));
    label.setAttribute("y", String(node.y - 22));
    label.setAttribute("text-anchor", "middle");
    label.textContent = node.name;
    svg.appendChild(label);
  }
  return svg;
}

function renderReport(container: HTMLElement) {
  container.replaceChildren();
  const report = state.lastReport;
  if (!report) return;
  container.appendChild(
    el("p", report.overall ? "all invariants hold" : "violations found",
       report.overall ? "pass" : "fail"),
  );
  for (const result of report.results) {
    if (result.holds) continue;
    const flows = result.offending
      .map((e) => `${e.from} -> ${e.to}`)
      .join(", ");
    container.appendChild(
      el("p", `${result.label} (${result.template}): ${flows}`, "fail"),
    );
  }
}

async function redraw() {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren();

  const tabs = el("nav");
  for (const stage of ["invariants", "policy", "stateful", "configs"] as Stage[]) {
    const tab = el("button", stage, stage === state.stage ? "active" : "");
    tab.addEventListener("click", () => {
      state.stage = stage;
      void redraw();
    });
    tabs.appendChild(tab);
  }
  root.appendChild(tabs);

  const policy = state.policy;
  if (state.stage === "invariants") {
    for (const attr of policy.attributes) {
      root.appendChild(el("h3", `${attr.label} (${attr.template})`));
      for (const [host, entry] of Object.entries(attr.attrs)) {
        const marker = entry.declared ? "declared" : "auto";
        root.appendChild(
          el("p", `${host}: ${JSON.stringify(entry.value)} [${marker}]`, marker),
        );
      }
    }
  } else if (state.stage === "configs") {
    try {
      const text = await state.previewConfig("iptables");
      const pre = el("pre");
      pre.textContent = text;
      root.appendChild(pre);
    } catch (err) {
      if (err instanceof ServiceError) {
        root.appendChild(el("p", `${err.detail.stage}: ${err.detail.message}`, "fail"));
      } else throw err;
    }
  } else {
    const graph = state.previewGraph ?? policy.graph;
    const stateful =
      state.stage === "stateful" ? state.stateful?.stateful.stateful ?? [] : [];
    const view = buildGraphView(graph, state.lastReport, stateful);
    root.appendChild(
      renderGraph(view, (from, to) => {
        const op = toggleAction(view, from, to);
        void state.stageEdit({ op, from, to }).then(redraw);
      }),
    );
    const report = el("div");
    renderReport(report);
    root.appendChild(report);

    if (state.pendingEdits.length > 0) {
      const bar = el("div", undefined, "staging");
      bar.appendChild(el("span", `${state.pendingEdits.length} staged edit(s)`));
      const commit = el("button", "commit");
      commit.addEventListener("click", () =>
        state.commitPending().then(redraw),
      );
      const discard = el("button", "discard");
      discard.addEventListener("click", () => {
        state.discardPending();
        void redraw();
      });
      bar.append(commit, discard);
      root.appendChild(bar);
    }
    if (state.stage === "stateful" && !state.stateful) {
      const compute = el("button", "compute stateful policy");
      compute.addEventListener("click", () =>
        state.computeStateful().then(redraw),
      );
      root.appendChild(compute);
    }
  }
}

async function boot() {
  const scenarioUrl = new URLSearchParams(location.search).get("scenario");
  if (!scenarioUrl) {
    document.body.textContent = "pass ?scenario=<url of a scenario JSON file>";
    return;
  }
  const scenario = await (await fetch(scenarioUrl)).json();
  await state.load(scenario);
  await redraw();
}

void boot();
