import { ApiClient } from "./api";
import { GraphViewModel, drawScene } from "./graphview";
import { SessionRunner } from "./session";
import { WarmstartFlow } from "./warmstart";
import type { ActivityView, GraphView } from "./schema";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function renderError(message: string): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.style.display = message ? "block" : "none";
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const learnerId = params.get("learner") ?? "demo";
  let bookId = params.get("book") ?? "";

  const canvas = el<HTMLCanvasElement>("graph");
  const ctx = canvas.getContext("2d")!;
  const model = new GraphViewModel();
  let rafPending = false;

  function draw(): void {
    rafPending = false;
    drawScene(ctx, model.scene(performance.now()), canvas.width, canvas.height);
    if (model.animating) {
      requestDraw();
    }
  }

  function requestDraw(): void {
    if (!rafPending) {
      rafPending = true;
      requestAnimationFrame(draw);
    }
  }

  function resize(): void {
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    requestDraw();
  }
  window.addEventListener("resize", resize);

  // pan/zoom
  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  canvas.addEventListener("mousedown", (e) => {
    dragging = true;
    lastX = e.offsetX;
    lastY = e.offsetY;
  });
  window.addEventListener("mouseup", () => {
    dragging = false;
  });
  canvas.addEventListener("mousemove", (e) => {
    if (!dragging) return;
    model.pan(e.offsetX - lastX, e.offsetY - lastY);
    lastX = e.offsetX;
    lastY = e.offsetY;
    requestDraw();
  });
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    model.zoomAt(e.offsetX, e.offsetY, e.deltaY < 0 ? 1.15 : 1 / 1.15);
    requestDraw();
  });
  canvas.addEventListener("click", async (e) => {
    if (!bookId) return;
    const hit = model.hitTest(e.offsetX, e.offsetY);
    if (!hit) return;
    try {
      const view = await api.learnerView(learnerId, bookId, hit);
      const node = view.nodes.find((n) => n.id === hit);
      if (node?.expanded) {
        model.setExpanded(node);
        const lines = node.expanded.members
          .map((m) => `${m.lemma} (${m.pos.toLowerCase()}, level ${m.level})`)
          .join("\n");
        el<HTMLPreElement>("expansion").textContent = `${node.label}\n${lines}`;
      }
    } catch (err) {
      renderError(String(err));
    }
  });

  async function refreshView(): Promise<GraphView | null> {
    if (!bookId) return null;
    try {
      const view = await api.learnerView(learnerId, bookId);
      model.setData(view);
      renderError("");
      requestDraw();
      return view;
    } catch (err) {
      renderError(`view failed: ${err}`);
      return null;
    }
  }

  function renderActivity(activity: ActivityView, onPick: (option: string) => void): void {
    const host = el<HTMLDivElement>("activity");
    host.innerHTML = "";
    for (const item of activity.items) {
      const p = document.createElement("p");
      p.textContent = item.text;
      host.appendChild(p);
    }
    const options = document.createElement("div");
    options.className = "options";
    for (const option of activity.options) {
      const button = document.createElement("button");
      button.textContent = option;
      button.addEventListener("click", () => onPick(option));
      options.appendChild(button);
    }
    host.appendChild(options);
    if (activity.aids?.length) {
      const aids = document.createElement("div");
      aids.className = "aids";
      aids.textContent = "look up: ";
      for (const option of activity.options) {
        for (const aid of activity.aids) {
          const a = document.createElement("a");
          a.href = aid.url_template.replace("{word}", encodeURIComponent(option));
          a.textContent = `${option} (${aid.kind})`;
          a.target = "_blank";
          aids.appendChild(a);
          aids.appendChild(document.createTextNode(" "));
        }
      }
      host.appendChild(aids);
    }
  }

  el<HTMLButtonElement>("load-book").addEventListener("click", async () => {
    bookId = el<HTMLInputElement>("book-id").value.trim();
    if (!bookId) {
      renderError("enter a book id");
      return;
    }
    const status = await api.bookStatus(bookId).catch((err) => {
      renderError(String(err));
      return null;
    });
    if (status && status.status !== "ready") {
      renderError(`book is ${status.status}`);
      return;
    }
    await refreshView();
  });

  el<HTMLButtonElement>("warmstart").addEventListener("click", async () => {
    if (!bookId) return;
    const flow = new WarmstartFlow(api, learnerId, bookId);
    const checklist = await flow.start();
    const host = el<HTMLDivElement>("activity");
    host.innerHTML = "";
    for (const word of checklist.words) {
      const row = document.createElement("div");
      row.className = "ws-row";
      const label = document.createElement("span");
      label.textContent = word.label;
      const yes = document.createElement("button");
      yes.textContent = "know it";
      const no = document.createElement("button");
      no.textContent = "don't";
      const mark = (known: boolean) => {
        flow.answer(word.family, known);
        yes.disabled = no.disabled = true;
        row.classList.add(known ? "yes" : "no");
        if (flow.complete) {
          void flow.submit().then(refreshView);
        }
      };
      yes.addEventListener("click", () => mark(true));
      no.addEventListener("click", () => mark(false));
      row.append(label, yes, no);
      host.appendChild(row);
    }
  });

  function startSession(mode: "learning" | "testing"): void {
    if (!bookId) return;
    const runner = new SessionRunner(api, learnerId, bookId, {
      onActivity: (activity) =>
        renderActivity(activity, (option) => {
          void runner.choose(option).then(async (result) => {
            if (!result) return;
            el<HTMLDivElement>("feedback").textContent = result.correct
              ? "correct"
              : `wrong: it was "${result.answer}"`;
            model.applyChanges(result.changed, performance.now());
            requestDraw();
            await runner.next();
          });
        }),
      onComplete: (summary) => {
        el<HTMLDivElement>("feedback").textContent =
          `session complete: ${summary.correct}/${summary.answered}`;
        el<HTMLDivElement>("activity").innerHTML = "";
        void refreshView();
      },
    });
    void runner.start(mode).then(() => runner.next());
  }

  el<HTMLButtonElement>("learn").addEventListener("click", () => startSession("learning"));
  el<HTMLButtonElement>("test").addEventListener("click", () => startSession("testing"));

  resize();
}

main();
