/**
 * Screen wiring. All data shown comes straight from parsed server
 * responses (see api.ts / state.ts); this file only moves it into the
 * DOM and turns clicks/keys into API calls.
 */
import {
  AdjudicatorQueue,
  AnnotatorQueue,
  ApiClient,
  ApiError,
  openTaskIds,
  Verdict,
} from "./api.js";
import { actionFor, KEY_HINTS, shouldIgnore, UiAction } from "./keyboard.js";
import {
  applyAck,
  disagreement,
  pendingTasks,
  progress,
  reportRows,
} from "./state.js";

type Screen = "login" | "annotate" | "done" | "adjudicate" | "report";

interface RetainedVerdict {
  taskId: string;
  verdict: Verdict;
}

let client: ApiClient | null = null;
let annotatorQueue: AnnotatorQueue | null = null;
let adjudicatorQueue: AdjudicatorQueue | null = null;
let cursor = 0;
let busy = false;
// a verdict the server has not acknowledged yet (connection trouble);
// kept here and offered for retry so no keystroke is ever lost
let retained: RetainedVerdict | null = null;

const root = document.getElementById("app") as HTMLElement;

function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: Array<Node | string> = [],
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

function show(screen: Screen, ...children: Array<Node | string>) {
  root.replaceChildren(el("div", { class: `screen screen-${screen}` }, children));
}

function banner(message: string, retry?: () => void): HTMLElement {
  const parts: Array<Node | string> = [message];
  if (retry) {
    const button = el("button", { class: "retry" }, ["Retry now"]) as HTMLButtonElement;
    button.addEventListener("click", retry);
    parts.push(button);
  }
  return el("div", { class: "banner" }, parts);
}

function errorText(err: unknown): string {
  if (err instanceof ApiError) {
    return typeof err.detail === "string"
      ? err.detail
      : `server rejected the request (${err.status})`;
  }
  return "connection failed — your verdict is kept and can be retried";
}

// ---------------------------------------------------------------------------
// login
// ---------------------------------------------------------------------------

function renderLogin(message = "") {
  const input = el("input", {
    type: "password",
    placeholder: "access token",
    autocomplete: "off",
  }) as HTMLInputElement;
  const button = el("button", {}, ["Connect"]) as HTMLButtonElement;
  const note = el("p", { class: "error" }, [message]);

  const connect = async () => {
    const token = input.value.trim();
    if (!token) return;
    button.disabled = true;
    const candidate = new ApiClient(token);
    try {
      const queue = await candidate.getTasks();
      client = candidate;
      if (queue.role === "adjudicator") {
        adjudicatorQueue = queue;
        cursor = 0;
        renderAdjudicate();
      } else {
        annotatorQueue = queue;
        cursor = 0;
        renderAnnotate();
      }
    } catch (err) {
      button.disabled = false;
      note.textContent =
        err instanceof ApiError && err.status === 401
          ? "that token was not accepted"
          : errorText(err);
    }
  };

  button.addEventListener("click", connect);
  input.addEventListener("keydown", (e) => {
    if (e.key === "Enter") connect();
  });
  show("login", el("h1", {}, ["Annotation"]), input, button, note);
  input.focus();
}

// ---------------------------------------------------------------------------
// annotator flow
// ---------------------------------------------------------------------------

function keyHintBar(): HTMLElement {
  return el(
    "div",
    { class: "hints" },
    KEY_HINTS.map(([keys, what]) =>
      el("span", {}, [el("kbd", {}, [keys]), ` ${what}`]),
    ),
  );
}

function renderAnnotate(notice?: HTMLElement) {
  const queue = annotatorQueue;
  if (!queue) return renderLogin();
  const pending = pendingTasks(queue);
  if (pending.length === 0) {
    return renderDone();
  }
  cursor = Math.min(cursor, pending.length - 1);
  const task = pending[cursor];
  const p = progress(queue);

  const head = el("div", { class: "progress" }, [
    `${p.done} of ${p.total} labeled`,
    el("progress", { max: "1", value: String(p.fraction) }),
  ]);
  const doc = el("section", { class: "panel document" }, [
    el("h2", {}, ["Document"]),
    el("p", {}, [task.document]),
  ]);
  const claim = el("section", { class: "panel claim" }, [
    el("h2", {}, ["Claim"]),
    el("p", {}, [task.claim]),
  ]);

  const supportedBtn = el("button", { class: "verdict yes" }, [
    "Supported (S)",
  ]) as HTMLButtonElement;
  const unsupportedBtn = el("button", { class: "verdict no" }, [
    "Unsupported (U)",
  ]) as HTMLButtonElement;
  supportedBtn.addEventListener("click", () => submit(task.id, 1));
  unsupportedBtn.addEventListener("click", () => submit(task.id, 0));
  if (busy) {
    supportedBtn.disabled = true;
    unsupportedBtn.disabled = true;
  }

  const parts: Array<Node | string> = [head];
  if (notice) parts.push(notice);
  parts.push(doc, claim, el("div", { class: "actions" }, [supportedBtn, unsupportedBtn]));
  parts.push(keyHintBar());
  show("annotate", ...parts);
}

async function submit(taskId: string, verdict: Verdict) {
  if (!client || !annotatorQueue || busy) return;
  busy = true;
  retained = { taskId, verdict };
  renderAnnotate();
  try {
    const ack = await client.submitVerdict(taskId, verdict);
    retained = null;
    annotatorQueue = applyAck(annotatorQueue, ack);
    busy = false;
    renderAnnotate();
  } catch (err) {
    busy = false;
    if (err instanceof ApiError && err.status === 409) {
      // someone (or a previous session) already answered differently;
      // the server's copy wins — reload the queue
      retained = null;
      await refreshAnnotator();
      return;
    }
    renderAnnotate(banner(errorText(err), retryRetained));
  }
}

function retryRetained() {
  if (retained) {
    const { taskId, verdict } = retained;
    retained = null;
    submit(taskId, verdict);
  }
}

async function refreshAnnotator() {
  if (!client) return;
  try {
    const queue = await client.getTasks();
    if (queue.role === "annotator") {
      annotatorQueue = queue;
    }
    renderAnnotate();
  } catch (err) {
    renderAnnotate(banner(errorText(err)));
  }
}

function renderDone() {
  const queue = annotatorQueue;
  const total = queue ? queue.total : 0;
  show(
    "done",
    el("h1", {}, ["All done"]),
    el("p", {}, [`You labeled ${total} task${total === 1 ? "" : "s"}. Thank you.`]),
  );
}

// ---------------------------------------------------------------------------
// adjudicator flow
// ---------------------------------------------------------------------------

function renderAdjudicate(notice?: HTMLElement) {
  const queue = adjudicatorQueue;
  if (!queue) return renderLogin();
  if (queue.tasks.length === 0) {
    return renderReport();
  }
  cursor = Math.min(cursor, queue.tasks.length - 1);
  const task = queue.tasks[cursor];
  const split = disagreement(task);

  const head = el("div", { class: "progress" }, [
    `${queue.pending} disagreement${queue.pending === 1 ? "" : "s"} awaiting adjudication`,
  ]);
  const doc = el("section", { class: "panel document" }, [
    el("h2", {}, ["Document"]),
    el("p", {}, [task.document]),
  ]);
  const claim = el("section", { class: "panel claim" }, [
    el("h2", {}, ["Claim"]),
    el("p", {}, [task.claim]),
  ]);
  const breakdown = el("section", { class: "panel breakdown" }, [
    el("h2", {}, ["Verdicts"]),
    el("p", {}, [`supported: ${split.supported.join(", ") || "nobody"}`]),
    el("p", {}, [`unsupported: ${split.unsupported.join(", ") || "nobody"}`]),
  ]);

  const supportedBtn = el("button", { class: "verdict yes" }, [
    "Final: supported (S)",
  ]) as HTMLButtonElement;
  const unsupportedBtn = el("button", { class: "verdict no" }, [
    "Final: unsupported (U)",
  ]) as HTMLButtonElement;
  supportedBtn.addEventListener("click", () => adjudicate(task.id, 1));
  unsupportedBtn.addEventListener("click", () => adjudicate(task.id, 0));
  if (busy) {
    supportedBtn.disabled = true;
    unsupportedBtn.disabled = true;
  }

  const parts: Array<Node | string> = [head];
  if (notice) parts.push(notice);
  parts.push(doc, claim, breakdown);
  parts.push(el("div", { class: "actions" }, [supportedBtn, unsupportedBtn]));
  parts.push(keyHintBar());
  show("adjudicate", ...parts);
}

async function adjudicate(taskId: string, verdict: Verdict) {
  if (!client || busy) return;
  busy = true;
  renderAdjudicate();
  try {
    await client.adjudicate(taskId, verdict);
    busy = false;
    await refreshAdjudicator();
  } catch (err) {
    busy = false;
    renderAdjudicate(banner(errorText(err), () => adjudicate(taskId, verdict)));
  }
}

async function refreshAdjudicator() {
  if (!client) return;
  try {
    const queue = await client.getTasks();
    if (queue.role === "adjudicator") {
      adjudicatorQueue = queue;
    }
    renderAdjudicate();
  } catch (err) {
    renderAdjudicate(banner(errorText(err)));
  }
}

async function renderReport() {
  if (!client) return renderLogin();
  try {
    const report = await client.getReport();
    const table = el("table", { class: "report" });
    table.append(
      el(
        "tr",
        {},
        ["Pipeline", "Tasks", "Kappa", "Label accuracy", "Annotator accuracy", "Adjudicated"].map(
          (h) => el("th", {}, [h]),
        ),
      ),
    );
    for (const row of reportRows(report)) {
      table.append(
        el(
          "tr",
          {},
          [
            row.pipeline,
            String(row.n),
            row.kappa,
            row.labelAccuracy,
            row.annotatorAccuracy,
            String(row.adjudicated),
          ].map((cell) => el("td", {}, [cell])),
        ),
      );
    }
    show(
      "report",
      el("h1", {}, ["Agreement report"]),
      el("p", {}, [`${report.n_tasks} tasks, annotators: ${report.annotators.join(", ")}`]),
      table,
    );
  } catch (err) {
    const blocked = openTaskIds(err);
    if (blocked) {
      show(
        "report",
        el("h1", {}, ["Report not ready"]),
        el("p", {}, ["These tasks are still unresolved:"]),
        el("ul", {}, blocked.map((id) => el("li", {}, [id]))),
      );
      return;
    }
    show("report", banner(errorText(err)));
  }
}

// ---------------------------------------------------------------------------
// keyboard dispatch
// ---------------------------------------------------------------------------

function currentAnnotateTaskId(): string | null {
  if (!annotatorQueue) return null;
  const pending = pendingTasks(annotatorQueue);
  if (pending.length === 0) return null;
  return pending[Math.min(cursor, pending.length - 1)].id;
}

function handleAction(action: UiAction) {
  if (annotatorQueue) {
    const taskId = currentAnnotateTaskId();
    const count = pendingTasks(annotatorQueue).length;
    if (action === "supported" && taskId) submit(taskId, 1);
    else if (action === "unsupported" && taskId) submit(taskId, 0);
    else if (action === "next" && count) {
      cursor = (cursor + 1) % count;
      renderAnnotate();
    } else if (action === "prev" && count) {
      cursor = (cursor + count - 1) % count;
      renderAnnotate();
    }
    return;
  }
  if (adjudicatorQueue) {
    const count = adjudicatorQueue.tasks.length;
    if (count === 0) return;
    const task = adjudicatorQueue.tasks[Math.min(cursor, count - 1)];
    if (action === "supported") adjudicate(task.id, 1);
    else if (action === "unsupported") adjudicate(task.id, 0);
    else if (action === "next") {
      cursor = (cursor + 1) % count;
      renderAdjudicate();
    } else if (action === "prev") {
      cursor = (cursor + count - 1) % count;
      renderAdjudicate();
    }
  }
}

document.addEventListener("keydown", (event) => {
  if (shouldIgnore(event.target)) return;
  const action = actionFor(event);
  if (action) {
    event.preventDefault();
    handleAction(action);
  }
});

renderLogin();
