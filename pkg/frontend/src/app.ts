// Browser UI: login, mode selection, word-by-word tagging with a grouped
// tag palette, +/- tag editing, multiword merge and confirmation.

import { ApiClient, ApiError, Mode, TagsetResponse } from "./api.js";
import {
  SessionState,
  addTag,
  applyFindings,
  findingsForItem,
  hasBlockingErrors,
  mergeWithNext,
  newSession,
  removeTag,
  serialize,
  stepToken,
  unmergeLast,
  untaggedItems,
} from "./model.js";

const api = new ApiClient();

let mode: Mode = "M";
let tagset: TagsetResponse | null = null;
let state: SessionState | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function show(id: string, visible: boolean): void {
  el(id).style.display = visible ? "" : "none";
}

function banner(message: string, retry?: () => void): void {
  const box = el("banner");
  box.textContent = message;
  box.style.display = message ? "" : "none";
  box.onclick = retry ?? null;
  if (retry) box.textContent += " — bosing va qayta urining";
}

async function startSession(): Promise<void> {
  banner("");
  tagset = await api.tagset(mode);
  const assignment = await api.nextAssignment(mode);
  if (assignment === null) {
    state = null;
    el("sentence").textContent = "Gaplar qolmadi (no sentences remaining)";
    render();
    return;
  }
  state = newSession(
    mode,
    assignment.assignment_id,
    assignment.sentence_id,
    assignment.tokens,
    tagset,
  );
  render();
}

function render(): void {
  show("tagging", state !== null);
  renderModeButtons();
  renderPalette();
  if (!state) return;
  const row = el("sentence");
  row.innerHTML = "";
  state.items.forEach((item, i) => {
    const chip = document.createElement("span");
    chip.className = "token";
    if (item.kind === "punct") {
      chip.textContent = item.char;
      chip.classList.add("punct");
    } else {
      chip.textContent =
        item.words.join("+") + item.tags.map((t) => "/" + t).join("");
      if (i === state!.activeItem) chip.classList.add("active");
      if (item.tags.length === 0) chip.classList.add("untagged");
      chip.onclick = () => {
        state!.activeItem = i;
        render();
      };
    }
    const findings = findingsForItem(state!, i);
    for (const f of findings) {
      const mark = document.createElement("span");
      mark.className = f.severity === "ERROR" ? "error-mark" : "warning-mark";
      mark.title = `${f.rule}: ${f.message}`;
      mark.textContent = f.severity === "ERROR" ? "!" : "?";
      chip.appendChild(mark);
    }
    row.appendChild(chip);
  });
  el("preview").textContent = serialize(state.items);
  const warnBadge = el("warn-badge");
  const untagged = untaggedItems(state);
  warnBadge.style.display = untagged.length ? "" : "none";
  warnBadge.textContent = `${untagged.length} so'z tegsiz (untagged)`;
  (el("confirm") as HTMLButtonElement).disabled = hasBlockingErrors(state);
}

function renderModeButtons(): void {
  for (const m of ["M", "S"] as Mode[]) {
    el(`mode-${m}`).classList.toggle("selected", m === mode);
  }
}

function renderPalette(): void {
  const box = el("palette");
  box.innerHTML = "";
  if (!tagset) return;
  const addButton = (parent: HTMLElement, code: string, title: string) => {
    const b = document.createElement("button");
    b.className = "tag";
    b.textContent = code;
    b.title = title;
    b.onclick = () => {
      if (!state) return;
      addTag(state, code);
      render();
    };
    parent.appendChild(b);
  };
  if (tagset.kind === "M") {
    for (const group of tagset.groups) {
      const section = document.createElement("div");
      section.className = "palette-group";
      const label = document.createElement("h4");
      label.textContent = group.word_class;
      section.appendChild(label);
      for (const t of group.tags) addButton(section, t.code, t.description);
      box.appendChild(section);
    }
  } else {
    const section = document.createElement("div");
    section.className = "palette-group";
    for (const t of tagset.tags) addButton(section, t.code, t.description);
    box.appendChild(section);
  }
}

async function confirmAnnotation(): Promise<void> {
  if (!state) return;
  const line = serialize(state.items);
  try {
    const annotationId = await api.submit(state.assignmentId, line);
    await api.confirm(annotationId);
    applyFindings(state, []);
    await startSession(); // fetch the next assignment automatically
  } catch (err) {
    if (err instanceof ApiError && err.status === 422) {
      // render each finding inline at the offending item, keep state
      applyFindings(state, err.findings);
      render();
    } else if (err instanceof ApiError && err.status === 401) {
      state = null;
      api.token = null;
      show("login", true);
      show("tagging", false);
    } else {
      banner(`Tarmoq xatosi: ${err}`, () => void confirmAnnotation());
    }
  }
}

export function wireUp(): void {
  el("login-form").onsubmit = async (ev) => {
    ev.preventDefault();
    const name = (el("name") as HTMLInputElement).value;
    const passphrase = (el("passphrase") as HTMLInputElement).value;
    try {
      if ((el("register") as HTMLInputElement).checked) {
        await api.register(name, passphrase);
      }
      await api.login(name, passphrase);
      show("login", false);
      await startSession();
    } catch (err) {
      banner(`Kirish xatosi: ${err}`);
    }
  };
  for (const m of ["M", "S"] as Mode[]) {
    el(`mode-${m}`).onclick = () => {
      mode = m;
      void startSession();
    };
  }
  el("prev").onclick = () => state && (stepToken(state, -1), render());
  el("next").onclick = () => state && (stepToken(state, 1), render());
  el("minus").onclick = () => state && (removeTag(state), render());
  el("merge").onclick = () => state && (mergeWithNext(state), render());
  el("unmerge").onclick = () => state && (unmergeLast(state), render());
  el("confirm").onclick = () => void confirmAnnotation();
}

if (typeof document !== "undefined" && document.getElementById("login-form")) {
  wireUp();
}
