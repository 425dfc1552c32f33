// Working state of one assignment: word-by-word tag lists, multiword merges
// and the serialized preview. Item indices here match the indices the server
// reports in validation findings, because the serialized line is parsed back
// into the same item order.

import type { Finding, Mode, TagsetResponse } from "./api.js";

export const PUNCT = new Set([",", ".", "!", "?", ";", ":"]);

export type Item =
  | { kind: "unit"; words: string[]; tags: string[] }
  | { kind: "punct"; char: string };

export interface SessionState {
  mode: Mode;
  assignmentId: string;
  sentenceId: string;
  items: Item[];
  activeItem: number; // index into items; always a unit
  dirty: boolean;
  paletteCodes: Set<string>;
  findings: Finding[];
}

export function buildItems(tokens: string[]): Item[] {
  return tokens.map((t) =>
    PUNCT.has(t)
      ? { kind: "punct", char: t }
      : { kind: "unit", words: [t], tags: [] },
  );
}

export function paletteCodes(tagset: TagsetResponse): Set<string> {
  const codes = new Set<string>();
  if (tagset.kind === "M") {
    for (const group of tagset.groups) {
      for (const tag of group.tags) codes.add(tag.code);
    }
  } else {
    for (const tag of tagset.tags) codes.add(tag.code);
  }
  return codes;
}

export function newSession(
  mode: Mode,
  assignmentId: string,
  sentenceId: string,
  tokens: string[],
  tagset: TagsetResponse,
): SessionState {
  const items = buildItems(tokens);
  return {
    mode,
    assignmentId,
    sentenceId,
    items,
    activeItem: items.findIndex((it) => it.kind === "unit"),
    dirty: false,
    paletteCodes: paletteCodes(tagset),
    findings: [],
  };
}

function unitIndices(state: SessionState): number[] {
  return state.items
    .map((it, i) => (it.kind === "unit" ? i : -1))
    .filter((i) => i >= 0);
}

export function stepToken(state: SessionState, delta: 1 | -1): void {
  const units = unitIndices(state);
  const pos = units.indexOf(state.activeItem);
  const next = units[pos + delta];
  if (next !== undefined) state.activeItem = next;
}

export function addTag(state: SessionState, code: string): void {
  // every code must originate from the palette for the active mode
  if (!state.paletteCodes.has(code)) {
    throw new Error(`tag ${code} is not in the ${state.mode} palette`);
  }
  const item = state.items[state.activeItem];
  if (item.kind !== "unit") return;
  item.tags.push(code);
  state.dirty = true;
}

export function removeTag(state: SessionState): void {
  const item = state.items[state.activeItem];
  if (item.kind !== "unit" || item.tags.length === 0) return;
  item.tags.pop();
  state.dirty = true;
}

export function mergeWithNext(state: SessionState): void {
  const i = state.activeItem;
  const here = state.items[i];
  const next = state.items[i + 1];
  if (!here || !next || here.kind !== "unit" || next.kind !== "unit") return;
  here.words.push(...next.words);
  here.tags.push(...next.tags);
  state.items.splice(i + 1, 1);
  state.dirty = true;
}

export function unmergeLast(state: SessionState): void {
  const item = state.items[state.activeItem];
  if (item.kind !== "unit" || item.words.length < 2) return;
  const word = item.words.pop()!;
  state.items.splice(state.activeItem + 1, 0, {
    kind: "unit",
    words: [word],
    tags: [],
  });
  state.dirty = true;
}

// Must stay byte-identical to the server's line serialization: words joined
// by "+", tags each prefixed by "/", items joined by single spaces except
// punctuation, which attaches to the preceding item.
export function serialize(items: Item[]): string {
  const parts: string[] = [];
  for (const item of items) {
    if (item.kind === "punct") {
      if (parts.length > 0) parts[parts.length - 1] += item.char;
      else parts.push(item.char);
    } else {
      parts.push(
        item.words.join("+") + item.tags.map((t) => "/" + t).join(""),
      );
    }
  }
  return parts.join(" ");
}

export function untaggedItems(state: SessionState): number[] {
  return state.items
    .map((it, i) => (it.kind === "unit" && it.tags.length === 0 ? i : -1))
    .filter((i) => i >= 0);
}

export function hasBlockingErrors(state: SessionState): boolean {
  return state.findings.some((f) => f.severity === "ERROR");
}

export function applyFindings(state: SessionState, findings: Finding[]): void {
  state.findings = findings;
}

export function findingsForItem(state: SessionState, index: number): Finding[] {
  return state.findings.filter((f) => f.item_index === index);
}
