/**
 * Keyboard-first labeling: one keystroke per verdict, arrows to move.
 *
 * The mapping is data, not behavior — main.ts decides what each action
 * does on the current screen. Keys never fire while the user is typing
 * in a form field.
 */

export type UiAction = "supported" | "unsupported" | "next" | "prev";

const KEY_ACTIONS: Record<string, UiAction> = {
  s: "supported",
  "1": "supported",
  u: "unsupported",
  "0": "unsupported",
  n: "next",
  ArrowRight: "next",
  p: "prev",
  ArrowLeft: "prev",
};

export const KEY_HINTS: Array<[string, string]> = [
  ["S / 1", "supported"],
  ["U / 0", "unsupported"],
  ["→ / N", "next"],
  ["← / P", "previous"],
];

export interface KeyLike {
  key: string;
  altKey?: boolean;
  ctrlKey?: boolean;
  metaKey?: boolean;
}

export function actionFor(event: KeyLike): UiAction | null {
  if (event.altKey || event.ctrlKey || event.metaKey) {
    return null;
  }
  const key = event.key.length === 1 ? event.key.toLowerCase() : event.key;
  return KEY_ACTIONS[key] ?? null;
}

/** True when the event originates from an editable element. */
export function shouldIgnore(target: unknown): boolean {
  if (!target || typeof target !== "object") {
    return false;
  }
  const el = target as { tagName?: string; isContentEditable?: boolean };
  const tag = (el.tagName ?? "").toUpperCase();
  return tag === "INPUT" || tag === "TEXTAREA" || el.isContentEditable === true;
}
