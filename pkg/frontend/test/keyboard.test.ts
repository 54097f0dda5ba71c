import { describe, expect, it } from "vitest";

import { actionFor, shouldIgnore } from "../src/keyboard.js";

describe("actionFor", () => {
  it.each([
    ["s", "supported"],
    ["S", "supported"],
    ["1", "supported"],
    ["u", "unsupported"],
    ["U", "unsupported"],
    ["0", "unsupported"],
    ["n", "next"],
    ["ArrowRight", "next"],
    ["p", "prev"],
    ["ArrowLeft", "prev"],
  ] as const)("maps %s to %s", (key, action) => {
    expect(actionFor({ key })).toBe(action);
  });

  it("ignores unmapped keys", () => {
    expect(actionFor({ key: "x" })).toBeNull();
    expect(actionFor({ key: "Enter" })).toBeNull();
    expect(actionFor({ key: "Escape" })).toBeNull();
  });

  it("ignores chords so browser shortcuts keep working", () => {
    expect(actionFor({ key: "s", ctrlKey: true })).toBeNull();
    expect(actionFor({ key: "1", metaKey: true })).toBeNull();
    expect(actionFor({ key: "u", altKey: true })).toBeNull();
  });
});

describe("shouldIgnore", () => {
  it("suppresses shortcuts while typing", () => {
    expect(shouldIgnore({ tagName: "INPUT" })).toBe(true);
    expect(shouldIgnore({ tagName: "input" })).toBe(true);
    expect(shouldIgnore({ tagName: "TEXTAREA" })).toBe(true);
    expect(shouldIgnore({ tagName: "DIV", isContentEditable: true })).toBe(true);
  });

  it("lets shortcuts through elsewhere", () => {
    expect(shouldIgnore({ tagName: "BODY" })).toBe(false);
    expect(shouldIgnore({ tagName: "BUTTON" })).toBe(false);
    expect(shouldIgnore(null)).toBe(false);
    expect(shouldIgnore(undefined)).toBe(false);
  });
});
