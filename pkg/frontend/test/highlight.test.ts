import { describe, expect, it } from "vitest";

import { segmentByByteSpans } from "../src/highlight.js";
import { byteSpan } from "./fixtures.js";

function spanOf(text: string, target: string, key: string, nth = 0) {
  const [start, end] = byteSpan(text, target, nth);
  return { start, end, key };
}

describe("segmentByByteSpans", () => {
  it("splits around a single ascii span", () => {
    const text = "the spectral method converges";
    const segments = segmentByByteSpans(text, [spanOf(text, "spectral method", "p")]);
    expect(segments).toEqual([
      { text: "the ", key: null },
      { text: "spectral method", key: "p" },
      { text: " converges", key: null },
    ]);
  });

  it("handles spans touching both ends and each other", () => {
    const text = "abcd";
    const segments = segmentByByteSpans(text, [
      { start: 0, end: 2, key: "x" },
      { start: 2, end: 4, key: "y" },
    ]);
    expect(segments).toEqual([
      { text: "ab", key: "x" },
      { text: "cd", key: "y" },
    ]);
  });

  it("counts offsets in bytes, not code units", () => {
    const text = "the Erdős bound élégant";
    const segments = segmentByByteSpans(text, [spanOf(text, "Erdős bound", "e")]);
    expect(segments).toEqual([
      { text: "the ", key: null },
      { text: "Erdős bound", key: "e" },
      { text: " élégant", key: null },
    ]);
  });

  it("returns the whole text when there are no spans", () => {
    expect(segmentByByteSpans("plain", [])).toEqual([{ text: "plain", key: null }]);
    expect(segmentByByteSpans("", [])).toEqual([]);
  });

  it("orders spans before segmenting", () => {
    const text = "one two three";
    const segments = segmentByByteSpans(text, [
      spanOf(text, "three", "b"),
      spanOf(text, "one", "a"),
    ]);
    expect(segments.map((s) => s.key)).toEqual(["a", null, "b"]);
  });

  it("concatenation of segments reproduces the text", () => {
    const text = "Séries $\\sum a_n$ convergentes et bornées.";
    const segments = segmentByByteSpans(text, [
      spanOf(text, "$\\sum a_n$", "f"),
      spanOf(text, "bornées", "b"),
    ]);
    expect(segments.map((s) => s.text).join("")).toBe(text);
  });

  it("rejects overlapping spans", () => {
    expect(() =>
      segmentByByteSpans("abcdef", [
        { start: 0, end: 4, key: "x" },
        { start: 2, end: 6, key: "y" },
      ]),
    ).toThrow(RangeError);
  });

  it("rejects out-of-range and empty spans", () => {
    expect(() => segmentByByteSpans("ab", [{ start: 0, end: 3, key: "x" }])).toThrow(RangeError);
    expect(() => segmentByByteSpans("ab", [{ start: 1, end: 1, key: "x" }])).toThrow(RangeError);
  });

  it("rejects spans that split a code point", () => {
    const text = "ő"; // two bytes in UTF-8
    expect(() => segmentByByteSpans(text, [{ start: 0, end: 1, key: "x" }])).toThrow();
  });
});
