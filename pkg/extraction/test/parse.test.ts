import { describe, expect, it } from "vitest";

import { mineExcerpts } from "../src/parse.js";

describe("excerpt mining", () => {
  it("emits noun phrases and noun-phrase+verb spans", () => {
    // frozen from the pinned parser's output for this sentence
    const excerpts = mineExcerpts("TNF activates NF-κB signalling");
    expect(excerpts).toContain("TNF");
    expect(excerpts).toContain("NF-κB signalling");
    expect(excerpts).toContain("TNF activates");
    // hyphenated compound survives as one span
    expect(excerpts).toContain("NF-κB");
  });

  it("keeps first-occurrence order and deduplicates", () => {
    const excerpts = mineExcerpts("The cell dies. The cell dies again.");
    const unique = new Set(excerpts);
    expect(unique.size).toBe(excerpts.length);
    const first = excerpts.indexOf("cell");
    expect(first).toBeGreaterThanOrEqual(0);
  });

  it("returns noun phrases only when there is no verb", () => {
    const excerpts = mineExcerpts("An unrelated observation about methodology.");
    expect(excerpts).toEqual(["unrelated observation", "methodology"]);
  });

  it("returns an empty list for empty or verb-free-noun-free input", () => {
    expect(mineExcerpts("")).toEqual([]);
    expect(mineExcerpts("and or but")).toEqual([]);
  });

  it("handles multi-sentence claims within sentence boundaries", () => {
    const excerpts = mineExcerpts("Enzymes catalyse reactions. Cells divide.");
    expect(excerpts).toContain("Enzymes");
    expect(excerpts).toContain("Cells divide");
    // a verb from sentence 2 is never linked to a noun phrase in sentence 1
    expect(excerpts).not.toContain("reactions. Cells");
  });
});
