import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { createApp, type AppHandle } from "../src/view.js";
import type { AnalysisResult } from "../src/types.js";
import { fakeFetch, fixtureResult, type RecordedRequest } from "./fixtures.js";

function mount(routes: Parameters<typeof fakeFetch>[0]): {
  handle: AppHandle;
  root: HTMLElement;
  recorded: RecordedRequest[];
} {
  const { fetchImpl, recorded } = fakeFetch(routes);
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  const handle = createApp(root, new ApiClient("", fetchImpl));
  return { handle, root, recorded };
}

async function analyzed(result: AnalysisResult = fixtureResult()) {
  const mounted = mount({
    "/v1/analyze": () => ({ payload: result }),
    "/v1/feedback": () => ({ payload: { ok: true } }),
  });
  const input = mounted.root.querySelector<HTMLTextAreaElement>(".text-input")!;
  input.value = result.original_text;
  await mounted.handle.submit();
  return mounted;
}

function criterion(name: string, assertions: () => void): void {
  try {
    assertions();
  } catch (error) {
    console.log(`[ACCEPTANCE] ${name}: FAIL`);
    throw error;
  }
  console.log(`[ACCEPTANCE] ${name}: PASS`);
}

beforeEach(() => {
  document.body.replaceChildren();
});

describe("acceptance", () => {
  it("renders one highlight per occurrence in the mocked response", async () => {
    const result = fixtureResult();
    const { root } = await analyzed(result);
    criterion("ui-highlight-count", () => {
      const marks = root.querySelectorAll("mark.occ");
      const total = result.keyphrases.reduce((n, k) => n + k.occurrences.length, 0);
      expect(total).toBe(4);
      expect(marks.length).toBe(total);
      const texts = new Set([...marks].map((m) => m.textContent));
      expect(texts).toEqual(new Set(["$L^p$ spaces", "Erdős bound", "interpolation properties"]));
    });
  });

  it("emits exactly one well-formed feedback request per reject click", async () => {
    const { root, recorded } = await analyzed();
    const reject = root.querySelector<HTMLButtonElement>(
      '.phrase-item[data-phrase="$L^p$ spaces"] button.reject',
    )!;
    reject.click();
    criterion("ui-feedback-wiring", () => {
      const feedback = recorded.filter((r) => r.url === "/v1/feedback");
      expect(feedback).toEqual([
        {
          url: "/v1/feedback",
          method: "POST",
          body: {
            doc_id: "doc-1",
            item_kind: "keyphrase",
            item_value: "$L^p$ spaces",
            verdict: "reject",
            editor_id: "editor",
          },
        },
      ]);
    });
  });
});

describe("submit", () => {
  it("renders the phrase list in response order with frequencies", async () => {
    const { root } = await analyzed();
    const items = [...root.querySelectorAll(".phrase-item")];
    expect(items.map((i) => (i as HTMLElement).dataset.phrase)).toEqual([
      "$L^p$ spaces",
      "erdős bound",
      "interpolation properties",
    ]);
    expect(items[0]?.querySelector(".freq")?.textContent).toBe("2");
    expect(items[0]?.querySelector(".name")?.textContent).toBe("$L^p$ spaces [formula]");
  });

  it("groups proposals by method and prints sv margins with 3 decimals", async () => {
    const { root } = await analyzed();
    const methods = [...root.querySelectorAll(".proposal-block")].map(
      (b) => (b as HTMLElement).dataset.method,
    );
    expect(methods).toEqual(["nb", "sv"]);
    const sv = root.querySelector('.proposal-block[data-method="sv"]')!;
    const scores = [...sv.querySelectorAll(".score")];
    expect(scores.map((s) => s.textContent)).toEqual(["1.250", "-0.374"]);
    expect(scores[1]?.getAttribute("title")).toBe("-0.3741");
  });

  it("lists unknown tokens with their proposed tags", async () => {
    const { root } = await analyzed();
    const item = root.querySelector(".unknown-item")!;
    expect(item.querySelector(".surface")?.textContent).toBe("Erdős");
    expect(item.querySelector(".count")?.textContent).toBe("×1");
    expect(item.querySelector(".tag")?.textContent).toBe("NNP (1.000)");
  });

  it("does nothing for blank input", async () => {
    const { handle, recorded, root } = mount({});
    root.querySelector<HTMLTextAreaElement>(".text-input")!.value = "   ";
    await handle.submit();
    expect(recorded).toEqual([]);
  });

  it("has no verdict buttons before a result exists", () => {
    const { root } = mount({});
    expect(root.querySelector("button.accept")).toBeNull();
    expect(root.querySelector("button.reject")).toBeNull();
  });

  it("shows the error envelope in the banner and renders no highlights", async () => {
    const { handle, root } = mount({
      "/v1/analyze": () => ({
        status: 400,
        payload: { error: "unbalanced TeX delimiter at byte 7", code: "unbalanced_delimiter" },
      }),
    });
    root.querySelector<HTMLTextAreaElement>(".text-input")!.value = "broken $x";
    await handle.submit();
    const banner = root.querySelector<HTMLElement>(".banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("unbalanced_delimiter");
    expect(banner.textContent).toContain("byte 7");
    expect(root.querySelectorAll("mark.occ").length).toBe(0);
  });

  it("drops responses that a newer submission superseded", async () => {
    let release!: () => void;
    const gate = new Promise<void>((r) => (release = r));
    const slow = { ...fixtureResult(), doc_id: "slow" };
    const fast = { ...fixtureResult(), doc_id: "fast" };
    const root = document.createElement("div");
    document.body.replaceChildren(root);
    const handle = createApp(
      root,
      new ApiClient("", async (_url, init) => {
        const body = JSON.parse(init?.body as string) as { text: string };
        if (body.text === "slow") await gate;
        return {
          ok: true,
          status: 200,
          json: async () => (body.text === "slow" ? slow : fast),
        };
      }),
    );
    const input = root.querySelector<HTMLTextAreaElement>(".text-input")!;
    input.value = "slow";
    const pending = handle.submit();
    input.value = "fast";
    await handle.submit();
    release();
    await pending;
    expect(handle.state.result?.doc_id).toBe("fast");
  });
});

describe("judging", () => {
  it("marks an item only after the service acknowledges", async () => {
    const { handle, root } = await analyzed();
    await handle.judge("keyphrase", "erdős bound", "accept");
    const item = root.querySelector('.phrase-item[data-phrase="erdős bound"]')!;
    expect(item.querySelector(".judged")?.textContent).toBe("✓");
    expect(item.querySelector("button.accept")?.classList.contains("chosen")).toBe(true);
  });

  it("reversal posts a second record", async () => {
    const { handle, root, recorded } = await analyzed();
    await handle.judge("class", "46", "accept");
    await handle.judge("class", "46", "reject");
    const feedback = recorded.filter((r) => r.url === "/v1/feedback");
    expect(feedback.map((r) => (r.body as { verdict: string }).verdict)).toEqual([
      "accept",
      "reject",
    ]);
    const row = root.querySelector(".class-item")!;
    expect(row.querySelector(".judged")?.textContent).toBe("✗");
  });

  it("keeps no mark when the post fails", async () => {
    const result = fixtureResult();
    const { fetchImpl } = fakeFetch({
      "/v1/analyze": () => ({ payload: result }),
      "/v1/feedback": () => ({
        status: 500,
        payload: { error: "log unwritable", code: "storage_failure" },
      }),
    });
    const root = document.createElement("div");
    document.body.replaceChildren(root);
    const handle = createApp(root, new ApiClient("", fetchImpl));
    root.querySelector<HTMLTextAreaElement>(".text-input")!.value = result.original_text;
    await handle.submit();
    await handle.judge("keyphrase", "erdős bound", "reject");
    expect(handle.state.verdicts.size).toBe(0);
    expect(root.querySelector(".judged")).toBeNull();
    expect(root.querySelector<HTMLElement>(".banner")!.textContent).toContain("storage_failure");
  });

  it("uses the editor id from the control", async () => {
    const { handle, root, recorded } = await analyzed();
    root.querySelector<HTMLInputElement>(".editor-id")!.value = "alice";
    await handle.judge("class", "05", "accept");
    const sent = recorded.filter((r) => r.url === "/v1/feedback").at(-1)!;
    expect((sent.body as { editor_id: string }).editor_id).toBe("alice");
  });
});

describe("selection", () => {
  it("hovering a phrase emphasizes all its spans", async () => {
    const { root } = await analyzed();
    const item = root.querySelector('.phrase-item[data-phrase="$L^p$ spaces"]')!;
    item.dispatchEvent(new Event("mouseenter"));
    const focused = root.querySelectorAll("mark.occ.focus");
    expect(focused.length).toBe(2);
    for (const mark of focused) {
      expect((mark as HTMLElement).dataset.phrase).toBe("$L^p$ spaces");
    }
    root
      .querySelector('.phrase-item[data-phrase="$L^p$ spaces"]')!
      .dispatchEvent(new Event("mouseleave"));
    expect(root.querySelectorAll("mark.occ.focus").length).toBe(0);
  });
});
