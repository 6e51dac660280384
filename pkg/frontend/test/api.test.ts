import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { fakeFetch, fixtureResult } from "./fixtures.js";

describe("ApiClient", () => {
  it("posts analyze requests and returns the parsed result", async () => {
    const { fetchImpl, recorded } = fakeFetch({
      "/v1/analyze": () => ({ payload: fixtureResult() }),
    });
    const client = new ApiClient("", fetchImpl);
    const result = await client.analyze("some text");
    expect(result.doc_id).toBe("doc-1");
    expect(recorded).toEqual([
      { url: "/v1/analyze", method: "POST", body: { text: "some text" } },
    ]);
  });

  it("passes doc_id only when given", async () => {
    const { fetchImpl, recorded } = fakeFetch({
      "/v1/analyze": () => ({ payload: fixtureResult() }),
    });
    const client = new ApiClient("", fetchImpl);
    await client.analyze("t", "my-doc");
    expect(recorded[0]?.body).toEqual({ text: "t", doc_id: "my-doc" });
  });

  it("prefixes the base url", async () => {
    const { fetchImpl, recorded } = fakeFetch({
      "http://localhost:8000/v1/health": () => ({
        payload: { status: "ok", pipeline_version: "1" },
      }),
    });
    const client = new ApiClient("http://localhost:8000", fetchImpl);
    const health = await client.health();
    expect(health.status).toBe("ok");
    expect(recorded[0]?.method).toBe("GET");
  });

  it("turns error envelopes into ApiError with the service code", async () => {
    const { fetchImpl } = fakeFetch({
      "/v1/analyze": () => ({
        status: 400,
        payload: { error: "unbalanced TeX delimiter at byte 7", code: "unbalanced_delimiter" },
      }),
    });
    const client = new ApiClient("", fetchImpl);
    const failure = await client.analyze("broken $x").catch((e: unknown) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).code).toBe("unbalanced_delimiter");
    expect((failure as ApiError).message).toContain("byte 7");
  });

  it("sends feedback records verbatim", async () => {
    const { fetchImpl, recorded } = fakeFetch({
      "/v1/feedback": () => ({ payload: { ok: true } }),
    });
    const client = new ApiClient("", fetchImpl);
    await client.feedback({
      doc_id: "doc-1",
      item_kind: "class",
      item_value: "46",
      verdict: "accept",
      editor_id: "alice",
    });
    expect(recorded[0]?.body).toEqual({
      doc_id: "doc-1",
      item_kind: "class",
      item_value: "46",
      verdict: "accept",
      editor_id: "alice",
    });
  });

  it("lists the classification scheme", async () => {
    const { fetchImpl } = fakeFetch({
      "/v1/scheme": () => ({
        payload: { classes: [{ code: "05", title: "Combinatorics" }] },
      }),
    });
    const client = new ApiClient("", fetchImpl);
    expect(await client.scheme()).toEqual([{ code: "05", title: "Combinatorics" }]);
  });
});
