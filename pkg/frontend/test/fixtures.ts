/** Shared test scaffolding: a realistic analysis response with correct
 * UTF-8 byte spans, and a recording fetch fake.
 */

import type { FetchLike, JsonResponse } from "../src/api.js";
import type { AnalysisResult } from "../src/types.js";

const encoder = new TextEncoder();

/** Byte span of the nth occurrence of target inside text. */
export function byteSpan(text: string, target: string, nth = 0): [number, number] {
  let from = 0;
  for (let i = 0; ; i++) {
    const at = text.indexOf(target, from);
    if (at < 0) throw new Error(`missing occurrence ${i} of ${JSON.stringify(target)}`);
    if (i === nth) {
      return [
        encoder.encode(text.slice(0, at)).length,
        encoder.encode(text.slice(0, at + target.length)).length,
      ];
    }
    from = at + 1;
  }
}

export const FIXTURE_TEXT =
  "We study the $L^p$ spaces and their interpolation properties. " +
  "The Erdős bound holds for $L^p$ spaces.";

export function fixtureResult(): AnalysisResult {
  return {
    doc_id: "doc-1",
    original_text: FIXTURE_TEXT,
    pipeline_version: "1",
    keyphrases: [
      {
        normalized: "$L^p$ spaces",
        surfaces: ["$L^p$ spaces"],
        frequency: 2,
        contains_formula: true,
        occurrences: [
          { sentence_index: 0, token_range: [3, 5], span: byteSpan(FIXTURE_TEXT, "$L^p$ spaces", 0) },
          { sentence_index: 1, token_range: [5, 7], span: byteSpan(FIXTURE_TEXT, "$L^p$ spaces", 1) },
        ],
      },
      {
        normalized: "erdős bound",
        surfaces: ["Erdős bound"],
        frequency: 1,
        contains_formula: false,
        occurrences: [
          { sentence_index: 1, token_range: [1, 3], span: byteSpan(FIXTURE_TEXT, "Erdős bound") },
        ],
      },
      {
        normalized: "interpolation properties",
        surfaces: ["interpolation properties"],
        frequency: 1,
        contains_formula: false,
        occurrences: [
          {
            sentence_index: 0,
            token_range: [7, 9],
            span: byteSpan(FIXTURE_TEXT, "interpolation properties"),
          },
        ],
      },
    ],
    proposals: [
      { method: "nb", ranked: [["46", 0.52], ["42", 0.31], ["05", 0.17]] },
      { method: "sv", ranked: [["46", 1.25], ["42", -0.3741]] },
    ],
    unknown_tokens: [
      { surface: "Erdős", proposed_tag: "NNP", confidence: 1.0, occurrence_count: 1 },
    ],
    entities: [],
  };
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

type Handler = (body: unknown) => { status?: number; payload: unknown };

/** fetch stand-in: records every request and answers from the route table. */
export function fakeFetch(routes: Record<string, Handler>): {
  fetchImpl: FetchLike;
  recorded: RecordedRequest[];
} {
  const recorded: RecordedRequest[] = [];
  const fetchImpl: FetchLike = async (url, init): Promise<JsonResponse> => {
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    recorded.push({ url, method: init?.method ?? "GET", body });
    const handler = routes[url];
    if (handler === undefined) {
      return { ok: false, status: 404, json: async () => ({ error: "no route", code: "internal" }) };
    }
    const { status = 200, payload } = handler(body);
    return { ok: status < 400, status, json: async () => payload };
  };
  return { fetchImpl, recorded };
}
