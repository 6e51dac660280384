/** DOM assembly and event wiring for the review page.
 *
 * The page is a pure view over the last analysis result plus a feedback
 * emitter; it never edits result content. Layout follows the service's
 * report order: input and proposals on the left, the highlighted text
 * beneath the input, phrase and unknown-token lists on the right.
 */

import { ApiClient, ApiError } from "./api.js";
import { segmentByByteSpans, type HighlightSpan } from "./highlight.js";
import type { AnalysisResult, ItemKind, Verdict } from "./types.js";

export interface ViewState {
  text: string;
  result: AnalysisResult | null;
  /** Normalized form of the phrase whose spans are emphasized. */
  selection: string | null;
  /** "kind:value" -> last acknowledged verdict. */
  verdicts: Map<string, Verdict>;
  banner: string | null;
}

export interface AppHandle {
  state: ViewState;
  root: HTMLElement;
  submit(): Promise<void>;
  judge(kind: ItemKind, value: string, verdict: Verdict): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function bannerText(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}

export function createApp(root: HTMLElement, client: ApiClient): AppHandle {
  const state: ViewState = {
    text: "",
    result: null,
    selection: null,
    verdicts: new Map(),
    banner: null,
  };

  const banner = el("div", "banner");
  banner.hidden = true;

  const textInput = el("textarea", "text-input");
  textInput.placeholder = "Paste an abstract and press Analyze";
  const submitButton = el("button", "submit", "Analyze");
  const editorInput = el("input", "editor-id") as HTMLInputElement;
  editorInput.value = "editor";
  editorInput.title = "editor id attached to feedback records";
  const controls = el("div", "controls");
  controls.append(submitButton, editorInput);

  const textView = el("div", "original-text");
  const proposalsView = el("div", "proposals");
  const left = el("section", "pane input-pane");
  left.append(textInput, controls, textView, proposalsView);

  const phraseList = el("ul", "phrase-list");
  const unknownList = el("ul", "unknown-list");
  const right = el("section", "pane result-pane");
  right.append(phraseList, unknownList);

  const layout = el("div", "layout");
  layout.append(left, right);
  root.replaceChildren(banner, layout);

  // Responses to superseded submissions must not render.
  let requestSeq = 0;

  async function submit(): Promise<void> {
    const text = textInput.value;
    if (text.trim() === "") return;
    const token = ++requestSeq;
    state.text = text;
    try {
      const result = await client.analyze(text);
      if (token !== requestSeq) return;
      state.result = result;
      state.selection = null;
      state.verdicts = new Map();
      state.banner = null;
    } catch (error) {
      if (token !== requestSeq) return;
      state.result = null;
      state.selection = null;
      state.verdicts = new Map();
      state.banner = bannerText(error);
    }
    render();
  }

  async function judge(kind: ItemKind, value: string, verdict: Verdict): Promise<void> {
    if (!state.result) return;
    const key = `${kind}:${value}`;
    try {
      await client.feedback({
        doc_id: state.result.doc_id,
        item_kind: kind,
        item_value: value,
        verdict,
        editor_id: editorInput.value,
      });
      state.verdicts.set(key, verdict);
      state.banner = null;
    } catch (error) {
      state.verdicts.delete(key);
      state.banner = bannerText(error);
    }
    render();
  }

  function verdictButtons(kind: ItemKind, value: string): HTMLElement {
    const wrap = el("span", "judge");
    const key = `${kind}:${value}`;
    const judged = state.verdicts.get(key);
    for (const verdict of ["accept", "reject"] as const) {
      const button = el("button", verdict, verdict);
      button.dataset.kind = kind;
      button.dataset.value = value;
      if (judged === verdict) button.classList.add("chosen");
      button.addEventListener("click", () => void judge(kind, value, verdict));
      wrap.append(button);
    }
    if (judged) wrap.append(el("span", "judged", judged === "accept" ? "✓" : "✗"));
    return wrap;
  }

  function renderText(result: AnalysisResult): void {
    const spans: HighlightSpan[] = result.keyphrases.flatMap((phrase) =>
      phrase.occurrences.map((occ) => ({
        start: occ.span[0],
        end: occ.span[1],
        key: phrase.normalized,
      })),
    );
    textView.replaceChildren();
    for (const segment of segmentByByteSpans(result.original_text, spans)) {
      if (segment.key === null) {
        textView.append(document.createTextNode(segment.text));
      } else {
        const mark = el("mark", "occ", segment.text);
        mark.dataset.phrase = segment.key;
        if (segment.key === state.selection) mark.classList.add("focus");
        textView.append(mark);
      }
    }
  }

  function renderPhrases(result: AnalysisResult): void {
    phraseList.replaceChildren();
    for (const phrase of result.keyphrases) {
      const item = el("li", "phrase-item");
      item.dataset.phrase = phrase.normalized;
      if (phrase.normalized === state.selection) item.classList.add("focus");
      const label = phrase.contains_formula ? `${phrase.normalized} [formula]` : phrase.normalized;
      item.append(el("span", "freq", String(phrase.frequency)), el("span", "name", label));
      item.title = phrase.surfaces.join(" | ");
      item.append(verdictButtons("keyphrase", phrase.normalized));
      item.addEventListener("mouseenter", () => {
        state.selection = phrase.normalized;
        render();
      });
      item.addEventListener("mouseleave", () => {
        state.selection = null;
        render();
      });
      phraseList.append(item);
    }
  }

  function renderProposals(result: AnalysisResult): void {
    proposalsView.replaceChildren();
    for (const proposal of result.proposals) {
      const block = el("div", "proposal-block");
      block.dataset.method = proposal.method;
      block.append(el("h3", undefined, `proposed classes (${proposal.method})`));
      const list = el("ol", "class-list");
      for (const [code, score] of proposal.ranked.slice(0, 5)) {
        const row = el("li", "class-item");
        const scoreLabel = el("span", "score", score.toFixed(3));
        scoreLabel.title = String(score);
        row.append(el("span", "code", code), scoreLabel, verdictButtons("class", code));
        list.append(row);
      }
      block.append(list);
      proposalsView.append(block);
    }
  }

  function renderUnknowns(result: AnalysisResult): void {
    unknownList.replaceChildren();
    if (result.unknown_tokens.length === 0) return;
    const header = el("li", "unknown-header", "unknown tokens");
    unknownList.append(header);
    for (const token of result.unknown_tokens) {
      const item = el("li", "unknown-item");
      item.append(
        el("span", "surface", token.surface),
        el("span", "count", `×${token.occurrence_count}`),
        el("span", "tag", `${token.proposed_tag} (${token.confidence.toFixed(3)})`),
      );
      unknownList.append(item);
    }
  }

  function render(): void {
    banner.hidden = state.banner === null;
    banner.textContent = state.banner ?? "";
    if (state.result === null) {
      textView.replaceChildren();
      proposalsView.replaceChildren();
      phraseList.replaceChildren();
      unknownList.replaceChildren();
      return;
    }
    renderText(state.result);
    renderPhrases(state.result);
    renderProposals(state.result);
    renderUnknowns(state.result);
  }

  submitButton.addEventListener("click", () => void submit());
  textInput.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && (event.ctrlKey || event.metaKey)) void submit();
  });

  return { state, root, submit, judge };
}
