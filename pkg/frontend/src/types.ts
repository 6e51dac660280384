/** Wire types, mirroring the JSON the analysis service emits. */

export interface Occurrence {
  sentence_index: number;
  token_range: [number, number];
  /** UTF-8 byte offsets into original_text, end exclusive. */
  span: [number, number];
}

export interface KeyPhrase {
  normalized: string;
  surfaces: string[];
  frequency: number;
  contains_formula: boolean;
  occurrences: Occurrence[];
}

export interface Proposal {
  method: string;
  ranked: [string, number][];
}

export interface UnknownToken {
  surface: string;
  proposed_tag: string;
  confidence: number;
  occurrence_count: number;
}

export interface Entity {
  kind: string;
  matched_key: string;
  payload: string[];
  sentence_index: number;
  token_range: [number, number];
  span: [number, number];
}

export interface AnalysisResult {
  doc_id: string;
  original_text: string;
  pipeline_version: string;
  keyphrases: KeyPhrase[];
  proposals: Proposal[];
  unknown_tokens: UnknownToken[];
  entities: Entity[];
}

export type ItemKind = "keyphrase" | "class";
export type Verdict = "accept" | "reject";

export interface FeedbackRequest {
  doc_id: string;
  item_kind: ItemKind;
  item_value: string;
  verdict: Verdict;
  editor_id: string;
}
