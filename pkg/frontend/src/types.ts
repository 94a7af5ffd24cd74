/** Wire types of the completion service's JSON protocol. */

export interface WireSuggestion {
  insert_text: string;
  display_label: string;
  description: string | null;
  iri: string | null;
  kind: string;
  lang: string;
  provenance: { type: string; source: string | null };
}

export interface WireContext {
  position: string;
  variables: string[];
  from_graphs: string[];
  partial_token: string;
  focus_subject: string | null;
}

export interface SuggestRequest {
  query: string;
  /** UTF-8 byte offset into query (the server never sees char indices). */
  cursor: number;
  langs?: string[];
  limit?: number;
}

export interface SuggestResponse {
  context: WireContext;
  suggestions: WireSuggestion[];
  generation: number;
}
