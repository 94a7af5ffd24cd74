/** Editor state machine, DOM-free for testability.
 *
 * Keystrokes debounce into at most one request per quiet window; the
 * client cache answers repeated prefixes without touching the network; at
 * most one request is tracked at a time and responses for anything but
 * the newest token are discarded.  Selecting a suggestion performs the
 * same splice the server core defines, then immediately re-queries at the
 * advanced position.
 */

import { byteToChar, charToByte } from "./bytes.js";
import { SuggestionCache } from "./cache.js";
import { applySuggestion } from "./splice.js";
import type { SuggestRequest, SuggestResponse, WireContext, WireSuggestion } from "./types.js";

export interface EditorDeps {
  fetchSuggest(req: SuggestRequest): Promise<SuggestResponse>;
  /** Run fn after ms; returns a cancel function (injectable for tests). */
  schedule(fn: () => void, ms: number): () => void;
  langs(): string[];
  debounceMs?: number;
  limit?: number;
}

export interface DropdownState {
  items: WireSuggestion[];
  highlighted: number;
  visible: boolean;
  context: WireContext | null;
}

const HIDDEN: DropdownState = { items: [], highlighted: 0, visible: false, context: null };

export class EditorCore {
  text = "";
  cursor = 0; // UTF-16 index, always on a code-point boundary
  dropdown: DropdownState = HIDDEN;
  transportError = false;
  /** Total requests actually issued to the transport (test observability). */
  requestCounter = 0;
  generation: number | null = null;
  onChange: () => void = () => {};

  private cache = new SuggestionCache();
  private tokenSeq = 0;
  private pendingToken = 0; // 0 = nothing in flight
  private cancelDebounce: (() => void) | null = null;

  constructor(private deps: EditorDeps) {}

  get hasPendingRequest(): boolean {
    return this.pendingToken !== 0;
  }

  onInput(newText: string, newCursor: number): void {
    this.text = newText;
    this.cursor = Math.max(0, Math.min(newCursor, newText.length));
    if (this.cancelDebounce) {
      this.cancelDebounce();
    }
    this.cancelDebounce = this.deps.schedule(() => {
      this.cancelDebounce = null;
      this.requestSuggestions();
    }, this.deps.debounceMs ?? 150);
    this.onChange();
  }

  private requestSuggestions(): void {
    const prefix = this.text.slice(0, this.cursor);
    const langs = this.deps.langs();
    if (this.generation !== null) {
      const hit = this.cache.get(prefix, langs, this.generation);
      if (hit !== undefined) {
        this.pendingToken = 0;
        this.applyResponse(hit);
        return;
      }
    }
    const token = ++this.tokenSeq;
    this.pendingToken = token; // latest wins; older in-flight responses go stale
    this.requestCounter += 1;
    const request: SuggestRequest = {
      query: this.text,
      cursor: charToByte(this.text, this.cursor),
      langs,
      limit: this.deps.limit ?? 20,
    };
    this.deps.fetchSuggest(request).then(
      (resp) => {
        if (this.pendingToken !== token) return; // stale: discard
        this.pendingToken = 0;
        this.noteGeneration(resp.generation);
        this.cache.put(prefix, langs, resp.generation, resp);
        this.applyResponse(resp);
      },
      () => {
        if (this.pendingToken !== token) return;
        this.pendingToken = 0;
        this.transportError = true;
        this.dropdown = HIDDEN;
        this.onChange();
      },
    );
  }

  private noteGeneration(generation: number): void {
    if (this.generation !== null && this.generation !== generation) {
      this.cache.clear(); // the server's knowledge changed under us
    }
    this.generation = generation;
  }

  private applyResponse(resp: SuggestResponse): void {
    this.transportError = false;
    this.dropdown = {
      items: resp.suggestions,
      highlighted: 0,
      visible: resp.suggestions.length > 0,
      context: resp.context,
    };
    this.onChange();
  }

  onSelect(index: number): void {
    const { items, context } = this.dropdown;
    if (!this.dropdown.visible || index < 0 || index >= items.length || context === null) {
      return;
    }
    const spliced = applySuggestion(
      this.text,
      charToByte(this.text, this.cursor),
      context.partial_token,
      items[index].insert_text,
    );
    this.dropdown = HIDDEN;
    this.onInput(spliced.text, byteToChar(spliced.text, spliced.cursorBytes));
  }

  moveHighlight(delta: number): void {
    if (!this.dropdown.visible || this.dropdown.items.length === 0) return;
    const n = this.dropdown.items.length;
    const next = (this.dropdown.highlighted + delta + n) % n;
    this.dropdown = { ...this.dropdown, highlighted: next };
    this.onChange();
  }

  dismiss(): void {
    this.dropdown = HIDDEN;
    this.onChange();
  }

  /** Keyboard protocol: returns true when the key was consumed. */
  handleKey(key: string): boolean {
    if (!this.dropdown.visible) return false;
    switch (key) {
      case "ArrowDown":
        this.moveHighlight(1);
        return true;
      case "ArrowUp":
        this.moveHighlight(-1);
        return true;
      case "Enter":
      case "Tab":
        this.onSelect(this.dropdown.highlighted);
        return true;
      case "Escape":
        this.dismiss();
        return true;
      default:
        return false;
    }
  }
}
