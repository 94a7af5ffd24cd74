/** DOM wiring: a textarea, a dropdown, and a language selector.
 *
 * All behavior lives in EditorCore; this file only renders state and
 * forwards events.  Language preference persists in localStorage and
 * defaults to the browser's language list.
 */

import { EditorCore } from "./editorCore.js";
import type { SuggestRequest, SuggestResponse } from "./types.js";

const LANG_KEY = "sparqlcomplete.langs";

function preferredLangs(): string[] {
  const stored = localStorage.getItem(LANG_KEY);
  if (stored) {
    return stored.split(",").filter(Boolean);
  }
  const fromBrowser = (navigator.languages || ["en"]).map((t) => t.split("-")[0].toLowerCase());
  return [...new Set(fromBrowser)];
}

async function fetchSuggest(req: SuggestRequest): Promise<SuggestResponse> {
  const resp = await fetch("/suggest", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(req),
  });
  if (!resp.ok) {
    throw new Error(`suggest failed: ${resp.status}`);
  }
  return (await resp.json()) as SuggestResponse;
}

export function mount(root: Document = document): EditorCore {
  const textarea = root.getElementById("query") as HTMLTextAreaElement;
  const dropdown = root.getElementById("dropdown") as HTMLDivElement;
  const langInput = root.getElementById("langs") as HTMLInputElement;
  const status = root.getElementById("status") as HTMLSpanElement;

  langInput.value = preferredLangs().join(",");
  langInput.addEventListener("change", () => {
    localStorage.setItem(LANG_KEY, langInput.value);
  });

  const editor = new EditorCore({
    fetchSuggest,
    schedule: (fn, ms) => {
      const id = window.setTimeout(fn, ms);
      return () => window.clearTimeout(id);
    },
    langs: () => langInput.value.split(",").map((t) => t.trim()).filter(Boolean),
  });

  editor.onChange = () => {
    if (textarea.value !== editor.text) {
      textarea.value = editor.text;
      textarea.selectionStart = textarea.selectionEnd = editor.cursor;
    }
    render();
  };

  function render(): void {
    status.textContent = editor.transportError ? "offline" : "";
    dropdown.innerHTML = "";
    dropdown.hidden = !editor.dropdown.visible;
    editor.dropdown.items.forEach((item, i) => {
      const row = root.createElement("div");
      row.className = "row" + (i === editor.dropdown.highlighted ? " highlighted" : "");
      const label = root.createElement("b");
      label.textContent = item.display_label;
      const id = root.createElement("span");
      id.className = "muted";
      id.textContent = item.iri ? ` ${item.insert_text}` : "";
      row.append(label, id);
      if (item.description) {
        const desc = root.createElement("div");
        desc.className = "desc";
        desc.textContent = item.description;
        row.append(desc);
      }
      row.addEventListener("mousedown", (ev) => {
        ev.preventDefault();
        editor.onSelect(i);
      });
      dropdown.append(row);
    });
  }

  textarea.addEventListener("input", () => {
    editor.onInput(textarea.value, textarea.selectionStart ?? textarea.value.length);
  });
  textarea.addEventListener("keydown", (ev) => {
    if (editor.handleKey(ev.key)) {
      ev.preventDefault();
    }
  });
  textarea.addEventListener("blur", () => editor.dismiss());

  return editor;
}

if (typeof document !== "undefined" && document.getElementById("query")) {
  mount();
}
