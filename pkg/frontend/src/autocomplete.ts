/** Query input with inline, as-you-type suggestions.
 *
 * Each input change (debounced ~150 ms) polls GET /api/autocomplete; text
 * suggestions render in a dropdown and a `widget: "map"` response opens the
 * map widget.  Responses are latest-wins so fast typing can't reorder.
 */
import { ApiClient, debounce, latestWins } from "./api.js";
import { clear, el } from "./dom.js";
import type { Store } from "./state.js";
import type { SuggestionPayload } from "./types.js";

export const DEBOUNCE_MS = 150;

/** Replace the trailing partially-typed words when they prefix the completion. */
export function applyCompletion(prefix: string, completion: string): string {
  const tokens = prefix.toLowerCase().match(/[\w'-]+/g) ?? [];
  const compTokens = completion.toLowerCase().match(/[\w'-]+/g) ?? [];
  for (let take = Math.min(tokens.length, compTokens.length); take >= 1; take--) {
    const tail = tokens.slice(tokens.length - take);
    const headOk = tail.slice(0, -1).every((t, i) => t === compTokens[i]);
    const lastOk = compTokens[take - 1].startsWith(tail[tail.length - 1]);
    const fullyTyped =
      take === compTokens.length && tail[tail.length - 1] === compTokens[take - 1];
    if (headOk && lastOk && !fullyTyped) {
      const pattern = tail
        .map((t) => t.replace(/[.*+?^${}()|[\]\\]/g, "\\$&"))
        .join("\\s+");
      const match = new RegExp(`${pattern}\\s*$`, "i").exec(prefix);
      if (match) return prefix.slice(0, match.index) + completion;
    }
  }
  const base = prefix === "" || prefix.endsWith(" ") ? prefix : prefix + " ";
  return base + completion;
}

export interface AutocompleteBox {
  input: HTMLInputElement;
  root: HTMLElement;
  /** Poll immediately, bypassing the debounce (used by tests and by apply). */
  refresh(): Promise<void>;
}

export function createAutocomplete(
  api: ApiClient,
  store: Store,
  onSubmit: (text: string) => void,
): AutocompleteBox {
  const input = el("input", {
    type: "text",
    class: "query-input",
    placeholder: "e.g. large earthquakes in …",
    "aria-label": "query",
  });
  const dropdown = el("div", { class: "suggestions", role: "listbox" });
  const status = el("span", { class: "parse-status" });
  const root = el("div", { class: "autocomplete" }, input, status, dropdown);

  const fetchSuggestions = latestWins((q: string) => api.autocomplete(q));

  async function poll(): Promise<void> {
    const q = input.value;
    let resp;
    try {
      resp = await fetchSuggestions(q);
    } catch {
      return; // transient polling errors never break typing
    }
    if (!resp) return; // superseded by a newer keystroke
    store.update({
      queryText: q,
      parseStatus: resp.status,
      suggestions: resp.suggestions,
      widgetOpen: resp.widget === "map" || store.get().widgetOpen,
    });
    render(resp.suggestions, resp.status);
  }

  function render(suggestions: SuggestionPayload[], parseStatus: string): void {
    clear(dropdown);
    status.textContent = parseStatus;
    status.className = `parse-status status-${parseStatus}`;
    for (const s of suggestions) {
      if (s.kind !== "text" || !s.text) continue;
      const item = el("div", { class: "suggestion", role: "option" }, s.text);
      item.addEventListener("mousedown", (ev) => {
        ev.preventDefault();
        input.value = applyCompletion(input.value, s.text as string);
        void poll();
        input.focus();
      });
      dropdown.append(item);
    }
  }

  const debouncedPoll = debounce(() => void poll(), DEBOUNCE_MS);
  input.addEventListener("input", debouncedPoll);
  input.addEventListener("keydown", (ev) => {
    if ((ev as KeyboardEvent).key === "Enter") {
      onSubmit(input.value);
    }
  });

  return { input, root, refresh: poll };
}
