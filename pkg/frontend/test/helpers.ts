/** Deterministic stand-ins for the editor's injected dependencies. */

import type { SuggestRequest, SuggestResponse } from "../src/types.js";

export class FakeScheduler {
  now = 0;
  private seq = 0;
  private tasks = new Map<number, { at: number; fn: () => void }>();

  schedule = (fn: () => void, ms: number): (() => void) => {
    const id = ++this.seq;
    this.tasks.set(id, { at: this.now + ms, fn });
    return () => this.tasks.delete(id);
  };

  advance(ms: number): void {
    this.now += ms;
    const due = [...this.tasks.entries()]
      .filter(([, t]) => t.at <= this.now)
      .sort((a, b) => a[1].at - b[1].at || a[0] - b[0]);
    for (const [id, task] of due) {
      this.tasks.delete(id);
      task.fn();
    }
  }
}

interface Pending {
  request: SuggestRequest;
  resolve: (resp: SuggestResponse) => void;
  reject: (err: Error) => void;
  settled: boolean;
}

export class FakeTransport {
  requests: Pending[] = [];
  auto: ((req: SuggestRequest) => SuggestResponse) | null = null;

  fetchSuggest = (request: SuggestRequest): Promise<SuggestResponse> => {
    return new Promise((resolve, reject) => {
      const pending: Pending = { request, resolve, reject, settled: false };
      this.requests.push(pending);
      if (this.auto) {
        pending.settled = true;
        resolve(this.auto(request));
      }
    });
  };

  resolve(index: number, resp: SuggestResponse): void {
    const p = this.requests[index];
    if (p.settled) throw new Error(`request ${index} already settled`);
    p.settled = true;
    p.resolve(resp);
  }

  fail(index: number): void {
    const p = this.requests[index];
    p.settled = true;
    p.reject(new Error("network down"));
  }
}

export function response(
  generation: number,
  inserts: string[],
  partialToken = "",
  position = "PREDICATE_POS",
): SuggestResponse {
  return {
    context: {
      position,
      variables: [],
      from_graphs: [],
      partial_token: partialToken,
      focus_subject: null,
    },
    suggestions: inserts.map((insert) => ({
      insert_text: insert,
      display_label: insert,
      description: null,
      iri: null,
      kind: "PROPERTY",
      lang: "en",
      provenance: { type: "ONTOLOGY", source: null },
    })),
    generation,
  };
}

/** Let promise reactions queued by resolve()/reject() run. */
export async function flush(): Promise<void> {
  for (let i = 0; i < 4; i++) {
    await Promise.resolve();
  }
}
