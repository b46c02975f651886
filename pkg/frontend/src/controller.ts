/** Batch labeling state machine: cards, shortcuts, batch-atomic submission.
 *
 * The controller keeps no label bookkeeping beyond the in-flight batch; the
 * server session is the single source of truth and every displayed number
 * comes back from it verbatim.
 */

import { ApiClient, ApiError } from "./api.js";
import type { Label, QueryPayload, SessionView } from "./types.js";

export interface QueryCard {
  id: string;
  project: string;
  method_name: string;
  source_text: string;
  highlight_nodes: string[];
  chosenLabel: Label | null;
}

function cardOf(q: QueryPayload): QueryCard {
  return { ...q, chosenLabel: null };
}

export function defaultTokenGenerator(): string {
  return `batch-${Date.now()}-${Math.random().toString(36).slice(2, 10)}`;
}

export class LabelingController {
  cards: QueryCard[] = [];
  session: SessionView | null = null;
  stoppedReason: string | null = null;
  lastError: string | null = null;
  cursor = 0;

  /** One token per fetched batch: retries of the same submission reuse it. */
  private batchToken: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly newToken: () => string = defaultTokenGenerator,
  ) {}

  async refresh(): Promise<void> {
    this.session = await this.api.getSession();
    const res = await this.api.getQueries();
    this.stoppedReason = res.stopped;
    if (res.stopped !== null) {
      this.cards = [];
      this.batchToken = null;
      return;
    }
    // Keep labels already chosen for cards still pending (partial submits
    // and reconnects must not lose the annotator's work).
    const previous = new Map(this.cards.map((c) => [c.id, c.chosenLabel]));
    const sameBatch =
      this.cards.length > 0 &&
      res.queries.length === this.cards.length &&
      res.queries.every((q, i) => q.id === this.cards[i].id);
    this.cards = res.queries.map((q) => {
      const card = cardOf(q);
      card.chosenLabel = previous.get(q.id) ?? null;
      return card;
    });
    if (!sameBatch) {
      this.batchToken = this.newToken();
      this.cursor = 0;
    }
  }

  get labelingEnabled(): boolean {
    return this.stoppedReason === null && this.cards.length > 0;
  }

  get submitEnabled(): boolean {
    return (
      this.labelingEnabled && this.cards.every((c) => c.chosenLabel !== null)
    );
  }

  get banner(): string | null {
    return this.stoppedReason === null
      ? null
      : `session stopped (${this.stoppedReason})`;
  }

  setLabel(id: string, label: Label): void {
    if (!this.labelingEnabled) throw new Error("labeling is disabled");
    const card = this.cards.find((c) => c.id === id);
    if (!card) throw new Error(`no pending card ${id}`);
    card.chosenLabel = label;
  }

  /** Keyboard shortcuts: c/m label the current card and advance; n skips. */
  handleKey(key: string): void {
    if (!this.labelingEnabled || this.cursor >= this.cards.length) return;
    if (key === "c" || key === "m") {
      this.setLabel(this.cards[this.cursor].id, key.toUpperCase() as Label);
      this.cursor = Math.min(this.cursor + 1, this.cards.length);
    } else if (key === "n") {
      this.cursor = Math.min(this.cursor + 1, this.cards.length);
    }
  }

  /** Batch-atomic submit. Labels stay on the cards if the server rejects. */
  async submit(): Promise<void> {
    if (!this.submitEnabled) throw new Error("batch is not fully labeled");
    const token = this.batchToken!;
    const labels = this.cards.map((c) => ({
      id: c.id,
      label: c.chosenLabel as Label,
    }));
    try {
      await this.api.postLabels(labels, token);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409 && err.detail.includes("duplicate")) {
        // an earlier attempt already went through; fall through to refresh
      } else {
        this.lastError = err instanceof Error ? err.message : String(err);
        throw err;
      }
    }
    this.lastError = null;
    this.batchToken = null;
    await this.refresh();
  }
}
