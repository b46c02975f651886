/** Progress panel: a verbatim projection of the /api/session payload. */

import type { SessionView } from "./types.js";

export interface ProgressView {
  iteration: number;
  labeled: number;
  labelBudget: number;
  coverage: number;
  coverageTarget: number;
  nFeatures: number;
  stoppedReason: string | null;
  summary: string;
}

export function buildProgressView(session: SessionView): ProgressView {
  const status =
    session.stopped === null ? "labeling" : `stopped (${session.stopped})`;
  return {
    iteration: session.iteration,
    labeled: session.labeled,
    labelBudget: session.label_budget,
    coverage: session.coverage,
    coverageTarget: session.coverage_target,
    nFeatures: session.n_features,
    stoppedReason: session.stopped,
    summary:
      `iteration ${session.iteration} — ${session.labeled}/${session.label_budget} labeled, ` +
      `coverage ${(session.coverage * 100).toFixed(1)}% ` +
      `(target ${(session.coverage_target * 100).toFixed(1)}%), ${status}`,
  };
}
