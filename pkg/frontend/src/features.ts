/** Feature table rows: server numbers pass through untouched. */

import type { FeaturePayload } from "./types.js";

export interface FeatureRow {
  stats: { c_hit: number; c_miss: number; m_hit: number; m_miss: number };
  /** Server-computed chi-square, verbatim; never recomputed client-side. */
  chi2: number;
  chi2Display: string;
  n_hits: number;
  rendering: string[];
}

export const EMPTY_FEATURES_MESSAGE =
  "No features selected yet — complete a labeling round first.";

export function buildFeatureTable(features: FeaturePayload[]): FeatureRow[] {
  return features
    .map((f) => ({
      stats: { ...f.stats },
      chi2: f.chi2,
      chi2Display: f.chi2.toFixed(2),
      n_hits: f.n_hits,
      rendering: [...f.rendering],
    }))
    .sort((a, b) => b.chi2 - a.chi2);
}
