/** Shapes of the labeling-service JSON payloads, mirrored field for field. */

export type Label = "C" | "M";

export interface SessionView {
  iteration: number;
  labeled: number;
  label_budget: number;
  batch_budget: number;
  coverage: number;
  coverage_target: number;
  pending: number;
  stopped: string | null;
  n_features: number;
}

export interface QueryPayload {
  id: string;
  project: string;
  method_name: string;
  source_text: string;
  highlight_nodes: string[];
}

export interface QueriesResponse {
  queries: QueryPayload[];
  stopped: string | null;
}

export interface FeatureStats {
  c_hit: number;
  c_miss: number;
  m_hit: number;
  m_miss: number;
}

export interface FeaturePayload {
  stats: FeatureStats;
  chi2: number;
  n_hits: number;
  rendering: string[];
}

export interface FeaturesResponse {
  features: FeaturePayload[];
}

export interface LabelItem {
  id: string;
  label: Label;
}
