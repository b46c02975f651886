export { ApiClient, ApiError } from "./api.js";
export type { FetchFn } from "./api.js";
export { LabelingController, defaultTokenGenerator } from "./controller.js";
export type { QueryCard } from "./controller.js";
export { buildFeatureTable, EMPTY_FEATURES_MESSAGE } from "./features.js";
export type { FeatureRow } from "./features.js";
export { buildProgressView } from "./progress.js";
export type { ProgressView } from "./progress.js";
export type * from "./types.js";
