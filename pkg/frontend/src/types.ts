// Wire types mirroring the triagekit service JSON responses.

export interface ManifestFeature {
  name: string;
  display: string;
  unit: string;
  soft_range: [number, number] | null;
}

export interface ModelManifest {
  id: string;
  version: string;
  task: string;
  threshold: number;
  features: ManifestFeature[];
}

export interface ModelInfo {
  id: string;
  version: string;
  task: string;
  feature_count: number;
}

export interface ShapContribution {
  feature: string;
  value: number;
  shap: number;
}

export interface Explanation {
  base_value: number;
  predicted_margin: number;
  space: string;
  contributions: ShapContribution[];
}

export interface PredictResponse {
  probability: number;
  label: "positive" | "negative";
  threshold: number;
  model_version: string;
  warnings: string[];
  explanation?: Explanation;
}

/** 422 payloads carry a list of messages, each naming one offending feature. */
export interface ServiceErrorBody {
  detail: string[] | string;
}
