// Form state and validation rules, kept free of DOM concerns so the
// submit-gating logic is directly testable.

import type { ManifestFeature } from "./types.js";

/** Parse a text input as a finite number; null when it is not one. */
export function parseFinite(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : null;
}

export function fieldError(raw: string): string | null {
  const trimmed = raw.trim();
  if (trimmed === "") return "required";
  if (parseFinite(trimmed) === null) return "enter a number";
  return null;
}

export function softRangeHint(feature: ManifestFeature, raw: string): string | null {
  const value = parseFinite(raw);
  if (value === null || !feature.soft_range) return null;
  const [lo, hi] = feature.soft_range;
  if (value < lo || value > hi) {
    return `outside the typical range ${lo}–${hi}`;
  }
  return null;
}

export class FormState {
  readonly features: ManifestFeature[];
  /** Raw input text per feature name; shared across model switches so
   * features common to two models keep their values. */
  private readonly values: Map<string, string>;

  constructor(features: ManifestFeature[], previous?: Map<string, string>) {
    this.features = features;
    this.values = previous ?? new Map();
  }

  carryOverInto(features: ManifestFeature[]): FormState {
    return new FormState(features, this.values);
  }

  rawValue(name: string): string {
    return this.values.get(name) ?? "";
  }

  setValue(name: string, raw: string): void {
    this.values.set(name, raw);
  }

  errorFor(name: string): string | null {
    return fieldError(this.rawValue(name));
  }

  /** Submit is allowed only when every manifest feature parses finite. */
  canSubmit(): boolean {
    return this.features.every((f) => this.errorFor(f.name) === null);
  }

  numericValues(): Record<string, number> {
    const out: Record<string, number> = {};
    for (const feature of this.features) {
      const value = parseFinite(this.rawValue(feature.name));
      if (value === null) throw new Error(`field ${feature.name} is not valid`);
      out[feature.name] = value;
    }
    return out;
  }
}

export type RiskBand = "low" | "moderate" | "high";

/** UI convention only (not clinical guidance): low <25%, moderate 25-50%,
 * high >=50%. */
export function riskBand(probability: number): RiskBand {
  if (probability < 0.25) return "low";
  if (probability < 0.5) return "moderate";
  return "high";
}
