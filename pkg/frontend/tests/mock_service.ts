// In-memory stand-in for the triagekit service, close enough to the real
// wire contract to drive the UI. `down = true` simulates the service
// process going away mid-session (fetch rejects like a dropped socket).

import type { ManifestFeature } from "../src/types.js";

const MORTALITY_FEATURES = [
  "age", "neutrophils_pct", "creatinine", "urea", "alkaline_phosphatase",
  "serum_sodium", "indirect_bilirubin", "nl_ratio", "mch", "ast_sgot",
];
const SEVERITY_FEATURES = [
  "age", "urea", "hs_crp", "d_dimer", "indirect_bilirubin",
  "ast_sgot", "monocytes_pct", "rbc_count", "wbc_count", "ferritin",
];

function features(names: string[]): ManifestFeature[] {
  return names.map((name) => ({
    name,
    display: name.replace(/_/g, " "),
    unit: name === "age" ? "years" : "unit",
    soft_range: [0, 100] as [number, number],
  }));
}

export const MANIFESTS: Record<string, ManifestFeature[]> = {
  mortality_reduced: features(MORTALITY_FEATURES),
  severity_reduced: features(SEVERITY_FEATURES),
};

export class MockService {
  down = false;
  predictCalls = 0;
  lastBody: { model: string; features: Record<string, number> } | null = null;
  /** Optional gate letting a test hold a response open to supersede it. */
  pendingDelay: Promise<void> | null = null;

  readonly fetchFn = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    if (this.down) {
      throw new TypeError("fetch failed: connection refused");
    }
    const url = String(input);
    const path = url.replace(/^https?:\/\/[^/]+/, "");

    if (path === "/models") {
      return json(200, {
        models: Object.keys(MANIFESTS).map((id) => ({
          id, version: `${id}/abc123`, task: id.split("_")[0],
          feature_count: MANIFESTS[id].length,
        })),
      });
    }

    const manifestMatch = path.match(/^\/models\/([^/]+)\/manifest$/);
    if (manifestMatch) {
      const id = manifestMatch[1];
      const manifest = MANIFESTS[id];
      if (!manifest) return json(404, { detail: `unknown model '${id}'` });
      return json(200, {
        id, version: `${id}/abc123`, task: id.split("_")[0],
        threshold: 0.5, features: manifest,
      });
    }

    if (path.startsWith("/predict")) {
      this.predictCalls += 1;
      const body = JSON.parse(String(init?.body)) as {
        model: string; features: Record<string, number>;
      };
      this.lastBody = body; // recorded at arrival, before any hold
      if (this.pendingDelay) await this.pendingDelay;
      if (this.down) throw new TypeError("fetch failed: connection reset");
      const manifest = MANIFESTS[body.model];
      if (!manifest) return json(404, { detail: `unknown model '${body.model}'` });
      const problems: string[] = [];
      for (const f of manifest) {
        if (!(f.name in body.features)) problems.push(`missing feature '${f.name}'`);
      }
      for (const name of Object.keys(body.features)) {
        if (!manifest.some((f) => f.name === name)) {
          problems.push(`unexpected feature '${name}'`);
        }
      }
      for (const [name, value] of Object.entries(body.features)) {
        if (Math.abs(value) > 1e6) {
          problems.push(`feature '${name}' is not finite: ${value}`);
        }
      }
      if (problems.length) return json(422, { detail: problems });

      const values = manifest.map((f) => body.features[f.name]);
      const contributions = manifest.map((f, i) => ({
        feature: f.name,
        value: values[i],
        shap: ((i % 2 === 0 ? 1 : -1) * (manifest.length - i)) / 20,
      }));
      const margin = contributions.reduce((acc, c) => acc + c.shap, -0.1);
      const probability = 1 / (1 + Math.exp(-margin));
      return json(200, {
        probability,
        label: probability >= 0.5 ? "positive" : "negative",
        threshold: 0.5,
        model_version: `${body.model}/abc123`,
        warnings: values.some((v) => v > 100) ? ["value above training range"] : [],
        explanation: {
          base_value: -0.1,
          predicted_margin: margin,
          space: "log-odds",
          contributions,
        },
      });
    }

    return json(404, { detail: "no such endpoint" });
  };
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
