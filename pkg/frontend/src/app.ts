// Calculator wiring: model switcher, manifest-driven form, submit flow.
//
// The UI performs no model math; every number shown comes from a service
// response. At most one prediction request is in flight, and responses
// from superseded submissions are discarded.

import { ApiClient, ServiceUnreachableError, ValidationError, type FetchLike } from "./api.js";
import { renderShapBars } from "./bars.js";
import { getBaseUrl, setBaseUrl } from "./config.js";
import { FormState, riskBand, softRangeHint } from "./state.js";
import type { ModelManifest } from "./types.js";

export interface CalculatorOptions {
  baseUrl?: string;
  fetchFn?: FetchLike;
}

export class Calculator {
  private readonly doc: Document;
  private client: ApiClient;
  private readonly fetchFn: FetchLike;
  private baseUrl: string;
  private manifest: ModelManifest | null = null;
  private form: FormState = new FormState([]);
  private requestCounter = 0;

  private readonly banner: HTMLElement;
  private readonly modelSelect: HTMLSelectElement;
  private readonly formEl: HTMLElement;
  private readonly submitButton: HTMLButtonElement;
  private readonly resultEl: HTMLElement;

  constructor(root: HTMLElement, options: CalculatorOptions = {}) {
    this.doc = root.ownerDocument;
    this.baseUrl = options.baseUrl ?? getBaseUrl();
    this.fetchFn = options.fetchFn ?? fetch.bind(globalThis);
    this.client = new ApiClient(this.baseUrl, this.fetchFn);

    root.innerHTML = "";
    root.appendChild(this.buildDisclaimer());
    this.banner = this.doc.createElement("div");
    this.banner.className = "banner hidden";
    root.appendChild(this.banner);

    const controls = this.doc.createElement("div");
    controls.className = "controls";
    const label = this.doc.createElement("label");
    label.textContent = "Model: ";
    this.modelSelect = this.doc.createElement("select");
    this.modelSelect.id = "model-select";
    this.modelSelect.addEventListener("change", () => {
      void this.loadManifest(this.modelSelect.value);
    });
    label.appendChild(this.modelSelect);
    controls.appendChild(label);
    controls.appendChild(this.buildSettings());
    root.appendChild(controls);

    this.formEl = this.doc.createElement("form");
    this.formEl.id = "feature-form";
    this.formEl.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
    root.appendChild(this.formEl);

    this.submitButton = this.doc.createElement("button");
    this.submitButton.type = "submit";
    this.submitButton.id = "submit";
    this.submitButton.textContent = "Estimate risk";
    this.submitButton.disabled = true;
    this.formEl.appendChild(this.submitButton);

    this.resultEl = this.doc.createElement("section");
    this.resultEl.id = "result";
    root.appendChild(this.resultEl);
  }

  private buildDisclaimer(): HTMLElement {
    const disclaimer = this.doc.createElement("p");
    disclaimer.className = "disclaimer";
    disclaimer.textContent =
      "Research use only. This calculator is not a medical device and must " +
      "not be used for clinical decisions. Entered values leave the browser " +
      "only toward the configured service endpoint and are not stored.";
    return disclaimer;
  }

  private buildSettings(): HTMLElement {
    const wrap = this.doc.createElement("label");
    wrap.className = "settings";
    wrap.textContent = "Service URL: ";
    const input = this.doc.createElement("input");
    input.type = "text";
    input.id = "base-url";
    input.value = this.baseUrl;
    input.addEventListener("change", () => {
      this.baseUrl = input.value.replace(/\/+$/, "");
      setBaseUrl(this.baseUrl);
      this.client = new ApiClient(this.baseUrl, this.fetchFn);
      void this.start();
    });
    wrap.appendChild(input);
    return wrap;
  }

  private showBanner(text: string, retry: () => void): void {
    this.banner.innerHTML = "";
    this.banner.className = "banner error";
    const span = this.doc.createElement("span");
    span.textContent = text;
    this.banner.appendChild(span);
    const button = this.doc.createElement("button");
    button.type = "button";
    button.className = "retry";
    button.textContent = "Retry";
    button.addEventListener("click", retry);
    this.banner.appendChild(button);
  }

  private clearBanner(): void {
    this.banner.className = "banner hidden";
    this.banner.innerHTML = "";
  }

  async start(): Promise<void> {
    try {
      const models = await this.client.listModels();
      this.clearBanner();
      this.modelSelect.innerHTML = "";
      for (const model of models) {
        const option = this.doc.createElement("option");
        option.value = model.id;
        option.textContent = `${model.id} (${model.feature_count} features)`;
        this.modelSelect.appendChild(option);
      }
      const preferred =
        models.find((m) => m.id.endsWith("_reduced"))?.id ?? models[0]?.id;
      if (preferred) {
        this.modelSelect.value = preferred;
        await this.loadManifest(preferred);
      }
    } catch (error) {
      this.showBanner(
        `Cannot reach the triage service at ${this.baseUrl}.`,
        () => void this.start(),
      );
    }
  }

  async loadManifest(modelId: string): Promise<void> {
    try {
      const manifest = await this.client.manifest(modelId);
      this.clearBanner();
      this.manifest = manifest;
      this.form = this.form.carryOverInto(manifest.features);
      this.renderForm();
    } catch (error) {
      this.showBanner(
        `Cannot load the ${modelId} manifest.`,
        () => void this.loadManifest(modelId),
      );
    }
  }

  private renderForm(): void {
    const manifest = this.manifest;
    if (!manifest) return;
    for (const row of Array.from(this.formEl.querySelectorAll(".field-row"))) {
      row.remove();
    }
    for (const feature of manifest.features) {
      const row = this.doc.createElement("div");
      row.className = "field-row";
      row.dataset.feature = feature.name;

      const label = this.doc.createElement("label");
      label.htmlFor = `field-${feature.name}`;
      label.textContent = feature.unit
        ? `${feature.display} (${feature.unit})`
        : feature.display;
      row.appendChild(label);

      const input = this.doc.createElement("input");
      input.type = "text";
      input.inputMode = "decimal";
      input.id = `field-${feature.name}`;
      input.name = feature.name;
      input.value = this.form.rawValue(feature.name);
      input.addEventListener("input", () => {
        this.form.setValue(feature.name, input.value);
        this.refreshField(feature.name);
        this.submitButton.disabled = !this.form.canSubmit();
      });
      row.appendChild(input);

      const message = this.doc.createElement("span");
      message.className = "field-message";
      row.appendChild(message);

      this.formEl.insertBefore(row, this.submitButton);
      this.refreshField(feature.name);
    }
    this.submitButton.disabled = !this.form.canSubmit();
    this.resultEl.innerHTML = "";
  }

  private refreshField(name: string, serverMessage?: string): void {
    const manifest = this.manifest;
    if (!manifest) return;
    const row = this.formEl.querySelector<HTMLElement>(
      `.field-row[data-feature="${name}"]`,
    );
    const feature = manifest.features.find((f) => f.name === name);
    if (!row || !feature) return;
    const message = row.querySelector<HTMLElement>(".field-message")!;
    const raw = this.form.rawValue(name);
    const error = serverMessage ?? (raw.trim() === "" ? null : this.form.errorFor(name));
    if (error) {
      row.classList.add("invalid");
      message.textContent = error;
    } else {
      row.classList.remove("invalid");
      message.textContent = softRangeHint(feature, raw) ?? "";
    }
  }

  async submit(): Promise<void> {
    const manifest = this.manifest;
    if (!manifest || !this.form.canSubmit()) return;
    const requestId = ++this.requestCounter;
    this.submitButton.disabled = true;
    try {
      const response = await this.client.predict(
        manifest.id, this.form.numericValues(),
      );
      if (requestId !== this.requestCounter) return; // superseded submission
      this.clearBanner();
      this.renderResult(response);
    } catch (error) {
      if (requestId !== this.requestCounter) return;
      if (error instanceof ValidationError) {
        this.mapServerMessages(error.messages);
      } else if (error instanceof ServiceUnreachableError) {
        this.showBanner(
          `The triage service stopped responding. Your entries are kept.`,
          () => void this.submit(),
        );
      } else {
        this.showBanner("The service reported an error.", () => void this.submit());
      }
    } finally {
      if (requestId === this.requestCounter) {
        this.submitButton.disabled = !this.form.canSubmit();
      }
    }
  }

  private mapServerMessages(messages: string[]): void {
    const manifest = this.manifest;
    if (!manifest) return;
    const unmatched: string[] = [];
    for (const message of messages) {
      const feature = manifest.features.find((f) => message.includes(`'${f.name}'`));
      if (feature) {
        this.refreshField(feature.name, message);
      } else {
        unmatched.push(message);
      }
    }
    if (unmatched.length) {
      this.showBanner(unmatched.join("; "), () => void this.submit());
    }
  }

  private renderResult(response: import("./types.js").PredictResponse): void {
    this.resultEl.innerHTML = "";
    const manifest = this.manifest!;

    const headline = this.doc.createElement("h2");
    headline.id = "probability";
    headline.textContent = `${(response.probability * 100).toFixed(1)}%`;
    this.resultEl.appendChild(headline);

    const band = riskBand(response.probability);
    const summary = this.doc.createElement("p");
    summary.id = "triage-label";
    summary.className = `band-${band}`;
    const positives = manifest.task === "severity" ? "severe course" : "mortality";
    summary.textContent =
      `${band} risk band (UI convention) — model ${manifest.id} calls this ` +
      `${response.label} for ${positives} at threshold ${response.threshold}.`;
    this.resultEl.appendChild(summary);

    for (const warning of response.warnings) {
      const line = this.doc.createElement("p");
      line.className = "warning";
      line.textContent = `Check input: ${warning}`;
      this.resultEl.appendChild(line);
    }

    if (response.explanation) {
      const heading = this.doc.createElement("h3");
      heading.textContent = "Per-feature contributions (SHAP)";
      this.resultEl.appendChild(heading);
      this.resultEl.appendChild(renderShapBars(this.doc, response.explanation));
    }
  }
}

export function createCalculator(
  root: HTMLElement, options: CalculatorOptions = {},
): Calculator {
  return new Calculator(root, options);
}
