// Horizontal signed bar chart for per-feature SHAP contributions,
// rendered with plain positioned divs so no chart library is needed.

import type { Explanation } from "./types.js";

export function renderShapBars(doc: Document, explanation: Explanation): HTMLElement {
  const wrap = doc.createElement("div");
  wrap.className = "shap-chart";

  const sorted = [...explanation.contributions].sort(
    (a, b) => Math.abs(b.shap) - Math.abs(a.shap),
  );
  const maxAbs = Math.max(1e-12, ...sorted.map((c) => Math.abs(c.shap)));

  for (const item of sorted) {
    const row = doc.createElement("div");
    row.className = "shap-row";

    const label = doc.createElement("span");
    label.className = "shap-label";
    label.textContent = `${item.feature} = ${item.value}`;
    row.appendChild(label);

    const track = doc.createElement("div");
    track.className = "shap-track";
    const bar = doc.createElement("div");
    bar.className = item.shap >= 0 ? "shap-bar positive" : "shap-bar negative";
    const half = 50 * (Math.abs(item.shap) / maxAbs);
    bar.style.width = `${half.toFixed(2)}%`;
    bar.style.left = item.shap >= 0 ? "50%" : `${(50 - half).toFixed(2)}%`;
    bar.title = `${item.feature}: ${item.shap.toFixed(4)} (log-odds)`;
    track.appendChild(bar);
    row.appendChild(track);

    const amount = doc.createElement("span");
    amount.className = "shap-amount";
    amount.textContent = item.shap.toFixed(3);
    row.appendChild(amount);

    wrap.appendChild(row);
  }

  const note = doc.createElement("p");
  note.className = "shap-note";
  note.textContent =
    `Contributions are in log-odds space; base value ` +
    `${explanation.base_value.toFixed(4)} plus the bars equals the ` +
    `prediction margin ${explanation.predicted_margin.toFixed(4)}.`;
  wrap.appendChild(note);
  return wrap;
}
