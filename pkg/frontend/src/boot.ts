// Page entry point: mount the calculator and load the model list.

import { createCalculator } from "./app.js";

const root = document.getElementById("app");
if (root) {
  void createCalculator(root).start();
}
