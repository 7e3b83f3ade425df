/** Page wiring: reads inputs, drives the controller, binds the display.
 * Service base URL and model id come from query parameters
 * (?service=http://host:port&model=<id>), defaulting to the page origin. */

import { RomServiceClient } from "./api.js";
import { ConsoleController } from "./controller.js";
import { DomDisplay } from "./view.js";

function numberInput(id: string): number {
  const node = document.getElementById(id) as HTMLInputElement;
  return Number(node.value);
}

async function boot(): Promise<void> {
  const query = new URLSearchParams(window.location.search);
  const base = query.get("service") ?? window.location.origin;
  const client = new RomServiceClient(base);
  const display = new DomDisplay();
  const modelId = query.get("model") ?? undefined;
  const controller = new ConsoleController(client, display, { modelId });

  document.getElementById("panel1-run")?.addEventListener("click", () => {
    void controller.panel1Submit(numberInput("panel1-head"), numberInput("panel1-omega"));
  });
  document.getElementById("panel2-calibrate")?.addEventListener("click", () => {
    void controller.panel2Calibrate(numberInput("panel2-omega"), numberInput("panel2-pf"));
  });
  document.getElementById("panel2-predict")?.addEventListener("click", () => {
    void controller.panel2Predict(numberInput("panel2-omega-new"));
  });

  const slider = document.getElementById("omega-slider") as HTMLInputElement;
  const sliderLabel = document.getElementById("omega-slider-value") as HTMLSpanElement;
  slider.addEventListener("input", () => {
    sliderLabel.textContent = `${slider.value} rpm`;
    controller.omegaChanged(Number(slider.value));
  });

  document.querySelectorAll<HTMLButtonElement>("[data-panel]").forEach((button) => {
    button.addEventListener("click", () => {
      controller.selectPanel(Number(button.dataset.panel) as 1 | 2);
    });
  });

  const fieldSelect = document.getElementById("field-select") as HTMLSelectElement;
  fieldSelect.addEventListener("change", () => controller.selectField(fieldSelect.value));
  if (modelId) {
    try {
      const metadata = await client.modelMetadata(modelId);
      fieldSelect.replaceChildren(
        ...Object.keys(metadata.fields).map((label) => {
          const option = document.createElement("option");
          option.value = label;
          option.textContent = label;
          return option;
        }),
      );
      if (fieldSelect.options.length > 0) {
        controller.selectField(fieldSelect.value);
      }
    } catch {
      // field list stays empty; pump panels keep working
    }
  }

  controller.refreshCurve(Number(slider.value));
}

void boot();
