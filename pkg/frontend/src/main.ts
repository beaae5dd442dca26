// DOM wiring for the single-page predictor form.

import { ApiClient, ApiError } from "./api";
import {
  FormState,
  canSubmit,
  fieldError,
  formatPrediction,
  initForm,
  setFieldValue,
  toFeatureMap,
} from "./form";

const api = new ApiClient(window.location.origin);

let state: FormState | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function renderBanner(message: string | null) {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = message ?? "";
  banner.style.display = message ? "block" : "none";
}

function renderResult() {
  if (!state) {
    return;
  }
  const result = el<HTMLDivElement>("result");
  if (state.error) {
    result.textContent = state.error;
    result.className = "error";
  } else if (state.prediction) {
    result.textContent = `Predicted build time: ${formatPrediction(state.prediction)}`;
    result.className = "prediction";
  } else {
    result.textContent = "";
    result.className = "";
  }
  el<HTMLButtonElement>("submit").disabled = !canSubmit(state);
}

function renderFields() {
  if (!state) {
    return;
  }
  const container = el<HTMLDivElement>("fields");
  container.innerHTML = "";
  for (const field of state.fields) {
    const row = document.createElement("div");
    row.className = "field";

    const label = document.createElement("label");
    label.textContent = field.label;
    label.htmlFor = `f_${field.name}`;

    const input = document.createElement("input");
    input.id = `f_${field.name}`;
    input.type = "text";
    input.inputMode = "decimal";
    input.value = field.raw;
    input.addEventListener("input", () => {
      if (!state) {
        return;
      }
      state = setFieldValue(state, field.name, input.value);
      const message = row.querySelector(".field-error") as HTMLElement;
      message.textContent = fieldError(input.value) ?? "";
      renderResult();
    });

    const message = document.createElement("span");
    message.className = "field-error";

    row.append(label, input, message);
    container.append(row);
  }
}

async function submit() {
  if (!state || !canSubmit(state)) {
    return;
  }
  state = { ...state, pending: true, error: null };
  renderResult();
  try {
    const prediction = await api.predict(toFeatureMap(state));
    if (prediction.schema_hash !== state.schemaHash) {
      renderBanner("model schema changed since the form loaded — reload the page");
    }
    state = { ...state, pending: false, prediction };
  } catch (error) {
    const message = error instanceof ApiError ? error.message : "service unreachable";
    state = { ...state, pending: false, error: message };
  }
  renderResult();
}

async function boot() {
  try {
    const schema = await api.getSchema();
    state = initForm(schema);
    renderBanner(null);
    renderFields();
    renderResult();
    el<HTMLButtonElement>("submit").addEventListener("click", (event) => {
      event.preventDefault();
      void submit();
    });
  } catch {
    renderBanner("prediction service unreachable — start it and reload");
    el<HTMLButtonElement>("submit").disabled = true;
  }
}

void boot();
