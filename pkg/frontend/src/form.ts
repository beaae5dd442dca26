// Form state and validation for the predictor form. Pure functions so
// the logic is testable without a DOM; main.ts does the wiring.

import { PredictionResponse, SchemaResponse } from "./api";

export interface FieldState {
  name: string;
  label: string;
  raw: string;          // what the user typed
  defaultValue: number; // training mean from the schema endpoint
  error: string | null;
}

export interface FormState {
  fields: FieldState[];
  schemaHash: string;
  pending: boolean;
  prediction: PredictionResponse | null;
  error: string | null;
}

const LABELS: Record<string, string> = {
  gh_team_size: "Team size",
  gh_src_churn: "Production lines changed",
  gh_test_churn: "Test lines changed",
  gh_files_added: "Files added",
  gh_files_deleted: "Files deleted",
  gh_files_modified: "Files modified",
  tr_num_jobs: "Number of jobs",
};

function labelFor(name: string): string {
  return LABELS[name] ?? name;
}

/** null unless the string parses as a finite non-negative number. */
export function parseFieldValue(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") {
    return null;
  }
  const value = Number(trimmed);
  if (!Number.isFinite(value) || value < 0) {
    return null;
  }
  return value;
}

export function fieldError(raw: string): string | null {
  if (parseFieldValue(raw) === null) {
    return "enter a non-negative number";
  }
  return null;
}

export function initForm(schema: SchemaResponse): FormState {
  const fields = schema.foreground.map((name) => {
    const mean = schema.training_means[name] ?? 0;
    return {
      name,
      label: labelFor(name),
      raw: String(mean),
      defaultValue: mean,
      error: null,
    };
  });
  return {
    fields,
    schemaHash: schema.schema_hash,
    pending: false,
    prediction: null,
    error: null,
  };
}

export function setFieldValue(state: FormState, name: string, raw: string): FormState {
  const fields = state.fields.map((field) =>
    field.name === name ? { ...field, raw, error: fieldError(raw) } : field
  );
  return { ...state, fields };
}

/** Submit is allowed only when every field is valid and nothing is in flight. */
export function canSubmit(state: FormState): boolean {
  if (state.pending) {
    return false;
  }
  return state.fields.every((field) => parseFieldValue(field.raw) !== null);
}

/** The feature map a submit sends; only fields the user changed from the
 * training mean are included, so untouched fields fall back to server-side
 * mean imputation exactly like the hidden features. */
export function toFeatureMap(state: FormState): Record<string, number> {
  const features: Record<string, number> = {};
  for (const field of state.fields) {
    const value = parseFieldValue(field.raw);
    if (value !== null && value !== field.defaultValue) {
      features[field.name] = value;
    }
  }
  return features;
}

/** Seconds to one decimal plus the service's humanized rendering. */
export function formatPrediction(prediction: PredictionResponse): string {
  return `${prediction.predicted_seconds.toFixed(1)} s (${prediction.rendered})`;
}
