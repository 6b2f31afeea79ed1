/** Client-side form validation mirroring the server's constraints.
 *
 * The server remains the authority (it re-validates and returns the full
 * violation list); this mirror only catches the obvious mistakes before a
 * request is sent, field by field.
 */

export interface FieldError {
  field: string;
  message: string;
}

export interface ExperimentForm {
  model_name: string;
  dataset: string;
  seed: string;
  epochs: string;
  batch_size: string;
  learning_rate: string;
  embedding_dim: string;
  attention_heads: string;
  history_len: string;
  title_len: string;
  negatives: string;
  [extra: string]: string;
}

const INT_FIELDS: Array<[keyof ExperimentForm & string, number]> = [
  ["seed", 0],
  ["epochs", 1],
  ["batch_size", 1],
  ["embedding_dim", 1],
  ["attention_heads", 1],
  ["history_len", 1],
  ["title_len", 1],
  ["negatives", 1],
];

function parseIntStrict(raw: string): number | null {
  if (!/^-?\d+$/.test(raw.trim())) return null;
  return Number.parseInt(raw.trim(), 10);
}

export function validateExperimentForm(form: ExperimentForm): FieldError[] {
  const errors: FieldError[] = [];
  if (!form.model_name) {
    errors.push({ field: "model_name", message: "required" });
  }
  if (!form.dataset) {
    errors.push({ field: "dataset", message: "required" });
  }
  const ints: Record<string, number> = {};
  for (const [field, minimum] of INT_FIELDS) {
    const raw = form[field] ?? "";
    if (raw.trim() === "") {
      errors.push({ field, message: "required" });
      continue;
    }
    const value = parseIntStrict(raw);
    if (value === null) {
      errors.push({ field, message: "must be an integer" });
    } else if (value < minimum) {
      errors.push({ field, message: `must be >= ${minimum}` });
    } else {
      ints[field] = value;
    }
  }
  const lr = Number(form.learning_rate);
  if (form.learning_rate.trim() === "" || Number.isNaN(lr)) {
    errors.push({ field: "learning_rate", message: "must be a number" });
  } else if (lr <= 0) {
    errors.push({ field: "learning_rate", message: "must be > 0" });
  }
  if (
    ints.embedding_dim !== undefined &&
    ints.attention_heads !== undefined &&
    ints.embedding_dim % ints.attention_heads !== 0
  ) {
    errors.push({
      field: "embedding_dim",
      message: `not divisible by attention_heads=${ints.attention_heads}`,
    });
  }
  return errors;
}

/** Map a server violation line ("key: problem") onto its form field. */
export function violationField(violation: string): string {
  const head = violation.split(":", 1)[0]?.trim() ?? "";
  return head.split(".")[0] || "form";
}

/** Build the job parameters from a validated form. */
export function formToJobParams(form: ExperimentForm): Record<string, unknown> {
  const overrides: Record<string, string> = {};
  for (const [field] of INT_FIELDS) {
    if (field !== "seed") overrides[field] = form[field];
  }
  overrides.learning_rate = form.learning_rate;
  return {
    model_name: form.model_name,
    dataset: form.dataset,
    seed: Number.parseInt(form.seed, 10),
    overrides,
  };
}
