// Pure view-state logic, kept free of DOM so it unit-tests directly.

import type { AnswerSummary, Scores } from "./api.js";

export const SCORE_FIELDS = [
  "comprehensiveness",
  "trust",
  "utility",
  "cite1",
  "cite2",
  "cite3",
  "cite4",
  "cite5",
] as const;

export type ScoreField = (typeof SCORE_FIELDS)[number];

export type AnnotationForm = Partial<Record<ScoreField, number>>;

/** Clamp any raw input into an integer score in [0, 10]. */
export function clampScore(raw: number): number {
  if (Number.isNaN(raw)) return 0;
  return Math.min(10, Math.max(0, Math.round(raw)));
}

export function setScore(
  form: AnnotationForm,
  field: ScoreField,
  raw: number,
): AnnotationForm {
  return { ...form, [field]: clampScore(raw) };
}

/** Submission stays blocked until every one of the eight scores is set. */
export function isComplete(form: AnnotationForm): boolean {
  return SCORE_FIELDS.every((field) => typeof form[field] === "number");
}

export function toScores(form: AnnotationForm): Scores {
  if (!isComplete(form)) {
    throw new Error("annotation form incomplete");
  }
  return {
    comprehensiveness: form.comprehensiveness!,
    trust: form.trust!,
    utility: form.utility!,
    cite: [form.cite1!, form.cite2!, form.cite3!, form.cite4!, form.cite5!],
  };
}

export interface QueueState {
  ids: string[];
  position: number; // index of the answer being annotated
  submitted: number; // how many annotations this session posted
}

/** Deterministic queue: answers sorted by answer_id. */
export function buildQueue(summaries: AnswerSummary[]): QueueState {
  const ids = summaries.map((s) => s.answer_id).sort();
  return { ids, position: 0, submitted: 0 };
}

export function currentId(state: QueueState): string | null {
  return state.position < state.ids.length ? state.ids[state.position] : null;
}

export function advance(state: QueueState): QueueState {
  return {
    ...state,
    position: Math.min(state.position + 1, state.ids.length),
    submitted: state.submitted + 1,
  };
}

export function isDone(state: QueueState): boolean {
  return state.position >= state.ids.length;
}
