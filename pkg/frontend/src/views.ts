// DOM rendering for the two routes. Citation links are taken verbatim
// from API payloads; nothing here constructs or rewrites a url.

import type { AskResponse, Citation, ScholarQAClient } from "./api.js";
import { ApiError } from "./api.js";
import {
  AnnotationForm,
  SCORE_FIELDS,
  ScoreField,
  advance,
  buildQueue,
  currentId,
  isComplete,
  isDone,
  QueueState,
  setScore,
  toScores,
} from "./state.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function renderCitationCard(citation: Citation): HTMLElement {
  const card = el("article", "citation-card");
  card.appendChild(el("h3", "citation-title", citation.title));
  if (citation.abstract) {
    const abstract = el("p", "citation-abstract clamped", citation.abstract);
    const toggle = el("button", "abstract-toggle", "more");
    toggle.type = "button";
    toggle.addEventListener("click", () => {
      const collapsed = abstract.classList.toggle("clamped");
      toggle.textContent = collapsed ? "more" : "less";
    });
    card.appendChild(abstract);
    card.appendChild(toggle);
  }
  const link = el("a", "citation-link", citation.url);
  link.href = citation.url;
  link.target = "_blank";
  link.rel = "noopener";
  card.appendChild(link);
  return card;
}

export function renderAnswerPanel(response: AskResponse): HTMLElement {
  const panel = el("section", "answer-panel");
  if (response.insufficient_evidence) {
    panel.appendChild(
      el(
        "div",
        "insufficiency-banner",
        "The corpus does not offer enough evidence to answer this question.",
      ),
    );
  }
  const text = el("div", "answer-text");
  for (const line of response.answer_text.split("\n")) {
    if (/^https?:\/\//.test(line.trim())) continue; // links render as cards
    if (line.trim()) text.appendChild(el("p", "", line));
  }
  panel.appendChild(text);
  const cards = el("div", "citation-cards");
  for (const citation of response.citations) {
    cards.appendChild(renderCitationCard(citation));
  }
  panel.appendChild(cards);
  return panel;
}

function errorToast(message: string, onRetry: () => void): HTMLElement {
  const toast = el("div", "error-toast", message + " ");
  const retry = el("button", "retry-button", "retry");
  retry.type = "button";
  retry.addEventListener("click", onRetry);
  toast.appendChild(retry);
  return toast;
}

export function renderAskView(root: HTMLElement, client: ScholarQAClient): void {
  root.replaceChildren();
  const form = el("form", "ask-form");
  const input = el("input", "question-input") as HTMLInputElement;
  input.placeholder = "Ask a research question…";
  input.maxLength = 1000;
  const submit = el("button", "submit-question", "Ask") as HTMLButtonElement;
  submit.type = "submit";
  submit.disabled = true;
  const output = el("div", "ask-output");
  form.appendChild(input);
  form.appendChild(submit);
  root.appendChild(form);
  root.appendChild(output);

  let pending = false;
  const refresh = () => {
    submit.disabled = pending || input.value.trim().length === 0;
  };
  input.addEventListener("input", refresh);

  const submitQuestion = async () => {
    if (pending || input.value.trim().length === 0) return;
    pending = true;
    refresh();
    submit.textContent = "Asking…";
    try {
      const response = await client.ask(input.value.trim());
      output.replaceChildren(renderAnswerPanel(response));
    } catch (err) {
      const message = err instanceof ApiError ? err.message : "request failed";
      output.replaceChildren(errorToast(message, submitQuestion));
    } finally {
      pending = false;
      submit.textContent = "Ask";
      refresh();
    }
  };
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void submitQuestion();
  });
}

const FIELD_LABELS: Record<ScoreField, string> = {
  comprehensiveness: "Comprehensiveness",
  trust: "Trust",
  utility: "Utility",
  cite1: "Citation 1 relevance",
  cite2: "Citation 2 relevance",
  cite3: "Citation 3 relevance",
  cite4: "Citation 4 relevance",
  cite5: "Citation 5 relevance",
};

export function renderAnnotateView(
  root: HTMLElement,
  client: ScholarQAClient,
  storage: Pick<Storage, "getItem" | "setItem"> = localStorage,
): Promise<void> {
  root.replaceChildren();
  const header = el("div", "annotate-header");
  const annotatorInput = el("input", "annotator-id") as HTMLInputElement;
  annotatorInput.placeholder = "annotator id";
  annotatorInput.value = storage.getItem("annotator_id") ?? "";
  annotatorInput.addEventListener("input", () => {
    storage.setItem("annotator_id", annotatorInput.value.trim());
  });
  header.appendChild(el("label", "", "Annotator: "));
  header.appendChild(annotatorInput);
  root.appendChild(header);
  const body = el("div", "annotate-body");
  root.appendChild(body);

  const showSummary = (queue: QueueState) => {
    const summary = el("div", "queue-summary");
    summary.appendChild(el("h2", "", "All done"));
    summary.appendChild(
      el(
        "p",
        "summary-counts",
        `Submitted ${queue.submitted} of ${queue.ids.length} annotations this session.`,
      ),
    );
    body.replaceChildren(summary);
  };

  const showCurrent = async (queue: QueueState): Promise<void> => {
    const answerId = currentId(queue);
    if (answerId === null) {
      showSummary(queue);
      return;
    }
    const answer = await client.getAnswer(answerId);
    const panel = el("section", "annotate-panel");
    panel.appendChild(
      el("div", "queue-progress", `Answer ${queue.position + 1} of ${queue.ids.length}`),
    );
    panel.appendChild(el("h2", "annotate-question", answer.question));
    panel.appendChild(renderAnswerPanel(answer));

    let form: AnnotationForm = {};
    const submit = el("button", "submit-annotation", "Submit scores") as HTMLButtonElement;
    submit.type = "button";
    submit.disabled = true;
    const problem = el("div", "annotate-error");

    const grid = el("div", "score-grid");
    for (const field of SCORE_FIELDS) {
      const row = el("label", "score-row", FIELD_LABELS[field] + " ");
      const input = el("input", `score-input score-${field}`) as HTMLInputElement;
      input.type = "number";
      input.min = "0";
      input.max = "10";
      input.step = "1";
      input.addEventListener("input", () => {
        if (input.value === "") {
          const { [field]: _, ...rest } = form;
          form = rest;
        } else {
          form = setScore(form, field, Number(input.value));
          input.value = String(form[field]);
        }
        submit.disabled = !(isComplete(form) && annotatorInput.value.trim());
      });
      row.appendChild(input);
      grid.appendChild(row);
    }
    panel.appendChild(grid);
    panel.appendChild(submit);
    panel.appendChild(problem);

    submit.addEventListener("click", async () => {
      if (!isComplete(form)) return;
      submit.disabled = true;
      try {
        await client.postAnnotation(answerId, annotatorInput.value.trim(), toScores(form));
        await showCurrent(advance(queue));
      } catch (err) {
        problem.textContent =
          err instanceof ApiError ? err.message : "submission failed";
        submit.disabled = false;
      }
    });

    body.replaceChildren(panel);
  };

  return client
    .listAnswers()
    .then((summaries) => {
      const queue = buildQueue(summaries);
      if (isDone(queue)) {
        body.replaceChildren(
          el("p", "queue-empty", "Nothing to annotate yet; ask some questions first."),
        );
        return;
      }
      return showCurrent(queue);
    })
    .catch((err) => {
      body.replaceChildren(
        el(
          "div",
          "error-toast",
          err instanceof ApiError ? err.message : "failed to load the answer queue",
        ),
      );
    });
}
