"""Prompt templates for the three pipeline stages.

Rendered prompts are pure functions of their inputs and are golden-file
tested, so any wording change here must update the fixtures under
``tests/fixtures/golden/``.
"""

from dataclasses import dataclass

GROUNDED_ANSWER_WORD_CAP = 160

REFORMULATION_INSTRUCTIONS = (
    "You are a scholarly search assistant. Rewrite the user's question as a search query.\n"
    "- Identify the key terms within the question\n"
    "- Enrich with close synonyms\n"
    "- Formulate this into a search query.\n"
    "Reply with the search query only. Join interchangeable terms with OR."
)

GROUNDING_INSTRUCTIONS = (
    "Generate a comprehensive answer to the following question (but no more than "
    "160 words) solely based on the content provided. List the link to each paper "
    "you cite on its own line at the end of the answer."
)

QUESTION_GENERATION_INSTRUCTIONS = (
    "write a graduate level research question in the following domain, "
    "only reply with the body of the question itself:"
)


@dataclass(frozen=True)
class PromptTemplate:
    role_instructions: str
    user_payload: str
    max_answer_words: int | None = None

    def render(self) -> str:
        """Full prompt text; always contains the user payload verbatim."""
        return f"{self.role_instructions}\n\n{self.user_payload}\n"


def build_reformulation_prompt(question: str) -> PromptTemplate:
    """Stage 1: turn a question into a search query."""
    question = question.strip()
    if not question:
        raise ValueError("question must be non-empty")
    return PromptTemplate(
        role_instructions=REFORMULATION_INSTRUCTIONS,
        user_payload=f"Question: {question}",
    )


def build_grounded_answer_prompt(
    question: str,
    evidence: list[tuple[str, str, str]],
    max_words: int = GROUNDED_ANSWER_WORD_CAP,
) -> PromptTemplate:
    """Stage 3: answer from the supplied (title, abstract, url) evidence.

    Raises ValueError for an empty evidence list; callers must route that
    case to the insufficient-evidence path instead of prompting.
    """
    question = question.strip()
    if not question:
        raise ValueError("question must be non-empty")
    if not 1 <= len(evidence) <= 5:
        raise ValueError(f"evidence must contain 1..5 items, got {len(evidence)}")
    blocks = []
    for i, (title, abstract, url) in enumerate(evidence, 1):
        lines = [f"{i}. Title: {title}"]
        if abstract.strip():
            lines.append(f"Abstract: {abstract}")
        lines.append(f"Link: {url}")
        blocks.append("\n".join(lines))
    payload = f"Question: {question}\n\nEvidence:\n\n" + "\n\n".join(blocks)
    return PromptTemplate(
        role_instructions=GROUNDING_INSTRUCTIONS,
        user_payload=payload,
        max_answer_words=max_words,
    )


def build_question_generation_prompt(domain: str) -> PromptTemplate:
    """Produce one research question for a subject domain."""
    domain = domain.strip()
    if not domain:
        raise ValueError("domain must be non-empty")
    return PromptTemplate(
        role_instructions=QUESTION_GENERATION_INSTRUCTIONS,
        user_payload=domain,
    )
