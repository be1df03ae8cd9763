from .prompts import (
    GROUNDED_ANSWER_WORD_CAP,
    PromptTemplate,
    build_grounded_answer_prompt,
    build_question_generation_prompt,
    build_reformulation_prompt,
)
from .providers import (
    CompletionProvider,
    CompletionRequest,
    CompletionResponse,
    OpenAICompatProvider,
    ProviderError,
    ProviderRegistry,
    RateLimitError,
    UnknownProviderError,
    default_registry,
    derive_seed,
)
from .stub import HEDGE_ANSWER, QUESTION_FORMS, StubProvider, content_terms

__all__ = [
    "GROUNDED_ANSWER_WORD_CAP",
    "HEDGE_ANSWER",
    "QUESTION_FORMS",
    "CompletionProvider",
    "CompletionRequest",
    "CompletionResponse",
    "OpenAICompatProvider",
    "PromptTemplate",
    "ProviderError",
    "ProviderRegistry",
    "RateLimitError",
    "StubProvider",
    "UnknownProviderError",
    "build_grounded_answer_prompt",
    "build_question_generation_prompt",
    "build_reformulation_prompt",
    "content_terms",
    "default_registry",
    "derive_seed",
]
