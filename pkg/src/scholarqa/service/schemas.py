"""Request/response models for the versioned HTTP API.

Field names here are the API reference: they are stable and mirrored by
the web frontend's TypeScript types.
"""

from pydantic import BaseModel, Field

MAX_QUESTION_CHARS = 1000


class AskRequest(BaseModel):
    question: str
    domain: str | None = None


class CitationPayload(BaseModel):
    paper_id: str
    title: str
    url: str
    abstract: str = ""


class AskResponse(BaseModel):
    answer_id: str
    question: str
    domain: str = ""
    answer_text: str
    citations: list[CitationPayload]
    insufficient_evidence: bool
    notes: list[str] = []


class PaperPayload(BaseModel):
    id: str
    title: str
    authors: list[str]
    abstract: str
    full_text_available: bool
    url: str
    year: int
    domain: str


class ScorePayload(BaseModel):
    comprehensiveness: int = Field(ge=0, le=10)
    trust: int = Field(ge=0, le=10)
    utility: int = Field(ge=0, le=10)
    cite: list[int] = Field(min_length=5, max_length=5)


class AnnotationRequest(BaseModel):
    answer_id: str
    annotator_id: str
    scores: ScorePayload


class AnnotationResponse(BaseModel):
    answer_id: str
    annotator_id: str
    scores: ScorePayload
    replaces_prior: bool = False


class AnswerSummary(BaseModel):
    answer_id: str
    question: str
    domain: str = ""
    insufficient_evidence: bool


class AgreementPayload(BaseModel):
    kappas: dict[str, float]
    n_pairs: int
    annotators: list[str]
    degenerate: list[str] = []


class QualityRowPayload(BaseModel):
    domain: str
    comprehensiveness: float
    trust: float
    utility: float
    mean: float


class CitationRowPayload(BaseModel):
    domain: str
    cites: list[float]
    mean: float


class DomainsReportPayload(BaseModel):
    source: str
    quality: list[QualityRowPayload]
    citations: list[CitationRowPayload]


class RankCurvePayload(BaseModel):
    means: list[float]
    non_increasing: bool


class CorrelationPayload(BaseModel):
    name: str
    n: int
    r: float


class CitationsReportPayload(BaseModel):
    source: str
    citations: list[CitationRowPayload]
    rank_curve: RankCurvePayload
    correlations: list[CorrelationPayload]
    skipped: list[str] = []


class AuditRowPayload(BaseModel):
    answer_id: str
    verdicts: list[str | None]


class AuditReportPayload(BaseModel):
    rows: list[AuditRowPayload]
    rates: dict[str, float]
    total_claims: int
    text_grid: str


class HealthPayload(BaseModel):
    status: str
    document_count: int | None = None
    answers: int
    annotations: int
