"""HTTP service tying together retrieval, answering, and evaluation.

All endpoints live under ``/v1``. Answers are persisted with their full
retrieval context so annotation and reporting are self-contained; a
repeated question replays the stored answer (idempotent by answer id).
"""

from collections import Counter
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware

from .. import evaluation
from ..corpus import CorpusIndex, RetrievalBackend, load_index
from ..gateway import (
    OpenAICompatProvider,
    ProviderError,
    ProviderRegistry,
    default_registry,
)
from ..pipeline import GroundedAnswer, PipelineError, answer_question
from ..remote import RemoteSearchClient
from ..verifier import ClaimedCitation, audit_answers, render_dot_grid
from .config import ServiceConfig, load_config
from .schemas import (
    AgreementPayload,
    AnnotationRequest,
    AnnotationResponse,
    AnswerSummary,
    AskRequest,
    AskResponse,
    AuditReportPayload,
    AuditRowPayload,
    CitationPayload,
    CitationRowPayload,
    CitationsReportPayload,
    CorrelationPayload,
    DomainsReportPayload,
    HealthPayload,
    MAX_QUESTION_CHARS,
    PaperPayload,
    QualityRowPayload,
    RankCurvePayload,
    ScorePayload,
)
from .store import AnnotationStore, AnswerStore, StoredAnswer


def build_backend(config: ServiceConfig) -> RetrievalBackend:
    if config.corpus_path is not None:
        return load_index(config.corpus_path)
    return RemoteSearchClient(
        base_url=config.remote.base_url,
        api_key_env=config.remote.api_key_env,
        max_retries=config.remote.max_retries,
    )


def build_registry(config: ServiceConfig) -> ProviderRegistry:
    registry = default_registry()
    for spec in config.providers:
        registry.register(
            OpenAICompatProvider(
                name=spec.name,
                base_url=spec.base_url,
                model=spec.model,
                api_key_env=spec.api_key_env,
                max_in_flight=spec.max_in_flight,
            )
        )
    return registry


def _infer_domain(answer: GroundedAnswer, backend: RetrievalBackend) -> str:
    """Majority domain among the retrieved papers; first hit breaks ties."""
    domains = []
    for hit in answer.retrieval.hits:
        record = backend.get(hit.paper_id)
        if record and record.domain:
            domains.append(record.domain)
    if not domains:
        return ""
    counts = Counter(domains)
    best = max(counts.values())
    for domain in domains:
        if counts[domain] == best:
            return domain
    return domains[0]


def create_app(config: ServiceConfig | str | Path) -> FastAPI:
    if isinstance(config, (str, Path)):
        config = load_config(config)
    config.validate()

    backend = build_backend(config)
    registry = build_registry(config)
    answers = AnswerStore(config.data_dir / "answers.log")
    annotations = AnnotationStore(config.data_dir / "annotations.log")

    app = FastAPI(title="scholarqa", version="1.0")
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def ask_response(stored: StoredAnswer) -> AskResponse:
        citations = []
        for citation in stored.answer.citations:
            record = backend.get(citation.paper_id)
            citations.append(
                CitationPayload(
                    paper_id=citation.paper_id,
                    title=citation.title,
                    url=citation.url,
                    abstract=record.abstract if record else "",
                )
            )
        return AskResponse(
            answer_id=stored.answer_id,
            question=stored.answer.question,
            domain=stored.domain,
            answer_text=stored.answer.answer_text,
            citations=citations,
            insufficient_evidence=stored.answer.insufficient_evidence,
            notes=list(stored.answer.notes),
        )

    def annotation_records() -> list[evaluation.AnnotationRecord]:
        records = []
        for obj in annotations.all_latest():
            stored = answers.get(obj["answer_id"])
            records.append(
                evaluation.AnnotationRecord(
                    question_id=obj["answer_id"],
                    annotator_id=obj["annotator_id"],
                    domain=stored.domain if stored else "",
                    comprehensiveness=obj["scores"]["comprehensiveness"],
                    trust=obj["scores"]["trust"],
                    utility=obj["scores"]["utility"],
                    cite_relevance=tuple(obj["scores"]["cite"]),
                )
            )
        return records

    def score_table(source: str) -> evaluation.DomainScoreTable:
        if source == "reference":
            return evaluation.load_reference_tables()
        records = annotation_records()
        if not records:
            raise HTTPException(409, "no stored annotations; annotate answers first")
        try:
            return evaluation.domain_means(records)
        except evaluation.InsufficientDataError as exc:
            raise HTTPException(409, str(exc)) from exc

    @app.get("/v1/healthz", response_model=HealthPayload)
    def healthz():
        count = len(backend) if isinstance(backend, CorpusIndex) else None
        return HealthPayload(
            status="ok",
            document_count=count,
            answers=len(answers),
            annotations=len(annotations.all_latest()),
        )

    @app.post("/v1/ask", response_model=AskResponse)
    def ask(request: AskRequest):
        question = request.question.strip()
        if not question:
            raise HTTPException(400, "question must be non-empty")
        if len(question) > MAX_QUESTION_CHARS:
            raise HTTPException(
                400, f"question exceeds {MAX_QUESTION_CHARS} characters"
            )
        try:
            provider = registry.get(config.provider)
            answer = answer_question(
                question,
                backend,
                provider,
                score_floor=config.score_floor,
                insufficiency_patterns=config.insufficiency_patterns,
            )
        except PipelineError as exc:
            if exc.stage == "retrieve":
                raise HTTPException(503, f"retrieval backend unavailable: {exc}") from exc
            raise HTTPException(502, f"provider failure: {exc}") from exc
        except ProviderError as exc:
            raise HTTPException(502, f"provider failure: {exc}") from exc
        domain = request.domain or _infer_domain(answer, backend)
        stored = answers.add(
            StoredAnswer(answer_id=answer.question_id, domain=domain, answer=answer)
        )
        return ask_response(stored)

    @app.get("/v1/answers", response_model=list[AnswerSummary])
    def list_answers():
        return [
            AnswerSummary(
                answer_id=s.answer_id,
                question=s.answer.question,
                domain=s.domain,
                insufficient_evidence=s.answer.insufficient_evidence,
            )
            for s in answers.all()
        ]

    @app.get("/v1/answers/{answer_id}", response_model=AskResponse)
    def get_answer(answer_id: str):
        stored = answers.get(answer_id)
        if stored is None:
            raise HTTPException(404, f"unknown answer: {answer_id}")
        return ask_response(stored)

    @app.get("/v1/papers/{paper_id}", response_model=PaperPayload)
    def get_paper(paper_id: str):
        record = backend.get(paper_id)
        if record is None:
            raise HTTPException(404, f"unknown paper: {paper_id}")
        return PaperPayload(**record.to_json())

    @app.post("/v1/annotations", response_model=AnnotationResponse, status_code=201)
    def post_annotation(request: AnnotationRequest):
        if answers.get(request.answer_id) is None:
            raise HTTPException(404, f"unknown answer: {request.answer_id}")
        record = annotations.add(
            {
                "answer_id": request.answer_id,
                "annotator_id": request.annotator_id,
                "scores": request.scores.model_dump(),
            }
        )
        return AnnotationResponse(
            answer_id=record["answer_id"],
            annotator_id=record["annotator_id"],
            scores=ScorePayload(**record["scores"]),
            replaces_prior=record.get("replaces_prior", False),
        )

    @app.get("/v1/reports/agreement", response_model=AgreementPayload)
    def report_agreement():
        try:
            report = evaluation.compute_agreement(annotation_records())
        except evaluation.InsufficientDataError as exc:
            raise HTTPException(409, str(exc)) from exc
        return AgreementPayload(
            kappas=report.kappas,
            n_pairs=report.n_pairs,
            annotators=list(report.annotators or ()),
            degenerate=list(report.degenerate),
        )

    @app.get("/v1/reports/domains", response_model=DomainsReportPayload)
    def report_domains(source: str = Query("store", pattern="^(store|reference)$")):
        table = score_table(source)
        return DomainsReportPayload(
            source=source,
            quality=[QualityRowPayload(**vars(r)) for r in table.quality_rows],
            citations=[
                CitationRowPayload(domain=r.domain, cites=list(r.cites), mean=r.mean)
                for r in table.citation_rows
            ],
        )

    @app.get("/v1/reports/citations", response_model=CitationsReportPayload)
    def report_citations(source: str = Query("store", pattern="^(store|reference)$")):
        table = score_table(source)
        curve = evaluation.rank_relevance_curve(table)
        stats = backend.domain_stats() if isinstance(backend, CorpusIndex) else None
        correlations = evaluation.correlation_suite(table, stats)
        return CitationsReportPayload(
            source=source,
            citations=[
                CitationRowPayload(domain=r.domain, cites=list(r.cites), mean=r.mean)
                for r in table.citation_rows
            ],
            rank_curve=RankCurvePayload(
                means=list(curve.means), non_increasing=curve.non_increasing
            ),
            correlations=[
                CorrelationPayload(name=e.name, n=e.n, r=e.r)
                for e in correlations.entries
            ],
            skipped=list(correlations.skipped),
        )

    @app.get("/v1/reports/audit", response_model=AuditReportPayload)
    def report_audit():
        if not isinstance(backend, CorpusIndex):
            raise HTTPException(409, "audit requires a local corpus index")
        stored = answers.all()
        claims = []
        for s in stored:
            for position, citation in enumerate(s.answer.citations, 1):
                record = backend.get(citation.paper_id)
                claims.append(
                    ClaimedCitation(
                        answer_id=s.answer_id,
                        position=position,
                        claimed_title=citation.title,
                        claimed_authors=record.authors if record else (),
                        claimed_url=citation.url,
                        source_model="pipeline",
                    )
                )
        if not claims:
            raise HTTPException(
                409, "no stored citations to audit; ask questions first"
            )
        report = audit_answers(claims, backend, config.thresholds)
        grid = render_dot_grid(report)
        return AuditReportPayload(
            rows=[
                AuditRowPayload(
                    answer_id=row.answer_id,
                    verdicts=[c.verdict.value if c else None for c in row.cells],
                )
                for row in report.rows
            ],
            rates=report.rates,
            total_claims=report.total_claims,
            text_grid=grid.text,
        )

    return app
