"""HTTP service for the annotation workflow.

Configuration comes from the environment: UZANNOT_ADDR (bind address),
UZANNOT_DATA (store directory), UZANNOT_TAGSET (tagset file path),
UZANNOT_REDUNDANCY (annotators per sentence per mode, default 1).
"""
from __future__ import annotations

import os
import secrets
import time
import uuid
from dataclasses import dataclass
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Response
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from . import corpus_io, textpipe
from .annotation import AnnotationMode, ParseError, parse_line, validate
from .store import (
    AlreadyConfirmedError,
    AnnotationState,
    CorpusStore,
    DuplicateIdError,
    Expert,
    InvariantError,
    NotFoundError,
    hash_passphrase,
    verify_passphrase,
)
from .tagset import Registry, TagKind, load_registry_path, seed_registry

SESSION_TTL_SECONDS = 24 * 3600
PUNCT_TOKENS = set(",.!?;:")


@dataclass
class Session:
    token: str
    expert_id: str
    expires_at: float


class RegisterBody(BaseModel):
    name: str
    passphrase: str


class LoginBody(BaseModel):
    name: str
    passphrase: str


class IngestBody(BaseModel):
    body: str
    category: str


class SubmitBody(BaseModel):
    assignment_id: str
    line: str


def _mode_param(value: str) -> AnnotationMode:
    if value not in ("M", "S"):
        raise HTTPException(status_code=422, detail=f"mode must be M or S, got {value!r}")
    return AnnotationMode(value)


def create_app(store: CorpusStore, registry: Registry) -> FastAPI:
    app = FastAPI(title="uzannot")
    sessions: dict[str, Session] = {}

    def current_expert(authorization: Optional[str] = Header(None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        token = authorization.removeprefix("Bearer ")
        session = sessions.get(token)
        if session is None or session.expires_at < time.time():
            sessions.pop(token, None)
            raise HTTPException(status_code=401, detail="invalid or expired token")
        return session.expert_id

    @app.post("/api/experts", status_code=201)
    def register_expert(body: RegisterBody):
        if not body.name.strip():
            raise HTTPException(status_code=422, detail="name must be non-empty")
        expert = Expert(
            id=f"e{uuid.uuid4().hex[:12]}",
            name=body.name,
            credential_hash=hash_passphrase(body.passphrase),
            created_at=int(time.time()),
        )
        try:
            store.put_expert(expert)
        except DuplicateIdError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"expert_id": expert.id}

    @app.post("/api/sessions", status_code=201)
    def login(body: LoginBody):
        expert = store.find_expert_by_name(body.name)
        if expert is None or not verify_passphrase(body.passphrase, expert.credential_hash):
            raise HTTPException(status_code=401, detail="bad name or passphrase")
        token = secrets.token_urlsafe(32)
        sessions[token] = Session(
            token=token, expert_id=expert.id, expires_at=time.time() + SESSION_TTL_SECONDS
        )
        return {"token": token, "expert_id": expert.id}

    @app.post("/api/texts", status_code=201)
    def ingest_text(body: IngestBody, expert_id: str = Depends(current_expert)):
        if not body.body.strip():
            raise HTTPException(status_code=422, detail="text body must be non-empty")
        if not body.category.strip():
            raise HTTPException(status_code=422, detail="category must be non-empty")
        try:
            processed, script, sentences = textpipe.preprocess(body.body)
        except textpipe.TransliterationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        text_id = f"t{uuid.uuid4().hex[:12]}"
        text = textpipe.RawText(
            id=text_id, body=processed, category=body.category, script=script
        )
        records = [
            textpipe.SentenceRecord(
                id=f"{text_id}-s{idx:04d}",
                text_id=text_id,
                index=idx,
                surface=surface,
                tokens=tuple(tokens),
            )
            for idx, (surface, tokens) in enumerate(sentences)
        ]
        store.put_text(text, records)
        return {"text_id": text_id, "sentences": len(records), "script": script.value}

    @app.get("/api/assignments/next")
    def next_assignment(
        mode: str = Query(...), expert_id: str = Depends(current_expert)
    ):
        assignment = store.issue_assignment(expert_id, _mode_param(mode))
        if assignment is None:
            return Response(status_code=204)
        sentence = store.get_sentence(assignment.sentence_id)
        return {
            "assignment_id": assignment.id,
            "sentence_id": sentence.id,
            "surface": sentence.surface,
            "tokens": list(sentence.tokens),
            "mode": assignment.mode.value,
        }

    @app.post("/api/annotations", status_code=201)
    def submit_annotation(body: SubmitBody, expert_id: str = Depends(current_expert)):
        try:
            assignment = store.get_assignment(body.assignment_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        try:
            sentence = parse_line(body.line, assignment.mode)
        except ParseError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        report = validate(sentence, registry)
        if not report.ok:
            raise HTTPException(
                status_code=422,
                detail={
                    "message": "validation errors",
                    "findings": [
                        {
                            "severity": f.severity.value,
                            "rule": f.rule,
                            "item_index": f.item_index,
                            "message": f.message,
                        }
                        for f in report.findings
                    ],
                },
            )
        warnings = tuple(f"{f.rule}: {f.message}" for f in report.warnings)
        try:
            record = store.submit_annotation(
                body.assignment_id, expert_id, sentence, warnings
            )
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except (DuplicateIdError, InvariantError) as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {
            "annotation_id": record.id,
            "state": record.state.value,
            "warnings": list(record.warnings),
        }

    @app.post("/api/annotations/{annotation_id}/confirm")
    def confirm(annotation_id: str, expert_id: str = Depends(current_expert)):
        try:
            record = store.get_annotation(annotation_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        if record.expert_id != expert_id:
            raise HTTPException(status_code=409, detail="annotation belongs to another expert")
        try:
            record = store.confirm_annotation(annotation_id)
        except AlreadyConfirmedError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"annotation_id": record.id, "state": record.state.value}

    @app.get("/api/tagset")
    def get_tagset(kind: str = Query(...), expert_id: str = Depends(current_expert)):
        if kind == "M":
            groups = []
            for word_class in [wc for wc in _word_classes(registry)]:
                tags = registry.tags_by_class(word_class)
                if tags:
                    groups.append(
                        {
                            "word_class": word_class.value,
                            "tags": [_tag_json(t) for t in tags],
                        }
                    )
            return {"kind": "M", "groups": groups}
        if kind == "S":
            return {
                "kind": "S",
                "tags": [_tag_json(t) for t in registry.syntactic()],
            }
        raise HTTPException(status_code=422, detail=f"kind must be M or S, got {kind!r}")

    @app.get("/api/export")
    def export(format: str = Query(...), expert_id: str = Depends(current_expert)):
        entries = export_entries(store)
        if format == "txt":
            return PlainTextResponse(corpus_io.export_txt(entries))
        if format == "xml":
            return PlainTextResponse(
                corpus_io.export_xml(entries), media_type="application/xml"
            )
        raise HTTPException(status_code=422, detail=f"format must be txt or xml, got {format!r}")

    @app.get("/api/stats")
    def stats(expert_id: str = Depends(current_expert)):
        return compute_stats(store)

    return app


def _word_classes(registry: Registry):
    seen = []
    for t in registry.morphological():
        if t.word_class not in seen:
            seen.append(t.word_class)
    return seen


def _tag_json(t) -> dict:
    return {
        "code": t.code,
        "slot": t.slot.name,
        "description": t.description,
        "example": t.example,
    }


def export_entries(store: CorpusStore) -> list[corpus_io.CorpusEntry]:
    entries = []
    for r in store.confirmed_annotations():
        sentence = store.get_sentence(r.sentence_id)
        text = store.get_text(sentence.text_id)
        entries.append(
            corpus_io.CorpusEntry(
                sentence_id=r.sentence_id,
                expert_id=r.expert_id,
                mode=r.mode,
                sentence=r.sentence,
                text_id=sentence.text_id,
                category=text.category,
                index=sentence.index,
            )
        )
    return entries


def compute_stats(store: CorpusStore) -> dict:
    sentences = store.list_sentences()
    words = sum(
        sum(1 for tok in s.tokens if tok not in PUNCT_TOKENS) for s in sentences
    )
    confirmed = {"M": 0, "S": 0}
    for r in store.annotations():
        if r.state is AnnotationState.CONFIRMED:
            confirmed[r.mode.value] += 1
    categories: dict[str, dict[str, int]] = {}
    for t in store.texts():
        c = categories.setdefault(t.category, {"texts": 0, "sentences": 0})
        c["texts"] += 1
    for s in sentences:
        category = store.get_text(s.text_id).category
        categories[category]["sentences"] += 1
    return {
        "texts": len(store.texts()),
        "sentences": len(sentences),
        "words": words,
        "confirmed": confirmed,
        "categories": categories,
    }


def app_from_env() -> FastAPI:
    data_dir = os.environ.get("UZANNOT_DATA", "./uzannot-data")
    tagset_path = os.environ.get("UZANNOT_TAGSET")
    redundancy = int(os.environ.get("UZANNOT_REDUNDANCY", "1"))
    registry = (
        load_registry_path(tagset_path) if tagset_path else seed_registry()
    )
    store = CorpusStore(data_dir, redundancy=redundancy)
    return create_app(store, registry)


def main() -> None:
    import uvicorn

    addr = os.environ.get("UZANNOT_ADDR", "127.0.0.1:8000")
    host, _, port = addr.rpartition(":")
    uvicorn.run(app_from_env(), host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
