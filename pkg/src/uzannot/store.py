"""File-backed system of record for texts, sentences, experts, assignments
and annotations.

Layout: one append-only log per record type inside the store directory.
Each log entry is ``<byte length>\\n<json payload>\\n``; replaying a log in
order with last-write-wins per id rebuilds the current state, so updates
are plain appends and backups are bit-exact copies.

All mutations are serialized through a single writer lock; reads return
snapshots. A ``store.lock`` file (flock) enforces one process per store
directory.
"""
from __future__ import annotations

import enum
import fcntl
import hashlib
import json
import os
import secrets
import threading
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterator, Optional

from .annotation import AnnotatedSentence, AnnotationMode, parse_line, serialize_line
from .textpipe import RawText, Script, SentenceRecord


class StoreError(Exception):
    pass


class DuplicateIdError(StoreError):
    pass


class NotFoundError(StoreError):
    pass


class AlreadyConfirmedError(StoreError):
    pass


class InvariantError(StoreError):
    pass


class StoreLockedError(StoreError):
    pass


class AssignmentState(enum.Enum):
    PENDING = "PENDING"
    SUBMITTED = "SUBMITTED"
    CONFIRMED = "CONFIRMED"
    RELEASED = "RELEASED"


class AnnotationState(enum.Enum):
    DRAFT = "DRAFT"
    CONFIRMED = "CONFIRMED"


@dataclass(frozen=True)
class Expert:
    id: str
    name: str
    credential_hash: str
    created_at: int

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("expert name must be non-empty")


@dataclass(frozen=True)
class Assignment:
    id: str
    sentence_id: str
    expert_id: str
    mode: AnnotationMode
    state: AssignmentState
    issued_at: int


@dataclass(frozen=True)
class AnnotationRecord:
    id: str
    sentence_id: str
    expert_id: str
    mode: AnnotationMode
    sentence: AnnotatedSentence
    state: AnnotationState
    submitted_at: int
    warnings: tuple[str, ...] = ()


def hash_passphrase(passphrase: str, salt: Optional[bytes] = None) -> str:
    if salt is None:
        salt = secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", passphrase.encode("utf-8"), salt, 100_000)
    return f"pbkdf2-sha256$100000${salt.hex()}${digest.hex()}"


def verify_passphrase(passphrase: str, credential_hash: str) -> bool:
    try:
        scheme, iters, salt_hex, digest_hex = credential_hash.split("$")
        if scheme != "pbkdf2-sha256":
            return False
        digest = hashlib.pbkdf2_hmac(
            "sha256", passphrase.encode("utf-8"), bytes.fromhex(salt_hex), int(iters)
        )
        return secrets.compare_digest(digest.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


def _now() -> int:
    return int(time.time())


_LOGS = ("texts", "sentences", "experts", "assignments", "annotations")


class CorpusStore:
    """Single-writer durable store over one directory."""

    def __init__(self, directory: str | os.PathLike[str], redundancy: int = 1):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        if redundancy < 1:
            raise ValueError("redundancy must be >= 1")
        self.redundancy = redundancy
        self._lock = threading.Lock()
        self._lock_file = open(self.directory / "store.lock", "a+")
        try:
            fcntl.flock(self._lock_file, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            self._lock_file.close()
            raise StoreLockedError(
                f"store directory {self.directory} is locked by another process"
            ) from None
        self._texts: dict[str, RawText] = {}
        self._text_categories: dict[str, str] = {}
        self._sentences: dict[str, SentenceRecord] = {}
        self._experts: dict[str, Expert] = {}
        self._assignments: dict[str, Assignment] = {}
        self._annotations: dict[str, AnnotationRecord] = {}
        self._files = {
            name: open(self.directory / f"{name}.log", "a+b") for name in _LOGS
        }
        self._replay()

    def close(self) -> None:
        for fh in self._files.values():
            fh.close()
        try:
            fcntl.flock(self._lock_file, fcntl.LOCK_UN)
        finally:
            self._lock_file.close()

    def __enter__(self) -> "CorpusStore":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    # -- log plumbing ------------------------------------------------------

    def _append(self, log: str, payload: dict) -> None:
        data = json.dumps(payload, ensure_ascii=False, sort_keys=True).encode("utf-8")
        fh = self._files[log]
        fh.seek(0, os.SEEK_END)
        fh.write(str(len(data)).encode("ascii") + b"\n" + data + b"\n")
        fh.flush()
        os.fsync(fh.fileno())

    @staticmethod
    def _iter_log(fh) -> Iterator[dict]:
        fh.seek(0)
        while True:
            header = fh.readline()
            if not header:
                return
            length = int(header)
            data = fh.read(length)
            if len(data) != length:
                raise StoreError("truncated log record")
            fh.read(1)  # trailing newline
            yield json.loads(data.decode("utf-8"))

    def _replay(self) -> None:
        for rec in self._iter_log(self._files["texts"]):
            self._texts[rec["id"]] = RawText(
                id=rec["id"],
                body=rec["body"],
                category=rec["category"],
                script=Script(rec["script"]),
            )
        for rec in self._iter_log(self._files["sentences"]):
            self._sentences[rec["id"]] = SentenceRecord(
                id=rec["id"],
                text_id=rec["text_id"],
                index=rec["index"],
                surface=rec["surface"],
                tokens=tuple(rec["tokens"]),
            )
        for rec in self._iter_log(self._files["experts"]):
            self._experts[rec["id"]] = Expert(**rec)
        for rec in self._iter_log(self._files["assignments"]):
            self._assignments[rec["id"]] = Assignment(
                id=rec["id"],
                sentence_id=rec["sentence_id"],
                expert_id=rec["expert_id"],
                mode=AnnotationMode(rec["mode"]),
                state=AssignmentState(rec["state"]),
                issued_at=rec["issued_at"],
            )
        for rec in self._iter_log(self._files["annotations"]):
            self._annotations[rec["id"]] = AnnotationRecord(
                id=rec["id"],
                sentence_id=rec["sentence_id"],
                expert_id=rec["expert_id"],
                mode=AnnotationMode(rec["mode"]),
                sentence=parse_line(rec["line"], AnnotationMode(rec["mode"])),
                state=AnnotationState(rec["state"]),
                submitted_at=rec["submitted_at"],
                warnings=tuple(rec.get("warnings", ())),
            )

    def _write_assignment(self, a: Assignment) -> None:
        self._assignments[a.id] = a
        self._append(
            "assignments",
            {
                "id": a.id,
                "sentence_id": a.sentence_id,
                "expert_id": a.expert_id,
                "mode": a.mode.value,
                "state": a.state.value,
                "issued_at": a.issued_at,
            },
        )

    def _write_annotation(self, r: AnnotationRecord) -> None:
        self._annotations[r.id] = r
        self._append(
            "annotations",
            {
                "id": r.id,
                "sentence_id": r.sentence_id,
                "expert_id": r.expert_id,
                "mode": r.mode.value,
                "line": serialize_line(r.sentence),
                "state": r.state.value,
                "submitted_at": r.submitted_at,
                "warnings": list(r.warnings),
            },
        )

    # -- texts and sentences ----------------------------------------------

    def put_text(self, text: RawText, sentences: list[SentenceRecord]) -> None:
        with self._lock:
            if text.id in self._texts:
                raise DuplicateIdError(f"text {text.id!r} already exists")
            indices = [s.index for s in sentences]
            if indices != list(range(len(sentences))):
                raise InvariantError("sentence indices must be contiguous from 0")
            for s in sentences:
                if s.id in self._sentences:
                    raise DuplicateIdError(f"sentence {s.id!r} already exists")
                if s.text_id != text.id:
                    raise InvariantError("sentence text_id mismatch")
            self._texts[text.id] = text
            self._append(
                "texts",
                {
                    "id": text.id,
                    "body": text.body,
                    "category": text.category,
                    "script": text.script.value,
                },
            )
            for s in sentences:
                self._sentences[s.id] = s
                self._append(
                    "sentences",
                    {
                        "id": s.id,
                        "text_id": s.text_id,
                        "index": s.index,
                        "surface": s.surface,
                        "tokens": list(s.tokens),
                    },
                )

    def get_text(self, text_id: str) -> RawText:
        t = self._texts.get(text_id)
        if t is None:
            raise NotFoundError(f"unknown text {text_id!r}")
        return t

    def texts(self) -> list[RawText]:
        return sorted(self._texts.values(), key=lambda t: t.id)

    def get_sentence(self, sentence_id: str) -> SentenceRecord:
        s = self._sentences.get(sentence_id)
        if s is None:
            raise NotFoundError(f"unknown sentence {sentence_id!r}")
        return s

    def list_sentences(
        self,
        text_id: Optional[str] = None,
        unannotated_in: Optional[AnnotationMode] = None,
    ) -> list[SentenceRecord]:
        out = sorted(self._sentences.values(), key=lambda s: (s.text_id, s.index))
        if text_id is not None:
            out = [s for s in out if s.text_id == text_id]
        if unannotated_in is not None:
            covered = {
                a.sentence_id
                for a in self._assignments.values()
                if a.mode is unannotated_in and a.state is not AssignmentState.RELEASED
            }
            out = [s for s in out if s.id not in covered]
        return out

    # -- experts -----------------------------------------------------------

    def put_expert(self, expert: Expert) -> None:
        with self._lock:
            if expert.id in self._experts:
                raise DuplicateIdError(f"expert {expert.id!r} already exists")
            if any(e.name == expert.name for e in self._experts.values()):
                raise DuplicateIdError(f"expert name {expert.name!r} already taken")
            self._experts[expert.id] = expert
            self._append("experts", asdict(expert))

    def get_expert(self, expert_id: str) -> Expert:
        e = self._experts.get(expert_id)
        if e is None:
            raise NotFoundError(f"unknown expert {expert_id!r}")
        return e

    def find_expert_by_name(self, name: str) -> Optional[Expert]:
        for e in self._experts.values():
            if e.name == name:
                return e
        return None

    # -- assignments -------------------------------------------------------

    def get_assignment(self, assignment_id: str) -> Assignment:
        a = self._assignments.get(assignment_id)
        if a is None:
            raise NotFoundError(f"unknown assignment {assignment_id!r}")
        return a

    def assignments(self) -> list[Assignment]:
        return sorted(self._assignments.values(), key=lambda a: a.id)

    def next_unassigned(self, mode: AnnotationMode) -> Optional[SentenceRecord]:
        """Lowest (text_id, index) sentence with free annotation capacity."""
        with self._lock:
            return self._next_unassigned_locked(mode, expert_id=None)

    def _next_unassigned_locked(
        self, mode: AnnotationMode, expert_id: Optional[str]
    ) -> Optional[SentenceRecord]:
        active: dict[str, int] = {}
        held: set[str] = set()
        for a in self._assignments.values():
            if a.mode is not mode or a.state is AssignmentState.RELEASED:
                continue
            active[a.sentence_id] = active.get(a.sentence_id, 0) + 1
            if expert_id is not None and a.expert_id == expert_id:
                held.add(a.sentence_id)
        for s in sorted(self._sentences.values(), key=lambda s: (s.text_id, s.index)):
            if s.id in held:
                continue
            if active.get(s.id, 0) < self.redundancy:
                return s
        return None

    def issue_assignment(
        self, expert_id: str, mode: AnnotationMode
    ) -> Optional[Assignment]:
        """Atomically grant the next free sentence to an expert.

        An expert holding a PENDING assignment in this mode gets that same
        assignment back (page reloads must not burn capacity).
        """
        with self._lock:
            if expert_id not in self._experts:
                raise NotFoundError(f"unknown expert {expert_id!r}")
            for a in self._assignments.values():
                if (
                    a.expert_id == expert_id
                    and a.mode is mode
                    and a.state is AssignmentState.PENDING
                ):
                    return a
            sentence = self._next_unassigned_locked(mode, expert_id)
            if sentence is None:
                return None
            a = Assignment(
                id=f"a{len(self._assignments) + 1:06d}",
                sentence_id=sentence.id,
                expert_id=expert_id,
                mode=mode,
                state=AssignmentState.PENDING,
                issued_at=_now(),
            )
            self._write_assignment(a)
            return a

    def release_stale(self, max_age_seconds: int) -> list[Assignment]:
        """RELEASE PENDING assignments older than max_age_seconds."""
        released = []
        cutoff = _now() - max_age_seconds
        with self._lock:
            for a in list(self._assignments.values()):
                if a.state is AssignmentState.PENDING and a.issued_at <= cutoff:
                    a = replace(a, state=AssignmentState.RELEASED)
                    self._write_assignment(a)
                    released.append(a)
        return released

    # -- annotations -------------------------------------------------------

    def submit_annotation(
        self,
        assignment_id: str,
        expert_id: str,
        sentence: AnnotatedSentence,
        warnings: tuple[str, ...] = (),
    ) -> AnnotationRecord:
        with self._lock:
            a = self._assignments.get(assignment_id)
            if a is None:
                raise NotFoundError(f"unknown assignment {assignment_id!r}")
            if a.expert_id != expert_id:
                raise InvariantError("assignment belongs to another expert")
            if a.state is not AssignmentState.PENDING:
                raise InvariantError(f"assignment is {a.state.value}, not PENDING")
            for r in self._annotations.values():
                if (
                    r.sentence_id == a.sentence_id
                    and r.expert_id == expert_id
                    and r.mode is a.mode
                ):
                    raise DuplicateIdError(
                        "annotation already exists for this sentence/expert/mode"
                    )
            record = AnnotationRecord(
                id=f"n{len(self._annotations) + 1:06d}",
                sentence_id=a.sentence_id,
                expert_id=expert_id,
                mode=a.mode,
                sentence=sentence,
                state=AnnotationState.DRAFT,
                submitted_at=_now(),
                warnings=warnings,
            )
            self._write_annotation(record)
            self._write_assignment(replace(a, state=AssignmentState.SUBMITTED))
            return record

    def get_annotation(self, annotation_id: str) -> AnnotationRecord:
        r = self._annotations.get(annotation_id)
        if r is None:
            raise NotFoundError(f"unknown annotation {annotation_id!r}")
        return r

    def annotations(self) -> list[AnnotationRecord]:
        return sorted(self._annotations.values(), key=lambda r: r.id)

    def confirm_annotation(self, annotation_id: str) -> AnnotationRecord:
        with self._lock:
            r = self._annotations.get(annotation_id)
            if r is None:
                raise NotFoundError(f"unknown annotation {annotation_id!r}")
            if r.state is AnnotationState.CONFIRMED:
                raise AlreadyConfirmedError(f"annotation {annotation_id} already confirmed")
            r = replace(r, state=AnnotationState.CONFIRMED)
            self._write_annotation(r)
            for a in self._assignments.values():
                if (
                    a.sentence_id == r.sentence_id
                    and a.expert_id == r.expert_id
                    and a.mode is r.mode
                    and a.state is AssignmentState.SUBMITTED
                ):
                    self._write_assignment(replace(a, state=AssignmentState.CONFIRMED))
                    break
            return r

    def confirmed_annotations(self) -> list[AnnotationRecord]:
        """Export view: CONFIRMED records ordered by (text_id, sentence
        index, mode, expert_id)."""

        def key(r: AnnotationRecord):
            s = self._sentences.get(r.sentence_id)
            pos = (s.text_id, s.index) if s else ("", 0)
            return (*pos, r.mode.value, r.expert_id)

        return sorted(
            (r for r in self._annotations.values() if r.state is AnnotationState.CONFIRMED),
            key=key,
        )

    # -- invariants --------------------------------------------------------

    def check_invariants(self) -> None:
        """Full-scan assignment/annotation invariant check; raises on violation."""
        per_sentence: dict[tuple[str, str], int] = {}
        pending: dict[tuple[str, str], int] = {}
        for a in self._assignments.values():
            if a.state is not AssignmentState.RELEASED:
                k = (a.sentence_id, a.mode.value)
                per_sentence[k] = per_sentence.get(k, 0) + 1
            if a.state is AssignmentState.PENDING:
                k = (a.expert_id, a.mode.value)
                pending[k] = pending.get(k, 0) + 1
        for k, n in per_sentence.items():
            if n > self.redundancy:
                raise InvariantError(f"sentence {k[0]} over-assigned in mode {k[1]}")
        for k, n in pending.items():
            if n > 1:
                raise InvariantError(f"expert {k[0]} holds {n} PENDING in mode {k[1]}")
        seen: set[tuple[str, str, str]] = set()
        for r in self._annotations.values():
            key = (r.sentence_id, r.expert_id, r.mode.value)
            if key in seen:
                raise InvariantError(f"duplicate annotation for {key}")
            seen.add(key)
