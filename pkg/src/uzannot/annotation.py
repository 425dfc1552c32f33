"""Tagged-line notation: parsing, serialization and validation.

Grammar (UTF-8):

    line := item (" " item)*
    item := unit | punct
    unit := word ("+" word)* ("/" code)*
    word := [^ /+,.!?;:]+
    code := [A-Z0-9]+
    punct := [,.!?;:]

Punctuation may be adjacent to the preceding item in the byte stream; the
lexer splits it into its own item, so ``keldi/KEZ,`` yields a tagged unit
followed by a comma item.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Union

from .tagset import Registry, TagKind, TagSlot

PUNCT_CHARS = ",.!?;:"
WORD_RE = re.compile(r"[^ /+,.!?;:]+")
CODE_RE = re.compile(r"[A-Z0-9]+")


class AnnotationMode(enum.Enum):
    MORPHOLOGICAL = "M"
    SYNTACTIC = "S"


class ParseError(Exception):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)


@dataclass(frozen=True)
class AnnotationUnit:
    """One or more plus-joined words with an ordered tag-code list."""

    words: tuple[str, ...]
    tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.words:
            raise ValueError("unit needs at least one word")
        for w in self.words:
            if not w or any(c in w for c in "/+ "):
                raise ValueError(f"invalid word {w!r}")
        for t in self.tags:
            if not CODE_RE.fullmatch(t):
                raise ValueError(f"invalid tag code {t!r}")


@dataclass(frozen=True)
class Punctuation:
    char: str

    def __post_init__(self) -> None:
        if self.char not in PUNCT_CHARS:
            raise ValueError(f"invalid punctuation {self.char!r}")


AnnotationItem = Union[AnnotationUnit, Punctuation]


@dataclass(frozen=True)
class AnnotatedSentence:
    mode: AnnotationMode
    items: tuple[AnnotationItem, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("annotated sentence needs at least one item")

    def units(self) -> list[AnnotationUnit]:
        return [it for it in self.items if isinstance(it, AnnotationUnit)]


def parse_line(line: str, mode: AnnotationMode) -> AnnotatedSentence:
    items: list[AnnotationItem] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch == " ":
            i += 1
            continue
        if ch in PUNCT_CHARS:
            items.append(Punctuation(ch))
            i += 1
            continue
        if ch in "/+":
            raise ParseError(f"unexpected {ch!r}", i)
        # unit: word ("+" word)* ("/" code)*
        words: list[str] = []
        while True:
            m = WORD_RE.match(line, i)
            if not m:
                raise ParseError("empty word in multiword unit", i)
            words.append(m.group())
            i = m.end()
            if i < n and line[i] == "+":
                i += 1
                continue
            break
        tags: list[str] = []
        while i < n and line[i] == "/":
            i += 1
            m = re.compile(r"[^ /+,.!?;:]*").match(line, i)
            chunk = m.group() if m else ""
            if not chunk:
                raise ParseError("empty tag code", i)
            if not CODE_RE.fullmatch(chunk):
                if any(c.islower() for c in chunk):
                    raise ParseError(f"tag code {chunk!r} contains lowercase", i)
                raise ParseError(f"invalid tag code {chunk!r}", i)
            tags.append(chunk)
            i += len(chunk)
        items.append(AnnotationUnit(tuple(words), tuple(tags)))
    if not items:
        raise ParseError("empty line")
    return AnnotatedSentence(mode=mode, items=tuple(items))


def serialize_line(sentence: AnnotatedSentence) -> str:
    """Inverse of parse_line; punctuation renders with no space before it."""
    parts: list[str] = []
    for item in sentence.items:
        if isinstance(item, Punctuation):
            if parts:
                parts[-1] += item.char
            else:
                parts.append(item.char)
        else:
            parts.append(
                "+".join(item.words) + "".join("/" + t for t in item.tags)
            )
    return " ".join(parts)


class Severity(enum.Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    rule: str
    item_index: int
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors


_SLOT_ORDER = {TagSlot.BASE: 0, TagSlot.PERSON_NUMBER: 1, TagSlot.TENSE: 2}


def validate(sentence: AnnotatedSentence, registry: Registry) -> ValidationReport:
    """Check a sentence against the registry.

    Rules:
      M1  every tag code resolves with kind matching the mode
      M2  (morphological) first tag of a tagged unit has slot BASE
      M3  (morphological) slots ordered BASE < PERSON_NUMBER < TENSE, at
          most one each of PERSON_NUMBER and TENSE
      S1  (syntactic) every tagged unit has exactly one ROLE tag
      U1  untagged word units (warning)
    """
    findings: list[Finding] = []
    want_kind = (
        TagKind.MORPHOLOGICAL
        if sentence.mode is AnnotationMode.MORPHOLOGICAL
        else TagKind.SYNTACTIC
    )
    for idx, item in enumerate(sentence.items):
        if isinstance(item, Punctuation):
            continue
        if not item.tags:
            findings.append(
                Finding(
                    Severity.WARNING,
                    "U1",
                    idx,
                    f"unit {'+'.join(item.words)!r} carries no tags",
                )
            )
            continue
        resolved = []
        for code in item.tags:
            tag = registry.lookup(code)
            if tag is None:
                findings.append(
                    Finding(Severity.ERROR, "M1", idx, f"unknown tag code {code!r}")
                )
            elif tag.kind is not want_kind:
                findings.append(
                    Finding(
                        Severity.ERROR,
                        "M1",
                        idx,
                        f"tag {code!r} is {tag.kind.name.lower()}, "
                        f"not valid in {sentence.mode.name.lower()} mode",
                    )
                )
            else:
                resolved.append(tag)
        if sentence.mode is AnnotationMode.MORPHOLOGICAL:
            if resolved and resolved[0].code == item.tags[0]:
                if resolved[0].slot is not TagSlot.BASE:
                    findings.append(
                        Finding(
                            Severity.ERROR,
                            "M2",
                            idx,
                            f"first tag {resolved[0].code!r} has slot "
                            f"{resolved[0].slot.name}, expected BASE",
                        )
                    )
            orders = [_SLOT_ORDER[t.slot] for t in resolved]
            if any(b < a for a, b in zip(orders, orders[1:])):
                findings.append(
                    Finding(
                        Severity.ERROR,
                        "M3",
                        idx,
                        "tag slots out of BASE < PERSON_NUMBER < TENSE order",
                    )
                )
            for slot in (TagSlot.PERSON_NUMBER, TagSlot.TENSE):
                if sum(1 for t in resolved if t.slot is slot) > 1:
                    findings.append(
                        Finding(
                            Severity.ERROR,
                            "M3",
                            idx,
                            f"more than one {slot.name} tag",
                        )
                    )
        else:
            role_tags = [t for t in resolved if t.slot is TagSlot.ROLE]
            if len(item.tags) != 1 or (resolved and len(role_tags) != 1):
                if all(registry.lookup(c) is not None for c in item.tags):
                    findings.append(
                        Finding(
                            Severity.ERROR,
                            "S1",
                            idx,
                            f"syntactic unit must carry exactly one role tag, "
                            f"got {len(item.tags)}",
                        )
                    )
    findings.sort(key=lambda f: (f.item_index, f.rule))
    return ValidationReport(tuple(findings))
