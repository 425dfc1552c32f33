"""Tagset registry: loads and serves the morphological and syntactic tag inventory.

The tagset ships as a line-based UTF-8 TSV. Data lines are
``code<TAB>kind<TAB>word_class<TAB>slot<TAB>description<TAB>example`` with
kind ``M`` or ``S``, word_class ``-`` for syntactic tags and slot one of
``BASE``, ``PN``, ``TENSE``, ``ROLE``. ``#`` lines are comments. Manifest
lines ``!count<TAB>CLASS<TAB>N`` and ``!total<TAB>N`` may be embedded.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Optional

CODE_RE = re.compile(r"[A-Z0-9]+")


class TagsetError(Exception):
    """Raised for malformed or inconsistent tagset input."""


class TagKind(enum.Enum):
    MORPHOLOGICAL = "M"
    SYNTACTIC = "S"


class WordClass(enum.Enum):
    NOUN = "NOUN"
    ADJECTIVE = "ADJECTIVE"
    NUMBER = "NUMBER"
    PRONOUN = "PRONOUN"
    ADVERB = "ADVERB"
    VERB = "VERB"
    CONJUNCTION = "CONJUNCTION"
    HELPERS = "HELPERS"
    PARTICLE = "PARTICLE"
    INTERJECTION = "INTERJECTION"
    IMITATIVE_WORD = "IMITATIVE_WORD"
    MODAL_WORD = "MODAL_WORD"


class TagSlot(enum.Enum):
    BASE = "BASE"
    PERSON_NUMBER = "PN"
    TENSE = "TENSE"
    ROLE = "ROLE"


@dataclass(frozen=True)
class TagDefinition:
    code: str
    kind: TagKind
    word_class: Optional[WordClass]
    slot: TagSlot
    description: str
    example: str = ""

    def __post_init__(self) -> None:
        if not CODE_RE.fullmatch(self.code):
            raise TagsetError(f"invalid tag code {self.code!r}")
        if self.kind is TagKind.SYNTACTIC:
            if self.slot is not TagSlot.ROLE or self.word_class is not None:
                raise TagsetError(
                    f"syntactic tag {self.code} must have slot ROLE and no word class"
                )
        else:
            if self.word_class is None:
                raise TagsetError(f"morphological tag {self.code} needs a word class")
            if self.slot is TagSlot.ROLE:
                raise TagsetError(f"morphological tag {self.code} cannot have slot ROLE")


@dataclass(frozen=True)
class ClassManifest:
    """Expected per-class morphological tag counts."""

    counts: dict[WordClass, int]
    total: int

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.total:
            raise TagsetError(
                f"manifest total {self.total} != sum of class counts "
                f"{sum(self.counts.values())}"
            )


# Published per-class counts of the full morphological tagset.
FULL_MANIFEST = ClassManifest(
    counts={
        WordClass.NOUN: 22,
        WordClass.ADJECTIVE: 10,
        WordClass.NUMBER: 11,
        WordClass.PRONOUN: 11,
        WordClass.ADVERB: 10,
        WordClass.VERB: 18,
        WordClass.CONJUNCTION: 8,
        WordClass.HELPERS: 1,
        WordClass.PARTICLE: 6,
        WordClass.INTERJECTION: 2,
        WordClass.IMITATIVE_WORD: 2,
        WordClass.MODAL_WORD: 1,
    },
    total=102,
)


@dataclass(frozen=True)
class Registry:
    """Immutable tag collection indexed by code. Safe for concurrent reads."""

    tags: tuple[TagDefinition, ...]
    manifest: Optional[ClassManifest] = None
    strict: bool = False
    warnings: tuple[str, ...] = ()
    _by_code: dict[str, TagDefinition] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_code", {t.code: t for t in self.tags})

    def lookup(self, code: str) -> Optional[TagDefinition]:
        """Exact-match, case-sensitive lookup; None when absent."""
        return self._by_code.get(code)

    def __contains__(self, code: str) -> bool:
        return code in self._by_code

    def tags_by_class(self, word_class: WordClass) -> list[TagDefinition]:
        """Morphological tags of one word class, in file order."""
        return [
            t
            for t in self.tags
            if t.kind is TagKind.MORPHOLOGICAL and t.word_class is word_class
        ]

    def morphological(self) -> list[TagDefinition]:
        return [t for t in self.tags if t.kind is TagKind.MORPHOLOGICAL]

    def syntactic(self) -> list[TagDefinition]:
        return [t for t in self.tags if t.kind is TagKind.SYNTACTIC]


def _parse_data_line(lineno: int, line: str) -> TagDefinition:
    parts = line.split("\t")
    if len(parts) not in (5, 6):
        raise TagsetError(f"line {lineno}: expected 5 or 6 tab-separated fields")
    code, kind_s, class_s, slot_s, description = parts[:5]
    example = parts[5] if len(parts) == 6 else ""
    if kind_s not in ("M", "S"):
        raise TagsetError(f"line {lineno}: unknown kind {kind_s!r}")
    kind = TagKind.MORPHOLOGICAL if kind_s == "M" else TagKind.SYNTACTIC
    if class_s == "-":
        word_class = None
    else:
        try:
            word_class = WordClass(class_s)
        except ValueError:
            raise TagsetError(f"line {lineno}: unknown word class {class_s!r}") from None
    try:
        slot = TagSlot(slot_s)
    except ValueError:
        raise TagsetError(f"line {lineno}: unknown slot {slot_s!r}") from None
    if not CODE_RE.fullmatch(code):
        raise TagsetError(f"line {lineno}: invalid tag code {code!r}")
    try:
        return TagDefinition(code, kind, word_class, slot, description, example)
    except TagsetError as exc:
        raise TagsetError(f"line {lineno}: {exc}") from None


def load_registry(
    source: IO[str] | Iterable[str],
    manifest: Optional[ClassManifest] = None,
    strict: bool = False,
) -> Registry:
    """Parse a tagset stream into a Registry.

    An embedded manifest (``!count``/``!total`` lines) is used when the
    ``manifest`` argument is None. With a manifest, strict loading raises on
    any per-class count mismatch; non-strict loading records mismatches as
    warnings on the returned registry.
    """
    tags: list[TagDefinition] = []
    seen: set[str] = set()
    file_counts: dict[WordClass, int] = {}
    file_total: Optional[int] = None
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        if line.startswith("!"):
            parts = line.split("\t")
            if parts[0] == "!count" and len(parts) == 3:
                try:
                    file_counts[WordClass(parts[1])] = int(parts[2])
                except ValueError:
                    raise TagsetError(f"line {lineno}: bad manifest line") from None
            elif parts[0] == "!total" and len(parts) == 2:
                try:
                    file_total = int(parts[1])
                except ValueError:
                    raise TagsetError(f"line {lineno}: bad manifest line") from None
            else:
                raise TagsetError(f"line {lineno}: bad manifest line")
            continue
        tag = _parse_data_line(lineno, line)
        if tag.code in seen:
            raise TagsetError(f"line {lineno}: duplicate code {tag.code}")
        seen.add(tag.code)
        tags.append(tag)
    if not tags:
        raise TagsetError("no tags loaded")
    if manifest is None and file_counts:
        if file_total is None:
            file_total = sum(file_counts.values())
        manifest = ClassManifest(counts=file_counts, total=file_total)

    warnings: list[str] = []
    if manifest is not None:
        actual_total = 0
        for word_class in WordClass:
            have = sum(
                1
                for t in tags
                if t.kind is TagKind.MORPHOLOGICAL and t.word_class is word_class
            )
            actual_total += have
            want = manifest.counts.get(word_class, 0)
            if have != want:
                msg = f"{word_class.value} has {have} of {want} expected tags"
                if strict:
                    raise TagsetError(f"manifest mismatch: {msg}")
                warnings.append(msg)
        if actual_total != manifest.total:
            msg = f"total morphological tags {actual_total} of {manifest.total} expected"
            if strict:
                raise TagsetError(f"manifest mismatch: {msg}")
            warnings.append(msg)
    return Registry(
        tags=tuple(tags), manifest=manifest, strict=strict, warnings=tuple(warnings)
    )


def load_registry_path(
    path: str, manifest: Optional[ClassManifest] = None, strict: bool = False
) -> Registry:
    with open(path, encoding="utf-8") as fh:
        return load_registry(fh, manifest=manifest, strict=strict)


def serialize_registry(registry: Registry) -> str:
    """Render a registry back to tagset-file text (data and manifest lines)."""
    lines = []
    for t in registry.tags:
        class_s = t.word_class.value if t.word_class is not None else "-"
        lines.append(
            f"{t.code}\t{t.kind.value}\t{class_s}\t{t.slot.value}"
            f"\t{t.description}\t{t.example}"
        )
    if registry.manifest is not None:
        for word_class, n in registry.manifest.counts.items():
            lines.append(f"!count\t{word_class.value}\t{n}")
        lines.append(f"!total\t{registry.manifest.total}")
    return "\n".join(lines) + "\n"


def seed_registry(strict: bool = False) -> Registry:
    """The bundled seed tagset (published sample plus unconfirmed codes)."""
    text = resources.files("uzannot.data").joinpath("tagset_seed.tsv").read_text("utf-8")
    return load_registry(text.splitlines(), manifest=FULL_MANIFEST, strict=strict)


def full_registry(strict: bool = True) -> Registry:
    """The bundled full tagset layout (102 morphological + 14 syntactic)."""
    text = resources.files("uzannot.data").joinpath("tagset_full.tsv").read_text("utf-8")
    return load_registry(text.splitlines(), strict=strict)
