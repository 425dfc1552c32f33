"""Text pre-processing: script detection, Cyrillic-to-Latin transliteration,
sentence splitting and tokenization."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

SENTENCE_ENDERS = ".!?"
PUNCT_CHARS = ",.!?;:"
# ASCII apostrophe, right single quote, modifier letter turned comma
APOSTROPHES = "'’ʻ"


class Script(enum.Enum):
    LATIN = "LATIN"
    CYRILLIC = "CYRILLIC"
    MIXED = "MIXED"


class TransliterationError(Exception):
    def __init__(self, char: str, offset: int):
        self.char = char
        self.offset = offset
        super().__init__(f"unmapped Cyrillic character {char!r} at offset {offset}")


@dataclass(frozen=True)
class RawText:
    id: str
    body: str
    category: str
    script: Script

    def __post_init__(self) -> None:
        if not self.body:
            raise ValueError("text body must be non-empty")
        if not self.category:
            raise ValueError("text category must be non-empty")


@dataclass(frozen=True)
class SentenceRecord:
    id: str
    text_id: str
    index: int
    surface: str
    tokens: tuple[str, ...] = field(default=())


def _is_cyrillic(ch: str) -> bool:
    return "Ѐ" <= ch <= "ӿ"


def _is_latin(ch: str) -> bool:
    if ch.isascii():
        return ch.isalpha()
    # Latin-1 supplement letters through Latin Extended-B
    return "À" <= ch <= "ɏ" and ch.isalpha()


def detect_script(body: str) -> Script:
    """Majority vote over Latin vs Cyrillic letters (>50% wins, else MIXED).

    Letters outside both scripts are ignored; text with no letters counts
    as LATIN so it passes through the pipeline untouched.
    """
    latin = sum(1 for ch in body if _is_latin(ch))
    cyrillic = sum(1 for ch in body if _is_cyrillic(ch))
    total = latin + cyrillic
    if total == 0:
        return Script.LATIN
    if latin * 2 > total:
        return Script.LATIN
    if cyrillic * 2 > total:
        return Script.CYRILLIC
    return Script.MIXED


def load_translit_table(text: Optional[str] = None) -> dict[str, str]:
    """Load the cyr->lat mapping TSV (lowercase keys; empty value = drop)."""
    if text is None:
        text = resources.files("uzannot.data").joinpath("cyr_lat.tsv").read_text("utf-8")
    table: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        cyr, _, lat = line.partition("\t")
        table[cyr] = lat
    return table


_DEFAULT_TABLE: Optional[dict[str, str]] = None


def default_translit_table() -> dict[str, str]:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_translit_table()
    return _DEFAULT_TABLE


def transliterate_cyr_to_lat(body: str, table: Optional[dict[str, str]] = None) -> str:
    """Replace every Cyrillic character per the mapping table.

    Uppercase input maps to the capitalized form of the mapped output
    (digraphs included: Ш -> Sh). Non-Cyrillic characters pass through.
    """
    if table is None:
        table = default_translit_table()
    out: list[str] = []
    for offset, ch in enumerate(body):
        if not _is_cyrillic(ch):
            out.append(ch)
            continue
        lower = ch.lower()
        if lower not in table:
            raise TransliterationError(ch, offset)
        mapped = table[lower]
        if ch != lower and mapped:
            mapped = mapped[0].upper() + mapped[1:]
        out.append(mapped)
    return "".join(out)


def split_sentences_with_separators(body: str) -> tuple[list[str], list[str]]:
    """Split into sentences, also returning the separators between and around
    them so that ``sep[0] + s[0] + sep[1] + ... + sep[n]`` reproduces body."""
    sentences: list[str] = []
    separators: list[str] = []
    i = 0
    n = len(body)
    # leading whitespace is separator 0
    start = i
    while start < n and body[start].isspace():
        start += 1
    separators.append(body[:start])
    i = start
    sent_start = i
    while i < n:
        ch = body[i]
        if ch in SENTENCE_ENDERS:
            # absorb a run of terminal punctuation
            j = i + 1
            while j < n and body[j] in SENTENCE_ENDERS:
                j += 1
            k = j
            while k < n and body[k].isspace():
                k += 1
            boundary = k == n or (k > j and body[k].isupper())
            if boundary:
                sentences.append(body[sent_start:j])
                separators.append(body[j:k])
                sent_start = k
                i = k
                continue
            i = j
        else:
            i += 1
    if sent_start < n:
        sentences.append(body[sent_start:n])
        separators.append("")
    return sentences, separators


def split_sentences(body: str) -> list[str]:
    """Sentence surfaces; boundaries after ``.!?`` + whitespace + uppercase."""
    return split_sentences_with_separators(body)[0]


def tokenize(surface: str) -> list[str]:
    """Whitespace-and-punctuation tokenizer.

    Punctuation from ``,.!?;:`` becomes standalone tokens; apostrophes
    (ASCII, U+2019, U+02BB) are kept word-internal.
    """
    tokens: list[str] = []
    current: list[str] = []

    def flush() -> None:
        if current:
            tokens.append("".join(current))
            current.clear()

    for ch in surface:
        if ch.isspace():
            flush()
        elif ch in PUNCT_CHARS:
            flush()
            tokens.append(ch)
        else:
            current.append(ch)
    flush()
    return tokens


def preprocess(body: str) -> tuple[str, Script, list[tuple[str, list[str]]]]:
    """Full ingestion pipeline: detect script, transliterate if Cyrillic,
    split into sentences and tokenize each. Returns the processed body,
    the detected script of the input, and (surface, tokens) pairs."""
    script = detect_script(body)
    processed = transliterate_cyr_to_lat(body) if script is Script.CYRILLIC else body
    return (
        processed,
        script,
        [(s, tokenize(s)) for s in split_sentences(processed)],
    )
