"""Corpus export and import in TXT and XML.

TXT: per annotation, a header line ``## sentence=<id> annotator=<expert-id>
mode=<M|S>`` followed by the serialized annotation line.

XML: ``<corpus>`` root; ``<text id category>`` wrappers; ``<sentence id index
annotator mode>`` holding ``<unit>`` (``<w>`` words then ``<t>`` tags) and
``<pc>`` punctuation elements. UTF-8, no namespace.
"""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .annotation import (
    AnnotatedSentence,
    AnnotationMode,
    AnnotationUnit,
    ParseError,
    Punctuation,
    parse_line,
    serialize_line,
)

HEADER_RE = re.compile(
    r"## sentence=(?P<sentence>\S+) annotator=(?P<annotator>\S+) mode=(?P<mode>[MS])$"
)


class CorpusFormatError(Exception):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    """One exported annotation."""

    sentence_id: str
    expert_id: str
    mode: AnnotationMode
    sentence: AnnotatedSentence
    text_id: str = ""
    category: str = ""
    index: int = 0


def export_txt(entries: list[CorpusEntry]) -> str:
    lines: list[str] = []
    for e in entries:
        lines.append(
            f"## sentence={e.sentence_id} annotator={e.expert_id} mode={e.mode.value}"
        )
        lines.append(serialize_line(e.sentence))
    return "\n".join(lines) + ("\n" if lines else "")


def import_txt(text: str) -> list[CorpusEntry]:
    """Inverse of export_txt over the fields TXT carries (sentence id,
    annotator, mode, annotation line)."""
    entries: list[CorpusEntry] = []
    header: re.Match[str] | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("##"):
            if header is not None:
                raise CorpusFormatError(f"line {lineno}: header without annotation")
            m = HEADER_RE.match(line)
            if not m:
                raise CorpusFormatError(f"line {lineno}: malformed header {line!r}")
            header = m
        else:
            if header is None:
                raise CorpusFormatError(f"line {lineno}: annotation without header")
            mode = AnnotationMode(header["mode"])
            try:
                sentence = parse_line(line, mode)
            except ParseError as exc:
                raise CorpusFormatError(f"line {lineno}: {exc}") from exc
            entries.append(
                CorpusEntry(
                    sentence_id=header["sentence"],
                    expert_id=header["annotator"],
                    mode=mode,
                    sentence=sentence,
                )
            )
            header = None
    if header is not None:
        raise CorpusFormatError("trailing header without annotation")
    return entries


def _sentence_to_xml(e: CorpusEntry) -> ET.Element:
    el = ET.Element(
        "sentence",
        {
            "id": e.sentence_id,
            "index": str(e.index),
            "annotator": e.expert_id,
            "mode": e.mode.value,
        },
    )
    for item in e.sentence.items:
        if isinstance(item, Punctuation):
            pc = ET.SubElement(el, "pc")
            pc.text = item.char
        else:
            unit = ET.SubElement(el, "unit")
            for w in item.words:
                we = ET.SubElement(unit, "w")
                we.text = w
            for t in item.tags:
                te = ET.SubElement(unit, "t")
                te.text = t
    return el


def export_xml(entries: list[CorpusEntry]) -> str:
    root = ET.Element("corpus")
    texts: dict[tuple[str, str], ET.Element] = {}
    for e in entries:
        key = (e.text_id, e.category)
        if key not in texts:
            texts[key] = ET.SubElement(
                root, "text", {"id": e.text_id, "category": e.category}
            )
        texts[key].append(_sentence_to_xml(e))
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def _sentence_from_xml(el: ET.Element, text_id: str, category: str) -> CorpusEntry:
    mode_s = el.get("mode")
    if mode_s not in ("M", "S"):
        raise CorpusFormatError(f"sentence {el.get('id')!r}: bad mode {mode_s!r}")
    mode = AnnotationMode(mode_s)
    items: list[AnnotationUnit | Punctuation] = []
    for child in el:
        if child.tag == "pc":
            items.append(Punctuation(child.text or ""))
        elif child.tag == "unit":
            words = tuple(w.text or "" for w in child if w.tag == "w")
            tags = tuple(t.text or "" for t in child if t.tag == "t")
            try:
                items.append(AnnotationUnit(words, tags))
            except ValueError as exc:
                raise CorpusFormatError(f"sentence {el.get('id')!r}: {exc}") from exc
        else:
            raise CorpusFormatError(f"unexpected element <{child.tag}>")
    try:
        sentence = AnnotatedSentence(mode=mode, items=tuple(items))
    except ValueError as exc:
        raise CorpusFormatError(f"sentence {el.get('id')!r}: {exc}") from exc
    return CorpusEntry(
        sentence_id=el.get("id") or "",
        expert_id=el.get("annotator") or "",
        mode=mode,
        sentence=sentence,
        text_id=text_id,
        category=category,
        index=int(el.get("index") or 0),
    )


def import_xml(text: str) -> list[CorpusEntry]:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise CorpusFormatError(f"invalid XML: {exc}") from exc
    if root.tag != "corpus":
        raise CorpusFormatError(f"expected <corpus> root, got <{root.tag}>")
    entries: list[CorpusEntry] = []
    for text_el in root:
        if text_el.tag != "text":
            raise CorpusFormatError(f"unexpected element <{text_el.tag}>")
        text_id = text_el.get("id") or ""
        category = text_el.get("category") or ""
        for sent_el in text_el:
            if sent_el.tag != "sentence":
                raise CorpusFormatError(f"unexpected element <{sent_el.tag}>")
            entries.append(_sentence_from_xml(sent_el, text_id, category))
    return entries
