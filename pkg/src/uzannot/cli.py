"""Admin command-line tool: ingest, export, validate, stats, release-stale.

Operates directly on the store directory (no HTTP), so corpora can be
maintained offline. Exit codes: 0 success, 1 validation findings, 2 I/O or
format failure.
"""
from __future__ import annotations

import sys
import uuid
from pathlib import Path

import click

from . import corpus_io, textpipe
from .annotation import AnnotationMode, ParseError, Severity, parse_line, validate
from .corpus_io import HEADER_RE
from .service import compute_stats, export_entries
from .store import CorpusStore, StoreLockedError
from .tagset import Registry, TagsetError, load_registry_path, seed_registry

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_FAILURE = 2


def _load_registry(tagset: str | None) -> Registry:
    if tagset is None:
        return seed_registry()
    return load_registry_path(tagset)


@click.group()
def main() -> None:
    """Corpus administration for the annotation platform."""


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(file_okay=False))
@click.option("--category", required=True)
def ingest(path: str, data: str, category: str) -> None:
    """Ingest a raw text file into the store, splitting it into sentences."""
    try:
        body = Path(path).read_text("utf-8")
        processed, script, sentences = textpipe.preprocess(body)
        with CorpusStore(data) as store:
            text_id = f"t{uuid.uuid4().hex[:12]}"
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
            store.put_text(
                textpipe.RawText(
                    id=text_id, body=processed, category=category, script=script
                ),
                records,
            )
    except (OSError, StoreLockedError, textpipe.TransliterationError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAILURE)
    click.echo(f"{text_id}: {len(records)} sentences ({script.value})")


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--format", "fmt", type=click.Choice(["txt", "xml"]), default="txt")
@click.option("--out", type=click.Path(dir_okay=False), default="-")
def export(data: str, fmt: str, out: str) -> None:
    """Export all confirmed annotations to TXT or XML."""
    try:
        with CorpusStore(data) as store:
            entries = export_entries(store)
        text = corpus_io.export_txt(entries) if fmt == "txt" else corpus_io.export_xml(entries)
        if out == "-":
            click.echo(text, nl=False)
        else:
            Path(out).write_text(text, "utf-8")
    except (OSError, StoreLockedError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAILURE)


@main.command("validate")
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--tagset", type=click.Path(exists=True, dir_okay=False))
def validate_cmd(corpus_path: str, tagset: str | None) -> None:
    """Validate a TXT corpus file; print each finding as line:item:severity:message."""
    try:
        registry = _load_registry(tagset)
        lines = Path(corpus_path).read_text("utf-8").splitlines()
    except (OSError, TagsetError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAILURE)

    malformed = 0
    error_findings = 0
    mode = AnnotationMode.MORPHOLOGICAL
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("##"):
            m = HEADER_RE.match(line)
            if not m:
                click.echo(f"{lineno}:-:MALFORMED:bad header {line!r}")
                malformed += 1
            else:
                mode = AnnotationMode(m["mode"])
            continue
        try:
            sentence = parse_line(line, mode)
        except ParseError as exc:
            click.echo(f"{lineno}:-:MALFORMED:{exc}")
            malformed += 1
            continue
        for f in validate(sentence, registry).findings:
            click.echo(f"{lineno}:{f.item_index}:{f.severity.value}:{f.rule}: {f.message}")
            if f.severity is Severity.ERROR:
                error_findings += 1
    if malformed:
        sys.exit(EXIT_FAILURE)
    sys.exit(EXIT_FINDINGS if error_findings else EXIT_OK)


@main.command()
@click.argument("corpus_path", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--data", type=click.Path(exists=True, file_okay=False))
def stats(corpus_path: str | None, data: str | None) -> None:
    """Print corpus statistics for a TXT corpus file or a store directory."""
    if corpus_path is None and data is None:
        click.echo("error: give a corpus file or --data", err=True)
        sys.exit(EXIT_FAILURE)
    if corpus_path is not None:
        try:
            entries = corpus_io.import_txt(Path(corpus_path).read_text("utf-8"))
        except (OSError, corpus_io.CorpusFormatError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_FAILURE)
        sentences = {e.sentence_id for e in entries}
        per_mode = {"M": 0, "S": 0}
        words = 0
        for e in entries:
            per_mode[e.mode.value] += 1
            words += sum(len(u.words) for u in e.sentence.units())
        click.echo(f"annotation lines: {len(entries)}")
        click.echo(f"sentences: {len(sentences)}")
        click.echo(f"words: {words}")
        click.echo(f"annotations M: {per_mode['M']}")
        click.echo(f"annotations S: {per_mode['S']}")
        return
    try:
        with CorpusStore(data) as store:
            s = compute_stats(store)
    except StoreLockedError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAILURE)
    click.echo(f"texts: {s['texts']}")
    click.echo(f"sentences: {s['sentences']}")
    click.echo(f"words: {s['words']}")
    click.echo(f"confirmed M: {s['confirmed']['M']}")
    click.echo(f"confirmed S: {s['confirmed']['S']}")
    click.echo("category\ttexts\tsentences")
    for category, c in sorted(s["categories"].items()):
        click.echo(f"{category}\t{c['texts']}\t{c['sentences']}")


@main.command("release-stale")
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--age", type=int, required=True, help="Age threshold in seconds.")
def release_stale(data: str, age: int) -> None:
    """RELEASE pending assignments older than --age seconds."""
    try:
        with CorpusStore(data) as store:
            released = store.release_stale(age)
    except StoreLockedError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAILURE)
    click.echo(f"released: {len(released)}")


if __name__ == "__main__":
    main()
