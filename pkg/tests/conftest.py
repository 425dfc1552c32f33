import random
import string
from importlib import resources

import pytest

from uzannot import tagset
from uzannot.annotation import (
    AnnotatedSentence,
    AnnotationMode,
    AnnotationUnit,
    Punctuation,
)
from uzannot.tagset import TagSlot


@pytest.fixture(scope="session")
def seed_registry():
    return tagset.seed_registry()


@pytest.fixture(scope="session")
def full_registry():
    return tagset.full_registry()


@pytest.fixture(scope="session")
def golden_text():
    return (
        resources.files("uzannot.data").joinpath("golden_corpus.txt").read_text("utf-8")
    )


@pytest.fixture(scope="session")
def golden_lines(golden_text):
    """(mode, line) pairs for the ten example annotation lines."""
    out = []
    mode = None
    for line in golden_text.splitlines():
        if line.startswith("##"):
            mode = AnnotationMode(line.rsplit("mode=", 1)[1])
        elif line.strip():
            out.append((mode, line))
    return out


def random_word(rng: random.Random) -> str:
    n = rng.randint(1, 10)
    chars = string.ascii_lowercase + "'"
    w = "".join(rng.choice(chars) for _ in range(n))
    # leading/trailing apostrophes are legal words per the grammar but keep
    # generated corpora close to real text
    return w.strip("'") or "so'z"


def random_valid_sentence(registry, rng: random.Random) -> AnnotatedSentence:
    """Draw a sentence from registry tags respecting rules M2/M3/S1."""
    mode = rng.choice([AnnotationMode.MORPHOLOGICAL, AnnotationMode.SYNTACTIC])
    base = [t for t in registry.morphological() if t.slot is TagSlot.BASE]
    pn = [t for t in registry.morphological() if t.slot is TagSlot.PERSON_NUMBER]
    tense = [t for t in registry.morphological() if t.slot is TagSlot.TENSE]
    roles = registry.syntactic()
    items = []
    n_units = rng.randint(1, 8)
    for _ in range(n_units):
        words = tuple(random_word(rng) for _ in range(rng.randint(1, 3)))
        if rng.random() < 0.1:
            tags = ()  # untagged unit: legal, warning only
        elif mode is AnnotationMode.MORPHOLOGICAL:
            tags = [rng.choice(base).code]
            if rng.random() < 0.4:
                tags.append(rng.choice(pn).code)
            if rng.random() < 0.4:
                tags.append(rng.choice(tense).code)
            tags = tuple(tags)
        else:
            tags = (rng.choice(roles).code,)
        items.append(AnnotationUnit(words, tags))
        if rng.random() < 0.2:
            items.append(Punctuation(rng.choice(",.!?;:")))
    return AnnotatedSentence(mode=mode, items=tuple(items))
