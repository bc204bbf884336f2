from pathlib import Path

import pytest

from opine import Config, parse_document, parse_lexicon, process_document

CORPUS = Path(__file__).parent / "corpus"


@pytest.fixture(scope="session")
def lexicon():
    return parse_lexicon((CORPUS / "base.lex").read_text(), "base.lex")


@pytest.fixture(scope="session")
def corpus_files():
    return sorted(CORPUS.glob("*.ann"))


@pytest.fixture(scope="session")
def run_sentence(lexicon):
    """Parse a corpus file and run its (single) sentence to fixpoint."""
    cache = {}

    def _run(name, cfg=None):
        key = (name, cfg.extended_belief_spaces if cfg else False,
               cfg.fire_once if cfg else True)
        if key not in cache:
            doc = parse_document((CORPUS / f"{name}.ann").read_text(), f"{name}.ann")
            cache[key] = process_document(doc, lexicon, cfg or Config())[0]
        return cache[key]

    return _run


def load_doc(name):
    return parse_document((CORPUS / f"{name}.ann").read_text(), f"{name}.ann")
