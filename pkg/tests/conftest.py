from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"

FIXTURE_PAGES = [
    "listed_grid.html",
    "unlisted_profile.html",
    "semi_listed_catalog.html",
]


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def fixture_corpus(tmp_path: Path) -> Path:
    """Copy of the three structural fixtures in a scratch directory."""
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for name in FIXTURE_PAGES:
        (corpus / name).write_bytes((DATA_DIR / name).read_bytes())
    return corpus
