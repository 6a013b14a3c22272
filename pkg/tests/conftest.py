import hashlib
from pathlib import Path

import pytest

from .support import bookgen

_CACHE = Path(__file__).parent / "fixtures" / "generated"


def fixture_paths(spec: bookgen.BookSpec) -> tuple[Path, Path]:
    """Generate (or reuse) the pre-tagged book and vector file for a spec."""
    _CACHE.mkdir(parents=True, exist_ok=True)
    key = hashlib.sha256(repr(spec).encode()).hexdigest()[:10]
    book = _CACHE / f"{spec.name}-{key}.tags"
    vectors = _CACHE / f"{spec.name}-{key}.vectors.txt"
    if not book.exists() or not vectors.exists():
        built = bookgen.build_fixture(spec)
        book.write_text(built.pretagged, encoding="utf-8")
        vectors.write_text(built.vectors, encoding="utf-8")
    return book, vectors


@pytest.fixture(scope="session")
def small_book_paths() -> tuple[Path, Path]:
    return fixture_paths(bookgen.SMALL)


@pytest.fixture(scope="session")
def large_book_paths() -> tuple[Path, Path]:
    return fixture_paths(bookgen.LARGE)
