"""
Pytest configuration and fixtures.
"""

import os
import random

import pytest

# Set test environment
os.environ["LCK_BACKEND"] = "exact"
os.environ["LOG_LEVEL"] = "WARNING"
os.environ["SEARCH_WORKERS"] = "2"

from app.core.scalars import get_backend
from app.core.triples import (
    build_abelian_kahler,
    build_counterexample,
    build_d4,
    build_gb,
)
from app.services.document_service import DocumentService
from config.settings import get_settings


@pytest.fixture(autouse=True)
def clear_settings_cache():
    """Settings are re-read for every test so monkeypatched environment takes effect."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def settings():
    """Get test settings."""
    return get_settings()


@pytest.fixture
def exact():
    return get_backend("exact")


@pytest.fixture
def floating():
    return get_backend("float", 1e-9)


@pytest.fixture
def d4_triple(exact):
    return build_d4(exact)


@pytest.fixture
def gb_triple(exact):
    """𝔤_1."""
    return build_gb(1, exact)


@pytest.fixture
def counterexample_triple(exact):
    return build_counterexample(exact)


@pytest.fixture
def abelian_plane(exact):
    """Abelian 2-dimensional Kähler algebra with g = Id."""
    return build_abelian_kahler(1, exact)


@pytest.fixture
def document_service(exact):
    return DocumentService(exact)


@pytest.fixture
def rng():
    """Seeded random generator for property tests."""
    return random.Random(20240611)


@pytest.fixture
def temp_dir(tmp_path):
    """Temporary directory for written documents."""
    return tmp_path
