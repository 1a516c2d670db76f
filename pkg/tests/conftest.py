from __future__ import annotations

import pytest

from widgetlens.engine import Engine, fixture_path
from widgetlens.model import load_model


@pytest.fixture(scope="session")
def engine() -> Engine:
    return Engine.fixture()


@pytest.fixture(scope="session")
def tables(engine):
    return engine.tables()


@pytest.fixture(scope="session")
def form_text() -> str:
    return fixture_path("request_form.xml").read_text(encoding="utf-8")


@pytest.fixture
def form(form_text):
    return load_model(form_text, "request_form.xml")


@pytest.fixture(scope="session")
def defs_by_name(engine):
    return {d.name: d for d in engine.defs}
