from pathlib import Path

import pytest

from svsp.dsl import parse_spec

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"
MINI_GKS = FIXTURES / "mini_gks.svsp"


@pytest.fixture(scope="session")
def mini_gks_text() -> str:
    return MINI_GKS.read_text()


@pytest.fixture(scope="session")
def mini_gks(mini_gks_text):
    outcome = parse_spec(mini_gks_text)
    assert outcome.ok, [d.render() for d in outcome.diagnostics]
    return outcome.spec
