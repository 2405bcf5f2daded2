import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).parent))  # for the interp helper

from construct import fixtures, ga  # noqa: E402
from construct.container import load_container  # noqa: E402


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    d = REPO / "fixtures"
    assert d.is_dir(), "committed fixtures missing; run python -m construct.fixtures"
    return d


def _bundle(root: Path):
    cm = load_container(root)
    problem = ga.problem_from_container(cm)
    import json
    genes = tuple(json.loads((root / "ground_truth.json").read_text())["genes"])
    return {"root": root, "container": cm, "problem": problem, "ground_truth": genes}


@pytest.fixture(scope="session")
def pi_case(fixtures_dir):
    return _bundle(fixtures_dir / "pi")


@pytest.fixture(scope="session")
def pid_case(fixtures_dir):
    return _bundle(fixtures_dir / "pid")


@pytest.fixture(scope="session")
def limpid_case(fixtures_dir):
    return _bundle(fixtures_dir / "limpid")


@pytest.fixture(scope="session")
def all_cases(pi_case, pid_case, limpid_case):
    return {"pi": pi_case, "pid": pid_case, "limpid": limpid_case}


@pytest.fixture(scope="session")
def tiny_case(tmp_path_factory):
    root, genes = fixtures.build_tiny_fixture(tmp_path_factory.mktemp("tiny") / "tiny")
    cm = load_container(root)
    problem = ga.problem_from_container(cm)
    return {"root": root, "container": cm, "problem": problem, "ground_truth": genes}
