from pathlib import Path

import pytest

from teaindex.corpus import load_corpus
from teaindex.preprocessing import (english_ruleset, french_cleaning_config, french_ruleset,
                                    preprocess_document)

FIXTURES = Path(__file__).parent / "fixtures"
BRAIN_CT = FIXTURES / "brain_ct" / "manifest.json"
MESH_EXCERPT = FIXTURES / "mesh_excerpt.rdf"
MINI_THESAURUS = FIXTURES / "mini_thesaurus.rdf"

GOLDEN_KEYWORDS = {"hématome fronto pariétale", "hémorragie méningée", "inondation ventriculaire"}


@pytest.fixture(scope="session")
def fr_cleaning():
    return french_cleaning_config()


@pytest.fixture(scope="session")
def fr_rules():
    return french_ruleset()


@pytest.fixture(scope="session")
def en_rules():
    return english_ruleset()


@pytest.fixture(scope="session")
def brain_corpus():
    return load_corpus(BRAIN_CT)


@pytest.fixture(scope="session")
def brain_docs(brain_corpus, fr_cleaning, fr_rules):
    return [preprocess_document(a, fr_cleaning, fr_rules) for a in brain_corpus.annotations]


# -- acceptance summary: one PASS/FAIL line per criterion ------------------------

_criteria: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if name.startswith("test_criterion_"):
        _criteria.setdefault(name, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        outcomes = _criteria[name]
        failed = sum(o != "passed" for o in outcomes)
        status = "PASS" if failed == 0 else "FAIL"
        detail = f"{len(outcomes) - failed}/{len(outcomes)} cases"
        label = name[len("test_criterion_"):]
        terminalreporter.write_line(f"{status}  criterion {label}  ({detail})")
