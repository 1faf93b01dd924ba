import pytest

from corrobe.sg import SynonymLexicon, TaskVocab


@pytest.fixture(scope="session")
def lex() -> SynonymLexicon:
    return SynonymLexicon.default()


@pytest.fixture(scope="session")
def vocab() -> TaskVocab:
    return TaskVocab.default()


@pytest.fixture(scope="session")
def empty_lex() -> SynonymLexicon:
    return SynonymLexicon.empty()


@pytest.fixture(scope="session")
def fixture_session(tmp_path_factory):
    """One fully built and analyzed synthetic session, shared across tests."""
    from corrobe.corruption.specs import CorruptionSpec
    from corrobe.fixtures import build_fixture
    from corrobe.pipeline import Session, run_corrupt, run_discovery, run_evaluate, run_tasks
    from corrobe.sg import TaskCategory

    root = tmp_path_factory.mktemp("session")
    info = build_fixture(root)
    session = Session.load(root)
    params = session.corruption_params()
    keys = ["clean", "snow_1", "snow_2", "snow_3", "snow_4", "snow_5"]
    run_corrupt(session, specs=[CorruptionSpec.from_key(k, params) for k in keys], seed=0)
    for key in keys:
        run_evaluate(session, key)
    run_tasks(session, "clean")
    run_tasks(session, "snow_4")
    run_discovery(session, "snow_4", TaskCategory.RELATION)
    return session, info
