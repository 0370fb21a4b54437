from dataclasses import asdict

from src.streamlit.predefined_questions import PredefinedQuestionsManager
from src.streamlit.session import SessionState


def test_fresh_session_has_nothing_loaded():
    state = asdict(SessionState())
    assert state == {"reports": [], "loaded": None, "show_predefined": True}


def test_sessions_do_not_share_reports():
    first, second = SessionState(), SessionState()
    first.reports.append({"text": "x"})
    assert second.reports == []


def test_sample_texts_per_dataset():
    manager = PredefinedQuestionsManager()
    for dataset in ("trec", "sst2", "agnews"):
        assert manager.get_questions(dataset)
    assert manager.get_questions("imdb") == []
