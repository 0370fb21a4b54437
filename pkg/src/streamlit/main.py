from dataclasses import asdict

import streamlit as st

from src.config.settings import Settings
from src.streamlit.layout import InterpretationViewerUI
from src.streamlit.session import SessionState


def main():
    # Initialize session state variables if they don't exist
    for name, value in asdict(SessionState()).items():
        if name not in st.session_state:
            st.session_state[name] = value

    settings = Settings()
    defaults = {
        "data_dir": settings.data_dir,
        "checkpoint_dir": settings.checkpoint_dir,
        "report_dir": settings.report_dir,
    }
    ui = InterpretationViewerUI(st.session_state, defaults)
    ui.render()


if __name__ == "__main__":
    main()
