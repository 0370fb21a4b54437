import streamlit as st
from typing import Any, Callable, Dict, List


class ReportDisplay:
    @staticmethod
    def display_reports(reports: List[Dict[str, Any]]):
        for report in reversed(reports):
            st.markdown(f"**Text:** {report['text']}  \n**Predicted:** {report['predicted']}")
            st.markdown(report["highlight"], unsafe_allow_html=True)
            with st.expander("p(f|w,s) and most probable feature per word"):
                st.markdown(report["subscripts"], unsafe_allow_html=True)
                st.markdown(report["word_heatmap"], unsafe_allow_html=True)
            st.divider()


class InputArea:
    def __init__(self, on_submit: Callable[[str], None]):
        self.on_submit = on_submit

    def render(self):
        st.text_input(
            "Enter a text to interpret:",
            key="user_input",
            on_change=self._handle_input
        )

    def _handle_input(self):
        if st.session_state.user_input:
            self.on_submit(st.session_state.user_input)
            st.session_state.user_input = ""


class ModelControls:
    """Sidebar form naming the checkpoint and the data it was trained on."""

    def __init__(self, on_load: Callable[[Dict[str, Any]], None], defaults: Dict[str, Any]):
        self.on_load = on_load
        self.defaults = defaults

    def render(self):
        with st.sidebar:
            st.header("Model")
            dataset = st.selectbox("Dataset", ["trec", "sst2", "agnews"])
            model = st.selectbox("Architecture", ["dolfin-conv", "dolfin-bilstm"])
            seed = st.number_input("Seed", min_value=0, value=1, step=1)
            data_dir = st.text_input("Data directory", value=self.defaults.get("data_dir") or "")
            checkpoint = st.text_input("Checkpoint (empty: default path)", value="")
            delta = st.slider("Firing threshold delta", 0.0, 1.0, 0.5, 0.05)
            if st.button("Load model"):
                self.on_load({
                    "dataset": dataset,
                    "model": model,
                    "seed": int(seed),
                    "data_dir": data_dir or None,
                    "checkpoint": checkpoint or None,
                    "delta": delta,
                    "checkpoint_dir": self.defaults["checkpoint_dir"],
                    "report_dir": self.defaults["report_dir"],
                    "progress": False,
                })
