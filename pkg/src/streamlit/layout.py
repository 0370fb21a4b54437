import streamlit as st
from typing import Any, Dict

from src.components.interpret.render import render_feature_subscripts, render_heatmap, render_highlight
from src.components.interpret.support import feature_informativeness, word_support
from src.components.data.tokenizer import tokenize
from src.config.models import RunConfig
from src.core.errors import DolfinError
from src.orchestrator.coordinator import Coordinator
from src.streamlit.predefined_questions import PredefinedQuestionsManager
from src.streamlit.ui_component import InputArea, ModelControls, ReportDisplay


class InterpretationViewerUI:
    def __init__(self, session_state, defaults: Dict[str, Any]):
        self.session_state = session_state
        self.report_display = ReportDisplay()
        self.input_area = InputArea(self._handle_user_input)
        self.model_controls = ModelControls(self._handle_load, defaults)
        self.predefined_questions = PredefinedQuestionsManager()

    def render(self):
        st.set_page_config(page_title="Latent Feature Viewer", layout="wide")
        st.title("Latent Feature Viewer")
        self.model_controls.render()

        loaded = self.session_state.loaded
        if loaded is None:
            st.info("Load a trained latent-feature checkpoint from the sidebar to start.")
            return

        st.subheader("q(c|f)")
        table = loaded["table"]
        feature_labels = [f"f{j}" for j in range(table.d)]
        st.markdown(render_heatmap(table.q.T, feature_labels, table.categories), unsafe_allow_html=True)
        st.caption(
            "normalized entropy per feature: "
            + ", ".join(f"{label} {h:.2f}" for label, h in zip(feature_labels, feature_informativeness(table)))
        )

        self._render_predefined_questions(loaded["config"].dataset)
        self.input_area.render()
        self.report_display.display_reports(self.session_state.reports)

    def _render_predefined_questions(self, dataset: str):
        if self.session_state.show_predefined:
            st.subheader("Sample texts")
            questions = self.predefined_questions.get_questions(dataset)
            col1, col2 = st.columns(2)

            for i, question in enumerate(questions):
                with col1 if i < len(questions) // 2 else col2:
                    st.button(
                        question,
                        key=f"pred_q_{i}",
                        on_click=self._handle_user_input,
                        args=(question,)
                    )

    def _handle_load(self, values: Dict[str, Any]):
        try:
            cfg = RunConfig(command="interpret", **values)
            coordinator = Coordinator(cfg)
            model, splits, vocab, _ = coordinator.restore()
            table = coordinator.support_table(model, splits, vocab)
        except (DolfinError, ValueError) as e:
            st.error(str(e))
            return
        self.session_state.loaded = {
            "config": cfg, "model": model, "vocab": vocab, "table": table, "categories": splits.categories
        }
        self.session_state.reports.clear()
        self.session_state.show_predefined = True

    def _handle_user_input(self, user_input: str):
        loaded = self.session_state.loaded
        tokens = tokenize(user_input)
        if loaded is None or not tokens:
            return
        self.session_state.show_predefined = False
        categories = loaded["categories"]
        ws = word_support(loaded["model"], loaded["table"], loaded["vocab"].encode(tokens), tokens)
        predicted = categories[ws.predicted]
        self.session_state.reports.append({
            "text": user_input,
            "predicted": predicted,
            "highlight": render_highlight(ws, categories),
            "subscripts": render_feature_subscripts([(ws, "?", predicted)]),
            "word_heatmap": render_heatmap(ws.p, tokens, [f"f{j}" for j in range(ws.p.shape[1])]),
        })
