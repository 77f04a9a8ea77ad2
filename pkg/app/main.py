"""
Main entry point for the Reinforced Walk Lab dashboard.

Run with `streamlit run app/main.py`. The sidebar lists the registered
verification checks plus a regime calculator; a check page edits the check's
settings, runs it on demand and shows the reports as a table.
"""
import logging
import sys
from pathlib import Path

import streamlit as st

# Add the repository root to the path so the app package imports
sys.path.append(str(Path(__file__).parent.parent))

from app.checks import CHECKS
from app.config import APP_NAME, VERSION, setup_logging
from app.errors import ReinforceError
from app.session_state import clear_reports, get_all_reports, get_reports, init_session_state, store_reports
from app.utils.export_utils import get_output_path, reports_to_json
from app.utils.theory import Model, regime
from app.utils.ui_utils import reports_table, settings_form

logger = logging.getLogger(__name__)

REGIME_PAGE = "Regime calculator"


def init() -> None:
    """Initialize the application."""
    setup_logging()
    init_session_state()
    st.set_page_config(
        page_title=f"{APP_NAME} {VERSION}",
        layout="wide",
        initial_sidebar_state="expanded",
    )


def render_sidebar() -> str:
    """Render the check selector and return the selected page."""
    st.sidebar.title("Checks")
    pages = [REGIME_PAGE] + sorted(CHECKS)
    selected = st.sidebar.radio("Select a page:", pages, index=0, key="selected_page")
    st.session_state.seed = int(
        st.sidebar.number_input("Base seed", value=int(st.session_state.seed), step=1)
    )
    st.sidebar.markdown("---")
    st.sidebar.markdown(f"**{APP_NAME}** v{VERSION}")
    if get_all_reports() and st.sidebar.button("Clear results", use_container_width=True):
        clear_reports()
        st.rerun()
    return selected


def render_regime_page() -> None:
    st.header(REGIME_PAGE)
    model = Model(st.selectbox("Model", [m.value for m in Model]))
    b = st.number_input("b", min_value=0.0, value=1.0, format="%g")
    p = st.number_input("p", min_value=0.001, max_value=0.999, value=0.5, format="%g")
    alpha = None
    if model is Model.SRS:
        alpha = st.number_input("alpha", min_value=0.01, max_value=2.0, value=2.0, format="%g")
    try:
        st.json(regime(model, b, p, alpha).model_dump(mode="json"))
    except ReinforceError as exc:
        st.error(str(exc))


def render_check_page(name: str) -> None:
    """Settings form, run button and report table for one check."""
    check_cls = CHECKS[name]
    st.header(name)
    st.markdown(f"*Criterion {check_cls.config.criterion}*: {check_cls.config.description}")
    settings = settings_form(check_cls.Settings, key=name)
    if settings is not None and st.button("Run check", type="primary"):
        with st.spinner(f"Running {name}..."):
            try:
                store_reports(name, check_cls(settings).run(int(st.session_state.seed)))
            except ReinforceError as exc:
                logger.exception("Check %s failed", name)
                st.error(str(exc))

    reports = get_reports(name)
    if not reports:
        st.info("No results yet. Adjust the settings and run the check.")
        return
    passed = sum(r.passed for r in reports)
    st.metric("Passed", f"{passed}/{len(reports)}")
    st.dataframe(reports_table(reports), use_container_width=True)
    payload = reports_to_json(reports)
    st.download_button(
        label="Download JSON", data=payload, file_name=f"{name}.json", mime="application/json"
    )
    if st.button("Save to output folder"):
        path = get_output_path(f"{name}-seed{st.session_state.seed}.json")
        path.write_text(payload, encoding="utf-8")
        st.success(f"Saved {path}")


def main() -> None:
    """Main application function."""
    init()
    selected = render_sidebar()
    if selected == REGIME_PAGE:
        render_regime_page()
    else:
        render_check_page(selected)


if __name__ == "__main__":
    main()
