"""
Session state management for the verification dashboard.
"""
from typing import Any, Dict, List, Optional

import streamlit as st

from .config import get_default_session_state


def init_session_state() -> None:
    """Initialize the session state with default values."""
    for key, value in get_default_session_state().items():
        if key not in st.session_state:
            st.session_state[key] = value


def store_reports(check_name: str, reports: List[Any]) -> None:
    """Remember the latest reports of a check."""
    st.session_state.setdefault("reports", {})[check_name] = reports
    st.session_state.active_check = check_name


def get_reports(check_name: str) -> Optional[List[Any]]:
    return st.session_state.get("reports", {}).get(check_name)


def get_all_reports() -> Dict[str, List[Any]]:
    return st.session_state.get("reports", {})


def clear_reports() -> None:
    st.session_state.reports = {}
    st.session_state.active_check = None
