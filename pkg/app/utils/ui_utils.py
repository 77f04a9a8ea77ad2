"""
UI Utilities

Streamlit components shared by the dashboard pages.
"""
import json
import logging
from typing import Any, Dict, List, Optional, Type, TypeVar

import streamlit as st
from pydantic import BaseModel, ValidationError

logger = logging.getLogger(__name__)

SettingsT = TypeVar("SettingsT", bound=BaseModel)


def _widget(name: str, field, default: Any, key: str) -> Any:
    label = field.description or name
    widget_key = f"{key}_{name}"
    if isinstance(default, bool):
        return st.checkbox(label, value=default, key=widget_key)
    if isinstance(default, int):
        return int(st.number_input(label, value=default, step=1, key=widget_key))
    if isinstance(default, float):
        return float(st.number_input(label, value=default, format="%g", key=widget_key))
    if isinstance(default, str):
        return st.text_input(label, value=default, key=widget_key)
    # Lists, tuples and nested models are edited as JSON
    if isinstance(default, BaseModel):
        default = default.model_dump(mode="json")
    raw = st.text_input(label, value=json.dumps(default), key=widget_key)
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def settings_form(
    settings_cls: Type[SettingsT], key: str, current: Optional[SettingsT] = None
) -> Optional[SettingsT]:
    """
    Render one input per field of a pydantic settings model.

    Args:
        settings_cls: The model class to edit.
        key: Unique widget key prefix.
        current: Values to start from; defaults to the model defaults.

    Returns:
        A validated settings instance, or None if validation failed.
    """
    base = current if current is not None else settings_cls()
    values: Dict[str, Any] = {}
    for name, field in settings_cls.model_fields.items():
        values[name] = _widget(name, field, getattr(base, name), key)
    try:
        return settings_cls(**values)
    except ValidationError as exc:
        st.error(f"Invalid settings: {exc.error_count()} error(s)")
        for err in exc.errors():
            st.caption(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}")
        return None


def reports_table(reports: List[Any]) -> List[Dict[str, Any]]:
    """Rows for st.dataframe from MCReports."""
    return [
        {
            "name": r.name,
            "estimate": r.estimate,
            "se": r.se,
            "target": r.target,
            "rule": f"{r.rule.kind.value}({r.rule.value:g})",
            "pass": r.passed,
            "replicas": r.replicas,
        }
        for r in reports
    ]
