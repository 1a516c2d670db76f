"""Bidirectional virtualization of widget trees.

Native widget models are parsed into virtual models by a prioritized,
backtracking GLR parser generated from declarative virtual-widget
definitions, and virtual widgets are synthesized back into native trees.
"""

from widgetlens.errors import (
    DefsError,
    GrammarError,
    MetamodelError,
    ModelError,
    ParseError,
    SynthesisError,
    TableError,
    WidgetLensError,
)
from widgetlens.model import Model, Widget, find_widget, fresh_id, load_model, save_model

__all__ = [
    "DefsError",
    "GrammarError",
    "MetamodelError",
    "Model",
    "ModelError",
    "ParseError",
    "SynthesisError",
    "TableError",
    "Widget",
    "WidgetLensError",
    "find_widget",
    "fresh_id",
    "load_model",
    "save_model",
]
