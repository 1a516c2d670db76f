from __future__ import annotations


class WidgetLensError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class ModelError(WidgetLensError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class MetamodelError(WidgetLensError):
    pass


class DefsError(WidgetLensError):
    pass


class GrammarError(WidgetLensError):
    pass


class TableError(WidgetLensError):
    pass


class ParseError(WidgetLensError):
    pass


class SynthesisError(WidgetLensError):
    pass
