"""Error types shared across the interpreter and simulator."""


class CcrError(Exception):
    """Base class for all errors raised by ccrsim."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self):
        if self.line is not None:
            if self.column is not None:
                return f"{self.line}:{self.column}: {self.message}"
            return f"{self.line}: {self.message}"
        return self.message


class LexError(CcrError):
    """Invalid character or unterminated string in the source."""


class ParseError(CcrError):
    """Token stream does not match the grammar."""


class EvalError(CcrError):
    """Expression cannot be evaluated (unbound name, type mismatch, ...)."""


class ExpandError(CcrError):
    """Script-level error found while flattening the AST."""


class PlanningError(CcrError):
    """No feasible path between two poses for the given turn constraint."""


class ProfileError(CcrError):
    """Speed profile cannot cover the path under the given limits."""


class SceneError(CcrError):
    """Invalid scene declaration (duplicate area, bad dimensions, ...)."""
