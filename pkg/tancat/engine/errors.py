"""Exceptions raised by the engine and the script front end."""


class TancatError(Exception):
    """Base class for every engine error."""


class VariableMismatchError(TancatError):
    """A polynomial or ring was used over the wrong variable list."""


class DomainMismatchError(TancatError):
    """Morphisms or objects that should line up do not."""


class IllDefinedMorphismError(TancatError):
    """Generator images do not respect the domain relations."""


class InvalidPointError(TancatError):
    """Coordinates that do not satisfy the ring relations."""


class ResourceBudgetError(TancatError):
    """Buchberger exceeded its step budget."""


class PairingError(TancatError):
    """Maps into a fibre product do not agree over the base."""


class NotSplitFormError(TancatError):
    """A bundle presentation is outside the split fragment."""


class UndecidedError(TancatError):
    """Module equality outside the decidable fragment."""


class PreBundleError(TancatError):
    """A (q, z, lambda) triple fails a pre-differential bundle equation."""


class BundleAxiomError(TancatError):
    """A bundle built by the engine fails its own diagram checks."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class ScriptError(TancatError):
    """Any problem with a script; maps to exit code 2."""


class ParseError(ScriptError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}" if line else message)


class UnresolvedNameError(ScriptError):
    """A script references a name it never declared."""
