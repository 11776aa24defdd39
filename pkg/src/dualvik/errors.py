"""Exception hierarchy shared by all modules."""


class DualvikError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(DualvikError, ValueError):
    """Malformed input: bad names, bad pair lists, failed axioms on load."""


class AlgebraMismatchError(DualvikError, ValueError):
    """Operands belong to different algebras (or dimensions do not line up)."""


class CapExceededError(DualvikError, ValueError):
    """An enumeration would exceed a configured size cap."""


class CompatibilityError(DualvikError, ValueError):
    """A morphism is not compatible with the S5 structure on its ends."""


class ParseError(DualvikError, ValueError):
    """Syntax error in a term or element expression.

    ``pos`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}")
