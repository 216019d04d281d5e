"""Exception types raised by conformal_lab."""


class ConformalLabError(Exception):
    pass


class RankError(ConformalLabError, ValueError):
    """Index out of range or mismatched ranks."""


class NonInvertibleAlpha(ConformalLabError):
    """α is not invertible over ℚ[∂] (its determinant is not a nonzero constant)."""


class NonSurjectiveAlpha(NonInvertibleAlpha):
    """Raised where surjectivity of α is required; checked as regularity."""


class NotAlphaFixed(ConformalLabError, ValueError):
    pass


class InvalidTriple(ConformalLabError, ValueError):
    pass


class NotQuasiderivation(ConformalLabError, ValueError):
    pass


class ModuleMismatch(ConformalLabError, ValueError):
    pass


class UndeclaredBasis(ConformalLabError, ValueError):
    pass


class DefinitionSyntaxError(ConformalLabError, SyntaxError):
    """Malformed definition text.  ``lineno``/``offset`` are 1-based."""

    def __init__(self, msg: str, lineno: int = 1, offset: int = 1, expected=(), text: str = ""):
        self.expected = tuple(expected)
        detail = msg
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(f"line {lineno}, column {offset}: {detail}")
        self.msg = detail
        self.lineno = lineno
        self.offset = offset
        self.text = text

    def __str__(self) -> str:
        return f"line {self.lineno}, column {self.offset}: {self.msg}"
