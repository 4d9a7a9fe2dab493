"""Exception hierarchy shared by every splitgame module."""


class SplitGameError(Exception):
    """Base class for all library errors."""


class VocabularyMismatch(SplitGameError):
    pass


class OutOfUniverse(SplitGameError):
    pass


class TooLarge(SplitGameError):
    pass


class InvalidFormula(SplitGameError):
    """A formula violates table totality or the split free-variable convention."""


class WidthExceeded(SplitGameError):
    pass


class UnboundVariable(SplitGameError):
    pass


class NotBinary(SplitGameError):
    pass


class EmptySeed(SplitGameError):
    pass


class NotSubstructure(SplitGameError):
    pass


class NotChain(SplitGameError):
    pass


class InvalidPosition(SplitGameError):
    pass


class NoDistinguisher(SplitGameError):
    pass


class NotEquivalence(SplitGameError):
    pass


class UnknownSuite(SplitGameError):
    pass


class ParseError(SplitGameError):
    """Base for located parse failures."""

    def __init__(self, message, origin="<string>", line=0, column=0):
        self.message = message
        self.origin = origin
        self.line = line
        self.column = column
        super().__init__(f"{origin}:{line}:{column}: {message}")


class SourceSyntaxError(ParseError):
    pass


class SemanticError(ParseError):
    pass
