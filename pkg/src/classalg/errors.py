"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: :class:`SyntaxProblem` subclasses exit
with 2, :class:`BoundExceeded` with 3, everything else with 1.
"""


class ClassAlgebraError(Exception):
    """Base class for all errors raised by this package."""


class SyntaxProblem(ClassAlgebraError):
    """An error tied to a byte offset in some source text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at byte {position}")
        self.message = message
        self.position = position


class LexError(SyntaxProblem):
    pass


class ParseError(SyntaxProblem):
    pass


class SortError(SyntaxProblem):
    """A class-sorted subtree was used where a relation is required, or vice versa."""


class UnsupportedOperator(ClassAlgebraError):
    pass


class UnknownAtom(ClassAlgebraError):
    pass


class UnknownObject(ClassAlgebraError):
    pass


class UnknownReference(ClassAlgebraError):
    pass


class UnknownProperty(ClassAlgebraError):
    pass


class DuplicateName(ClassAlgebraError):
    pass


class CyclicDefinition(ClassAlgebraError):
    pass


class TooManyAtoms(ClassAlgebraError):
    pass


class EmptyUniverse(ClassAlgebraError):
    pass


class UniverseMismatch(ClassAlgebraError):
    pass


class ArityMismatch(ClassAlgebraError):
    pass


class SideConditionViolated(ClassAlgebraError):
    pass


class PatternMismatch(ClassAlgebraError):
    pass


class BoundExceeded(ClassAlgebraError):
    """Saturation grew past its statement bound.

    ``partial`` holds whatever closure had been computed when the bound tripped.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class LoadError(ClassAlgebraError):
    """A world or statement file failed to load; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
