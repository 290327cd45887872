"""Exception types shared across the toolkit.

Every domain error derives from StenokitError; the CLI maps these to exit
code 1 and prints ``error[<ClassName>]: <message>`` so scripts can match on
a stable code.
"""


class StenokitError(Exception):
    """Base class for all domain errors raised by stenokit."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- codec ---------------------------------------------------------------

class UnknownScheme(StenokitError):
    pass


class InputContainsPlaceholder(StenokitError):
    """Encoding input already contains reserved placeholder codepoints."""


class UnknownPlaceholder(StenokitError):
    """Decoding met a placeholder that is not in the scheme's table."""


# --- metrics -------------------------------------------------------------

class EmptyReference(StenokitError):
    """One or more reference lines are empty at the chosen level."""

    def __init__(self, line_ids):
        self.line_ids = list(line_ids)
        super().__init__("empty reference for line(s): " + ", ".join(map(str, self.line_ids)))


class LengthMismatch(StenokitError):
    pass


# --- ctc -----------------------------------------------------------------

class NonFiniteValue(StenokitError):
    pass


class BadMagic(StenokitError):
    pass


class VersionMismatch(StenokitError):
    pass


class TruncatedTensor(StenokitError):
    pass


class CharsetMismatch(StenokitError):
    pass


# --- preproc -------------------------------------------------------------

class DegenerateRangeWarning(UserWarning):
    """Low and high stretch percentiles coincide; output forced to zero."""


# --- synth ---------------------------------------------------------------

class MissingBoxes(StenokitError):
    def __init__(self, line_ids):
        self.line_ids = list(line_ids)
        super().__init__("no word boxes for line(s): " + ", ".join(map(str, self.line_ids)))


class EmptyPool(StenokitError):
    pass


# --- corpus --------------------------------------------------------------

class ParseError(StenokitError):
    pass


class DuplicateId(StenokitError):
    pass


class UnknownType(StenokitError):
    pass


class EmptyDocument(StenokitError):
    pass
