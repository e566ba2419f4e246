"""Exception types raised by cwmark.

Everything derives from CwmarkError; most classes also derive from
ValueError so callers that only care about "bad input" can catch that.
"""


class CwmarkError(Exception):
    """Base class for all cwmark errors."""


# --- codec ---------------------------------------------------------------

class CapacityError(CwmarkError, ValueError):
    """Message index does not fit the code: B >= binomial(L, alpha)."""


class MessageRangeError(CwmarkError, ValueError):
    """Integer does not fit in k bits (B >= 2**k)."""


class MalformedCodewordError(CwmarkError, ValueError):
    """Codeword has the wrong length or a Hamming weight other than alpha."""


# --- threshold design ----------------------------------------------------

class ThresholdDesignError(CwmarkError, ValueError):
    """Threshold formula produced a non-positive T1.

    Happens for one-sided designs with rate <= 0.5; pick a larger rate or
    set the thresholds explicitly.
    """


# --- position selection --------------------------------------------------

class SelectionRatioError(CwmarkError, ValueError):
    """Selected positions are too dense relative to the host vector."""


class PositionRangeError(CwmarkError, ValueError):
    """A spec position index falls outside the paired weight vector."""


# --- weight files ---------------------------------------------------------

class WeightFileError(CwmarkError, ValueError):
    """Base class for weight-file parse errors."""


class BadMagicError(WeightFileError):
    """File does not start with the expected magic bytes."""


class UnsupportedVersionError(WeightFileError):
    """File declares a format version this reader does not support."""


class TruncatedPayloadError(WeightFileError):
    """File is shorter than its header declares."""


class TrailingDataError(WeightFileError):
    """File is longer than its header declares."""


class NonFiniteWeightError(WeightFileError):
    """Weight payload contains NaN or infinity."""


# --- spec files -----------------------------------------------------------

class SpecFormatError(CwmarkError, ValueError):
    """Spec document is syntactically or structurally invalid."""
