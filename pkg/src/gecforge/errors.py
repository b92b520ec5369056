"""Exception types shared across the toolkit."""


class GecforgeError(Exception):
    """Base class for all toolkit errors."""


class InputContractError(GecforgeError):
    """Caller violated an input contract (bad shapes, malformed data, bad flags)."""


class UnknownTagError(InputContractError):
    """A tag code outside the 26-code taxonomy."""


class MalformedMaskError(InputContractError):
    """A conditioning mask that is not 26 characters over {a, b}."""


class MalformedInputError(InputContractError):
    """A payload that cannot be serialized (embedded newline or tab)."""


class MalformedLineError(InputContractError):
    """A training line that does not parse; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ShapeError(InputContractError):
    """Prediction/gold matrices do not line up."""


class BadGridError(InputContractError):
    """Threshold sweep step outside (0, 1]."""


class InvalidPlanError(InputContractError):
    """A corruption plan replayed against a sentence it no longer matches."""


class AdapterError(GecforgeError):
    """Base class for external-model adapter failures."""


class AdapterTimeoutError(AdapterError):
    """The external process did not reply within the configured timeout."""


class AdapterProtocolError(AdapterError):
    """The external process replied with a frame that violates the wire protocol."""
