"""
Exception hierarchy shared by every randlab module
"""


class RandlabError(Exception):
    """Base class for all randlab errors"""


class InvalidParameterError(RandlabError, ValueError):
    """A parameter lies outside the range an operation accepts"""


class DuplicateKeyError(RandlabError, KeyError):
    """Key already present (or repeated in a build set)"""


class MissingKeyError(RandlabError, KeyError):
    """Key not present"""


class DisconnectedGraphError(RandlabError, ValueError):
    """Edge contraction needs a connected multigraph"""


class LoadLimitExceeded(RandlabError, ValueError):
    """Cuckoo table would exceed its load limit; caller must grow it"""


class ContractViolation(RandlabError, ValueError):
    """Caller broke an operation's contract (e.g. removing a key never inserted)"""


class ModeError(RandlabError, ValueError):
    """Operation not available in the sketch's update mode"""


class ConfigurationMismatch(RandlabError, ValueError):
    """Two structures that must share parameters do not"""


class SerializationError(RandlabError, ValueError):
    """Malformed or unsupported serialized payload"""


class UnknownMetricError(RandlabError, KeyError):
    """No closed-form prediction or suite registered under this name"""


class BitsExhausted(RandlabError, RuntimeError):
    """A scripted random source ran out of bits"""


class TrialError(RandlabError, RuntimeError):
    """A module error raised inside a harness trial"""

    def __init__(self, suite: str, trial: int, cause: Exception):
        self.suite = suite
        self.trial = trial
        self.cause = cause
        super().__init__(f"{suite}: trial {trial} failed: {type(cause).__name__}: {cause}")
