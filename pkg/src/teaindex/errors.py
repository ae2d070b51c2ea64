"""Exception hierarchy shared by every stage of the indexing pipeline."""


class TeaError(Exception):
    """Base class for all errors raised by teaindex."""


class IngestionError(TeaError):
    """An input file could not be read or decoded."""


class ValidationError(TeaError):
    """Input parsed, but violates a structural invariant."""


class ParseError(TeaError):
    """A data file is malformed. Carries the offending line when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class ConfigurationError(TeaError):
    """Pipeline configuration is missing or inconsistent."""


class StatisticsError(TeaError):
    """Corpus statistics are undefined (e.g. no non-empty document)."""


class DomainError(TeaError, ValueError):
    """A scoring function was called outside its domain."""


class NoCooccurrenceError(DomainError):
    """Mutual information requested for a pair that never co-occurs."""


class PipelineError(TeaError):
    """The indexing pipeline cannot produce an index from its inputs."""


class IntegrityError(TeaError):
    """A persisted index failed its checksum."""


class FormatVersionError(TeaError):
    """A persisted index was written by an incompatible format version."""
