class EvaluationError(Exception):
    """Base class for evaluation harness errors."""

    pass


class InvalidAttackError(EvaluationError, ValueError):
    """Attack kind unknown or parameter out of range."""

    pass


class EmptyCorpusError(EvaluationError, ValueError):
    """Evaluation requested on a corpus with no images."""

    pass


class ManifestError(EvaluationError):
    """Corpus manifest missing or unreadable."""

    pass


class ReportWriteError(EvaluationError):
    """CSV report or plot could not be written."""

    pass


class SampleSizeError(EvaluationError, ValueError):
    """Sample count or dimension outside the valid range."""

    pass
