"""Custom exception classes for the IPIS toolkit."""


class IpisKitException(Exception):
    """Base exception for all toolkit-specific errors."""

    def __init__(self, message: str, details: str | None = None):
        self.message = message
        self.details = details
        super().__init__(self.message)


class NotationRenderError(IpisKitException):
    """Raised when rendering a token that could not be parsed."""

    def __init__(self, text: str, reason: str):
        super().__init__(
            message=f"Cannot render unparseable token {text!r}: {reason}",
            details="Only plain words, star forms and slash pairs can be rendered"
        )
        self.text = text
        self.reason = reason


class DatasetFormatError(IpisKitException):
    """Raised when a dataset or predictions file is not valid JSON / JSON Lines."""

    def __init__(self, path: str, line: int | None, reason: str):
        location = f"{path}:{line}" if line is not None else path
        super().__init__(
            message=f"Malformed JSON in {location}: {reason}",
            details="Expected JSON Lines or a JSON array of objects"
        )
        self.path = path
        self.line = line
        self.reason = reason


class RecordValidationError(IpisKitException):
    """Raised when an IPIS record violates the record schema."""

    def __init__(self, where: str, reason: str):
        super().__init__(
            message=f"Invalid record {where}: {reason}",
            details="Check the IPIS field names and language codes (PL/EN)"
        )
        self.where = where
        self.reason = reason


class LexiconError(IpisKitException):
    """Raised when a rewriter lexicon line is malformed or inconsistent."""

    def __init__(self, line: int, reason: str):
        super().__init__(
            message=f"Lexicon line {line}: {reason}",
            details="Columns: masc_form fem_form star_form category case_tag [osoba_form] [neutral_form]"
        )
        self.line = line
        self.reason = reason


class GenreProfileError(IpisKitException):
    """Raised when a genre profile is unknown or malformed."""

    def __init__(self, genre: str, reason: str = "unknown genre"):
        super().__init__(
            message=f"Genre profile {genre!r}: {reason}",
            details="See assets/genres.json for the bundled profiles"
        )
        self.genre = genre


class StrategyNotAllowedError(IpisKitException):
    """Raised when a strategy override is not permitted by the genre profile."""

    def __init__(self, strategy: str, genre: str, allowed: list[str]):
        super().__init__(
            message=f"Strategy {strategy!r} is not allowed for genre {genre!r}",
            details=f"Allowed strategies: {', '.join(allowed)}"
        )
        self.strategy = strategy
        self.genre = genre
        self.allowed = allowed


class PromptBuildError(IpisKitException):
    """Raised when a prompt bundle cannot be assembled."""

    def __init__(self, reason: str, ipis_id: str | None = None):
        message = f"Cannot build prompt: {reason}"
        if ipis_id:
            message += f" (record {ipis_id})"
        super().__init__(message=message)
        self.reason = reason
        self.ipis_id = ipis_id


class CorpusLengthMismatchError(IpisKitException):
    """Raised when prediction and reference corpora differ in length."""

    def __init__(self, n_preds: int, n_refs: int):
        super().__init__(
            message=f"Corpus length mismatch: {n_preds} predictions vs {n_refs} references"
        )
        self.n_preds = n_preds
        self.n_refs = n_refs


class PredictionMismatchError(IpisKitException):
    """Raised when predictions do not cover every dataset record."""

    def __init__(self, missing_ids: list[str]):
        shown = ", ".join(missing_ids[:20])
        if len(missing_ids) > 20:
            shown += f", ... ({len(missing_ids)} total)"
        super().__init__(
            message=f"No prediction for {len(missing_ids)} record(s): {shown}",
            details="Predictions are joined to records by ipis_id"
        )
        self.missing_ids = missing_ids


class InferenceError(IpisKitException):
    """Raised when a chat-completion request fails for good."""

    def __init__(self, reason: str, status: int | None = None, attempts: int = 1):
        message = f"Inference failed after {attempts} attempt(s): {reason}"
        if status is not None:
            message += f" (HTTP {status})"
        super().__init__(message=message)
        self.reason = reason
        self.status = status
        self.attempts = attempts


class ReportFormatError(IpisKitException):
    """Raised when a saved report.json cannot be read back."""

    def __init__(self, path: str, reason: str):
        super().__init__(
            message=f"Invalid report {path}: {reason}",
            details="Pass report.json files or the directories eval-proof / eval-mt wrote"
        )
        self.path = path
        self.reason = reason
