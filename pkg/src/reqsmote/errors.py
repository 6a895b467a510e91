"""Exception hierarchy.

Every error carries a short ``code`` so command-line output can be grepped
(``error[UnknownLabel]: ...``).
"""


class ReqSmoteError(Exception):
    code = "ReqSmoteError"


class MissingColumnError(ReqSmoteError):
    code = "MissingColumn"


class UnknownLabelError(ReqSmoteError, ValueError):
    code = "UnknownLabel"


class EmptyDatasetError(ReqSmoteError):
    code = "EmptyDataset"


class EmptyVocabularyError(ReqSmoteError):
    code = "EmptyVocabulary"


class DimensionMismatchError(ReqSmoteError, ValueError):
    code = "DimensionMismatch"


class EmptyMatrixError(ReqSmoteError):
    code = "EmptyMatrix"


class StaleLinksError(ReqSmoteError, IndexError):
    code = "StaleLinks"


class SingleClassTrainingError(ReqSmoteError):
    code = "SingleClassTraining"


class UnsupportedModelError(ReqSmoteError):
    code = "UnsupportedModel"


class LengthMismatchError(ReqSmoteError, ValueError):
    code = "LengthMismatch"


class UnknownClassError(ReqSmoteError, ValueError):
    code = "UnknownClass"


class EmptyInputError(ReqSmoteError):
    code = "EmptyInput"


class ClassTooSmallError(ReqSmoteError):
    code = "ClassTooSmall"

    def __init__(self, label, count, k):
        super().__init__(f"class {label} has {count} rows, fewer than K={k} folds")
        self.label = label
        self.count = count
        self.k = k


class FoldError(ReqSmoteError):
    """A fold failed; wraps the underlying error with the fold index."""

    code = "FoldFailure"

    def __init__(self, fold, cause):
        super().__init__(f"fold {fold}: [{getattr(cause, 'code', type(cause).__name__)}] {cause}")
        self.fold = fold
        self.cause = cause
