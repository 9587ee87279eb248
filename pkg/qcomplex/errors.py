"""
Error types raised by the qcomplex engines.

Every error carries a short machine-readable ``code`` and a ``context`` dict so
the command-line front door can emit it as a JSON object on stderr.
"""


class QComplexError(Exception):
    code = "qcomplex_error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self):
        return {"code": self.code, "message": self.message, "context": self.context}


class DimensionMismatchError(QComplexError):
    code = "dimension_mismatch"


class NotAPermutationError(QComplexError):
    code = "not_a_permutation"


class NotQubitStructuredError(QComplexError):
    code = "not_qubit_structured"


class InvalidSubsetError(QComplexError):
    code = "invalid_subset"


class SearchTooLargeError(QComplexError):
    code = "search_too_large"


class NotEquilibriumError(QComplexError):
    code = "not_equilibrium"


class UnequalColumnWeightsError(QComplexError):
    code = "unequal_column_weights"


class ZeroColumnWeightError(QComplexError):
    code = "zero_column_weight"


class TotalCancellationError(QComplexError):
    code = "total_cancellation"


class UnknownQuantumError(QComplexError):
    code = "unknown_quantum"


class NotConnectedError(QComplexError):
    code = "not_connected"


class DisconnectedSeedError(QComplexError):
    code = "disconnected_seed"


class AllAmplitudesDroppedError(QComplexError):
    code = "all_amplitudes_dropped"


class FixtureError(QComplexError):
    code = "fixture_error"


class SchemaError(QComplexError):
    code = "schema_error"
