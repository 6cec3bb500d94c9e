"""Exception hierarchy shared by every engine.

Each error carries a short machine-readable ``error_code`` and the process
exit status the command-line front end maps it to.
"""


class FoliageError(Exception):
    error_code = "error"
    exit_code = 1

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def as_dict(self):
        out = {"error_code": self.error_code, "message": self.message}
        if self.details:
            out["details"] = self.details
        return out


class InputError(FoliageError, ValueError):
    """Malformed or out-of-domain input."""

    error_code = "input_error"
    exit_code = 2


class ModelInconsistency(FoliageError):
    """Input data that contradicts a structural identity (e.g. negative tangency)."""

    error_code = "model_inconsistency"
    exit_code = 3


class ContractViolation(FoliageError):
    """A guaranteed property of a construction failed (e.g. non-effective correction term)."""

    error_code = "contract_violation"
    exit_code = 3


class DecompositionFailure(ModelInconsistency):
    """The candidate curve set cannot carry a negative part."""

    error_code = "decomposition_failure"


class BoundedReductionError(ModelInconsistency):
    """Seidenberg reduction hit its depth cap; ``partial`` holds the tree built so far."""

    error_code = "bounded_reduction"

    def __init__(self, message, partial=None, **details):
        super().__init__(message, **details)
        self.partial = partial
