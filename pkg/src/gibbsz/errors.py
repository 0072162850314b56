"""Error taxonomy.

Two families matter to callers: bad input (the request itself is
malformed or out of domain) and refusal (the request is well formed but
the engine cannot certify an answer within its budgets).  The command
line maps the first family to exit status 1 and the second to 2.
"""


class GibbszError(Exception):
    """Base class for package errors."""


class InputError(GibbszError):
    """The request is malformed or outside the supported domain."""


class Refusal(GibbszError):
    """Well-formed request, but no certified answer can be produced.

    Subclasses carry enough context in the message for the caller to
    decide what to relax (tolerance, mesh floor, cost ceiling, ...).
    """


class MeshInfeasible(Refusal):
    """The mesh width needed for the requested tolerance is below the
    machine floor."""

    def __init__(self, message: str, required_delta: float):
        super().__init__(message)
        self.required_delta = required_delta


class CostCeiling(Refusal):
    """Predicted work exceeds the configured point budget."""


class CertificationError(Refusal):
    """A numeric certificate (range check, anchor check) failed."""


class BudgetInfeasible(Refusal):
    """Tolerance splitting produced an unattainable sub-budget."""
