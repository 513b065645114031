"""Error taxonomy shared across the package.

Every domain failure raises a subclass of TiltmutError carrying a stable
``code`` string, so the CLI and the HTTP service can map failures onto
exit codes and JSON error payloads without string matching.
"""


class TiltmutError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_json(self):
        payload = {"code": self.code, "message": self.message}
        if self.details:
            payload["details"] = {k: v for k, v in self.details.items()}
        return payload


class InvalidPresentation(TiltmutError):
    """A presentation failed shape validation."""

    code = "invalid-presentation"


class NotAdmissibleWithinCap(TiltmutError):
    """Rewriting did not confirm admissibility below the degree cap.

    Raised when completion needs a rule longer than the cap, or when paths
    of the cap length still fail to reduce to zero.  Either the ideal is
    not admissible or the cap is too small for it.
    """

    code = "not-admissible-within-cap"


class InfeasibleMutation(TiltmutError):
    """Mutation was requested at a vertex that fails the feasibility test."""

    code = "infeasible-mutation"


class SubstitutionCycle(TiltmutError):
    """Arrow cancellation hit a relation whose unit term reappears in its own replacement."""

    code = "substitution-cycle"


class NotIsomorphic(TiltmutError):
    """Exhaustive presentation-isomorphism search ended without a witness."""

    code = "not-isomorphic"


class SearchBudgetExceeded(TiltmutError):
    """Isomorphism search exceeded its node budget before finishing."""

    code = "search-budget-exceeded"


class NotBasic(TiltmutError):
    """Presentation extraction needs a basic algebra and this one is not."""

    code = "not-basic"


class RadicalComputationFailed(TiltmutError):
    """Internal consistency check of the radical or extraction failed."""

    code = "radical-computation-failed"


class ParseError(TiltmutError):
    """Quiver DSL text could not be parsed."""

    code = "parse-error"

    def __init__(self, message, line=None, column=None):
        details = {}
        if line is not None:
            details["line"] = line
        if column is not None:
            details["column"] = column
        super().__init__(message, **details)
        self.line = line
        self.column = column


class OracleMismatch(TiltmutError):
    """Combinatorial mutation and the complex-level computation disagreed."""

    code = "oracle-mismatch"
