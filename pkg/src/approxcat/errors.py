"""Exception hierarchy. Every error carries a stable machine-readable code
that the CLI maps onto its exit conventions."""


class ApproxcatError(Exception):
    code = "Error"
    exit_code = 2


class FieldMismatchError(ApproxcatError):
    code = "FieldMismatch"


class ShapeError(ApproxcatError):
    code = "ShapeMismatch"


class NonAcyclicQuiverError(ApproxcatError):
    code = "NonAcyclicQuiver"
    exit_code = 3


class SubobjectClosureError(ApproxcatError):
    code = "SubobjectClosureViolation"
    exit_code = 3


class BudgetExceededError(ApproxcatError):
    code = "BudgetExceeded"
    exit_code = 3


class RationalFieldUnsupportedError(ApproxcatError):
    code = "RationalFieldUnsupported"
    exit_code = 3


class ExtObstructionError(ApproxcatError):
    code = "ExtObstruction"
    exit_code = 3


class HypothesisViolationError(ApproxcatError):
    code = "HypothesisViolation"
    exit_code = 3


class NoFreeLoopError(ApproxcatError):
    code = "NoFreeLoop"
    exit_code = 3


class CertificateError(ApproxcatError):
    code = "CertificateInvalid"


class IsoInconclusiveError(ApproxcatError):
    code = "IsoInconclusive"
    exit_code = 3
