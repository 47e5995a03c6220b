"""Exception hierarchy.

Every error raised for a mathematical or domain reason derives from
:class:`BorelCalcError` and carries a short machine-readable ``code`` that the
command line reports on the error stream.
"""


class BorelCalcError(Exception):
    code = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def as_dict(self):
        out = {"type": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: _plain(v) for k, v in sorted(self.details.items())}
        return out


def _plain(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return repr(value)


class InvalidGeometry(BorelCalcError):
    code = "invalid-geometry"


class InvalidAngle(InvalidGeometry):
    code = "invalid-angle"


class InvalidContour(InvalidGeometry):
    code = "invalid-contour"


class SingularityOnPath(BorelCalcError):
    code = "singularity-on-path"


class NoConvergence(BorelCalcError):
    code = "no-convergence"

    def __init__(self, message, best=None, error=None, **details):
        super().__init__(message, best=best, error=error, **details)
        self.best = best
        self.error = error


class ZeroOnBoundary(BorelCalcError):
    code = "zero-on-boundary"


class DegenerateFunction(BorelCalcError):
    code = "degenerate-function"


class OutsideDomain(BorelCalcError):
    code = "outside-domain"


class PoleError(BorelCalcError):
    code = "pole"


class RadiusTooLarge(BorelCalcError):
    code = "radius-too-large"


class InvalidSequence(BorelCalcError):
    code = "invalid-sequence"


class DomainObstruction(BorelCalcError):
    code = "domain-obstruction"


class DiscViolation(BorelCalcError):
    code = "disc-violation"


class PinchError(BorelCalcError):
    code = "pinch"


class CertificationRequired(BorelCalcError):
    code = "certification-required"


class CertificationFailure(BorelCalcError):
    code = "certification-failure"


class ScanFailure(BorelCalcError):
    code = "scan-failure"


class IncompleteCatalog(BorelCalcError):
    code = "incomplete-catalog"


class StaleCatalog(BorelCalcError):
    code = "stale-catalog"


class ShapeError(BorelCalcError):
    code = "shape"


class NormalizationError(BorelCalcError):
    code = "normalization"


class MultiplicityUnsupported(BorelCalcError):
    code = "multiplicity-unsupported"


class ScheduleExhausted(NoConvergence):
    code = "schedule-exhausted"


class Unsupported(BorelCalcError):
    code = "unsupported"
