"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and the name of the
module that raised it, so the command-line front end can emit a one-line
record without string parsing.
"""


class QuasiDiffError(Exception):
    code = "error"
    module = "quasidiff"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def record(self):
        out = {"error": self.code, "module": self.module, "message": str(self)}
        out.update({k: _plain(v) for k, v in self.details.items()})
        return out


def _plain(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    try:
        return float(value) if not isinstance(value, (str, int, bool)) else value
    except (TypeError, ValueError):
        return str(value)


# coefficients


class CoefficientError(QuasiDiffError):
    code = "coefficient"
    module = "coefficients"


class DomainError(CoefficientError):
    code = "domain"


class SingularityError(CoefficientError):
    code = "singularity"


class NonIntegrableError(CoefficientError):
    code = "non-integrable"


class ComplexityError(CoefficientError):
    code = "complexity"


class DivisionError(CoefficientError):
    code = "division"


# shinzettl


class AdmissibilityError(QuasiDiffError):
    code = "admissibility"
    module = "shinzettl"


class ParameterError(QuasiDiffError):
    code = "parameter"
    module = "shinzettl"


# ode


class IntegrationError(QuasiDiffError):
    code = "integration-failure"
    module = "ode"


# triplet


class ConstraintError(QuasiDiffError):
    code = "constraint"
    module = "triplet"


class TripletSingularityError(QuasiDiffError):
    code = "singular-coefficients"
    module = "triplet"


class RealizationError(QuasiDiffError):
    code = "realization"
    module = "triplet"


# extensions


class ShapeError(QuasiDiffError):
    code = "shape"
    module = "extensions"


class PresetError(QuasiDiffError):
    code = "preset"
    module = "extensions"


# spectral


class SpectralError(QuasiDiffError):
    code = "spectral"
    module = "spectral"


class NotUnitaryError(SpectralError):
    code = "not-unitary"


class NotContractionError(SpectralError):
    code = "not-contraction"


class TooManyEigenvaluesError(SpectralError):
    code = "too-many-eigenvalues"


class ContourError(SpectralError):
    code = "contour"


class NotAnEigenvalueError(SpectralError):
    code = "not-an-eigenvalue"


class ResolventPoleError(SpectralError):
    code = "resolvent-pole"


class ValidityError(SpectralError):
    code = "validity"


class SpectralDomainError(SpectralError):
    code = "domain"


# cli


class SchemaError(QuasiDiffError):
    code = "schema"
    module = "cli"

    def __init__(self, errors):
        self.errors = list(errors)
        msg = "; ".join(f"{loc or '/'}: {text}" for loc, text in self.errors)
        super().__init__(msg)

    def record(self):
        out = super().record()
        out["errors"] = [{"location": loc or "/", "message": text} for loc, text in self.errors]
        return out
