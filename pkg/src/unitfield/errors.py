"""Exception hierarchy shared by all unitfield modules."""


class UnitfieldError(Exception):
    """Base class for all errors raised by this package."""


# --- chart / metric evaluation -------------------------------------------

class DomainError(UnitfieldError):
    """Chart point rejected by the domain guard."""


class DegenerateMetric(UnitfieldError):
    """Metric failed the positive-definiteness check (leading minor <= 1e-12)."""


class DegeneratePlane(UnitfieldError):
    """Two tangent vectors do not span a 2-plane."""


class NotUnit(UnitfieldError):
    """Vector (field) is not of unit length at the evaluation point."""


class DependentInput(UnitfieldError):
    """Input vectors for orthonormalization are linearly dependent."""


# --- expression language --------------------------------------------------

class DslError(UnitfieldError):
    """Base class for expression-language errors."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self):
        if self.span is not None:
            return f"{self.message} at [{self.span.start}, {self.span.end}]"
        return self.message


class ParseError(DslError):
    """Input text does not conform to the expression grammar."""


class UnknownIdentifier(ParseError):
    """Name is neither a declared coordinate, a known function, nor 'pi'."""


class EvalError(DslError):
    """Evaluation produced NaN/Inf or hit a math-domain violation."""


class DifferentiationUnsupported(DslError):
    """Expression cannot be differentiated symbolically (non-constant exponent)."""


# --- bundle ---------------------------------------------------------------

class BaseMismatch(UnitfieldError):
    """Two bundle tangents do not share the same base point."""


# --- frames and second fundamental form -----------------------------------

class NotSelfAdjoint(UnitfieldError):
    """Signed singular frames requested but the operator is not self-adjoint."""


class AmbiguousKernel(UnitfieldError):
    """Kernel of the shape operator is multidimensional and contains no
    distinguished direction."""


class NotIntegrable(UnitfieldError):
    """The orthogonal distribution of the field fails the integrability check."""


class NotGeodesic(UnitfieldError):
    """The field is not geodesic (|nabla_xi xi| exceeds tolerance)."""


class FrameMismatch(UnitfieldError):
    """Shape operator and normal Jacobi operator cannot be consistently framed."""


class NotUmbilic(UnitfieldError):
    """Leaf principal curvatures are not all equal."""


class UmbilicityPole(UnitfieldError):
    """Totally-geodesic condition evaluated at the pole k^2 = 1."""


# --- classified family ----------------------------------------------------

class PoleError(UnitfieldError):
    """Curvature ODE evaluated at the pole k^2 = 1."""


class ZeroCurvature(UnitfieldError):
    """Implicit solution requested at k = 0."""


class BranchExit(UnitfieldError):
    """ODE trajectory left the admissible curvature branch."""


class BranchError(UnitfieldError):
    """Parameter interval touches a singular value of the classified family."""


class SamplingError(UnitfieldError):
    """Mesh sampling counts below the minimum grid size."""


class FormError(UnitfieldError):
    """Metric is not in arc-length warped form du^2 + g^2 dv^2."""


# --- scenarios / cli ------------------------------------------------------

class ScenarioError(UnitfieldError):
    """Scenario definition is invalid or unknown."""
