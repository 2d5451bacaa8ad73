"""Exception hierarchy shared by every module of the workbench."""


class WorkbenchError(Exception):
    """Base class for all domain errors raised by qesurf."""


class DivisionByZero(WorkbenchError, ZeroDivisionError):
    pass


class UnknownVariable(WorkbenchError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParseError(WorkbenchError, ValueError):
    pass


class DenominatorVanishesIdentically(WorkbenchError):
    pass


class InconsistentSubstitution(WorkbenchError):
    """A substitution does not carry one chart relation onto the other."""


class ChartMismatch(WorkbenchError):
    pass


# surface_atlas
class CurveNotVisible(WorkbenchError):
    pass


class ZeroFunction(WorkbenchError):
    pass


class CenterNotVisible(WorkbenchError):
    pass


class CenterOnInvalidLocus(WorkbenchError):
    pass


class UnsupportedLocalStructure(WorkbenchError):
    """Local analysis met a configuration outside the supported normal forms."""


class CommonComponent(WorkbenchError):
    """Two local functions could not be certified coprime at a point."""


# derivation_calculus
class CurveIsIntegral(WorkbenchError):
    pass


class IsolatedSingularityPresent(WorkbenchError):
    pass


class InconsistentOrders(WorkbenchError):
    pass


# divisor_lattice
class NonIntegralIntersection(WorkbenchError):
    pass


class NotContractible(WorkbenchError):
    pass


class NotInPullbackImage(WorkbenchError):
    pass


class NonIntegralChi(WorkbenchError):
    pass


class NoIntegerSolution(WorkbenchError):
    pass


# bound_solver
class InvalidConfig(WorkbenchError, ValueError):
    pass


class NotKodairaDimOne(WorkbenchError):
    pass


class Unclassifiable(WorkbenchError):
    pass


class CapsInsufficient(WorkbenchError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
