class LinkHomotopyError(Exception):
    """Base class for every error raised by this package."""


class DegenerateSimplex(LinkHomotopyError):
    pass


class OverlappingInteriors(LinkHomotopyError):
    pass


class SimplexNotFound(LinkHomotopyError):
    pass


class NotSubcomplex(LinkHomotopyError):
    pass


class PointOutsideComplex(LinkHomotopyError):
    pass


class PerturbationFailed(LinkHomotopyError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotSubcomplexPair(LinkHomotopyError):
    pass


class OvershadowCycle(LinkHomotopyError):
    def __init__(self, cycle):
        super().__init__(f"overshadowing cycle among simplexes {cycle}; re-perturb F and retry")
        self.cycle = cycle


class DerivationPointOutsideInterior(LinkHomotopyError):
    pass


class NonPositiveCenterValue(LinkHomotopyError):
    pass


class CodimensionTooLow(LinkHomotopyError):
    pass


class NondegeneracyViolated(LinkHomotopyError):
    pass


class GeneralPositionFailed(LinkHomotopyError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InvalidSourceCollapse(LinkHomotopyError):
    pass


class CollapseStuck(LinkHomotopyError):
    """A greedy collapse could not find a free face before reaching its target."""


class CertificationFailed(LinkHomotopyError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class StabilizationCertificateFailed(CertificationFailed):
    pass


class InvalidSequence(LinkHomotopyError):
    pass


class VerificationFailed(LinkHomotopyError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnknownExample(LinkHomotopyError):
    pass


class FormatError(LinkHomotopyError):
    """Malformed input file."""


class ModePreconditionFailed(LinkHomotopyError):
    """The input concordance is not a link map / doodle as the mode requires."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MeshTooCoarse(LinkHomotopyError):
    """In eps mode the triangulation of X is too coarse for the locality bound."""
