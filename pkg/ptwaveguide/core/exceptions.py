class ConfigurationError(Exception):
    exit_code = 1


class NumericalFailure(Exception):
    exit_code = 2


class InvariantViolation(Exception):
    exit_code = 3

    def __init__(self, message, check=None):
        super().__init__(message)
        self.check = check


class SpectralVerdict(Exception):
    """
    Outcomes that are answers rather than failures: the run is fine,
    but the question asked has no numerical answer on this grid or in
    this regime. Commands report them as labeled rows.
    """

    label = "verdict"


class InvalidRunConfig(ConfigurationError):
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class SimpleSpectrumViolation(ConfigurationError):
    pass


class DecayViolation(ConfigurationError):
    pass


class GridError(ConfigurationError):
    pass


class GridMismatch(ConfigurationError):
    pass


class DomainError(NumericalFailure):
    pass


class OnCutError(NumericalFailure):
    pass


class SingularPoint(NumericalFailure):
    pass


class ThresholdSingularity(NumericalFailure):
    pass


class TailBoundFailure(NumericalFailure):
    def __init__(self, message, modes=None, tail_bound=None):
        super().__init__(message)
        self.modes = modes
        self.tail_bound = tail_bound


class NeumannSeriesDivergence(NumericalFailure):
    def __init__(self, message, norm=None):
        super().__init__(message)
        self.norm = norm


class NoRoot(NumericalFailure):
    pass


class ConvergenceFailure(NumericalFailure):
    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class RealityViolation(NumericalFailure):
    def __init__(self, message, imaginary=None, tolerance=None):
        super().__init__(message)
        self.imaginary = imaginary
        self.tolerance = tolerance


class OnSpectrum(NumericalFailure):
    pass


class BorderlineCase(SpectralVerdict):
    label = "borderline"


class ResolutionLimit(SpectralVerdict):
    label = "resolution-limit"

    def __init__(self, message, gap=None, floor=None):
        super().__init__(message)
        self.gap = gap
        self.floor = floor
