"""Exception hierarchy.

Every error carries an ``exit_code`` family used by the command-line tool.
"""


class GbsKernelError(Exception):
    exit_code = 1


class GraphError(GbsKernelError, ValueError):
    exit_code = 10


class NotSymmetric(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class EmptyMatrix(GraphError):
    pass


class EmptyDataset(GraphError):
    pass


class LengthMismatch(GraphError):
    pass


class CombinatoricsError(GbsKernelError, ValueError):
    exit_code = 11


class OddSize(CombinatoricsError):
    pass


class TooLarge(CombinatoricsError):
    pass


class NotPositiveDefinite(CombinatoricsError):
    pass


class EncodingError(GbsKernelError, ValueError):
    exit_code = 12


class SpectralBoundViolated(EncodingError):
    pass


class SingularMatrix(EncodingError):
    pass


class EigenFailure(EncodingError):
    pass


class OutOfRange(GbsKernelError, ValueError):
    exit_code = 13


class DistributionError(GbsKernelError, ValueError):
    exit_code = 14


class LossyEncodingRequiresGeneralPath(DistributionError):
    pass


class DisplacedLossUnsupported(DistributionError):
    pass


class FeatureError(GbsKernelError, ValueError):
    exit_code = 15


class KExceedsModes(FeatureError):
    pass


class ConfigMismatch(FeatureError):
    pass


class DimensionMismatch(FeatureError):
    pass


class DatasetError(GbsKernelError, ValueError):
    exit_code = 16


class MissingFile(DatasetError, FileNotFoundError):
    pass


class MalformedLine(DatasetError):
    def __init__(self, path, line_number, message):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = path
        self.line_number = line_number


class DanglingNode(DatasetError):
    pass


class AsymmetricEdgeLabels(DatasetError):
    pass


class UnknownRule(DatasetError):
    pass


class BenchError(GbsKernelError, ValueError):
    exit_code = 17


class NotPsd(BenchError):
    pass


class DegenerateLabels(BenchError):
    pass


class NotConverged(BenchError):
    pass


class TooFewGraphs(BenchError):
    pass


class UnsupportedSize(BenchError):
    pass


class NotSinglePhotonOrbit(BenchError):
    pass
