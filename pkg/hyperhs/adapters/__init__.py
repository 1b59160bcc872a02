__all__ = ["IdentityCheck", "MatrixSampler"]

from hyperhs.adapters.check import IdentityCheck
from hyperhs.adapters.sampler import MatrixSampler
