from hyperhs.domain.korbital import ModelParams
from hyperhs.domain.quadrature import DampingSchedule, IntegralEstimate, McConfig
from hyperhs.domain.report import IdentityReport, RunSettings
from hyperhs.domain.sampling import RngStream, VarianceProfile

__all__ = [
    "ModelParams",
    "DampingSchedule",
    "IntegralEstimate",
    "McConfig",
    "IdentityReport",
    "RunSettings",
    "RngStream",
    "VarianceProfile",
]
