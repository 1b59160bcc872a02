from typing import Any, Dict, List, Optional

from loguru import logger

from hyperhs.adapters import IdentityCheck
from hyperhs.domain.identities.chiral import ChiralHSCheck
from hyperhs.domain.identities.flat_gaussian import ChiralFlatCheck, HermitianHSCheck
from hyperhs.domain.identities.group_integrals import GuhrWettigCheck, MacdonaldCheck
from hyperhs.domain.identities.iz_moment import IzMomentCheck
from hyperhs.domain.identities.korbital_checks import InghamSiegelCheck, KOrbitalCrossvalCheck, SaddlePointCheck
from hyperhs.domain.identities.pseudoorthogonal import ModulusControlCheck, PseudoOrthogonalCheck
from hyperhs.domain.identities.pseudounitary import DHCosetCheck, EpsScanCheck, HSEpsCheck
from hyperhs.domain.identities.radial import RadialPDECheck
from hyperhs.domain.report import IdentityReport, RunSettings
from hyperhs.exceptions import UnknownIdentity

__all__ = ["REGISTRY", "get_check", "list_identities", "run_identity"]

REGISTRY: Dict[str, IdentityCheck] = {
    check.identity_id: check
    for check in (
        IzMomentCheck(),
        DHCosetCheck(),
        HSEpsCheck(),
        EpsScanCheck(),
        PseudoOrthogonalCheck(),
        ModulusControlCheck(),
        ChiralFlatCheck(),
        HermitianHSCheck(),
        ChiralHSCheck(),
        GuhrWettigCheck(),
        MacdonaldCheck(),
        RadialPDECheck(),
        InghamSiegelCheck(),
        KOrbitalCrossvalCheck(),
        SaddlePointCheck(),
    )
}


def get_check(identity_id: str) -> IdentityCheck:
    check = REGISTRY.get(identity_id)
    if check is None:
        raise UnknownIdentity(f"unknown identity '{identity_id}'; known: {', '.join(sorted(REGISTRY))}")
    return check


def list_identities() -> List[str]:
    return list(REGISTRY)


def run_identity(identity_id: str, params: Optional[Dict[str, Any]] = None,
                 settings: Optional[RunSettings] = None) -> IdentityReport:
    """Look up a registered check and run it with the given parameters."""
    check = get_check(identity_id)
    settings = settings or RunSettings()
    logger.info(f"Running {identity_id}: {check.description}")
    report = check.run(dict(params or {}), settings)
    logger.info(f"{identity_id}: ratio={report.ratio:.6g} pass={report.passed} ({report.runtime_ms} ms)")
    return report
