import pytest

from hyperhs.adapters import IdentityCheck, MatrixSampler
from hyperhs.domain.identities import REGISTRY, get_check, list_identities, run_identity
from hyperhs.exceptions import UnknownIdentity

EXPECTED_IDS = [
    "izmoment", "dh_u11", "hs_eps", "eps_scan", "po5", "po_modulus", "chiral_flat", "hermitian_hs",
    "chiral_hs", "guhr_wettig", "macdonald", "radial_pde", "ingham_siegel", "intrep", "saddle",
]


def test_registry_contents():
    assert sorted(list_identities()) == sorted(EXPECTED_IDS)
    for identity_id, check in REGISTRY.items():
        assert isinstance(check, IdentityCheck)
        assert check.identity_id == identity_id
        assert check.description


def test_unknown_identity():
    with pytest.raises(UnknownIdentity) as err:
        get_check("izmomnet")
    assert "izmoment" in str(err.value)
    with pytest.raises(KeyError):
        get_check("")


def test_run_identity_uses_defaults(settings):
    report = run_identity("po5", None, settings)
    assert report.identity_id == "po5"
    assert report.passed
    assert report.seed == settings.seed


def test_run_identity_with_params(settings):
    report = run_identity("chiral_hs", {"a": [0.9]}, settings)
    assert report.passed
    assert report.params_digest == run_identity("chiral_hs", {"a": [0.9]}, settings).params_digest


def test_adapter_base_methods_raise_not_implemented(settings):
    class PassThroughCheck(IdentityCheck):
        identity_id = "pass_through"

        def run(self, params, settings):
            return super().run(params, settings)

    class PassThroughSampler(MatrixSampler):
        def draw(self, rng, size):
            return super().draw(rng, size)

    with pytest.raises(NotImplementedError):
        PassThroughCheck().run({}, settings)
    with pytest.raises(NotImplementedError):
        PassThroughSampler().draw(None, 1)
    with pytest.raises(TypeError):
        IdentityCheck()
