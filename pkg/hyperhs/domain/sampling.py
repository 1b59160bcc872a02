"""
Reproducible random-matrix samplers.

Every draw is a pure function of (seed, stream_id): the generator is Philox
keyed by SeedSequence(seed, spawn_key=(stream_id,)), so Monte Carlo chunks can
be assigned to workers in any order without changing results.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger
from scipy import stats
from tenacity import retry, retry_if_exception_type, stop_after_attempt

from hyperhs.adapters import MatrixSampler
from hyperhs.domain.linalg import require_distinct
from hyperhs.exceptions import ConstraintViolation, DegenerateSpectrum, DomainError


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0


@dataclass(frozen=True)
class VarianceProfile:
    """Intragroup coupling J, intergroup coupling V, k orbitals per site, r sites."""

    J: float
    V: float
    k: int
    r: int

    def __post_init__(self):
        if self.J <= 0 or self.V < 0 or self.k < 1 or self.r < 1:
            raise DomainError(f"invalid variance profile {self}")

    @property
    def size(self) -> int:
        return self.r * self.k


@dataclass
class WeightedSample:
    points: np.ndarray
    log_weight: np.ndarray
    singular_values: Optional[np.ndarray] = None
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None


def rng_generator(stream: RngStream) -> np.random.Generator:
    seq = np.random.SeedSequence(stream.seed, spawn_key=(stream.stream_id,))
    return np.random.Generator(np.random.Philox(seq))


def _shape(n: int, size: Optional[int]):
    return (n, n) if size is None else (size, n, n)


def ginibre(n: int, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """I.i.d. standard complex Gaussian entries, E|z|^2 = 1."""
    shape = _shape(n, size)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(n: int, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Haar unitary from QR of a Ginibre matrix with R's diagonal made real positive."""
    z = ginibre(n, rng, size)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phases = d / np.abs(d)
    return q * phases[..., None, :]


def _log_vandermonde_sq(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    iu = np.triu_indices(n, k=1)
    diffs = x[..., :, None] - x[..., None, :]
    return 2.0 * np.sum(np.log(np.abs(diffs[..., iu[0], iu[1]])), axis=-1)


def gl_invariant_sample(n: int, scale: float, rng: np.random.Generator, size: int) -> WeightedSample:
    """
    Importance sample of the invariant measure dT dT^dagger det(T T^dagger)^{-n} on Gl(n, C).

    T = U diag(t) V^dagger with U, V Haar and t_i log-normal(0, scale). In these
    coordinates the measure has density Delta^2(t^2) prod t_i^{1-2n}, so the
    log-weight is that density over the log-normal proposal.
    """
    if scale <= 0:
        raise DomainError(f"proposal scale must be positive, got {scale}")
    t = np.exp(scale * rng.standard_normal((size, n)))
    u = haar_unitary(n, rng, size)
    v = haar_unitary(n, rng, size)
    log_density = (1.0 - 2.0 * n) * np.sum(np.log(t), axis=1)
    if n > 1:
        log_density = log_density + _log_vandermonde_sq(t * t)
    log_proposal = np.sum(stats.lognorm.logpdf(t, s=scale), axis=1)
    points = (u * t[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    return WeightedSample(points=points, log_weight=log_density - log_proposal, singular_values=t, u=u, v=v)


def variance_profile_matrix(profile: VarianceProfile) -> np.ndarray:
    """N x N matrix of E|H_lm|^2: J/k within a site, V/k^2 between neighbouring sites (open chain)."""
    site = np.arange(profile.size) // profile.k
    distance = np.abs(site[:, None] - site[None, :])
    out = np.zeros((profile.size, profile.size))
    out[distance == 0] = profile.J / profile.k
    out[distance == 1] = profile.V / profile.k**2
    return out


def korbital_hamiltonian(profile: VarianceProfile, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Hermitian k-orbital Hamiltonian; diagonal real with variance J/k."""
    if profile.size > 64:
        raise DomainError(f"Hamiltonian size {profile.size} exceeds 64")
    variance = variance_profile_matrix(profile)
    upper = np.triu(np.ones_like(variance), k=1)
    z = ginibre(profile.size, rng, size) * np.sqrt(variance) * upper
    diag = rng.standard_normal(_shape(profile.size, size)[:-1]) * np.sqrt(np.diag(variance))
    eye = np.eye(profile.size)
    return z + np.conj(np.swapaxes(z, -1, -2)) + diag[..., :, None] * eye


class HaarSampler(MatrixSampler):
    def __init__(self, n: int, copies: int = 1):
        self.n = n
        self.copies = copies

    def draw(self, rng: np.random.Generator, size: int):
        if self.copies == 1:
            return haar_unitary(self.n, rng, size)
        return tuple(haar_unitary(self.n, rng, size) for _ in range(self.copies))


class GinibreSampler(MatrixSampler):
    def __init__(self, n: int):
        self.n = n

    def draw(self, rng: np.random.Generator, size: int):
        return ginibre(self.n, rng, size)


class GLInvariantSampler(MatrixSampler):
    def __init__(self, n: int, scale: float = 0.7):
        self.n = n
        self.scale = scale

    def draw(self, rng: np.random.Generator, size: int) -> WeightedSample:
        return gl_invariant_sample(self.n, self.scale, rng, size)


class KOrbitalSampler(MatrixSampler):
    def __init__(self, profile: VarianceProfile):
        self.profile = profile

    def draw(self, rng: np.random.Generator, size: int):
        return korbital_hamiltonian(self.profile, rng, size)


@retry(retry=retry_if_exception_type(DegenerateSpectrum), stop=stop_after_attempt(20), reraise=True)
def random_spectrum(n: int, rng: np.random.Generator, low: float = -2.0, high: float = 2.0,
                    min_gap: float = 1e-3) -> np.ndarray:
    """Uniform spectrum with pairwise gaps above `min_gap`; degenerate draws are resampled."""
    values = rng.uniform(low, high, size=n)
    try:
        require_distinct(values, min_gap, "random spectrum")
    except DegenerateSpectrum:
        logger.warning(f"Resampling degenerate spectrum {values}")
        raise
    return values


@retry(retry=retry_if_exception_type(DegenerateSpectrum), stop=stop_after_attempt(20), reraise=True)
def random_hermitian_pd(n: int, rng: np.random.Generator, floor: float = 0.2) -> np.ndarray:
    """W W^dagger / n + floor, with eigenvalue gaps above 1e-3."""
    w = ginibre(n, rng)
    m = w @ w.conj().T / n + floor * np.eye(n)
    m = (m + m.conj().T) / 2
    require_distinct(np.linalg.eigvalsh(m), 1e-3, "random Hermitian matrix")
    return m


@retry(retry=retry_if_exception_type(ConstraintViolation), stop=stop_after_attempt(50), reraise=True)
def random_ortho_triple(rng: np.random.Generator, low: float = 0.3, high: float = 2.0):
    """(a1, a2, a) with a1, a2 > 0 and |a| < sqrt(a1 a2), away from the boundary."""
    a1, a2 = rng.uniform(low, high, size=2)
    a = rng.uniform(-high, high)
    if abs(a) >= 0.9 * np.sqrt(a1 * a2):
        raise ConstraintViolation(f"|a|={abs(a):.3f} too close to sqrt(a1 a2)")
    return float(a1), float(a2), float(a)
