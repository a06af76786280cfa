"""Channel instances, reduced coordinates, and the rate/power expressions.

Two single-antenna sources exchange messages through an M-antenna
amplify-and-forward relay in two slots; each source subtracts its own
echoed signal before decoding. Noise variances are normalized to 1
everywhere, so transmit powers are SNR-like linear quantities, rates are
log base 2 in bits per complex dimension.

The relay applies an M x M matrix A. Every boundary-attaining A factors
as A = U* B U^H through the isometry U spanning both uplink channels, so
most of the package works with the reduced 2x2 matrix B and the effective
channels g_i = U^H h_i.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import InvalidInputError
from .linalg import svd_tall

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class PowerConfig:
    """Source transmit powers and the relay power budget (linear scale)."""

    p1: float
    p2: float
    p_relay: float

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "p_relay"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidInputError(f"{name} must be finite and >= 0")


@dataclass(frozen=True)
class RatePair:
    """Achievable rates in bits/complex dimension; r21 is S2->S1."""

    r21: float
    r12: float

    @property
    def total(self) -> float:
        return self.r21 + self.r12


@dataclass(frozen=True)
class ChannelPair:
    """Uplink channel vectors of both sources, with generation metadata."""

    m: int
    h1: np.ndarray
    h2: np.ndarray
    rho: float
    seed: Optional[int] = None

    @property
    def theta1(self) -> float:
        return float(np.real(self.h1.conj() @ self.h1))

    @property
    def theta2(self) -> float:
        return float(np.real(self.h2.conj() @ self.h2))

    @property
    def correlation(self) -> float:
        """|h1^H h2|^2 / (||h1||^2 ||h2||^2)."""
        return abs(self.h1.conj() @ self.h2) ** 2 / (self.theta1 * self.theta2)

    def to_json(self) -> str:
        doc = {
            "M": self.m,
            "rho": self.rho,
            "seed": self.seed,
            "h1_re": np.real(self.h1).tolist(),
            "h1_im": np.imag(self.h1).tolist(),
            "h2_re": np.real(self.h2).tolist(),
            "h2_im": np.imag(self.h2).tolist(),
        }
        return json.dumps(doc, indent=2)

    @staticmethod
    def from_json(text: str) -> "ChannelPair":
        doc = json.loads(text)
        h1 = np.array(doc["h1_re"], dtype=float) + 1j * np.array(doc["h1_im"], dtype=float)
        h2 = np.array(doc["h2_re"], dtype=float) + 1j * np.array(doc["h2_im"], dtype=float)
        return ChannelPair(m=int(doc["M"]), h1=h1, h2=h2, rho=float(doc["rho"]), seed=doc.get("seed"))


@dataclass(frozen=True)
class EffectiveChannel:
    """SVD frame of the uplink matrix [h1 h2] and the reduced channels."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    g1: np.ndarray
    g2: np.ndarray

    @property
    def theta1(self) -> float:
        return float(np.real(self.g1.conj() @ self.g1))

    @property
    def theta2(self) -> float:
        return float(np.real(self.g2.conj() @ self.g2))


@dataclass(frozen=True)
class Beamformer:
    """Reduced 2x2 relay matrix together with the isometry it lifts through."""

    B: np.ndarray
    U: np.ndarray

    def full(self) -> np.ndarray:
        """The M x M relay matrix A = U* B U^H."""
        return np.conj(self.U) @ self.B @ self.U.conj().T


def _cn_vector(rng: np.random.Generator, m: int) -> np.ndarray:
    """A CN(0, I_m) draw via Box-Muller on two uniform vectors.

    Using explicit uniforms plus Box-Muller (z = sqrt(-ln u) e^{2 pi i v})
    pins the sample path to the seeded PCG64 stream, so fixtures can be
    regenerated from (seed, M, rho) alone.
    """
    u = rng.random(m)
    v = rng.random(m)
    return np.sqrt(-np.log1p(-u)) * np.exp(2j * np.pi * v)


def gen_channels(m: int, rho: float, seed: int, normalize: bool = True) -> ChannelPair:
    """Generate a correlated channel pair.

    h1 is an isotropic complex Gaussian direction; h2 = sqrt(rho) h1 +
    sqrt(1-rho) hw with hw unit-norm and orthogonal to h1, which makes the
    squared correlation of the pair equal rho exactly.

    Args:
        m: relay antenna count, >= 2.
        rho: target squared correlation in [0, 1].
        seed: PCG64 stream seed; a fixed seed reproduces the pair.
        normalize: keep both channels at unit norm (the default). When
            False the channels get independent Gaussian-vector norms while
            the correlation construction is unchanged.

    Returns:
        ChannelPair with |h1^H h2|^2 / (theta1 theta2) == rho to rounding.
    """
    if m < 2:
        raise InvalidInputError("need at least two relay antennas")
    if not (0.0 <= rho <= 1.0):
        raise InvalidInputError("rho must lie in [0, 1]")
    rng = np.random.default_rng(seed)

    raw1 = _cn_vector(rng, m)
    h1 = raw1 / np.linalg.norm(raw1)
    while True:
        hw = _cn_vector(rng, m)
        hw = hw - h1 * (h1.conj() @ hw)
        nrm = np.linalg.norm(hw)
        if nrm > 1e-8:
            hw = hw / nrm
            break
    h2 = np.sqrt(rho) * h1 + np.sqrt(1.0 - rho) * hw

    if not normalize:
        h1 = h1 * np.linalg.norm(raw1)
        h2 = h2 * np.linalg.norm(_cn_vector(rng, m))
    return ChannelPair(m=m, h1=h1, h2=h2, rho=rho, seed=seed)


def effective(pair: ChannelPair) -> EffectiveChannel:
    """Reduced coordinates: U spans both channels, g_i = U^H h_i."""
    H_ul = np.column_stack([pair.h1, pair.h2])
    U, sigma, V = svd_tall(H_ul)
    return EffectiveChannel(U=U, sigma=sigma, V=V, g1=U.conj().T @ pair.h1, g2=U.conj().T @ pair.h2)


def uplink_matrix(pair: ChannelPair) -> np.ndarray:
    """H_UL = [h1 h2], M x 2."""
    return np.column_stack([pair.h1, pair.h2])


def downlink_matrix(pair: ChannelPair) -> np.ndarray:
    """H_DL = [h2 h1]^T, 2 x M; rows are the receive channels of S2, S1."""
    return np.vstack([pair.h2, pair.h1])


def relay_power(A: np.ndarray, pair: ChannelPair, pc: PowerConfig) -> float:
    """Transmit power spent by the relay when applying A.

    ||A h1||^2 p1 + ||A h2||^2 p2 + tr(A A^H); the trace term is the
    amplified relay noise.
    """
    return float(
        np.linalg.norm(A @ pair.h1) ** 2 * pc.p1
        + np.linalg.norm(A @ pair.h2) ** 2 * pc.p2
        + np.real(np.sum(A * A.conj()))
    )


def _snr_pair(B: np.ndarray, g1: np.ndarray, g2: np.ndarray, pc: PowerConfig) -> tuple:
    num21 = abs(g1 @ B @ g2) ** 2 * pc.p2
    den21 = np.linalg.norm(B.conj().T @ np.conj(g1)) ** 2 + 1.0
    num12 = abs(g2 @ B @ g1) ** 2 * pc.p1
    den12 = np.linalg.norm(B.conj().T @ np.conj(g2)) ** 2 + 1.0
    return float(num21 / den21), float(num12 / den12)


def rate_pair(A: np.ndarray, pair: ChannelPair, pc: PowerConfig) -> RatePair:
    """Achievable rate pair of the two-slot exchange through relay matrix A.

    After self-interference subtraction S1 sees gain h1^T A h2 on the S2
    symbol and noise of variance ||A^H h1*||^2 + 1, so
    r21 = (1/2) log2(1 + |h1^T A h2|^2 p2 / (||A^H h1*||^2 + 1)), and
    symmetrically for r12.
    """
    s21, s12 = _snr_pair(A, pair.h1, pair.h2, pc)
    return RatePair(r21=0.5 * np.log2(1.0 + s21), r12=0.5 * np.log2(1.0 + s12))


def snr_pair_reduced(
    bf: Union[Beamformer, np.ndarray], eff: EffectiveChannel, pc: PowerConfig
) -> tuple:
    """Receiver SNRs (gamma1 at S1, gamma2 at S2) in reduced coordinates."""
    B = bf.B if isinstance(bf, Beamformer) else np.asarray(bf, dtype=complex)
    return _snr_pair(B, eff.g1, eff.g2, pc)


def rate_pair_reduced(
    bf: Union[Beamformer, np.ndarray], eff: EffectiveChannel, pc: PowerConfig
) -> RatePair:
    """rate_pair evaluated on the reduced 2x2 matrix; equals the lifted value."""
    s21, s12 = snr_pair_reduced(bf, eff, pc)
    return RatePair(r21=0.5 * np.log2(1.0 + s21), r12=0.5 * np.log2(1.0 + s12))


def relay_power_reduced(
    bf: Union[Beamformer, np.ndarray], eff: EffectiveChannel, pc: PowerConfig
) -> float:
    """Relay power of the lifted matrix, computed from B directly."""
    B = bf.B if isinstance(bf, Beamformer) else np.asarray(bf, dtype=complex)
    return float(
        np.linalg.norm(B @ eff.g1) ** 2 * pc.p1
        + np.linalg.norm(B @ eff.g2) ** 2 * pc.p2
        + np.real(np.sum(B * B.conj()))
    )
