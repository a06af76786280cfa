"""Decode-and-forward baseline for the two-way relay channel.

The epoch splits into a multiple-access phase (fraction tau, both
sources transmit, relay decodes both messages) and a broadcast phase
(fraction 1 - tau, relay re-encodes both messages into one codeword;
each destination cancels its own message before decoding). The
achievable region is the union over tau of tau * MAC intersected with
(1 - tau) * BC.

The broadcast phase uses a single transmit covariance serving both
links at once, so its boundary comes from weighted sum-rate
maximization over the covariance, not from power splitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .beamformer import BoundaryPoint, RateProfile, RegionBoundary, _order_boundary
from .errors import InvalidInputError
from .linalg import svd_tall
from .model import ChannelPair, RatePair

LN2 = math.log(2.0)
DEFAULT_TAU_GRID = 65
DEFAULT_WEIGHTS = 65


@dataclass(frozen=True)
class MacPentagon:
    """Rate constraints of the multiple-access phase, full-epoch scale.

    c1 caps r21 (riding on the S2 uplink), c2 caps r12, c_sum caps the
    sum under joint decoding.
    """

    c1: float
    c2: float
    c_sum: float

    def ray_exit(self, profile: RateProfile) -> float:
        """Largest t with (alpha21 t, alpha12 t) inside the pentagon."""
        t = self.c_sum
        if profile.alpha21 > 0.0:
            t = min(t, self.c1 / profile.alpha21)
        if profile.alpha12 > 0.0:
            t = min(t, self.c2 / profile.alpha12)
        return t

    def frontier(self, r21: float) -> float:
        """Largest r12 available at a given r21, -inf past the cap."""
        if r21 > self.c1:
            return -math.inf
        return min(self.c2, self.c_sum - r21)

    def corners(self) -> List[Tuple[float, float]]:
        """Pareto vertices, left to right."""
        a, b, s = self.c1, self.c2, self.c_sum
        if s >= a + b:
            return [(0.0, b), (a, b), (a, 0.0)]
        return [(0.0, b), (s - b, b), (a, s - a), (a, 0.0)]


def mac_region(pair: ChannelPair, p1: float, p2: float) -> MacPentagon:
    """Decode-both-messages region at the relay's antenna array.

    The M x M determinants collapse to 2 x 2 ones through the channel
    Gram matrix.
    """
    if p1 < 0.0 or p2 < 0.0:
        raise InvalidInputError("source powers must be nonnegative")
    gram = np.array(
        [
            [p1 * pair.theta1, math.sqrt(p1 * p2) * (pair.h1.conj() @ pair.h2)],
            [math.sqrt(p1 * p2) * (pair.h2.conj() @ pair.h1), p2 * pair.theta2],
        ],
        dtype=complex,
    )
    c_sum = math.log2(float(np.real(np.linalg.det(np.eye(2) + gram))))
    return MacPentagon(
        c1=math.log2(1.0 + p2 * pair.theta2),
        c2=math.log2(1.0 + p1 * pair.theta1),
        c_sum=c_sum,
    )


@dataclass(frozen=True)
class BcPoint:
    """A broadcast-phase rate pair with the covariance achieving it.

    S_reduced is the 2x2 transmit covariance in the orthonormal frame
    `basis` of span{h1*, h2*}; the full covariance is
    basis @ S_reduced @ basis^H.
    """

    rates: RatePair
    S_reduced: np.ndarray
    basis: np.ndarray

    def full(self) -> np.ndarray:
        return self.basis @ self.S_reduced @ self.basis.conj().T


@dataclass(frozen=True)
class BcBoundary:
    """Weight-sweep trace of the broadcast region frontier.

    Points run from the r12-maximizing corner to the r21-maximizing one
    (r21 non-decreasing); covariances are the reduced 2x2 matrices of
    the corresponding points.
    """

    points: List[RatePair]
    covariances: List[np.ndarray]
    basis: np.ndarray

    def frontier(self, r21: float) -> float:
        """Largest r12 at a given r21 on the piecewise-linear frontier."""
        xs = [p.r21 for p in self.points]
        ys = [p.r12 for p in self.points]
        if r21 > xs[-1]:
            return -math.inf
        if r21 <= xs[0]:
            return ys[0]
        return float(np.interp(r21, xs, ys))


def _project_psd_trace(S: np.ndarray, budget: float) -> np.ndarray:
    """Euclidean projection onto {Q >= 0, tr Q <= budget}.

    Unitarily invariant, so it reduces to projecting the eigenvalues
    onto the simplex-capped orthant.
    """
    lam, U = np.linalg.eigh(S)
    v = np.maximum(lam, 0.0)
    total = float(v.sum())
    if total > budget:
        # water removal: v = max(lam - nu, 0) with the active sum at budget
        drop = np.sort(lam)[::-1]
        nu = 0.0
        for k in range(len(drop), 0, -1):
            nu = (drop[:k].sum() - budget) / k
            if nu <= drop[k - 1] and (k == len(drop) or nu >= drop[k]):
                break
        v = np.maximum(lam - nu, 0.0)
    return (U * v) @ U.conj().T


def _bc_frame(pair: ChannelPair) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal basis of span{h1*, h2*} plus the channels in it."""
    phi = np.column_stack([pair.h1.conj(), pair.h2.conj()])
    U, _, _ = svd_tall(phi)
    return U, U.conj().T @ phi[:, 0], U.conj().T @ phi[:, 1]


def bc_wsrmax(
    pair: ChannelPair,
    p_relay: float,
    w21: float,
    w12: float,
    tol: float = 1e-8,
) -> BcPoint:
    """Maximize w21 r21 + w12 r12 over the broadcast covariance.

    Projected gradient ascent with Armijo backtracking on the reduced
    two-dimensional covariance; the objective is concave, so the
    gradient-mapping stopping rule certifies global optimality. Starts
    from both single-link covariances and the isotropic one, keeping
    the best.
    """
    if p_relay <= 0.0:
        raise InvalidInputError("relay power budget must be positive")
    if w21 < 0.0 or w12 < 0.0 or w21 + w12 == 0.0:
        raise InvalidInputError("weights must be nonnegative and not both zero")
    basis, f1, f2 = _bc_frame(pair)

    def snrs(Q: np.ndarray) -> Tuple[float, float]:
        return (
            float(np.real(f1.conj() @ Q @ f1)),
            float(np.real(f2.conj() @ Q @ f2)),
        )

    def value(Q: np.ndarray) -> float:
        s1, s2 = snrs(Q)
        return w21 * math.log2(1.0 + s1) + w12 * math.log2(1.0 + s2)

    def gradient(Q: np.ndarray) -> np.ndarray:
        s1, s2 = snrs(Q)
        return (w21 / (LN2 * (1.0 + s1))) * np.outer(f1, f1.conj()) + (
            w12 / (LN2 * (1.0 + s2))
        ) * np.outer(f2, f2.conj())

    def ascend(Q: np.ndarray) -> Tuple[float, np.ndarray]:
        eta = 1.0
        for _ in range(5000):
            fq = value(Q)
            grad = gradient(Q)
            # fixed-step gradient mapping as the optimality residual
            ref = _project_psd_trace(Q + grad, p_relay)
            if np.linalg.norm(ref - Q) <= tol:
                break
            while True:
                trial = _project_psd_trace(Q + eta * grad, p_relay)
                step = trial - Q
                gain = float(np.real(np.vdot(grad, step)))
                if value(trial) >= fq + 1e-4 * gain or eta < 1e-14:
                    break
                eta *= 0.5
            Q = trial
            eta = min(eta * 1.3, 1e6)
        return value(Q), Q

    inits = []
    n1 = float(np.linalg.norm(f1))
    n2 = float(np.linalg.norm(f2))
    if n1 > 0.0:
        inits.append(p_relay * np.outer(f1, f1.conj()) / n1**2)
    if n2 > 0.0:
        inits.append(p_relay * np.outer(f2, f2.conj()) / n2**2)
    inits.append((p_relay / 2.0) * np.eye(2, dtype=complex))
    best_val = -math.inf
    best_Q: Optional[np.ndarray] = None
    for Q0 in inits:
        val, Q = ascend(Q0)
        if val > best_val:
            best_val, best_Q = val, Q
    assert best_Q is not None
    s1, s2 = snrs(best_Q)
    rates = RatePair(r21=math.log2(1.0 + s1), r12=math.log2(1.0 + s2))
    return BcPoint(rates=rates, S_reduced=best_Q, basis=basis)


def bc_boundary(
    pair: ChannelPair, p_relay: float, n_weights: int = DEFAULT_WEIGHTS
) -> BcBoundary:
    """Frontier of the broadcast region by a uniform weight sweep."""
    if n_weights < 2:
        raise InvalidInputError("need at least two weights")
    traced: List[BcPoint] = []
    for k in range(n_weights):
        w = k / (n_weights - 1)
        traced.append(bc_wsrmax(pair, p_relay, w, 1.0 - w))
    # solver noise can wiggle the sweep by ~tol; keep knots sorted for interp
    traced.sort(key=lambda p: p.rates.r21)
    return BcBoundary(
        points=[p.rates for p in traced],
        covariances=[p.S_reduced for p in traced],
        basis=traced[0].basis,
    )


def bc_ray_exit(pair: ChannelPair, p_relay: float, profile: RateProfile) -> float:
    """Largest t with (alpha21 t, alpha12 t) in the broadcast region.

    The boundary is the weight sweep of bc_wsrmax plus two flat arms
    where one rate is already at its single-link maximum; the achieved
    rate ratio moves monotonically with the weight, so bisection on the
    weight lands on the ray.
    """
    if profile.alpha21 == 0.0:
        return bc_wsrmax(pair, p_relay, 0.0, 1.0).rates.r12
    if profile.alpha12 == 0.0:
        return bc_wsrmax(pair, p_relay, 1.0, 0.0).rates.r21

    def side(point: BcPoint) -> float:
        return profile.alpha12 * point.rates.r21 - profile.alpha21 * point.rates.r12

    left = bc_wsrmax(pair, p_relay, 0.0, 1.0)
    if side(left) >= 0.0:  # ray passes under the left corner: flat top
        return left.rates.r12 / profile.alpha12
    right = bc_wsrmax(pair, p_relay, 1.0, 0.0)
    if side(right) <= 0.0:  # ray passes over the right corner: flat side
        return right.rates.r21 / profile.alpha21

    lo, hi = 0.0, 1.0
    best = 0.0
    for _ in range(50):
        w = 0.5 * (lo + hi)
        point = bc_wsrmax(pair, p_relay, w, 1.0 - w)
        best = max(
            best,
            min(
                point.rates.r21 / profile.alpha21,
                point.rates.r12 / profile.alpha12,
            ),
        )
        if side(point) < 0.0:
            lo = w
        else:
            hi = w
    return best


def df_tau_slice(
    pent: MacPentagon, bc: BcBoundary, tau: float
) -> List[Tuple[float, float]]:
    """Pareto boundary of tau * MAC intersected with (1 - tau) * BC.

    Both regions are downward closed, so the intersection's frontier is
    the pointwise minimum of the two scaled frontiers; its knots are
    the scaled knots of either one.
    """
    if not 0.0 <= tau <= 1.0:
        raise InvalidInputError("tau must lie in [0, 1]")
    sigma = 1.0 - tau
    x_max = min(tau * pent.c1, sigma * bc.points[-1].r21)
    knots = {0.0, x_max}
    for x, _ in pent.corners():
        if 0.0 <= tau * x <= x_max:
            knots.add(tau * x)
    for p in bc.points:
        if 0.0 <= sigma * p.r21 <= x_max:
            knots.add(sigma * p.r21)
    out = []
    for x in sorted(knots):
        y_mac = tau * pent.frontier(x / tau) if tau > 0.0 else 0.0
        y_bc = sigma * bc.frontier(x / sigma) if sigma > 0.0 else 0.0
        out.append((x, max(0.0, min(y_mac, y_bc))))
    return out


def _pareto_envelope(points: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    best: List[Tuple[float, float]] = []
    for x, y in sorted(points, key=lambda p: (-p[0], -p[1])):
        if not best or y > best[-1][1] + 1e-15:
            best.append((x, y))
    return best[::-1]


def df_capacity_region(
    pair: ChannelPair,
    p1: float,
    p2: float,
    p_relay: float,
    n_tau: int = DEFAULT_TAU_GRID,
    n_weights: int = DEFAULT_WEIGHTS,
) -> RegionBoundary:
    """Decode-and-forward region: Pareto envelope of the tau-grid slices.

    n_tau = 1 evaluates the single equal split tau = 1/2; larger grids
    cover [0, 1] uniformly and only enlarge the region.
    """
    if n_tau < 1:
        raise InvalidInputError("need at least one tau")
    pent = mac_region(pair, p1, p2)
    bc = bc_boundary(pair, p_relay, n_weights)
    taus = [0.5] if n_tau == 1 else list(np.linspace(0.0, 1.0, n_tau))
    cloud: List[Tuple[float, float]] = []
    for tau in taus:
        cloud.extend(df_tau_slice(pent, bc, tau))
    pts = [
        BoundaryPoint(
            alpha21=x / (x + y) if x + y > 0.0 else 0.5,
            rates=RatePair(r21=x, r12=y),
            beamformer=None,
            p1=p1,
            p2=p2,
            p_relay=p_relay,
        )
        for x, y in _pareto_envelope(cloud)
    ]
    return RegionBoundary(points=_order_boundary(pts, tie=1e-12))


def df_boundary_value(
    pair: ChannelPair,
    p1: float,
    p2: float,
    p_relay: float,
    profile: RateProfile,
) -> Tuple[float, float]:
    """Exact ray exit of the decode-and-forward region and its time share.

    Along a ray the MAC side scales like tau * t_mac and the broadcast
    side like (1 - tau) * t_bc, so the best split equalizes them; this
    avoids the tau-grid discretization entirely.
    """
    t_mac = mac_region(pair, p1, p2).ray_exit(profile)
    t_bc = bc_ray_exit(pair, p_relay, profile)
    if t_mac <= 0.0 or t_bc <= 0.0:
        return 0.0, 0.5
    tau = t_bc / (t_mac + t_bc)
    return t_mac * t_bc / (t_mac + t_bc), tau
