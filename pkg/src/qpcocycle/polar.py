"""Overflow-proof polar-form algebra for rotation/stretch products.

A product of factors R(phi) Z(lambda) is carried as the triple
(theta, chi, mu) meaning R(theta+chi) Z(mu) R(-chi).  mu is the log of the
top singular value and is accumulated additively, so products with
mu in the thousands never materialize a dense matrix.  All exponentials of
the inputs enter the update formulas only through the decaying quantities
u = e^{-2 mu1}, v = e^{-2 mu2}, which are flushed to zero on underflow
(exact to working precision).

Conventions: mu >= 0 always; theta reduced to (-pi, pi]; chi is defined
modulo pi and its branch is chained by continuity along a product, starting
from chi = 0 for a single factor.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DenseOverflowError, GrowthHypothesisError
from .precision import FLOAT


@dataclass(frozen=True)
class PolarForm:
    """R(theta+chi) Z(mu) R(-chi) with mu >= 0."""

    theta: object
    chi: object
    mu: object

    def chi_mod_pi(self, prec=FLOAT):
        """chi folded into (-pi/2, pi/2] (the invariant representative)."""
        halfpi = prec.pi / 2
        y = prec.wrap_angle(2 * self.chi) / 2
        if y <= -halfpi:
            y += prec.pi
        return y


def polar_identity(prec=FLOAT):
    zero = prec.real(0)
    return PolarForm(zero, zero, zero)


def _check_finite(prec, *vals):
    for t in vals:
        if not math.isfinite(prec.to_float(t)):
            raise ValueError("non-finite input to polar operation")


def zrz_polar(mu2, phi, mu1, prec=FLOAT):
    """Polar form of Z(mu2) R(phi) Z(mu1), exact in the backend arithmetic.

    Writing u = e^{-2 mu1}, v = e^{-2 mu2} (never their reciprocals):

        theta = atan2(sin(phi) (u+v), cos(phi) (1+uv))
        e^{2 mu} = e^{2(mu1+mu2)} (Q + sqrt(Fm Fp)) / 2
        2 chi = atan2(-2 cos sin u (1-v^2), cos^2 (1-(uv)^2) - sin^2 (u^2-v^2))

    with Q = cos^2 (1+(uv)^2) + sin^2 (u^2+v^2) and the cancellation-free
    factor pair Fm = cos^2 (1-uv)^2 + sin^2 (u-v)^2,
    Fp = cos^2 (1+uv)^2 + sin^2 (u+v)^2 of (tr M^T M)^2 - 4.
    """
    _check_finite(prec, mu2, phi, mu1)
    if prec.to_float(mu1) < 0 or prec.to_float(mu2) < 0:
        raise ValueError("stretch exponents must be nonnegative")
    c = prec.cos(phi)
    s = prec.sin(phi)
    u = prec.exp(-2 * mu1)
    v = prec.exp(-2 * mu2)

    Q = c * c * (1 + (u * v) ** 2) + s * s * (u * u + v * v)
    Fm = c * c * (1 - u * v) ** 2 + s * s * (u - v) ** 2
    Fp = c * c * (1 + u * v) ** 2 + s * s * (u + v) ** 2
    if Q == 0 and Fp == 0:
        # cos(phi) and both e^{-2mu} below underflow: the product is exactly
        # a rotation times a stretch, Z(mu2) R(phi) Z(mu1) = R(phi) Z(mu1-mu2)
        mu = abs(mu1 - mu2)
        chi = prec.real(0) if mu1 >= mu2 else prec.pi / 2
        return PolarForm(prec.wrap_angle(phi), chi, mu)

    theta = prec.atan2(s * (u + v), c * (1 + u * v))
    mu = mu1 + mu2 + prec.log((Q + prec.sqrt(Fm * Fp)) / 2) / 2
    if mu < 0:
        mu = prec.real(0)
    two_chi = prec.atan2(-2 * c * s * u * (1 - v * v),
                         c * c * (1 - (u * v) ** 2) - s * s * (u * u - v * v))
    return PolarForm(prec.wrap_angle(theta), two_chi / 2, mu)


def polar_append(state, phi, lam, prec=FLOAT):
    """Polar form of R(phi) Z(lam) * state, without densifying.

    One inner ZRZ call on Z(lam) R(state.theta+state.chi) Z(state.mu) plus
    rotation-angle bookkeeping:

        chi'   = state.chi + inner.chi
        theta' = phi + inner.theta - state.chi

    The inner chi comes out on its principal branch (-pi/2, pi/2], which is
    the continuity choice: under the growth hypotheses the increment is
    exponentially small.
    """
    inner = zrz_polar(lam, state.theta + state.chi, state.mu, prec=prec)
    chi = state.chi + inner.chi
    theta = prec.wrap_angle(phi + inner.theta - state.chi)
    return PolarForm(theta, chi, inner.mu)


def polar_product(factors, prec=FLOAT):
    """Fold a sequence of (phi, lam) into a polar form, factor 0 rightmost."""
    state = polar_identity(prec)
    for phi, lam in factors:
        state = polar_append(state, phi, lam, prec=prec)
    return state


def polar_inverse(state, prec=FLOAT):
    """Polar form of the matrix inverse, renormalized to mu >= 0.

    M^{-1} = R(chi) Z(-mu) R(-theta-chi); the sign of the stretch is absorbed
    with Z(-mu) = R(pi/2) Z(mu) R(-pi/2), giving
    (theta, chi, mu) -> (-theta, theta + chi + pi/2, mu).
    """
    _check_finite(prec, state.theta, state.chi, state.mu)
    halfpi = prec.pi / 2
    return PolarForm(prec.wrap_angle(-state.theta),
                     state.theta + state.chi + halfpi, state.mu)


def rotation_matrix(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


def stretch_matrix(lam):
    return np.array([[np.exp(lam), 0.0], [0.0, np.exp(-lam)]])


def densify(state, prec=FLOAT):
    """Dense 2x2 matrix of a polar form; refuses when e^{mu} could overflow."""
    if prec.to_float(state.mu) > prec.dense_mu_limit:
        raise DenseOverflowError(
            f"mu={prec.to_float(state.mu):.3g} exceeds dense guard "
            f"{prec.dense_mu_limit:.3g}; stay in polar form")
    if prec.is_float:
        return (rotation_matrix(float(state.theta) + float(state.chi))
                @ stretch_matrix(float(state.mu))
                @ rotation_matrix(-float(state.chi)))
    a = state.theta + state.chi
    ca, sa = prec.cos(a), prec.sin(a)
    cb, sb = prec.cos(-state.chi), prec.sin(-state.chi)
    em, eminv = prec.exp(state.mu), prec.exp(-state.mu)
    # R(a) Z(mu) R(b) written out entrywise
    return ((ca * em * cb + sa * eminv * sb, ca * em * sb - sa * eminv * cb),
            (-sa * em * cb + ca * eminv * sb, -sa * em * sb - ca * eminv * cb))


def polar_from_matrix(m):
    """Polar form of a dense SL(2,R) matrix via SVD (float backend only).

    Intended for round-trips and oracle comparisons at moderate mu.
    """
    m = np.asarray(m, dtype=float)
    u, sv, vh = np.linalg.svd(m)
    if np.linalg.det(u) < 0:
        u = u.copy()
        vh = vh.copy()
        u[:, 1] *= -1.0
        vh[1, :] *= -1.0
    chi = -np.arctan2(vh[0, 1], vh[0, 0])
    theta_plus_chi = np.arctan2(u[0, 1], u[0, 0])
    theta = float(theta_plus_chi - chi)
    theta = np.arctan2(np.sin(theta), np.cos(theta))
    return PolarForm(float(theta), float(chi), float(np.log(sv[0])))


@dataclass(frozen=True)
class FactorSequence:
    """Factors (phi_k, lambda_k) with certified bounds |cos phi_k| >= delta,
    lambda_k >= lambda_floor > 0."""

    phis: tuple
    lams: tuple
    delta: float
    lambda_floor: float

    def __post_init__(self):
        if len(self.phis) != len(self.lams):
            raise ValueError("phi and lambda sequences differ in length")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if self.lambda_floor <= 0:
            raise ValueError("lambda_floor must be positive")
        for lam in self.lams:
            if lam < self.lambda_floor:
                raise ValueError("lambda below declared floor")
        for phi in self.phis:
            if abs(np.cos(phi)) < self.delta * (1 - 1e-12):
                raise ValueError("|cos phi| below declared delta")

    def __len__(self):
        return len(self.phis)

    @classmethod
    def from_factors(cls, factors):
        """Build with delta, lambda_floor measured from the factors."""
        phis = tuple(float(p) for p, _ in factors)
        lams = tuple(float(l) for _, l in factors)
        delta = min(abs(np.cos(p)) for p in phis)
        return cls(phis, lams, delta, min(lams))


def mu_step_floor(delta, lam0):
    """Guaranteed per-step growth of mu: lambda0 + log(delta) - 2 delta^-2 e^{-4 lambda0}."""
    return lam0 + np.log(delta) - 2.0 * delta ** -2 * np.exp(-4.0 * lam0)


def theta_drift_bound(delta, lam0):
    """|theta_n - phi_n| <= 2 delta^-1 e^{-2 lambda0}."""
    return 2.0 / delta * np.exp(-2.0 * lam0)


def chi_step_bound(n, delta, lam0):
    """|chi_n - chi_{n-1}| bound at chain position n >= 2."""
    if n < 2:
        return 0.0
    base = delta ** (-2 * n + 3) * np.exp(-2.0 * (n - 1) * lam0)
    corr = (1.0 - 2.0 * delta ** -2 * np.exp(-4.0 * lam0)) ** (-2 * (n - 2))
    return base * corr


@dataclass(frozen=True)
class GrowthFloor:
    """Certified lower-bound data for a factor chain."""

    bound: float        # log ||A^k|| >= bound
    C_A: float          # ||A^k|| >= (C_A delta e^{lambda0})^k
    mu_floor: float     # per-step mu increment floor
    chi_bound: float    # |chi_k| bound for the whole chain


def product_lower_bound(seq):
    """Growth floor for a factor chain under |cos phi| >= delta, lambda >= lambda0.

    Requires delta e^{lambda0} > 2 so the defect constant is meaningful.
    """
    delta, lam0, k = seq.delta, seq.lambda_floor, len(seq)
    if delta * np.exp(lam0) <= 2.0:
        raise GrowthHypothesisError(
            f"delta*e^lambda0 = {delta * np.exp(lam0):.3g} <= 2")
    defect = 2.0 * delta ** -2 * np.exp(-4.0 * lam0)
    C_A = float(np.exp(-defect))
    floor = mu_step_floor(delta, lam0)
    # chi increments decay at least geometrically with ratio r
    r = delta ** -2 * np.exp(-2.0 * lam0) * (1.0 - defect) ** -2
    first = chi_step_bound(2, delta, lam0)
    chi_total = first / (1.0 - r) if r < 1.0 else float("inf")
    return GrowthFloor(bound=k * floor, C_A=C_A, mu_floor=floor,
                       chi_bound=float(chi_total))
