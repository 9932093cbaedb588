"""The cocycle model: phase/stretch families, fiber maps, iterated products,
and ingestion of a torus potential into phase/stretch data.

A fiber map is A(x) = prod_{k=1..K} R(phi_k(x)) Z(lambda_k(x)) with the k=1
factor applied first (rightmost), phi_k = phi_hat_k(x)/eps and
lambda_k = lambda_hat_k(x)/eps.  Iterates M(x,n) are kept in polar form
throughout.
"""

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DegenerateInputError, PrecisionExhausted, QuadratureError
from .functions import circle_function_from_spec
from .polar import FactorSequence, polar_append, polar_identity, polar_inverse
from .precision import FLOAT


@dataclass(frozen=True)
class PhaseEntry:
    phi_hat: object
    lambda_hat: object


class PhaseFamily:
    """Entries (phi_hat_k, lambda_hat_k), k = 1..K, of circle functions.

    lambda_hat_k must be strictly positive; the cached floor
    lambda0 = min_{k,x} lambda_hat_k(x) normalizes all growth estimates.
    """

    def __init__(self, entries):
        self.entries = tuple(PhaseEntry(e[0], e[1]) if not isinstance(e, PhaseEntry)
                             else e for e in entries)
        if not self.entries:
            raise ValueError("phase family needs at least one entry")
        self.lambda0 = min(e.lambda_hat.minimum() for e in self.entries)
        if self.lambda0 <= 0:
            raise ValueError("lambda_hat must be strictly positive")

    @property
    def K(self):
        return len(self.entries)

    @property
    def is_constant(self):
        return all(e.phi_hat.is_constant for e in self.entries)

    def nondegenerate_critical_points(self, tol=1e-8):
        """True when every phase profile has |phi''| bounded away from zero
        at each critical point of phi (checked on the refined extrema)."""
        for e in self.entries:
            if e.phi_hat.is_constant:
                return False
            for _, _, second in e.phi_hat.extrema():
                if abs(second) < tol:
                    return False
        return True

    def to_spec(self):
        return [{"phi_hat": e.phi_hat.to_spec(),
                 "lambda_hat": e.lambda_hat.to_spec()} for e in self.entries]

    @classmethod
    def from_spec(cls, spec):
        return cls([(circle_function_from_spec(d["phi_hat"]),
                     circle_function_from_spec(d["lambda_hat"]))
                    for d in spec])


@dataclass(frozen=True)
class CocycleSpec:
    """Rotation number, small parameter, phase family."""

    omega: object
    epsilon: float
    phases: PhaseFamily
    eps_max: float = field(default=0.5)

    def __post_init__(self):
        if self.omega.is_rational:
            raise DegenerateInputError("rotation number flagged rational; "
                                       "the cocycle analysis needs it irrational")
        if not 0 < self.epsilon < self.eps_max:
            raise ValueError(f"epsilon must lie in (0, {self.eps_max})")

    @property
    def lambda0(self):
        return self.phases.lambda0

    def with_epsilon(self, eps):
        return CocycleSpec(self.omega, float(eps), self.phases, self.eps_max)


def eval_factors(spec, x):
    """(phi_k(x), lambda_k(x)) = (phi_hat_k(x)/eps, lambda_hat_k(x)/eps),
    with the measured |cos| and stretch floors attached."""
    eps = float(spec.epsilon)
    phis = tuple(e.phi_hat.value(x) / eps for e in spec.phases.entries)
    lams = tuple(e.lambda_hat.value(x) / eps for e in spec.phases.entries)
    delta = max(min(abs(math.cos(p)) for p in phis), 1e-300)
    return FactorSequence(phis, lams, delta, min(lams))


def _factor_values(spec, x, prec):
    eps = prec.real(spec.epsilon)
    return [(e.phi_hat.value(x, prec) / eps, e.lambda_hat.value(x, prec) / eps)
            for e in spec.phases.entries]


def fiber_map(spec, x, prec=FLOAT, state=None):
    """Polar form of A(x); with `state` given, of A(x) * state."""
    if state is None:
        state = polar_identity(prec)
    for phi, lam in _factor_values(spec, x, prec):
        state = polar_append(state, phi, lam, prec=prec)
    return state


def orbit_point(spec, x, m, prec=FLOAT):
    """x + m omega mod 1 in the backend type, from the high-precision omega."""
    bits = spec.omega.precision_bits
    if abs(m) * 2.0 ** (1 - bits) > 1e-9:
        raise PrecisionExhausted(f"orbit step {m} too deep for {bits} bits")
    with mpmath.workprec(max(bits, 64)):
        val = mpmath.mpf(x) + m * spec.omega.value_at(bits)
        val = val - mpmath.floor(val)
    return prec.real(val)


def cocycle_matrix(spec, x, n, prec=FLOAT):
    """Polar form of M(x, n) for any integer n (identity at n = 0).

    Negative times use M(x,-m) = M(sigma^-m x, m)^{-1}, the inverse-product
    form consistent with the cocycle identity.
    """
    if n == 0:
        return polar_identity(prec)
    if n < 0:
        forward = cocycle_matrix(spec, orbit_point(spec, x, n, prec), -n, prec)
        return polar_inverse(forward, prec)
    state = polar_identity(prec)
    for m in range(n):
        state = fiber_map(spec, orbit_point(spec, x, m, prec), prec, state)
    return state


def cocycle_schedule(spec, x, ns, prec=FLOAT):
    """Polar forms of M(x, n) at the checkpoints ns (sorted, positive),
    from a single product sweep."""
    ns = sorted(set(int(n) for n in ns))
    if not ns or ns[0] < 1:
        raise ValueError("schedule must be positive")
    out = {}
    state = polar_identity(prec)
    for m in range(ns[-1]):
        state = fiber_map(spec, orbit_point(spec, x, m, prec), prec, state)
        if m + 1 in ns:
            out[m + 1] = state
    return out


# ---------------------------------------------------------------------------
# Torus-potential ingestion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Component:
    """One connected piece of {s : sign F(x+omega s, s) = sign} along the
    fiber segment, in wrapped line coordinates (s_lo may be negative)."""

    s_lo: float
    s_hi: float
    sign: int

    @property
    def length(self):
        return self.s_hi - self.s_lo


@dataclass(frozen=True)
class SegmentDecomposition:
    x: float
    roots: tuple
    components: tuple        # ordered by s, alternating signs, wrapped
    degenerate: bool         # sign-definite potential along this fiber

    @property
    def K(self):
        pos = sum(1 for c in self.components if c.sign > 0)
        neg = len(self.components) - pos
        return max(pos, neg)


def decompose_segment(potential, x, omega, root_tolerance=1e-12, oversample=4.0):
    """Locate the sign components of s -> F(x + omega s, s) on one period.

    Roots are bracketed on a grid finer than the top fiber frequency and
    polished by Brent's method; tangential (double) roots are rejected as
    degenerate input.  A component spanning s = 0 is joined (wrapped) when
    the fiber restriction has the same sign on both sides of the period
    boundary; otherwise the boundary acts as a cut (the restriction jumps
    there whenever the potential depends on the first angle).
    """
    f, df = potential.along_fiber(x, omega)
    freq = potential.max_fiber_frequency(omega)
    n = max(64, int(oversample * freq))
    s_grid = np.linspace(0.0, 1.0, n + 1)
    vals = np.array([f(s) for s in s_grid])

    raw = []
    for i in range(n):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            raw.append(float(s_grid[i]))
        elif a * b < 0.0:
            raw.append(float(brentq(f, s_grid[i], s_grid[i + 1],
                                    xtol=root_tolerance, rtol=4e-16)))
    roots = []
    for r in sorted(raw):
        if not roots or r - roots[-1] > 10.0 * root_tolerance:
            roots.append(r)
    for r in roots:
        if abs(df(r)) < math.sqrt(root_tolerance):
            raise DegenerateInputError(
                f"tangential root of the potential at s={r:.6f}, x={x:.6f}")

    if not roots:
        sign = 1 if f(0.5) > 0 else -1
        comp = Component(0.0, 1.0, sign)
        return SegmentDecomposition(float(x), (), (comp,), True)

    def sign_at(s):
        return 1 if f(s % 1.0) > 0 else -1

    comps = [Component(roots[i], roots[i + 1],
                       sign_at(0.5 * (roots[i] + roots[i + 1])))
             for i in range(len(roots) - 1)]
    head_sign = sign_at(0.5 * roots[0]) if roots[0] > 0 else sign_at(roots[0] + 1e-9)
    tail_sign = sign_at(0.5 * (roots[-1] + 1.0))
    if head_sign == tail_sign:
        # wrapped component across s = 0, reported first in line coordinates
        comps = [Component(roots[-1] - 1.0, roots[0], head_sign)] + comps
    else:
        comps = ([Component(0.0, roots[0], head_sign)] + comps
                 + [Component(roots[-1], 1.0, tail_sign)])
    return SegmentDecomposition(float(x), tuple(roots), tuple(comps), False)


def _component_integral(f, comp, arc_factor, tol):
    """integral of |f|^{1/2} over the component, u^2-substituted at the root
    endpoints so the integrand is smooth."""
    a, b = comp.s_lo, comp.s_hi
    if comp.length >= 1.0:  # sign-definite full fiber, no root endpoints
        val, err = quad(lambda s: math.sqrt(abs(f(s % 1.0))), a, b,
                        limit=200, epsabs=tol, epsrel=tol)
        return arc_factor * val, arc_factor * err
    mid = 0.5 * (a + b)

    def left(u):
        return 2.0 * u * math.sqrt(abs(f((a + u * u) % 1.0)))

    def right(u):
        return 2.0 * u * math.sqrt(abs(f((b - u * u) % 1.0)))

    v1, e1 = quad(left, 0.0, math.sqrt(mid - a), limit=200, epsabs=tol,
                  epsrel=tol)
    v2, e2 = quad(right, 0.0, math.sqrt(b - mid), limit=200, epsabs=tol,
                  epsrel=tol)
    return arc_factor * (v1 + v2), arc_factor * (e1 + e2)


@dataclass(frozen=True)
class IngestedFactors:
    """Sampled phase/stretch values at one base point."""

    x: float
    phi_hat: tuple
    lambda_hat: tuple
    quad_error: float
    K: int


def line_integrals(decomp, potential, omega, tol=1e-10):
    """phi_hat_k(x), lambda_hat_k(x) from the component integrals of |F|^{1/2}.

    The arc-length element along the fiber {(x + omega s, s)} is
    sqrt(1 + omega^2) ds.  Stretch values come from positive components,
    phase values from negative ones; the k-th stretch pairs with the phase
    component that follows it along s.
    """
    f, _ = potential.along_fiber(decomp.x, omega)
    arc = math.sqrt(1.0 + float(omega) ** 2)
    err_total = 0.0
    seq = []
    for comp in sorted(decomp.components, key=lambda c: c.s_lo):
        val, err = _component_integral(f, comp, arc, tol)
        err_total += err
        seq.append((comp.sign, val))
    if err_total > max(tol * 10.0, 1e-13):
        raise QuadratureError(
            f"quadrature error {err_total:.3g} above tolerance near x={decomp.x}")

    # factor k = (R(phi_k) Z(lambda_k)) applied stretch-first, so the k-th
    # positive component pairs with the phase component that follows it; a
    # leading phase belongs to the final factor (circular alternation)
    if len(seq) > 1 and seq[0][0] < 0:
        seq = seq[1:] + [seq[0]]
    phis, lams = [], []
    pending = None
    for sign, val in seq:
        if sign > 0:
            if pending is not None:      # two stretches in a row (cut case)
                lams.append(pending)
                phis.append(0.0)
            pending = val
        elif pending is not None:
            lams.append(pending)
            phis.append(val)
            pending = None
        else:                            # lone phase, identity stretch
            lams.append(0.0)
            phis.append(val)
    if pending is not None:
        lams.append(pending)
        phis.append(0.0)
    return IngestedFactors(decomp.x, tuple(phis), tuple(lams),
                           float(err_total), decomp.K)
