"""Continued-fraction arithmetic for rotation numbers.

The rotation number is stored canonically as its partial quotients; the
real value, convergents, return-time structure, the Brjuno sum and the
regular-denominator-growth test are all derived from them.  Convergent
arithmetic is exact (Python integers); the real value is an mpmath float
at the instance precision.
"""

import math
from dataclasses import dataclass, field

import mpmath

from .errors import DepthExhausted, InfeasibleConstruction, PrecisionExhausted

DEFAULT_BITS = 256


@dataclass(frozen=True)
class Convergents:
    """Best rational approximations p_n/q_n.

    pairs[0] = (p_0, q_0) = (a_0=0 truncation) is omitted; pairs[n-1] holds
    (p_n, q_n) for n = 1.. built from quotients a_1, a_2, ...
    """

    pairs: tuple

    def __len__(self):
        return len(self.pairs)

    def q(self, n):
        """q_n for n >= 0 (q_0 = 1)."""
        if n == 0:
            return 1
        return self.pairs[n - 1][1]

    def p(self, n):
        if n == 0:
            return 0
        return self.pairs[n - 1][0]


def convergents_from_quotients(quotients):
    p_prev, q_prev = 1, 0          # (p_-1, q_-1)
    p, q = 0, 1                    # (p_0, q_0)
    pairs = []
    for a in quotients:
        if a < 1:
            raise ValueError("partial quotients must be positive integers")
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        pairs.append((p, q))
    return Convergents(tuple(pairs))


@dataclass(frozen=True)
class RotationNumber:
    """omega in (0,1) given by partial quotients [0; a1, a2, ...]."""

    quotients: tuple
    precision_bits: int = DEFAULT_BITS
    is_rational: bool = False
    convergents: Convergents = field(default=None, repr=False)

    def __post_init__(self):
        if self.convergents is None:
            object.__setattr__(self, "convergents",
                               convergents_from_quotients(self.quotients))

    @property
    def value(self):
        """mpf value of the deepest convergent at the instance precision."""
        p, q = self.convergents.pairs[-1]
        bits = max(self.precision_bits, 2 * q.bit_length() + 64)
        with mpmath.workprec(bits):
            return mpmath.mpf(p) / q

    def value_at(self, bits):
        p, q = self.convergents.pairs[-1]
        with mpmath.workprec(max(bits, 2 * q.bit_length() + 64)):
            return mpmath.mpf(p) / q


def quotients_to_text(quotients):
    return ",".join(str(a) for a in quotients)


def quotients_from_text(text):
    return tuple(int(tok) for tok in text.strip().split(",") if tok.strip())


def cf_expand(omega, depth, precision_bits=DEFAULT_BITS):
    """Partial quotients and convergents of omega in (0,1).

    The expansion stops early if omega is (numerically) rational.  Each new
    denominator must satisfy the guard q_n^2 < 2^p, otherwise the remaining
    quotients would be noise and PrecisionExhausted is raised.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    with mpmath.workprec(precision_bits):
        x = mpmath.mpf(omega) if isinstance(omega, str) else +mpmath.mpf(omega)
        if not 0 < x < 1:
            raise ValueError("omega must lie strictly between 0 and 1")
        eps = mpmath.mpf(2) ** (-precision_bits + 8)
        quotients = []
        rational = False
        y = 1 / x
        q_prev, q = 0, 1
        for _ in range(depth):
            a = int(mpmath.floor(y))
            frac = y - a
            quotients.append(a)
            q_prev, q = q, a * q + q_prev
            if q * q >= 2 ** precision_bits:
                raise PrecisionExhausted(
                    f"q_n^2 = {float(q) ** 2:.3g} exceeds 2^{precision_bits}; "
                    "raise precision_bits")
            if frac < eps * max(1, a):
                rational = True
                break
            y = 1 / frac
    omega_out = RotationNumber(tuple(quotients), precision_bits, rational)
    return omega_out, omega_out.convergents


def omega_from_quotients(quotients, precision_bits=DEFAULT_BITS, rational=False):
    """Rotation number defined by its quotients (truncated expansion)."""
    return RotationNumber(tuple(int(a) for a in quotients),
                          precision_bits, rational)


def orbit_distance(omega, m):
    """dist(sigma^m(x), x) = min(frac(m omega), 1 - frac(m omega)).

    Exact integer arithmetic on the deepest convergent p_N/q_N, with a
    guard that the truncation error m * |omega - p_N/q_N| (bounded by
    m / q_N^2) stays below 1e-3 of the answer.  Returns an mpf.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    p, q = omega.convergents.pairs[-1]
    r = (m * p) % q
    r = min(r, q - r)
    if r == 0:
        if omega.is_rational:
            return mpmath.mpf(0)
        raise PrecisionExhausted(f"orbit step {m} aliases the truncation q_N={q}")
    bits = max(omega.precision_bits, q.bit_length() + 64)
    with mpmath.workprec(bits):
        dist = mpmath.mpf(r) / q
        if not omega.is_rational:
            # |omega - p_N/q_N| <= 1/(q_N q_{N+1}) <= 1/q_N^2
            if mpmath.mpf(m) / (mpmath.mpf(q) * q) > mpmath.mpf("1e-3") * dist:
                raise PrecisionExhausted(
                    f"truncation error at m={m} not below 1e-3 of the distance; "
                    "expand the continued fraction deeper")
        return dist


def first_return_finer_than(omega, delta):
    """Smallest convergent denominator q_n with 1/q_{n+1} < delta.

    Under the sandwich 1/q_{n+1} < delta < 1/(4 q_n) this q_n is the first
    entry time of any delta-interval's orbit into itself.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    conv = omega.convergents
    for n in range(len(conv)):
        # q(n) with q_{n+1} = conv.q(n+1)
        if mpmath.mpf(1) / conv.q(n + 1) < delta:
            return conv.q(n), n
    raise DepthExhausted("no convergent with 1/q_{n+1} < delta at this depth")


@dataclass(frozen=True)
class BrjunoReport:
    partial_sums: tuple
    C_B: float
    depth: int
    tail_bound: float

    def to_dict(self):
        return {"partial_sums": [float(s) for s in self.partial_sums],
                "C_B": float(self.C_B), "depth": self.depth,
                "tail_bound": float(self.tail_bound)}


def brjuno_sum(conv, depth):
    """Partial sums of sum_n log(2 q_{n+1}) / q_n, n = 1..depth.

    The tail majorant uses q_{n+2} >= 2 q_n plus the extrapolation that
    quotients beyond the expansion do not exceed the largest observed one.
    """
    if depth + 1 > len(conv):
        raise DepthExhausted(f"need q_{depth + 1}; only {len(conv)} convergents")
    sums = []
    total = mpmath.mpf(0)
    for n in range(1, depth + 1):
        total += mpmath.log(2 * conv.q(n + 1)) / conv.q(n)
        sums.append(float(total))
    # tail: terms (L + m B) / (q_D 2^{floor(m/2)}) with L = log(2 q_{D+1}),
    # B = log(max quotient + 2)
    qD = conv.q(depth)
    L = math.log(2 * conv.q(depth + 1))
    max_a = max(p_q[1] // max(1, conv.q(i)) for i, p_q in enumerate(conv.pairs))
    B = math.log(max_a + 2)
    tail = sum((L + m * B) / (qD * 2 ** (m // 2)) for m in range(1, 200))
    return BrjunoReport(tuple(sums), float(total), depth, float(tail))


@dataclass(frozen=True)
class ConditionAConstants:
    C_omega: float
    C_eps: float
    C_delta: float
    gamma: float

    def __post_init__(self):
        if min(self.C_omega, self.C_eps, self.C_delta, self.gamma) <= 0:
            raise ValueError("condition-(A) constants must be positive")
        if self.C_delta >= 1:
            raise ValueError("C_delta must be < 1")

    def to_dict(self):
        return {"C_omega": self.C_omega, "C_eps": self.C_eps,
                "C_delta": self.C_delta, "gamma": self.gamma}


@dataclass(frozen=True)
class ConditionAReport:
    subsequence_indices: tuple   # indices n_j with q_{n_j+1} > C_omega q_{n_j}^{1+gamma}
    constants: ConditionAConstants
    C_B: float
    J_indices: tuple             # chain positions into subsequence_indices
    passed: bool
    violations: tuple            # (subsequence position, "lower"|"upper"|"empty")

    def chain_denominators(self, conv):
        return tuple(conv.q(self.subsequence_indices[j]) for j in self.J_indices)

    def to_dict(self):
        return {"subsequence_indices": list(self.subsequence_indices),
                "constants": self.constants.to_dict(),
                "C_B": float(self.C_B),
                "J_indices": list(self.J_indices),
                "pass": self.passed,
                "violations": [list(v) for v in self.violations]}


def _growth_window(qk, constants, C_B):
    """(lower, upper) bounds for log q_next given the current chain member qk."""
    g = constants.gamma
    lower = (math.log(qk) + math.log(1.0 / constants.C_delta) / (1 + g))
    upper = qk * (constants.C_eps
                  - C_B / (1 + g) * (1 - constants.C_delta - 1.0 / qk)
                  - math.log(constants.C_omega) / ((1 + g) * qk))
    return lower, upper


def check_condition_A(conv, constants, C_B, tail_margin=3):
    """Regular-denominator-growth test.

    First collects the maximal set of indices n with
    q_{n+1} > C_omega q_n^{1+gamma}.  Passing requires that subsequence to
    persist through the available depth (its last member within tail_margin
    of the deepest testable index; rotation numbers whose quotient ratios
    die out, like the golden mean, fail here) and that a greedy chain
    J_1 < J_2 < ... through it satisfies the two-sided window on log q_next
    at every step, ending at the last subsequence element.
    """
    g = constants.gamma
    sub = []
    for n in range(1, len(conv)):
        qn, qn1 = conv.q(n), conv.q(n + 1)
        if qn1 > constants.C_omega * qn ** (1 + g):
            sub.append(n)
    sub = tuple(sub)
    if not sub:
        return ConditionAReport(sub, constants, C_B, (), False, ())

    violations = []
    tail_ok = sub[-1] >= len(conv) - 1 - tail_margin
    if not tail_ok:
        violations.append((len(sub) - 1, "eq6-tail"))

    qs = [conv.q(n) for n in sub]
    chain = [0]
    pos = 0
    while pos < len(sub) - 1:
        lower, upper = _growth_window(qs[pos], constants, C_B)
        nxt = None
        for j in range(pos + 1, len(sub)):
            lq = math.log(qs[j])
            if lq <= lower:
                continue
            if lq >= upper:
                violations.append((j, "upper"))
                break
            nxt = j
            break
        if nxt is None:
            if all(math.log(qs[j]) <= lower for j in range(pos + 1, len(sub))):
                violations.append((len(sub) - 1, "lower"))
            break
        chain.append(nxt)
        pos = nxt
    passed = tail_ok and chain[-1] == len(sub) - 1
    return ConditionAReport(sub, constants, C_B, tuple(chain), passed,
                            tuple(violations))


def build_condition_A_omega(gamma, C_omega, spacing="every", depth=8,
                            C_eps=2.5, C_delta=0.5, fill=1,
                            precision_bits=DEFAULT_BITS, start=(1, 1, 1)):
    """Quotients realizing the regular-growth condition.

    At each jump index the next quotient is the least integer forcing
    q_{n+1} > C_omega q_n^{1+gamma}; between jumps `fill` unit quotients are
    inserted (spacing="every" means fill=0).  The result is re-validated by
    check_condition_A; an InfeasibleConstruction error names the failing
    window if the spacing cannot meet it.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if spacing == "every":
        fill = 0
    elif isinstance(spacing, int):
        fill = spacing
    quotients = [int(a) for a in start]
    conv = convergents_from_quotients(quotients)
    q_prev, q = conv.q(len(quotients) - 1), conv.q(len(quotients))
    jumps = 0
    while jumps < depth:
        # jump quotient: smallest a with a q + q_prev > C_omega q^{1+gamma}
        a = int(math.floor((C_omega * q ** (1 + gamma) - q_prev) / q)) + 1
        a = max(a, 1)
        quotients.append(a)
        q_prev, q = q, a * q + q_prev
        jumps += 1
        if jumps == depth:
            break
        for _ in range(fill):
            quotients.append(1)
            q_prev, q = q, q + q_prev

    omega = omega_from_quotients(quotients, precision_bits)
    constants = ConditionAConstants(C_omega, C_eps, C_delta, gamma)
    C_B = brjuno_sum(omega.convergents, len(omega.convergents) - 1).C_B
    report = check_condition_A(omega.convergents, constants, C_B)
    if not report.passed:
        raise InfeasibleConstruction(
            f"spacing {spacing!r} cannot satisfy the growth window: "
            f"violations {report.violations}")
    return omega
