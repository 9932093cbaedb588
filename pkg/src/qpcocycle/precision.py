"""Numeric backend selection.

Everything downstream of the polar algebra runs either on plain doubles
(fast, default) or on mpmath reals at a fixed bit precision.  The extended
backend exists because the frame-angle increments of long products decay
like e^{-2 tau lambda0/eps}, far below double-precision resolution for the
parameter ranges of interest.

A ``Precision`` instance bundles the elementary functions the algebra
needs, so algorithm code is written once and stays backend-agnostic.
"""

import math
import sys

import mpmath


class Precision:
    """Elementary real arithmetic at a chosen precision.

    bits=None selects plain floats; otherwise mpmath with that many bits of
    mantissa.  Instances are immutable and safe to share.
    """

    def __init__(self, bits=None):
        self.bits = bits
        if bits is None:
            self.cos = math.cos
            self.sin = math.sin
            self.tan = math.tan
            self.atan = math.atan
            self.atan2 = math.atan2
            self.sqrt = math.sqrt
            self.hypot = math.hypot
            self.log = math.log
            self.log1p = math.log1p
            self.floor = math.floor
            self.pi = math.pi
            # 0.4 * log(max finite double): hard guardrail for densification
            self.dense_mu_limit = 0.4 * math.log(sys.float_info.max)
        else:
            if bits < 53:
                raise ValueError("extended precision below double makes no sense")
            for name in ("cos", "sin", "tan", "atan", "atan2", "sqrt",
                         "hypot", "log", "log1p", "floor"):
                setattr(self, name, self._wrap(getattr(mpmath, name)))
            with mpmath.workprec(bits):
                self.pi = +mpmath.pi
            # mpf exponents are bignums; limit only guards absurd requests
            self.dense_mu_limit = 0.4 * (math.log(2.0) * 2.0 ** 40)

    def _wrap(self, fn):
        bits = self.bits

        def op(*args):
            with mpmath.workprec(bits):
                return fn(*args)

        return op

    @property
    def is_float(self):
        return self.bits is None

    def real(self, x):
        """Convert x (int, float, decimal string, mpf) into the backend type."""
        if self.bits is None:
            return float(x)
        with mpmath.workprec(self.bits):
            if isinstance(x, str):
                return mpmath.mpf(x)
            return +mpmath.mpf(x)

    def exp(self, t):
        """exp with silent flush-to-zero on double underflow.

        Exact to working precision; keeps the alpha^-2 expressions of the
        polar formulas finite for arbitrarily large exponents.
        """
        if self.bits is None:
            return math.exp(t) if t > -745.0 else 0.0
        with mpmath.workprec(self.bits):
            return mpmath.exp(t)

    def frac(self, x):
        if self.bits is None:
            return x - math.floor(x)
        with mpmath.workprec(self.bits):
            return x - mpmath.floor(x)

    def wrap_angle(self, x):
        """Reduce an angle to (-pi, pi]."""
        twopi = 2 * self.pi
        y = x - twopi * self.floor((x + self.pi) / twopi)
        # floor rounding can land exactly on -pi
        if y <= -self.pi:
            y = y + twopi
        return y

    def circle_dist(self, a, b):
        """Distance on R/Z."""
        d = self.frac(a - b)
        return min(d, 1 - d)

    def to_float(self, x):
        return float(x)

    def __repr__(self):
        return f"Precision(bits={self.bits})"


FLOAT = Precision()


def mp_context(bits=256):
    """Extended-precision backend with the given mantissa bits."""
    return Precision(bits=bits)
