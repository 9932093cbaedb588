"""Built-in function families on the circle and the two-torus.

Phase and stretch profiles are either constants or trigonometric
polynomials, carried with closed-form first and second derivatives (the
critical-set induction needs reliable derivative values, so arbitrary
callables are not accepted).  Torus potentials are real trig polynomials
in two angles.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

TWO_PI = 2.0 * math.pi


class ConstantFunction:
    """f(x) = c on the circle."""

    is_constant = True

    def __init__(self, value):
        self.c = float(value)

    def value(self, x, prec=None):
        if prec is None or prec.is_float:
            return self.c
        return prec.real(self.c)

    def deriv(self, x, prec=None):
        return 0.0 if prec is None or prec.is_float else prec.real(0)

    def second(self, x, prec=None):
        return 0.0 if prec is None or prec.is_float else prec.real(0)

    def minimum(self):
        return self.c

    def maximum(self):
        return self.c

    def variation(self):
        return 0.0

    def extrema(self):
        return []

    def monotone_segments(self):
        return []

    def to_spec(self):
        return {"type": "constant", "value": self.c}

    def __repr__(self):
        return f"ConstantFunction({self.c})"


class TrigPolynomial:
    """f(x) = a0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x)."""

    def __init__(self, a0=0.0, cos_coeffs=(), sin_coeffs=()):
        self.a0 = float(a0)
        self.a = tuple(float(c) for c in cos_coeffs)
        self.b = tuple(float(c) for c in sin_coeffs)
        self.degree = max(len(self.a), len(self.b))
        if self.degree == 0:
            raise ValueError("degenerate trig polynomial; use ConstantFunction")
        self._extrema = None

    is_constant = False

    def _coeff(self, seq, k):
        return seq[k - 1] if k <= len(seq) else 0.0

    def value(self, x, prec=None):
        if prec is None or prec.is_float:
            t = TWO_PI * float(x)
            return self.a0 + sum(
                self._coeff(self.a, k) * math.cos(k * t)
                + self._coeff(self.b, k) * math.sin(k * t)
                for k in range(1, self.degree + 1))
        t = 2 * prec.pi * x
        out = prec.real(self.a0)
        for k in range(1, self.degree + 1):
            out += self._coeff(self.a, k) * prec.cos(k * t) \
                + self._coeff(self.b, k) * prec.sin(k * t)
        return out

    def deriv(self, x, prec=None):
        if prec is None or prec.is_float:
            t = TWO_PI * float(x)
            return sum(
                TWO_PI * k * (-self._coeff(self.a, k) * math.sin(k * t)
                              + self._coeff(self.b, k) * math.cos(k * t))
                for k in range(1, self.degree + 1))
        t = 2 * prec.pi * x
        out = prec.real(0)
        for k in range(1, self.degree + 1):
            out += 2 * prec.pi * k * (-self._coeff(self.a, k) * prec.sin(k * t)
                                      + self._coeff(self.b, k) * prec.cos(k * t))
        return out

    def second(self, x, prec=None):
        if prec is None or prec.is_float:
            t = TWO_PI * float(x)
            return sum(
                -(TWO_PI * k) ** 2 * (self._coeff(self.a, k) * math.cos(k * t)
                                      + self._coeff(self.b, k) * math.sin(k * t))
                for k in range(1, self.degree + 1))
        t = 2 * prec.pi * x
        out = prec.real(0)
        for k in range(1, self.degree + 1):
            out += -(2 * prec.pi * k) ** 2 * (
                self._coeff(self.a, k) * prec.cos(k * t)
                + self._coeff(self.b, k) * prec.sin(k * t))
        return out

    def deriv_bound(self):
        """Upper bound on |f'|."""
        return sum(TWO_PI * k * (abs(self._coeff(self.a, k))
                                 + abs(self._coeff(self.b, k)))
                   for k in range(1, self.degree + 1))

    def extrema(self):
        """Critical points of f as (x, value, second) tuples, sorted by x.

        Roots of f' are bracketed on a grid fine enough for the top
        frequency and polished by Brent's method.
        """
        if self._extrema is not None:
            return self._extrema
        n = max(64, 16 * self.degree)
        xs = np.linspace(0.0, 1.0, n + 1)
        dv = np.array([self.deriv(x) for x in xs])
        out = []
        for i in range(n):
            lo, hi = dv[i], dv[i + 1]
            if lo == 0.0:
                root = xs[i]
            elif lo * hi < 0.0:
                root = brentq(self.deriv, xs[i], xs[i + 1], xtol=1e-15, rtol=4e-16)
            else:
                continue
            out.append((float(root), self.value(root), self.second(root)))
        self._extrema = out
        return out

    def minimum(self):
        vals = [v for _, v, _ in self.extrema()]
        return min(vals) if vals else self.value(0.0)

    def maximum(self):
        vals = [v for _, v, _ in self.extrema()]
        return max(vals) if vals else self.value(0.0)

    def variation(self):
        return self.maximum() - self.minimum()

    def monotone_segments(self):
        """Consecutive (x_lo, x_hi) between critical points covering one period."""
        ext = [x for x, _, _ in self.extrema()]
        if not ext:
            return [(0.0, 1.0)]
        segs = []
        for i, x in enumerate(ext):
            nxt = ext[i + 1] if i + 1 < len(ext) else ext[0] + 1.0
            segs.append((x, nxt))
        return segs

    def to_spec(self):
        return {"type": "trig", "a0": self.a0, "cos": list(self.a),
                "sin": list(self.b)}

    def __repr__(self):
        return f"TrigPolynomial(a0={self.a0}, cos={self.a}, sin={self.b})"


def circle_function_from_spec(spec):
    kind = spec.get("type")
    if kind == "constant":
        return ConstantFunction(spec["value"])
    if kind == "trig":
        return TrigPolynomial(spec.get("a0", 0.0), spec.get("cos", ()),
                              spec.get("sin", ()))
    raise ValueError(f"unknown circle function type {kind!r}")


@dataclass(frozen=True)
class TorusTerm:
    """coef_cos * cos(2 pi (m t1 + n t2)) + coef_sin * sin(...)."""

    m: int
    n: int
    coef_cos: float = 0.0
    coef_sin: float = 0.0


class TorusTrigPolynomial:
    """Real trig polynomial F(t1, t2) on the two-torus."""

    def __init__(self, terms):
        self.terms = tuple(terms)
        if not self.terms:
            raise ValueError("empty potential")

    def value(self, t1, t2):
        out = 0.0
        for term in self.terms:
            ph = TWO_PI * (term.m * t1 + term.n * t2)
            out += term.coef_cos * math.cos(ph) + term.coef_sin * math.sin(ph)
        return out

    def along_fiber(self, x, omega):
        """The restriction s -> F(x + omega s, s) and its s-derivative."""
        x = float(x)
        omega = float(omega)

        def f(s):
            out = 0.0
            for term in self.terms:
                ph = TWO_PI * (term.m * (x + omega * s) + term.n * s)
                out += term.coef_cos * math.cos(ph) + term.coef_sin * math.sin(ph)
            return out

        def df(s):
            out = 0.0
            for term in self.terms:
                freq = TWO_PI * (term.m * omega + term.n)
                ph = TWO_PI * (term.m * (x + omega * s) + term.n * s)
                out += freq * (-term.coef_cos * math.sin(ph)
                               + term.coef_sin * math.cos(ph))
            return out

        return f, df

    def max_fiber_frequency(self, omega):
        return max(abs(TWO_PI * (t.m * float(omega) + t.n)) for t in self.terms)

    def attains_both_signs(self, grid=64):
        ts = np.linspace(0.0, 1.0, grid + 1)
        vals = np.array([[self.value(a, b) for b in ts] for a in ts])
        return vals.min() < 0.0 < vals.max()

    def to_spec(self):
        return {"terms": [{"m": t.m, "n": t.n, "cos": t.coef_cos,
                           "sin": t.coef_sin} for t in self.terms]}


def torus_potential_from_spec(spec):
    terms = [TorusTerm(int(d["m"]), int(d["n"]), float(d.get("cos", 0.0)),
                       float(d.get("sin", 0.0))) for d in spec["terms"]]
    return TorusTrigPolynomial(terms)
