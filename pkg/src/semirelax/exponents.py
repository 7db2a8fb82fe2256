"""Scaling-exponent and Strichartz-admissibility bookkeeping.

Everything here is exact arithmetic on rationals wherever the inputs are
rational; floats are accepted and converted through Fraction, so equalities
like the critical-power inverse relation hold without tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "Rational",
    "scaling_critical_exponent",
    "critical_power",
    "scaling_rate",
    "StrichartzExponents",
    "embedding_exponent_check",
]

Rational = Union[int, float, Fraction]


def _frac(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if math.isinf(x):
        raise ValueError("expected a finite value")
    return Fraction(x).limit_denominator(10**12)


def _inv(x: Rational) -> Fraction:
    """1/x as a Fraction, with 1/inf = 0."""
    if isinstance(x, float) and math.isinf(x):
        return Fraction(0)
    return 1 / _frac(x)


def scaling_critical_exponent(n: int, p: Rational) -> Fraction:
    """The Sobolev index n/2 - 1/(p-1) at which rescaling u(x) ->
    sigma^(1/(p-1)) u(sigma x) leaves the homogeneous norm invariant."""
    p = _frac(p)
    if p <= 1:
        raise ValueError(f"nonlinearity power must exceed 1, got {p}")
    return Fraction(n, 2) - 1 / (p - 1)


def critical_power(n: int, s: Rational) -> Fraction:
    """The power 1 + 2/(n - 2s) whose critical index is s; requires s < n/2."""
    s = _frac(s)
    if 2 * s >= n:
        raise ValueError(f"critical power requires s < n/2, got s={s}, n={n}")
    return 1 + Fraction(2, 1) / (n - 2 * s)


def scaling_rate(n: int, p: Rational, s: Rational) -> Fraction:
    """Exponent e with ||u_sigma||_{Hdot^s} = sigma^e ||u||_{Hdot^s}:
    e = 1/(p-1) + s - n/2.  Vanishes exactly at the critical index."""
    p, s = _frac(p), _frac(s)
    if p <= 1:
        raise ValueError(f"nonlinearity power must exceed 1, got {p}")
    return 1 / (p - 1) + s - Fraction(n, 2)


@dataclass(frozen=True)
class StrichartzExponents:
    """An admissible space-time pair (q, r) for the half-wave propagator.

    Admissibility in dimension n (with sigma = n - 1) is
        1/r = 1/2 - (2/sigma) * (1/q),
    with 2 <= r <= inf for n = 1, 2 and 2 <= r < inf for n = 3.  For n = 1
    (sigma = 0) the only admissible pair is q = inf, r = 2.  Use q=inf or
    r=inf (floats) for the endpoints.
    """

    n: int
    q: Rational
    r: Rational

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.n}")
        if not self.is_admissible(self.n, self.q, self.r):
            raise ValueError(
                f"(q, r) = ({self.q}, {self.r}) is not admissible in dimension {self.n}"
            )

    @staticmethod
    def is_admissible(n: int, q: Rational, r: Rational) -> bool:
        inv_q, inv_r = _inv(q), _inv(r)
        if inv_q < 0 or inv_r < 0:
            return False
        sigma = n - 1
        if sigma == 0:
            return inv_q == 0 and inv_r == Fraction(1, 2)
        if inv_r != Fraction(1, 2) - Fraction(2, sigma) * inv_q:
            return False
        if inv_r > Fraction(1, 2):
            return False
        if n == 3 and inv_r == 0:
            return False
        return True

    @property
    def alpha(self) -> Fraction:
        """1/2 - 1/r."""
        return Fraction(1, 2) - _inv(self.r)

    @property
    def lam(self) -> Fraction:
        """(n + 1)/2, the dispersive weight."""
        return Fraction(self.n + 1, 2)

    @property
    def sigma(self) -> int:
        """n - 1, the decay dimension."""
        return self.n - 1

    def besov_shift(self) -> Fraction:
        """The regularity loss lam * alpha(r) in the Besov-norm estimate."""
        return self.lam * self.alpha


def embedding_exponent_check(s: Rational, r: Rational) -> bool:
    """Whether s - (3/2)(1/2 - 1/r) - 2/r > 0, the 2-d condition for the
    dyadic-block space to land in L^inf.  Equivalent to s > 3/4 + 1/(2r);
    the threshold itself fails (strict inequality)."""
    inv_r = _inv(r)
    if inv_r >= Fraction(1, 2):
        raise ValueError(f"embedding check requires r > 2, got r={r}")
    s = _frac(s)
    return s - Fraction(3, 2) * (Fraction(1, 2) - inv_r) - 2 * inv_r > 0
