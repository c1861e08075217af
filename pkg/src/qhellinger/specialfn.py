"""Scalar special functions used by the closed-form moment formulas.

Pochhammer symbols that can take negative or half-integer arguments are
evaluated as finite products; only strictly positive arguments go through
log-gamma.
"""

from __future__ import annotations

import math

__all__ = [
    "DomainError",
    "PoleError",
    "SeriesConvergenceError",
    "log_gamma",
    "pochhammer",
    "pochhammer_int",
    "binom_half",
    "hyp3f2_terminating",
    "hyp2f1",
]

SERIES_RTOL = 1e-15
SERIES_MAX_TERMS = 100_000


class DomainError(ValueError):
    """Argument outside the domain a routine supports."""


class PoleError(DomainError):
    """A finite product or series hit a zero denominator."""


class SeriesConvergenceError(ArithmeticError):
    """A power series did not settle within the term cap."""


def _check_finite(x: float, name: str) -> None:
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    _check_finite(x, "x")
    if x <= 0:
        raise DomainError(
            f"log_gamma needs x > 0, got {x!r}; use a product form for "
            "non-positive arguments"
        )
    return math.lgamma(x)


def pochhammer(a: float, b: float) -> float:
    """Rising factorial ``(a)_b = Gamma(a + b) / Gamma(a)`` for real ``b``.

    Only the regime ``a > 0`` and ``a + b > 0`` is accepted. Integer steps
    with other arguments belong to :func:`pochhammer_int`.
    """
    _check_finite(a, "a")
    _check_finite(b, "b")
    if b == 0:
        return 1.0
    if a <= 0 or a + b <= 0:
        raise DomainError(
            f"pochhammer({a!r}, {b!r}) needs a > 0 and a + b > 0; "
            "use pochhammer_int for integer steps"
        )
    return math.exp(math.lgamma(a + b) - math.lgamma(a))


def pochhammer_int(a: float, k: int) -> float:
    """Rising factorial with an integer step, as an explicit product.

    ``k > 0`` gives ``a (a+1) ... (a+k-1)``; ``k < 0`` gives
    ``1 / ((a-1)(a-2) ... (a-|k|))``.
    """
    _check_finite(a, "a")
    k = int(k)
    out = 1.0
    if k >= 0:
        for i in range(k):
            out *= a + i
        return out
    denom = 1.0
    for i in range(1, -k + 1):
        f = a - i
        if f == 0:
            raise PoleError(f"pochhammer_int({a!r}, {k}) hits a pole at a - {i} = 0")
        denom *= f
    return out / denom


def binom_half(j: int) -> float:
    """Binomial coefficient ``C(1/2, j)`` via the falling factorial."""
    if j < 0:
        raise DomainError(f"binom_half needs j >= 0, got {j}")
    out = 1.0
    for i in range(j):
        out *= (0.5 - i) / (i + 1)
    return out


def hyp3f2_terminating(a1: float, j: int, k: int, b1: float, b2: float) -> float:
    """``3F2(a1, -j, -k; b1, b2; 1)`` for non-negative integers ``j`` and ``k``.

    The series stops after ``min(j, k)`` terms.
    """
    if j < 0 or k < 0:
        raise DomainError(f"j and k must be non-negative, got j={j}, k={k}")
    top = min(j, k)
    terms = [1.0]
    term = 1.0
    for l in range(top):
        d1 = b1 + l
        d2 = b2 + l
        if d1 == 0 or d2 == 0:
            raise PoleError(
                f"lower parameter pole at l={l} (b1={b1!r}, b2={b2!r})"
            )
        term *= (a1 + l) * (-j + l) * (-k + l) / (d1 * d2 * (l + 1))
        terms.append(term)
    return math.fsum(terms)


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric ``2F1(a, b; c; z)`` for ``z`` in ``[0, 1]``.

    At ``z = 1`` the Gauss summation formula is used, which needs
    ``c - a - b > 0``.
    """
    for name, v in (("a", a), ("b", b), ("c", c), ("z", z)):
        _check_finite(v, name)
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"hyp2f1 supports z in [0, 1], got {z!r}")
    if c <= 0:
        raise DomainError(f"hyp2f1 needs c > 0, got {c!r}")
    if z == 0.0:
        return 1.0
    if z == 1.0:
        s = c - a - b
        if s <= 0:
            raise DomainError(f"2F1 at z=1 diverges unless c - a - b > 0 (got {s!r})")
        return _gamma_ratio([c, s], [c - a, c - b])

    total = 1.0
    comp = 0.0
    term = 1.0
    for l in range(SERIES_MAX_TERMS):
        term *= (a + l) * (b + l) / ((c + l) * (l + 1)) * z
        # Kahan summation
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if term == 0.0 or abs(term) < SERIES_RTOL * abs(total):
            return total
    raise SeriesConvergenceError(
        f"2F1({a}, {b}; {c}; {z}) did not converge in {SERIES_MAX_TERMS} terms"
    )


def _gamma_ratio(num: list[float], den: list[float]) -> float:
    """prod Gamma(num) / prod Gamma(den), tracking signs for negative args."""
    sign = 1.0
    logv = 0.0
    for x, s in [(x, 1) for x in num] + [(x, -1) for x in den]:
        if x <= 0 and x == math.floor(x):
            if s == -1:
                return 0.0
            raise PoleError(f"Gamma pole at {x!r}")
        logv += s * math.lgamma(x)
        if x < 0 and math.floor(x) % 2 == 1:
            sign = -sign
    return sign * math.exp(logv)
