"""Scalar special functions shared by every other module.

All gamma-type quantities are routed through ``log_gamma`` so that ratios of
large gamma values never overflow; series are truncated by a relative-term
criterion so accuracy is uniform over the admissible parameter ranges.
"""

import math


class DomainError(ValueError):
    """Argument outside the mathematical domain of a special function."""


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a)/Gamma(b), computed in log space to avoid overflow."""
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"gamma_ratio requires positive arguments, got ({a}, {b})")
    return math.exp(math.lgamma(a) - math.lgamma(b))


def beta(a: float, b: float) -> float:
    """Euler beta function B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b)."""
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"beta requires positive arguments, got ({a}, {b})")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def bessel_j(nu: float, x: float, max_terms: int = 200) -> float:
    """Bessel function of the first kind J_nu(x), nu > -1, x >= 0.

    Ascending series (x/2)^nu * sum_i (-(x/2)^2)^i / (i! Gamma(nu+i+1)),
    truncated once the next term falls below 1e-16 of the partial sum.
    Intended for the small-argument range x <= O(10).
    """
    if not nu > -1.0:
        raise DomainError(f"bessel_j requires nu > -1, got {nu}")
    if not x >= 0.0:
        raise DomainError(f"bessel_j requires x >= 0, got {x}")
    if x == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        return math.inf  # (x/2)^nu -> +inf for -1 < nu < 0
    half = 0.5 * x
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
    total = term
    msq = -half * half
    for i in range(1, max_terms):
        term *= msq / (i * (nu + i))
        total += term
        if abs(term) < 1e-16 * abs(total):
            break
    return total


def mittag_leffler(sigma: float, z: float, max_terms: int = 500) -> float:
    """One-parameter Mittag-Leffler function E_sigma(z) = sum z^n / Gamma(sigma n + 1).

    Terms are built by a multiplicative recurrence (each step multiplies by
    z times a nearby gamma ratio), which keeps consecutive terms consistent
    enough that the alternating case stays accurate; the final sum is exact
    over the computed terms. Raises OverflowError when the sum leaves the
    representable range (small sigma with large z).
    """
    if not sigma > 0.0:
        raise DomainError(f"mittag_leffler requires sigma > 0, got {sigma}")
    if z == 0.0:
        return 1.0
    int_sigma = int(round(sigma)) if sigma == round(sigma) and sigma <= 64 else 0
    terms = [1.0]
    term = 1.0
    running = 1.0
    prev_lg = 0.0  # lgamma(1)
    for n in range(1, max_terms):
        if int_sigma:
            # Gamma ratio of consecutive terms is an exact integer product
            divisor = 1
            for j in range(int_sigma * (n - 1) + 1, int_sigma * n + 1):
                divisor *= j
            term *= z / divisor
        else:
            lg = math.lgamma(sigma * n + 1.0)
            term *= z * math.exp(prev_lg - lg)
            prev_lg = lg
        if math.isinf(term):
            raise OverflowError(
                f"mittag_leffler({sigma}, {z}) exceeds double-precision range"
            )
        terms.append(term)
        running += term
        if abs(term) < 1e-16 * abs(running):
            break
    total = math.fsum(terms)
    if math.isinf(total):
        raise OverflowError(
            f"mittag_leffler({sigma}, {z}) exceeds double-precision range"
        )
    return total
