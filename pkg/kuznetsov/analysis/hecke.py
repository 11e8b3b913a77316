"""Hecke operators on functions of G and the relations satisfied by their eigenvalues."""

import cmath
import logging
import math
from typing import Dict, Mapping

from kuznetsov.analysis import specfun
from kuznetsov.analysis.group import GroupElement, a_matrix, iwasawa_decompose, n_matrix
from kuznetsov.analysis.lie import JetFunction
from kuznetsov.errors import DomainError

logger = logging.getLogger(__name__)


def hecke_operator(f: JetFunction, n: int, g: GroupElement) -> complex:
    """
    T(n) f(g) = n^(-1/2) sum_(d | n) sum_(b = 1..d) f(n[b/d] a[n/d^2] g).

    Args:
        f: Function on G in Iwasawa coordinates
        n: Index of the operator, n >= 1
        g: Point of evaluation

    Returns:
        The coset sum
    """
    if n < 1:
        raise DomainError(f"Hecke operators are indexed by n >= 1, got {n}")
    total = 0j
    for d in specfun.divisors(n):
        scaled = a_matrix(n / (d * d)) @ g
        for b in range(1, d + 1):
            total += f.at(iwasawa_decompose(n_matrix(b / d) @ scaled))
    return total / math.sqrt(n)


def eisenstein_hecke_eigenvalue(nu: complex, n: int) -> complex:
    """n^(-nu) sigma_(2 nu)(n), the eigenvalue of T(n) on y^(nu + 1/2)."""
    if n < 1:
        raise DomainError(f"Hecke operators are indexed by n >= 1, got {n}")
    nu = complex(nu)
    return cmath.exp(-nu * math.log(n)) * specfun.sigma(2.0 * nu, n)


def _value(t: Mapping[int, float], n: int) -> float:
    if n == 1:
        return float(t.get(1, 1.0))
    try:
        return float(t[n])
    except KeyError:
        raise DomainError(f"no Hecke eigenvalue t({n})") from None


def hecke_relation_residual(t: Mapping[int, float], m: int, n: int) -> float:
    """|t(m) t(n) - sum_(d | gcd(m, n)) t(mn/d^2)|."""
    if m < 1 or n < 1:
        raise DomainError(f"Hecke relations need positive indices, got ({m}, {n})")
    rhs = sum(_value(t, m * n // (d * d)) for d in specfun.divisors(math.gcd(m, n)))
    return abs(_value(t, m) * _value(t, n) - rhs)


def bound_constant(t: Mapping[int, float], exponent: float) -> float:
    """Smallest C with |t(n)| <= C n^exponent over the tabulated n."""
    return max((abs(v) / n**exponent for n, v in t.items() if n >= 1), default=0.0)


def multiplicative_extension(prime_values: Mapping[int, float], limit: int) -> Dict[int, float]:
    """
    Hecke eigenvalues t(n) for n <= limit from their values at the primes.

    Prime powers follow t(p^(j+1)) = t(p) t(p^j) - t(p^(j-1)); coprime indices multiply.
    """
    table = {1: 1.0}
    for n in range(2, limit + 1):
        factors = specfun.factorize(n)
        value = 1.0
        for prime, power in factors.items():
            if prime not in prime_values:
                raise DomainError(f"no value given at the prime {prime}")
            tp = float(prime_values[prime])
            previous, current = 1.0, tp
            for _ in range(power - 1):
                previous, current = current, tp * current - previous
            value *= current
        table[n] = value
    return table
