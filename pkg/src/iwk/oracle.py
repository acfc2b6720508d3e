"""Brute-force reference implementations used only by the test suite.

Everything here is deliberately independent of the main modules: exact
rational arithmetic on plain ints and Fractions, literal finite sums, and
list-based cyclotomic polynomial arithmetic.  Nothing imports from the rest
of the package, and nothing tracks precision, because all oracle values are
exact.  Tests adapt the main types to plain data at the boundary.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with the B_1 = -1/2 convention.

    Computed by the recurrence sum_{k=0}^{n} C(n+1, k) B_k = 0, B_0 = 1.
    """
    if n < 0:
        raise ValueError("Bernoulli numbers are indexed by n >= 0")
    if n == 0:
        return Fraction(1)
    acc = Fraction(0)
    for k in range(n):
        acc += comb(n + 1, k) * bernoulli(k)
    return -acc / (n + 1)


def bernoulli_plus(n: int) -> Fraction:
    """B_n for the variant generating function t*e^t/(e^t - 1).

    Identical to bernoulli(n) except B_1 = +1/2.
    """
    return -bernoulli(1) if n == 1 else bernoulli(n)


def zeta_neg_int(j: int) -> Fraction:
    """zeta(-j) = -B_{j+1}/(j+1) for j >= 1; zero for even j >= 2."""
    if j < 1:
        raise ValueError("expected j >= 1")
    return -bernoulli(j + 1) / (j + 1)


def coleman_dlog_t_coeffs(c: int, deg: int) -> list[Fraction]:
    """t-expansion of the logarithmic derivative of ((1+pi)^c - 1)/pi.

    With t = log(1+pi) the series is (h(ct) - h(t))/t for
    h(t) = t*e^t/(e^t - 1), so the coefficient of t^k is
    B^+_{k+1} (c^{k+1} - 1) / (k+1)!.
    """
    return [
        bernoulli_plus(k + 1) * (c ** (k + 1) - 1) / Fraction(_factorial(k + 1))
        for k in range(deg + 1)
    ]


@lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def teichmuller_exact_mod(a: int, p: int, digits: int) -> int:
    """The (p-1)-st root of unity congruent to a mod p, as a residue mod p^digits.

    Uses the closed form a^(p^(digits-1)) mod p^digits rather than fixed-point
    iteration, so it is an independent route to the same value.
    """
    if a % p == 0:
        return 0
    return pow(a % p ** digits, p ** (digits - 1), p ** digits)


# ---------------------------------------------------------------------------
# Exact cyclotomic arithmetic: Z[zeta_{p^n}] as int vectors of length
# (p-1)*p^(n-1), reduced modulo the p^n-th cyclotomic polynomial
# Phi_{p^n}(X) = sum_{k<p} X^(k*p^(n-1)).
# ---------------------------------------------------------------------------


def cyc_reduce(vec: list, p: int, n: int) -> list:
    """Reduce a polynomial in zeta_{p^n} to the standard basis of length phi(p^n)."""
    m = p ** (n - 1)
    length = (p - 1) * m
    out = list(vec)
    d = len(out) - 1
    while d >= length:
        c = out[d]
        out[d] = 0
        if c:
            # X^d = -X^(d-length) * sum_{k<p-1} X^(k*m)
            for k in range(p - 1):
                out[d - length + k * m] -= c
        while d >= length and out[d] == 0:
            d -= 1
    del out[length:]
    out.extend([0] * (length - len(out)))
    return out


def cyc_mul(a: list, b: list, p: int, n: int) -> list:
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    return cyc_reduce(prod, p, n)


def cyc_root(e: int, p: int, n: int):
    """The basis vector for zeta_{p^n}^e."""
    vec = [0] * (p ** n)
    vec[e % p ** n] = 1
    return cyc_reduce(vec, p, n)


def cyc_scalar(c, p: int, n: int) -> list:
    vec = [0] * ((p - 1) * p ** (n - 1))
    vec[0] = c
    return vec


def cyc_add(a: list, b: list) -> list:
    return [x + y for x, y in zip(a, b)]


def gauss_sum_exact(p: int, n: int, char_values: dict[int, list], sign: int = 1) -> list:
    """sum_a char_values[a] * zeta_{p^n}^(sign*a) over a in (Z/p^n)^*, exactly.

    char_values must already hold the inverted character values; this keeps
    the oracle a literal transcription of the defining finite sum.
    """
    acc = cyc_scalar(0, p, n)
    for a, val in char_values.items():
        term = cyc_mul(val, cyc_root(sign * a, p, n), p, n)
        acc = cyc_add(acc, term)
    return acc


# ---------------------------------------------------------------------------
# The mu_p-average definition of psi, exact on polynomial inputs.
# ---------------------------------------------------------------------------


def mu_p_average(coeffs: list, p: int) -> list[list[Fraction]]:
    """p^(-1) * sum over zeta^p = 1 of f(zeta*(1+pi) - 1), in Z[zeta_p][[pi]].

    coeffs are the pi-coefficients of a polynomial f with integer (or
    Fraction) coefficients.  Returns pi-coefficients as exact cyclotomic
    vectors of length p-1.  This equals phi(psi(f)).
    """
    deg = len(coeffs) - 1
    acc = [[Fraction(0)] * (p - 1) for _ in range(deg + 1)]
    for u in range(p):
        root = [Fraction(x) for x in cyc_root(u, p, 1)]
        const = list(root)
        const[0] -= 1
        # Horner evaluation of f at (zeta^u - 1) + zeta^u * pi.
        cur: list[list[Fraction]] = [[Fraction(coeffs[deg])] + [Fraction(0)] * (p - 2)]
        for k in range(deg - 1, -1, -1):
            nxt = [[Fraction(0)] * (p - 1) for _ in range(len(cur) + 1)]
            for d, cvec in enumerate(cur):
                lo = cyc_mul(cvec, const, p, 1)
                hi = cyc_mul(cvec, root, p, 1)
                nxt[d] = cyc_add(nxt[d], lo)
                nxt[d + 1] = cyc_add(nxt[d + 1], hi)
            nxt[0][0] += Fraction(coeffs[k])
            cur = nxt
        for d in range(min(len(cur), deg + 1)):
            acc[d] = cyc_add(acc[d], cur[d])
    return [[x / p for x in vec] for vec in acc]


def brute_psi(coeffs: list, p: int) -> list[Fraction]:
    """psi(f) for a polynomial f, via the mu_p-average and p-th root substitution.

    Raises if the average fails to descend to Q coefficients (which would be
    a caller bug, since the average always descends).
    """
    avg = mu_p_average(coeffs, p)
    scal: list[Fraction] = []
    for vec in avg:
        if any(vec[1:]):
            raise ValueError("descent failure: mu_p-average has a nonzero root-of-unity part")
        scal.append(vec[0])
    # Solve B((1+pi)^p - 1) = avg by back-substitution; q^k has leading
    # coefficient p^k at degree k.
    q = [Fraction(comb(p, i)) if i else Fraction(0) for i in range(p + 1)]
    out_deg = (len(coeffs) - 1) // p
    residual = list(scal) + [Fraction(0)] * (p * out_deg + 1 - len(scal))
    qpow = [Fraction(1)]
    out: list[Fraction] = []
    for k in range(out_deg + 1):
        b = residual[k] / p ** k if k else residual[0]
        out.append(b)
        for d, qc in enumerate(qpow):
            residual[d] -= b * qc
        if k < out_deg:
            qpow = _poly_mul_frac(qpow, q, p * out_deg)
    if any(residual):
        raise ValueError("p-th root substitution left a nonzero residual")
    return out


def _poly_mul_frac(a: list[Fraction], b: list[Fraction], cap: int) -> list[Fraction]:
    out = [Fraction(0)] * min(len(a) + len(b) - 1, cap + 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj and i + j <= cap:
                    out[i + j] += ai * bj
    return out
