"""Truncated power series R[[pi]] with the cyclotomic-tower operators.

A TruncSeries holds coefficients c_0..c_D over one of the p-adic coefficient
rings and is exact modulo pi^(D+1): a polynomial of degree <= D represents
itself with no hidden tail.  Operators that contract degrees (psi) or expand
them (phi, the Gamma-action) are computed through the (1+pi)-binomial basis,
where they act by reindexing exponents; phi and the (1 - lambda*phi)-solver
share one cached integer matrix of the powers of (1+pi)^p - 1.

Degree bookkeeping: phi, psi, and the Gamma-action are exact mod pi^(D+1);
deriv and ell_apply lose the top coefficient (valid to D-1).  When a series
stands for a truncation of an infinite sum rather than a polynomial, psi
output is only meaningful up to degree floor(D/p).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

from .padic_core import PadicScalar


class NonconvergentError(ArithmeticError):
    """Raised when (1 - lambda*phi) is singular against a nonzero right side."""


def _zeroish(c) -> bool:
    return c.is_exact_zero() or c.is_exhausted()


class TruncSeries:
    """Power series truncated at degree D over a fixed coefficient ring."""

    __slots__ = ("ring", "coeffs", "D")

    def __init__(self, ring, coeffs, D=None):
        coeffs = list(coeffs)
        if D is None:
            D = len(coeffs) - 1
        if len(coeffs) != D + 1:
            raise ValueError(f"expected {D + 1} coefficients, got {len(coeffs)}")
        self.ring = ring
        self.coeffs = tuple(coeffs)
        self.D = D

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ring, D: int) -> "TruncSeries":
        return cls(ring, [ring.zero()] * (D + 1), D)

    @classmethod
    def from_ints(cls, ring, ints, D: int) -> "TruncSeries":
        cs = [ring.from_int(c) for c in ints]
        cs += [ring.zero()] * (D + 1 - len(cs))
        return cls(ring, cs[: D + 1], D)

    @classmethod
    def from_fractions(cls, ring, fracs, D: int) -> "TruncSeries":
        cs = [ring.from_fraction(q) for q in fracs]
        cs += [ring.zero()] * (D + 1 - len(cs))
        return cls(ring, cs[: D + 1], D)

    @classmethod
    def monomial(cls, ring, d: int, D: int, coeff=None) -> "TruncSeries":
        cs = [ring.zero()] * (D + 1)
        cs[d] = coeff if coeff is not None else ring.one()
        return cls(ring, cs, D)

    # -- ring structure ----------------------------------------------------

    def _check(self, other: "TruncSeries"):
        if other.ring is not self.ring or other.D != self.D:
            raise ValueError("mixed series contexts")

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        return TruncSeries(
            self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)], self.D
        )

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        return TruncSeries(
            self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)], self.D
        )

    def __neg__(self):
        return TruncSeries(self.ring, [-a for a in self.coeffs], self.D)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            out = [self.ring.zero() for _ in range(self.D + 1)]
            for i, a in enumerate(self.coeffs):
                if _zeroish(a):
                    continue
                for j, b in enumerate(other.coeffs[: self.D + 1 - i]):
                    if not _zeroish(b):
                        out[i + j] = out[i + j] + a * b
            return TruncSeries(self.ring, out, self.D)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s) -> "TruncSeries":
        return TruncSeries(self.ring, [c * s for c in self.coeffs], self.D)

    # -- inspection --------------------------------------------------------

    def agrees_to(self, other: "TruncSeries", digits: int, up_to_degree=None) -> bool:
        self._check(other)
        top = self.D if up_to_degree is None else up_to_degree
        return all(
            a.agrees_to(b, digits)
            for a, b in zip(self.coeffs[: top + 1], other.coeffs[: top + 1])
        )

    def is_zero_to(self, digits: int, up_to_degree=None) -> bool:
        top = self.D if up_to_degree is None else up_to_degree
        return all(c.is_zero_to(digits) for c in self.coeffs[: top + 1])

    def __repr__(self):
        head = ", ".join(repr(c) for c in self.coeffs[:4])
        return f"TruncSeries(D={self.D}, [{head}, ...])"

    # -- evaluation and composition ----------------------------------------

    def evaluate(self, x):
        """Value at a point of any compatible ring (Horner)."""
        acc = self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            acc = acc * x + c
        return acc

    def compose(self, s: "TruncSeries", allow_constant: bool = False) -> "TruncSeries":
        """f(s(pi)) by Horner.

        Exact mod pi^(D+1) when s has zero constant term.  With a constant
        term the result is exact only under polynomial semantics (the input
        represents itself, not a truncated infinite sum); callers opt in.
        """
        self._check(s)
        if not allow_constant and not _zeroish(s.coeffs[0]):
            raise ValueError("substitution requires zero constant term")
        acc = TruncSeries.monomial(self.ring, 0, self.D, self.coeffs[-1])
        for c in self.coeffs[-2::-1]:
            acc = acc * s
            acc = TruncSeries(
                self.ring, (acc.coeffs[0] + c,) + acc.coeffs[1:], self.D
            )
        return acc


# ---------------------------------------------------------------------------
# Stock elements
# ---------------------------------------------------------------------------


def pi(ring, D: int) -> TruncSeries:
    return TruncSeries.monomial(ring, 1, D)


def one(ring, D: int) -> TruncSeries:
    return TruncSeries.monomial(ring, 0, D)


def log1p_t(ring, D: int) -> TruncSeries:
    """t = log(1+pi) = sum (-1)^(d+1) pi^d / d."""
    cs = [ring.zero()] + [
        ring.from_fraction(Fraction((-1) ** (d + 1), d)) for d in range(1, D + 1)
    ]
    return TruncSeries(ring, cs, D)


def one_plus_pi_power(ring, e: int, D: int) -> TruncSeries:
    """(1+pi)^e mod pi^(D+1) for an exact integer exponent of either sign.

    Callers holding a p-adic exponent pass a residue representative mod
    p^(N + guard); the mismatch perturbs the coefficient of pi^d by
    O(p^(N + guard - v_p(d!))), so guard digits of v_p(D!) suffice.
    """
    cs = []
    binom = 1
    for d in range(D + 1):
        if d:
            binom = binom * (e - d + 1) // d
        cs.append(ring.from_int(binom))
    return TruncSeries(ring, cs, D)


# ---------------------------------------------------------------------------
# Binomial-basis transforms
# ---------------------------------------------------------------------------


def to_binomial(f: TruncSeries):
    """Coordinates b_i with f = sum b_i (1+pi)^i (an exact integer change
    of basis: pi^d = sum_i C(d,i)(-1)^(d-i) (1+pi)^i)."""
    D, ring = f.D, f.ring
    out = []
    for i in range(D + 1):
        acc = ring.zero()
        for d in range(i, D + 1):
            c = f.coeffs[d]
            if not _zeroish(c):
                acc = acc + c * (comb(d, i) * (-1) ** ((d - i) & 1))
        out.append(acc)
    return out


def from_binomial(ring, b, D: int) -> TruncSeries:
    out = []
    for d in range(D + 1):
        acc = ring.zero()
        for i in range(d, len(b)):
            if not _zeroish(b[i]):
                acc = acc + b[i] * comb(i, d)
        out.append(acc)
    return TruncSeries(ring, out, D)


# ---------------------------------------------------------------------------
# The tower operators
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _phi_matrix(p: int, D: int):
    """Rows M[d][m] = coefficient of pi^d in ((1+pi)^p - 1)^m, m,d <= D."""
    q = [comb(p, d) if 1 <= d <= p else 0 for d in range(D + 1)]
    cols = [[1] + [0] * D]
    for _ in range(D):
        prev = cols[-1]
        nxt = [0] * (D + 1)
        for a, pa in enumerate(prev):
            if pa:
                for b in range(1, min(p, D - a) + 1):
                    nxt[a + b] += pa * q[b]
        cols.append(nxt)
    return tuple(tuple(cols[m][d] for m in range(D + 1)) for d in range(D + 1))


def phi(f: TruncSeries) -> TruncSeries:
    """The Frobenius substitution pi -> (1+pi)^p - 1."""
    rows = _phi_matrix(f.ring.p, f.D)
    out = []
    for d in range(f.D + 1):
        acc = f.ring.zero()
        row = rows[d]
        for m in range(d + 1):
            c = f.coeffs[m]
            if row[m] and not _zeroish(c):
                acc = acc + c * row[m]
        out.append(acc)
    return TruncSeries(f.ring, out, f.D)


def psi(f: TruncSeries) -> TruncSeries:
    """The left inverse of phi: (1+pi)^i -> (1+pi)^(i/p) if p | i, else 0.

    Exact for polynomial inputs; when f stands for a truncated infinite
    series, trust the output only to degree floor(D/p).
    """
    p, D = f.ring.p, f.D
    b = to_binomial(f)
    nb = [b[p * i] for i in range(D // p + 1)]
    return from_binomial(f.ring, nb, D)


def deriv(f: TruncSeries) -> TruncSeries:
    """(1+pi) d/dpi; the top coefficient of the result is untrustworthy."""
    D = f.D
    out = []
    for d in range(D + 1):
        acc = f.coeffs[d] * d if d else f.ring.zero()
        if d < D:
            acc = acc + f.coeffs[d + 1] * (d + 1)
        out.append(acc)
    return TruncSeries(f.ring, out, D)


def gamma_action(c, f: TruncSeries) -> TruncSeries:
    """The action of a unit c: pi -> (1+pi)^c - 1, via binomial reindexing."""
    if isinstance(c, PadicScalar):
        if c.val != 0:
            raise ValueError("Gamma acts through units only")
        c = c.residue(c.abs_prec)
    if c % f.ring.p == 0:
        raise ValueError("Gamma acts through units only")
    D, ring = f.D, f.ring
    b = to_binomial(f)
    out = [ring.zero() for _ in range(D + 1)]
    for i in range(D + 1):
        if _zeroish(b[i]):
            continue
        e = c * i
        binom = 1
        for d in range(D + 1):
            if d:
                binom = binom * (e - d + 1) // d
            if binom:
                out[d] = out[d] + b[i] * binom
    return TruncSeries(ring, out, D)


def ell_apply(j: int, f: TruncSeries) -> TruncSeries:
    """(t*d - j)f for the Euler operator t*d = t*(1+pi)d/dpi; valid to D-1."""
    t = log1p_t(f.ring, f.D)
    out = t * deriv(f)
    if j:
        out = out - f.scale(j)
    return out


def solve_one_minus_phi(x: TruncSeries, eigenvalue=None) -> TruncSeries:
    """Solve (1 - lambda*phi) y = x by forward substitution.

    phi is lower triangular on monomials with p^d on the diagonal, so the
    degree-d equation reads y_d (1 - lambda p^d) = x_d + lambda * (lower
    terms).  A row where 1 - lambda p^d is indistinguishable from zero is
    an obstruction: the right side must vanish there (else
    NonconvergentError) and y_d is normalized to 0.
    """
    ring, D = x.ring, x.D
    p = ring.p
    lam = eigenvalue
    if lam is None:
        lam = 1
    if isinstance(lam, int):
        lam = PadicScalar.from_int(p, lam, ring.N)
    elif isinstance(lam, Fraction):
        lam = PadicScalar.from_fraction(p, lam, ring.N)
    one_scalar = PadicScalar.from_int(p, 1, ring.N)
    rows = _phi_matrix(p, D)
    y = []
    for d in range(D + 1):
        acc = ring.zero()
        row = rows[d]
        for m in range(d):
            if row[m] and not _zeroish(y[m]):
                acc = acc + y[m] * row[m]
        num = x.coeffs[d] + acc * lam
        s = one_scalar - lam * PadicScalar.from_int(p, p**d, ring.N)
        if s.unit == 0:
            if not _zeroish(num):
                raise NonconvergentError(
                    f"obstruction at degree {d}: right side has a nonzero component"
                )
            y.append(ring.zero())
        else:
            y.append(num / s)
    return TruncSeries(ring, y, D)
