"""Exact fixed-precision p-adic arithmetic.

Three element kinds share one precision model: a value is p^val * unit with
the unit part known modulo p^prec, so the absolute error is O(p^(val+prec)).
Exact zero is a distinguished state, and any value whose unit part becomes
indistinguishable from zero collapses to a "precision exhausted" state that
remembers only the O(p^val) bound.  All values are immutable; operations are
pure functions, safe to share across threads.

Scalars live in Q_p.  Extension elements are coordinate vectors over a
polynomial quotient ring: an unramified field Q_{p^f} with its Frobenius
automorphism, or the cyclotomic ring Z_p[zeta_{p^n}] reduced modulo the
p^n-th cyclotomic polynomial.  The compatible system of p-power roots of
unity is fixed once and for all by declaring the residue class of X at level
n to be the chosen root; changing that choice is the Galois permutation
X -> X^c.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from itertools import product as _iter_product
from math import inf as INF


class PrecisionError(ArithmeticError):
    """Raised when a result is requested beyond the digits actually known."""


class NoSolutionError(ValueError):
    """Raised when a Frobenius equation has no solution at this level."""


def _vp(x: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of 0 is undefined")
    v = 0
    x = abs(x)
    while x % p == 0:
        x //= p
        v += 1
    return v


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _check_prime(p: int) -> None:
    if p == 2 or not _is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")


def _ilog(k: int, p: int) -> int:
    """floor(log_p k) for k >= 1."""
    t, q = 0, p
    while q <= k:
        t += 1
        q *= p
    return t


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


class PadicScalar:
    """p^val * unit + O(p^(val+prec)) with unit a p-unit known mod p^prec.

    States: exact zero (prec is infinite), exhausted (unit 0, prec 0: the
    value is O(p^val) and nothing more is known), or normal (unit coprime
    to p, 0 < prec < infinity).  The constructor normalizes any raw triple
    into one of these.
    """

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val, unit: int, prec):
        self.p = p
        if prec == INF:
            if unit != 0:
                raise ValueError("only zero may carry infinite precision")
            self.val, self.unit, self.prec = INF, 0, INF
            return
        if prec <= 0:
            self.val, self.unit, self.prec = val + min(prec, 0), 0, 0
            return
        unit %= p**prec
        if unit == 0:
            self.val, self.unit, self.prec = val + prec, 0, 0
            return
        v = _vp(unit, p)
        self.val, self.unit, self.prec = val + v, unit // p**v, prec - v

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "PadicScalar":
        return cls(p, 0, 0, INF)

    @classmethod
    def from_int(cls, p: int, x: int, N: int) -> "PadicScalar":
        if x == 0:
            return cls.zero(p)
        v = _vp(x, p)
        return cls(p, v, x // p**v, N)

    @classmethod
    def from_fraction(cls, p: int, q: Fraction, N: int) -> "PadicScalar":
        q = Fraction(q)
        if q == 0:
            return cls.zero(p)
        return cls.from_int(p, q.numerator, N) / cls.from_int(p, q.denominator, N)

    # -- state predicates --------------------------------------------------

    @property
    def abs_prec(self):
        """Exponent of the O(p^...) error bound."""
        return self.val + self.prec

    def is_exact_zero(self) -> bool:
        return self.prec == INF

    def is_exhausted(self) -> bool:
        return self.unit == 0 and self.prec != INF

    def is_zero_to(self, digits: int) -> bool:
        """True when the value is certified to vanish mod p^digits."""
        return self.val >= digits

    def valuation(self):
        if self.is_exact_zero():
            return INF
        if self.unit == 0:
            raise PrecisionError(f"valuation only bounded below by {self.val}")
        return self.val

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, (int, Fraction)):
            if self.prec == INF:
                raise PrecisionError("cannot infer a precision to coerce a constant")
            # exhausted self: any extra digits on the constant are enough
            rel = self.prec if self.unit else max(self.val + 1, 1)
            if isinstance(other, int):
                return PadicScalar.from_int(self.p, other, rel)
            return PadicScalar.from_fraction(self.p, other, rel)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_exact_zero():
            return o
        if o.is_exact_zero():
            return self
        m = min(self.abs_prec, o.abs_prec)
        v0 = m
        for x in (self, o):
            if x.unit:
                v0 = min(v0, x.val)
        total = 0
        for x in (self, o):
            if x.unit:
                total += x.unit * self.p ** (x.val - v0)
        return PadicScalar(self.p, v0, total, m - v0)

    __radd__ = __add__

    def __neg__(self):
        if self.unit == 0:
            return self
        return PadicScalar(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if self.is_exact_zero() and isinstance(other, (int, Fraction, PadicScalar)):
            return PadicScalar.zero(self.p)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_exact_zero():
            return PadicScalar.zero(self.p)
        return PadicScalar(
            self.p, self.val + o.val, self.unit * o.unit, min(self.prec, o.prec)
        )

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        if self.unit == 0:
            raise ZeroDivisionError("cannot invert a value indistinguishable from 0")
        return PadicScalar(
            self.p, -self.val, pow(self.unit, -1, self.p**self.prec), self.prec
        )

    def __truediv__(self, other):
        if self.is_exact_zero() and isinstance(other, (int, Fraction, PadicScalar)):
            if other == 0 or (isinstance(other, PadicScalar) and other.unit == 0):
                raise ZeroDivisionError("division by a value indistinguishable from 0")
            return PadicScalar.zero(self.p)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if self.is_exact_zero():
            return self if k else PadicScalar(self.p, 0, 1, 1)
        acc = PadicScalar(self.p, 0, 1, self.prec if self.prec else 1)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    # -- comparison and extraction ----------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, PadicScalar)
            and (self.p, self.val, self.unit, self.prec)
            == (other.p, other.val, other.unit, other.prec)
        )

    def __hash__(self):
        return hash((self.p, self.val, self.unit, self.prec))

    def agrees_to(self, other, digits: int) -> bool:
        return (self - other).is_zero_to(digits)

    def residue(self, digits: int) -> int:
        """The value mod p^digits as an integer; requires an integral value."""
        if self.is_zero_to(digits):
            return 0
        if self.val < 0:
            raise ValueError("value is not a p-adic integer")
        if self.abs_prec < digits:
            raise PrecisionError(f"only {self.abs_prec} digits known, {digits} requested")
        return (self.unit * self.p**self.val) % self.p**digits

    def digits(self, count: int) -> list[int]:
        """Little-endian base-p digits of the value mod p^count."""
        r = self.residue(count)
        return [(r // self.p**i) % self.p for i in range(count)]

    def __repr__(self):
        if self.is_exact_zero():
            return "0"
        if self.unit == 0:
            return f"O({self.p}^{self.val})"
        return f"{self.p}^{self.val}*{self.unit} + O({self.p}^{self.abs_prec})"


def agreement_digits(a: PadicScalar, b: PadicScalar):
    """Certified number of agreeing digits from p^0 (inf for exact equality)."""
    return (a - b).val


# ---------------------------------------------------------------------------
# Scalar transcendental maps
# ---------------------------------------------------------------------------


def teichmuller(p: int, a: int, N: int) -> PadicScalar:
    """The Teichmuller lift: the (p-1)-st root of unity congruent to a mod p."""
    _check_prime(p)
    a %= p
    if a == 0:
        return PadicScalar.zero(p)
    q = p**N
    x = a
    for _ in range(N + 1):
        nx = pow(x, p, q)
        if nx == x:
            break
        x = nx
    return PadicScalar(p, 0, x, N)


def padic_log(u: PadicScalar) -> PadicScalar:
    """log on 1-units via the alternating series in u - 1.

    Terms are summed until they fall below the attainable precision; the
    division by k at term k costs v_p(k) digits, which the scalar
    arithmetic accounts for automatically.
    """
    p = u.p
    if u.is_exact_zero() or u.unit == 0 or u.val != 0 or u.unit % p != 1:
        raise ValueError("padic_log is defined on units congruent to 1 mod p")
    x = u - PadicScalar.from_int(p, 1, u.prec)
    if x.unit == 0:
        return x
    cap = x.abs_prec
    kmax = 1
    while kmax * x.val - _ilog(kmax, p) < cap + 1:
        kmax += 1
    acc = PadicScalar.zero(p)
    pw = x
    for k in range(1, kmax + 1):
        term = pw / k
        acc = acc + term if k % 2 else acc - term
        pw = pw * x
    return acc


def padic_exp(x: PadicScalar) -> PadicScalar:
    """exp via the power series, for arguments of valuation >= 1."""
    p = x.p
    if x.is_exact_zero():
        raise ValueError("cannot pick an output precision for exp of exact zero")
    if x.unit == 0:
        if x.val < 1:
            raise PrecisionError("argument of exp not certified to have valuation >= 1")
        return PadicScalar(p, 0, 1, x.val)
    if x.val < 1:
        raise ValueError("padic_exp requires valuation >= 1")
    cap = x.abs_prec
    acc = PadicScalar.from_int(p, 1, cap + 1)
    term = acc
    k = 1
    while True:
        # v(x^k / k!) >= k*v(x) - v_p(k!) and v_p(k!) <= k/(p-1) < k*v(x)
        bound = k * x.val - (k - 1) // (p - 1) - 1
        if bound > cap:
            break
        term = term * x / k
        acc = acc + term
        k += 1
    return acc


# ---------------------------------------------------------------------------
# F_p[X] helpers (dense int lists, lowest degree first)
# ---------------------------------------------------------------------------


def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_rem(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo a monic m, coefficients in F_p."""
    a = [c % p for c in a]
    d = len(m) - 1
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            for j in range(d + 1):
                a[i - d + j] = (a[i - d + j] - c * m[j]) % p
    return _fp_trim(a[:d])


def _fp_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    return _fp_rem(prod, m, p)


def _fp_powmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    out = [1]
    base = _fp_rem(a, m, p)
    while e:
        if e & 1:
            out = _fp_mulmod(out, base, m, p)
        base = _fp_mulmod(base, base, m, p)
        e >>= 1
    return out


def _fp_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _fp_trim([c % p for c in a]), _fp_trim([c % p for c in b])
    while b:
        inv = pow(b[-1], -1, p)
        monic = [(c * inv) % p for c in b]
        a, b = b, _fp_rem(a, monic, p)
    return a


def _fp_sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _fp_trim([(x - y) % p for x, y in zip(a, b)])


def _fp_mul_plain(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    return prod


def _fp_divmod(a: list[int], b: list[int], p: int):
    """Quotient and remainder over F_p; b need not be monic."""
    a = _fp_trim([c % p for c in a])
    b = _fp_trim([c % p for c in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b):
        c = (r[-1] * inv) % p
        if c:
            d = len(r) - len(b)
            q[d] = c
            for j in range(len(b)):
                r[d + j] = (r[d + j] - c * b[j]) % p
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return _fp_trim(q), r


def _fp_inverse_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """u with u*a = 1 mod m, via the extended Euclidean algorithm over F_p."""
    r0, s0 = _fp_trim([c % p for c in m]), []
    r1, s1 = _fp_trim([c % p for c in a]), [1]
    while r1:
        q, r2 = _fp_divmod(r0, r1, p)
        s2 = _fp_sub(s0, _fp_mul_plain(q, s1, p), p)
        r0, r1, s0, s1 = r1, r2, s1, s2
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible in the quotient ring")
    c = pow(r0[0], -1, p)
    return [(x * c) % p for x in s0]


def _is_irreducible_mod_p(g: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    f = len(g) - 1
    if f == 1:
        return True
    x = [0, 1]
    if _fp_powmod(x, p**f, g, p) != x:
        return False
    for q in {d for d in range(2, f + 1) if f % d == 0 and _is_prime(d)}:
        h = _fp_sub(_fp_powmod(x, p ** (f // q), g, p), x, p)
        if len(_fp_gcd(h, g, p)) != 1:
            return False
    return True


def _find_irreducible(p: int, f: int, seed: int) -> list[int]:
    """A deterministic pseudo-random monic irreducible of degree f over F_p."""
    rng = random.Random(1_000_003 * f + 1009 * p + seed)
    while True:
        g = [rng.randrange(p) for _ in range(f)] + [1]
        if _is_irreducible_mod_p(g, p):
            return g


def _solve_fp_linear(M: list[list[int]], c: list[int], p: int):
    """One solution of M y = c over F_p (free variables set to 0), or None."""
    f = len(c)
    aug = [[M[i][j] % p for j in range(f)] + [c[i] % p] for i in range(f)]
    pivots = []
    row = 0
    for col in range(f):
        piv = next((r for r in range(row, f) if aug[r][col]), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = pow(aug[row][col], -1, p)
        aug[row] = [(x * inv) % p for x in aug[row]]
        for r in range(f):
            if r != row and aug[r][col]:
                fac = aug[r][col]
                aug[r] = [(x - fac * y) % p for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    for r in range(row, f):
        if aug[r][f]:
            return None
    y = [0] * f
    for r, col in enumerate(pivots):
        y[col] = aug[r][f]
    return y


# ---------------------------------------------------------------------------
# Polynomial quotient rings and their elements
# ---------------------------------------------------------------------------


class ExtElt:
    """Element of a polynomial quotient ring: p^val * (coordinate vector).

    Same three-state precision model as PadicScalar, applied to the whole
    coordinate vector at once: in the normal state at least one coordinate
    is a p-unit and all are reduced mod p^prec.
    """

    __slots__ = ("ring", "val", "coords", "prec")

    def __init__(self, ring, val, coords, prec):
        self.ring = ring
        self.val = val
        self.coords = tuple(coords)
        self.prec = prec

    # -- state -------------------------------------------------------------

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def abs_prec(self):
        return self.val + self.prec

    def is_exact_zero(self) -> bool:
        return self.prec == INF

    def is_exhausted(self) -> bool:
        return self.prec != INF and all(c == 0 for c in self.coords)

    def is_zero_to(self, digits: int) -> bool:
        return self.val >= digits

    def agrees_to(self, other, digits: int) -> bool:
        return (self - other).is_zero_to(digits)

    def residue_coords(self, digits: int) -> tuple[int, ...]:
        """Coordinates of the value mod p^digits; requires integrality."""
        if self.is_zero_to(digits):
            return (0,) * self.ring.degree
        if self.val < 0:
            raise ValueError("value is not integral")
        if self.abs_prec < digits:
            raise PrecisionError(f"only {self.abs_prec} digits known, {digits} requested")
        q = self.p**digits
        shift = self.p**self.val
        return tuple((c * shift) % q for c in self.coords)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ExtElt):
            if other.ring is not self.ring:
                raise ValueError("mixed coefficient rings")
            return other
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return self.ring.embed_scalar(other)
        if isinstance(other, int):
            return self.ring.embed_scalar(
                PadicScalar.from_int(self.p, other, self._coerce_prec())
            )
        if isinstance(other, Fraction):
            return self.ring.embed_scalar(
                PadicScalar.from_fraction(self.p, other, self._coerce_prec())
            )
        return None

    def _coerce_prec(self) -> int:
        return self.prec if 0 < self.prec < INF else self.ring.N

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_exact_zero():
            return o
        if o.is_exact_zero():
            return self
        m = min(self.abs_prec, o.abs_prec)
        v0 = m
        for x in (self, o):
            if not x.is_exhausted():
                v0 = min(v0, x.val)
        vec = [0] * self.ring.degree
        for x in (self, o):
            if not x.is_exhausted():
                shift = self.p ** (x.val - v0)
                for i, c in enumerate(x.coords):
                    vec[i] += c * shift
        return self.ring.make(v0, vec, m - v0)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact_zero() or self.is_exhausted():
            return self
        q = self.p**self.prec
        return type(self)(self.ring, self.val, tuple(-c % q for c in self.coords), self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self._scalar_mul(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_exact_zero() or o.is_exact_zero():
            return self.ring.zero()
        vec = self.ring._mul(self.coords, o.coords)
        return self.ring.make(self.val + o.val, vec, min(self.prec, o.prec))

    __rmul__ = __mul__

    def _scalar_mul(self, other):
        if isinstance(other, int):
            s = PadicScalar.from_int(self.p, other, self._coerce_prec())
        elif isinstance(other, Fraction):
            s = PadicScalar.from_fraction(self.p, other, self._coerce_prec())
        else:
            s = other
        if self.is_exact_zero() or s.is_exact_zero():
            return self.ring.zero()
        vec = [c * s.unit for c in self.coords]
        return self.ring.make(self.val + s.val, vec, min(self.prec, s.prec))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, PadicScalar)):
            if isinstance(other, int):
                s = PadicScalar.from_int(self.p, other, self._coerce_prec())
            elif isinstance(other, Fraction):
                s = PadicScalar.from_fraction(self.p, other, self._coerce_prec())
            else:
                s = other
            return self._scalar_mul(s.inverse())
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * self.ring.inverse(o)

    def inverse(self) -> "ExtElt":
        return self.ring.inverse(self)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.ring.inverse(self) ** (-k)
        acc = self.ring.one(self.prec if 0 < self.prec < INF else self.ring.N)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, ExtElt)
            and self.ring is other.ring
            and (self.val, self.coords, self.prec)
            == (other.val, other.coords, other.prec)
        )

    def __hash__(self):
        return hash((id(self.ring), self.val, self.coords, self.prec))

    def __repr__(self):
        if self.is_exact_zero():
            return "0"
        if self.is_exhausted():
            return f"O({self.p}^{self.val})"
        return f"{self.p}^{self.val}*{list(self.coords)} + O({self.p}^{self.abs_prec})"


class UnramifiedElt(ExtElt):
    pass


class CycloElt(ExtElt):
    pass


class _PolyQuotRing:
    """Shared machinery for Z_p[X]/(modulus) coordinate arithmetic."""

    elt_cls = ExtElt

    def make(self, val, coords, prec):
        """Normalize a raw (val, coords, prec) triple into an element."""
        p, deg = self.p, self.degree
        if prec == INF:
            if any(coords):
                raise ValueError("only zero may carry infinite precision")
            return self.elt_cls(self, INF, (0,) * deg, INF)
        if prec <= 0:
            return self.elt_cls(self, val + min(prec, 0), (0,) * deg, 0)
        q = p**prec
        vec = [c % q for c in coords]
        if not any(vec):
            return self.elt_cls(self, val + prec, (0,) * deg, 0)
        v = min(_vp(c, p) for c in vec if c)
        v = min(v, prec - 1)
        if v:
            shift = p**v
            vec = [c // shift for c in vec]
        return self.elt_cls(self, val + v, vec, prec - v)

    def zero(self):
        return self.elt_cls(self, INF, (0,) * self.degree, INF)

    def one(self, prec=None):
        vec = [1] + [0] * (self.degree - 1)
        return self.make(0, vec, prec if prec is not None else self.N)

    def from_int(self, x: int, prec=None):
        return self.embed_scalar(
            PadicScalar.from_int(self.p, x, prec if prec is not None else self.N)
        )

    def from_fraction(self, q, prec=None):
        return self.embed_scalar(
            PadicScalar.from_fraction(self.p, q, prec if prec is not None else self.N)
        )

    def embed_scalar(self, s: PadicScalar):
        if s.p != self.p:
            raise ValueError("mixed primes")
        if s.is_exact_zero():
            return self.zero()
        vec = [s.unit] + [0] * (self.degree - 1)
        return self.make(s.val, vec, s.prec)

    def element(self, coords, val=0, prec=None):
        return self.make(val, list(coords), prec if prec is not None else self.N)

    def as_scalar(self, x: ExtElt) -> PadicScalar:
        """Extract a PadicScalar from an element supported on the constant."""
        if x.is_exact_zero():
            return PadicScalar.zero(self.p)
        if any(x.coords[1:]):
            raise ValueError("element is not a scalar")
        return PadicScalar(self.p, x.val, x.coords[0], x.prec)

    def _mul(self, a, b):
        prod = [0] * (2 * self.degree - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        return self._reduce(prod)

    def inverse(self, x: ExtElt) -> ExtElt:
        """Invert an element whose coordinate vector is a unit of the ring."""
        if x.is_exact_zero() or x.is_exhausted():
            raise ZeroDivisionError("cannot invert a value indistinguishable from 0")
        p, prec = self.p, x.prec
        inv = _fp_inverse_mod(list(x.coords), self._modulus_mod_p(), p)
        y = list(inv) + [0] * (self.degree - len(inv))
        k = 1
        while k < prec:
            k = min(2 * k, prec)
            q = p**k
            t = self._mul(list(x.coords), y)
            t = [(-c) % q for c in t]
            t[0] = (t[0] + 2) % q
            y = [c % q for c in self._mul(y, t)]
        return self.elt_cls(self, -x.val, tuple(c % p**prec for c in y), prec)

    def _poly_eval(self, coeffs, x: ExtElt) -> ExtElt:
        """Horner evaluation of an integer-coefficient polynomial at x."""
        acc = self.zero()
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    def _modulus_mod_p(self) -> list[int]:
        raise NotImplementedError

    def _reduce(self, vec) -> list[int]:
        raise NotImplementedError


class UnramifiedField(_PolyQuotRing):
    """The unramified extension Q_{p^f} with its arithmetic Frobenius.

    The defining polynomial is monic of degree f, irreducible mod p, and
    either supplied by the caller or found by a seeded random search.
    Frobenius is the unique automorphism lifting x -> x^p, computed by
    Newton iteration on the root of the defining polynomial near X^p.
    """

    elt_cls = UnramifiedElt

    def __init__(self, p: int, N: int, f: int, seed: int = 0, modulus=None):
        _check_prime(p)
        if f < 1:
            raise ValueError("degree must be >= 1")
        self.p, self.N, self.f, self.degree, self.seed = p, N, f, f, seed
        if modulus is None:
            modulus = _find_irreducible(p, f, seed)
        if len(modulus) != f + 1 or modulus[-1] % p**N != 1:
            raise ValueError("defining polynomial must be monic of degree f")
        if not _is_irreducible_mod_p([c % p for c in modulus], p):
            raise ValueError("defining polynomial is reducible mod p")
        self.modulus = tuple(c % p**N for c in modulus[:-1]) + (1,)
        self._frob_pows = self._compute_frobenius_powers()

    def _modulus_mod_p(self):
        return [c % self.p for c in self.modulus]

    def _reduce(self, vec):
        d = self.degree
        out = list(vec)
        for i in range(len(out) - 1, d - 1, -1):
            c = out[i]
            if c:
                out[i] = 0
                for j in range(d):
                    out[i - d + j] -= c * self.modulus[j]
        return out[:d] + [0] * (d - len(out))

    def _compute_frobenius_powers(self):
        """Coordinates of r^i for the Frobenius image r of X, i < f."""
        p, N, f = self.p, self.N, self.f
        if f == 1:
            return [(1,)]
        r0 = _fp_powmod([0, 1], p, self._modulus_mod_p(), p)
        r = self.make(0, list(r0) + [0] * (f - len(r0)), N)
        g = list(self.modulus)
        dg = [i * g[i] for i in range(1, f + 1)]
        for _ in range(N.bit_length() + 2):
            gr = self._poly_eval(g, r)
            if gr.is_zero_to(N):
                break
            r = r - gr / self._poly_eval(dg, r)
        out = [self.one(N)]
        for _ in range(f - 1):
            out.append(out[-1] * r)
        return [x.residue_coords(N) for x in out]

    def frobenius(self, x: UnramifiedElt) -> UnramifiedElt:
        if x.is_exact_zero() or x.is_exhausted() or self.f == 1:
            return x
        vec = [0] * self.f
        for i, c in enumerate(x.coords):
            if c:
                for j, rj in enumerate(self._frob_pows[i]):
                    vec[j] += c * rj
        return self.make(x.val, vec, x.prec)

    def trace(self, x: UnramifiedElt) -> PadicScalar:
        acc, y = x, x
        for _ in range(self.f - 1):
            y = self.frobenius(y)
            acc = acc + y
        return self.as_scalar(acc)

    def norm(self, x: UnramifiedElt) -> PadicScalar:
        acc, y = x, x
        for _ in range(self.f - 1):
            y = self.frobenius(y)
            acc = acc * y
        return self.as_scalar(acc)

    def teichmuller(self, residue) -> UnramifiedElt:
        """Teichmuller lift of a residue-field element (order divides p^f - 1)."""
        coords = list(residue.coords) if isinstance(residue, ExtElt) else list(residue)
        coords = [c % self.p for c in coords]
        if not any(coords):
            return self.zero()
        x = self.make(0, coords, self.N)
        e = self.p**self.f
        for _ in range(self.N + 2):
            nx = x**e
            if nx.coords == x.coords:
                break
            x = nx
        return x

    def residue_elements(self):
        """All p^f coordinate vectors of the residue field."""
        return _iter_product(range(self.p), repeat=self.f)


@lru_cache(maxsize=None)
def unramified_field(p: int, N: int, f: int, seed: int = 0) -> UnramifiedField:
    return UnramifiedField(p, N, f, seed)


def frobenius_lift(x: UnramifiedElt) -> UnramifiedElt:
    return x.ring.frobenius(x)


def solve_frobenius_equation(x: UnramifiedElt, *, multiplicative: bool = False):
    """Solve (1 - sigma) y = x, or sigma(u) = x u in the multiplicative case.

    Additive: solvable iff the trace of x vanishes at the working precision;
    solved digit by digit against the mod-p matrix of 1 - Frobenius.
    Multiplicative: x must be a Teichmuller value with trivial norm; the
    solution is the Teichmuller lift of a (p-1)-st root in the residue field.
    Raises NoSolutionError when the trace/norm obstruction is nonzero,
    which signals that the solution lives in a larger unramified extension.
    """
    ring: UnramifiedField = x.ring
    if multiplicative:
        return _solve_frobenius_mult(ring, x)
    if x.is_exact_zero():
        return ring.zero()
    if x.val < 0:
        raise ValueError("right-hand side must be integral")
    K = min(x.abs_prec, ring.N)
    if x.is_exhausted() or K <= 0:
        return ring.zero()
    tr = ring.trace(x)
    if not tr.is_zero_to(K):
        raise NoSolutionError(
            "trace obstruction is nonzero: no solution at this level"
        )
    p, f = ring.p, ring.f
    Fm = [list(ring._frob_pows[i]) for i in range(f)]  # column i = sigma(X^i)
    Mp = [[(int(i == j) - Fm[j][i]) % p for j in range(f)] for i in range(f)]
    res = list(x.residue_coords(K))
    y = [0] * f
    qK = p**K
    for k in range(K):
        pk = p**k
        c = [(res[i] // pk) % p for i in range(f)]
        v = _solve_fp_linear(Mp, c, p)
        if v is None:
            raise NoSolutionError("digit system inconsistent: no solution at this level")
        for i in range(f):
            y[i] += pk * v[i]
        # subtract p^k * (1 - sigma)(v) from the residual
        sv = [0] * f
        for i in range(f):
            if v[i]:
                for j in range(f):
                    sv[j] += v[i] * Fm[i][j]
        for j in range(f):
            res[j] = (res[j] - pk * (v[j] - sv[j])) % qK
    return ring.make(0, y, K)


def _solve_frobenius_mult(ring: UnramifiedField, alpha: UnramifiedElt):
    p, f = ring.p, ring.f
    if alpha.is_exact_zero() or alpha.is_exhausted() or alpha.val != 0:
        raise ValueError("multiplicative right-hand side must be a unit")
    K = min(alpha.prec, ring.N)
    abar = tuple(c % p for c in alpha.coords)
    target = ring.make(0, list(abar), 1)
    w = None
    for cand in ring.residue_elements():
        if not any(cand):
            continue
        c = ring.make(0, list(cand), 1)
        if (c ** (p - 1)).coords == target.coords:
            w = cand
            break
    if w is None:
        raise NoSolutionError(
            "norm obstruction is nonzero: no solution at this level"
        )
    u = ring.teichmuller(w)
    if not ring.frobenius(u).agrees_to(alpha * u, K):
        raise NoSolutionError("right-hand side is not a Teichmuller value")
    return u


@lru_cache(maxsize=None)
def _embedding_root(small: UnramifiedField, big: UnramifiedField):
    """A root of small's defining polynomial inside big, Hensel-lifted."""
    if big.p != small.p or big.f % small.f != 0:
        raise ValueError("no embedding between these fields")
    p = big.p
    g_res = [c % p for c in small.modulus]
    rho0 = None
    for cand in big.residue_elements():
        x = big.make(0, list(cand), 1)
        if big._poly_eval(g_res, x).is_zero_to(1):
            rho0 = cand
            break
    if rho0 is None:
        raise ArithmeticError("residue root not found; inconsistent field data")
    g = list(small.modulus)
    dg = [i * g[i] for i in range(1, len(g))]
    rho = big.make(0, list(rho0), big.N)
    for _ in range(big.N.bit_length() + 2):
        val = big._poly_eval(g, rho)
        if val.is_zero_to(big.N):
            break
        rho = rho - val / big._poly_eval(dg, rho)
    return rho


def embed_unramified(x: UnramifiedElt, big: UnramifiedField) -> UnramifiedElt:
    """Image of x under a fixed embedding of its field into a bigger one."""
    rho = _embedding_root(x.ring, big)
    if x.is_exact_zero():
        return big.zero()
    if x.is_exhausted():
        return big.make(x.val, [0] * big.degree, 0)
    acc = big.zero()
    for c in reversed(x.coords):
        acc = acc * rho + c
    return acc._scalar_mul(PadicScalar(big.p, x.val, 1, x.prec))


class CycloRing(_PolyQuotRing):
    """Z_p[zeta_{p^n}] with exact reduction mod the p^n-th cyclotomic polynomial.

    The residue class of X is the chosen root of unity at level n; raising
    to the p-th power under the level map matches the canonical generator
    one level down, so descend/embed implement the compatible system.
    """

    elt_cls = CycloElt

    def __init__(self, p: int, n: int, N: int):
        _check_prime(p)
        if n < 0:
            raise ValueError("level must be >= 0")
        self.p, self.n, self.N = p, n, N
        self.degree = 1 if n == 0 else (p - 1) * p ** (n - 1)

    def _modulus_mod_p(self):
        p, n = self.p, self.n
        if n == 0:
            return [(-1) % p, 1]
        m = p ** (n - 1)
        out = [0] * ((p - 1) * m + 1)
        for k in range(p):
            out[k * m] += 1
        return out

    def _reduce(self, vec):
        p, n = self.p, self.n
        if n == 0:
            return [sum(vec)]
        m = p ** (n - 1)
        length = (p - 1) * m
        out = list(vec)
        d = len(out) - 1
        while d >= length:
            c = out[d]
            out[d] = 0
            if c:
                for k in range(p - 1):
                    out[d - length + k * m] -= c
            while d >= length and out[d] == 0:
                d -= 1
        out = out[:length]
        return out + [0] * (length - len(out))

    def zeta(self, prec=None) -> CycloElt:
        """The chosen primitive p^n-th root of unity (1 at level 0)."""
        if self.n == 0:
            return self.one(prec)
        vec = [0] * self.degree
        vec[1] = 1
        return self.make(0, vec, prec if prec is not None else self.N)

    def units(self):
        """Representatives of (Z/p^n)^* (just {1} at level 0)."""
        if self.n == 0:
            return [1]
        return [c for c in range(1, self.p**self.n) if c % self.p]

    def galois(self, x: CycloElt, c: int) -> CycloElt:
        """The automorphism zeta -> zeta^c for c prime to p."""
        if c % self.p == 0:
            raise ValueError("Galois index must be prime to p")
        if self.n == 0 or x.is_exact_zero() or x.is_exhausted():
            return x
        pn = self.p**self.n
        vec = [0] * pn
        for i, ci in enumerate(x.coords):
            if ci:
                vec[(c * i) % pn] += ci
        return self.make(x.val, self._reduce(vec), x.prec)

    def embed_to(self, x: CycloElt, other: "CycloRing") -> CycloElt:
        """Inclusion into a higher level: exponents scale by p^(gap)."""
        if other.p != self.p or other.n < self.n:
            raise ValueError("can only embed into a higher level of the same tower")
        if x.is_exact_zero():
            return other.zero()
        gap = self.p ** (other.n - self.n)
        vec = [0] * other.degree
        for i, c in enumerate(x.coords):
            if c:
                vec[i * gap] = c
        return other.make(x.val, vec, x.prec)

    def descend(self, x: CycloElt, other: "CycloRing") -> CycloElt:
        """Inverse of embed_to; raises if x does not live at the lower level."""
        if other.p != self.p or other.n > self.n:
            raise ValueError("can only descend to a lower level of the same tower")
        if x.is_exact_zero():
            return other.zero()
        if x.is_exhausted():
            return other.make(x.val, [0] * other.degree, 0)
        gap = self.p ** (self.n - other.n)
        vec = []
        for i, c in enumerate(x.coords):
            if i % gap == 0:
                vec.append(c)
            elif c:
                raise ValueError("element does not descend to the requested level")
        return other.make(x.val, vec[: other.degree], x.prec)

    def norm(self, x: CycloElt) -> PadicScalar:
        """Norm down to Z_p via the product over the Galois orbit."""
        acc = self.one(x.prec if 0 < x.prec < INF else self.N)
        for c in self.units():
            acc = acc * self.galois(x, c)
        return self.as_scalar(acc)

    def trace(self, x: CycloElt) -> PadicScalar:
        acc = self.zero()
        for c in self.units():
            acc = acc + self.galois(x, c)
        return self.as_scalar(acc)


@lru_cache(maxsize=None)
def cyclo_ring(p: int, n: int, N: int) -> CycloRing:
    return CycloRing(p, n, N)


# ---------------------------------------------------------------------------
# Scalar context
# ---------------------------------------------------------------------------


class QpContext:
    """Q_p at a fixed working precision, with the same duck-typed ring API
    as the extension rings so series code is generic over coefficients."""

    degree = 1

    def __init__(self, p: int, N: int):
        _check_prime(p)
        if N < 1:
            raise ValueError("precision must be >= 1")
        self.p, self.N = p, N

    def zero(self) -> PadicScalar:
        return PadicScalar.zero(self.p)

    def one(self, prec=None) -> PadicScalar:
        return PadicScalar(self.p, 0, 1, prec if prec is not None else self.N)

    def from_int(self, x: int, prec=None) -> PadicScalar:
        return PadicScalar.from_int(self.p, x, prec if prec is not None else self.N)

    def from_fraction(self, q, prec=None) -> PadicScalar:
        return PadicScalar.from_fraction(self.p, q, prec if prec is not None else self.N)

    def embed_scalar(self, s: PadicScalar) -> PadicScalar:
        if s.p != self.p:
            raise ValueError("mixed primes")
        return s

    def teichmuller(self, a: int) -> PadicScalar:
        return teichmuller(self.p, a, self.N)

    def log(self, u: PadicScalar) -> PadicScalar:
        return padic_log(u)

    def exp(self, x: PadicScalar) -> PadicScalar:
        return padic_exp(x)

    def __repr__(self):
        return f"Qp({self.p}, N={self.N})"


@lru_cache(maxsize=None)
def Qp(p: int, N: int) -> QpContext:
    return QpContext(p, N)
