"""The Iwasawa algebra of Gamma = Delta x Gamma_1 and its fraction field,
at desk scale.

Elements are stored per Delta-character: component i is the image of the
element under delta -> omega(delta)^i, a truncated series in T = gamma_1 - 1.
Multiplication is then componentwise, group-like elements have components
omega(a)^i (1+T)^(s(a)), and character evaluation is a one-component
substitution T = eta(gamma_1) - 1.  The generator is normalized by
chi(gamma_1) = 1 + p once and for all.

T-coefficients carry v_p(D_T!) + 4 guard digits over the requested N, which
absorbs the losses from logarithm denominators and huge-exponent binomials.

Two measure representations complement the T-series:

* psi-eliminated truncated pi-series (the Mellin image), evaluated at
  characters through the Amice moment formulas.  Exact at conductor 0; at
  wild conductor p^n a degree-D truncation of an infinite series only
  certifies about (D+1)/phi(p^n) digits, so nothing high-precision is
  routed that way.
* finite-level group-algebra elements (point masses on (Z/p^k)^*), where
  evaluation and the log chi-derivative are finite sums and exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .padic_core import (
    PadicScalar,
    Qp,
    cyclo_ring,
    padic_log,
    teichmuller,
)
from .series import (
    TruncSeries,
    _zeroish,
    deriv,
    from_binomial,
    gamma_action,
    one_plus_pi_power,
    to_binomial,
)


def _vp_factorial(n: int, p: int) -> int:
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


class GammaContext:
    """Shared read-only context: precisions, Teichmuller table, log chi(gamma_1)."""

    GUARD = 4

    def __init__(self, p: int, N: int, D_T: int):
        self.p, self.N, self.D_T = p, N, D_T
        self.N_work = N + _vp_factorial(D_T, p) + self.GUARD
        self.ring = Qp(p, self.N_work)
        self.chi_gamma1 = self.ring.from_int(1 + p)
        self.log_chi = padic_log(self.chi_gamma1)
        self.teich = [teichmuller(p, a, self.N_work) for a in range(p)]
        self._cache = {}

    def __repr__(self):
        return f"GammaContext(p={self.p}, N={self.N}, D_T={self.D_T})"

    # -- group coordinates -------------------------------------------------

    def s_exponent(self, a) -> PadicScalar:
        """The Gamma_1-coordinate of the unit a: <a> = (1+p)^s(a)."""
        u = self.ring.from_int(a) if isinstance(a, int) else a
        if u.val != 0:
            raise ValueError("group coordinates are defined for units only")
        proj = u / self.teich[u.residue(1)]
        return padic_log(proj) / self.log_chi

    def int_exponent(self, s: PadicScalar) -> int:
        """An integer representative of a Z_p-exponent at available precision."""
        if s.is_exact_zero():
            return 0
        return s.residue(min(self.N_work, int(s.abs_prec)))

    # -- stock elements ----------------------------------------------------

    def zero_series(self) -> TruncSeries:
        return TruncSeries.zero(self.ring, self.D_T)

    def one(self) -> "IwasawaElt":
        f = TruncSeries.monomial(self.ring, 0, self.D_T)
        return IwasawaElt(self, [f] * (self.p - 1))

    def zero(self) -> "IwasawaElt":
        return IwasawaElt(self, [self.zero_series()] * (self.p - 1))

    def group_like(self, a) -> "IwasawaElt":
        """The image of gamma_a for a unit a (as int or scalar)."""
        u = self.ring.from_int(a) if isinstance(a, int) else a
        omega = self.teich[u.residue(1)]
        e = self.int_exponent(self.s_exponent(u))
        shell = one_plus_pi_power(self.ring, e, self.D_T)
        comps = []
        w = self.ring.one()
        for _ in range(self.p - 1):
            comps.append(shell.scale(w))
            w = w * omega
        return IwasawaElt(self, comps)

    def gamma1(self) -> "IwasawaElt":
        if "gamma1" not in self._cache:
            shell = TruncSeries.from_ints(self.ring, [1, 1], self.D_T)
            self._cache["gamma1"] = IwasawaElt(self, [shell] * (self.p - 1))
        return self._cache["gamma1"]

    def gamma_minus_one(self) -> "IwasawaElt":
        comps = [
            TruncSeries.monomial(
                self.ring, 0, self.D_T, self.ring.from_int((-1) ** (i & 1))
            )
            for i in range(self.p - 1)
        ]
        return IwasawaElt(self, comps)


@lru_cache(maxsize=None)
def gamma_context(p: int, N: int, D_T: int) -> GammaContext:
    return GammaContext(p, N, D_T)


def _exact_zero_like(v):
    """An exact zero in the same coefficient domain as v."""
    if isinstance(v, PadicScalar):
        return PadicScalar.zero(v.p)
    return v.ring.zero()


# ---------------------------------------------------------------------------
# de Rham characters of Gamma
# ---------------------------------------------------------------------------


class DeRhamChar:
    """A character chi^j * eta_0 * eta_1 of the cyclotomic Galois group.

    The finite part eta_0 splits into a tame power of the Teichmuller
    character (tame_index mod p-1) and a wild part of exact order
    p^wild_level, pinned by its value zeta_{p^wild_level}^wild_exponent at
    gamma_1.  The unramified part eta_1 only enters through its value at
    Frobenius (a scalar unit, default 1); it is invisible to Gamma.
    """

    __slots__ = ("p", "j", "tame_index", "wild_level", "wild_exponent", "unram_value")

    def __init__(self, p, j, tame_index=0, wild_level=0, wild_exponent=0, unram_value=None):
        if wild_level < 0:
            raise ValueError("wild level must be >= 0")
        if wild_level and wild_exponent % p == 0:
            raise ValueError("wild part must have exact order p^wild_level")
        self.p = p
        self.j = j
        self.tame_index = tame_index % (p - 1)
        self.wild_level = wild_level
        self.wild_exponent = wild_exponent % p**wild_level if wild_level else 0
        self.unram_value = unram_value

    @property
    def conductor(self) -> int:
        if self.wild_level:
            return self.wild_level + 1
        return 1 if self.tame_index else 0

    def is_crystalline_twist(self) -> bool:
        """True when the finite part is tame only (usable in twist())."""
        return self.wild_level == 0

    def inverse(self) -> "DeRhamChar":
        inv_u = None if self.unram_value is None else self.unram_value.inverse()
        return DeRhamChar(
            self.p, -self.j, -self.tame_index, self.wild_level,
            -self.wild_exponent if self.wild_level else 0, inv_u,
        )

    def times(self, other: "DeRhamChar") -> "DeRhamChar":
        if other.p != self.p:
            raise ValueError("mixed primes")
        lvl = max(self.wild_level, other.wild_level)
        e = 0
        if lvl:
            e = (
                self.wild_exponent * self.p ** (lvl - self.wild_level)
                + other.wild_exponent * self.p ** (lvl - other.wild_level)
            ) % self.p**lvl
            while lvl and e % self.p == 0:
                e //= self.p
                lvl -= 1
        us = [u for u in (self.unram_value, other.unram_value) if u is not None]
        u = us[0] * us[1] if len(us) == 2 else (us[0] if us else None)
        return DeRhamChar(
            self.p, self.j + other.j, self.tame_index + other.tame_index,
            lvl, e if lvl else 0, u,
        )

    def gamma1_value(self, ctx: GammaContext):
        """eta(gamma_1) = zeta * (1+p)^j, in the right cyclotomic ring."""
        scal = ctx.chi_gamma1**self.j
        if self.wild_level == 0:
            return scal
        R = cyclo_ring(self.p, self.wild_level, ctx.N_work)
        return R.zeta() ** self.wild_exponent * scal

    def finite_value(self, a: int, ctx: GammaContext):
        """eta_0(a) for a prime to p, exact in the wild-level ring."""
        if a % self.p == 0:
            raise ValueError("eta_0 is defined on units")
        tame = ctx.teich[a % self.p] ** self.tame_index
        if self.wild_level == 0:
            return tame
        R = cyclo_ring(self.p, self.wild_level, ctx.N_work)
        s = ctx.s_exponent(ctx.ring.from_int(a)).residue(self.wild_level)
        return R.zeta() ** (self.wild_exponent * s) * tame

    def value_on_unit(self, a: int, ctx: GammaContext):
        """eta(gamma_a) = a^j * eta_0(a); exact for an exact integer a."""
        return self.finite_value(a, ctx) * ctx.ring.from_int(a) ** self.j

    def sign_at_minus_one(self) -> int:
        return (-1) ** ((self.j + self.tame_index) & 1)

    def __repr__(self):
        parts = [f"chi^{self.j}"]
        if self.tame_index:
            parts.append(f"omega^{self.tame_index}")
        if self.wild_level:
            parts.append(f"wild(p^{self.wild_level};{self.wild_exponent})")
        if self.unram_value is not None:
            parts.append("unram")
        return "*".join(parts)

    def to_json_dict(self):
        u = self.unram_value
        return {
            "j": self.j,
            "tame_index": self.tame_index,
            "wild_level": self.wild_level,
            "wild_exponent": self.wild_exponent,
            "unram_value": None if u is None else _ser_scalar(u, u.p),
        }


def _eval_point(eta: DeRhamChar, ctx: GammaContext):
    """T0 = eta(gamma_1) - 1 in its natural ring (exact zero at weight 0)."""
    if eta.wild_level == 0:
        if eta.j == 0:
            return PadicScalar.zero(ctx.p)
        return eta.gamma1_value(ctx) - 1
    R = cyclo_ring(ctx.p, eta.wild_level, ctx.N_work)
    return eta.gamma1_value(ctx) - R.one()


# ---------------------------------------------------------------------------
# Iwasawa-algebra elements
# ---------------------------------------------------------------------------


class IwasawaElt:
    """Delta-graded truncated T-series; see the module docstring."""

    __slots__ = ("ctx", "comps")

    def __init__(self, ctx: GammaContext, comps):
        comps = tuple(comps)
        if len(comps) != ctx.p - 1:
            raise ValueError("need one component per Delta-character")
        self.ctx = ctx
        self.comps = comps

    def _check(self, other):
        if other.ctx is not self.ctx:
            raise ValueError("mixed contexts")

    def __add__(self, other):
        self._check(other)
        return IwasawaElt(self.ctx, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        self._check(other)
        return IwasawaElt(self.ctx, [a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return IwasawaElt(self.ctx, [-a for a in self.comps])

    def __mul__(self, other):
        if isinstance(other, IwasawaElt):
            self._check(other)
            return IwasawaElt(
                self.ctx, [a * b for a, b in zip(self.comps, other.comps)]
            )
        if isinstance(other, FractionElt):
            return FractionElt(self * other.num, other.den)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s) -> "IwasawaElt":
        return IwasawaElt(self.ctx, [a.scale(s) for a in self.comps])

    def agrees_to(self, other: "IwasawaElt", digits: int, up_to_degree=None) -> bool:
        self._check(other)
        return all(
            a.agrees_to(b, digits, up_to_degree=up_to_degree)
            for a, b in zip(self.comps, other.comps)
        )

    def is_zero_to(self, digits: int, up_to_degree=None) -> bool:
        return all(a.is_zero_to(digits, up_to_degree=up_to_degree) for a in self.comps)

    def is_integral(self) -> bool:
        """All coefficients in Z_p at the certified precision (Lambda vs H)."""
        return all(
            c.is_exact_zero() or c.val >= 0
            for f in self.comps
            for c in f.coeffs
        )

    def __repr__(self):
        return f"IwasawaElt({self.ctx!r})"

    # -- evaluation ---------------------------------------------------------

    def evaluate_char(self, eta: DeRhamChar):
        """pi_eta: substitute T = eta(gamma_1) - 1 on the matching component.

        Exact for elements that are genuinely polynomial in T (everything
        built here); for a truncation of an infinite series a wild eta only
        certifies about D_T / phi(p^wild_level) digits.
        """
        F = self.comps[(eta.j + eta.tame_index) % (self.ctx.p - 1)]
        if eta.wild_level == 0 and eta.j == 0:
            return F.coeffs[0]
        return F.evaluate(_eval_point(eta, self.ctx))

    def derivative_at(self, eta: DeRhamChar):
        """d/ds at s=0 along eta*<chi>^s: eta(gamma_1) log chi(gamma_1) F'(T0)."""
        ctx = self.ctx
        F = self.comps[(eta.j + eta.tame_index) % (ctx.p - 1)]
        dF = TruncSeries(
            ctx.ring,
            [F.coeffs[d + 1] * (d + 1) for d in range(F.D)] + [ctx.ring.zero()],
            F.D,
        )
        g1 = eta.gamma1_value(ctx)
        return dF.evaluate(_eval_point(eta, ctx)) * g1 * ctx.log_chi

    def leading_term(self, eta: DeRhamChar, max_order: int = 8, zero_floor=None):
        """Smallest k with nonvanishing k-th s-derivative at eta, and its value.

        The component is recentered at T0 = eta(gamma_1) - 1 and composed
        with T0 + eta(gamma_1)(e^(sL) - 1), L = log chi(gamma_1); the k-th
        derivative is k! times the s^k coefficient.  A coefficient that is
        merely exhausted cannot be certified nonzero and counts as zero; so
        does one of valuation >= zero_floor, because the dropped tail of a
        degree-D_T truncation feeds the coefficients noise of size about
        p^(D_T), which would otherwise masquerade as a leading value.  The
        floor defaults to (D_T + 1) // 2, far above the factorial-sized
        leading values this layer produces and far below the tail noise.
        """
        ctx = self.ctx
        if zero_floor is None:
            zero_floor = (ctx.D_T + 1) // 2
        F = self.comps[(eta.j + eta.tame_index) % (ctx.p - 1)]
        g1 = eta.gamma1_value(ctx)
        T0 = _eval_point(eta, ctx)
        K = min(max_order, F.D)
        # Taylor coefficients A_k of F(T0 + u)
        A = []
        for k in range(K + 1):
            acc = None
            pw = None  # T0^(d-k), grown incrementally
            for d in range(k, F.D + 1):
                term = F.coeffs[d] * comb(d, k)
                if pw is not None:
                    term = term * pw
                acc = term if acc is None else acc + term
                pw = T0 if pw is None else pw * T0
            A.append(acc)
        # w(s) = g1 (e^{sL} - 1): an s-polynomial with no constant term
        L = ctx.log_chi
        w = {m: g1 * (L**m) * Fraction(1, factorial(m)) for m in range(1, K + 1)}
        out = [A[0]] + [None] * K
        cur = {0: None}  # w^0 = 1, flagged by a None coefficient
        for k in range(1, K + 1):
            nxt = {}
            for da, ca in cur.items():
                for db, cb in w.items():
                    if da + db > K:
                        continue
                    t = cb if ca is None else ca * cb
                    nxt[da + db] = t if da + db not in nxt else nxt[da + db] + t
            cur = nxt
            for deg, cval in cur.items():
                t = A[k] * cval
                out[deg] = t if out[deg] is None else out[deg] + t
        for k in range(K + 1):
            val = out[k]
            if val is not None and not _zeroish(val) and val.val < zero_floor:
                return k, val * factorial(k)
        raise ValueError(
            f"vanishes (or is indistinguishable from 0) to order > {max_order}"
        )


# ---------------------------------------------------------------------------
# ell / mu / p_k and structural maps
# ---------------------------------------------------------------------------


def ell_element(ctx: GammaContext, j: int) -> IwasawaElt:
    """ell_j = log(gamma_1)/log chi(gamma_1) - j (same series in every component)."""
    key = ("ell", j)
    if key not in ctx._cache:
        inv_log = ctx.log_chi.inverse()
        cs = [ctx.ring.from_int(-j) if j else ctx.ring.zero()]
        for d in range(1, ctx.D_T + 1):
            cs.append(ctx.ring.from_fraction(Fraction((-1) ** (d + 1), d)) * inv_log)
        f = TruncSeries(ctx.ring, cs, ctx.D_T)
        ctx._cache[key] = IwasawaElt(ctx, [f] * (ctx.p - 1))
    return ctx._cache[key]


def _ell_product(ctx: GammaContext, lo: int, hi: int) -> IwasawaElt:
    """ell_lo * ell_{lo+1} * ... * ell_hi, cached."""
    key = ("ellprod", lo, hi)
    if key not in ctx._cache:
        if lo > hi:
            out = ctx.one()
        else:
            out = _ell_product(ctx, lo, hi - 1) * ell_element(ctx, hi)
        ctx._cache[key] = out
    return ctx._cache[key]


def mu_element(ctx: GammaContext, n: int) -> "FractionElt":
    if n == 0:
        return FractionElt(ctx.one(), ctx.one())
    if n >= 1:
        return FractionElt(_ell_product(ctx, 0, n - 1), ctx.one())
    return FractionElt(ctx.one(), _ell_product(ctx, n, -1))


def ell_of_rep(ctx: GammaContext, weights) -> "FractionElt":
    """ell(V) = product of mu_n over the Hodge-Tate multiset of V."""
    out = FractionElt(ctx.one(), ctx.one())
    for n in weights:
        out = out * mu_element(ctx, n)
    return out


def p_k_element(ctx: GammaContext, k: int) -> IwasawaElt:
    """(1 - gamma_1)(1 - chi(gamma_1)^{-1} gamma_1) ... (k factors)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    key = ("p_k", k)
    if key not in ctx._cache:
        if k == 0:
            out = ctx.one()
        else:
            fac = ctx.one() - ctx.gamma1().scale(ctx.chi_gamma1 ** (1 - k))
            out = p_k_element(ctx, k - 1) * fac
        ctx._cache[key] = out
    return ctx._cache[key]


def _rescale_one_plus(f: TruncSeries, u) -> TruncSeries:
    """T -> u(1+T) - 1: scale the (1+T)-binomial coordinate of index m by u^m."""
    b = to_binomial(f)
    out = [b[0]]
    w = u
    for m in range(1, len(b)):
        out.append(b[m] * w)
        w = w * u
    return from_binomial(f.ring, out, f.D)


def twist(x, k_or_eta, tame_shift: int = 0):
    """Tw: gamma -> eta(gamma) gamma for eta = chi^k * omega^tame_shift.

    Components permute by the Delta-index of eta and T maps to
    chi(gamma_1)^k (1+T) - 1.  Wild characters are rejected: they do not
    act componentwise on this grading.

    The substitution respects the (p, T)-adic filtration but not the
    T-adic one: on a degree-D truncation of an infinite series, output
    coefficient j is certified to D + 1 - j digits only (the dropped tail
    feeds back through the constant term chi(gamma_1)^k - 1).  Twisting a
    genuine T-polynomial is exact, and character evaluation of a twisted
    element at a tame character is exact regardless.  Pad the context
    degree by the target precision when full-window coefficients matter.
    """
    if isinstance(x, FractionElt):
        return FractionElt(
            twist(x.num, k_or_eta, tame_shift), twist(x.den, k_or_eta, tame_shift)
        )
    ctx = x.ctx
    if isinstance(k_or_eta, DeRhamChar):
        eta = k_or_eta
        if not eta.is_crystalline_twist():
            raise ValueError("only tame-times-chi^k characters act on the grading")
        k, tame_shift = eta.j, eta.tame_index + tame_shift
    else:
        k = k_or_eta
    if k == 0 and tame_shift % (ctx.p - 1) == 0:
        return x
    u = ctx.chi_gamma1**k
    m = ctx.p - 1
    comps = [
        _rescale_one_plus(x.comps[(i + k + tame_shift) % m], u) for i in range(m)
    ]
    return IwasawaElt(ctx, comps)


def involution(x):
    """iota: gamma -> gamma^{-1}; components negate their Delta-index and
    T maps to (1+T)^{-1} - 1."""
    if isinstance(x, FractionElt):
        return FractionElt(involution(x.num), involution(x.den))
    ctx = x.ctx
    m = ctx.p - 1
    comps = [gamma_action(-1, x.comps[(-i) % m]) for i in range(m)]
    return IwasawaElt(ctx, comps)


class FractionElt:
    """num/den in the total quotient ring, compared by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: IwasawaElt, den: IwasawaElt):
        num._check(den)
        self.num = num
        self.den = den

    @property
    def ctx(self):
        return self.num.ctx

    def __mul__(self, other):
        if isinstance(other, FractionElt):
            return FractionElt(self.num * other.num, self.den * other.den)
        if isinstance(other, IwasawaElt):
            return FractionElt(self.num * other, self.den)
        return FractionElt(self.num.scale(other), self.den)

    __rmul__ = __mul__

    def cross_agrees(self, other: "FractionElt", digits: int, up_to_degree=None) -> bool:
        return (self.num * other.den).agrees_to(
            other.num * self.den, digits, up_to_degree=up_to_degree
        )

    def evaluate_char(self, eta: DeRhamChar, max_order: int = 8):
        """Value at eta, cancelling matching vanishing orders of num and den."""
        kd, vd = self.den.leading_term(eta, max_order)
        try:
            kn, vn = self.num.leading_term(eta, max_order)
        except ValueError:
            return _exact_zero_like(vd)
        if kn > kd:
            return _exact_zero_like(vd)
        if kn < kd:
            raise ZeroDivisionError("pole: denominator vanishes to higher order at eta")
        return vn / vd

    def leading_term(self, eta: DeRhamChar, max_order: int = 8):
        """Signed vanishing order at eta and the leading Taylor coefficient.

        Negative order means a pole.  The coefficient is the star-value:
        the ratio of the leading s-power coefficients of num and den, so
        the k-th-derivative normalization of IwasawaElt.leading_term is
        divided back out.
        """
        kd, vd = self.den.leading_term(eta, max_order)
        kn, vn = self.num.leading_term(eta, max_order)
        unstar = self.ctx.ring.from_fraction(Fraction(factorial(kd), factorial(kn)))
        return kn - kd, vn / vd * unstar


def fudge_factor(ctx: GammaContext, h: int, eta: DeRhamChar):
    """(ell_{h-1} ... ell_0)/(gamma_1 - eta(gamma_1)) evaluated at eta.

    Requires 0 <= j <= h-1 so that exactly one ell-factor vanishes at eta;
    the value is finite and equals
    (-1)^(h-j-1) (h-j-1)! j! / (eta(gamma_1) log chi(gamma_1)).
    Tame eta only: the denominator's coefficients must live in the scalar
    ring of the grading.
    """
    if not 0 <= eta.j <= h - 1:
        raise ValueError("need 0 <= j <= h-1")
    if eta.wild_level:
        raise ValueError("wild characters are out of scope for the fudge factor")
    num = _ell_product(ctx, 0, h - 1)
    den = ctx.gamma1() - ctx.one().scale(eta.gamma1_value(ctx))
    return FractionElt(num, den).evaluate_char(eta, max_order=h + 1)


# ---------------------------------------------------------------------------
# Mellin transform and finite-level measures
# ---------------------------------------------------------------------------


def _mellin_table(ctx: GammaContext, D: int):
    """Cached series (1+pi)^(omega(u)(1+p)^m) for u in Delta, m <= D_T."""
    key = ("mellin", D)
    if key not in ctx._cache:
        tab = {}
        for u in range(1, ctx.p):
            w = ctx.teich[u]
            row = []
            for m in range(ctx.D_T + 1):
                e = (w * ctx.chi_gamma1**m).residue(ctx.N_work)
                row.append(one_plus_pi_power(ctx.ring, e, D))
            tab[u] = row
        ctx._cache[key] = tab
    return ctx._cache[key]


def mellin(x: IwasawaElt, D: int) -> TruncSeries:
    """The Mellin transform: group-like gamma_a -> (1+pi)^a, extended linearly.

    The image of a measure lands in the psi = 0 part; at truncation degree D
    that membership is certified to about (D+1)/(p-1) digits.
    """
    ctx = x.ctx
    tab = _mellin_table(ctx, D)
    total = TruncSeries.zero(ctx.ring, D)
    inv = PadicScalar.from_int(ctx.p, ctx.p - 1, ctx.N_work).inverse()
    for i, F in enumerate(x.comps):
        b = to_binomial(F)
        for u in range(1, ctx.p):
            wpow = ctx.teich[u] ** ((-i) % (ctx.p - 1))
            acc = None
            for m, bm in enumerate(b):
                if _zeroish(bm):
                    continue
                term = tab[u][m].scale(bm)
                acc = term if acc is None else acc + term
            if acc is not None:
                total = total + acc.scale(wpow * inv)
    return total


class FiniteMeasure:
    """A finitely supported measure on the units: point masses at integers.

    Support points are kept as honest integers, not residues, because a
    character with nonzero twist exponent j sees the full unit a through
    a^j and does not factor through any finite level.  Character evaluation
    and the log chi-derivative are then finite sums, hence exact.  The
    level records the congruence resolution needed by the Mellin transform
    round trip; mellin_inverse can only return canonical representatives
    mod p^level, so it recovers the finite-level projection of a measure.
    """

    __slots__ = ("ctx", "level", "masses")

    def __init__(self, ctx: GammaContext, level: int, masses: dict):
        if level < 1:
            raise ValueError("level must be >= 1")
        self.ctx = ctx
        self.level = level
        self.masses = dict(masses)
        if any(a % ctx.p == 0 for a in self.masses):
            raise ValueError("masses must be supported on units")

    @classmethod
    def delta(cls, ctx: GammaContext, level: int, a: int, coeff=None):
        return cls(ctx, level, {a: coeff if coeff is not None else ctx.ring.one()})

    def _check(self, other):
        if other.ctx is not self.ctx or other.level != self.level:
            raise ValueError("mixed measure contexts")

    def __add__(self, other):
        self._check(other)
        out = dict(self.masses)
        for a, v in other.masses.items():
            out[a] = out[a] + v if a in out else v
        return FiniteMeasure(self.ctx, self.level, out)

    def __neg__(self):
        return FiniteMeasure(
            self.ctx, self.level, {a: -v for a, v in self.masses.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Convolution: support points multiply as integers."""
        if isinstance(other, FiniteMeasure):
            self._check(other)
            out = {}
            for a, va in self.masses.items():
                for b, vb in other.masses.items():
                    k = a * b
                    t = va * vb
                    out[k] = out[k] + t if k in out else t
            return FiniteMeasure(self.ctx, self.level, out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s):
        return FiniteMeasure(
            self.ctx, self.level, {a: v * s for a, v in self.masses.items()}
        )

    def evaluate_char(self, eta: DeRhamChar):
        """sum_a m(a) eta(gamma_a), exact (conductor must fit the level)."""
        if eta.conductor > self.level:
            raise ValueError("character conductor exceeds the measure level")
        acc = None
        for a, v in self.masses.items():
            t = v * eta.value_on_unit(a, self.ctx)
            acc = t if acc is None else acc + t
        return acc if acc is not None else self.ctx.ring.zero()

    def derivative_at(self, eta: DeRhamChar):
        """sum_a m(a) eta(gamma_a) log<a>, the s-derivative along eta*<chi>^s."""
        if eta.conductor > self.level:
            raise ValueError("character conductor exceeds the measure level")
        ctx = self.ctx
        acc = None
        for a, v in self.masses.items():
            la = ctx.s_exponent(ctx.ring.from_int(a)) * ctx.log_chi
            t = v * eta.value_on_unit(a, ctx) * la
            acc = t if acc is None else acc + t
        return acc if acc is not None else ctx.ring.zero()

    def mellin(self, D: int) -> TruncSeries:
        ctx = self.ctx
        total = TruncSeries.zero(ctx.ring, D)
        for a, v in self.masses.items():
            total = total + one_plus_pi_power(ctx.ring, a, D).scale(v)
        return total

    def agrees_to(self, other: "FiniteMeasure", digits: int) -> bool:
        keys = set(self.masses) | set(other.masses)
        z = self.ctx.ring.zero()
        return all(
            self.masses.get(a, z).agrees_to(other.masses.get(a, z), digits)
            for a in keys
        )


def _roots_of_unity_values(g: TruncSeries, p: int, level: int, N: int):
    """g(zeta^u - 1) for all u mod p^level: one Horner per sublevel, then
    Galois conjugates (g has scalar coefficients)."""
    q = p**level
    R = cyclo_ring(p, level, N)
    vals = {0: R.embed_scalar(g.coeffs[0])}
    for m in range(level):
        sub = cyclo_ring(p, level - m, N)
        base = g.evaluate(sub.zeta() - sub.one())
        for up in sub.units():
            vals[(up * p**m) % q] = sub.embed_to(sub.galois(base, up), R)
    return R, vals


def mellin_inverse(
    f: TruncSeries, ctx: GammaContext, level: int, tolerance=None
) -> FiniteMeasure:
    """Recover the level-p^level masses of the measure behind a psi = 0 series.

    m(a) = p^(-level) sum over zeta^(p^level) = 1 of zeta^(-a) f(zeta - 1).
    The division costs `level` digits (the true masses are integral).  Mass
    found off the units means f was not in the psi = 0 kernel; that check
    runs at `tolerance` digits (default: the certifiable (D+1)/(p-1) minus
    the division cost and a margin).
    """
    p = ctx.p
    q = p**level
    if tolerance is None:
        tolerance = max((f.D + 1) // (p - 1) - level - 2, 1)
    R, vals = _roots_of_unity_values(f, p, level, ctx.N_work)
    zpow = [R.zeta() ** e for e in range(q)]
    masses = {}
    for a in range(q):
        acc = None
        for u in range(q):
            t = vals[u] * zpow[(-a * u) % q]
            acc = t if acc is None else acc + t
        m_a = R.as_scalar(acc) / p**level
        if a % p == 0:
            if not m_a.is_zero_to(tolerance):
                raise ValueError("series is not in the kernel of psi at tolerance")
        else:
            masses[a] = m_a
    return FiniteMeasure(ctx, level, masses)


def evaluate_measure_series(f: TruncSeries, eta: DeRhamChar, ctx: GammaContext):
    """lambda(eta) for the measure whose Mellin image is f.

    Conductor 0: the j-th moment (partial^j f)(0), exact for truncations.
    Conductor p^n: p^(-n) sum_a eta_0(a) sum_zeta zeta^(-a) (partial^j f)(zeta-1),
    exact when f is a genuine polynomial (e.g. from a finite level), and
    certified to about (D+1)/phi(p^n) digits for truncated infinite series.
    """
    if eta.j < 0:
        raise ValueError("negative-weight moments need the twist ladder first")
    g = f
    for _ in range(eta.j):
        g = deriv(g)
    n = eta.conductor
    if n == 0:
        return g.coeffs[0]
    p = ctx.p
    q = p**n
    R, vals = _roots_of_unity_values(g, p, n, ctx.N_work)
    zpow = [R.zeta() ** e for e in range(q)]
    acc = None
    for a in range(1, q):
        if a % p == 0:
            continue
        ev = eta.finite_value(a, ctx)
        if eta.wild_level:
            ev = cyclo_ring(p, eta.wild_level, ctx.N_work).embed_to(ev, R)
        inner = None
        for u in range(q):
            t = vals[u] * zpow[(-a * u) % q]
            inner = t if inner is None else inner + t
        t = inner * ev
        acc = t if acc is None else acc + t
    return acc / p**n


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _ser_scalar(c: PadicScalar, p: int, digits=None):
    """Digit-array form; p-integral values are a bare little-endian list."""
    if c.is_exact_zero():
        return []
    n = c.abs_prec if digits is None else min(digits, c.abs_prec)
    if c.val >= 0:
        return c.digits(int(n))
    unit_digits = [(c.unit // p**i) % p for i in range(c.prec)]
    return {"val": c.val, "digits": unit_digits}


def _deser_scalar(data, p: int) -> PadicScalar:
    if isinstance(data, dict):
        u = sum(d * p**i for i, d in enumerate(data["digits"]))
        return PadicScalar(p, data["val"], u, len(data["digits"]))
    if not data:
        return PadicScalar.zero(p)
    u = sum(d * p**i for i, d in enumerate(data))
    return PadicScalar(p, 0, u, len(data))


def iwasawa_to_json_dict(x: IwasawaElt) -> dict:
    ctx = x.ctx
    return {
        "p": ctx.p,
        "N": ctx.N,
        "D_T": ctx.D_T,
        "components": [
            [_ser_scalar(c, ctx.p, ctx.N) for c in f.coeffs] for f in x.comps
        ],
    }


def iwasawa_from_json_dict(d: dict) -> IwasawaElt:
    ctx = gamma_context(d["p"], d["N"], d["D_T"])
    comps = [
        TruncSeries(ctx.ring, [_deser_scalar(c, ctx.p) for c in row], ctx.D_T)
        for row in d["components"]
    ]
    return IwasawaElt(ctx, comps)


def char_from_json_dict(p: int, d: dict) -> DeRhamChar:
    u = d.get("unram_value")
    return DeRhamChar(
        p,
        d["j"],
        d.get("tame_index", 0),
        d.get("wild_level", 0),
        d.get("wild_exponent", 0),
        None if u is None else _deser_scalar(u, p),
    )
