"""Local epsilon factors of de Rham characters and their crystalline twists.

The epsilon factor of a rank-one de Rham module splits into a cyclotomic
Gauss sum (from the ramified finite part of the character), an exact power
of p (from the chi^j-part), a unit from the unramified part, and a power of
the period t for the de Rham scalar.  EpsFactor keeps these four
ingredients separate instead of multiplying them out: the p-power and
t-power are exact integers with no precision loss, and the ring parts stay
in the smallest rings that contain them.  Every operation here is a finite
sum or product, so results are exact at the working precision.
"""

from __future__ import annotations

from .crystalline import CrysModule, _deser_entry, _ser_entry
from .iwasawa_algebra import DeRhamChar, GammaContext, _deser_scalar, _ser_scalar
from .padic_core import (
    CycloElt,
    PadicScalar,
    UnramifiedElt,
    cyclo_ring,
    unramified_field,
)

__all__ = [
    "EpsFactor",
    "eps_crystalline_twist",
    "eps_de_rham_char",
    "eps_dr_scalar",
    "eps_from_json_dict",
    "frobenius_transform",
    "gauss_norm_check",
    "gauss_sum",
    "xi_change_check",
]


def _pow(x, k: int):
    """x**k for unit scalars or extension elements, allowing negative k."""
    if k < 0:
        return x.inverse() ** (-k)
    return x**k


def _mul_parts(x, y):
    """Product of unramified parts; a scalar times an ExtElt goes through
    the extension element's arithmetic."""
    if isinstance(x, PadicScalar) and not isinstance(y, PadicScalar):
        return y * x
    return x * y


def _unit_split(x):
    """Split p^val off a certified invertible value: (val, unit part)."""
    if isinstance(x, PadicScalar):
        return x.val, PadicScalar(x.p, 0, x.unit, x.prec)
    return x.val, x.ring.make(0, list(x.coords), x.prec)


class EpsFactor:
    """An epsilon element in factored form: cyclo * p^a * (unram unit) * t^w.

    cyclo_part is a CycloElt (level 0 means no ramified content), p_power
    and t_exponent are exact integers, and unram_part is a PadicScalar or
    an UnramifiedElt unit.  Multiplication adds the exponents and
    multiplies the ring parts, embedding cyclotomic parts into the higher
    level; a pure Gauss-sum factor has p_power = t_exponent = 0.

    Comparison is componentwise: the integer exponents must match exactly,
    so equal values hidden in different splittings (a p-power moved into
    the cyclotomic part, say) compare unequal by design.
    """

    __slots__ = ("cyclo_part", "p_power", "unram_part", "t_exponent")

    def __init__(self, cyclo_part, p_power=0, unram_part=None, t_exponent=0):
        if not isinstance(cyclo_part, CycloElt):
            raise TypeError("cyclo_part must live in a cyclotomic ring")
        if unram_part is None:
            unram_part = PadicScalar(cyclo_part.ring.p, 0, 1, cyclo_part.ring.N)
        self.cyclo_part = cyclo_part
        self.p_power = p_power
        self.unram_part = unram_part
        self.t_exponent = t_exponent

    @property
    def p(self) -> int:
        return self.cyclo_part.ring.p

    @property
    def level(self) -> int:
        return self.cyclo_part.ring.n

    @classmethod
    def one(cls, p: int, N: int) -> "EpsFactor":
        return cls(cyclo_ring(p, 0, N).one())

    def _common_cyclo(self, other: "EpsFactor"):
        a, b = self.cyclo_part, other.cyclo_part
        if a.ring is b.ring:
            return a, b
        if a.ring.n <= b.ring.n:
            return a.ring.embed_to(a, b.ring), b
        return a, b.ring.embed_to(b, a.ring)

    def __mul__(self, other):
        if not isinstance(other, EpsFactor):
            return NotImplemented
        a, b = self._common_cyclo(other)
        return EpsFactor(
            a * b,
            self.p_power + other.p_power,
            _mul_parts(self.unram_part, other.unram_part),
            self.t_exponent + other.t_exponent,
        )

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return EpsFactor(
            _pow(self.cyclo_part, k),
            k * self.p_power,
            _pow(self.unram_part, k),
            k * self.t_exponent,
        )

    def agrees_to(self, other: "EpsFactor", digits: int) -> bool:
        if self.p_power != other.p_power or self.t_exponent != other.t_exponent:
            return False
        a, b = self._common_cyclo(other)
        if not a.agrees_to(b, digits):
            return False
        x, y = self.unram_part, other.unram_part
        if isinstance(x, PadicScalar) and isinstance(y, PadicScalar):
            return x.agrees_to(y, digits)
        if isinstance(x, PadicScalar):
            x, y = y, x
        if isinstance(y, PadicScalar):
            y = x.ring.embed_scalar(y)
        return x.agrees_to(y, digits)

    def to_json_dict(self) -> dict:
        R = self.cyclo_part.ring
        u = self.unram_part
        if isinstance(u, PadicScalar):
            unram = {"f": 1, "elt": _ser_scalar(u, R.p)}
        else:
            unram = {"f": u.ring.f, "N": u.ring.N, "elt": _ser_entry(u, R.p)}
        return {
            "cyclo_part": {
                "p": R.p,
                "level": R.n,
                "N": R.N,
                "elt": _ser_entry(self.cyclo_part, R.p),
            },
            "p_power": self.p_power,
            "unram_part": unram,
            "t_exponent": self.t_exponent,
        }

    def __repr__(self):
        return (
            f"EpsFactor(level={self.level}, p^{self.p_power}, "
            f"t^{self.t_exponent})"
        )


def eps_from_json_dict(data: dict, seed: int = 0) -> EpsFactor:
    c = data["cyclo_part"]
    p = c["p"]
    R = cyclo_ring(p, c["level"], c["N"])
    cyclo = _deser_entry(c["elt"], p, R)
    u = data["unram_part"]
    if u["f"] == 1:
        unram = _deser_scalar(u["elt"], p)
    else:
        field = unramified_field(p, u["N"], u["f"], seed)
        unram = _deser_entry(u["elt"], p, field)
    return EpsFactor(cyclo, data["p_power"], unram, data["t_exponent"])


# ---------------------------------------------------------------------------
# Gauss sums and the rank-one epsilon formula
# ---------------------------------------------------------------------------


def gauss_sum(eta: DeRhamChar, ctx: GammaContext, sign: int = 1) -> EpsFactor:
    """tau(eta_0, xi): the sum of eta_0(a)^(-1) zeta^(sign*a) over units a.

    a runs over (Z/p^n)^* for n the conductor of the finite part of eta
    (the chi^j and unramified parts do not enter).  sign = -1 evaluates at
    -xi, which replaces the chosen root of unity by its inverse.  The
    trivial finite part gives 1 at level 0.
    """
    if sign not in (1, -1):
        raise ValueError("sign selects xi (+1) or -xi (-1)")
    n = eta.conductor
    R = cyclo_ring(eta.p, n, ctx.N_work)
    if n == 0:
        return EpsFactor(R.one())
    inv = eta.inverse()
    pn = eta.p**n
    zeta = R.zeta()
    low = cyclo_ring(eta.p, eta.wild_level, ctx.N_work)
    acc = R.zero()
    for a in R.units():
        v = inv.finite_value(a, ctx)
        if isinstance(v, CycloElt):
            v = low.embed_to(v, R)
        acc = acc + zeta ** ((sign * a) % pn) * v
    return EpsFactor(acc)


def eps_de_rham_char(eta: DeRhamChar, ctx: GammaContext, sign: int = 1) -> EpsFactor:
    """The epsilon factor of the rank-one module attached to eta.

    For eta = chi^j * eta_0 * eta_1 of conductor n this is
    eta_1(sigma)^(-n) * p^(-n*j) * tau(eta_0, xi): the Gauss sum carries
    the ramified part, chi^j contributes the exact p-power, and the
    unramified part enters through its value at Frobenius.
    """
    n = eta.conductor
    tau = gauss_sum(eta, ctx, sign)
    u = None if eta.unram_value is None else _pow(eta.unram_value, -n)
    return EpsFactor(tau.cyclo_part, -n * eta.j, u)


def eps_crystalline_twist(
    M: CrysModule, eta: DeRhamChar, ctx: GammaContext, sign: int = 1
) -> EpsFactor:
    """The epsilon factor of M twisted by eta: eps(eta)^d * det(phi)^n.

    n is the conductor of eta and d the rank of M; the arithmetic
    Frobenius acts on the crystalline side as the inverse of phi, which is
    what turns the twisting formula into this determinant power.  The
    determinant splits into an exact p-power (folded into p_power) and a
    unit (folded into unram_part), so the twist stays exact.
    """
    if M.p != eta.p:
        raise ValueError("mixed primes")
    e = eps_de_rham_char(eta, ctx, sign) ** M.d
    val, unit = _unit_split(_pow(M.det_phi, eta.conductor))
    return EpsFactor(
        e.cyclo_part,
        e.p_power + val,
        _mul_parts(e.unram_part, unit),
        e.t_exponent,
    )


def eps_dr_scalar(M: CrysModule, period=None, N=None) -> EpsFactor:
    """The de Rham epsilon scalar of M: t^{m(V)} with trivial ring parts.

    For a crystalline module the epsilon factor of its unramified Weil
    module is 1, so only the period power t^{m(V)} remains.  For a module
    produced by unramified_twist, pass the returned period: it rescales
    each de Rham basis vector, hence enters through the determinant to the
    d-th power.
    """
    R = cyclo_ring(M.p, 0, N if N is not None else M.N)
    u = None if period is None else _pow(period, M.d)
    return EpsFactor(R.one(), 0, u, t_exponent=M.m)


# ---------------------------------------------------------------------------
# Equivariance checks
# ---------------------------------------------------------------------------


def xi_change_check(eta: DeRhamChar, c: int, ctx: GammaContext, sign: int = 1):
    """tau(eta_0, xi^c) versus eta_0(c) * tau(eta_0, xi) for c prime to p.

    The left side substitutes zeta -> zeta^c through the Galois action of
    gamma_c on the level-n ring; the right side scales by the finite-part
    value.  Returns (lhs, rhs, ok) with ok the comparison at the certified
    precision; both sides are exact, so this is an equality test.
    """
    if c % eta.p == 0:
        raise ValueError("xi-change index must be prime to p")
    tau = gauss_sum(eta, ctx, sign)
    R = tau.cyclo_part.ring
    lhs = EpsFactor(R.galois(tau.cyclo_part, c))
    v = eta.finite_value(c, ctx)
    if isinstance(v, CycloElt):
        v = v.ring.embed_to(v, R)
    rhs = EpsFactor(tau.cyclo_part * v)
    return lhs, rhs, lhs.agrees_to(rhs, ctx.N)


def gauss_norm_check(eta: DeRhamChar, ctx: GammaContext):
    """tau(eta_0, xi) * tau(eta_0^{-1}, xi) = eta_0(-1) * p^n, exactly.

    The Gauss sum of the inverse character is the conjugate sum, so this
    is the classical norm identity; it needs eta_0 primitive of conductor
    p^n, which holds by construction (wild parts have exact order).
    Returns (lhs, rhs, ok) as level-n ring elements.
    """
    n = eta.conductor
    lhs = (gauss_sum(eta, ctx) * gauss_sum(eta.inverse(), ctx)).cyclo_part
    R = lhs.ring
    v = eta.finite_value(-1, ctx)
    if isinstance(v, CycloElt):
        v = v.ring.embed_to(v, R)
    rhs = R.from_int(eta.p**n) * v
    return lhs, rhs, lhs.agrees_to(rhs, ctx.N)


def frobenius_transform(e: EpsFactor) -> EpsFactor:
    """The coefficient Frobenius acting on a factored epsilon element.

    Our sigma fixes the p-power roots of unity (they generate the ramified
    tower), fixes the exact exponents and scalars, and acts on an
    UnramifiedElt unram_part through the field Frobenius.  Twisting the
    character by sigma produces the same transform, which is the testable
    content of Frobenius equivariance.
    """
    u = e.unram_part
    if isinstance(u, UnramifiedElt):
        u = u.ring.frobenius(u)
    return EpsFactor(e.cyclo_part, e.p_power, u, e.t_exponent)
