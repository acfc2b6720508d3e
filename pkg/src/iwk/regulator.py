"""Rank-one cyclotomic regulator pipeline and the Theta/epsilon assembly.

The psi = 1 face of Iwasawa cohomology is modeled by psi-fixed series;
the logarithmic derivative of a norm-compatible Coleman series is the
canonical source.  The regulator sends such a y to the measure behind
(1 - phi)y, and the big exponential walks the other way: solve
(1 - phi)y = z and apply ell_{h-1} after ... after ell_0.  Interpolation
prefactors and the Theta/epsilon scalar glue this measure layer to the
crystalline and epsilon layers.

A rank-one crystalline module enters only through its phi-scalar lambda:
the series phi is always the substitution pi -> (1+pi)^p - 1 and lambda
rides along as a coefficient, so the twisted psi = 1 condition reads
psi(y) = lambda * y.  Precision bookkeeping: dlog is valid to degree
D - 1, psi output is trusted to degree D // p, each ell burns one top
degree, and recovering masses at level k costs k digits.
"""

from fractions import Fraction
from math import comb
from typing import NamedTuple

from .crystalline import CrysModule, euler_operators, gamma_star
from .epsilon import eps_crystalline_twist, eps_dr_scalar
from .iwasawa_algebra import (
    FiniteMeasure,
    FractionElt,
    GammaContext,
    IwasawaElt,
    ell_of_rep,
    mellin,
    mellin_inverse,
)
from .padic_core import PadicScalar, cyclo_ring
from .series import (
    NonconvergentError,
    TruncSeries,
    deriv,
    ell_apply,
    one,
    one_plus_pi_power,
    phi,
    psi,
    solve_one_minus_phi,
)

FLAG_BAD_ONE = "bad_one: use strong/derivative formula"
FLAG_BAD_PINV = "bad_pinv"


# ---------------------------------------------------------------------------
# Coleman series and the logarithmic derivative
# ---------------------------------------------------------------------------


class ColemanSeries:
    """A unit power series with a verified norm-compatibility flag.

    The constant term must be a unit.  The flag starts False unless the
    caller vouches for it; check_norm_compatible sets it from evidence.
    The series is treated as exact polynomial data (Coleman series enter
    through closed forms), the same opt-in semantics as compose().
    """

    __slots__ = ("series", "norm_compatible")

    def __init__(self, series: TruncSeries, norm_compatible: bool = False):
        c0 = series.coeffs[0]
        if c0.is_exact_zero() or c0.val != 0:
            raise ValueError("non-unit constant term")
        self.series = series
        self.norm_compatible = norm_compatible


def cyclotomic_unit(ring, c: int, D: int) -> ColemanSeries:
    """g_c = ((1+pi)^c - 1)/pi, the Coleman series of the cyclotomic unit
    system (zeta^c - 1)/(zeta - 1); c must be positive and prime to p
    (otherwise the constant term c fails the unit check)."""
    f = one_plus_pi_power(ring, c, D + 1) - one(ring, D + 1)
    return ColemanSeries(TruncSeries(ring, f.coeffs[1:], D))


def _unit_inverse(f: TruncSeries) -> TruncSeries:
    """1/f for a unit series, by the forward recurrence."""
    inv0 = f.coeffs[0].inverse()
    out = [inv0]
    for d in range(1, f.D + 1):
        acc = None
        for k in range(1, d + 1):
            ck = f.coeffs[k]
            if ck.is_exact_zero():
                continue
            t = ck * out[d - k]
            acc = t if acc is None else acc + t
        out.append(f.ring.zero() if acc is None else -(inv0 * acc))
    return TruncSeries(f.ring, out, f.D)


def dlog(g) -> TruncSeries:
    """(1+pi) g'/g; the top coefficient inherits deriv's casualty, so the
    output is valid to degree D - 1."""
    f = g.series if isinstance(g, ColemanSeries) else g
    c0 = f.coeffs[0]
    if c0.is_exact_zero() or c0.val != 0:
        raise ValueError("non-unit constant term")
    return deriv(f) * _unit_inverse(f)


def _drop_top(f: TruncSeries, k: int = 1) -> TruncSeries:
    """Reframe f at degree D - k.  psi recovers binomial coordinates from
    the top coefficient downward, so a series whose top k coefficients are
    untrustworthy must be cut before psi sees it."""
    if k <= 0 or f.D - k < 0:
        return f
    return TruncSeries(f.ring, f.coeffs[: f.D + 1 - k], f.D - k)


def _level_guard(D: int, p: int, level: int) -> int:
    """Membership tolerance for mellin_inverse at a given level: a degree-D
    truncation certifies psi = 0 to about (D+1)/((p-1)p^(level-1)) digits
    at the p^level-th roots of unity.  The callers here have already
    checked psi-membership on the series, so this is a numeric guard, not
    the primary certificate."""
    return max((D + 1) // ((p - 1) * p ** (level - 1)) - 2, 1)


def _psi_matches(f: TruncSeries, target, p: int, tol: int, slack: int = 0) -> bool:
    """psi(f) ~ target under the graded certificate of a truncation: the
    dropped tail enters coefficient m through (zeta - 1)-powers, so it is
    good to about (D + 1 - p*m)/(p - 1) digits only.  slack loosens the
    comparison further, e.g. by the valuation of a phi-eigenvalue that
    scales the target below the integral range."""
    ps = psi(f)
    for m in range(f.D // p + 1):
        need = min(tol, (f.D + 1 - p * m) // (p - 1) - 2 - slack)
        if need <= 0:
            continue
        cm = ps.coeffs[m]
        ok = cm.is_zero_to(need) if target is None else cm.agrees_to(target.coeffs[m], need)
        if not ok:
            return False
    return True


# ---------------------------------------------------------------------------
# The Coleman norm operator check
# ---------------------------------------------------------------------------


def _compose_linear(f: TruncSeries, shift, unit, R):
    """Coefficients of f(shift + unit*pi) in the ring R, by exact binomial
    expansion: out[m] = unit^m sum_{k>=m} f_k C(k,m) shift^(k-m)."""
    out = []
    upow = R.one()
    for m in range(f.D + 1):
        acc = R.zero()
        spow = R.one()
        for k in range(m, f.D + 1):
            c = f.coeffs[k] * comb(k, m)
            if not c.is_exact_zero():
                acc = acc + spow * c
            spow = spow * shift
        out.append(acc * upow)
        upow = upow * unit
    return out


def _mul_lists(xs, ys, D, zero):
    out = [zero] * (D + 1)
    for i, x in enumerate(xs):
        if x.is_exact_zero():
            continue
        for k, y in enumerate(ys[: D + 1 - i]):
            if not y.is_exact_zero():
                out[i + k] = out[i + k] + x * y
    return out


def check_norm_compatible(g: ColemanSeries, ctx: GammaContext, digits=None) -> bool:
    """Does the Coleman norm operator fix g?

    N(g)((1+pi)^p - 1) = prod over zeta^p = 1 of g(zeta(1+pi) - 1), so
    instead of inverting the phi-substitution (the p-th-root step, which
    costs d digits at degree d) we compare the mu_p-product against
    phi(g) directly; phi is injective, so the statements agree.  Exact
    for polynomial g of degree <= D.  A passing check also asserts the
    classical consequence psi(dlog g) = dlog g on its trust window, and
    records the verdict on the flag.
    """
    f = g.series
    tol = ctx.N if digits is None else digits
    R = cyclo_ring(ctx.p, 1, ctx.N_work)
    zeta = R.zeta()
    prod = None
    for u in range(ctx.p):
        zu = zeta**u
        comp = _compose_linear(f, zu - R.one(), zu, R)
        prod = comp if prod is None else _mul_lists(prod, comp, f.D, R.zero())
    ph = phi(f)
    ok = all(
        R.as_scalar(prod[m]).agrees_to(ph.coeffs[m], tol) for m in range(f.D + 1)
    )
    if ok:
        dl = _drop_top(dlog(g))
        if not _psi_matches(dl, dl, ctx.p, tol):
            raise ArithmeticError("norm check passed but dlog is not psi-fixed")
    g.norm_compatible = ok
    return ok


# ---------------------------------------------------------------------------
# The regulator and the big exponential
# ---------------------------------------------------------------------------


class RegulatorOutput(NamedTuple):
    """Regulator image: the finite-level measure, the exact psi = 0 series
    it projects, and the rank-one D_cris bookkeeping."""

    measure: FiniteMeasure
    series: TruncSeries
    dcris_basis_tag: str
    t_shift: int


def cyclo_regulator(
    y: TruncSeries,
    ctx: GammaContext,
    level: int,
    phi_scalar=None,
    dcris_basis_tag: str = "e",
    t_shift: int = 0,
    digits=None,
) -> RegulatorOutput:
    """The measure behind (1 - lambda*phi)y for a psi-fixed y.

    phi_scalar is the phi-eigenvalue lambda on the rank-one D_cris factor
    (default 1, the trivial-coefficient case), so the precondition is
    psi(y) = lambda*y on psi's trust window.  Character values of the
    output are exact through the series (moments and twisted restriction);
    through the level-k measure they are Riemann sums over unit cosets
    mod p^k, hence good to about k digits only.
    """
    tol = ctx.N if digits is None else digits
    # the top coefficient of y is untrusted when y came through dlog
    yt = _drop_top(y)
    slack = 0
    if phi_scalar is not None:
        lam = (
            phi_scalar
            if hasattr(phi_scalar, "val")
            else ctx.ring.from_fraction(Fraction(phi_scalar))
        )
        if not lam.is_exact_zero():
            slack = max(0, -lam.val)
    target = yt if phi_scalar is None else yt.scale(phi_scalar)
    if not _psi_matches(yt, target, ctx.p, tol, slack):
        raise ValueError("not psi-fixed")
    x = y - (phi(y) if phi_scalar is None else phi(y).scale(phi_scalar))
    measure = mellin_inverse(x, ctx, level, tolerance=_level_guard(x.D, ctx.p, level))
    return RegulatorOutput(measure, x, dcris_basis_tag, t_shift)


def big_exponential(z, h: int, phi_scalar=None, D=None, digits=None) -> TruncSeries:
    """(ell_{h-1} after ... after ell_0)(1 - lambda*phi)^{-1} on the Mellin
    image of z.

    z is an IwasawaElt (sent through Mellin at degree D) or an already
    psi = 0 TruncSeries.  Blocked directions are checked first: for each
    0 <= k <= h where 1 - lambda*p^k is not certifiably invertible, the
    k-th moment of the image must vanish; the solver then normalizes the
    obstructed coordinate to 0, so the output is canonical modulo the
    torsion the ell-product kills.  Valid to degree D - h.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    if isinstance(z, IwasawaElt):
        if D is None:
            raise ValueError("degree D is required for measure input")
        zt = mellin(z, D)
    else:
        zt = z
    ring = zt.ring
    lam = 1 if phi_scalar is None else phi_scalar
    if isinstance(lam, int):
        lam = PadicScalar.from_int(ring.p, lam, ring.N)
    elif isinstance(lam, Fraction):
        lam = PadicScalar.from_fraction(ring.p, lam, ring.N)
    tol = (ring.N // 2) if digits is None else digits
    one_s = PadicScalar.from_int(ring.p, 1, ring.N)
    offending = []
    g = zt
    for k in range(h + 1):
        factor = one_s - lam * PadicScalar.from_int(ring.p, ring.p**k, ring.N)
        if factor.unit == 0 and not g.coeffs[0].is_zero_to(tol):
            offending.append(k)
        g = deriv(g)
    if offending:
        raise NonconvergentError(f"Delta obstruction nonzero at k = {offending}")
    w = solve_one_minus_phi(zt, eigenvalue=phi_scalar)
    for j in range(h):
        w = ell_apply(j, w)
    return w


def deriv_inverse(f: TruncSeries, ctx: GammaContext, level: int, digits=None):
    """partial^{-1} on the psi = 0 part: Mellin down to a finite level,
    divide the mass at gamma_a by a (that is Tw_{chi^{-1}}), Mellin up.

    Exact when f is the image of a measure supported on canonical unit
    representatives mod p^level; a truncated infinite series comes back
    as its level-p^level approximation.
    """
    tol = ctx.N if digits is None else digits
    ft = _drop_top(f)
    if not _psi_matches(ft, None, ctx.p, tol):
        raise ValueError("not in psi=0 kernel")
    mu = mellin_inverse(f, ctx, level, tolerance=_level_guard(f.D, ctx.p, level))
    twisted = FiniteMeasure(
        ctx,
        level,
        {a: v * ctx.ring.from_int(a).inverse() for a, v in mu.masses.items()},
    )
    return twisted.mellin(f.D)


# ---------------------------------------------------------------------------
# Interpolation prefactors and the Theta/epsilon assembly
# ---------------------------------------------------------------------------


class Prefactor(NamedTuple):
    """Gamma*(1+j) together with the branch data of the interpolation
    formula at eta: an eps factor at ramified eta, or the Euler-factor
    ratio (with badness flags) at unramified eta."""

    gamma_star: Fraction
    eps: object
    operator_value: object
    flags: tuple
    description: str


def interpolation_prefactor(M: CrysModule, eta, ctx: GammaContext) -> Prefactor:
    """The scalar in front of the interpolation formula at eta.

    Ramified eta (conductor p^n, n >= 1): Gamma*(1+j) times
    eps(eta^{-1}, -xi) with det(phi)^n folded in.  Unramified eta:
    Gamma*(1+j) and the ratio det(1 - p^j phi)/det(1 - p^(-1-j) phi^(-1));
    a vanishing factor does not raise, it flags the value as needing the
    strong/derivative form instead.
    """
    if M.d != 1:
        raise ValueError("rank-one modules only")
    gs = gamma_star(1 + eta.j)
    if eta.conductor >= 1:
        e = eps_crystalline_twist(M, eta.inverse(), ctx, sign=-1)
        return Prefactor(
            gs, e, None, (), "Gamma*(1+j) * eps(eta^-1, -xi) * det(phi)^n"
        )
    ops = euler_operators(M, eta.j)
    flags = []
    if ops.bad_one:
        flags.append(FLAG_BAD_ONE)
    if ops.bad_pinv:
        flags.append(FLAG_BAD_PINV)
    value = None if flags else ops.det_one_minus_phi / ops.det_one_minus_pinv
    return Prefactor(
        gs,
        None,
        value,
        tuple(flags),
        "Gamma*(1+j) * (1 - p^j phi)/(1 - p^(-1-j) phi^(-1))",
    )


class ThetaEps(NamedTuple):
    """Theta = measure/ell(V) plus the assembled epsilon-scalar data."""

    theta: FractionElt
    eps_scalar: FractionElt
    eps_dr: object


def measure_as_iwasawa(mu: FiniteMeasure) -> IwasawaElt:
    """Embed a finite-level measure as a combination of group-likes; the
    honest-integer support makes this exact at working precision."""
    out = mu.ctx.zero()
    for a, v in mu.masses.items():
        out = out + mu.ctx.group_like(a).scale(v)
    return out


def theta_and_eps_scalar(
    M: CrysModule, reg: RegulatorOutput, ctx: GammaContext, period=None
) -> ThetaEps:
    """Theta = measure/ell(V) (rank one: the determinant is the measure
    itself) and the epsilon scalar (-gamma_{-1})^d (-1)^m Theta eps_dR.

    The t^m tag and any unramified period stay on the returned eps_dr
    factor rather than being multiplied into the Iwasawa fraction.
    """
    if M.d != 1:
        raise ValueError("rank-one modules only")
    num = measure_as_iwasawa(reg.measure)
    ellv = ell_of_rep(ctx, M.weights)
    theta = FractionElt(num * ellv.den, ellv.num)
    front = (-ctx.gamma_minus_one()).scale((-1) ** (M.m % 2))
    eps_scalar = FractionElt(theta.num * front, theta.den)
    return ThetaEps(
        theta, eps_scalar, eps_dr_scalar(M, period=period, N=ctx.N_work)
    )
