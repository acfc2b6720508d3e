"""Command-line front end: config resolution, check subcommands, reports.

Subcommands cover the exact identity suite, Kubota-Leopoldt moments of
the cyclotomic-unit regulator, Gauss-sum laws, crystalline epsilon
bookkeeping, the regulator round trip, and the Theta/epsilon assembly.
Reports are machine readable and byte-identical across runs for a fixed
(config, seed): scalars are rendered as little-endian base-p digit
arrays, randomness is derived from the seed and the check id, and check
assembly is ordered by id even when a worker pool ran the checks.
"""

import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction
from math import inf
from typing import NamedTuple

import click

from .crystalline import CrysModule, random_module, unramified_twist
from .epsilon import eps_crystalline_twist, gauss_norm_check, gauss_sum
from .iwasawa_algebra import (
    DeRhamChar,
    FiniteMeasure,
    FractionElt,
    IwasawaElt,
    ell_element,
    ell_of_rep,
    evaluate_measure_series,
    gamma_context,
    involution,
    mellin,
    mu_element,
    twist,
)
from .oracle import bernoulli
from .padic_core import ExtElt, PadicScalar, _is_prime
from .regulator import (
    big_exponential,
    check_norm_compatible,
    cyclo_regulator,
    cyclotomic_unit,
    dlog,
    theta_and_eps_scalar,
)
from .series import TruncSeries, deriv, ell_apply, phi, psi, solve_one_minus_phi

_CONFIG_KEYS = ("p", "N", "D", "D_T", "level", "seed", "format", "jobs")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Run-wide parameters shared by every subcommand."""

    p: int = 5
    N: int = 30
    D: int = 64
    D_T: int = 32
    level: int = 3
    seed: int = 0
    format: str = "json"
    jobs: int = 1

    def validate(self) -> None:
        if self.p == 2 or not _is_prime(self.p):
            raise ValueError("p must be an odd prime")
        for name in ("N", "D", "D_T"):
            if getattr(self, name) < 4:
                raise ValueError(f"{name} must be >= 4")
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if self.format not in ("json", "text"):
            raise ValueError("format must be json or text")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in _CONFIG_KEYS}


def resolve_config(overrides: dict) -> RunConfig:
    """Defaults, then the IWK_CONFIG JSON file, then explicit flags."""
    values = {f.name: f.default for f in fields(RunConfig)}
    path = os.environ.get("IWK_CONFIG")
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"IWK_CONFIG: {exc}")
        if not isinstance(data, dict):
            raise ValueError("IWK_CONFIG: expected a JSON object")
        unknown = sorted(set(data) - set(values))
        if unknown:
            raise ValueError(f"IWK_CONFIG: unknown fields {unknown}")
        values.update(data)
    values.update({k: v for k, v in overrides.items() if v is not None})
    config = RunConfig(**values)
    config.validate()
    return config


# ---------------------------------------------------------------------------
# Checks and reports
# ---------------------------------------------------------------------------


class Check(NamedTuple):
    """One report row: the identity checked and how the two sides compare."""

    id: str
    anchor: str
    status: str
    lhs: object
    rhs: object
    precision_attained: int


def _attained(diff_val, cap: int) -> int:
    if diff_val == inf:
        return cap
    return max(0, min(int(diff_val), cap))


def _digit_list(x: PadicScalar, count: int) -> list[int]:
    """Little-endian base-p digits of a p-adic integer, zero-padded."""
    n = count if x.is_exact_zero() else int(min(count, x.abs_prec))
    return x.digits(n)


def _render(value, count: int):
    """JSON image of a comparison side; deterministic for a fixed config."""
    if isinstance(value, PadicScalar):
        if value.is_exact_zero():
            return {"val": "inf", "digits": []}
        n = int(min(count, value.prec))
        unit = value.unit % value.p**n
        return {
            "val": value.val,
            "digits": [unit // value.p**i % value.p for i in range(n)],
        }
    if isinstance(value, ExtElt):
        p = value.p
        coords = value.residue_coords(count)
        return {"coords": [[r // p**i % p for i in range(count)] for r in coords]}
    if isinstance(value, Fraction):
        return str(value)
    return value


def emit_report(results, config: RunConfig = None) -> bytes:
    """Stable-key-order JSON; byte-identical for a fixed (config, seed)."""
    doc = {}
    if config is not None:
        doc["config"] = config.as_dict()
    doc["checks"] = [
        {
            "id": c.id,
            "anchor": c.anchor,
            "status": c.status,
            "lhs": c.lhs,
            "rhs": c.rhs,
            "precision_attained": c.precision_attained,
        }
        for c in results
    ]
    passed = sum(1 for c in results if c.status == "pass")
    doc["summary"] = {"pass": passed, "fail": len(results) - passed}
    return (json.dumps(doc, indent=2) + "\n").encode()


def _text_report(results, config: RunConfig) -> str:
    lines = [" ".join(f"{k}={v}" for k, v in config.as_dict().items())]
    for c in results:
        lines.append(
            f"[{c.status.upper()}] {c.id}  {c.anchor}  "
            f"({c.precision_attained} digits)"
        )
    passed = sum(1 for c in results if c.status == "pass")
    lines.append(f"pass={passed} fail={len(results) - passed}")
    return "\n".join(lines) + "\n"


def _run_checks(thunks, jobs: int) -> list:
    """Evaluate (id, anchor, thunk) triples; a crashed check is a failure.

    The pool fans out independent pure-Python checks; assembly stays
    single-threaded and sorted by id, so reports do not depend on
    completion order.
    """

    def run(item):
        cid, anchor, thunk = item
        try:
            ok, lhs, rhs, attained = thunk()
        except Exception as exc:
            ok, lhs, rhs, attained = False, f"error: {exc}", "no exception", 0
        return Check(cid, anchor, "pass" if ok else "fail", lhs, rhs, attained)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(run, thunks))
    else:
        out = [run(t) for t in thunks]
    return sorted(out, key=lambda c: c.id)


def _rng(config: RunConfig, check_id: str) -> random.Random:
    # string seeds hash through sha512, stable across processes
    return random.Random(f"{config.seed}:{check_id}")


def _poly_elt(ctx, rng, deg: int = 3) -> IwasawaElt:
    comps = [
        TruncSeries.from_ints(
            ctx.ring, [rng.randrange(ctx.p**3) for _ in range(deg + 1)], ctx.D_T
        )
        for _ in range(ctx.p - 1)
    ]
    return IwasawaElt(ctx, comps)


def _kl_oracle(p: int, c: int, j: int) -> Fraction:
    """(1 - p^j)(c^{j+1} - 1) B_{j+1} / (j+1), the exact moment value."""
    return Fraction(1 - p**j) * (c ** (j + 1) - 1) * bernoulli(j + 1) / (j + 1)


# ---------------------------------------------------------------------------
# Check builders
# ---------------------------------------------------------------------------


def _suite_thunks(config: RunConfig, trials: int):
    ctx = gamma_context(config.p, config.N, config.D_T)
    N = config.N
    # mellin-side identities stay inside the T-window, where polynomial
    # components map exactly
    D_mel = min(config.D, config.D_T)

    def ell_involution():
        for j in range(-4, 5):
            lhs = involution(ell_element(ctx, j))
            rhs = -ell_element(ctx, -j)
            if not lhs.agrees_to(rhs, N):
                return False, f"iota(ell_{j})", f"-ell_{-j}", 0
        return True, "iota(ell_j), |j| <= 4", "-ell_{-j}", N

    def mu_chain():
        # twisted infinite series certify coefficient m to D_T + 1 - m
        # digits, so the ladder is compared on a shortened window
        digits = max(4, min(N, config.D_T - 18))
        window = min(10, config.D_T - 8)
        for n in range(-3, 3):
            lhs = mu_element(ctx, n + 1)
            rhs = ell_element(ctx, 0) * twist(mu_element(ctx, n), -1)
            if not lhs.cross_agrees(rhs, digits, up_to_degree=window):
                return False, f"mu_{n + 1}", f"ell_0 * twist(mu_{n}, -1)", 0
        return True, "mu_{n+1}, |n| <= 3", "ell_0 * twist(mu_n, chi^-1)", digits

    def duality():
        # long ell-products burn absolute digits, so budget extra context
        deep = gamma_context(config.p, N + 12, config.D_T)
        rng = _rng(config, "03")
        for _ in range(max(1, trials // 2)):
            d = rng.randrange(1, 4)
            weights = sorted(rng.randrange(-1, 3) for _ in range(d))
            dual = [1 - n for n in weights]
            lhs = ell_of_rep(deep, weights) * involution(ell_of_rep(deep, dual))
            sign = (-1) ** (sum(dual) % 2)
            rhs = FractionElt(deep.one().scale(deep.ring.from_int(sign)), deep.one())
            for _k in range(d):
                rhs = rhs * ell_element(deep, 0)
            if not lhs.cross_agrees(rhs, N):
                return False, f"failed at weights {weights}", "signed ell_0^d", 0
        return True, "ell(V) * iota(ell(V*(1)))", "(-1)^(sum dual) * ell_0^d", N

    def mellin_twist():
        rng = _rng(config, "04")
        for _ in range(trials):
            x = _poly_elt(ctx, rng)
            lhs = mellin(twist(x, 1), D_mel)
            rhs = deriv(mellin(x, D_mel))
            if not lhs.agrees_to(rhs, N, up_to_degree=D_mel - 1):
                return False, "mellin(twist(x, 1))", "deriv(mellin(x))", 0
        return True, f"mellin(twist(x, 1)), {trials} trials", "deriv(mellin(x))", N

    def ell_zero():
        rng = _rng(config, "05")
        for _ in range(trials):
            x = _poly_elt(ctx, rng)
            lhs = mellin(ell_element(ctx, 0) * x, D_mel)
            rhs = ell_apply(0, mellin(x, D_mel))
            if not lhs.agrees_to(rhs, N, up_to_degree=D_mel - 1):
                return False, "mellin(ell_0 * x)", "t d/dt mellin(x)", 0
        return True, f"mellin(ell_0 * x), {trials} trials", "t d/dt mellin(x)", N

    def psi_phi():
        rng = _rng(config, "06")
        deg = config.D // config.p
        for _ in range(trials):
            f = TruncSeries.from_ints(
                ctx.ring,
                [rng.randrange(-50, 51) for _ in range(deg + 1)],
                config.D,
            )
            if not psi(phi(f)).agrees_to(f, N):
                return False, "psi(phi(f))", "f", 0
        return True, f"psi(phi(f)), degree <= D // p, {trials} trials", "f", N

    def projection():
        rng = _rng(config, "07")
        for _ in range(trials):
            f = TruncSeries.from_ints(
                ctx.ring, [rng.randrange(-9, 10) for _ in range(4)], config.D
            )
            g = TruncSeries.from_ints(
                ctx.ring, [rng.randrange(-9, 10) for _ in range(3)], config.D
            )
            if not psi(f * phi(g)).agrees_to(psi(f) * g, N):
                return False, "psi(f * phi(g))", "psi(f) * g", 0
        return True, f"psi(f * phi(g)), {trials} trials", "psi(f) * g", N

    return [
        ("01-ell-involution", "involution sends ell_j to -ell_{-j}", ell_involution),
        ("02-mu-chain", "mu_{n+1} = ell_0 * twist(mu_n, chi^{-1})", mu_chain),
        (
            "03-ell-duality",
            "ell(V) * iota(ell(V*(1))) is a signed power of ell_0",
            duality,
        ),
        (
            "04-mellin-twist",
            "Mellin intertwines the chi-twist with the derivation",
            mellin_twist,
        ),
        ("05-ell-zero-action", "ell_0 acts as t d/dt on the Mellin side", ell_zero),
        ("06-psi-phi", "psi is a left inverse of phi", psi_phi),
        ("07-projection", "psi(f * phi(g)) = psi(f) * g", projection),
    ]


def _eps_thunks(config: RunConfig, weights, j: int, tame: int):
    ctx = gamma_context(config.p, config.N, config.D_T)
    N = config.N
    d = len(weights)

    def module(cid):
        return random_module(config.p, ctx.N_work, weights, _rng(config, cid))

    def det_val():
        m = module("01")
        ok = m.det_phi.val == -m.m
        return ok, int(m.det_phi.val), -m.m, N if ok else 0

    def m_shift():
        m = module("02")
        w, _ = unramified_twist(m, DeRhamChar(config.p, j))
        ok = w.m == m.m + j * d
        return ok, w.m, m.m + j * d, N if ok else 0

    def p_power():
        m = module("03")
        eta = DeRhamChar(config.p, j, tame_index=tame)
        e = eps_crystalline_twist(m, eta, ctx)
        n = eta.conductor
        want = d * (-n * j) + n * int(m.det_phi.val)
        ok = e.p_power == want
        return ok, e.p_power, want, N if ok else 0

    def front_sign():
        front = ctx.gamma_minus_one()
        for _ in range(d - 1):
            front = front * ctx.gamma_minus_one()
        lhs = twist(front, j)
        rhs = front.scale(ctx.ring.from_int((-1) ** (j * d % 2)))
        ok = lhs.agrees_to(rhs, N)
        side = f"twist(gamma_-1^{d}, {j})"
        return ok, side, f"(-1)^(j*d) * gamma_-1^{d}", N if ok else 0

    return [
        ("01-det-valuation", "v_p(det phi) equals minus the weight sum", det_val),
        ("02-m-shift", "the weight sum shifts by j*d under a chi^j twist", m_shift),
        (
            "03-p-power",
            "epsilon p-power folds conductor, twist, and det phi",
            p_power,
        ),
        (
            "04-front-sign",
            "the gamma_-1 front factor scales by (-1)^(j*d) under twisting",
            front_sign,
        ),
    ]


def _regulator_thunks(config: RunConfig, c: int):
    ctx = gamma_context(config.p, config.N, config.D_T)
    N, D = config.N, config.D
    cache = {}

    def source():
        if "y" not in cache:
            cache["y"] = dlog(cyclotomic_unit(ctx.ring, c, D))
        return cache["y"]

    def norm_check():
        g = cyclotomic_unit(ctx.ring, c, D)
        ok = check_norm_compatible(g, ctx)
        return ok, "N(g_c)", "g_c", N if ok else 0

    def moments():
        reg = cyclo_regulator(source(), ctx, 1)
        window = N - 5
        worst = window
        for j in range(1, 4):
            got = evaluate_measure_series(reg.series, DeRhamChar(config.p, j), ctx)
            want = _kl_oracle(config.p, c, j)
            att = _attained((got - ctx.ring.from_fraction(want)).val, window)
            worst = min(worst, att)
            if att < window:
                return False, _render(got, window), str(want), att
        return True, "moments j = 1..3", "Bernoulli recurrence", worst

    def measure_route():
        # level-L character values are Riemann sums over unit cosets mod
        # p^L, good to about L digits
        L = min(config.level, 2)
        reg = cyclo_regulator(source(), ctx, L)
        for j in (1, 2):
            got = reg.measure.evaluate_char(DeRhamChar(config.p, j))
            want = evaluate_measure_series(reg.series, DeRhamChar(config.p, j), ctx)
            if not got.agrees_to(want, L):
                return False, _render(got, L), _render(want, L), 0
        return True, f"level-{L} measure values", "series moments", L

    def omega_ell():
        y = source()
        reg = cyclo_regulator(y, ctx, 1)
        for h in (1, 2):
            got = big_exponential(reg.series, h)
            want = y
            for k in range(h):
                want = ell_apply(k, want)
            if not got.agrees_to(want, N, up_to_degree=D - 1 - h):
                return False, f"Omega_h(L(y)) at h = {h}", "ell chain on y", 0
        return True, "Omega_h(L(y)), h in {1, 2}", "ell_{h-1}..ell_0 y", N

    return [
        ("01-norm-compatible", "the Coleman norm operator fixes g_c", norm_check),
        (
            "02-moments",
            "regulator moments match the Bernoulli recurrence",
            moments,
        ),
        (
            "03-measure-route",
            "the finite-level measure is a Riemann sum for the moments",
            measure_route,
        ),
        (
            "04-omega-ell",
            "the big exponential inverts the regulator up to the ell chain",
            omega_ell,
        ),
    ]


def _theta_thunks(config: RunConfig):
    ctx = gamma_context(config.p, config.N, config.D_T)
    # group-likes held as degree-D_T polynomials carry a bounded digit
    # budget at a tame character, so the scalar comparisons use a floor
    digits = min(config.N, 8)
    level = min(config.level, 2)
    cache = {}

    def reg():
        if "r" not in cache:
            # total mass 0 so (1 - phi)^{-1} has no degree-0 obstruction
            mu0 = FiniteMeasure(
                ctx, level, {1: ctx.ring.from_int(1), 2: ctx.ring.from_int(-1)}
            )
            y = solve_one_minus_phi(mu0.mellin(config.D))
            cache["r"] = cyclo_regulator(y, ctx, level)
        return cache["r"]

    def qp_module():
        return CrysModule(config.p, ctx.N_work, [[ctx.ring.from_int(1)]], [0])

    def tate_module():
        one = PadicScalar(config.p, -1, 1, ctx.N_work)
        return CrysModule(config.p, ctx.N_work, [[one]], [1])

    def qp_theta():
        th = theta_and_eps_scalar(qp_module(), reg(), ctx)
        for j in (1, 2):
            lhs = th.theta.evaluate_char(DeRhamChar(config.p, j))
            rhs = reg().measure.evaluate_char(DeRhamChar(config.p, j))
            if not lhs.agrees_to(rhs, digits):
                return False, _render(lhs, digits), _render(rhs, digits), 0
        ok = th.eps_dr.t_exponent == 0
        return ok, "Theta at chi^j, j in {1, 2}", "measure values", digits

    def tate_theta():
        th = theta_and_eps_scalar(tate_module(), reg(), ctx)
        for j in (1, 2):
            lhs = th.theta.evaluate_char(DeRhamChar(config.p, j))
            rhs = reg().measure.evaluate_char(DeRhamChar(config.p, j)) / j
            if not lhs.agrees_to(rhs, digits):
                return False, _render(lhs, digits), _render(rhs, digits), 0
        ok = th.eps_dr.t_exponent == 1
        return ok, "Theta at chi^j, j in {1, 2}", "measure values / j", digits

    def eps_sign():
        th = theta_and_eps_scalar(tate_module(), reg(), ctx)
        for j in (1, 2):
            sign = (-1) ** (j + 1) * (-1)
            lhs = th.eps_scalar.evaluate_char(DeRhamChar(config.p, j))
            rhs = th.theta.evaluate_char(DeRhamChar(config.p, j)) * sign
            if not lhs.agrees_to(rhs, digits):
                return False, _render(lhs, digits), _render(rhs, digits), 0
        return True, "eps scalar at chi^j", "(-gamma_-1)(-1)^m * Theta", digits

    def gamma_twist():
        gm = ctx.gamma_minus_one()
        for j in (1, 2, 3, 4):
            if not twist(gm, j).agrees_to(gm.scale((-1) ** j), config.N):
                return False, f"twist(gamma_-1, {j})", "(-1)^j gamma_-1", 0
        return True, "twist(gamma_-1, j), j <= 4", "(-1)^j gamma_-1", config.N

    return [
        ("01-qp-theta", "trivial weights: Theta is the measure itself", qp_theta),
        ("02-tate-theta", "Tate twist: Theta divides the measure by j", tate_theta),
        (
            "03-eps-sign",
            "the eps scalar carries (-gamma_-1) and the (-1)^m sign",
            eps_sign,
        ),
        (
            "04-gamma-twist-sign",
            "gamma_-1 scales by (-1)^j under the chi^j twist",
            gamma_twist,
        ),
    ]


# ---------------------------------------------------------------------------
# Click wiring
# ---------------------------------------------------------------------------


def _config_options(fn):
    opts = [
        click.option("--p", type=int, default=None, help="odd prime (default 5)"),
        click.option(
            "--prec", type=int, default=None, help="p-adic precision N (default 30)"
        ),
        click.option(
            "--deg", type=int, default=None, help="pi-series degree D (default 64)"
        ),
        click.option(
            "--tdeg", type=int, default=None, help="T-series degree D_T (default 32)"
        ),
        click.option(
            "--level", type=int, default=None, help="finite-level cap (default 3)"
        ),
        click.option(
            "--seed", type=int, default=None, help="randomized-trial seed (default 0)"
        ),
        click.option(
            "--format",
            "fmt",
            type=click.Choice(("json", "text")),
            default=None,
            help="report format (default json)",
        ),
        click.option(
            "--jobs",
            type=int,
            default=None,
            help="worker threads for independent checks (default 1)",
        ),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_config(flags: dict) -> RunConfig:
    overrides = {
        "p": flags.get("p"),
        "N": flags.get("prec"),
        "D": flags.get("deg"),
        "D_T": flags.get("tdeg"),
        "level": flags.get("level"),
        "seed": flags.get("seed"),
        "format": flags.get("fmt"),
        "jobs": flags.get("jobs"),
    }
    try:
        return resolve_config(overrides)
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _finish(click_ctx, results, config: RunConfig):
    if config.format == "json":
        click.echo(emit_report(results, config).decode(), nl=False)
    else:
        click.echo(_text_report(results, config), nl=False)
    click_ctx.exit(0 if all(c.status == "pass" for c in results) else 1)


@click.group()
def main():
    """Exact checks for the p-adic operator engine.

    Shared flags resolve a RunConfig; the IWK_CONFIG environment
    variable may name a JSON file with the same fields, and explicit
    flags override it.  Exit status: 0 all checks pass, 1 a check
    failed, 2 usage error.
    """


@main.command()
@_config_options
@click.option(
    "--trials",
    type=int,
    default=5,
    show_default=True,
    help="randomized trials per identity family",
)
@click.pass_context
def suite(click_ctx, trials, **flags):
    """Run the exact identity suite."""
    config = _build_config(flags)
    if trials < 1:
        raise click.UsageError("trials must be >= 1")
    results = _run_checks(_suite_thunks(config, trials), config.jobs)
    _finish(click_ctx, results, config)


@main.command()
@_config_options
@click.option(
    "--c",
    "c",
    type=int,
    default=2,
    show_default=True,
    help="cyclotomic-unit parameter, prime to p",
)
@click.option(
    "--j", "j", type=int, default=1, show_default=True, help="moment index >= 1"
)
@click.pass_context
def zeta(click_ctx, c, j, **flags):
    """Kubota-Leopoldt moment of the cyclotomic-unit regulator."""
    config = _build_config(flags)
    if j < 1:
        raise click.UsageError("j must be >= 1")
    if c % config.p == 0 or c < 2:
        raise click.UsageError("c must be >= 2 and prime to p")
    ctx = gamma_context(config.p, config.N, config.D_T)
    window = config.N - 5
    try:
        reg = cyclo_regulator(dlog(cyclotomic_unit(ctx.ring, c, config.D)), ctx, 1)
        value = evaluate_measure_series(reg.series, DeRhamChar(config.p, j), ctx)
    except (ArithmeticError, ValueError) as exc:
        raise click.ClickException(f"pipeline failed: {exc}")
    oracle = _kl_oracle(config.p, c, j)
    match = value.agrees_to(ctx.ring.from_fraction(oracle), window)
    if config.format == "json":
        payload = {
            "value_digits": _digit_list(value, window),
            "oracle": str(oracle),
            "match": match,
        }
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(f"zeta: p={config.p} c={c} j={j} oracle={oracle} match={match}")
    click_ctx.exit(0 if match else 1)


@main.command()
@_config_options
@click.option(
    "--tame",
    type=int,
    default=1,
    show_default=True,
    help="tame index a of eta = omega^a * (wild part)",
)
@click.option(
    "--wild-exp",
    type=int,
    default=1,
    show_default=True,
    help="wild exponent when the conductor exceeds p",
)
@click.pass_context
def gauss(click_ctx, tame, wild_exp, **flags):
    """Gauss sum of a finite character and its norm law.

    Here --level is the conductor exponent: the character has conductor
    p^level (default 1).
    """
    config = _build_config(flags)
    n = flags.get("level") if flags.get("level") is not None else 1
    if n == 1 and tame % (config.p - 1) == 0:
        raise click.UsageError("conductor p needs a nontrivial tame index")
    try:
        eta = DeRhamChar(
            config.p,
            0,
            tame_index=tame,
            wild_level=n - 1,
            wild_exponent=wild_exp if n >= 2 else 0,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    ctx = gamma_context(config.p, config.N, config.D_T)
    tau = gauss_sum(eta, ctx)
    _, _, ok = gauss_norm_check(eta, ctx)
    oracle = eta.sign_at_minus_one() * config.p**n
    if config.format == "json":
        payload = {
            "tau_coords": _render(tau.cyclo_part, config.N)["coords"],
            "oracle": str(oracle),
            "match": ok,
        }
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(
            f"gauss: p={config.p} tame={tame} level={n} "
            f"tau*conj={oracle} match={ok}"
        )
    click_ctx.exit(0 if ok else 1)


@main.command()
@_config_options
@click.option(
    "--weights",
    default="0,1",
    show_default=True,
    help="comma-separated Hodge-Tate weights",
)
@click.option(
    "--j", "j", type=int, default=1, show_default=True, help="twist exponent"
)
@click.option(
    "--tame", type=int, default=1, show_default=True, help="tame index of the twist"
)
@click.pass_context
def eps(click_ctx, weights, j, tame, **flags):
    """Crystalline epsilon bookkeeping on a seeded random module."""
    config = _build_config(flags)
    try:
        wlist = [int(w) for w in weights.split(",")]
    except ValueError:
        raise click.UsageError("weights must be comma-separated integers")
    if tame % (config.p - 1) == 0:
        raise click.UsageError("the twist needs a nontrivial tame index")
    results = _run_checks(_eps_thunks(config, wlist, j, tame), config.jobs)
    _finish(click_ctx, results, config)


@main.command()
@_config_options
@click.option(
    "--c",
    "c",
    type=int,
    default=2,
    show_default=True,
    help="cyclotomic-unit parameter, prime to p",
)
@click.pass_context
def regulator(click_ctx, c, **flags):
    """Regulator pipeline: norm check, moments, round trip."""
    config = _build_config(flags)
    if c % config.p == 0 or c < 2:
        raise click.UsageError("c must be >= 2 and prime to p")
    results = _run_checks(_regulator_thunks(config, c), config.jobs)
    _finish(click_ctx, results, config)


@main.command()
@_config_options
@click.pass_context
def theta(click_ctx, **flags):
    """Theta and epsilon-scalar assembly on stock rank-one modules."""
    config = _build_config(flags)
    results = _run_checks(_theta_thunks(config), config.jobs)
    _finish(click_ctx, results, config)


if __name__ == "__main__":
    main()
