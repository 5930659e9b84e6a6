"""Deficit reports for the sharp inequality family.

Every inequality in the family has the shape lhs <= rhs with rhs built
from a diagonal quadratic form and lhs from Lebesgue norms (or the
relative entropy at the q = 2 endpoint).  deficit() evaluates both
sides for a concrete zonal field and returns a report whose deficit
(rhs - lhs) must be nonnegative up to quadrature roundoff.

Also here: kernel eigenvalues by quadrature against the closed form
(the classical Funk-Hecke identity), the sharpness probe along the
1 + eps Y_1 family, and the pointwise Taylor remainder bounds used in
the stability arguments.
"""

import json
from dataclasses import dataclass

import numpy as np

from .field import (ZonalField, default_rule, descriptor_of, entropy2,
                    field_from_descriptor, is_constant, lq_norm,
                    quadratic_form, quotient, synthesize, analyze)
from .specfun import gegenbauer, gegenbauer_at_one, gauss_jacobi, log_gamma, sphere_rule
from .spectrum import derive_params, gamma_k, operator_eigenvalue

Q_ENTROPY_WINDOW = 1e-8


@dataclass(frozen=True)
class InequalityReport:
    kind: str
    n: int
    s: float
    q: float
    lhs: float
    rhs: float
    deficit: float
    relative_deficit: float
    field_descriptor: str
    equality_case: bool = False


REPORT_HEADER = "kind,n,s,q,lhs,rhs,deficit,relative_deficit,field_descriptor"


def report_row(r):
    return ",".join([
        r.kind, str(r.n), repr(r.s), repr(r.q), repr(r.lhs), repr(r.rhs),
        repr(r.deficit), repr(r.relative_deficit),
        json.dumps(r.field_descriptor),
    ])


def reports_csv(reports):
    return "\n".join([REPORT_HEADER] + [report_row(r) for r in reports]) + "\n"


def reports_json(reports):
    return json.dumps([vars(r) for r in reports], sort_keys=True)


def _make_report(kind, ps, q, lhs, rhs, fld, equality):
    d = rhs - lhs
    return InequalityReport(
        kind=kind, n=ps.n, s=ps.s, q=q, lhs=lhs, rhs=rhs, deficit=d,
        relative_deficit=d / max(1.0, abs(rhs)),
        field_descriptor=descriptor_of(fld), equality_case=equality)


def _diff_quotient(fld, q, rule):
    return (lq_norm(fld, q, rule) ** 2 - lq_norm(fld, 2.0, rule) ** 2) / (q - 2.0)


def deficit(fld, ps, kind):
    """Evaluate one inequality of the family for a concrete field.

    kind is one of interpolation, sobolev, hls, poincare, logsob,
    logsob_critical, s0_subcritical, improved.  Exponents within 1e-8 of
    2 are redirected to the entropy form of the same inequality: the
    difference quotient loses every significant digit there, while its
    limit is exactly the entropy functional.
    """
    n, s, q = ps.n, ps.s, ps.q
    K = fld.kmax
    rule = sphere_rule(n, max(160, 6 * (K + 1)))
    near2 = abs(q - 2.0) <= Q_ENTROPY_WINDOW

    if kind == "interpolation" and near2:
        kind = "logsob"
    if kind == "s0_subcritical" and near2:
        kind = "logsob_critical"

    if kind == "interpolation":
        if not 0.0 < s <= n:
            raise ValueError("interpolation needs s in (0, n]")
        lhs = _diff_quotient(fld, q, rule)
        rhs = ps.constant * quadratic_form(fld, operator_eigenvalue(ps, "L", K))
        return _make_report(kind, ps, q, lhs, rhs, fld, is_constant(fld))

    if kind == "sobolev":
        if not 0.0 < s < n:
            raise ValueError("the critical-exponent form needs s in (0, n)")
        lhs = lq_norm(fld, ps.q_star, rule) ** 2
        rhs = quadratic_form(fld, operator_eigenvalue(ps, "K", K))
        return _make_report(kind, ps, ps.q_star, lhs, rhs, fld, is_constant(fld))

    if kind == "hls":
        if not s < 0.0:
            raise ValueError("the dual (negative-order) form needs s < 0")
        lhs = _diff_quotient(fld, q, rule)
        rhs = ps.constant * quadratic_form(fld, operator_eigenvalue(ps, "L", K))
        return _make_report(kind, ps, q, lhs, rhs, fld, is_constant(fld))

    if kind == "poincare":
        if s == 0.0:
            raise ValueError("use the s = 0 kinds for the derivative operator")
        # variance is exact in coefficients, no quadrature involved
        lhs = float((fld.coeffs[1:] ** 2).sum())
        rhs = ps.constant * quadratic_form(fld, operator_eigenvalue(ps, "L", K))
        eq = bool(np.all(fld.coeffs[2:] == 0.0))
        return _make_report(kind, ps, q, lhs, rhs, fld, eq)

    if kind == "logsob":
        if not 0.0 < s <= n:
            raise ValueError("the entropy form needs s in (0, n]")
        lhs = entropy2(fld, rule)
        rhs = ps.constant * quadratic_form(fld, operator_eigenvalue(ps, "L", K))
        return _make_report(kind, ps, 2.0, lhs, rhs, fld, is_constant(fld))

    if kind == "logsob_critical":
        if s != 0.0:
            raise ValueError("the critical entropy form needs s = 0")
        lhs = entropy2(fld, rule)
        rhs = 0.5 * n * quadratic_form(fld, operator_eigenvalue(ps, "K0prime", K))
        return _make_report(kind, ps, 2.0, lhs, rhs, fld, is_constant(fld))

    if kind == "s0_subcritical":
        if s != 0.0 or not q < 2.0:
            raise ValueError("the subcritical s = 0 form needs s = 0, q in [1, 2)")
        lhs = _diff_quotient(fld, q, rule)
        rhs = 0.5 * n * quadratic_form(fld, operator_eigenvalue(ps, "K0prime", K))
        return _make_report(kind, ps, q, lhs, rhs, fld, is_constant(fld))

    if kind == "improved":
        if not 0.0 < s < n:
            raise ValueError("the improved form needs s in (0, n)")
        if near2:
            raise ValueError("no entropy version of the improved form; use q != 2")
        if q >= ps.q_star:
            raise ValueError("the improved form needs a subcritical exponent")
        lhs = (_diff_quotient(fld, q, rule)
               + quadratic_form(fld, operator_eigenvalue(ps, "R", K)))
        rhs = ps.constant * quadratic_form(fld, operator_eigenvalue(ps, "L", K))
        return _make_report(kind, ps, q, lhs, rhs, fld, is_constant(fld))

    raise ValueError(f"unknown inequality kind {kind!r}")


def deficit_square(fld, ps):
    """Squared-deficit comparison at the critical exponent.

    With G = sign(F) |F|^(q*-1), the quantity ||G||_p^2 - <G, K^-1 G> is
    dominated by ||F||_q*^(2(q*-2)) (<F, K F> - ||F||_q*^2).  Both sides
    vanish to second order at the optimizers, hence the looser roundoff
    tolerance (1e-8) quoted for this report.
    """
    n, s = ps.n, ps.s
    if not 0.0 < s < n:
        raise ValueError("the squared-deficit form needs s in (0, n)")
    K = fld.kmax
    rule = sphere_rule(n, max(256, 16 * (K + 1)))
    w = rule.prob_weights
    fvals = synthesize(fld, rule)
    gvals = np.sign(fvals) * np.abs(fvals) ** (ps.q_star - 1.0)

    norm_qstar = float((w * np.abs(fvals) ** ps.q_star).sum()) ** (1.0 / ps.q_star)
    norm_g_p = norm_qstar ** (ps.q_star / ps.p)

    kg = len(rule) // 2 - 1
    g = analyze(n, gvals, rule, kg)
    lhs = norm_g_p ** 2 - quadratic_form(g, operator_eigenvalue(ps, "K_inv", kg))
    rhs = norm_qstar ** (2.0 * (ps.q_star - 2.0)) * (
        quadratic_form(fld, operator_eigenvalue(ps, "K", K)) - norm_qstar ** 2)
    return _make_report("square", ps, ps.q_star, lhs, rhs, fld, is_constant(fld))


# ---------------------------------------------------------------------------
# kernel eigenvalues


def funk_hecke_mu(n, lam, k):
    """Eigenvalue of the kernel |zeta - eta|^(-lam) on degree-k harmonics.

    Returns (quadrature, closed_form).  The quadrature route absorbs the
    kernel singularity into a Gauss-Jacobi weight, after which the
    integrand is the degree-k polynomial G_k, so the rule is exact; the
    closed form is

        mu_k = A * gamma_k(n - lam/2),
        A = Gamma(n) Gamma((n-lam)/2) / (2^lam Gamma(n/2) Gamma(n - lam/2)).

    Agreement of the two routes is the identity this function exists to
    check; neither is derived from the other.
    """
    if not 0.0 < lam < n:
        raise ValueError("kernel order lam must lie in (0, n)")
    log_a = (log_gamma(float(n)) + log_gamma(0.5 * (n - lam))
             - lam * np.log(2.0) - log_gamma(0.5 * n) - log_gamma(n - 0.5 * lam))
    closed = float(np.exp(log_a)) * gamma_k(n, n - 0.5 * lam, k)

    rule = gauss_jacobi(k + 12, 0.5 * (n - 2.0 - lam), 0.5 * (n - 2.0))
    gk = gegenbauer(k, 0.5 * (n - 1.0), rule.nodes) / gegenbauer_at_one(k, 0.5 * (n - 1.0))
    log_zn = (n - 1.0) * np.log(2.0) + 2.0 * log_gamma(0.5 * n) - log_gamma(float(n))
    quad = float((rule.weights * gk).sum()) * 2.0 ** (-0.5 * lam) / float(np.exp(log_zn))
    return quad, closed


# ---------------------------------------------------------------------------
# sharpness probe


def linearization_probe(n, s, q, eps):
    """Relative gap of the Rayleigh quotient from its sharp value along
    the near-optimizer family F = 1 + eps Y_1.

    The gap is O(eps^2) because the cubic correction integrates to zero;
    in particular it is far below the 5*eps budget the probe is held to.
    """
    ps = derive_params(n, s, q)
    fld = ZonalField(n=n, coeffs=[1.0, float(eps)])
    if s == 0.0:
        eigs = operator_eigenvalue(ps, "K0prime", 1)
        c_eff = 0.5 * n
    else:
        eigs = operator_eigenvalue(ps, "L", 1)
        c_eff = ps.constant
    return c_eff * quotient(fld, ps, eigs) - 1.0


# ---------------------------------------------------------------------------
# pointwise Taylor remainder bounds


def taylor_remainder(t, q):
    """r(t) = |1+t|^q - 1 - q t - q(q-1)/2 t^2, vectorized in t."""
    t = np.asarray(t, dtype=float)
    out = np.abs(1.0 + t) ** q - 1.0 - q * t - 0.5 * q * (q - 1.0) * t * t
    return out if out.ndim else float(out)


def taylor_case_constant(q):
    """Sharp constant for the t >= 1 branch of the remainder bound.

    Equals 1 for q in (2, 3]; for q >= 3 the defining integral
    (q(q-1)(q-2)/2) * int_0^1 (1-sigma)^2 (1+sigma)^(q-3) d sigma has the
    closed form below (e.g. 5 at q = 4).
    """
    if q <= 2.0:
        raise ValueError("remainder bounds need q > 2")
    if q <= 3.0:
        return 1.0
    val = (4.0 * (2.0 ** (q - 2.0) - 1.0) / (q - 2.0)
           - 4.0 * (2.0 ** (q - 1.0) - 1.0) / (q - 1.0)
           + (2.0 ** q - 1.0) / q)
    return 0.5 * q * (q - 1.0) * (q - 2.0) * val


def taylor_bounds(t, q):
    """Case label and (lower, upper) bounds for the remainder at t.

    The natural constants on the two negative branches, q(q-1)(q-2)/6
    for -1 < t < 0 and (q-1)(q-2)/2 for t <= -1, are only valid for
    q >= 3: deriving them takes sign(u)|u|^(q-3) to be increasing.  For
    2 < q < 3 each branch needs the value the other branch contributes
    at t = -1, where |r| = (q-1)(q-2)/2 while q(q-1)(q-2)/6 and 1 sit
    below it and above it respectively; taking the max of the adjacent
    constants gives bounds valid on all of q > 2 (and sharp at t = -1
    for q >= 3).
    """
    if q <= 2.0:
        raise ValueError("remainder bounds need q > 2")
    t = float(t)
    cube = q * (q - 1.0) * (q - 2.0) / 6.0
    half = 0.5 * (q - 1.0) * (q - 2.0)
    if t >= 1.0:
        return "large_positive", 0.0, taylor_case_constant(q) * t ** q
    if t > 0.0:
        return "small_positive", 0.0, cube * max(1.0, 2.0 ** (q - 3.0)) * t ** 3
    if t == 0.0:
        return "zero", 0.0, 0.0
    if t > -1.0:
        return "small_negative", -max(cube, half) * abs(t) ** 3, 0.0
    return "large_negative", -max(1.0, half) * abs(t) ** q, abs(t) ** q


# ---------------------------------------------------------------------------
# report suites


EQUALITY_CASES = (
    ("interpolation", 1, 0.5, 3.0, {"coeffs": [[0, 1.3]]}),
    ("interpolation", 3, 2.0, 4.0, {"coeffs": [[0, 0.7]]}),
    ("interpolation", 2, 2.0, 5.0, {"coeffs": [[0, 1.0]]}),
    ("sobolev", 2, 1.0, None, {"coeffs": [[0, 1.1]]}),
    ("hls", 1, -0.5, 1.2, {"coeffs": [[0, 0.9]]}),
    ("poincare", 1, 0.5, None, {"coeffs": [[0, 1.0], [1, 0.6]]}),
    ("poincare", 3, 2.0, None, {"coeffs": [[0, 0.2], [1, -1.4]]}),
    ("logsob", 2, 1.0, 2.0, {"coeffs": [[0, 2.0]]}),
    ("logsob_critical", 2, 0.0, 2.0, {"coeffs": [[0, 1.5]]}),
    ("s0_subcritical", 1, 0.0, 1.5, {"coeffs": [[0, 0.8]]}),
    ("improved", 1, 0.5, 3.0, {"coeffs": [[0, 1.0]]}),
    ("square", 1, 0.5, None, {"coeffs": [[0, 1.2]]}),
)

RANDOM_CASES = (
    ("interpolation", 1, 0.5, 3.0),
    ("interpolation", 2, 1.0, 3.0),
    ("interpolation", 3, 2.0, 4.0),
    ("interpolation", 1, 1.0, 5.0),
    ("interpolation", 2, 2.0, 8.0),
    ("interpolation", 3, 1.5, 2.5),
    ("interpolation", 2, 0.5, 1.3),
    ("sobolev", 1, 0.5, None),
    ("sobolev", 2, 1.0, None),
    ("sobolev", 3, 2.0, None),
    ("sobolev", 4, 2.0, None),
    ("hls", 1, -0.5, 1.2),
    ("hls", 2, -1.0, 1.1),
    ("hls", 3, -1.5, 1.0),
    ("poincare", 1, 0.5, None),
    ("poincare", 3, 2.0, None),
    ("logsob", 1, 0.5, 2.0),
    ("logsob", 2, 1.0, 2.0),
    ("logsob", 3, 2.0, 2.0),
    ("logsob_critical", 1, 0.0, 2.0),
    ("logsob_critical", 2, 0.0, 2.0),
    ("s0_subcritical", 1, 0.0, 1.5),
    ("s0_subcritical", 2, 0.0, 1.2),
    ("improved", 1, 0.5, 3.0),
    ("improved", 2, 1.0, 2.5),
    ("improved", 3, 2.0, 3.5),
    ("square", 1, 0.5, None),
    ("square", 2, 1.0, None),
    ("square", 3, 2.0, None),
)


def _dispatch(kind, fld, ps):
    if kind == "square":
        return deficit_square(fld, ps)
    return deficit(fld, ps, kind)


def equality_suite():
    """Reports for exact equality cases; every deficit is zero up to
    quadrature roundoff and each report carries the equality flag."""
    out = []
    for kind, n, s, q, desc in EQUALITY_CASES:
        ps = derive_params(n, s, q)
        out.append(_dispatch(kind, field_from_descriptor(desc, n), ps))
    return out


def random_suite(seed, count):
    """Deterministic batch of seeded band-limited random fields cycling
    through every inequality kind."""
    out = []
    kmaxes = (4, 8, 16)
    for i in range(count):
        kind, n, s, q = RANDOM_CASES[i % len(RANDOM_CASES)]
        desc = {"family": "random_band_limited",
                "kmax": kmaxes[i % len(kmaxes)],
                "seed": seed + i, "scale": 0.4}
        ps = derive_params(n, s, q)
        out.append(_dispatch(kind, field_from_descriptor(desc, n), ps))
    return out
