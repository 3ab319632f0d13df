"""Rigid graphed hypersurfaces u = F(z, zeta, zbar, zetabar) and their basic determinants.

F is always stored with MONOMIAL coefficients (the coefficient of
z^a zeta^b zbar^c zetabar^d).  The TAYLOR convention multiplies by a!b!c!d!;
it only matters for input, output and the closed-form relations.
"""

import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .series_core import (
    EXACT, ONE, ZERO, GaussRat, SeriesError, TruncSeries, conj_exp, conj_series, deg,
    derive, divide_by_unit, eval_at, gr, mul, point4, substitute, taylor_factor, translate,
)
from .rigid_maps import RigidMap, apply

CONVENTIONS = ("monomial", "taylor")


class DegenerateError(ValueError):
    """A mathematical precondition (pivot, nondegeneracy) failed."""


@dataclass(frozen=True, eq=False)
class Hypersurface:
    F: TruncSeries
    degree: int
    ambient_dim: int = 3
    convention: str = "monomial"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError("unknown convention %r" % self.convention)
        if self.ambient_dim == 2 and any(e[1] or e[3] for e in self.F.coeffs):
            raise ValueError("a C^2 graph cannot depend on zeta")
        if self.F.valid_order > self.degree:
            object.__setattr__(self, "F", self.F.with_order(self.degree))

    def with_F(self, F):
        return Hypersurface(F, self.degree, self.ambient_dim, self.convention)

    def mono(self, a, b=0, c=0, d=0):
        return self.F.coeff(a, b, c, d)

    def taylor(self, a, b=0, c=0, d=0):
        return self.F.coeff(a, b, c, d) * taylor_factor((a, b, c, d))

    def coefficients(self, convention=None):
        conv = convention or self.convention
        if conv == "monomial":
            return dict(self.F.coeffs)
        return {e: c * taylor_factor(e) for e, c in self.F.coeffs.items()}

    @classmethod
    def from_coefficients(cls, coeffs, degree, convention="monomial", ambient_dim=3):
        if convention == "taylor":
            coeffs = {tuple(e): gr(c) / taylor_factor(e) for e, c in coeffs.items()}
        return cls(TruncSeries(coeffs, degree), degree, ambient_dim, convention)

    def agrees(self, other, order=None):
        return self.F.agrees(other.F, order)


@dataclass
class JetTable:
    """Independent coefficients (b == 0 or d == 0) of a rank-1 graph."""

    values: dict
    degree: int
    convention: str = "monomial"

    def __post_init__(self):
        for e in self.values:
            if e[1] and e[3]:
                raise ValueError("exponent %r is dependent" % (e,))

    def reality_ok(self):
        for e, c in self.values.items():
            ce = conj_exp(e)
            other = self.values.get(ce, ZERO)
            if gr(c).conj() != gr(other):
                return False
        return True

    def monomial_values(self):
        if self.convention == "monomial":
            return {e: gr(c) for e, c in self.values.items()}
        return {e: gr(c) / taylor_factor(e) for e, c in self.values.items()}


def is_independent(e):
    return not (e[1] and e[3])


def independent_exponents(delta):
    """Exponents counted by the graph dimension: a+b >= 1, c+d >= 1, b*d == 0."""
    out = []
    for n in range(2, delta + 1):
        for a in range(n + 1):
            for b in range(n + 1 - a):
                for c in range(n + 1 - a - b):
                    d = n - a - b - c
                    if a + b >= 1 and c + d >= 1 and not (b and d):
                        out.append((a, b, c, d))
    return out


def jet_table(H):
    """Independent part of H as a JetTable (monomial)."""
    return JetTable({e: c for e, c in H.F.coeffs.items() if is_independent(e)}, H.degree)


# --- determinants ---------------------------------------------------------

def levi_det(H):
    F = H.F
    Fzzb = derive(derive(F, 0), 2)
    Fwwb = derive(derive(F, 1), 3)
    Fzwb = derive(derive(F, 0), 3)
    Fwzb = derive(derive(F, 1), 2)
    return mul(Fzzb, Fwwb) - mul(Fzwb, Fwzb)


def nondeg_det(H):
    m = H.F.coeff
    return m(1, 0, 1, 0) * m(2, 0, 0, 1) * 2 - m(1, 0, 0, 1) * m(2, 0, 1, 0) * 2


def rank1_order(H):
    """Largest n such that the Levi determinant vanishes through degree n (-1 if not at 0)."""
    D = levi_det(H)
    low = D.low_degree()
    if low is None:
        return D.valid_order
    return low - 1


def is_real(H):
    return conj_series(H.F).agrees(H.F)


def pluriharmonic_part(F):
    return F.filter(lambda e: (e[2] == 0 and e[3] == 0) or (e[0] == 0 and e[1] == 0))


def validate(H):
    """Report of the structural checks; values are booleans plus details."""
    F = H.F
    report = {
        "reality": is_real(H),
        "origin": not F.constant(),
        "pluriharmonic_free": pluriharmonic_part(F).filter(lambda e: deg(e) > 0).is_zero(),
        "levi_nonzero": bool(F.coeff(1, 0, 1, 0)),
    }
    if H.ambient_dim == 3:
        need = H.degree - 2
        achieved = rank1_order(H) if H.degree >= 2 else -1
        report["rank1"] = achieved >= need
        report["rank1_order"] = achieved
        report["two_nondegenerate"] = bool(nondeg_det(H)) if H.degree >= 3 else False
    report["ok"] = all(v for k, v in report.items() if isinstance(v, bool))
    return report


def remove_pluriharmonic(H):
    chi = H.F.filter(lambda e: e[2] == 0 and e[3] == 0 and deg(e) > 0)
    M = RigidMap(TruncSeries.var("z"), TruncSeries.var("zeta"), TruncSeries(chi.coeffs).scale(-2), 1)
    if chi.is_zero():
        return H, M
    return H.with_F(H.F - chi - conj_series(chi)), M


def chart_change(H):
    """(H', M) with F'_{1,0,1,0} != 0, for a graph whose Levi form is nonzero at 0.

    Pre-maps: the identity, the swap of z and zeta when F_{0,1,0,1} != 0, and
    otherwise the shear zeta' = zeta + conj(F_{0,1,1,0}) z (which turns a purely
    off-diagonal Levi form into one with F'_{1,0,1,0} = -2|F_{0,1,1,0}|^2).
    """
    m = H.F.coeff
    z, w = TruncSeries.var("z"), TruncSeries.var("zeta")
    if m(1, 0, 1, 0):
        M = RigidMap(z, w, TruncSeries.zero(), 1)
    elif m(0, 1, 0, 1):
        M = RigidMap(w, z, TruncSeries.zero(), 1)
    elif m(0, 1, 1, 0):
        M = RigidMap(z, w + z.scale(m(0, 1, 1, 0).conj()), TruncSeries.zero(), 1)
    else:
        raise DegenerateError("Levi form vanishes at the origin")
    return apply(M, H), M


# --- completion of dependent coefficients -----------------------------------

def _ordered_unknowns(delta):
    out = []
    for n in range(2, delta + 1):
        for a in range(n + 1):
            for b in range(1, n + 1 - a):
                for c in range(n + 1 - a - b):
                    d = n - a - b - c
                    if d >= 1:
                        out.append((a, b, c, d))
    out.sort(key=lambda e: (e[1] + e[3], deg(e), e))
    return out


def _sub_exponents(t):
    for a in range(t[0] + 1):
        for b in range(t[1] + 1):
            for c in range(t[2] + 1):
                for d in range(t[3] + 1):
                    yield (a, b, c, d), (t[0] - a, t[1] - b, t[2] - c, t[3] - d)


def _levi_coeff(vals, t):
    """Coefficient at t of F_{z zb} F_{zeta zetab} - F_{z zetab} F_{zeta zb}."""
    get = vals.get
    total_r = mpq(0)
    total_i = mpq(0)
    for e1, e2 in _sub_exponents(t):
        a1, b1, c1, d1 = e1
        a2, b2, c2, d2 = e2
        x = get((a1 + 1, b1, c1 + 1, d1))
        y = get((a2, b2 + 1, c2, d2 + 1))
        if x is not None and y is not None:
            f = (a1 + 1) * (c1 + 1) * (b2 + 1) * (d2 + 1)
            total_r += f * (x.re * y.re - x.im * y.im)
            total_i += f * (x.re * y.im + x.im * y.re)
        x = get((a1 + 1, b1, c1, d1 + 1))
        y = get((a2, b2 + 1, c2 + 1, d2))
        if x is not None and y is not None:
            f = (a1 + 1) * (d1 + 1) * (b2 + 1) * (c2 + 1)
            total_r -= f * (x.re * y.re - x.im * y.im)
            total_i -= f * (x.re * y.im + x.im * y.re)
    return GaussRat._raw(total_r, total_i)


def complete_dependents(J, ambient_dim=3):
    """Fill in the dependent coefficients so the Levi determinant is O(delta - 1).

    The unknown F_{a,b,c,d} (b, d >= 1) enters the coefficient of
    z^a zeta^(b-1) zbar^c zetabar^(d-1) linearly with factor b*d*F_{1,0,1,0};
    unknowns are solved in order of (b+d, total degree).
    """
    vals = {e: c for e, c in J.monomial_values().items() if c}
    pivot = vals.get((1, 0, 1, 0), ZERO)
    if not pivot:
        raise DegenerateError("zero Levi pivot: F_{1,0,1,0} = 0")
    for u in _ordered_unknowns(J.degree):
        vals.pop(u, None)
        t = (u[0], u[1] - 1, u[2], u[3] - 1)
        r = _levi_coeff(vals, t)
        if r:
            vals[u] = -r / (pivot * (u[1] * u[3]))
    F = TruncSeries(vals, J.degree)
    return Hypersurface(F, J.degree, ambient_dim, J.convention)


# --- generators -------------------------------------------------------------

def gm_model(delta):
    """Truncation of u = (z zb + z^2 wb/2 + zb^2 w/2)/(1 - w wb)."""
    c = {}
    half = GaussRat(mpq(1, 2))
    for i in range(delta):
        if 2 + 2 * i <= delta:
            c[(1, i, 1, i)] = ONE
        if 3 + 2 * i <= delta:
            c[(2, i, 0, i + 1)] = half
            c[(0, i + 1, 2, i)] = half
    return Hypersurface(TruncSeries(c, delta), delta)


def gm_series(delta):
    return gm_model(delta).F


@dataclass(frozen=True, eq=False)
class RationalGerm:
    """Exact germ u = num/den with real polynomial num, den and den(0) != 0."""

    num: TruncSeries
    den: TruncSeries

    def value_at(self, p):
        return eval_at(self.num, p) / eval_at(self.den, p)

    def jet(self, delta):
        F = divide_by_unit(self.num, self.den, delta)
        F = F - TruncSeries.const(F.constant(), delta)
        return Hypersurface(F, delta)

    def at(self, z0, zeta0):
        """The germ recentered at the point over (z0, zeta0), with u shifted to 0."""
        p = point4(z0, zeta0)
        u0 = self.value_at(p)
        num = translate(self.num, p)
        den = translate(self.den, p)
        return RationalGerm(num - den.scale(u0), den)

    def transform(self, finv, ginv, rho=1):
        """Image under a polynomial map whose inverse (finv, ginv) is polynomial."""
        fb, gb = conj_series(finv), conj_series(ginv)
        num = substitute(self.num, finv, ginv, fb, gb).scale(rho)
        den = substitute(self.den, finv, ginv, fb, gb)
        return RationalGerm(num, den)


def lightcone_germ():
    z, w, zb, wb = (TruncSeries.var(v) for v in ("z", "zeta", "zbar", "zetabar"))
    x = z + zb
    return RationalGerm(mul(x, x), TruncSeries.const(GaussRat(4)) - (w + wb).scale(2))


def lightcone_tube(delta):
    """Truncation of u = (z + zb)^2 / (4 - 2 zeta - 2 zetab), pluriharmonic terms kept."""
    return lightcone_germ().jet(delta)


def cone_germ(alpha, beta):
    """Tube over the cone s*psi(x/s), psi(t) = t^2 + alpha t^3 + beta t^4.

    Here x = (z + zb)/2 and s = 1 - (zeta + zetab)/2.  Homogeneity of degree
    one in (x, s) makes the Levi form rank 1 everywhere.
    """
    z, w, zb, wb = (TruncSeries.var(v) for v in ("z", "zeta", "zbar", "zetabar"))
    x = (z + zb).scale(mpq(1, 2))
    s = TruncSeries.const(ONE) - (w + wb).scale(mpq(1, 2))
    x2 = mul(x, x)
    num = mul(mul(x2, s), s) + mul(mul(x2, x), s).scale(gr(alpha)) + mul(x2, x2).scale(gr(beta))
    den = mul(mul(s, s), s)
    return RationalGerm(num, den)


def _rand_q(rng, top=3, dens=(1, 2, 3)):
    return mpq(rng.randint(-top, top), rng.choice(dens))


def _rand_gauss(rng, top=3, dens=(1, 2, 3)):
    return GaussRat(_rand_q(rng, top, dens), _rand_q(rng, top, dens))


def random_germ(seed):
    """Exact rank-1 germ: a cone tube moved by random polynomial maps with polynomial inverses."""
    rng = random.Random(seed)
    germ = cone_germ(_rand_q(rng, 2, (1, 2)) or mpq(1, 2), _rand_q(rng, 2, (1, 2, 3)))
    z, w = TruncSeries.var("z"), TruncSeries.var("zeta")
    # inverse of z' = a z + b zeta + p zeta^2 with zeta' = zeta
    a = _rand_gauss(rng, 2, (1, 2)) or ONE
    if not a:
        a = ONE
    b, p = _rand_gauss(rng, 2, (1, 2)), _rand_gauss(rng, 2, (1, 2))
    finv = (z - w.scale(b) - mul(w, w).scale(p)).scale(a.inverse())
    germ = germ.transform(finv, w)
    # inverse of zeta' = c zeta + q z^2 with z' = z
    c = _rand_gauss(rng, 2, (1, 2)) or GaussRat(1, 1)
    q = _rand_gauss(rng, 2, (1, 2))
    ginv = (w - mul(z, z).scale(q)).scale(c.inverse())
    germ = germ.transform(z, ginv)
    return germ


def random_rank1(seed, delta, levi=None, top=3, dens=(1, 2)):
    """Deterministic random rank-1, 2-nondegenerate graph (Taylor-convention draws).

    Independent coefficients are drawn from small rationals, then the
    dependent ones are completed.  ``levi`` fixes the Taylor F_{1,0,1,0}.
    """
    rng = random.Random(seed)
    vals = {}
    for e in independent_exponents(delta):
        ce = conj_exp(e)
        if ce in vals:
            continue
        if ce == e:
            vals[e] = GaussRat(_rand_q(rng, top, dens))
        else:
            v = _rand_gauss(rng, top, dens)
            vals[e] = v
            vals[ce] = v.conj()
    if levi is not None:
        vals[(1, 0, 1, 0)] = gr(levi)
    while not vals.get((1, 0, 1, 0)):
        vals[(1, 0, 1, 0)] = GaussRat(_rand_q(rng, top, dens))
    while True:
        J = JetTable(vals, delta, "taylor")
        H = complete_dependents(J)
        if nondeg_det(H):
            break
        v = _rand_gauss(rng, top, dens)
        vals[(2, 0, 0, 1)] = v
        vals[(0, 1, 2, 0)] = v.conj()
    return Hypersurface(H.F, delta, 3, "taylor")


def perturb_slot(H, e, delta_value):
    """Change one independent coefficient (and its conjugate) then recomplete."""
    J = jet_table(H)
    vals = dict(J.values)
    ce = conj_exp(e)
    add = gr(delta_value)
    if ce == e:
        add = GaussRat(add.re)
    vals[e] = vals.get(e, ZERO) + add
    if ce != e:
        vals[ce] = vals.get(ce, ZERO) + add.conj()
    out = complete_dependents(JetTable(vals, H.degree))
    return Hypersurface(out.F, H.degree, H.ambient_dim, H.convention)


def recenter(H, z0, zeta0=0):
    """Translate the stored polynomial so (z0, zeta0) becomes the origin.

    The new graph is F(p + Z) - F(p) with pluriharmonic terms removed, at the
    same degree.  The polynomial translation is exact; whether the result is
    still rank 1 to the full order is left to ``validate``.
    """
    p = point4(z0, zeta0)
    poly = TruncSeries(H.F.coeffs)
    shifted = translate(poly, p)
    shifted = shifted - TruncSeries.const(shifted.constant())
    out = Hypersurface(shifted.with_order(H.degree), H.degree, H.ambient_dim, H.convention)
    if not out.F.coeff(1, 0, 1, 0):
        raise DegenerateError("Levi form degenerates at the recentered point")
    out, _ = remove_pluriharmonic(out)
    return out


def _re2(S):
    return S + conj_series(S)


@dataclass(frozen=True, eq=False)
class ParametricGerm:
    """Exact rank-1 germ given through a real parametrization.

    Points are parametrized by (t, zeta) with z = zpar(t, tbar, zeta) and
    u = phi(t, tbar, zeta, zetabar); both are exact polynomials stored with t
    in the z slot.  The jet in (z, zeta) comes from inverting t -> z formally.
    """

    zpar: TruncSeries
    phi: TruncSeries

    def point(self, t0, zeta0):
        """Ambient holomorphic coordinates (z0, zeta0) of the parameter point."""
        p = point4(t0, zeta0)
        return eval_at(self.zpar, p), gr(zeta0)

    def at(self, t0, zeta0):
        p = point4(t0, zeta0)
        zp = translate(self.zpar, p)
        ph = translate(self.phi, p)
        return ParametricGerm(zp - TruncSeries.const(zp.constant()),
                              ph - TruncSeries.const(ph.constant()))

    def jet(self, delta):
        A = self.zpar.coeff(1, 0, 0, 0)
        B = self.zpar.coeff(0, 0, 1, 0)
        N = self.zpar.coeff(0, 1, 0, 0)
        if any(e[3] for e in self.zpar.coeffs):
            raise SeriesError("zpar must not depend on zetabar")
        det = A.abs2() - B.abs2()
        if not det:
            raise DegenerateError("parametrization is singular at the base point")
        Q = self.zpar.filter(lambda e: deg(e) >= 2)
        n = delta
        z = TruncSeries.var("z", n)
        w = TruncSeries.var("zeta", n)
        wb = TruncSeries.var("zetabar", n)
        tau = TruncSeries.zero(n)
        for step in range(1, n + 1):
            if step >= 2 and not Q.is_zero():
                q = substitute(Q, tau, w, conj_series(tau), wb, order=step)
            else:
                q = TruncSeries.zero(step)
            r = z.with_order(step) - w.with_order(step).scale(N) - q
            t_new = r.scale(A.conj() / det) - conj_series(r).scale(B / det)
            tau = TruncSeries(t_new.coeffs, n, _trusted=True)
        F = substitute(self.phi, tau, w, conj_series(tau), wb, order=n)
        F = F - TruncSeries.const(F.constant(), n)
        return Hypersurface(F, n)


def envelope_germ(seed):
    """Envelope of the Levi-flat family u = 2Re(t z + H2(t, zeta)) + c(t, tbar).

    Along the envelope d/dt of the family vanishes, so z = -H2_t - c_t and the
    Levi form is rank 1.  Random small rational data; I0 is generically nonzero.
    """
    rng = random.Random(seed)
    for _ in range(50):
        H2 = TruncSeries({(i, j, 0, 0): _rand_gauss(rng, 3, (1, 2))
                          for i in range(4) for j in range(4)
                          if 2 <= i + j <= 3 or (i, j) == (0, 1)})
        gam = GaussRat(_rand_q(rng, 3, (1, 2)) or 1)
        c = TruncSeries({(1, 0, 1, 0): gam, (2, 0, 2, 0): GaussRat(_rand_q(rng, 3, (1, 2)))})
        c = c + _re2(TruncSeries({(2, 0, 0, 0): _rand_gauss(rng, 3, (1, 2)),
                                  (2, 0, 1, 0): _rand_gauss(rng, 3, (1, 2)),
                                  (3, 0, 0, 0): _rand_gauss(rng, 3, (1, 2))}))
        zpar = -(derive(H2, "z") + derive(c, "z"))
        phi = _re2(mul(TruncSeries.var("z"), zpar) + H2) + c
        germ = ParametricGerm(zpar, phi)
        try:
            H = germ.jet(3)
        except DegenerateError:
            continue
        if H.F.coeff(1, 0, 1, 0) and nondeg_det(remove_pluriharmonic(H)[0]):
            return germ
    raise RuntimeError("no admissible envelope germ for this seed")
