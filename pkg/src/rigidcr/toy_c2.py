"""Rigid Levi-nondegenerate graphs u = F(z, zbar) in C^2.

Exponents keep the four-slot layout (a, 0, c, 0).  The single relative
invariant is R = (F_{zzzbzb} F_{zzb} - F_{zzzb} F_{zzbzb}) / F_{zzb}^2.
"""

from dataclasses import dataclass

from .equivalence import _truncation, decide, exponents_c2
from .hypersurface import DegenerateError, Hypersurface
from .rigid_maps import RigidMap, apply, compose, identity_map, linear_map
from .series_core import (
    ONE, TruncSeries, conj_series, deg, derive, divide_by_unit, mul, substitute,
)


def _check(H):
    if H.ambient_dim != 2:
        raise ValueError("expected a C^2 graph")


def toy_hypersurface(coeffs, degree):
    """Hypersurface from {(j, k): c} monomial coefficients of z^j zbar^k."""
    return Hypersurface(TruncSeries({(j, 0, k, 0): c for (j, k), c in coeffs.items()}, degree),
                        degree, 2)


def harmonic_map(H):
    chi = H.F.filter(lambda e: e[2] == 0 and deg(e) > 0)
    return RigidMap(TruncSeries.var("z"), TruncSeries.var("zeta"), chi.scale(-2), 1)


def prenormal_violations_c2(H):
    bad = []
    for e, c in H.F.coeffs.items():
        j, _, k, _ = e
        if j == 0 or k == 0:
            bad.append(e)
        elif (j == 1 or k == 1) and (j, k) != (1, 1):
            bad.append(e)
    if H.F.coeff(1, 0, 1, 0) != ONE:
        bad.append((1, 0, 1, 0))
    return sorted(set(bad))


def prenormalize_c2(H):
    """(H', M): F' = z zbar + O(z^2 zbar^2), reached without square roots.

    Levi scaling is z' = F_11 z with rho = F_11; the z zbar^k terms are then
    absorbed in one shot by z' = z + sum_{j>=2} F_{j1} z^j.
    """
    _check(H)
    delta = H.degree
    M = harmonic_map(H)
    H1 = apply(M, H)
    p = H1.F.coeff(1, 0, 1, 0)
    if not p:
        raise DegenerateError("zero Levi pivot: F_{1,1} = 0")
    if p != ONE:
        L = linear_map(p, 0, 0, 1, rho=p.re)
        H1 = apply(L, H1)
        M = compose(M, L, delta)
    phi = {(j, 0, 0, 0): c for (j, b, k, d), c in H1.F.coeffs.items() if k == 1 and j >= 2}
    if phi:
        A = RigidMap(TruncSeries.var("z") + TruncSeries(phi), TruncSeries.var("zeta"),
                     TruncSeries.zero(), 1)
        H1 = apply(A, H1)
        M = compose(M, A, delta)
    if prenormal_violations_c2(H1):
        raise RuntimeError("C^2 prenormalization left dirty slots")
    return H1, M


def predicted_F22(H):
    """Coefficient of z^2 zbar^2 after prenormalization, from the raw jet.

    The square-root scaling gives (F22 F11 - F21 F12)/F11^3; the rho = F11
    scaling used here divides that by one more F11.
    """
    m = H.F.coeff
    f11 = m(1, 0, 1, 0)
    return (m(2, 0, 2, 0) * f11 - m(2, 0, 1, 0) * m(1, 0, 2, 0)) / (f11 * f11 * f11 * f11)


def predicted_F22_sqrt(H):
    m = H.F.coeff
    f11 = m(1, 0, 1, 0)
    return (m(2, 0, 2, 0) * f11 - m(2, 0, 1, 0) * m(1, 0, 2, 0)) / (f11 * f11 * f11)


def _partials(F):
    Fz = derive(F, "z")
    Fzzb = derive(Fz, "zbar")
    Fzzzb = derive(Fzzb, "z")
    Fzzbzb = derive(Fzzb, "zbar")
    Fzzzbzb = derive(Fzzzb, "zbar")
    return Fzzb, Fzzzb, Fzzbzb, Fzzzbzb


def numerator_R(H):
    F = H.F.with_order(H.degree)
    Fzzb, Fzzzb, Fzzbzb, Fzzzbzb = _partials(F)
    return mul(Fzzzbzb, Fzzb) - mul(Fzzzb, Fzzbzb)


def invariant_R(H):
    """R as a truncated series; valid order is degree - 4."""
    if H.degree < 4:
        raise ValueError("R needs a jet of degree >= 4")
    F = H.F.with_order(H.degree)
    Fzzb = derive(derive(F, "z"), "zbar")
    if not Fzzb.constant():
        raise DegenerateError("zero Levi pivot: F_{z zbar}(0) = 0")
    return divide_by_unit(numerator_R(H), mul(Fzzb, Fzzb))


@dataclass
class RLawReport:
    residual: TruncSeries
    factor_at_origin: object

    @property
    def ok(self):
        return self.residual.is_zero()


def check_R_transformation(H, M):
    """Num(R)(F) = (1/a^2) (f_z conj f_z)^3 Num(R)(F') o f, with F' the image of F under M."""
    _check(H)
    Hp = apply(M, H)
    n = H.degree
    f = M.f.with_order(n)
    fb = conj_series(f)
    num_src = numerator_R(H)
    num_tgt = numerator_R(Hp)
    pulled = substitute(num_tgt, f, TruncSeries.var("zeta"), fb, TruncSeries.var("zetabar"),
                        order=num_tgt.valid_order)
    fz = derive(f, "z")
    j = mul(fz, conj_series(fz))
    j3 = mul(mul(j, j), j)
    rhs = mul(j3, pulled).scale(1 / (M.rho * M.rho))
    res = num_src - rhs
    return RLawReport(res, j3.constant() / (M.rho * M.rho))


def sphere_test(H):
    """True iff Num(R) vanishes to the certified order (flat to order degree - 4)."""
    _check(H)
    return numerator_R(H).is_zero()


def equivalent_c2(H, Hp):
    """Compare prenormal forms slotwise up to z -> lambda z."""
    A, _ = prenormalize_c2(H)
    B, _ = prenormalize_c2(Hp)
    delta = min(H.degree, Hp.degree)
    model = TruncSeries({(1, 0, 1, 0): ONE})
    G1 = (A.F - model).with_order(delta)
    G2 = (B.F - model).with_order(delta)
    return _truncation(decide(G1, G2, exponents_c2), delta)


def random_c2(rng, delta, top=3, dens=(1, 2, 3)):
    from .hypersurface import _rand_gauss, _rand_q
    from .series_core import GaussRat
    coeffs = {}
    for j in range(delta + 1):
        for k in range(j, delta + 1 - j):
            if j + k < 2 or j == 0:
                continue
            if j == k:
                coeffs[(j, k)] = GaussRat(_rand_q(rng, top, dens))
            else:
                v = _rand_gauss(rng, top, dens)
                coeffs[(j, k)] = v
                coeffs[(k, j)] = v.conj()
    while not coeffs.get((1, 1)):
        coeffs[(1, 1)] = GaussRat(_rand_q(rng, top, dens))
    return toy_hypersurface(coeffs, delta)


def random_c2_map(rng, top=2, dens=(1, 2)):
    from .hypersurface import _rand_gauss, _rand_q
    a = _rand_gauss(rng, top, dens)
    while not a:
        a = _rand_gauss(rng, top, dens)
    f = TruncSeries({(1, 0, 0, 0): a, (2, 0, 0, 0): _rand_gauss(rng, top, dens),
                     (3, 0, 0, 0): _rand_gauss(rng, top, dens)})
    h = TruncSeries({(2, 0, 0, 0): _rand_gauss(rng, top, dens), (3, 0, 0, 0): _rand_gauss(rng, top, dens)})
    rho = _rand_q(rng, top, dens) or 1
    return RigidMap(f, TruncSeries.var("zeta"), h, rho)
