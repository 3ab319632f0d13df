"""Rigid biholomorphisms (z, zeta, w) -> (f, g, rho*w + h) and their action on graphs."""

from dataclasses import dataclass

from gmpy2 import mpq

from .series_core import (
    EXACT, ONE, SeriesError, TruncSeries, conj_series, deg, gr, invert_pair,
    linear_combination, substitute,
)


def _holo(s):
    if any(e[2] or e[3] for e in s.coeffs):
        raise SeriesError("map component depends on conjugate variables")
    return s


@dataclass(frozen=True, eq=False)
class RigidMap:
    f: TruncSeries
    g: TruncSeries
    h: TruncSeries
    rho: object = mpq(1)

    def __post_init__(self):
        object.__setattr__(self, "rho", mpq(self.rho))
        if not self.rho:
            raise SeriesError("rho must be a nonzero real")
        for s in (self.f, self.g, self.h):
            _holo(s)
            if s.constant():
                raise SeriesError("map must fix the origin")
        if not self.jacobian0():
            raise SeriesError("singular Jacobian at the origin")

    def jacobian0(self):
        return self.f.coeff(1, 0) * self.g.coeff(0, 1) - self.f.coeff(0, 1) * self.g.coeff(1, 0)

    @property
    def valid_order(self):
        return min(self.f.valid_order, self.g.valid_order, self.h.valid_order)

    def agrees(self, other, order):
        return (self.rho == other.rho and self.f.agrees(other.f, order)
                and self.g.agrees(other.g, order) and self.h.agrees(other.h, order))

    def __repr__(self):
        return "RigidMap(f=%r, g=%r, h=%r, rho=%s)" % (self.f, self.g, self.h, self.rho)


def identity_map():
    return RigidMap(TruncSeries.var("z"), TruncSeries.var("zeta"), TruncSeries.zero(), 1)


def linear_map(fz, fzeta, gz, gzeta, rho=1):
    z, w = TruncSeries.var("z"), TruncSeries.var("zeta")
    f = linear_combination([(gr(fz), z), (gr(fzeta), w)], EXACT)
    g = linear_combination([(gr(gz), z), (gr(gzeta), w)], EXACT)
    return RigidMap(f, g, TruncSeries.zero(), rho)


def dilation_rotation(lam):
    """z' = lam z, zeta' = (lam/conj lam) zeta, w' = |lam|^2 w."""
    lam = gr(lam)
    if not lam:
        raise SeriesError("dilation parameter must be nonzero")
    return linear_map(lam, 0, 0, lam / lam.conj(), lam.abs2())


def truncate_map(M, delta):
    return RigidMap(M.f.with_order(delta), M.g.with_order(delta), M.h.with_order(delta), M.rho)


def apply(M, H):
    """Image of the graph u = F under M: F'(Z) = rho F(ft, gt, conj) + Re h(ft, gt).

    (ft, gt) is the inverse of (f, g).  H only needs ``F``, ``degree`` and
    ``with_F``; the result has valid order min(degree, valid order of F).
    """
    delta = min(H.degree, H.F.valid_order)
    f = M.f.with_order(delta)
    g = M.g.with_order(delta)
    if f.valid_order < delta or g.valid_order < delta:
        raise SeriesError("map known only to degree %d" % min(f.valid_order, g.valid_order))
    ft, gt = invert_pair(f, g, delta)
    ftb, gtb = conj_series(ft), conj_series(gt)
    Fp = substitute(H.F, ft, gt, ftb, gtb, order=delta).scale(M.rho)
    if not M.h.is_zero():
        hh = substitute(M.h.with_order(delta), ft, gt, None, None, order=delta)
        Fp = Fp + hh.scale(mpq(1, 2)) + conj_series(hh).scale(mpq(1, 2))
    return H.with_F(Fp.with_order(delta))


def compose(M1, M2, delta=None):
    """The map 'first M1, then M2'."""
    def sub(s):
        return substitute(s, M1.f, M1.g, None, None, order=delta)
    f = sub(M2.f)
    g = sub(M2.g)
    h = M1.h.scale(M2.rho) + sub(M2.h) if not M2.h.is_zero() else M1.h.scale(M2.rho)
    if delta is not None:
        f, g, h = f.with_order(delta), g.with_order(delta), h.with_order(delta)
    return RigidMap(f, g, h, M1.rho * M2.rho)


def invert(M, delta):
    ft, gt = invert_pair(M.f, M.g, delta)
    hinv = substitute(M.h.with_order(delta), ft, gt, None, None, order=delta).scale(-1 / M.rho) if not M.h.is_zero() \
        else TruncSeries.zero(delta)
    return RigidMap(ft, gt, hinv, 1 / M.rho)


def rt_dim(delta):
    """Real dimension of the degree-delta truncation of the rigid group."""
    return 2 * delta * delta + 6 * delta + 1


def h_dim(delta):
    """Real dimension of degree-delta rigid graphs with rank-1 Levi form."""
    return (2 * delta ** 3 + 3 * delta ** 2 - 5 * delta) // 6


def count_rt_params(delta):
    """Direct count: complex coefficients of f and g in degrees 1..delta, plus rho."""
    holo = sum(k + 1 for k in range(1, delta + 1))
    return 2 * 2 * holo + 1


def random_rigid_map(rng, top=2, dens=(1, 2)):
    """Random invertible rigid map with small Gaussian-rational coefficients up to degree 2."""
    from .series_core import GaussRat

    def q():
        return mpq(rng.randint(-top, top), rng.choice(dens))

    def c():
        return GaussRat(q(), q())

    while True:
        f = TruncSeries({(1, 0, 0, 0): c(), (0, 1, 0, 0): c(), (2, 0, 0, 0): c(), (1, 1, 0, 0): c()})
        g = TruncSeries({(1, 0, 0, 0): c(), (0, 1, 0, 0): c(), (0, 2, 0, 0): c()})
        h = TruncSeries({(2, 0, 0, 0): c(), (1, 1, 0, 0): c()})
        rho = q()
        jac = f.coeff(1, 0) * g.coeff(0, 1) - f.coeff(0, 1) * g.coeff(1, 0)
        if rho and jac:
            return RigidMap(f, g, h, rho)
