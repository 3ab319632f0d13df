"""Differential route to the invariants of a rigid Levi rank-1 graph in C^3.

On v-independent functions the CR fields reduce to plain partials:
L1 = d/dz, L1bar = d/dzbar, and the Levi-kernel field is K = k L1 + d/dzeta
with the slant function k = -F_{zeta zbar}/F_{z zbar}.  All fields are
truncated series; a value is only reported when its valid order is >= 0.
"""

from dataclasses import dataclass, field

from gmpy2 import mpq

from .hypersurface import DegenerateError
from .series_core import (
    EXACT, ONE, ZERO, GaussRat, SeriesError, TruncSeries, conj_series, derive,
    divide_by_unit, mul,
)

THIRD = mpq(1, 3)
NINTH = mpq(1, 9)


# --- fields ------------------------------------------------------------------

def field_L1(phi):
    return derive(phi, "z")


def field_L2(phi):
    return derive(phi, "zeta")


def field_L1bar(phi):
    return derive(phi, "zbar")


def field_L2bar(phi):
    return derive(phi, "zetabar")


def field_T(phi):
    """T annihilates v-independent fields in the rigid case."""
    return TruncSeries.zero(phi.valid_order)


def field_K(phi, k):
    """K = k L1 + L2.  The kernel-field symbol used elsewhere is the same derivation."""
    return mul(k, derive(phi, "z")) + derive(phi, "zeta")


def field_Kbar(phi, k):
    return mul(conj_series(k), derive(phi, "zbar")) + derive(phi, "zetabar")


def _F(H):
    F = H.F
    if F.valid_order >= EXACT:
        F = F.with_order(H.degree)
    return F


def _div(S, U):
    if not U.constant():
        raise DegenerateError("division by a field vanishing at the origin")
    return divide_by_unit(S, U)


def slant_k(H):
    F = _F(H)
    Fzzb = derive(derive(F, "z"), "zbar")
    if not Fzzb.constant():
        raise DegenerateError("zero Levi pivot: F_{z zbar}(0) = 0")
    return -_div(derive(derive(F, "zeta"), "zbar"), Fzzb)


def fundamental_P(H):
    F = _F(H)
    Fzzb = derive(derive(F, "z"), "zbar")
    if not Fzzb.constant():
        raise DegenerateError("zero Levi pivot: F_{z zbar}(0) = 0")
    return _div(derive(derive(derive(F, "z"), "z"), "zbar"), Fzzb)


def value_at_origin(S):
    if S.valid_order < 0:
        raise SeriesError("field not certified at the origin")
    return S.constant()


class Fields:
    """Cached derivatives of k and P for one graph."""

    def __init__(self, H):
        self.H = H
        self.k = slant_k(H)
        self.P = fundamental_P(H)
        self.kb = conj_series(self.k)
        self.Pb = conj_series(self.P)
        self.Lbk = field_L1bar(self.k)
        if not self.Lbk.constant():
            raise DegenerateError("not 2-nondegenerate: L1bar(k)(0) = 0")
        self.Lbbk = field_L1bar(self.Lbk)
        self.Lkb = field_L1(self.kb)
        self.LLkb = field_L1(self.Lkb)

    def K(self, phi):
        return field_K(phi, self.k)

    def Kbar(self, phi):
        return field_Kbar(phi, self.k)

    # the invariant fields
    def I0(self):
        Lbk, Lbbk = self.Lbk, self.Lbbk
        t1 = _div(self.K(Lbbk), mul(Lbk, Lbk)).scale(-THIRD)
        t2 = _div(mul(self.K(Lbk), Lbbk), mul(mul(Lbk, Lbk), Lbk)).scale(THIRD)
        t3 = _div(self.LLkb, self.Lkb).scale(2 * THIRD)
        t4 = _div(field_L1(Lbk), Lbk).scale(2 * THIRD)
        return t1 + t2 + t3 + t4

    def V0(self):
        Lbk, Lbbk, Pb = self.Lbk, self.Lbbk, self.Pb
        r = _div(Lbbk, Lbk)
        t1 = _div(field_L1bar(Lbbk), Lbk).scale(-THIRD)
        t2 = mul(r, r).scale(5 * NINTH)
        t3 = mul(r, Pb).scale(-NINTH)
        t4 = field_L1bar(Pb).scale(THIRD)
        t5 = mul(Pb, Pb).scale(-NINTH)
        return t1 + t2 + t3 + t4 + t5

    def B(self):
        return (_div(self.Lbbk, self.Lbk) - self.Pb).scale(THIRD)

    def Bbar(self):
        return (_div(self.LLkb, self.Lkb) - self.P).scale(THIRD)

    def Q0_def(self):
        """Half of {B I0 + L1bar(I0) - Bbar Kbar(I0)/L1(kbar) - K(V0)/L1bar(k)}."""
        I0, V0 = self.I0(), self.V0()
        s = (mul(self.B(), I0) + field_L1bar(I0)
             - _div(mul(self.Bbar(), self.Kbar(I0)), self.Lkb)
             - _div(self.K(V0), self.Lbk))
        return s.scale(mpq(1, 2))

    def Q0_final(self):
        """B I0 + conj + -B Bbar + 2/3 Re L1[L1bar^2 k / L1bar k] + 1/3 Re L1bar(P)."""
        I0, B, Bb = self.I0(), self.B(), self.Bbar()
        BI = mul(B, I0)
        s = BI + conj_series(BI) - mul(B, Bb)
        x = field_L1(_div(self.Lbbk, self.Lbk))
        s = s + (x + conj_series(x)).scale(THIRD)
        y = field_L1bar(self.P)
        s = s + (y + conj_series(y)).scale(mpq(1, 6))
        return s

    def Q0_expanded(self):
        """Fully expanded form in k, P and their derivatives only."""
        return sum_terms(self.q0_expanded_terms())

    def q0_expanded_terms(self):
        k, P, Pb, Lbk, Lbbk = self.k, self.P, self.Pb, self.Lbk, self.Lbbk
        KLbk = self.K(Lbk)
        KLbbk = self.K(Lbbk)
        LLbk = field_L1(Lbk)
        d2 = mul(Lbk, Lbk)
        d3 = mul(d2, Lbk)
        d4 = mul(d3, Lbk)
        n = NINTH
        inner = [
            ("K(Lbk) (Lbbk)^2 / Lbk^4", n, _div(mul(KLbk, mul(Lbbk, Lbbk)), d4)),
            ("K(Lbbk) Lbbk / Lbk^3", -n, _div(mul(KLbbk, Lbbk), d3)),
            ("K(Lbk) Lbbk Pb / Lbk^3", -n, _div(mul(mul(KLbk, Lbbk), Pb), d3)),
            ("L1(Lbk) Lbbk / Lbk^2", -n, _div(mul(LLbk, Lbbk), d2)),
            ("K(Lbbk) Pb / Lbk^2", n, _div(mul(KLbbk, Pb), d2)),
            ("L1(Lbk) Pb / Lbk", -2 * n, _div(mul(LLbk, Pb), Lbk)),
            ("Lbbk P / Lbk", -n, _div(mul(Lbbk, P), Lbk)),
            ("L1(Lbbk) / Lbk", THIRD, _div(field_L1(Lbbk), Lbk)),
            ("L1bar(P)", mpq(1, 6), field_L1bar(P)),
        ]
        out = []
        for name, c, S in inner:
            t = S.scale(c)
            out.append(("2Re " + name, t + conj_series(t)))
        out.append(("-|Pb|^2/9", mul(Pb, P).scale(-n)))
        r = _div(Lbbk, Lbk)
        out.append(("|Lbbk/Lbk|^2/3", mul(r, conj_series(r)).scale(THIRD)))
        return out


def sum_terms(terms):
    total = None
    for _, S in terms:
        total = S if total is None else total + S
    return total


# --- invariants at the origin ------------------------------------------------

def _prepared(H):
    from .hypersurface import remove_pluriharmonic
    H0, _ = remove_pluriharmonic(H)
    return Fields(H0)


def invariant_I0_diff(H):
    return value_at_origin(_prepared(H).I0())


def invariant_V0_diff(H):
    return value_at_origin(_prepared(H).V0())


def invariant_Q0_def(H):
    return value_at_origin(_prepared(H).Q0_def())


def invariant_Q0_final(H):
    return value_at_origin(_prepared(H).Q0_final())


def invariant_Q0_expanded(H):
    return value_at_origin(_prepared(H).Q0_expanded())


@dataclass
class DiffInvariants:
    I0: GaussRat
    V0: GaussRat
    Q0: GaussRat
    Q0_def: GaussRat = None


def diff_invariants(H, with_def=True):
    fl = _prepared(H)
    q_def = None
    if with_def and fl.I0().valid_order >= 1:
        q_def = value_at_origin(fl.Q0_def())
    return DiffInvariants(value_at_origin(fl.I0()), value_at_origin(fl.V0()),
                          value_at_origin(fl.Q0_final()), q_def)


# --- identity checks ---------------------------------------------------------

@dataclass
class IdentityReport:
    name: str
    residual: TruncSeries
    order: int
    failing_terms: list = field(default_factory=list)

    @property
    def ok(self):
        return self.residual.is_zero()


def _report(name, terms):
    """terms: list of (label, series) summing to zero; localize on failure."""
    res = sum_terms(terms)
    rep = IdentityReport(name, res, res.valid_order)
    if not res.is_zero():
        e = min(res.coeffs, key=lambda x: (sum(x), x))
        rep.failing_terms = [(label, S[e]) for label, S in terms if S[e]]
        rep.failing_terms.append(("residual at %r" % (e,), res[e]))
    return rep


def verify_kernel_identities(H, phi=None):
    """Residual series of the three kernel-field identities and the bracket relation."""
    fl = _prepared(H)
    k, P, Pb, Lbk = fl.k, fl.P, fl.Pb, fl.Lbk
    out = []
    # (1) K(Pbar) = -P L1bar(k) - L1bar L1(k)
    out.append(_report("K(Pbar)", [
        ("K(Pbar)", fl.K(Pb)),
        ("P L1bar(k)", mul(P, Lbk)),
        ("L1bar L1(k)", field_L1bar(field_L1(k))),
    ]))
    # (2) K(L1bar(Pbar)) = -L1bar(k)(L1bar(P) + L1(Pbar)) - P L1bar^2(k) - L1bar^2 L1(k)
    out.append(_report("K(L1bar Pbar)", [
        ("K(L1bar(Pbar))", fl.K(field_L1bar(Pb))),
        ("L1bar(k) 2Re L1bar(P)", mul(Lbk, field_L1bar(P) + field_L1(Pb))),
        ("P L1bar^2(k)", mul(P, fl.Lbbk)),
        ("L1bar^2 L1(k)", field_L1bar(field_L1bar(field_L1(k)))),
    ]))
    # (3) Kbar(I0) = -2 conj(I0) L1(kbar)
    I0 = fl.I0()
    out.append(_report("Kbar(I0)", [
        ("Kbar(I0)", fl.Kbar(I0)),
        ("2 conj(I0) L1(kbar)", mul(conj_series(I0), fl.Lkb).scale(2)),
    ]))
    out.append(bracket_check(fl, phi))
    return out


def bracket_check(fl, phi=None):
    """[K, L1bar](phi) = -L1bar(k) L1(phi)."""
    if phi is None:
        phi = fl.P + fl.kb
    return _report("[K, L1bar]", [
        ("K L1bar phi", fl.K(field_L1bar(phi))),
        ("-L1bar K phi", -field_L1bar(fl.K(phi))),
        ("L1bar(k) L1 phi", mul(fl.Lbk, field_L1(phi))),
    ])
