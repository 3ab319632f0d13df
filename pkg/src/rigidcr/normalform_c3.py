"""Normal forms of rank-1, 2-nondegenerate rigid hypersurfaces in C^3.

Pipeline: remove pluriharmonic terms, then the five absorption steps
(Levi scaling, z-absorption, zeta scaling, z^2 zbar^2 removal, zeta-absorption)
repeated until every prenormalization slot is clean, then the sporadic step
fixing g_{1,0} and b_{2,0}, then the branch normalization by a dilation-rotation.

Everything works on MONOMIAL coefficients; the closed-form relations that are
stated for Taylor coefficients convert at the boundary.
"""

from dataclasses import dataclass, field

from gmpy2 import mpq

from .hypersurface import (
    DegenerateError, Hypersurface, independent_exponents, nondeg_det, rank1_order, remove_pluriharmonic,
)
from .rigid_maps import RigidMap, apply, compose, dilation_rotation, identity_map, linear_map
from .series_core import (
    EXACT, I, ONE, ZERO, GaussRat, TruncSeries, conj_exp, deg, gr, linear_combination, sqrt_gauss, sqrt_q,
)

HALF = GaussRat(mpq(1, 2))

# the Taylor coefficients carrying the invariants in the final form
I0_SLOT = (0, 2, 3, 0)
V0_SLOT = (0, 1, 4, 0)
Q0_SLOT = (1, 1, 3, 0)


@dataclass
class InvariantTriple:
    I0: GaussRat
    V0: GaussRat
    Q0: GaussRat

    def as_tuple(self):
        return (self.I0, self.V0, self.Q0)

    def is_zero(self):
        return not self.I0 and not self.V0 and not self.Q0


@dataclass
class NormalFormResult:
    H_norm: Hypersurface
    applied: RigidMap
    invariants: InvariantTriple
    branch: str
    stage_log: list = field(default_factory=list)
    stages: dict = field(default_factory=dict)
    branch_form: Hypersurface = None
    branch_data: dict = field(default_factory=dict)

    @property
    def lam(self):
        """f_z(0) of the applied map; the invariants transport through it."""
        return self.applied.f.coeff(1, 0)


# --- model subtraction and predicates ---------------------------------------

def model_coeff(e):
    """Monomial coefficient of the flat model m at e."""
    a, b, c, d = e
    if a == 1 and c == 1 and b == d:
        return ONE
    if a == 2 and c == 0 and d == b + 1:
        return HALF
    if a == 0 and c == 2 and b == d + 1:
        return HALF
    return ZERO


def remainder(H):
    """G = F - m, truncated at the degree of H."""
    out = dict(H.F.coeffs)
    n = H.F.valid_order
    for b in range(n):
        for e in ((1, b, 1, b), (2, b, 0, b + 1), (0, b + 1, 2, b)):
            if deg(e) <= n:
                v = out.get(e, ZERO) - model_coeff(e)
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
    return TruncSeries(out, n)


def prenormal_violations(H):
    """Slots breaking the prenormalization conditions (c <= 2 and d = 0 side)."""
    bad = []
    for e, c in H.F.coeffs.items():
        a, b, cc, d = e
        if deg(e) == 0:
            bad.append(e)
        elif (cc == 0 and d == 0) or (a == 0 and b == 0):
            bad.append(e)
        elif d == 0 and cc in (1, 2) and c != model_coeff(e):
            bad.append(e)
    if H.F.coeff(1, 0, 1, 0) != ONE:
        bad.append((1, 0, 1, 0))
    if H.F.valid_order >= 3 and H.F.coeff(0, 1, 2, 0) != HALF:
        bad.append((0, 1, 2, 0))
    return sorted(set(bad))


def sporadic_violations(H):
    bad = []
    if H.F.valid_order >= 4 and H.F.coeff(0, 1, 3, 0):
        bad.append((0, 1, 3, 0))
    if H.F.valid_order >= 5 and H.F.coeff(1, 1, 3, 0).im:
        bad.append((1, 1, 3, 0))
    return bad


def is_normal(H):
    return not prenormal_violations(H) and not sporadic_violations(H)


def taylor(H, e):
    return H.taylor(*e)


# --- the individual steps ---------------------------------------------------

def _holo(terms):
    return TruncSeries({(a, b, 0, 0): c for (a, b), c in terms.items()})


def step1_levi(H):
    """z' = F_{1010} z + F_{0110} zeta, w' = F_{1010} w: degree-2 part becomes z zbar."""
    p = H.F.coeff(1, 0, 1, 0)
    if not p:
        raise DegenerateError("zero Levi pivot: F_{1,0,1,0} = 0")
    if p.im:
        raise DegenerateError("F_{1,0,1,0} must be real")
    q = H.F.coeff(0, 1, 1, 0)
    M = linear_map(p, q, 0, 1, rho=p.re)
    return apply(M, H), M, {"levi": p, "zeta_zbar": q}


def step2_absorb_z(H):
    """z' = z + sum F_{a,b,1,0} z^a zeta^b over a+b >= 2."""
    phi = {(e[0], e[1]): c for e, c in H.F.coeffs.items()
           if e[2] == 1 and e[3] == 0 and e[0] + e[1] >= 2}
    M = RigidMap(TruncSeries.var("z") + _holo(phi), TruncSeries.var("zeta"), TruncSeries.zero(), 1)
    return apply(M, H), M, {"absorbed": len(phi)}


def step3_scale_zeta(H):
    """zeta' = F_{0120} zeta (Taylor), making the zeta zbar^2 coefficient 1/2."""
    c = H.F.coeff(0, 1, 2, 0) * 2
    if not c:
        raise DegenerateError("not 2-nondegenerate: F_{0,1,2,0} = 0 after z-absorption")
    M = linear_map(1, 0, 0, c)
    return apply(M, H), M, {"zeta_scale": c}


def step4_kill_2020(H):
    """zeta' = zeta + F_{2020} z^2 (monomial) removes z^2 zbar^2."""
    c = H.F.coeff(2, 0, 2, 0)
    M = RigidMap(TruncSeries.var("z"), TruncSeries.var("zeta") + _holo({(2, 0): c}), TruncSeries.zero(), 1)
    return apply(M, H), M, {"g20": c}


def step5_absorb_zeta(H):
    """zeta' = zeta + 2 sum F_{a,b,2,0} z^a zeta^b over a+b >= 2, (a,b) != (2,0)."""
    psi = {}
    for e, c in H.F.coeffs.items():
        if e[2] == 2 and e[3] == 0 and e[0] + e[1] >= 2:
            if (e[0], e[1]) == (2, 0):
                psi[(2, 0)] = c * HALF
            else:
                psi[(e[0], e[1])] = c
    psi = {k: v * 2 for k, v in psi.items()}
    M = RigidMap(TruncSeries.var("z"), TruncSeries.var("zeta") + _holo(psi), TruncSeries.zero(), 1)
    return apply(M, H), M, {"absorbed": len(psi)}


def sporadic_parameters(H):
    """(g_{1,0}, b_{2,0}) from the Taylor coefficients of a prenormalized graph."""
    T = lambda *e: H.taylor(*e)
    g10 = -T(0, 1, 3, 0) / 3
    b20 = I / 18 * (T(0, 2, 3, 0) * T(0, 1, 3, 0) - T(3, 0, 0, 2) * T(3, 0, 0, 1)
                    + T(1, 1, 3, 0) * 3 - T(3, 0, 1, 1) * 3)
    return g10, b20


def step6_map(g10, b20):
    """f = z - conj(g10)/2 z^2, g = zeta + g10 z + g20/2 z^2 with g20 = -5/2 |g10|^2 + i b20."""
    g20 = GaussRat(mpq(-5, 2) * g10.abs2()) + I * b20
    f = TruncSeries.var("z") + _holo({(2, 0): -g10.conj() * HALF})
    g = TruncSeries.var("zeta") + _holo({(1, 0): g10, (2, 0): g20 * HALF})
    return RigidMap(f, g, TruncSeries.zero(), 1)


# --- dimension accounting ---------------------------------------------------

def _canon(e):
    a, b, c, d = e
    return min(e, (c, d, a, b))


def stage_pins(step, delta):
    """{real coordinate: monomial target} fixed by a step, among independent slots.

    A real coordinate is (slot, "re"|"im") with the slot taken up to conjugation.
    """
    pins = {}

    def pin(e, value=ZERO, parts=("re", "im")):
        e2 = _canon(e)
        v = value if e2 == e else value.conj()
        for p in parts:
            if p == "im" and e2 == conj_exp(e2):
                continue
            pins[(e2, p)] = v
    if step == 1:
        pin((1, 0, 1, 0), ONE)
        pin((0, 1, 1, 0))
    elif step == 2:
        for a in range(delta):
            for b in range(delta - a):
                if 2 <= a + b <= delta - 1:
                    pin((a, b, 1, 0))
    elif step == 3:
        pin((0, 1, 2, 0), HALF)
    elif step == 4:
        pin((2, 0, 2, 0))
    elif step == 5:
        for a in range(delta):
            for b in range(delta - a):
                if 1 <= a + b <= delta - 2 and (a, b) != (0, 1):
                    pin((a, b, 2, 0))
    elif step == 6:
        pin((0, 1, 3, 0))
        pin((1, 1, 3, 0), parts=("im",))
    return {k: v for k, v in pins.items() if deg(k[0]) <= delta}


def stage_dimensions(delta=5):
    """Real dimension of the jet manifold after each of the six steps (stage 0 first)."""
    coords = set()
    for e in independent_exponents(delta):
        e2 = _canon(e)
        coords.add((e2, "re"))
        if e2 != conj_exp(e2):
            coords.add((e2, "im"))
    pinned = set()
    dims = [len(coords)]
    for step in range(1, 7):
        pinned |= set(stage_pins(step, delta)) & coords
        dims.append(len(coords) - len(pinned))
    return dims


def stage_pins_hold(H, step):
    """Pinned coordinates of all steps up to ``step`` that H violates."""
    bad = []
    delta = H.F.valid_order
    for k in range(1, step + 1):
        for (e, part), v in stage_pins(k, delta).items():
            c = H.F.coeff(*e)
            if (c.re if part == "re" else c.im) != (v.re if part == "re" else v.im):
                bad.append((k, e, part))
    return bad


# --- the pipeline -----------------------------------------------------------

class _Run:
    def __init__(self, H):
        self.H = H
        self.M = identity_map()
        self.log = []
        self.delta = H.degree

    def do(self, name, fn, *args):
        H2, M, info = fn(self.H, *args)
        self.H = H2
        self.M = compose(self.M, M, self.delta)
        rec = {"step": name}
        rec.update(info)
        self.log.append(rec)
        return H2


def _prenormal_pass(run, stages=None):
    H = run.H
    viol = prenormal_violations(H)
    if not viol:
        return False
    if H.F.coeff(1, 0, 1, 0) != ONE or H.F.coeff(0, 1, 1, 0):
        run.do("levi", step1_levi)
    if stages is not None:
        stages[1] = run.H
    if any(e[2] == 1 and e[3] == 0 and e[0] + e[1] >= 2 for e in run.H.F.coeffs):
        run.do("absorb_z", step2_absorb_z)
    if stages is not None:
        stages[2] = run.H
    if run.delta >= 3 and run.H.F.coeff(0, 1, 2, 0) != HALF:
        run.do("scale_zeta", step3_scale_zeta)
    if stages is not None:
        stages[3] = run.H
    if run.delta >= 4 and run.H.F.coeff(2, 0, 2, 0):
        run.do("kill_2020", step4_kill_2020)
    if stages is not None:
        stages[4] = run.H
    if any(e[2] == 2 and e[3] == 0 and e[0] + e[1] >= 2 for e in run.H.F.coeffs):
        run.do("absorb_zeta", step5_absorb_zeta)
    if stages is not None:
        stages[5] = run.H
    return True


def _prenormalize_run(run, stages=None, max_passes=None):
    limit = max_passes or (run.delta + 3)
    first = True
    for _ in range(limit):
        if not _prenormal_pass(run, stages if first else None):
            break
        first = False
    else:
        if prenormal_violations(run.H):
            raise RuntimeError("prenormalization did not converge")
    if prenormal_violations(run.H):
        raise RuntimeError("prenormalization did not converge")


def _check_input(H):
    if H.ambient_dim != 3:
        raise ValueError("normalization needs a C^3 graph")
    if H.degree < 3:
        raise ValueError("degree must be at least 3")
    if not H.F.coeff(1, 0, 1, 0):
        raise DegenerateError("zero Levi pivot: F_{1,0,1,0} = 0")
    if not nondeg_det(H):
        raise DegenerateError("not 2-nondegenerate at the origin")


def prenormalize(H, stages=None):
    """(H', map) with all prenormalization slots clean up to the degree of H."""
    _check_input(H)
    H0, M0 = remove_pluriharmonic(H)
    run = _Run(H0)
    run.M = M0
    _prenormalize_run(run, stages)
    return run.H, run.M, run.log


def extend_high_degrees(H, max_passes=None):
    """Absorption passes without the low-degree scalings; lower slots stay untouched."""
    run = _Run(H)
    _prenormalize_run(run, None, max_passes)
    return run.H, run.M


def invariants_of(H):
    """(I0, V0, Q0) read off a normal form as Taylor coefficients."""
    def t(e):
        return H.taylor(*e) if deg(e) <= H.F.valid_order else ZERO
    return InvariantTriple(t(I0_SLOT), t(V0_SLOT), t(Q0_SLOT))


def normalize(H, branch=True, max_rounds=8):
    """Full pipeline; returns a NormalFormResult."""
    _check_input(H)
    stages = {}
    H0, M0 = remove_pluriharmonic(H)
    stages[0] = H0
    run = _Run(H0)
    run.M = M0
    _prenormalize_run(run, stages)
    log = run.log
    rounds = 0
    while sporadic_violations(run.H):
        if rounds >= max_rounds:
            raise RuntimeError("sporadic normalization did not converge")
        g10, b20 = sporadic_parameters(run.H)
        if rounds == 0:
            stages["pre6"] = run.H
        M6 = step6_map(g10, b20)
        run.H = apply(M6, run.H)
        run.M = compose(run.M, M6, run.delta)
        log.append({"step": "sporadic", "g10": g10, "b20": b20})
        _prenormalize_run(run)
        rounds += 1
    if "pre6" not in stages:
        stages["pre6"] = run.H
    stages[6] = run.H
    H7 = run.H
    inv = invariants_of(H7)
    result = NormalFormResult(H7, run.M, inv, branch_of(inv), log, stages)
    if branch:
        branch_normalize(result)
    return result


def branch_of(inv):
    if inv.I0:
        return "I0_nonzero"
    if inv.V0:
        return "V0_nonzero_I0_zero"
    return "flat"


def transported(inv, lam):
    """Invariants after the dilation-rotation lam: I0/lam, V0/conj(lam)^2, Q0/|lam|^2."""
    lam = gr(lam)
    return InvariantTriple(inv.I0 / lam, inv.V0 / (lam.conj() * lam.conj()), inv.Q0 / lam.abs2())


def branch_normalize(result):
    """Fix the residual dilation-rotation according to the branch."""
    inv = result.invariants
    H7 = result.H_norm
    data = {}
    if result.branch == "I0_nonzero":
        lam = inv.I0
        M = dilation_rotation(lam)
        result.branch_form = apply(M, H7)
        data["lambda"] = lam
        # V0 transports with conj(lam)^2, so the invariant ratio uses conj(I0)^2
        data["invV0"] = inv.V0 / (inv.I0.conj() * inv.I0.conj())
        data["invQ0"] = inv.Q0 / inv.I0.abs2()
    elif result.branch == "V0_nonzero_I0_zero":
        x = sqrt_gauss(inv.V0.conj())
        mod = sqrt_q(inv.V0.abs2())
        data["V0_abs2"] = inv.V0.abs2()
        data["ambiguity"] = "z -> -z"
        if mod is not None:
            data["invQ0"] = inv.Q0 / mod
        else:
            data["invQ0_squared"] = inv.Q0 * inv.Q0 / inv.V0.abs2()
        if x is not None:
            M = dilation_rotation(x)
            result.branch_form = apply(M, H7)
            data["lambda"] = x
            data["representatives"] = [x, -x]
        else:
            result.branch_form = None
            data["lambda"] = None
    else:
        result.branch_form = H7
    result.branch_data = data
    return result
