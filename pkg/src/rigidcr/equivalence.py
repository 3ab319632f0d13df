"""Equivalence of normal forms up to the residual dilation-rotations.

Two normal forms G, G' (remainders over the flat model) are equivalent iff
there are s > 0 and |t| = 1 with G_e = s^m(e) t^n(e) G'_e for every slot e.
This is decided without extracting roots: the modulus and unit parts
decouple, and each is consistent iff every integer relation among the
exponents is respected by the data.
"""

from dataclasses import dataclass, field
from math import gcd

from .series_core import ONE, GaussRat

EQUIVALENT = "equivalent"
INEQUIVALENT = "inequivalent"
UP_TO_TRUNCATION = "equivalent-up-to-truncation"


@dataclass
class MultiplicativeSystem:
    """Constraints s^m t^n = c with s > 0 real and t on the unit circle."""

    constraints: list = field(default_factory=list)

    def add(self, m, n, c, slot=None):
        if not c:
            raise ValueError("constraint value must be nonzero")
        self.constraints.append((int(m), int(n), c, slot))

    def __len__(self):
        return len(self.constraints)


@dataclass
class EquivalenceDecision:
    verdict: str
    witness: dict = field(default_factory=dict)

    @property
    def equivalent(self):
        return self.verdict != INEQUIVALENT


# --- integer linear algebra ------------------------------------------------

def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def row_reduce(v):
    """Column-reduce the integer row v by unimodular operations.

    Returns (g, U) with v U = (g, 0, ..., 0), g = gcd(v) >= 0 and U unimodular
    (as a list of columns).  Column 0 of U gives Bezout coefficients; the other
    columns are a basis of the relation lattice {k : v.k = 0}.
    """
    n = len(v)
    cols = [[int(i == j) for i in range(n)] for j in range(n)]
    v = [int(x) for x in v]
    for j in range(1, n):
        a, b = v[0], v[j]
        if b == 0:
            continue
        g, x, y = _xgcd(a, b)
        # [c0, cj] <- [x c0 + y cj, (-b/g) c0 + (a/g) cj], determinant 1
        p, q = -b // g, a // g
        c0, cj = cols[0], cols[j]
        cols[0] = [x * s + y * t for s, t in zip(c0, cj)]
        cols[j] = [p * s + q * t for s, t in zip(c0, cj)]
        v[0], v[j] = g, 0
    if n and v[0] < 0:
        v[0] = -v[0]
        cols[0] = [-s for s in cols[0]]
    return (v[0] if n else 0), cols


def relation_basis(v):
    """Basis of the integer vectors k with sum k_i v_i = 0."""
    g, cols = row_reduce(v)
    # with g = 0 the Bezout column is itself a relation
    return cols if g == 0 else cols[1:]


def _power(c, k):
    if k >= 0:
        return c ** k
    return c.inverse() ** (-k)


def _product(values, k):
    out = ONE
    for c, e in zip(values, k):
        if e:
            out = out * _power(c, e)
    return out


# --- the decision -----------------------------------------------------------

def solve_system(S):
    """Decide solvability of S; the witness describes the solution set."""
    if not S.constraints:
        return EquivalenceDecision(EQUIVALENT, {"s": "free", "t": "free"})
    ms = [m for m, _, _, _ in S.constraints]
    ns = [n for _, n, _, _ in S.constraints]
    cs = [c for _, _, c, _ in S.constraints]
    slots = [e for _, _, _, e in S.constraints]
    mods = [GaussRat(c.abs2()) for c in cs]
    # modulus part: s^(2m) = |c|^2
    for k in relation_basis(ms):
        val = _product(mods, k)
        if val != ONE:
            return EquivalenceDecision(INEQUIVALENT, {
                "violated": "modulus", "relation": _support(k, slots), "value": val})
    # unit part: t^n = c/|c|, i.e. prod c^k must be a positive real when sum k n = 0
    for k in relation_basis(ns):
        val = _product(cs, k)
        if val.im or val.re <= 0:
            return EquivalenceDecision(INEQUIVALENT, {
                "violated": "unit", "relation": _support(k, slots), "value": val})
    witness = {}
    g, cols = row_reduce(ms)
    if g:
        # s^(2g) = prod |c_i|^(2 x_i)
        witness["s"] = {"power": 2 * g, "value": _product(mods, cols[0])}
    else:
        witness["s"] = "free"
    h, cols = row_reduce(ns)
    if h:
        # t^h = P/|P| with P = prod c_i^(y_i)
        witness["t"] = {"power": h, "direction": _product(cs, cols[0])}
    else:
        witness["t"] = "free"
    return EquivalenceDecision(EQUIVALENT, witness)


def _support(k, slots):
    return [(slots[i], e) for i, e in enumerate(k) if e]


def replay(decision, S):
    """Re-run the decision on S and report whether the verdict is reproduced."""
    return solve_system(S).verdict == decision.verdict


def exponents_c3(e):
    a, b, c, d = e
    return a + c - 2, a + 2 * b - c - 2 * d


def exponents_c2(e):
    j, _, k, _ = e
    return j + k - 2, j - k


def build_system(G, Gp, exponents=exponents_c3):
    """System for G = s^m t^n G' slotwise, or an inequivalent decision on a support mismatch."""
    order = min(G.valid_order, Gp.valid_order)
    A = {e: c for e, c in G.coeffs.items() if sum(e) <= order}
    B = {e: c for e, c in Gp.coeffs.items() if sum(e) <= order}
    diff = sorted(set(A) ^ set(B))
    if diff:
        return EquivalenceDecision(INEQUIVALENT, {"violated": "support", "slot": diff[0]})
    S = MultiplicativeSystem()
    for e in sorted(A):
        m, n = exponents(e)
        S.add(m, n, A[e] / B[e], e)
    return S


def decide(G, Gp, exponents=exponents_c3):
    S = build_system(G, Gp, exponents)
    if isinstance(S, EquivalenceDecision):
        return S
    return solve_system(S)


def _truncation(dec, degree):
    if dec.verdict == EQUIVALENT:
        dec.verdict = UP_TO_TRUNCATION
        dec.witness["degree"] = degree
    return dec


def equivalent_c3(H, Hp):
    """Normalize both graphs and compare the normal forms."""
    from .hypersurface import chart_change
    from .normalform_c3 import normalize, remainder
    # the pipeline pivots on F_{1,0,1,0}; a rigid pre-map keeps the class
    r1 = normalize(chart_change(H)[0], branch=False)
    r2 = normalize(chart_change(Hp)[0], branch=False)
    delta = min(H.degree, Hp.degree)
    G1 = remainder(r1.H_norm).with_order(delta)
    G2 = remainder(r2.H_norm).with_order(delta)
    dec = decide(G1, G2)
    if r1.branch == "V0_nonzero_I0_zero" and dec.equivalent:
        # z -> -z is the isotropy t = -1, s = 1; it is inside the lattice search
        dec.witness["sign_representative"] = "both signs covered by t = -1"
    dec.witness["branches"] = (r1.branch, r2.branch)
    return _truncation(dec, delta)
