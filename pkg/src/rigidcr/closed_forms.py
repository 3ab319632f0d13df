"""Closed-form invariant numerators stored as text fixtures, evaluated on Taylor jets."""

import json
import re
from functools import lru_cache
from importlib import resources

from gmpy2 import mpq

from .series_core import ONE, ZERO, GaussRat, gr, sqrt_q

_FACTOR = re.compile(r"^F(\d)(\d)(\d)(\d)(?:\^(\d+))?$")


def parse_polynomial(text):
    """Lines '+12 F0110 F1020^2' -> [(coefficient, ((exponent, power), ...)), ...]."""
    terms = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, *facs = line.split()
        coef = mpq(head.lstrip("+"))
        mons = []
        for f in facs:
            m = _FACTOR.match(f)
            if not m:
                raise ValueError("bad factor %r" % f)
            e = tuple(int(x) for x in m.group(1, 2, 3, 4))
            mons.append((e, int(m.group(5) or 1)))
        terms.append((coef, tuple(mons)))
    return terms


@lru_cache(maxsize=None)
def load_fixture(name):
    return resources.files("rigidcr").joinpath("fixtures", name).read_text()


@lru_cache(maxsize=None)
def constants():
    return json.loads(load_fixture("constants.json"))


def bridge_factor(name):
    return mpq(constants()["bridge"][name]["factor"])


def bridge_prediction(name, jet_value, lam):
    """Differential-route value predicted from a jet-route normal-form value."""
    lam = gr(lam)
    transport = {"I0": lam, "V0": lam.conj() * lam.conj(), "Q0": GaussRat(lam.abs2())}[name]
    return jet_value * transport * GaussRat(bridge_factor(name))


def c2_R_constant():
    return mpq(constants()["c2"]["R_over_F22"])


@lru_cache(maxsize=None)
def numerator(name):
    return tuple(parse_polynomial(load_fixture(name)))


def evaluate(terms, T):
    """T maps an exponent tuple to its Taylor coefficient."""
    total = ZERO
    for coef, mons in terms:
        v = GaussRat(coef)
        for e, p in mons:
            v = v * T(e) ** p
        total = total + v
    return total


def _T(H):
    return lambda e: H.taylor(*e)


def nondeg_factor(T):
    return T((0, 1, 1, 0)) * T((1, 0, 2, 0)) - T((0, 1, 2, 0)) * T((1, 0, 1, 0))


def closed_form_V0(H):
    T = _T(H)
    num = evaluate(numerator("v0_numerator.txt"), T)
    d = nondeg_factor(T)
    return num / (T((1, 0, 1, 0)) * 3 * d * d)


def closed_form_I0(H):
    """None when F_{1010}^{3/2} is irrational."""
    T = _T(H)
    num = evaluate(numerator("i0_numerator.txt"), T)
    p = T((1, 0, 1, 0))
    r = sqrt_q(p.re) if not p.im else None
    if r is None:
        return None
    d = nondeg_factor(T)
    d2 = T((1, 0, 0, 1)) * T((2, 0, 1, 0)) - T((1, 0, 1, 0)) * T((2, 0, 0, 1))
    return num / (GaussRat(p.re * r) * d * d * d * d2)


def _parse_rhs(text):
    """'-3 F0120 F1020 +1 F0130' -> polynomial terms."""
    lines = []
    cur = []
    for tok in text.split():
        if tok[0] in "+-" and not tok.startswith("F"):
            if cur:
                lines.append(" ".join(cur))
            cur = [tok]
        else:
            cur.append(tok)
    if cur:
        lines.append(" ".join(cur))
    return parse_polynomial("\n".join(lines))


@lru_cache(maxsize=None)
def step_relations(name="step_relations.txt"):
    """{step: [(target, terms), ...]} from a relations fixture."""
    out = {}
    for line in load_fixture(name).splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        lhs, rhs = line.split("=", 1)
        step, target = lhs.split()
        out.setdefault(int(step), []).append((target, tuple(_parse_rhs(rhs))))
    return out


def target_value(target, H, invariants=None):
    if target in ("I0", "V0", "Q0"):
        return getattr(invariants, target)
    e = tuple(int(x) for x in target[1:])
    return H.taylor(*e)


def check_step_relations(stages, invariants, name="step_relations.txt"):
    """Evaluate every relation of a fixture on a stage dict from normalize; list of records."""
    prev = {2: 1, 4: 3, 5: 4, 6: "pre6"}
    report = []
    for step, rels in sorted(step_relations(name).items()):
        src = stages[prev[step]]
        dst = stages[step]
        for target, terms in rels:
            want = evaluate(terms, _T(src))
            got = target_value(target, dst, invariants)
            report.append({"step": step, "target": target, "ok": want == got,
                           "expected": want, "actual": got})
    return report


def check_scaling_relation(stages, delta=5):
    """F^(3)_{a,b,c,0} = F^(2)_{a,b,c,0} (F^(2)_{0,1,2,0})^{-b}, up to degree delta."""
    H2, H3 = stages[2], stages[3]
    s = H2.taylor(0, 1, 2, 0)
    bad = []
    for a in range(delta + 1):
        for b in range(delta + 1 - a):
            for c in range(delta + 1 - a - b):
                if a + b + c < 2:
                    continue
                if H3.taylor(a, b, c, 0) != H2.taylor(a, b, c, 0) / s ** b:
                    bad.append((a, b, c, 0))
    return bad
