"""Fixture suites run by the ``selftest`` command."""

from .closed_forms import (
    check_scaling_relation, check_step_relations, closed_form_I0, closed_form_V0,
)
from .cr_fields import verify_kernel_identities
from .hypersurface import random_rank1
from .normalform_c3 import normalize

# printed relations that fail on exact data; the errata fixture carries the fix
KNOWN_ERRATA = {(5, "F0230"), (5, "F1130")}


def _record(name, ok, detail="", expected_failure=False):
    return {"fixture": name, "ok": bool(ok), "expected_failure": expected_failure, "detail": detail}


def run(samples=5, delta=6, seed=0):
    """Per-fixture records over a few deterministic samples with F_{1010} = 1."""
    results = {}

    def bump(key, ok, detail="", expected_failure=False):
        rec = results.setdefault(key, _record(key, True, "", expected_failure))
        if not ok:
            rec["ok"] = False
            rec["detail"] = rec["detail"] or detail

    for s in range(seed, seed + samples):
        H = random_rank1(s, delta, levi=1)
        res = normalize(H, branch=False)
        for rec in check_step_relations(res.stages, res.invariants):
            key = "printed step %d: %s" % (rec["step"], rec["target"])
            bump(key, rec["ok"], "sample %d" % s, (rec["step"], rec["target"]) in KNOWN_ERRATA)
        for rec in check_step_relations(res.stages, res.invariants, "step_relations_errata.txt"):
            bump("errata step %d: %s" % (rec["step"], rec["target"]), rec["ok"], "sample %d" % s)
        bad = check_scaling_relation(res.stages)
        bump("zeta scaling relation", not bad, "slots %r" % (bad[:3],))
        bump("I0 numerator (52 terms)", closed_form_I0(H) == res.invariants.I0, "sample %d" % s)
        bump("V0 numerator (11 terms)", closed_form_V0(H) == res.invariants.V0, "sample %d" % s)
        for rep in verify_kernel_identities(H):
            bump("identity " + rep.name, rep.ok, repr(rep.failing_terms[:2]))
    out = list(results.values())
    for rec in out:
        if rec["expected_failure"] and not rec["ok"]:
            rec["detail"] = "known misprint; corrected form in the errata fixture"
    return out


def all_ok(records):
    return all(r["ok"] or r["expected_failure"] for r in records)
