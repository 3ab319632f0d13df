import random

import pytest
from gmpy2 import mpq

from rigidcr.closed_forms import check_scaling_relation, check_step_relations
from rigidcr.equivalence import decide
from rigidcr.hypersurface import (
    DegenerateError, Hypersurface, gm_model, lightcone_tube, perturb_slot, random_rank1, validate,
)
from rigidcr.normalform_c3 import (
    I0_SLOT, Q0_SLOT, V0_SLOT, extend_high_degrees, invariants_of, is_normal, model_coeff,
    normalize, prenormal_violations, prenormalize, remainder, sporadic_violations, stage_dimensions,
    stage_pins_hold, step1_levi, transported,
)
from rigidcr.rigid_maps import RigidMap, apply, dilation_rotation, identity_map
from rigidcr.series_core import ONE, GaussRat, TruncSeries, deg

SAMPLES = range(12)


def _exact(M):
    return RigidMap(TruncSeries(M.f.coeffs), TruncSeries(M.g.coeffs), TruncSeries(M.h.coeffs), M.rho)


def test_model_coefficients():
    G = gm_model(7)
    for e, c in G.F.coeffs.items():
        assert model_coeff(e) == c
    assert remainder(G).is_zero()


def test_gm_prenormalized():
    G = gm_model(7)
    H, M, log = prenormalize(G)
    assert H.F == G.F and log == []
    assert M.agrees(identity_map(), 7)


def test_lightcone_flat():
    r = normalize(lightcone_tube(8))
    assert r.branch == "flat"
    assert remainder(r.H_norm).is_zero() and r.H_norm.F.valid_order == 8


def test_step1_scaling():
    H = Hypersurface(TruncSeries({(1, 0, 1, 0): GaussRat(2), (2, 0, 0, 1): GaussRat(1),
                                  (0, 1, 2, 0): GaussRat(1)}, 4), 4)
    H1, M, info = step1_levi(H)
    assert H1.mono(1, 0, 1, 0) == ONE


def test_input_errors():
    with pytest.raises(DegenerateError):
        normalize(Hypersurface(TruncSeries({(0, 1, 0, 1): ONE}, 4), 4))
    with pytest.raises(DegenerateError):
        normalize(Hypersurface(TruncSeries({(1, 0, 1, 0): ONE, (0, 1, 0, 1): ONE}, 4), 4))
    with pytest.raises(ValueError):
        normalize(Hypersurface(TruncSeries({(1, 0, 1, 0): ONE}, 4), 4, 2))


@pytest.mark.parametrize("seed", SAMPLES)
def test_prenormal_post(seed):
    H = random_rank1(seed, 6)
    P, M, log = prenormalize(H)
    assert not prenormal_violations(P)
    assert apply(M, H).F == P.F
    G = remainder(P)
    for e in G.coeffs:
        a, b, c, d = e
        assert a + c >= 3, e
        assert not (d == 0 and c in (1, 2)), e


@pytest.mark.parametrize("seed", SAMPLES)
def test_normalize_post(seed):
    H = random_rank1(seed, 6)
    r = normalize(H, branch=False)
    assert is_normal(r.H_norm)
    assert apply(r.applied, H).F == r.H_norm.F
    assert validate(r.H_norm)["rank1"]
    # the stage predicates are monotone: every step keeps the earlier pins
    for k in range(1, 7):
        assert stage_pins_hold(r.stages[k], k) == []


@pytest.mark.parametrize("seed", SAMPLES)
def test_step_relations(seed):
    H = random_rank1(seed, 6, levi=1)
    r = normalize(H, branch=False)
    printed = check_step_relations(r.stages, r.invariants)
    failing = {(x["step"], x["target"]) for x in printed if not x["ok"]}
    assert failing <= {(5, "F0230"), (5, "F1130")}
    errata = check_step_relations(r.stages, r.invariants, "step_relations_errata.txt")
    assert all(x["ok"] for x in errata), [x for x in errata if not x["ok"]]
    assert check_scaling_relation(r.stages) == []


@pytest.mark.parametrize("seed", SAMPLES)
def test_final_relations(seed):
    r = normalize(random_rank1(seed, 6, levi=1), branch=False)
    T = r.stages["pre6"].taylor
    assert r.invariants.I0 == T(0, 2, 3, 0) + 2 * T(3, 0, 0, 1)
    assert r.invariants.V0 == GaussRat(mpq(-5, 3)) * T(0, 1, 3, 0) ** 2 + T(0, 1, 4, 0)


def test_stage_dimensions():
    assert stage_dimensions(5)[:6] == [50, 47, 23, 21, 20, 8]
    drops = [a - b for a, b in zip(stage_dimensions(5), stage_dimensions(5)[1:])]
    assert drops == [3, 24, 2, 1, 12, 3]


@pytest.mark.parametrize("seed", range(4))
def test_extend_high_degrees(seed):
    H7 = random_rank1(seed, 7)
    r5 = normalize(Hypersurface(H7.F.with_order(5), 5), branch=False)
    K = apply(_exact(r5.applied), H7)
    low = K.F.with_order(5)
    assert is_normal(Hypersurface(low, 5))
    E, M = extend_high_degrees(K)
    assert not prenormal_violations(E) and not sporadic_violations(E)
    assert E.F.with_order(5) == low
    assert E.mono(5, 0, 1, 0) == 0 and E.mono(3, 2, 2, 0) == 0
    # rigidity: on a normal input the extension is the identity
    E2, M2 = extend_high_degrees(E)
    assert E2.F == E.F and M2.agrees(identity_map(), 7)


@pytest.mark.parametrize("seed", range(6))
def test_idempotent(seed):
    r = normalize(random_rank1(seed, 6), branch=False)
    r2 = normalize(r.H_norm, branch=False)
    assert r2.H_norm.F == r.H_norm.F
    assert r2.applied.agrees(identity_map(), 6)


@pytest.mark.parametrize("seed", range(6))
def test_isotropy(seed):
    r = normalize(random_rank1(seed, 6), branch=False)
    lam = GaussRat(mpq(seed + 1, 3), mpq(2, seed + 1))
    r2 = normalize(apply(dilation_rotation(lam), r.H_norm), branch=False)
    assert decide(remainder(r.H_norm), remainder(r2.H_norm)).equivalent
    t = transported(r.invariants, lam)
    assert r2.invariants.as_tuple() == t.as_tuple()


def test_branch_I0():
    for s in range(20):
        r = normalize(random_rank1(s, 6), branch=False)
        if r.invariants.I0:
            break
    inv = r.invariants
    target = GaussRat(1, 1)
    # move to a representative with I0 = 1 + i
    H = apply(dilation_rotation(inv.I0 / target), r.H_norm)
    r2 = normalize(H)
    assert r2.invariants.I0 == target
    V0, Q0 = r2.invariants.V0, r2.invariants.Q0
    f = invariants_of(r2.branch_form)
    assert f.I0 == ONE
    # V0 picks up conj(I0)^2, not I0^2: the ratio V0/I0^2 is not isotropy invariant
    assert f.V0 == V0 / target.conj() ** 2
    assert f.Q0 == Q0 / 2
    assert r2.branch_data["invV0"] == f.V0
    assert r2.branch_data["invQ0"] == f.Q0
    # the recorded data agree across representatives
    r3 = normalize(apply(dilation_rotation(GaussRat(2, -1)), H))
    assert r3.branch_data["invV0"] == r2.branch_data["invV0"]
    assert r3.branch_data["invQ0"] == r2.branch_data["invQ0"]


def test_branch_V0():
    V0 = (GaussRat(3, 4) ** 2 / 25).conj()
    H = perturb_slot(gm_model(6), (0, 1, 4, 0), V0 / 24)
    r = normalize(H)
    assert r.branch == "V0_nonzero_I0_zero"
    assert r.invariants.V0 == V0
    assert invariants_of(r.branch_form).V0 == ONE
    x = GaussRat(mpq(3, 5), mpq(4, 5))
    assert set(map(str, r.branch_data["representatives"])) == {str(x), str(-x)}


def test_branch_V0_without_root():
    V0 = GaussRat(2)
    r = normalize(perturb_slot(gm_model(6), (0, 1, 4, 0), V0 / 24))
    assert r.branch_form is None and r.branch_data["lambda"] is None
    assert r.branch_data["V0_abs2"] == 4


def test_gm_branch_flat():
    assert normalize(gm_model(7)).branch == "flat"


@pytest.mark.parametrize("seed", range(4))
def test_perturbed_model(seed):
    rng = random.Random(seed)
    H = gm_model(7)
    for e in ((0, 1, 5, 0), (3, 0, 3, 0), (2, 1, 3, 0), (1, 2, 4, 0)):
        H = perturb_slot(H, e, GaussRat(rng.randint(-3, 3), rng.randint(1, 3)))
    r = normalize(H)
    assert is_normal(r.H_norm)
    for e in (I0_SLOT, V0_SLOT, Q0_SLOT):
        assert deg(e) <= 7
