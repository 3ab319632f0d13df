import random

import pytest
from gmpy2 import mpq

from rigidcr.hypersurface import gm_model, random_rank1
from rigidcr.rigid_maps import (
    RigidMap, apply, compose, count_rt_params, dilation_rotation, identity_map, invert,
    linear_map, random_rigid_map, rt_dim, h_dim, truncate_map,
)
from rigidcr.series_core import ONE, GaussRat, SeriesError, TruncSeries, conj_series, mul, substitute

Z, W = TruncSeries.var("z"), TruncSeries.var("zeta")


def test_tables():
    assert [rt_dim(d) for d in range(1, 8)] == [9, 21, 37, 57, 81, 109, 141]
    assert [h_dim(d) for d in range(2, 9)] == [3, 11, 26, 50, 85, 133, 196]
    for d in range(1, 8):
        assert count_rt_params(d) == rt_dim(d)


def test_map_preconditions():
    with pytest.raises(SeriesError):
        RigidMap(Z + TruncSeries.const(ONE), W, TruncSeries.zero())
    with pytest.raises(SeriesError):
        RigidMap(Z + W, Z + W, TruncSeries.zero())
    with pytest.raises(SeriesError):
        RigidMap(Z, W, TruncSeries.zero(), 0)
    with pytest.raises(SeriesError):
        dilation_rotation(0)


def test_identity_action():
    H = random_rank1(1, 5)
    assert apply(identity_map(), H).F == H.F


def test_inverse_examples():
    M = RigidMap(Z + mul(W, W), W, TruncSeries.zero())
    Mi = invert(M, 5)
    assert Mi.f.agrees(Z - mul(W, W)) and Mi.g.agrees(W)
    L = linear_map(2, 1, 0, 1)
    Li = invert(L, 3)
    assert Li.f.agrees((Z - W).scale(mpq(1, 2)))


@pytest.mark.parametrize("seed", range(6))
def test_group_action(seed):
    rng = random.Random(seed)
    H = random_rank1(seed, 5)
    M1, M2, M3 = (random_rigid_map(rng) for _ in range(3))
    d = H.degree
    # action axiom
    assert apply(compose(M1, M2, d), H).F == apply(M2, apply(M1, H)).F
    # inverse
    back = apply(invert(M1, d), apply(M1, H))
    assert back.F == H.F
    assert compose(M1, invert(M1, d), d).agrees(identity_map(), d)
    # associativity
    A = compose(compose(M1, M2, d), M3, d)
    B = compose(M1, compose(M2, M3, d), d)
    assert A.agrees(B, d)


@pytest.mark.parametrize("seed", range(4))
def test_fundamental_equation(seed):
    # 2 rho F + h + conj h = 2 F'(f, g, conj f, conj g) up to degree delta
    rng = random.Random(100 + seed)
    H = random_rank1(seed, 5)
    M = random_rigid_map(rng)
    H2 = apply(M, H)
    n = H.degree
    f, g = M.f.with_order(n), M.g.with_order(n)
    lhs = H.F.scale(2 * M.rho) + M.h.with_order(n) + conj_series(M.h.with_order(n))
    rhs = substitute(H2.F, f, g, conj_series(f), conj_series(g), order=n).scale(2)
    assert lhs.agrees(rhs, n)


def test_action_factors_through_truncation():
    rng = random.Random(7)
    H = random_rank1(4, 5)
    M = random_rigid_map(rng)
    bump = TruncSeries({(3, 2, 0, 0): GaussRat(5, 1), (0, 5, 0, 0): GaussRat(1)})
    # f and g only matter below degree delta (degree delta terms of f enter at degree delta+1)
    Mb = RigidMap(M.f + bump.filter(lambda e: sum(e) >= 6), M.g + bump.filter(lambda e: sum(e) >= 6), M.h, M.rho)
    assert apply(Mb, H).F == apply(M, H).F
    assert apply(truncate_map(M, H.degree), H).F == apply(M, H).F
    with pytest.raises(SeriesError):
        apply(truncate_map(M, H.degree - 1), H)


def test_residue_group_normal():
    # maps equal to the identity to order d stay so after conjugation
    rng = random.Random(3)
    d = 4
    R = RigidMap(Z + TruncSeries({(3, 2, 0, 0): GaussRat(1, 1)}), W + TruncSeries({(5, 0, 0, 0): ONE}),
                 TruncSeries({(6, 0, 0, 0): ONE}))
    for _ in range(5):
        M = random_rigid_map(rng)
        C = compose(compose(invert(M, 7), R, 7), M, 7)
        assert C.f.agrees(Z, d) and C.g.agrees(W, d) and C.rho == 1


def test_dilation_rotation():
    assert dilation_rotation(1).agrees(identity_map(), 5)
    lam = GaussRat(mpq(3, 5), mpq(4, 5))
    R = dilation_rotation(lam)
    assert R.rho == 1
    a, b = GaussRat(1, 2), GaussRat(mpq(1, 3), -1)
    AB = compose(dilation_rotation(b), dilation_rotation(a), 3)
    assert AB.agrees(dilation_rotation(a * b), 3)


def test_dilation_rotation_coefficient_law():
    # G'_{abcd} = G_{abcd} s^{2-a-c} e^{-i phi (a + 2b - c - 2d)} for lam = s e^{i phi}
    H = random_rank1(9, 5)
    lam = GaussRat(1, 2)
    H2 = apply(dilation_rotation(lam), H)
    for e, c in H.F.coeffs.items():
        a, b, cc, d = e
        # lam^{-a} (conj lam/lam)^b conj(lam)^{-cc} (lam/conj lam)^d |lam|^2
        factor = GaussRat(lam.abs2()) / lam ** a * (lam.conj() / lam) ** b / lam.conj() ** cc * (lam / lam.conj()) ** d
        assert H2.F[e] == c * factor


def test_gm_model_invariant_under_rotation_check():
    # a unimodular dilation-rotation maps the model to itself
    G = gm_model(6)
    G2 = apply(dilation_rotation(GaussRat(mpq(3, 5), mpq(4, 5))), G)
    assert G2.F == G.F
