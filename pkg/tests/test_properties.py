from fractions import Fraction as F
from functools import lru_cache

from hypothesis import given, settings, strategies as st

from stackymirror.series import Series, SeriesSpace, compose_map, reverse
from stackymirror.stackyfan import ceil, frac

from conftest import load

SPACE = SeriesSpace(qdim=1, vars=("x", "y"), var_weights=(F(1), F(1, 2)), var_orders=(0, 0),
                    q_weights=(F(2),), cutoff=F(4), max_order=None)
ONE_VAR = SeriesSpace(qdim=0, vars=("x",), var_weights=(F(1),), var_orders=(0,), q_weights=(),
                      cutoff=F(6), max_order=None)


@lru_cache(maxsize=None)
def points(name):
    return load(name).ext.lattice_points_near_zero(2)


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
keys = st.tuples(st.tuples(st.integers(0, 2).map(F)),
                 st.tuples(st.integers(0, 4), st.integers(0, 4)),
                 st.integers(-1, 1))
series = st.dictionaries(keys, fractions.map(lambda c: [c]), max_size=6).map(lambda d: Series(SPACE, d))


@settings(max_examples=60, deadline=None)
@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b - b == a


@settings(max_examples=40, deadline=None)
@given(series, fractions.filter(bool))
def test_inverse(a, c0):
    u = a.filter(lambda k: k[2] == 0) + Series.constant(SPACE, c0)
    assert u * u.inverse() == Series.constant(SPACE, 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(fractions, min_size=5, max_size=5), fractions.filter(bool))
def test_reversion_round_trip(higher, lead):
    terms = {((), (1,), 0): [lead]}
    terms.update({((), (e,), 0): [c] for e, c in enumerate(higher, start=2) if c})
    tau = Series(ONE_VAR, terms)
    rev = reverse(tau, ["x"], ["1"], ["y"])
    assert compose_map(rev, tau).terms == {((), (1,), 0): [F(1)]}


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["p113", "p_2_2", "p1_bmu2", "surface", "bmu3"]), st.data())
def test_reduction_lands_in_box(name, data):
    ext = load(name).ext
    lam = data.draw(st.sampled_from(points(name)))
    b = ext.reduction(lam.dk)
    lat = ext.base.lattice
    v = lat.zero()
    for x, g in zip(lam.coords, ext.base.rays + ext.s_elements):
        v = lat.add(v, lat.scale(ceil(x), g))
    assert v == b.value
    assert all(frac(-lam.coords[i]) == 0 or i in b.sigma for i in range(ext.n))
