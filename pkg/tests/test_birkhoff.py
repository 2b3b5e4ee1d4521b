from fractions import Fraction as F

import pytest

from stackymirror.birkhoff import eliminate_positive_z
from stackymirror.errors import DomainError, Obstruction
from stackymirror.series import asymptotics, i_function

from conftest import load

DIRS = ["x0", "t1", "x1"]


@pytest.fixture(scope="module")
def p2_input():
    p = load("p2")
    return p, i_function(p.ext, p.algebra, p.policy)


def test_second_order_correction(p2_input):
    p, I = p2_input
    res = eliminate_positive_z(I, DIRS, order_variable="x1", order=2)
    corr = res.correction_terms()
    assert corr["x0"].is_zero() and corr["t1"].is_zero()
    assert corr["x1"].terms == {((F(0),), (0, 2, 0, 0, 0), 1): [F(-1, 2)]}
    tau = {k: v for k, v in res.tau.terms.items()}
    assert tau == {
        ((F(0),), (1, 0, 0, 0, 0), 0): [1, 0, 0],
        ((F(0),), (0, 0, 1, 0, 0), 0): [0, 1, 0],
        ((F(0),), (0, 1, 0, 0, 0), 0): [0, 0, 1],
        ((F(1),), (0, 2, 0, 0, 0), 0): [F(-1, 2), 0, 0],
        ((F(1),), (0, 2, 1, 0, 0), 0): [F(-1, 2), 0, 0],
    }


def test_third_order_has_j_shape(p2_input):
    p, I = p2_input
    res = eliminate_positive_z(I, DIRS, order_variable="x1", order=3)
    assert asymptotics(res.J, p.algebra).shape_holds
    assert res.correction_terms()["x1"].get([0], {"x1": 3}, 2) == [F(-1, 6)]


def test_exact_range_shrinks(p2_input):
    p, I = p2_input
    res = eliminate_positive_z(I, DIRS, order_variable="x1", order=2)
    assert res.space.cutoff <= I.space.cutoff
    assert res.space.max_order <= I.space.max_order


def test_missing_direction_is_an_obstruction(p2_input):
    _, I = p2_input
    with pytest.raises(Obstruction):
        eliminate_positive_z(I, ["x0", "t1"], order_variable="x1", order=2)


def test_empty_family(p2_input):
    _, I = p2_input
    with pytest.raises(DomainError):
        eliminate_positive_z(I, [])
