import pytest
from hypothesis import given, settings, strategies as st

from stackymirror.abelian import (FGAbelianGroup, GroupHom, cokernel, free, gale_dual, imatmul,
                                  kernel, smith_normal_form)
from stackymirror.errors import InvalidFan, UnsupportedInput

matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)))


def _det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(len(m)))


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_smith_form_factorisation(a):
    u, d, v = smith_normal_form(a)
    assert imatmul(imatmul(u, a), v) == d
    assert abs(_det(u)) == 1 and abs(_det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    assert all(x >= 0 for x in diag)
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)
    nz = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag[:len(nz)] == nz


def test_normalized_invariant_factors():
    g = FGAbelianGroup.normalized(1, [4, 6])
    assert (g.rank, g.torsion_orders) == (1, (2, 12))
    assert FGAbelianGroup.normalized(0, [2, 3]).torsion_orders == (6,)
    assert FGAbelianGroup(0, (3,)).order == 3
    with pytest.raises(ValueError):
        FGAbelianGroup(0, (4, 6))


def test_kernel_of_projective_plane_rays():
    rho = GroupHom(free(3), free(2), [[-1, 1, 0], [-1, 0, 1]])
    k, incl = kernel(rho)
    assert k.rank == 1
    assert incl.rows() == [[1], [1], [1]]
    assert rho.compose(incl).is_zero()


def test_kernel_with_torsion_target():
    rho = GroupHom(free(2), FGAbelianGroup(1, (2,)), [[-1, 1], [0, 1]])
    k, incl = kernel(rho)
    assert k.rank == 1
    assert rho.compose(incl).is_zero()
    assert [abs(r[0]) for r in incl.rows()] == [2, 2]


def test_kernel_needs_free_source():
    with pytest.raises(UnsupportedInput):
        kernel(GroupHom(FGAbelianGroup(0, (2,)), free(1), [[0]]))


def test_cokernel_orders():
    g, proj = cokernel(GroupHom(free(2), free(2), [[2, 0], [0, 3]]))
    assert (g.rank, g.torsion_orders) == (0, (6,))
    g, _ = cokernel(GroupHom(free(1), free(2), [[2], [0]]))
    assert (g.rank, g.torsion_orders) == (1, (2,))


def test_gale_dual_projective_plane():
    g = gale_dual(GroupHom(free(3), free(2), [[-1, 1, 0], [-1, 0, 1]]))
    assert g.target == free(1)
    assert [abs(x) for x in g.rows()[0]] == [1, 1, 1]


def test_gale_dual_sees_torsion_twist():
    tw = gale_dual(GroupHom(free(2), FGAbelianGroup(1, (2,)), [[-1, 1], [0, 1]]))
    assert tw.target == free(1)
    assert [abs(x) for x in tw.rows()[0]] == [2, 2]
    plain = gale_dual(GroupHom(free(2), FGAbelianGroup(1, (2,)), [[-1, 1], [0, 0]]))
    assert plain.target == FGAbelianGroup(1, (2,))
    assert plain.rows() == [[1, 1], [0, 0]]


def test_gale_dual_rejects_infinite_cokernel():
    with pytest.raises(InvalidFan):
        gale_dual(GroupHom(free(1), free(2), [[1], [0]]))
