import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from supertoric.superlie import (
    DecorationChain,
    Subspace,
    SupertorusData,
    UndecidedAtBound,
    adapted_basis_exists,
    bracket_eval,
    bracket_subspaces,
    is_adapted,
    is_isotropic,
)

from conftest import small_ints, subspaces

vec3 = st.lists(small_ints, min_size=3, max_size=3)


@given(subspaces(3), subspaces(3))
def test_dimension_formula(a, b):
    assert (a + b).dim + (a & b).dim == a.dim + b.dim
    assert a & b <= a and a <= a + b


@given(subspaces(4))
def test_annihilator_involution_and_rank(a):
    assert a.annihilator().annihilator() == a
    assert a.annihilator().dim == 4 - a.dim
    assert a.dim == (sympy.Matrix(a.rows).rank() if a.rows else 0)


@given(st.lists(vec3, max_size=4))
def test_span_is_canonical(vs):
    a = Subspace.span(vs, 3)
    b = Subspace.span(list(reversed(vs)) + [[0, 0, 0]], 3)
    assert a == b and hash(a) == hash(b)


def test_subspace_json_roundtrip():
    s = Subspace.span([(1, 2, 0), (0, 1, "1/2")], 3)
    assert Subspace.from_json(s.to_json(), 3) == s


def test_q1n_brackets():
    t = SupertorusData.q1n(3)
    assert bracket_eval(t, (1, 0, 0), (1, 0, 0)) == (2, 0, 0)
    assert bracket_eval(t, (1, 0, 0), (0, 1, 0)) == (0, 0, 0)
    assert bracket_eval(t, (1, 1, 0), (1, 1, 0)) == (2, 2, 0)
    assert not t.is_abelian
    assert bracket_subspaces(t, Subspace.full(3), Subspace.full(3)) == Subspace.full(3)


@given(vec3, vec3)
def test_bracket_is_symmetric_and_bilinear(u, v):
    t = SupertorusData.from_brackets(2, 3, [[[i + j, i * j] for j in range(3)] for i in range(3)])
    assert bracket_eval(t, u, v) == bracket_eval(t, v, u)
    w = [a + b for a, b in zip(u, v)]
    lhs = bracket_eval(t, w, w)
    rhs = [a + 2 * b + c for a, b, c in zip(bracket_eval(t, u, u), bracket_eval(t, u, v), bracket_eval(t, v, v))]
    assert list(lhs) == rhs


def test_isotropy():
    t = SupertorusData.q1n(2)
    w = Subspace.span([(1, 0)], 2)
    assert is_isotropic(t, w, (0, 5))
    assert not is_isotropic(t, w, (1, 0))


def test_from_brackets_rejects_asymmetric():
    with pytest.raises(ValueError):
        SupertorusData.from_brackets(1, 2, [[[0], [1]], [[0], [0]]])


def test_chain_normalisation_and_levels():
    h = Subspace.zero(2)
    line = Subspace.span([(1, 1)], 2)
    c = DecorationChain.of(Subspace.full(2), line, line, h, h)
    assert c.spaces == (Subspace.full(2), line, line, h)
    assert c.level(10) == h and c.level(2) == line
    assert c.jump_indices == [1, 3]
    with pytest.raises(ValueError):
        DecorationChain((h, line))


def test_three_lines_in_a_plane_have_no_adapted_basis():
    lines = [Subspace.span([v], 2) for v in ((1, 0), (0, 1), (1, -1))]
    res = adapted_basis_exists(lines)
    assert not res.exists
    assert set(res.witness) == set(lines)


def test_flag_has_adapted_basis():
    flag = [Subspace.span([(1, 2, 3)], 3), Subspace.span([(1, 2, 3), (0, 1, 1)], 3), Subspace.full(3)]
    res = adapted_basis_exists(flag)
    assert res.exists and is_adapted(res.basis, flag)


@given(st.lists(subspaces(3), min_size=1, max_size=4))
def test_adapted_basis_certificates(family):
    try:
        res = adapted_basis_exists(family, bound=256)
    except UndecidedAtBound:
        return
    if res.exists:
        assert is_adapted(res.basis, family)
    else:
        a, b, c = res.witness
        # modular law failure rules out any adapted basis
        assert (a & (b + c)).dim != ((a & b) + (a & c)).dim
