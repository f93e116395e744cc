import itertools

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from supertoric.catalog import projective_fan
from supertoric.lattice import (
    Cone,
    Fan,
    LatticeError,
    UnsupportedCone,
    characters_to_test,
    dual_cone,
    dual_semigroup_generators,
    face_of,
    hilbert_basis,
    is_smooth_cone,
    pairing,
    refine_fan,
    same_support,
)
from supertoric.sampling import random_fan

from conftest import seeds

coords = st.integers(-2, 2)


@st.composite
def cones(draw, rank=None, full=False):
    n = rank or draw(st.integers(1, 3))
    k = draw(st.integers(1, 4))
    gens = draw(st.lists(st.lists(coords, min_size=n, max_size=n).filter(any), min_size=k, max_size=k))
    c = Cone.from_generators(gens, n)
    if full:
        assume(c.dim == n)
    return c


@given(cones())
def test_dual_is_an_involution(c):
    assert dual_cone(dual_cone(c)).same_set(c)


@given(cones(), st.lists(coords, min_size=3, max_size=3))
def test_dual_pairs_nonnegatively(c, v):
    v = tuple(v[: c.rank])
    d = dual_cone(c)
    assert all(pairing(m, g) >= 0 for m in d.rays for g in c.rays)
    # membership in the dual agrees with the pairing test on the generators
    assert d.contains(v) == all(pairing(v, g) >= 0 for g in c.rays)


def _box_points(bounds):
    return itertools.product(*[range(-b, b + 1) for b in bounds])


def _brute_hilbert_basis(c):
    """Irreducible lattice points of a full-dimensional pointed cone."""
    w = tuple(sum(m[i] for m in c.inequalities) for i in range(c.rank))
    cap = sum(pairing(w, g) for g in c.rays)
    # the slice {x in c : <w, x> <= cap} lies in this box
    bounds = [max((abs(g[k]) * cap + pairing(w, g) - 1) // pairing(w, g) for g in c.rays) for k in range(c.rank)]
    pts = [p for p in _box_points(bounds) if any(p) and c.contains(p) and pairing(w, p) <= cap]
    pset = set(pts)
    out = []
    for x in pts:
        if not any(y != x and tuple(a - b for a, b in zip(x, y)) in pset for y in pts):
            out.append(x)
    return sorted(out)


@given(cones(full=True))
def test_hilbert_basis_box_completeness(c):
    assume(c.is_pointed)
    assert hilbert_basis(c) == _brute_hilbert_basis(c)


def test_hilbert_basis_classic():
    c = Cone.from_generators([(0, 1), (2, -1)])
    assert hilbert_basis(c) == [(0, 1), (1, 0), (2, -1)]
    assert hilbert_basis(Cone.from_generators([(1, 0), (1, 3)])) == [(1, 0), (1, 1), (1, 2), (1, 3)]


def test_hilbert_basis_needs_pointed():
    with pytest.raises(UnsupportedCone):
        hilbert_basis(Cone.from_generators([(1, 0), (-1, 0)]))


@given(cones())
def test_dual_semigroup_generators_cover_characters(c):
    assume(c.is_pointed)
    hb, lin = dual_semigroup_generators(c)
    for m in hb:
        assert all(pairing(m, g) >= 0 for g in c.rays)
    for v in lin:
        assert all(pairing(v, g) == 0 for g in c.rays)
    assert len(lin) == c.rank - c.dim
    for m in characters_to_test(c, 2):
        assert all(pairing(m, g) >= 0 for g in c.rays)


@given(cones())
def test_smooth_cone_against_sympy(c):
    rows = list(c.canonical.rays)
    simplicial = sympy.Matrix(rows).rank() == len(rows)
    expected = simplicial and sympy.gcd_list(
        [abs(sympy.Matrix([rows[i] for i in range(len(rows))])[:, list(cols)].det())
         for cols in itertools.combinations(range(c.rank), len(rows))]
    ) == 1
    assert is_smooth_cone(c.canonical) == bool(expected)


def test_face_of():
    c = Cone.from_generators([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    f = face_of(c, (1, 0, 0))
    assert f.same_set(Cone.from_generators([(0, 1, 0), (0, 0, 1)]))


def test_fan_check_detects_overlap():
    bad = Fan.build(2, [(1, 0), (0, 1), (1, 1)], [(0, 1), (1, 2)])
    assert bad.check()
    assert projective_fan(2).check() == []


def test_fan_rejects_non_primitive_ray():
    with pytest.raises(LatticeError):
        Fan.build(2, [(2, 0)], [(0,)])


def test_fan_json_roundtrip():
    f = projective_fan(3)
    assert Fan.from_json(f.to_json()) == f


@given(seeds)
def test_refinement_is_smooth_with_same_support(rng):
    f = random_fan(rng, rng.randint(2, 3))
    g = refine_fan(f)
    assert g.check() == []
    assert all(is_smooth_cone(g.cone(c)) for c in g.maximal_cones)
    assert same_support(f, g)
    assert g.rays[: len(f.rays)] == f.rays
    for c in g.maximal_cones:
        assert sum(1 for i in c if i < len(f.rays)) <= 1


def test_refinement_of_singular_cone():
    f = Fan.build(2, [(1, 0), (1, 2)], [(0, 1)])
    g = refine_fan(f)
    assert (1, 1) in g.rays
    assert all(is_smooth_cone(g.cone(c)) for c in g.maximal_cones)
