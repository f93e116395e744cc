import itertools
from math import comb

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from supertoric.decofan import smooth_check, validate
from supertoric.qgr import (
    QGrError,
    SupportPattern,
    decorated_fans_equal,
    fan_faces,
    hypersimplex_polytope,
    matroid_bases,
    orbit_closure_fan,
    orbit_closure_polytope,
    plot_data,
    polytope_fan_roundtrip,
    polytope_from_fan,
    stabilizer_blocks,
    stabilizer_from_pattern,
    DecoratedPolytope,
)
from supertoric.superlie import Subspace


@st.composite
def patterns(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    r = draw(st.integers(0, n))
    rows = [[int(i == j) for j in range(r)] for i in range(r)]
    for _ in range(n - r):
        rows.append([draw(st.integers(0, 1)) for _ in range(r)])
    return SupportPattern.from_rows(rows) if rows and r else SupportPattern(n, r, tuple(() for _ in range(n)))


def _components(sp):
    """Connected components of the row/column incidence graph, by depth-first search."""
    adj = {("r", i): set() for i in range(sp.n)}
    adj.update({("c", j): set() for j in range(sp.r)})
    for i in range(sp.n):
        for j in range(sp.r):
            if sp.support[i][j]:
                adj[("r", i)].add(("c", j))
                adj[("c", j)].add(("r", i))
    seen, out = set(), []
    for i in range(sp.n):
        if ("r", i) in seen:
            continue
        stack, comp = [("r", i)], []
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            if v[0] == "r":
                comp.append(v[1])
            stack.extend(adj[v])
        out.append(sorted(comp))
    return sorted(out)


@given(patterns())
def test_blocks_match_graph_components(sp):
    assert stabilizer_blocks(sp) == _components(sp)


@given(patterns(), st.data())
def test_sparser_patterns_refine_blocks(sp, data):
    rows = [list(r) for r in sp.support]
    for i in range(sp.r, sp.n):
        for j in range(sp.r):
            if rows[i][j] and data.draw(st.booleans()):
                rows[i][j] = False
    sparse = SupportPattern(sp.n, sp.r, tuple(tuple(r) for r in rows))
    coarse = stabilizer_blocks(sp)
    for b in stabilizer_blocks(sparse):
        assert any(set(b) <= set(c) for c in coarse)


def test_partial_pattern_stabilizer():
    st_ = stabilizer_from_pattern(SupportPattern.from_rows([[1], [1], [0]]))
    assert st_.blocks == ((0, 1), (2,))
    assert st_.odd == Subspace.span([(1, 1, 0), (0, 0, 1)], 3)


@settings(max_examples=25)
@given(patterns(max_n=5))
def test_matroid_bases_against_symbolic_determinant(sp):
    syms = {}
    mat = []
    for i in range(sp.n):
        row = []
        for j in range(sp.r):
            if sp.support[i][j]:
                syms[(i, j)] = sympy.Symbol(f"a{i}_{j}")
                row.append(syms[(i, j)])
            else:
                row.append(0)
        mat.append(row)
    expected = [
        B for B in itertools.combinations(range(sp.n), sp.r)
        if sp.r == 0 or sympy.expand(sympy.Matrix([mat[i] for i in B]).det()) != 0
    ]
    assert matroid_bases(sp) == expected


@pytest.mark.parametrize("r,n", [(1, 2), (1, 3), (2, 4)])
def test_generic_orbit_matches_hypersimplex(r, n):
    sp = SupportPattern.generic(r, n)
    assert len(matroid_bases(sp)) == comb(n, r)
    df = orbit_closure_fan(sp)
    dp = hypersimplex_polytope(r, n)
    assert validate(df, "large_orbit").valid
    assert decorated_fans_equal(df, polytope_fan_roundtrip(dp))
    assert polytope_from_fan(df, dp) == dp
    # cones and faces correspond with complementary dimensions
    faces = fan_faces(df, dp)
    assert len(set(faces.values())) == len(faces) == len(dp.faces)
    for idx, ids in faces.items():
        pts = [dp.vertices[k] for k in ids]
        fdim = sympy.Matrix([[a - b for a, b in zip(v, pts[0])] for v in pts]).rank()
        assert fdim + df.cone(idx).dim == dp.lattice.p


def test_segment():
    dp = hypersimplex_polytope(1, 2)
    assert dp.dim == 1 and len(dp.faces) == 3
    df = polytope_fan_roundtrip(dp)
    assert sorted(df.fan.rays) == [(-1,), (1,)]
    assert df.h == Subspace.span([(1, 1)], 2)
    assert all(df.V(r, 0) == Subspace.full(2) and df.V(r, 1) == df.h for r in range(2))


def test_octahedron_fan_is_not_smooth():
    df = orbit_closure_fan(SupportPattern.generic(2, 4))
    assert len(df.fan.rays) == 8
    assert smooth_check(df).smooth is False


@pytest.mark.parametrize("r", [0, 3])
def test_point_hypersimplex(r):
    dp = hypersimplex_polytope(r, 3)
    assert dp.dim == 0 and dp.lattice.p == 0
    df = polytope_fan_roundtrip(dp)
    assert df.fan.rays == ()


def test_partial_pattern_orbit():
    sp = SupportPattern.from_rows([[1], [1], [0]])
    df = orbit_closure_fan(sp)
    assert validate(df, "large_orbit").valid
    assert df.torus.p == 1
    dp = orbit_closure_polytope(sp)
    assert DecoratedPolytope.from_json(dp.to_json()) == dp
    assert plot_data(dp)["dim"] == 1


def test_pattern_errors():
    with pytest.raises(QGrError):
        SupportPattern.from_rows([[0], [1]])
    with pytest.raises(QGrError):
        matroid_bases(SupportPattern.generic(1, 7))
