"""Small worked examples used by tests, scripts and the data files."""

from __future__ import annotations

import itertools

from .decofan import DecoratedFan
from .exterior import ExteriorElement, parse_element
from .lattice import Fan
from .superlie import Subspace, SupertorusData


def _span(q: int, *vectors) -> Subspace:
    return Subspace.span(vectors, q)


def wild_chain_fan() -> DecoratedFan:
    """Abelian (1|4) torus, one ray, chain ``t1 ⊇ C·theta4 ⊇ 0``."""
    t = SupertorusData.abelian(1, 4)
    fan = Fan.build(1, [(1,)], [(0,)])
    chain = [Subspace.full(4), Subspace.coordinate(4, [3]), Subspace.zero(4)]
    return DecoratedFan.build(t, fan, None, {0: chain})


def wild_chain_alternate_generators() -> list[tuple[int, ExteriorElement]]:
    """Same decoration, last generator ``t^2 (xi4 + xi1 xi2 xi3)``."""
    gens = [(1, parse_element(4, {f"xi{i}": 1})) for i in (1, 2, 3)]
    gens.append((2, parse_element(4, {"xi4": 1, "xi1*xi2*xi3": 1})))
    return gens


WILD_CHAIN_OVERRIDE_JSON = {
    "generators": [
        {"degree": 1, "element": {"xi1": "1"}},
        {"degree": 1, "element": {"xi2": "1"}},
        {"degree": 1, "element": {"xi3": "1"}},
        {"degree": 2, "element": {"xi4": "1", "xi1*xi2*xi3": "1"}},
    ]
}


def three_chain_orthant() -> DecoratedFan:
    """Abelian (3|4) torus on the orthant with three length-4 chains."""
    q = 4
    full, zero = Subspace.full(q), Subspace.zero(q)
    s = lambda *v: _span(q, *v)  # noqa: E731
    r1 = [full, s((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)), s((0, 1, 0, 0), (0, 0, 1, 0)), s((0, 1, 0, 0)), zero]
    r2 = [full, s((2, 0, 1, 0), (0, 1, 0, 0), (0, 0, 0, 1)), s((2, 0, 1, 0), (0, 1, 0, -2)), s((0, 1, 0, -2)), zero]
    r3 = [full, s((1, 0, 0, 0), (0, 1, 0, -1), (0, 0, 1, 0)), s((1, 0, 1, 0), (0, 1, 0, -1)), s((1, 0, 1, 0)), zero]
    fan = Fan.build(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [(0, 1, 2)])
    return DecoratedFan.build(SupertorusData.abelian(3, q), fan, None, {0: r1, 1: r2, 2: r3})


def _even_smooth_decorations() -> dict[int, list[Subspace]]:
    zero = Subspace.zero(2)
    return {
        0: [_span(2, (1, -1)), zero],
        1: [_span(2, (1, 0)), zero],
        2: [_span(2, (0, 1)), zero],
    }


def even_smooth_singular_fan() -> DecoratedFan:
    """Abelian (3|2) torus on the smooth orthant whose three lines admit no adapted basis."""
    fan = Fan.build(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [(0, 1, 2)])
    return DecoratedFan.build(SupertorusData.abelian(3, 2), fan, None, _even_smooth_decorations())


def even_smooth_subdivision() -> DecoratedFan:
    """Star subdivision of the previous fan at (1,1,1), new ray decorated by 0."""
    fan = Fan.build(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)], [(0, 1, 3), (0, 2, 3), (1, 2, 3)])
    return DecoratedFan.build(SupertorusData.abelian(3, 2), fan, None, _even_smooth_decorations())


def projective_fan(n: int) -> Fan:
    """Fan of P^n: rays e_1..e_n and -(e_1+...+e_n)."""
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple([-1] * n)]
    return Fan.build(n, rays, list(itertools.combinations(range(n + 1), n)))


def matroid_obstruction_fan() -> Fan:
    """The 2-dimensional cone spanned by (1,1,0) and (1,0,1) in rank 3."""
    return Fan.build(3, [(1, 1, 0), (1, 0, 1)], [(0, 1)])


def projective_line_decorated(decorated: bool) -> DecoratedFan:
    """P^1 with the (1|1) torus ``[theta, theta] = 2x``; rays carry ``C·theta`` or 0."""
    t = SupertorusData.q1n(1)
    fan = projective_fan(1)
    if not decorated:
        return DecoratedFan.build(t, fan)
    dec = [Subspace.full(1), Subspace.zero(1)]
    return DecoratedFan.build(t, fan, None, {0: dec, 1: dec})
