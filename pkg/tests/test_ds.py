import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supertoric.catalog import WILD_CHAIN_OVERRIDE_JSON, projective_line_decorated, wild_chain_fan
from supertoric.decofan import DecoratedFan, OutOfScope
from supertoric.ds import (
    Derivation,
    algebra_from_generators,
    chart_algebra,
    chart_derivation,
    closed_form_ds_dims,
    ds_compute,
    fr_check,
    hr1_condition_e,
    parse_override,
)
from supertoric.exterior import ExteriorElement
from supertoric.lattice import Fan
from supertoric.superlie import Subspace, SupertorusData


def _verdict(df, theta, override=None, bound=6):
    ca = chart_algebra(df, 0, override, bound)
    return fr_check(ds_compute(ca.model, chart_derivation(df, ca, theta)))


def test_wild_chain_passes_for_every_theta():
    rep = hr1_condition_e(wild_chain_fan(), 0)
    assert rep.passed
    pres = [v["presentation"] for v in rep.verdicts]
    assert pres[0] == "C[t*xi2, t*xi3, t^2*xi4]"
    assert pres[3] == "C[t, t*xi1, t*xi2, t*xi3]/(t^2)"
    assert rep.verdicts[3]["dims"] == [1, 4, 6, 4, 1, 0, 0]


def test_override_fails_at_theta1():
    df = wild_chain_fan()
    override = parse_override(4, WILD_CHAIN_OVERRIDE_JSON)
    rep = hr1_condition_e(df, 0, override)
    assert not rep.passed
    first = rep.first_failure()
    assert first["theta"] == ["1", "0", "0", "0"]
    assert first["witness"] == "t^2*xi2*xi3"
    v = _verdict(df, (1, 0, 0, 0), override)
    assert v.presentation_up_to(2) == "C[t*xi2, t*xi3]/(t^2*xi2*xi3)"


def test_override_list_form():
    items = WILD_CHAIN_OVERRIDE_JSON["generators"]
    assert parse_override(4, items) == parse_override(4, WILD_CHAIN_OVERRIDE_JSON)


def test_nonzero_square_kills_positive_degrees():
    # [theta, theta] = 2x pairs to 2 with m1, so D^2 is a non-zero scalar in degree >= 1
    rep = hr1_condition_e(projective_line_decorated(True), 0)
    assert rep.passed
    assert rep.verdicts[0]["dims"] == [1, 0, 0, 0, 0, 0, 0]


def test_theta_outside_v0_is_rejected():
    df = wild_chain_fan()
    small = DecoratedFan.build(df.torus, df.fan, None, {0: [Subspace.coordinate(4, [3]), Subspace.zero(4)]})
    with pytest.raises(OutOfScope):
        chart_derivation(small, chart_algebra(small, 0), (1, 0, 0, 0))


def _levels_fan(levels):
    q = len(levels)
    chain = [Subspace.coordinate(q, [j for j, l in enumerate(levels) if l > i]) for i in range(max(levels) + 1)]
    fan = Fan.build(1, [(1,)], [(0,)])
    return DecoratedFan.build(SupertorusData.abelian(1, q), fan, None, {0: chain})


@settings(max_examples=25)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_ds_dims_match_closed_form(levels):
    df = _levels_fan(levels)
    bound = 5
    for j in range(len(levels)):
        theta = [int(i == j) for i in range(len(levels))]
        ca = chart_algebra(df, 0, None, bound)
        ds = ds_compute(ca.model, chart_derivation(df, ca, theta))
        assert ds.dims() == closed_form_ds_dims(levels, j, bound)


def test_closed_form_small():
    # one direction of level 2 and one of level 1, theta on the first
    assert closed_form_ds_dims([2, 1], 0, 4) == [1, 2, 1, 0, 0]


@given(st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_zero_theta_is_identity(levels):
    s = len(levels)
    gens = [(l, ExteriorElement.monomial(s, [i])) for i, l in enumerate(levels)]
    alg = algebra_from_generators(s, [f"xi{i + 1}" for i in range(s)], gens, 4)
    out = ds_compute(alg, Derivation.zero(s))
    assert out.Z == alg.Z and out.dims() == alg.dims()


@given(st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_free_chart_is_fr(levels):
    s = len(levels)
    gens = [(l, ExteriorElement.monomial(s, [i])) for i, l in enumerate(levels)]
    alg = algebra_from_generators(s, [f"xi{i + 1}" for i in range(s)], gens, 4)
    v = fr_check(alg)
    assert v.fr
    # Hilbert series of C[t] ⊗ Λ(t^l xi): subsets with level sum <= k
    expected = [
        sum(1 for n in range(s + 1) for sub in itertools.combinations(levels, n) if sum(sub) <= k)
        for k in range(5)
    ]
    assert alg.dims() == expected
