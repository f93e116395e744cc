"""Acceptance criteria, one test each, with a printed PASS/FAIL line and a time budget.

Run ``pytest tests/test_acceptance.py -v`` (the summary lines are printed at the
end of the session) or ``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from math import comb
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from supertoric.catalog import (  # noqa: E402
    WILD_CHAIN_OVERRIDE_JSON,
    even_smooth_singular_fan,
    even_smooth_subdivision,
    matroid_obstruction_fan,
    projective_fan,
    projective_line_decorated,
    three_chain_orthant,
    wild_chain_fan,
)
from supertoric.decofan import (  # noqa: E402
    dj_candidate_spaces,
    dj_conditions,
    enumerate_decorations,
    induced_sigma_weight_space,
    klyachko_export,
    klyachko_import,
    morphism_check,
    orbit_stabilizer,
    orbit_stabilizer_from_chart,
    resolve,
    sigma_weight_space,
    smooth_check,
    validate,
)
from supertoric.ds import chart_algebra, chart_derivation, ds_compute, fr_check, hr1_condition_e, parse_override  # noqa: E402
from supertoric.exterior import (  # noqa: E402
    ExteriorElement,
    induced_weight_space,
    is_decomposably_generated,
    parse_element,
    right_derivation,
)
from supertoric.lattice import Cone, characters_to_test, dual_cone, hilbert_basis, same_support  # noqa: E402
from supertoric.qgr import (  # noqa: E402
    SupportPattern,
    decorated_fans_equal,
    hypersimplex_polytope,
    orbit_closure_fan,
    orbit_closure_polytope,
    polytope_fan_roundtrip,
    polytope_from_fan,
)
from supertoric.sampling import SampleConfig, random_abelian_general, random_large_orbit, sample_valid  # noqa: E402
from supertoric.superlie import DecorationChain, Subspace, SupertorusData  # noqa: E402

RESULTS: list[str] = []


def report(label: str, ok: bool, elapsed: float, budget: float, detail: str = "") -> None:
    ok = ok and elapsed <= budget
    line = f"[{'PASS' if ok else 'FAIL'}] {label} ({elapsed:.2f} s, budget {budget:g} s){': ' + detail if detail else ''}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# 1 -------------------------------------------------------------------------


def test_c1_weight_space_intersection():
    t0 = time.perf_counter()
    df = three_chain_orthant()
    m = (5, 5, 5)
    ws = sigma_weight_space(df, (0, 1, 2), m)
    rendered = ws.render()
    generators = [induced_weight_space(df.torus, W, m) for W in dj_candidate_spaces(df, (0, 1, 2), m)]
    decomposable = is_decomposably_generated(ws, generators)
    omega = parse_element(4, {"xi1*xi2": 1, "xi3*xi4": 1})
    # omega ∧ omega != 0, so omega is not a product of two linear forms
    indecomposable = not (omega * omega).is_zero()
    elapsed = time.perf_counter() - t0
    ok = ws.dim == 6 and "xi1*xi2+xi3*xi4" in rendered and decomposable is False and indecomposable
    report("C1 weight-space intersection at (5,5,5)", ok, elapsed, 1.0,
           f"dim={ws.dim}, basis={rendered}, decomposably_generated={decomposable}")


# 2 -------------------------------------------------------------------------


def test_c2_hr1_discrimination():
    t0 = time.perf_counter()
    df = wild_chain_fan()
    plain = hr1_condition_e(df, 0, None, 6)
    override = parse_override(4, WILD_CHAIN_OVERRIDE_JSON)
    alt = hr1_condition_e(df, 0, override, 6)
    first = alt.first_failure()
    ca = chart_algebra(df, 0, override, 6)
    alt_theta1 = fr_check(ds_compute(ca.model, chart_derivation(df, ca, (1, 0, 0, 0))))
    elapsed = time.perf_counter() - t0
    pres_a = plain.verdicts[0]["presentation"]
    pres_alt = alt_theta1.presentation_up_to(2)
    ok = (
        plain.passed
        and not alt.passed
        and first["theta"] == ["1", "0", "0", "0"]
        and first["witness"] == "t^2*xi2*xi3"
        and alt.bound == 6
        and pres_a == "C[t*xi2, t*xi3, t^2*xi4]"
        and pres_alt == "C[t*xi2, t*xi3]/(t^2*xi2*xi3)"
    )
    report("C2 HR1 discrimination (DS then FR)", ok, elapsed, 1.0,
           f"A: {pres_a}; A' at theta1: {pres_alt} (through degree 2), witness {first['witness']}")


# 3 -------------------------------------------------------------------------


def test_c3_smoothness():
    t0 = time.perf_counter()
    rep = smooth_check(even_smooth_singular_fan())
    rep2 = smooth_check(even_smooth_subdivision())
    elapsed = time.perf_counter() - t0
    w = rep.witness or {}
    family = {tuple(tuple(r) for r in s) for s in w.get("witness", [])}
    expected = {(("0", "1"),), (("1", "0"),), (("1", "-1"),)}
    ok = rep.smooth is False and w.get("a") is True and w.get("b") is False and family == expected and rep2.smooth is True
    report("C3 smoothness: even-smooth but singular, subdivision smooth", ok, elapsed, 1.0,
           f"witness cone {w.get('cone')}, failing condition b")


# 4 -------------------------------------------------------------------------


def test_c4_resolution():
    t0 = time.perf_counter()
    df = even_smooth_singular_fan()
    df2, phi = resolve(df)
    smooth = smooth_check(df2).smooth
    morph = morphism_check(df2, df, phi).ok
    support = same_support(df.fan, df2.fan)
    new = range(len(df.fan.rays), len(df2.fan.rays))
    constant = all(df2.chains[r] == DecorationChain.constant(df2.h) for r in new)
    elapsed = time.perf_counter() - t0
    ok = smooth is True and morph and support and constant and len(new) > 0
    report("C4 resolution", ok, elapsed, 5.0, f"{len(new)} new rays, smooth={smooth}, morphism={morph}")


# 5 -------------------------------------------------------------------------


def test_c5_enumeration():
    t0 = time.perf_counter()
    counts = {n: len(enumerate_decorations(SupertorusData.q1n(n), projective_fan(n))) for n in (1, 2, 3)}
    obstruction = enumerate_decorations(SupertorusData.q1n(3), matroid_obstruction_fan())
    doubly = sum(f.is_doubly_decorated(c) for f in obstruction for c in f.fan.maximal_cones)
    elapsed = time.perf_counter() - t0
    expected = {n: 2 ** n * (1 + 2 ** (n - 1)) for n in (1, 2, 3)}
    ok = counts == expected == {1: 4, 2: 12, 3: 40} and doubly == 0
    report("C5 enumeration on P^n with Q(1)^n", ok, elapsed, 5.0,
           f"counts={counts}, obstruction outputs={len(obstruction)}, doubly decorated={doubly}")


# 6 -------------------------------------------------------------------------


def test_c6_large_orbit_equivalence():
    t0 = time.perf_counter()
    fans = 0
    checks = 0
    nonabelian = 0
    mismatches = []
    for seed in range(100):
        df = sample_valid(random.Random(seed), SampleConfig(max_p=4, max_q=4, large_orbit=True))
        fans += 1
        nonabelian += not df.torus.is_abelian
        for idx in df.fan.all_cones:
            for m in characters_to_test(df.cone(idx), 2):
                checks += 1
                a = sigma_weight_space(df, idx, m)
                b = induced_sigma_weight_space(df, idx, m)
                if not (a <= b and b <= a):
                    mismatches.append((seed, idx, m))
    elapsed = time.perf_counter() - t0
    report("C6 large-orbit equivalence of the two weight-space routes", not mismatches and fans == 100, elapsed, 60.0,
           f"{fans} fans ({nonabelian} non-abelian), {checks} (cone, m) checks, {len(mismatches)} mismatches")


# 7 -------------------------------------------------------------------------


def _quotient_line(s: Subspace) -> Subspace:
    """Image under Q^2 -> Q, (a, b) -> a - b, whose kernel is span(1, 1)."""
    return Subspace.span([(r[0] - r[1],) for r in s.rows], 1)


def test_c7_qgr():
    t0 = time.perf_counter()
    # the decorated segment: modulo h it is the Q(1) projective line with both rays decorated by t1
    sp = SupportPattern.generic(1, 2)
    seg = orbit_closure_fan(sp)
    poly = orbit_closure_polytope(sp)
    ref = projective_line_decorated(True)
    same_rays = sorted(seg.fan.rays) == sorted(ref.fan.rays)
    same_decor = all(
        _quotient_line(seg.V(i, k)) == ref.V(ref.fan.index_of(u), k) for i, u in enumerate(seg.fan.rays) for k in (0, 1)
    )
    w_dims = sorted((len(f.vertex_ids), f.W.dim) for f in poly.faces)
    segment_ok = (
        same_rays and same_decor and _quotient_line(seg.h).dim == 0 and w_dims == [(1, 0), (1, 0), (2, 1)]
        and decorated_fans_equal(seg, polytope_fan_roundtrip(poly))
    )
    generic = {}
    for r, n in ((1, 2), (1, 3), (2, 4)):
        df = orbit_closure_fan(SupportPattern.generic(r, n))
        dp = hypersimplex_polytope(r, n)
        generic[(r, n)] = (
            decorated_fans_equal(df, polytope_fan_roundtrip(dp))
            and polytope_from_fan(df, dp) == dp
            and validate(df, "large_orbit").valid
            and len(dp.vertices) == comb(n, r)
        )
    elapsed = time.perf_counter() - t0
    ok = segment_ok and all(generic.values())
    report("C7 QGr segment and generic orbit fans vs hypersimplex", ok, elapsed, 5.0,
           f"segment={segment_ok}, generic={ {f'{r},{n}': v for (r, n), v in generic.items()} }")


# 8 -------------------------------------------------------------------------


def test_c8_orbit_stabilizers():
    t0 = time.perf_counter()
    cones = 0
    bad = []
    for seed in range(50):
        rng = random.Random(10_000 + seed)
        cfg = SampleConfig(max_p=4, max_q=4, large_orbit=seed % 2 == 0)
        df = sample_valid(rng, cfg)
        for idx in df.fan.all_cones:
            cones += 1
            even, odd = orbit_stabilizer_from_chart(df, idx)
            structural = (
                even == Subspace.span([df.u(r) for r in idx], df.torus.p) and odd == df.V_sigma0(idx)
            )
            if not structural or orbit_stabilizer(df, idx) != (even, odd):
                bad.append((seed, idx))
    elapsed = time.perf_counter() - t0
    report("C8 orbit stabilizers on 50 random valid fans", not bad, elapsed, 10.0,
           f"{cones} cones, {len(bad)} disagreements")


# 9 -------------------------------------------------------------------------


def _random_cone(rng: random.Random, rank: int) -> Cone:
    while True:
        gens = [[rng.randint(-2, 2) for _ in range(rank)] for _ in range(rng.randint(1, 4))]
        if all(any(g) for g in gens):
            return Cone.from_generators(gens, rank)


def _invariant_dual(rng):
    c = _random_cone(rng, rng.randint(1, 3))
    return dual_cone(dual_cone(c)).same_set(c)


def _invariant_hilbert(rng):
    from test_lattice import _brute_hilbert_basis

    rank = rng.randint(2, 3)
    c = _random_cone(rng, rank)
    if c.dim != rank or not c.is_pointed:
        return True
    return hilbert_basis(c) == _brute_hilbert_basis(c)


def _invariant_dj(rng):
    df = random_abelian_general(rng, SampleConfig(max_p=3, max_q=3))
    for idx in df.fan.all_cones:
        if not idx:
            continue
        pieces = [s for r in idx for s in df.chains[r].spaces]
        for m in characters_to_test(df.cone(idx), 1):
            W = df.h
            for s in rng.sample(pieces, rng.randint(0, len(pieces))):
                W = W + s
            _, b, c = dj_conditions(df, idx, m, W)
            per_ray = [dj_conditions(df, (r,), m, W & df.V(r, 0)) for r in idx]
            if (b and c) != all(pb and pc for _, pb, pc in per_ray):
                return False
    return True


def _invariant_dimension_law(rng):
    from test_decofan import _check_dimension_law

    maker = random_large_orbit if rng.random() < 0.5 else random_abelian_general
    df = maker(rng, SampleConfig(max_p=3, max_q=4, nonabelian=False))
    try:
        _check_dimension_law(df)
    except AssertionError:
        return False
    return True


def _invariant_square_zero(rng):
    q, p = rng.randint(1, 4), rng.randint(1, 3)
    t = SupertorusData.abelian(p, q)
    theta = [rng.randint(-2, 2) for _ in range(q)]
    m = [rng.randint(-3, 3) for _ in range(p)]
    e = ExteriorElement.from_dict(q, {rng.randrange(1 << q): rng.randint(-3, 3) for _ in range(4)})
    return right_derivation(t, theta, m, right_derivation(t, theta, m, e)).is_zero()


def _invariant_klyachko(rng):
    df = random_abelian_general(rng)
    return all(klyachko_import(klyachko_export(df, r)) == df.chains[r] for r in range(len(df.chains)))


def test_c9_invariant_suites():
    t0 = time.perf_counter()
    suites = {
        "dual involution": (_invariant_dual, 200),
        "Hilbert basis box completeness": (_invariant_hilbert, 60),
        "DJ ray/cone equivalence": (_invariant_dj, 40),
        "ray-chart dimension law": (_invariant_dimension_law, 40),
        "derivation squares to zero (abelian)": (_invariant_square_zero, 200),
        "Klyachko roundtrip": (_invariant_klyachko, 100),
    }
    failures = {}
    for k, (name, (check, count)) in enumerate(suites.items()):
        rng = random.Random(900 + k)
        bad = sum(not check(rng) for _ in range(count))
        if bad:
            failures[name] = bad
    elapsed = time.perf_counter() - t0
    report("C9 invariant suites", not failures, elapsed, 120.0,
           ", ".join(f"{n} x{c}" for n, (_, c) in suites.items()) + (f"; failures {failures}" if failures else ""))


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
