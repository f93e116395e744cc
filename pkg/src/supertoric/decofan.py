"""Decorated fans: validity, ray charts, weight spaces, stabilizers, smoothness,
resolution, morphisms, Klyachko filtrations and square-root decorations.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg as la
from .exterior import (
    ExteriorElement,
    WeightSpace,
    induced_weight_space,
    intersect_weight_spaces,
    right_derivation,
    sum_weight_spaces,
    to_vector,
)
from .lattice import (
    Cone,
    Fan,
    LatticeError,
    characters_to_test,
    dual_semigroup_generators,
    is_smooth_cone,
    pairing,
    refine_fan,
)
from .superlie import (
    DecorationChain,
    Subspace,
    SupertorusData,
    UndecidedAtBound,
    adapted_basis_exists,
    bracket_eval,
    bracket_subspaces,
    is_isotropic,
)

IntVec = tuple[int, ...]
CandidateLimit = 4096


def default_degree() -> int:
    """Degree bound for quantified-over-m checks (env ``SUPERTORIC_DEGREE``)."""
    try:
        d = int(os.environ.get("SUPERTORIC_DEGREE", "2"))
    except ValueError:
        d = 2
    return max(d, 1)


class DecoratedFanError(ValueError):
    """Malformed decorated fan or a precondition violation."""


class OutOfScope(ValueError):
    """The requested operation is not defined for this input class."""


# ------------------------------------------------------------------ object


@dataclass(frozen=True)
class DecoratedFan:
    torus: SupertorusData
    fan: Fan
    h: Subspace
    chains: tuple[DecorationChain, ...]

    @classmethod
    def build(
        cls,
        torus: SupertorusData,
        fan: Fan,
        h: Subspace | None = None,
        decorations: dict[int, Sequence[Subspace]] | None = None,
    ) -> "DecoratedFan":
        if fan.rank != torus.p:
            raise DecoratedFanError(f"fan rank {fan.rank} differs from even rank {torus.p}")
        h = h if h is not None else Subspace.zero(torus.q)
        decorations = decorations or {}
        chains = []
        for i in range(len(fan.rays)):
            spaces = list(decorations.get(i, [h]))
            for s in spaces:
                if s.n != torus.q:
                    raise DecoratedFanError(f"decoration of ray {i} has wrong ambient dimension")
            try:
                chains.append(DecorationChain(tuple(spaces)).normalized())
            except ValueError as exc:
                raise DecoratedFanError(f"ray {i}: {exc}") from exc
        extra = set(decorations) - set(range(len(fan.rays)))
        if extra:
            raise DecoratedFanError(f"decorations for unknown rays {sorted(extra)}")
        return cls(torus, fan, h, tuple(chains))

    # -- accessors
    def V(self, ray: int, level: int) -> Subspace:
        return self.chains[ray].level(level)

    def u(self, ray: int) -> IntVec:
        return self.fan.rays[ray]

    def cone(self, idx: Sequence[int]) -> Cone:
        return self.fan.cone(idx)

    def V_sigma(self, idx: Sequence[int], m: Sequence[int]) -> Subspace:
        """``h + sum_rho V_{rho, <m, u_rho>}``."""
        out = self.h
        for r in idx:
            out = out + self.V(r, pairing(m, self.u(r)))
        return out

    def V_sigma0(self, idx: Sequence[int]) -> Subspace:
        out = self.h
        for r in idx:
            out = out + self.V(r, 0)
        return out

    def even_span(self, idx: Sequence[int]) -> Subspace:
        return Subspace.span([self.u(r) for r in idx], self.torus.p)

    @cached_property
    def chart_cache(self) -> dict:
        """Per-ray charts and ray weight spaces, filled lazily."""
        return {}

    @cached_property
    def is_large_orbit(self) -> bool:
        return all(self.V(r, 0).dim - self.h.dim <= 1 for r in range(len(self.chains)))

    def find_cone(self, idx: Iterable[int]) -> tuple[int, ...]:
        key = tuple(sorted(idx))
        if key not in self.fan.all_cones:
            raise DecoratedFanError(f"cone {list(key)} is not in the fan")
        return key

    def replace(self, **kw) -> "DecoratedFan":
        data = dict(torus=self.torus, fan=self.fan, h=self.h, chains=self.chains)
        data.update(kw)
        return DecoratedFan(**data)

    # -- serialization
    def to_json(self) -> dict:
        return {
            "torus": self.torus.to_json(),
            "fan": self.fan.to_json(),
            "h": self.h.to_json(),
            "decorations": {str(i): [s.to_json() for s in c.spaces] for i, c in enumerate(self.chains)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "DecoratedFan":
        try:
            torus = SupertorusData.from_json(data["torus"])
            fan = Fan.from_json(data["fan"])
            q = torus.q
            h = Subspace.from_json(data.get("h", []), q)
            decs: dict[int, list[Subspace]] = {}
            raw = data.get("decorations", {})
            for key, val in raw.items():
                i = int(key)
                if isinstance(val, dict) and "signs" in val:
                    if not 0 <= i < len(fan.rays):
                        raise DecoratedFanError(f"decoration for unknown ray {i}")
                    line = sqrt_line(fan.rays[i], val["signs"])
                    if line is None:
                        decs[i] = [Subspace.zero(q)]
                        continue
                    rat = line.rational()
                    if rat is None:
                        raise UnsupportedDecoration(
                            f"ray {i}: square-root decoration {val['signs']} is not rational"
                        )
                    decs[i] = [Subspace.span([rat], q), h]
                else:
                    decs[i] = [Subspace.from_json(s, q) for s in val]
            return cls.build(torus, fan, h, decs)
        except (KeyError, TypeError) as exc:
            raise DecoratedFanError(f"malformed decorated fan JSON: missing or bad field {exc}") from exc


def in_dual(df: DecoratedFan, idx: Sequence[int], m: Sequence[int]) -> bool:
    return all(pairing(m, df.u(r)) >= 0 for r in idx)


# ------------------------------------------------------------ structure


def structural_problems(df: DecoratedFan) -> list[str]:
    out = list(df.fan.check())
    t = df.torus
    if bracket_subspaces(t, df.h, df.h).dim:
        out.append("h is not abelian")
    for i, c in enumerate(df.chains):
        if c.terminal != df.h:
            out.append(f"ray {i}: chain does not stabilize at h")
        if not df.h <= c.level(0):
            out.append(f"ray {i}: h is not contained in V_0")
    return out


def _condition_c(df: DecoratedFan) -> list[int]:
    bad = []
    for i in range(len(df.chains)):
        v0 = df.V(i, 0)
        if bracket_subspaces(df.torus, v0, v0).dim and v0.dim - df.h.dim != 1:
            bad.append(i)
    return bad


# ------------------------------------------------------------------- DJ


def dj_conditions(df: DecoratedFan, idx: Sequence[int], m: Sequence[int], W: Subspace) -> tuple[bool, bool, bool]:
    """The three DJ(sigma, m) properties (a), (b), (c) for ``W``."""
    idx = tuple(idx)
    if not W <= df.V_sigma0(idx):
        raise DecoratedFanError("W is not contained in V_{sigma,0}")
    if not in_dual(df, idx, m):
        raise DecoratedFanError(f"{tuple(m)} is not in the dual cone")
    a = is_isotropic(df.torus, W, m)
    b = True
    c = True
    for r in idx:
        k = pairing(m, df.u(r))
        if not df.V(r, k) <= W:
            b = False
        total = sum(df.V(r, i).dim - (df.V(r, i) & W).dim for i in range(k))
        if total > k:
            c = False
    return a, b, c


def dj_check(df: DecoratedFan, idx: Sequence[int], m: Sequence[int], W: Subspace) -> bool:
    return all(dj_conditions(df, idx, m, W))


def _dj_candidates(df: DecoratedFan, idx: Sequence[int], m: Sequence[int]) -> Iterable[Subspace]:
    """Sums of chain levels ``h + sum V_{rho, j_rho}`` with ``j_rho <= <m, u_rho>``."""
    yield df.V_sigma(idx, m)
    yield df.V_sigma0(idx)
    options = []
    for r in idx:
        k = pairing(m, df.u(r))
        levels = []
        for j in range(min(k, len(df.chains[r].spaces) - 1) + 1):
            s = df.V(r, j)
            if s not in levels:
                levels.append(s)
        options.append(levels)
    count = 1
    for o in options:
        count *= len(o)
    if count > CandidateLimit:
        return
    for combo in itertools.product(*options):
        w = df.h
        for s in combo:
            w = w + s
        yield w


def find_dj_subspace(df: DecoratedFan, idx: Sequence[int], m: Sequence[int]) -> Subspace | None:
    seen = set()
    for W in _dj_candidates(df, idx, m):
        if W in seen:
            continue
        seen.add(W)
        if dj_check(df, idx, m, W):
            return W
    return None


# ------------------------------------------------------------- validity


@dataclass
class ValidityReport:
    valid: bool
    mode: str
    bound: int
    structural: list[str] = field(default_factory=list)
    conditions: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "mode": self.mode,
            "bound": self.bound,
            "qualifier": f"verified up to degree {self.bound}",
            "structural": self.structural,
            "conditions": self.conditions,
        }


def validate(df: DecoratedFan, mode: str = "general", degree: int | None = None) -> ValidityReport:
    """Check the decorated-fan conditions (a), (b), (c).

    ``mode="large_orbit"`` replaces (b) by the bracket condition and (c) by
    ``codim(h, V_0) <= 1``.  Quantifiers over m run over
    :func:`characters_to_test` at the given degree.
    """
    if mode not in ("general", "large_orbit"):
        raise ValueError(f"unknown mode {mode!r}")
    degree = degree or default_degree()
    rep = ValidityReport(True, mode, degree)
    rep.structural = structural_problems(df)
    if rep.structural:
        rep.valid = False
        return rep
    rep.conditions["a"] = {"pass": True, "witness": None}
    if mode == "general":
        bad = _condition_c(df)
        rep.conditions["c"] = {"pass": not bad, "witness": {"rays": bad} if bad else None}
        rep.conditions["b"] = _check_b_general(df, degree)
    else:
        bad = [i for i in range(len(df.chains)) if df.V(i, 0).dim - df.h.dim > 1]
        rep.conditions["c"] = {"pass": not bad, "witness": {"rays": bad} if bad else None}
        rep.conditions["b"] = _check_b_large_orbit(df, degree)
    rep.valid = all(c["pass"] for c in rep.conditions.values())
    return rep


def _check_b_general(df: DecoratedFan, degree: int) -> dict:
    for idx in df.fan.all_cones:
        for m in characters_to_test(df.cone(idx), degree):
            if find_dj_subspace(df, idx, m) is None:
                return {"pass": False, "witness": {"cone": list(idx), "m": list(m)}}
    return {"pass": True, "witness": None}


def _check_b_large_orbit(df: DecoratedFan, degree: int) -> dict:
    t = df.torus
    for idx in df.fan.all_cones:
        cn = df.cone(idx)
        for m in characters_to_test(cn, degree):
            face = [r for r in idx if pairing(m, df.u(r)) == 0]
            target = df.even_span(face)
            for a, b in itertools.combinations_with_replacement(idx, 2):
                br = bracket_subspaces(t, df.V(a, pairing(m, df.u(a))), df.V(b, pairing(m, df.u(b))))
                if not br <= target:
                    return {
                        "pass": False,
                        "witness": {"cone": list(idx), "m": list(m), "rays": [a, b], "bracket": br.to_json()},
                    }
    return {"pass": True, "witness": None}


# ------------------------------------------------------------ ray charts


@dataclass(frozen=True)
class SuperPresentation:
    """Generators ``t^m`` (even, optionally invertible) and ``t^m * e`` (odd)."""

    even_gens: tuple[tuple[IntVec, bool], ...]
    odd_gens: tuple[tuple[IntVec, ExteriorElement], ...]
    names: tuple[str, ...] = ()

    def render(self) -> str:
        parts = []
        for m, inv in self.even_gens:
            s = _render_char(m)
            parts.append(f"{s}^±1" if inv else s)
        for m, e in self.odd_gens:
            body = e.render(list(self.names) or None)
            if len(e.terms) > 1 or any(c != 1 for _, c in e.terms):
                body = f"({body})"
            tm = _render_char(m)
            parts.append(body if tm == "1" else f"{tm}*{body}")
        return "C[" + ", ".join(parts) + "]"

    def to_json(self) -> dict:
        from .exterior import element_to_json

        return {
            "even": [{"m": list(m), "invertible": inv} for m, inv in self.even_gens],
            "odd": [{"m": list(m), "element": element_to_json(e)} for m, e in self.odd_gens],
            "text": self.render(),
        }


def _render_char(m: Sequence[int]) -> str:
    if not any(m):
        return "1"
    if len(m) == 1:
        return "t" if m[0] == 1 else f"t^{m[0]}"
    parts = []
    for i, a in enumerate(m):
        if a == 0:
            continue
        parts.append(f"t{i + 1}" if a == 1 else f"t{i + 1}^{a}")
    return "*".join(parts)


@dataclass(frozen=True)
class RayChart:
    """Adapted coordinates for one ray and its HR1 normal-form presentation.

    ``basis`` lists free directions (level 0), then twisted directions sorted
    by level, then a basis of h (level ``None``).  ``dual`` holds the dual
    coordinate forms in the original xi coordinates.
    """

    ray: int
    u: IntVec
    m1: IntVec
    perp: tuple[IntVec, ...]
    basis: tuple[tuple[Fraction, ...], ...]
    levels: tuple[int | None, ...]
    dual: tuple[tuple[Fraction, ...], ...]
    presentation: SuperPresentation
    bracket_case: int

    @property
    def free(self) -> list[int]:
        return [j for j, l in enumerate(self.levels) if l == 0]

    @property
    def twisted(self) -> list[int]:
        return [j for j, l in enumerate(self.levels) if l is not None and l > 0]

    @property
    def r(self) -> int:
        return len(self.free)

    def coordinate_names(self) -> list[str]:
        names = []
        for j, d in enumerate(self.dual):
            nz = [i for i, c in enumerate(d) if c != 0]
            if len(nz) == 1 and d[nz[0]] == 1:
                names.append(f"xi{nz[0] + 1}")
            else:
                names.append(f"xi'{j + 1}")
        return names

    def dual_element(self, j: int) -> ExteriorElement:
        return ExteriorElement.linear(self.dual[j])

    def to_json(self) -> dict:
        from .superlie import _fmt

        return {
            "ray": self.ray,
            "u": list(self.u),
            "basis": [[_fmt(c) for c in b] for b in self.basis],
            "levels": list(self.levels),
            "free": self.free,
            "twisted": self.twisted,
            "presentation": self.presentation.to_json(),
        }


def adapted_chain_basis(chain: DecorationChain, q: int) -> tuple[list[tuple[Fraction, ...]], list[int | None]]:
    """Basis of t1 adapted to a chain, extended from h upward; unit vectors last."""
    spaces = chain.spaces
    current = list(spaces[-1].rows)
    order: list[tuple[Fraction, ...]] = list(current)
    for s in reversed(spaces[:-1]):
        ext = Subspace.span(current, q).complement_in(s) if current else list(s.rows)
        current.extend(ext)
        order.extend(ext)
    for i in range(q):
        e = tuple(Fraction(int(i == j)) for j in range(q))
        if la.rank(current + [e], q) > len(current):
            current.append(e)
            order.append(e)
    h = spaces[-1]
    levels: list[int | None] = []
    for b in order:
        if h.contains(b):
            levels.append(None)
            continue
        lvl = next(i for i in range(len(spaces) + 1) if not chain.level(i).contains(b))
        levels.append(lvl)
    return order, levels


def ray_chart(df: DecoratedFan, ray: int) -> RayChart:
    """HR1 ray chart: ``C[t1, t2^±1, ..., xi_free, t1^l_j xi_j]`` in adapted coordinates."""
    if not 0 <= ray < len(df.chains):
        raise DecoratedFanError(f"no ray {ray}")
    if ray not in df.chart_cache:
        df.chart_cache[ray] = _build_ray_chart(df, ray)
    return df.chart_cache[ray]


def _build_ray_chart(df: DecoratedFan, ray: int) -> RayChart:
    chain = df.chains[ray]
    if chain.terminal != df.h:
        raise DecoratedFanError(f"ray {ray}: chain does not stabilize at h")
    q = df.torus.q
    basis, levels = adapted_chain_basis(chain, q)
    hidx = [j for j, l in enumerate(levels) if l is None]
    free = [j for j, l in enumerate(levels) if l == 0]
    tw = sorted((j for j, l in enumerate(levels) if l is not None and l > 0), key=lambda j: (levels[j], j))
    perm = free + tw + hidx
    basis = [basis[j] for j in perm]
    levels = [levels[j] for j in perm]
    bmat = la.transpose(basis)  # columns are basis vectors
    dual = [tuple(r) for r in la.inverse(bmat)] if q else []
    u = df.u(ray)
    hb, lin = dual_semigroup_generators(Cone.from_generators([u], df.torus.p))
    m1 = hb[0]
    even = [(m1, False)] + [(tuple(v), True) for v in lin]
    odd = []
    for j, l in enumerate(levels):
        if l is None:
            continue
        mj = tuple(l * a for a in m1)
        odd.append((mj, ExteriorElement.linear(dual[j])))
    v0 = df.V(ray, 0)
    case = 1 if bracket_subspaces(df.torus, v0, v0).dim else 2
    pres = SuperPresentation(tuple(even), tuple(odd), ())
    return RayChart(
        ray, u, m1, tuple(tuple(v) for v in lin), tuple(basis), tuple(levels), tuple(dual), pres, case
    )


def subset_sum_count(levels: Sequence[int], k: int) -> int:
    """#{S : sum of levels over S <= k}."""
    count = 0
    for n in range(len(levels) + 1):
        for s in itertools.combinations(levels, n):
            if sum(s) <= k:
                count += 1
    return count


def chart_weight_space(df: DecoratedFan, ray: int, m: Sequence[int]) -> WeightSpace:
    """Weight space of the presentation itself (abelian tori only).

    Spanned by ``xi'_F * xi'_S`` with F free and the levels over S summing to
    at most ``<m, u>``.
    """
    if not df.torus.is_abelian:
        raise OutOfScope("the presentation route needs an abelian torus")
    chart = ray_chart(df, ray)
    k = pairing(m, chart.u)
    if k < 0:
        raise DecoratedFanError(f"{tuple(m)} is not in the dual of ray {ray}")
    q = df.torus.q
    forms = [chart.dual_element(j) for j in range(q)]
    elems = []
    free, tw = chart.free, chart.twisted
    for n in range(len(tw) + 1):
        for s in itertools.combinations(tw, n):
            if sum(chart.levels[j] for j in s) > k:  # type: ignore[misc]
                continue
            for nf in range(len(free) + 1):
                for f in itertools.combinations(free, nf):
                    e = ExteriorElement.one(q)
                    for j in f + s:
                        e = e * forms[j]
                    elems.append(e)
    return WeightSpace.from_elements(m, q, elems)


def ray_weight_space(df: DecoratedFan, ray: int, m: Sequence[int]) -> WeightSpace:
    """``L_{A_rho}(m)`` as the sum of induced spaces over DJ coordinate subspaces.

    W runs over ``h + span(b_j : j in J)`` for the chain-adapted basis; this
    uses the global bracket gauge and needs no chart coordinates.
    """
    key = ("weight", ray, tuple(m))
    if key not in df.chart_cache:
        df.chart_cache[key] = _ray_weight_space(df, ray, m)
    return df.chart_cache[key]


def _ray_weight_space(df: DecoratedFan, ray: int, m: Sequence[int]) -> WeightSpace:
    chart = ray_chart(df, ray)
    k = pairing(m, chart.u)
    if k < 0:
        raise DecoratedFanError(f"{tuple(m)} is not in the dual of ray {ray}")
    tw = chart.twisted
    must = [j for j in tw if chart.levels[j] > k]  # type: ignore[operator]
    optional = [j for j in tw if chart.levels[j] <= k]  # type: ignore[operator]
    q = df.torus.q
    spaces = []
    seen = set()
    for n in range(len(optional) + 1):
        for dropped in itertools.combinations(optional, n):
            if sum(chart.levels[j] for j in dropped) > k:  # type: ignore[misc]
                continue
            keep = must + [j for j in optional if j not in dropped]
            W = df.h + Subspace.span([chart.basis[j] for j in keep], q)
            if W in seen:
                continue
            seen.add(W)
            if not dj_check(df, (ray,), m, W):
                continue
            spaces.append(induced_weight_space(df.torus, W, m))
    return sum_weight_spaces(spaces, m, q)


def sigma_weight_space(df: DecoratedFan, idx: Sequence[int], m: Sequence[int]) -> WeightSpace:
    """``L_{A_sigma}(m)`` as the intersection of the ray weight spaces."""
    idx = df.find_cone(idx)
    if not in_dual(df, idx, m):
        raise DecoratedFanError(f"{tuple(m)} is not in the dual cone")
    if not idx:
        return induced_weight_space(df.torus, df.h, m)
    return intersect_weight_spaces([ray_weight_space(df, r, m) for r in idx])


def induced_sigma_weight_space(df: DecoratedFan, idx: Sequence[int], m: Sequence[int]) -> WeightSpace:
    """``L_{C[T]^{V_{sigma,m}}}(m)``; equals the chart route for large-orbit fans."""
    return induced_weight_space(df.torus, df.V_sigma(tuple(idx), m), m)


def dj_candidate_spaces(df: DecoratedFan, idx: Sequence[int], m: Sequence[int], bound: int = 256) -> list[Subspace]:
    """DJ(sigma, m) subspaces from the lattice generated by all chain levels."""
    idx = tuple(idx)
    gens = {df.h}
    for r in idx:
        gens.update(df.chains[r].spaces)
    top = df.V_sigma0(idx)
    closure = set(gens)
    frontier = list(closure)
    while frontier:
        new = []
        items = list(closure)
        for a in frontier:
            for b in items:
                for s in (a + b, a & b):
                    if s not in closure and s <= top:
                        closure.add(s)
                        new.append(s)
        if len(closure) > bound:
            raise UndecidedAtBound(f"DJ candidate lattice exceeds {bound} elements")
        frontier = new
    out = [W for W in closure if W <= top and dj_check(df, idx, m, W)]
    return sorted(out, key=lambda s: (s.dim, s.rows))


# ------------------------------------------------------------ stabilizers


def orbit_stabilizer(df: DecoratedFan, idx: Sequence[int]) -> tuple[Subspace, Subspace]:
    """``(span of the rays, h + sum V_{rho,0})`` for the orbit of ``sigma``."""
    idx = df.find_cone(idx)
    return df.even_span(idx), df.V_sigma0(idx)


def orbit_stabilizer_from_chart(df: DecoratedFan, idx: Sequence[int]) -> tuple[Subspace, Subspace]:
    """Stabilizer recomputed from ``L_{A_sigma}(0)`` and the lattice of ``sigma^perp``."""
    idx = df.find_cone(idx)
    t = df.torus
    p = t.p
    rays = [df.u(r) for r in idx]
    perp = la.integer_kernel(rays, p) if rays else [tuple(int(i == j) for j in range(p)) for i in range(p)]
    even = Subspace.span(la.integer_kernel(perp, p), p) if perp else Subspace.full(p)
    zero = tuple([0] * p)
    L = sigma_weight_space(df, idx, zero)
    rows = []
    for e in L.basis:
        cols = [right_derivation(t, [int(i == j) for j in range(t.q)], zero, e) for i in range(t.q)]
        vecs = [to_vector(c) for c in cols]
        rows.extend(la.transpose(vecs))
    odd = Subspace.span(la.nullspace(rows, t.q), t.q) if rows else Subspace.full(t.q)
    return even, odd


# ------------------------------------------------------------- smoothness


@dataclass
class SmoothReport:
    smooth: bool | None
    cones: list[dict] = field(default_factory=list)

    @property
    def witness(self) -> dict | None:
        for c in self.cones:
            if c["verdict"] is not True:
                return c
        return None

    def to_json(self) -> dict:
        return {"smooth": self.smooth, "witness": self.witness, "cones": self.cones}


def smooth_check(df: DecoratedFan, bound: int = 64) -> SmoothReport:
    rep = SmoothReport(True)
    unknown = False
    for idx in df.fan.all_cones:
        entry: dict = {"cone": list(idx), "a": True, "b": True, "c": True, "verdict": True}
        cn = df.cone(idx)
        if not is_smooth_cone(cn):
            entry["a"] = False
        family: list[Subspace] = []
        for r in idx:
            for s in df.chains[r].spaces:
                if s not in family:
                    family.append(s)
        try:
            res = adapted_basis_exists(family, bound)
            if not res.exists:
                entry["b"] = False
                entry["witness"] = [s.to_json() for s in res.witness]  # type: ignore[union-attr]
        except UndecidedAtBound as exc:
            entry["b"] = None
            entry["witness"] = str(exc)
        for r in idx:
            v0 = df.V(r, 0)
            if v0.dim - df.h.dim >= 2:
                for r2 in idx:
                    if not bracket_subspaces(df.torus, v0, df.V(r2, 0)) <= df.even_span([r2]):
                        entry["c"] = False
                        entry["c_witness"] = [r, r2]
        flags = [entry["a"], entry["b"], entry["c"]]
        if False in flags:
            entry["verdict"] = False
            rep.smooth = False
        elif None in flags:
            entry["verdict"] = None
            unknown = True
        rep.cones.append(entry)
    if rep.smooth and unknown:
        rep.smooth = None
    return rep


# --------------------------------------------------------------- morphisms


@dataclass(frozen=True)
class MorphismData:
    lattice_map: tuple[tuple[int, ...], ...]  # p' x p
    odd_map: tuple[tuple[Fraction, ...], ...]  # q' x q

    @classmethod
    def identity(cls, p: int, q: int) -> "MorphismData":
        return cls(
            tuple(tuple(int(i == j) for j in range(p)) for i in range(p)),
            tuple(tuple(Fraction(int(i == j)) for j in range(q)) for i in range(q)),
        )

    def to_json(self) -> dict:
        from .superlie import _fmt

        return {
            "lattice_map": [list(r) for r in self.lattice_map],
            "odd_map": [[_fmt(c) for c in r] for r in self.odd_map],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MorphismData":
        try:
            lm = tuple(tuple(int(x) for x in r) for r in data["lattice_map"])
            om = tuple(tuple(la.to_frac(x) for x in r) for r in data["odd_map"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DecoratedFanError(f"malformed morphism JSON: {exc}") from exc
        return cls(lm, om)

    def even(self, v: Sequence) -> tuple:
        return la.matvec(self.lattice_map, v)

    def odd(self, v: Sequence) -> tuple:
        return la.matvec(self.odd_map, v)

    def odd_image(self, s: Subspace, q_target: int) -> Subspace:
        return Subspace.span([self.odd(r) for r in s.rows], q_target)

    def pullback(self, m_target: Sequence[int]) -> IntVec:
        """``m' o phi``."""
        p = len(self.lattice_map[0]) if self.lattice_map else 0
        return tuple(sum(m_target[i] * self.lattice_map[i][j] for i in range(len(m_target))) for j in range(p))


@dataclass
class MorphismReport:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"morphism": self.ok, "problems": self.problems}


def morphism_check(src: DecoratedFan, dst: DecoratedFan, phi: MorphismData, degree: int | None = None) -> MorphismReport:
    """Large-orbit decorated-fan morphism test."""
    if not (src.is_large_orbit and dst.is_large_orbit):
        raise OutOfScope("HR1 morphisms out of scope: both fans must have large orbits")
    degree = degree or default_degree()
    p, q, p2, q2 = src.torus.p, src.torus.q, dst.torus.p, dst.torus.q
    if len(phi.lattice_map) != p2 or any(len(r) != p for r in phi.lattice_map):
        raise DecoratedFanError("lattice map has the wrong shape")
    if len(phi.odd_map) != q2 or any(len(r) != q for r in phi.odd_map):
        raise DecoratedFanError("odd map has the wrong shape")
    rep = MorphismReport(True)
    # bracket homomorphism
    for i in range(q):
        for j in range(i, q):
            ei = [int(k == i) for k in range(q)]
            ej = [int(k == j) for k in range(q)]
            lhs = bracket_eval(dst.torus, phi.odd(ei), phi.odd(ej))
            rhs = phi.even(bracket_eval(src.torus, ei, ej))
            if tuple(lhs) != tuple(rhs):
                rep.ok = False
                rep.problems.append(f"bracket not preserved on (theta{i + 1}, theta{j + 1})")
    if not phi.odd_image(src.h, q2) <= dst.h:
        rep.ok = False
        rep.problems.append("odd map does not send h into h'")
    for idx in src.fan.all_cones:
        images = [phi.even(src.u(r)) for r in idx]
        targets = [c for c in dst.fan.all_cones if all(dst.cone(c).contains(v) for v in images) or not images]
        if not targets:
            rep.ok = False
            rep.problems.append(f"cone {list(idx)} maps into no cone")
            continue
        for t_idx in targets:
            for m2 in characters_to_test(dst.cone(t_idx), degree):
                m = phi.pullback(m2)
                lhs = phi.odd_image(src.V_sigma(idx, m), q2)
                if not lhs <= dst.V_sigma(t_idx, m2):
                    rep.ok = False
                    rep.problems.append(f"decoration fails for cone {list(idx)} -> {list(t_idx)} at m'={list(m2)}")
                    break
    return rep


# ---------------------------------------------------------------- resolve


def resolve(df: DecoratedFan) -> tuple[DecoratedFan, MorphismData]:
    """Refine to a smooth fan with at most one original ray per maximal cone.

    New rays carry the constant chain h; the torus map is the identity.
    """
    fan2 = refine_fan(df.fan)
    decs = {i: list(c.spaces) for i, c in enumerate(df.chains)}
    df2 = DecoratedFan.build(df.torus, fan2, df.h, decs)
    return df2, MorphismData.identity(df.torus.p, df.torus.q)


# --------------------------------------------------------------- Klyachko


@dataclass(frozen=True)
class KlyachkoFiltration:
    """``levels[j] = E(-j)`` inside t1*; ``E(i) = 0`` for ``i > 0``, ``E(-j) = levels[-1]`` beyond."""

    levels: tuple[Subspace, ...]

    def E(self, i: int) -> Subspace:
        n = self.levels[0].n
        if i > 0:
            return Subspace.zero(n)
        return self.levels[min(-i, len(self.levels) - 1)]

    def to_json(self) -> dict:
        return {"E": {str(-j): s.to_json() for j, s in enumerate(self.levels)}, "positive": "0"}


def klyachko_export(df: DecoratedFan, ray: int) -> KlyachkoFiltration:
    return KlyachkoFiltration(tuple(s.annihilator() for s in df.chains[ray].spaces))


def klyachko_import(f: KlyachkoFiltration) -> DecorationChain:
    return DecorationChain(tuple(s.annihilator() for s in f.levels)).normalized()


# ------------------------------------------------------ square-root family


class UnsupportedDecoration(ValueError):
    """Decoration with irrational coordinates outside the supported family."""


def _squarefree(n: int) -> tuple[int, int]:
    """``|n| = s^2 * d`` with d squarefree; returns (s, d)."""
    n = abs(n)
    s, d = 1, 1
    k = 2
    while k * k <= n:
        while n % (k * k) == 0:
            n //= k * k
            s *= k
        if n % k == 0:
            n //= k
            d *= k
        k += 1
    return s, d * n


@dataclass(frozen=True)
class SqrtLine:
    """``C(sum_i eps_i sqrt(a_i) theta_i)`` with ``a = u`` and signs on the support."""

    a: IntVec
    signs: tuple[int, ...]

    def components(self) -> list[tuple[int, int, int]]:
        """Per coordinate ``(sign * s, signed squarefree d)`` with coefficient ``sign*s*sqrt(d)``."""
        out = []
        for ai, e in zip(self.a, self.signs):
            if ai == 0:
                out.append((0, 1, 0))
                continue
            s, d = _squarefree(ai)
            out.append((e * s, d if ai > 0 else -d, 1))
        return out

    def rational(self) -> tuple[int, ...] | None:
        comps = [c for c in self.components() if c[2]]
        keys = {d for _, d, _ in comps}
        if len(keys) != 1:
            return None
        return tuple(c[0] if c[2] else 0 for c in self.components())

    def to_json(self) -> dict:
        return {"signs": list(self.signs)}


def sqrt_line(u: Sequence[int], signs: Sequence[int]) -> SqrtLine | None:
    signs = tuple(int(s) for s in signs)
    if len(signs) != len(u):
        raise DecoratedFanError("sign vector length differs from the rank")
    if not any(signs):
        return None
    for ui, s in zip(u, signs):
        if (ui == 0) != (s == 0) or s not in (-1, 0, 1):
            raise DecoratedFanError("sign vector must be ±1 exactly on the support of u")
    first = next(s for s in signs if s)
    if first < 0:
        signs = tuple(-s for s in signs)
    return SqrtLine(tuple(u), signs)


def sqrt_options(u: Sequence[int]) -> list[SqrtLine]:
    support = [i for i, a in enumerate(u) if a]
    out = []
    for tail in itertools.product((1, -1), repeat=max(len(support) - 1, 0)):
        signs = [0] * len(u)
        for k, i in enumerate(support):
            signs[i] = 1 if k == 0 else tail[k - 1]
        out.append(SqrtLine(tuple(u), tuple(signs)))
    return out


def sqrt_bracket(a: SqrtLine, b: SqrtLine) -> dict[int, tuple[int, ...]]:
    """``[v_a, v_b]`` in Q(1)^n as radical components ``{signed d: rational vector}``.

    Coordinate i contributes ``2 eps_i delta_i sqrt(a_i) sqrt(b_i) x_i``.
    """
    n = len(a.a)
    out: dict[int, list[int]] = {}
    for i in range(n):
        ai, bi = a.a[i], b.a[i]
        if ai == 0 or bi == 0:
            continue
        s, d = _squarefree(ai * bi)
        coeff = 2 * a.signs[i] * b.signs[i] * s
        if ai < 0 and bi < 0:
            coeff = -coeff  # i * i
            key = d
        elif ai < 0 or bi < 0:
            key = -d
        else:
            key = d
        out.setdefault(key, [0] * n)[i] += coeff
    return {k: tuple(v) for k, v in out.items()}


@dataclass(frozen=True)
class SqrtDecoratedFan:
    """Q(1)^n fan whose rays carry 0 or one square-root line; h = 0."""

    fan: Fan
    lines: tuple[SqrtLine | None, ...]

    @property
    def n(self) -> int:
        return self.fan.rank

    def to_json(self) -> dict:
        return {
            "torus": SupertorusData.q1n(self.n).to_json(),
            "fan": self.fan.to_json(),
            "h": [],
            "decorations": {
                str(i): (l.to_json() if l is not None else {"signs": [0] * self.n}) for i, l in enumerate(self.lines)
            },
        }

    def rational(self) -> DecoratedFan | None:
        n = self.n
        decs = {}
        for i, l in enumerate(self.lines):
            if l is None:
                continue
            r = l.rational()
            if r is None:
                return None
            decs[i] = [Subspace.span([r], n), Subspace.zero(n)]
        return DecoratedFan.build(SupertorusData.q1n(n), self.fan, Subspace.zero(n), decs)

    def is_doubly_decorated(self, idx: Sequence[int]) -> bool:
        return sum(self.lines[r] is not None for r in idx) >= 2


def validate_sqrt(sf: SqrtDecoratedFan) -> tuple[bool, dict | None]:
    """Large-orbit validity over faces: ``[V_rho, V_rho'] ⊆ span(tau)`` for rho, rho' in tau."""
    for idx in sf.fan.all_cones:
        span = Subspace.span([sf.fan.rays[r] for r in idx], sf.n)
        for a, b in itertools.combinations_with_replacement(idx, 2):
            la_, lb = sf.lines[a], sf.lines[b]
            if la_ is None or lb is None:
                continue
            for d, vec in sqrt_bracket(la_, lb).items():
                if any(vec) and not span.contains(vec):
                    return False, {"cone": list(idx), "rays": [a, b], "radical": d, "component": list(vec)}
    return True, None


def enumerate_decorations(torus: SupertorusData, fan: Fan, jobs: int = 1) -> list[SqrtDecoratedFan]:
    """All valid Q(1)^n decorations with each ray carrying 0 or a square-root line."""
    if torus != SupertorusData.q1n(torus.p) or torus.p != torus.q:
        raise OutOfScope("enumeration is implemented for Q(1)^n only")
    if fan.rank != torus.p:
        raise DecoratedFanError("fan rank must equal n")
    options = [[None] + sqrt_options(u) for u in fan.rays]
    combos = list(itertools.product(*options))

    def check(combo):
        sf = SqrtDecoratedFan(fan, tuple(combo))
        return sf if validate_sqrt(sf)[0] else None

    if jobs > 1 and len(combos) > 64:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(check, combos))
    else:
        results = [check(c) for c in combos]
    return [r for r in results if r is not None]
