"""Duflo-Serganova cohomology on t-graded monomial-exterior algebras.

A ray chart localized at its divisor only remembers the degree along the
ray, so an algebra is modelled by its graded pieces ``A_k`` inside the
exterior algebra on the twisted chart coordinates (free coordinates are
quotiented out).  Every piece carries a subquotient ``Z_k / B_k``; the DS
step replaces it by the cohomology of the odd derivation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .decofan import DecoratedFan, OutOfScope, RayChart, ray_chart
from .exterior import ExteriorElement, from_vector, parse_element, to_vector, _wedge_sign
from .superlie import Subspace

DEFAULT_BOUND = 6


class DSConsistencyError(RuntimeError):
    """The derivation does not behave as the model requires."""


@dataclass(frozen=True)
class Derivation:
    """``D_k = contraction(theta) + k * lam ∧`` on the degree-k piece."""

    theta: tuple[Fraction, ...]
    lam: tuple[Fraction, ...]

    @classmethod
    def zero(cls, s: int) -> "Derivation":
        z = tuple(Fraction(0) for _ in range(s))
        return cls(z, z)

    def apply(self, k: int, e: ExteriorElement) -> ExteriorElement:
        out = e.contract(self.theta)
        if k and any(self.lam):
            out = out + (ExteriorElement.linear(self.lam) * e).scale(k)
        return out

    def matrix(self, k: int, s: int) -> list[list[Fraction]]:
        n = 1 << s
        cols = [to_vector(self.apply(k, from_vector(s, [int(i == j) for j in range(n)]))) for i in range(n)]
        return la.transpose(cols)


@dataclass
class GradedAlgebraModel:
    """Graded pieces ``Z_k / B_k`` (k = 0..bound) inside Lambda on ``s`` generators."""

    s: int
    names: tuple[str, ...]
    bound: int
    Z: list[Subspace]
    B: list[Subspace]
    generators: tuple[tuple[int, ExteriorElement], ...] = ()

    def dim(self, k: int) -> int:
        return self.Z[k].dim - self.B[k].dim

    def dims(self) -> list[int]:
        return [self.dim(k) for k in range(self.bound + 1)]

    def contains(self, k: int, e: ExteriorElement) -> bool:
        return self.Z[k].contains(to_vector(e))

    def is_exact(self, k: int, e: ExteriorElement) -> bool:
        return self.B[k].contains(to_vector(e))

    def quotient_basis(self, k: int) -> list[ExteriorElement]:
        return [from_vector(self.s, v) for v in self.B[k].complement_in(self.Z[k])]


def algebra_from_generators(
    s: int, names: Sequence[str], generators: Sequence[tuple[int, ExteriorElement]], bound: int
) -> GradedAlgebraModel:
    """Pieces of ``C[t, t^d_g e_g]``: ``A_k = t A_{k-1} + sum_g e_g A_{k-d_g}``."""
    n = 1 << s
    pieces: list[Subspace] = []
    for k in range(bound + 1):
        cur = pieces[k - 1] if k else Subspace.span([to_vector(ExteriorElement.one(s))], n)
        changed = True
        while changed:
            changed = False
            for d, g in generators:
                if d > k:
                    continue
                src = pieces[k - d] if d else cur
                vecs = [to_vector(g * from_vector(s, v)) for v in src.rows]
                new = cur + Subspace.span(vecs, n)
                if new.dim != cur.dim:
                    cur = new
                    changed = d == 0
        pieces.append(cur)
    zero = Subspace.zero(n)
    return GradedAlgebraModel(s, tuple(names), bound, pieces, [zero] * (bound + 1), tuple(generators))


def _apply(der: Derivation, k: int, s: int, v) -> tuple[Fraction, ...]:
    return to_vector(der.apply(k, from_vector(s, v)))


def _image(space: Subspace, der: Derivation, k: int) -> Subspace:
    s = (space.n - 1).bit_length()
    return Subspace.span([_apply(der, k, s, r) for r in space.rows], space.n)


def _preimage(space: Subspace, der: Derivation, k: int, target: Subspace) -> Subspace:
    """``{z in space : D_k z in target}``."""
    if not space.rows:
        return space
    n = space.n
    s = (n - 1).bit_length()
    ann = target.annihilator().rows
    cols = [_apply(der, k, s, r) for r in space.rows]
    conds = [[la.dot(a, c) for c in cols] for a in ann]
    if conds:
        coeffs = la.nullspace(conds, len(cols))
    else:
        coeffs = [tuple(Fraction(int(i == j)) for j in range(len(cols))) for i in range(len(cols))]
    vecs = [tuple(sum(c * r[i] for c, r in zip(co, space.rows) if c) for i in range(n)) for co in coeffs]
    return Subspace.span(vecs, n)


def square_scalar(der: Derivation, k: int, s: int) -> Fraction:
    """The scalar by which ``D_k^2`` acts; raises if it is not a scalar."""
    scalar = None
    for mask in range(1 << s):
        e = ExteriorElement.from_dict(s, {mask: 1})
        sq = der.apply(k, der.apply(k, e))
        c = dict(sq.terms).get(mask, Fraction(0))
        if any(m != mask for m, _ in sq.terms) or (scalar is not None and c != scalar):
            raise DSConsistencyError(f"D^2 is not scalar in degree {k}")
        scalar = c
    return scalar if scalar is not None else Fraction(0)


def ds_compute(alg: GradedAlgebraModel, der: Derivation, bound: int | None = None) -> GradedAlgebraModel:
    """Cohomology of ``der`` on the θ²-invariant pieces, degree by degree."""
    bound = alg.bound if bound is None else min(bound, alg.bound)
    s, n = alg.s, 1 << alg.s
    if len(der.theta) != s or len(der.lam) != s:
        raise ValueError("derivation has the wrong number of coordinates")
    Z, B = [], []
    for k in range(bound + 1):
        z, b = alg.Z[k], alg.B[k]
        if square_scalar(der, k, s) != 0:
            Z.append(Subspace.zero(n))
            B.append(Subspace.zero(n))
            continue
        dz = _image(z, der, k)
        if not dz <= z or not _image(b, der, k) <= b:
            raise DSConsistencyError(f"derivation does not preserve the degree-{k} piece")
        Z.append(_preimage(z, der, k, b))
        B.append(b + dz)
    return GradedAlgebraModel(s, alg.names, bound, Z, B, alg.generators)


# ------------------------------------------------------------------ FR


@dataclass(frozen=True)
class Generator:
    degree: int
    element: ExteriorElement
    even: bool

    def render(self, names: Sequence[str]) -> str:
        return render_graded(self.degree, self.element, names)


def render_graded(k: int, e: ExteriorElement, names: Sequence[str]) -> str:
    body = e.render(list(names))
    tk = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
    if body == "1":
        return tk or "1"
    if len(e.terms) > 1 or (e.terms and e.terms[0][1] not in (1, -1) and tk):
        body = f"({body})"
    return f"{tk}*{body}" if tk else body


@dataclass
class FRVerdict:
    fr: bool
    bound: int
    witness: str | None
    witness_degree: int | None
    generators: list[Generator] = field(default_factory=list)
    relations: list[tuple[int, str]] = field(default_factory=list)
    dims: list[int] = field(default_factory=list)
    names: tuple[str, ...] = ()

    @property
    def presentation(self) -> str:
        return self.presentation_up_to(self.bound)

    def presentation_up_to(self, degree: int) -> str:
        """Generators and minimal relations of degree at most ``degree``."""
        gens = ", ".join(g.render(self.names) for g in self.generators if g.degree <= degree)
        rels = [r for d, r in self.relations if d <= degree]
        out = f"C[{gens}]"
        if rels:
            out += "/(" + ", ".join(rels) + ")"
        return out

    def to_json(self) -> dict:
        return {
            "verdict": "FR" if self.fr else "notFR",
            "bound": self.bound,
            "witness": self.witness,
            "witness_degree": self.witness_degree,
            "presentation": self.presentation,
            "dims": self.dims,
        }


@dataclass(frozen=True)
class _Mono:
    exps: tuple[int, ...]  # even generator exponents
    mask: int  # odd generator subset


def _mono_degree(m: _Mono, even: list[Generator], odd: list[Generator]) -> int:
    d = sum(e * g.degree for e, g in zip(m.exps, even))
    return d + sum(g.degree for i, g in enumerate(odd) if m.mask >> i & 1)


def _monomials(even: list[Generator], odd: list[Generator], k: int) -> list[_Mono]:
    out = []
    ranges = [range(k // g.degree + 1) for g in even]
    for exps in itertools.product(*ranges):
        for mask in range(1 << len(odd)):
            m = _Mono(tuple(exps), mask)
            if _mono_degree(m, even, odd) == k:
                out.append(m)
    return out


def _mono_value(m: _Mono, even: list[Generator], odd: list[Generator], s: int) -> ExteriorElement:
    out = ExteriorElement.one(s)
    for e, g in zip(m.exps, even):
        for _ in range(e):
            out = out * g.element
    for i, g in enumerate(odd):
        if m.mask >> i & 1:
            out = out * g.element
    return out


def _mono_product(a: _Mono, b: _Mono) -> tuple[int, _Mono | None]:
    if a.mask & b.mask:
        return 0, None
    return _wedge_sign(a.mask, b.mask), _Mono(tuple(x + y for x, y in zip(a.exps, b.exps)), a.mask | b.mask)


def _render_formal(vec, monos, even, odd, names) -> str:
    """Relation among generator monomials, generators shown in brackets."""
    parts = []
    for c, m in zip(vec, monos):
        if c == 0:
            continue
        factors = []
        for e, g in zip(m.exps, even):
            base = f"[{g.render(names)}]"
            factors += [base if e == 1 else f"{base}^{e}"] if e else []
        factors += [f"[{g.render(names)}]" for i, g in enumerate(odd) if m.mask >> i & 1]
        mono = "*".join(factors) or "1"
        c = la.to_frac(c)
        coef = "" if c == 1 else ("-" if c == -1 else f"{c}*")
        parts.append(coef + mono)
    out = parts[0] if parts else "0"
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


def _kernel(vectors: list[tuple], B: Subspace, ncols: int) -> list[tuple]:
    """Coefficient vectors a with ``sum a_f v_f in B``."""
    if not vectors:
        return []
    rows = la.transpose([list(v) for v in vectors] + [list(b) for b in B.rows])
    ker = la.nullspace(rows, len(vectors) + B.dim)
    return Subspace.span([k[: len(vectors)] for k in ker], len(vectors)).rows


def _split_parity(space: Subspace, s: int) -> tuple[Subspace, Subspace]:
    n = 1 << s
    from .exterior import monomial_order, _popcount

    order = monomial_order(s)
    even_idx = [i for i, m in enumerate(order) if _popcount(m) % 2 == 0]
    odd_idx = [i for i, m in enumerate(order) if _popcount(m) % 2 == 1]
    ev = space & Subspace.coordinate(n, even_idx)
    od = space & Subspace.coordinate(n, odd_idx)
    if ev.dim + od.dim != space.dim:
        raise DSConsistencyError("graded piece is not parity homogeneous")
    return ev, od


def fr_check(alg: GradedAlgebraModel, bound: int | None = None) -> FRVerdict:
    """Compare the algebra with ``Lambda_R(free module)`` up to the degree bound.

    Minimal generators are picked degree by degree as complements of the
    decomposables; R is generated by the even ones.  The algebra is FR up to
    the bound when every relation among generator monomials lies in the ideal
    generated by relations among even generators.
    """
    D = alg.bound if bound is None else min(bound, alg.bound)
    s, n = alg.s, 1 << alg.s
    verdict = FRVerdict(True, D, None, None, dims=alg.dims()[: D + 1], names=alg.names)
    if alg.dim(0) == 0:
        return verdict
    if alg.dim(0) != 1:
        raise OutOfScope("degree-zero part of the cohomology is not one-dimensional")
    even: list[Generator] = []
    odd: list[Generator] = []
    kernels: dict[int, tuple[list[_Mono], list[tuple]]] = {}
    for k in range(1, D + 1):
        monos = _monomials(even, odd, k)
        vals = [to_vector(_mono_value(m, even, odd, s)) for m in monos]
        dec = alg.B[k] + Subspace.span(vals, n)
        for part, is_even in zip(_split_parity(alg.Z[k], s), (True, False)):
            for v in (dec & part).complement_in(part):
                g = Generator(k, from_vector(s, v), is_even)
                (even if is_even else odd).append(g)
                dec = dec + Subspace.span([v], n)
    # relations, now with the final generator lists
    verdict.generators = sorted(even + odd, key=lambda g: (g.degree, not g.even))
    for k in range(1, D + 1):
        monos = _monomials(even, odd, k)
        vals = [to_vector(_mono_value(m, even, odd, s)) for m in monos]
        ker = _kernel(vals, alg.B[k], len(monos))
        kernels[k] = (monos, ker)
        index = {m: i for i, m in enumerate(monos)}
        implied: list[tuple] = []
        even_implied: list[tuple] = []
        for j in range(1, k):
            mj, kj = kernels[j]
            for rel in kj:
                pure_even = all(m.mask == 0 for c, m in zip(rel, mj) if c != 0)
                for other in _monomials(even, odd, k - j):
                    vec = [Fraction(0)] * len(monos)
                    for c, m in zip(rel, mj):
                        if c == 0:
                            continue
                        sign, prod = _mono_product(m, other)
                        if prod is not None:
                            vec[index[prod]] += sign * c
                    implied.append(tuple(vec))
                    if pure_even:
                        even_implied.append(tuple(vec))
        implied_space = Subspace.span(implied, len(monos)) if monos else None
        for rel in ker:
            if implied_space is None or not implied_space.contains(rel):
                implied.append(rel)
                implied_space = Subspace.span(implied, len(monos))
                verdict.relations.append((k, _render_relation(rel, monos, even, odd, s, k, alg.names)))
        pure = [r for r in ker if all(m.mask == 0 for c, m in zip(r, monos) if c != 0)]
        allowed = Subspace.span(even_implied + pure, len(monos)) if monos else None
        if verdict.fr:
            for rel in ker:
                if allowed is None or not allowed.contains(rel):
                    verdict.fr = False
                    verdict.witness = _render_relation(rel, monos, even, odd, s, k, alg.names)
                    verdict.witness_degree = k
                    break
    return verdict


def _render_relation(rel, monos, even, odd, s, k, names) -> str:
    total = ExteriorElement.zero(s)
    for c, m in zip(rel, monos):
        if c:
            total = total + _mono_value(m, even, odd, s).scale(c)
    if not total.is_zero():
        return render_graded(k, total, names)
    return _render_formal(rel, monos, even, odd, names)


# ------------------------------------------------------------------ charts


@dataclass(frozen=True)
class ChartAlgebra:
    """Graded model of a ray chart modulo its free odd coordinates."""

    chart: RayChart
    twisted: tuple[int, ...]
    model: GradedAlgebraModel

    def coordinates(self, theta: Sequence) -> tuple[Fraction, ...]:
        """Adapted coordinates of an odd vector (``xi'_j(theta)``)."""
        return tuple(la.dot(d, la.frac_vec(theta)) for d in self.chart.dual)


def _to_twisted(chart: RayChart, twisted: Sequence[int], e: ExteriorElement) -> ExteriorElement:
    """Rewrite an element in adapted coordinates and drop non-twisted directions."""
    q = len(chart.basis)
    s = len(twisted)
    pos = {j: i for i, j in enumerate(twisted)}
    images = []
    for i in range(q):
        coeffs = [Fraction(0)] * s
        for j in range(q):
            if j in pos:
                coeffs[pos[j]] = chart.basis[j][i]
        images.append(ExteriorElement.linear(coeffs))
    return e.substitute(images)


def chart_algebra(
    df: DecoratedFan,
    ray: int,
    override: Sequence[tuple[int, ExteriorElement]] | None = None,
    bound: int = DEFAULT_BOUND,
) -> ChartAlgebra:
    """The chart ``C[t, t^l_j xi'_j]`` (or an override presentation) as a graded model.

    Override generators are ``(degree, element)`` in the original xi
    coordinates; they replace the odd generators of the chart.
    """
    chart = ray_chart(df, ray)
    twisted = tuple(chart.twisted)
    s = len(twisted)
    all_names = chart.coordinate_names()
    names = tuple(all_names[j] for j in twisted)
    if override is None:
        gens = []
        for i, j in enumerate(twisted):
            gens.append((chart.levels[j], ExteriorElement.monomial(s, [i])))
    else:
        gens = []
        for d, e in override:
            if e.q != df.torus.q:
                raise ValueError("override element has the wrong odd rank")
            if d < 0:
                raise ValueError("negative generator degree")
            gens.append((d, _to_twisted(chart, twisted, e)))
    return ChartAlgebra(chart, twisted, algebra_from_generators(s, names, gens, bound))


def parse_override(q: int, data) -> list[tuple[int, ExteriorElement]]:
    """``[{"degree": k, "element": {"xi4": "1", "xi1*xi2*xi3": "1"}}, ...]``."""
    items = data["generators"] if isinstance(data, dict) else data
    out = []
    for item in items:
        out.append((int(item["degree"]), parse_element(q, item["element"])))
    return out


def chart_derivation(df: DecoratedFan, ca: ChartAlgebra, theta: Sequence) -> Derivation:
    """Right derivation by ``theta`` on the chart model.

    Needs ``theta`` in ``V_{rho,0}``.  The exterior multiplier of degree k is
    ``k * sum_a <m1, x_{a,theta}> xi_a`` rewritten in twisted coordinates.
    """
    chart = ca.chart
    t = df.torus
    theta = la.frac_vec(theta)
    if not df.V(chart.ray, 0).contains(theta):
        raise OutOfScope("theta is not in V_{rho,0}")
    coords = ca.coordinates(theta)
    s = len(ca.twisted)
    contraction = tuple(coords[j] for j in ca.twisted)

    def form(m):
        # sum_a <m, x_{a,theta}> xi_a in original coordinates
        return [sum(theta[j] * la.dot(m, t.x[a][j]) for j in range(t.q)) for a in range(t.q)]

    def adapted(f):
        # xi_a = sum_j B[a][j] xi'_j
        return [sum(f[a] * chart.basis[j][a] for a in range(t.q)) for j in range(t.q)]

    lam_all = adapted(form(chart.m1))
    hset = [j for j, l in enumerate(chart.levels) if l is None]
    if any(lam_all[j] != 0 for j in hset):
        raise DSConsistencyError("theta pairs nontrivially with h directions")
    for n in chart.perp:
        other = adapted(form(n))
        if any(other[j] != 0 for j in ca.twisted):
            raise OutOfScope("bracket with theta is not proportional to the ray")
    lam = tuple(lam_all[j] for j in ca.twisted)
    if len(lam) != s:
        raise AssertionError
    return Derivation(contraction, lam)


@dataclass
class HR1Report:
    ray: int
    bound: int
    verdicts: list[dict]

    @property
    def passed(self) -> bool:
        return all(v["verdict"] == "FR" for v in self.verdicts)

    def first_failure(self) -> dict | None:
        return next((v for v in self.verdicts if v["verdict"] != "FR"), None)

    def to_json(self) -> dict:
        return {
            "ray": self.ray,
            "bound": self.bound,
            "pass": self.passed,
            "qualifier": f"verified up to degree {self.bound}",
            "verdicts": self.verdicts,
        }


def hr1_condition_e(
    df: DecoratedFan,
    ray: int,
    override: Sequence[tuple[int, ExteriorElement]] | None = None,
    bound: int = DEFAULT_BOUND,
) -> HR1Report:
    """DS then FR for every twisted basis vector of ``V_{rho,0}`` modulo h."""
    from .superlie import _fmt

    ca = chart_algebra(df, ray, override, bound)
    out = []
    for j in ca.twisted:
        theta = ca.chart.basis[j]
        der = chart_derivation(df, ca, theta)
        ds = ds_compute(ca.model, der)
        v = fr_check(ds)
        entry = {"theta": [_fmt(x) for x in theta]}
        entry.update(v.to_json())
        out.append(entry)
    return HR1Report(ray, bound, out)


def closed_form_ds_dims(levels: Sequence[int], j: int, bound: int) -> list[int]:
    """Abelian chart, theta = b_j: ``#{S among the others : 0 <= k - sum l_S < l_j}``."""
    others = [l for i, l in enumerate(levels) if i != j]
    lj = levels[j]
    out = []
    for k in range(bound + 1):
        c = 0
        for n in range(len(others) + 1):
            for sub in itertools.combinations(others, n):
                if 0 <= k - sum(sub) < lj:
                    c += 1
        out.append(c)
    return out
