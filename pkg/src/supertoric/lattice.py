"""Integer polyhedral geometry: cones, fans, duals, faces, Hilbert bases, refinement.

All arithmetic is exact (``int`` and ``Fraction``).  Cones live in a lattice of
fixed rank and are stored by primitive generators.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg as la

IntVec = tuple[int, ...]


class LatticeError(ValueError):
    """Bad input for a lattice operation."""


class UnsupportedCone(LatticeError):
    """The operation is not defined for this kind of cone (e.g. lineality)."""


def pairing(m: Sequence[int], v: Sequence[int]):
    if len(m) != len(v):
        raise LatticeError(f"rank mismatch: {len(m)} vs {len(v)}")
    return sum(a * b for a, b in zip(m, v))


def primitive(v: Sequence) -> IntVec:
    return la.primitive(v)


# ------------------------------------------------------------------ duals


def _dual_parts(gens: Sequence[IntVec], rank: int) -> tuple[list[IntVec], list[IntVec]]:
    """H-to-V conversion of ``{m : <m, g> >= 0 for all g}``.

    Returns ``(rays, lineality)``: primitive extreme rays of a pointed
    complement and a Z-basis of the lineality space (gens-perp in M).
    """
    gens = [tuple(g) for g in gens if any(g)]
    for g in gens:
        if len(g) != rank:
            raise LatticeError(f"rank mismatch: generator {g} in rank {rank}")
    if not gens:
        return [], [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    complement, lineality = la.kernel_and_complement(gens, rank)
    k = len(complement)
    # inequalities on complement coordinates y
    g2 = [[pairing(g, c) for c in complement] for g in gens]
    rays: list[IntVec] = []
    seen = set()
    if k == 1:
        cands = [(1,), (-1,)]
    else:
        cands = []
        for rows in itertools.combinations(range(len(g2)), k - 1):
            sub = [g2[i] for i in rows]
            ns = la.nullspace(sub, k)
            if len(ns) != 1:
                continue
            d = la.primitive(ns[0])
            cands.append(d)
            cands.append(tuple(-x for x in d))
    for d in cands:
        if d in seen:
            continue
        vals = [sum(a * b for a, b in zip(row, d)) for row in g2]
        if any(x < 0 for x in vals):
            continue
        active = [row for row, x in zip(g2, vals) if x == 0]
        if k > 1 and la.rank(active, k) != k - 1:
            continue
        seen.add(d)
        m = tuple(sum(d[j] * complement[j][i] for j in range(k)) for i in range(rank))
        rays.append(la.primitive(m))
    return sorted(set(rays)), [tuple(x) for x in lineality]


def _dual_generators(gens: Sequence[IntVec], rank: int) -> list[IntVec]:
    rays, lin = _dual_parts(gens, rank)
    out = list(rays)
    for v in lin:
        out.append(tuple(v))
        out.append(tuple(-x for x in v))
    return out


@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone given by primitive generators."""

    rank: int
    rays: tuple[IntVec, ...]

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence[int]], rank: int | None = None) -> "Cone":
        gens = [tuple(int(x) for x in g) for g in gens]
        if rank is None:
            if not gens:
                raise LatticeError("rank needed for the zero cone")
            rank = len(gens[0])
        prim = []
        for g in gens:
            if len(g) != rank:
                raise LatticeError(f"rank mismatch: generator {g} in rank {rank}")
            if any(g):
                prim.append(la.primitive(g))
        return cls(rank, tuple(sorted(set(prim))))

    def __repr__(self) -> str:
        return f"Cone({list(self.rays)})"

    @cached_property
    def dim(self) -> int:
        return la.rank(self.rays, self.rank) if self.rays else 0

    @cached_property
    def _dual(self) -> tuple[list[IntVec], list[IntVec]]:
        return _dual_parts(self.rays, self.rank)

    @cached_property
    def inequalities(self) -> tuple[IntVec, ...]:
        """Generators of the dual cone, so ``x in self`` iff all pairings >= 0."""
        return tuple(_dual_generators(self.rays, self.rank))

    def contains(self, v: Sequence) -> bool:
        return all(pairing(m, v) >= 0 for m in self.inequalities)

    @cached_property
    def is_pointed(self) -> bool:
        rays, lin = _dual_parts(self.rays, self.rank)
        return la.rank(list(rays) + list(lin), self.rank) == self.rank if self.rank else True

    @cached_property
    def canonical(self) -> "Cone":
        """Drop generators that are non-negative combinations of the others."""
        keep = list(self.rays)
        for g in list(keep):
            rest = [h for h in keep if h != g]
            if rest and Cone(self.rank, tuple(rest)).contains(g):
                keep = rest
        return Cone(self.rank, tuple(sorted(keep)))

    def same_set(self, other: "Cone") -> bool:
        return all(other.contains(g) for g in self.rays) and all(self.contains(g) for g in other.rays)

    @cached_property
    def facets(self) -> tuple[tuple[IntVec, ...], ...]:
        """Generator subsets spanning the facets (pointed cones only)."""
        rays, _ = self._dual
        out = set()
        d = self.dim
        for m in rays:
            sub = tuple(g for g in self.rays if pairing(m, g) == 0)
            if la.rank(sub, self.rank) == d - 1 if sub else d == 1:
                out.add(sub)
        return tuple(sorted(out))

    def interior_vector(self) -> IntVec:
        if not self.rays:
            return tuple([0] * self.rank)
        return tuple(sum(g[i] for g in self.rays) for i in range(self.rank))


def cone(*gens: Sequence[int]) -> Cone:
    return Cone.from_generators(gens)


def dual_cone(c: Cone) -> Cone:
    """Dual cone ``{m : <m, v> >= 0 for v in c}`` with primitive generators."""
    return Cone.from_generators(_dual_generators(c.rays, c.rank), c.rank)


def face_of(c: Cone, m: Sequence[int]) -> Cone:
    """The face ``c ∩ m^perp``; ``m`` must lie in the dual cone."""
    vals = [pairing(m, g) for g in c.rays]
    if any(x < 0 for x in vals):
        raise LatticeError(f"{tuple(m)} is not in the dual cone")
    return Cone(c.rank, tuple(g for g, x in zip(c.rays, vals) if x == 0))


# ------------------------------------------------------------- Hilbert bases


def saturated_span_basis(gens: Sequence[IntVec], rank: int) -> list[IntVec]:
    """Z-basis of ``span(gens) ∩ Z^rank``."""
    if not gens:
        return []
    perp = la.integer_kernel(gens, rank)
    if not perp:
        return [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    return la.integer_kernel(perp, rank)


def parallelepiped_points(gens: Sequence[IntVec], rank: int) -> list[tuple[IntVec, tuple[Fraction, ...]]]:
    """Lattice points ``sum l_i g_i`` with ``0 <= l_i < 1`` (independent gens).

    Returns ``(point, lambdas)`` pairs, the origin included.
    """
    k = len(gens)
    if k == 0:
        return [(tuple([0] * rank), ())]
    basis = saturated_span_basis(gens, rank)
    # coordinates of each generator in the saturated basis: gens = C * basis
    cmat = []
    bt = la.transpose(basis)
    for g in gens:
        coeffs = la.solve(bt, g)
        if coeffs is None or len(basis) != k:
            raise LatticeError("generators are not independent")
        cmat.append([int(x) for x in coeffs])
    ct = la.transpose(cmat)  # a = C^T lambda
    u, d, _ = la.smith_normal_form(ct, k)
    uinv = la.inverse(u)
    ctinv = la.inverse(ct)
    diag = [d[i][i] for i in range(k)]
    out = []
    for z in itertools.product(*[range(x) for x in diag]):
        a = la.matvec(uinv, z)
        lam = la.matvec(ctinv, a)
        lam = tuple(x - (x.numerator // x.denominator) for x in lam)
        point = tuple(sum(lam[i] * gens[i][j] for i in range(k)) for j in range(rank))
        out.append((tuple(int(x) for x in point), lam))
    return sorted(out)


def triangulate(c: Cone, order: Sequence[IntVec] | None = None) -> list[tuple[IntVec, ...]]:
    """Pulling triangulation of a pointed cone using a global generator order."""
    rank_of = {g: i for i, g in enumerate(order)} if order is not None else None

    def key(g):
        return (rank_of[g], g) if rank_of is not None and g in rank_of else (len(rank_of or ()), g)

    def pull(sub: tuple[IntVec, ...]) -> list[tuple[IntVec, ...]]:
        k = la.rank(sub, c.rank) if sub else 0
        if k == len(sub):
            return [tuple(sorted(sub))]
        v = min(sub, key=key)
        out = []
        for facet in Cone(c.rank, tuple(sorted(sub))).facets:
            if v in facet:
                continue
            for simplex in pull(facet):
                out.append(tuple(sorted(simplex + (v,))))
        return out

    if not c.is_pointed:
        raise UnsupportedCone("cannot triangulate a cone with lineality")
    return sorted(set(pull(c.rays)))


def _degree_form(c: Cone) -> IntVec:
    rays, _ = c._dual
    return tuple(sum(m[i] for m in rays) for i in range(c.rank))


def hilbert_basis(c: Cone) -> list[IntVec]:
    """Minimal generating set of the semigroup ``c ∩ Z^rank`` (pointed c)."""
    if not c.is_pointed:
        raise UnsupportedCone("hilbert_basis needs a pointed cone (lineality present)")
    if not c.rays:
        return []
    c = c.canonical
    cands = set(c.rays)
    for simplex in triangulate(c):
        for point, _ in parallelepiped_points(simplex, c.rank):
            if any(point):
                cands.add(point)
    w = _degree_form(c)
    ordered = sorted(cands, key=lambda x: (pairing(w, x), x))
    basis: list[IntVec] = []
    for x in ordered:
        if any(
            pairing(w, h) < pairing(w, x) and c.contains(tuple(a - b for a, b in zip(x, h)))
            for h in basis
        ):
            continue
        basis.append(x)
    return sorted(basis)


def dual_semigroup_generators(c: Cone) -> tuple[list[IntVec], list[IntVec]]:
    """Generators of ``c^vee ∩ M`` as (Hilbert basis of a pointed part, lineality basis).

    Every lattice point of the dual is a non-negative combination of the first
    list plus an integer combination of the second.
    """
    if not c.is_pointed:
        raise UnsupportedCone("cone in N must be strongly convex")
    gens = list(c.rays)
    rank = c.rank
    if not gens:
        return [], [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    complement, lineality = la.kernel_and_complement(gens, rank)
    k = len(complement)
    g2 = [tuple(pairing(g, col) for col in complement) for g in gens]
    # the dual of the image cone in complement coordinates
    image = Cone.from_generators(g2, k)
    ydual = dual_cone(image)
    hb = hilbert_basis(ydual)
    lifted = [tuple(sum(y[j] * complement[j][i] for j in range(k)) for i in range(rank)) for y in hb]
    return sorted(lifted), [tuple(v) for v in lineality]


def characters_to_test(c: Cone, degree: int = 2) -> list[IntVec]:
    """Sample of ``c^vee ∩ M`` used for bounded quantifiers.

    Zero, generators (lineality with both signs), all sums of up to ``degree``
    generators, and one relative-interior point per face of the dual.
    """
    hb, lin = dual_semigroup_generators(c)
    gens = list(hb) + list(lin) + [tuple(-x for x in v) for v in lin]
    rank = c.rank
    out = {tuple([0] * rank)}
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(gens, d):
            out.add(tuple(sum(v[i] for v in combo) for i in range(rank)))
    for face in _all_faces(c):
        on = [m for m in hb if all(pairing(m, g) == 0 for g in face)]
        if on:
            out.add(tuple(sum(m[i] for m in on) for i in range(rank)))
    return sorted(out)


def _all_faces(c: Cone) -> list[tuple[IntVec, ...]]:
    seen = set()
    stack = [c.canonical.rays]
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        if f:
            stack.extend(Cone(c.rank, f).facets)
    return sorted(seen, key=lambda f: (len(f), f))


def is_smooth_cone(c: Cone) -> bool:
    """Generators extend to a Z-basis of the lattice."""
    if not c.rays:
        return True
    if la.rank(c.rays, c.rank) != len(c.rays):
        return False
    return la.gcd_of_maximal_minors(c.rays) == 1


def multiplicity(gens: Sequence[IntVec]) -> int:
    """Index of the generated sublattice in its saturation (0 if dependent)."""
    return la.gcd_of_maximal_minors(gens) if gens else 1


# ------------------------------------------------------------------- fans


@dataclass(frozen=True)
class Fan:
    """Fan stored as primitive rays and generating cones (ray-index tuples)."""

    rank: int
    rays: tuple[IntVec, ...]
    cones: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, rank: int, rays: Iterable[Sequence[int]], cones: Iterable[Iterable[int]]) -> "Fan":
        rays = tuple(tuple(int(x) for x in r) for r in rays)
        for r in rays:
            if len(r) != rank:
                raise LatticeError(f"ray {r} has wrong length for rank {rank}")
            if not any(r):
                raise LatticeError("zero ray")
            if la.primitive(r) != r:
                raise LatticeError(f"ray {r} is not primitive")
        cones = tuple(sorted({tuple(sorted(set(int(i) for i in c))) for c in cones}))
        for c in cones:
            for i in c:
                if not 0 <= i < len(rays):
                    raise LatticeError(f"cone {c} refers to missing ray {i}")
        return cls(rank, rays, cones)

    def cone(self, idx: Iterable[int]) -> Cone:
        return Cone.from_generators([self.rays[i] for i in idx], self.rank)

    def index_of(self, v: Sequence[int]) -> int:
        return self.rays.index(tuple(v))

    @cached_property
    def maximal_cones(self) -> tuple[tuple[int, ...], ...]:
        cs = [set(c) for c in self.cones]
        out = [c for c in self.cones if not any(set(c) < d for d in cs)]
        return tuple(sorted(out))

    @cached_property
    def all_cones(self) -> tuple[tuple[int, ...], ...]:
        """Every cone of the fan (faces included), the zero cone first."""
        out = {()}
        for c in self.maximal_cones:
            for face in _all_faces(self.cone(c)):
                out.add(tuple(sorted(self.index_of(g) for g in face)))
        return tuple(sorted(out, key=lambda c: (len(c), c)))

    def rays_of(self, c: Sequence[int]) -> list[IntVec]:
        return [self.rays[i] for i in c]

    def check(self) -> list[str]:
        """Structural problems (empty list when the fan is valid)."""
        problems = []
        used = set()
        for c in self.cones:
            used.update(c)
            cn = self.cone(c)
            if not cn.is_pointed:
                problems.append(f"cone {c} is not strongly convex")
                continue
            extreme = set(cn.canonical.rays)
            for i in c:
                if self.rays[i] not in extreme:
                    problems.append(f"ray {i} is not extremal in cone {c}")
        for i in range(len(self.rays)):
            if i not in used:
                problems.append(f"ray {i} lies in no cone")
        if problems:
            return problems
        mc = self.maximal_cones
        for a, b in itertools.combinations(mc, 2):
            shared = tuple(sorted(set(a) & set(b)))
            ca, cb = self.cone(a), self.cone(b)
            meet = Cone.from_generators(
                _dual_generators(list(ca.inequalities) + list(cb.inequalities), self.rank), self.rank
            )
            if not meet.same_set(self.cone(shared)):
                problems.append(f"cones {a} and {b} overlap beyond a common face")
                continue
            for big in (a, b):
                if not _is_face(self.cone(big), [self.rays[i] for i in shared]):
                    problems.append(f"{shared} is not a face of {big}")
        return problems

    def contains_point(self, v: Sequence) -> bool:
        return any(self.cone(c).contains(v) for c in self.maximal_cones) or not any(v)

    def to_json(self) -> dict:
        return {"rank": self.rank, "rays": [list(r) for r in self.rays], "cones": [list(c) for c in self.cones]}

    @classmethod
    def from_json(cls, data: dict) -> "Fan":
        try:
            return cls.build(int(data["rank"]), data["rays"], data["cones"])
        except (KeyError, TypeError) as exc:
            raise LatticeError(f"malformed fan JSON: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _is_face(c: Cone, sub: Sequence[IntVec]) -> bool:
    if not sub:
        return c.is_pointed
    rays, lin = c._dual
    on = [m for m in rays if all(pairing(m, g) == 0 for g in sub)]
    if not on:
        return set(sub) == set(c.rays) and not rays
    m = tuple(sum(x[i] for x in on) for i in range(c.rank))
    zero = {g for g in c.rays if pairing(m, g) == 0}
    return zero == set(sub)


def fan_from_cones(rank: int, cones: Iterable[Iterable[Sequence[int]]]) -> Fan:
    """Build a fan from cones given by generator vectors."""
    rays: list[IntVec] = []
    idx_cones = []
    for c in cones:
        idx = []
        for g in c:
            g = la.primitive(g)
            if g not in rays:
                rays.append(g)
            idx.append(rays.index(g))
        idx_cones.append(idx)
    return Fan.build(rank, rays, idx_cones)


# ------------------------------------------------------------- refinement


@dataclass
class _SimplicialFan:
    rank: int
    rays: list[IntVec]
    cones: set[frozenset[int]] = field(default_factory=set)

    def add_ray(self, v: IntVec) -> int:
        if v in self.rays:
            return self.rays.index(v)
        self.rays.append(v)
        return len(self.rays) - 1

    def star_subdivide(self, face: frozenset[int], w: IntVec) -> int:
        new = self.add_ray(w)
        out = set()
        for c in self.cones:
            if face <= c:
                for r in face:
                    out.add((c - {r}) | {new})
            else:
                out.add(c)
        self.cones = out
        return new


def _support_coefficients(gens: Sequence[IntVec], v: Sequence) -> tuple[Fraction, ...]:
    coeffs = la.solve(la.transpose(gens), v)
    if coeffs is None:
        raise LatticeError("vector outside the span")
    return coeffs


def refine_fan(f: Fan) -> Fan:
    """Smooth refinement with at most one original ray per maximal cone.

    Original rays keep their indices; new rays are appended.
    """
    sf = _SimplicialFan(f.rank, list(f.rays))
    order = list(f.rays)
    for c in f.maximal_cones:
        for simplex in triangulate(f.cone(c), order):
            sf.cones.add(frozenset(sf.rays.index(g) for g in simplex))
    n_orig = len(f.rays)
    # separate original rays
    while True:
        pairs = sorted(
            {tuple(sorted(p)) for c in sf.cones for p in itertools.combinations(sorted(i for i in c if i < n_orig), 2)}
        )
        if not pairs:
            break
        i, j = pairs[0]
        w = la.primitive(tuple(a + b for a, b in zip(sf.rays[i], sf.rays[j])))
        sf.star_subdivide(frozenset((i, j)), w)
    # resolve singular cones
    while True:
        bad = sorted(
            (tuple(sorted(c)) for c in sf.cones if multiplicity([sf.rays[i] for i in sorted(c)]) != 1),
            key=lambda c: (len(c), c),
        )
        if not bad:
            break
        c = bad[0]
        gens = [sf.rays[i] for i in c]
        pts = [(sum(lam), p, lam) for p, lam in parallelepiped_points(gens, f.rank) if any(p)]
        _, w, lam = min(pts)
        face = frozenset(i for i, x in zip(c, lam) if x != 0)
        sf.star_subdivide(face, la.primitive(w))
    cones = [tuple(sorted(c)) for c in sf.cones]
    return Fan.build(f.rank, sf.rays, cones)


def same_support(a: Fan, b: Fan, samples: Iterable[Sequence] | None = None) -> bool:
    """Compare supports on rays, pairwise sums and interior points of both fans."""
    pts = set()
    for fan in (a, b):
        for c in fan.all_cones:
            cn = fan.cone(c)
            pts.add(cn.interior_vector())
        for r1, r2 in itertools.combinations(fan.rays, 2):
            pts.add(tuple(x + y for x, y in zip(r1, r2)))
            pts.add(tuple(x - y for x, y in zip(r1, r2)))
    if samples is not None:
        pts.update(tuple(s) for s in samples)
    return all(a.contains_point(p) == b.contains_point(p) for p in pts)
