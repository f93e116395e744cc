"""Isomeric super-Grassmannian combinatorics.

Torus orbit closures of points of QGr(r, n) under ``Q(1)^n``: stabilizers from
support patterns, matroid polytopes with their decorations, and the
translation between decorated polytopes and decorated fans.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .decofan import DecoratedFan, DecoratedFanError
from .lattice import Cone, Fan, dual_cone, fan_from_cones, pairing
from .superlie import Subspace, SupertorusData, _fmt

IntVec = tuple[int, ...]
MaxN = 6


class QGrError(ValueError):
    pass


# ------------------------------------------------------------- patterns


@dataclass(frozen=True)
class SupportPattern:
    """Zero/nonzero pattern of an ``n x r`` matrix whose top ``r x r`` block is the identity."""

    n: int
    r: int
    support: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        if not 0 <= self.r <= self.n:
            raise QGrError("need 0 <= r <= n")
        if len(self.support) != self.n or any(len(row) != self.r for row in self.support):
            raise QGrError("pattern must be n x r")
        for i in range(self.r):
            for j in range(self.r):
                if self.support[i][j] != (i == j):
                    raise QGrError("top r x r block of the pattern must be the identity")

    @classmethod
    def generic(cls, r: int, n: int) -> "SupportPattern":
        if not 0 <= r <= n:
            raise QGrError("need 0 <= r <= n")
        rows = [tuple(i == j for j in range(r)) if i < r else (True,) * r for i in range(n)]
        return cls(n, r, tuple(rows))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "SupportPattern":
        n = len(rows)
        r = len(rows[0]) if rows else 0
        return cls(n, r, tuple(tuple(bool(x) for x in row) for row in rows))

    @classmethod
    def from_json(cls, data: dict) -> "SupportPattern":
        try:
            rows = data["pattern"]
            sp = cls.from_rows(rows)
            if "n" in data and int(data["n"]) != sp.n or "r" in data and int(data["r"]) != sp.r:
                raise QGrError("n, r disagree with the pattern shape")
            return sp
        except (KeyError, TypeError) as exc:
            raise QGrError(f"malformed pattern JSON: {exc}") from exc

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "pattern": [[int(x) for x in row] for row in self.support]}


def stabilizer_blocks(sp: SupportPattern) -> list[list[int]]:
    """Finest partition of rows with ``i ~ j`` whenever rows i and j share a nonzero column."""
    parent = list(range(sp.n + sp.r))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(sp.n):
        for j in range(sp.r):
            if sp.support[i][j]:
                parent[find(i)] = find(sp.n + j)
    groups: dict[int, list[int]] = {}
    for i in range(sp.n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


@dataclass(frozen=True)
class PatternStabilizer:
    blocks: tuple[tuple[int, ...], ...]
    even: Subspace  # in Q^n, spanned by block x-sums
    odd: Subspace  # in Q^n, spanned by block theta-sums

    def to_json(self) -> dict:
        return {
            "blocks": [[i + 1 for i in b] for b in self.blocks],
            "even": self.even.to_json(),
            "odd": self.odd.to_json(),
        }


def stabilizer_from_pattern(sp: SupportPattern) -> PatternStabilizer:
    blocks = stabilizer_blocks(sp)
    sums = [[int(i in b) for i in range(sp.n)] for b in blocks]
    return PatternStabilizer(tuple(tuple(b) for b in blocks), Subspace.span(sums, sp.n), Subspace.span(sums, sp.n))


# ------------------------------------------------------------ quotient torus


@dataclass(frozen=True)
class QuotientTorus:
    """``Q(1)^n`` modulo an even stabilizer, with character lattice ``M_P``.

    ``basis`` is a Hermite-normal Z-basis of ``M_P`` inside Z^n; the image of
    ``x_i`` in the quotient has coordinates ``(b_k[i])_k``.
    """

    n: int
    basis: tuple[IntVec, ...]
    h: Subspace

    @property
    def p(self) -> int:
        return len(self.basis)

    def xbar(self, i: int) -> IntVec:
        return tuple(b[i] for b in self.basis)

    def torus(self) -> SupertorusData:
        zero = tuple(0 for _ in range(self.p))
        x = [[self.xbar(i) if i == j else zero for j in range(self.n)] for i in range(self.n)]
        return SupertorusData.build(self.p, self.n, x)

    def coordinates(self, m: Sequence[int]) -> IntVec:
        """``M_P`` coordinates of a character of Z^n vanishing on the stabilizer."""
        c = la.solve(la.transpose(self.basis), m)
        if c is None or any(x.denominator != 1 for x in c):
            raise QGrError(f"{tuple(m)} is not in M_P")
        return tuple(int(x) for x in c)

    def lift(self, u: Sequence[int]) -> IntVec:
        """An integer vector of Z^n mapping to the cocharacter ``u``."""
        # sum_i lift_i * b_k[i] = u_k
        rows = [list(b) for b in self.basis]
        if not rows:
            return tuple(0 for _ in range(self.n))
        U, D, V = la.smith_normal_form(rows, self.n)
        rhs = la.matvec(U, u)
        y = []
        for k in range(self.n):
            d = D[k][k] if k < len(D) else 0
            if k < len(rhs) and d:
                if rhs[k] % d:
                    raise QGrError("cocharacter does not lift")
                y.append(rhs[k] // d)
            else:
                y.append(0)
        out = la.matvec(V, y)
        if la.matvec(rows, out) != tuple(u):
            raise AssertionError("lift failed")
        return tuple(int(x) for x in out)

    def odd_image(self, v: Sequence[int]) -> tuple[Fraction, ...]:
        """The odd vector ``sum v_i theta_i``."""
        return la.frac_vec(v)


def quotient_torus(n: int, even_stab: Subspace, odd_stab: Subspace) -> QuotientTorus:
    rows = [la.primitive(r) for r in even_stab.rows]
    kernel = la.integer_kernel(rows, n) if rows else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    basis = la.hermite_normal_form(kernel)
    return QuotientTorus(n, tuple(basis), odd_stab)


# ------------------------------------------------------------ matroids


def _has_matching(sp: SupportPattern, rows: Sequence[int]) -> bool:
    for perm in itertools.permutations(range(sp.r)):
        if all(sp.support[i][perm[k]] for k, i in enumerate(rows)):
            return True
    return False


def matroid_bases(sp: SupportPattern) -> list[tuple[int, ...]]:
    """r-subsets of rows whose square submatrix is generically invertible."""
    if sp.n > MaxN:
        raise QGrError(f"orbit polytope computation is limited to n <= {MaxN}")
    return [B for B in itertools.combinations(range(sp.n), sp.r) if _has_matching(sp, B)]


# ------------------------------------------------------------ polytopes


@dataclass(frozen=True)
class PolytopeFace:
    vertex_ids: tuple[int, ...]
    W: Subspace  # in t1* = Q^n

    def to_json(self) -> dict:
        return {"vertex_ids": list(self.vertex_ids), "W": self.W.to_json()}


@dataclass(frozen=True)
class DecoratedPolytope:
    """Lattice polytope in ``M_P`` with a subspace ``W_F ⊆ t1*`` on every face."""

    vertices: tuple[IntVec, ...]  # in Z^n
    faces: tuple[PolytopeFace, ...]
    lattice: QuotientTorus

    def face(self, ids: Sequence[int]) -> PolytopeFace:
        key = tuple(sorted(ids))
        for f in self.faces:
            if f.vertex_ids == key:
                return f
        raise KeyError(key)

    @property
    def dim(self) -> int:
        v0 = self.vertices[0]
        return la.rank([[a - b for a, b in zip(v, v0)] for v in self.vertices], len(v0)) if self.vertices else -1

    def coordinates(self) -> list[IntVec]:
        """Vertices in ``M_P`` coordinates relative to the first vertex."""
        v0 = self.vertices[0]
        return [self.lattice.coordinates([a - b for a, b in zip(v, v0)]) for v in self.vertices]

    def to_json(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "faces": [f.to_json() for f in self.faces],
            "lattice": [list(b) for b in self.lattice.basis],
            "h": self.lattice.h.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DecoratedPolytope":
        try:
            verts = tuple(tuple(int(x) for x in v) for v in data["vertices"])
            if not verts:
                raise QGrError("polytope has no vertices")
            n = len(verts[0])
            faces = tuple(
                PolytopeFace(tuple(sorted(int(i) for i in f["vertex_ids"])), Subspace.from_json(f["W"], n))
                for f in data["faces"]
            )
            if "lattice" in data:
                basis = tuple(tuple(int(x) for x in b) for b in data["lattice"])
            else:
                v0 = verts[0]
                basis = tuple(la.hermite_normal_form(
                    la.integer_kernel(la.integer_kernel([[a - b for a, b in zip(v, v0)] for v in verts], n), n)
                ))
            whole = next((f for f in faces if len(f.vertex_ids) == len(verts)), None)
            h = Subspace.from_json(data["h"], n) if "h" in data else (
                whole.W.annihilator() if whole else Subspace.zero(n)
            )
            return cls(verts, faces, QuotientTorus(n, basis, h))
        except (KeyError, TypeError, ValueError) as exc:
            raise QGrError(f"malformed polytope JSON: {exc}") from exc


def _constant_coordinates(points: Sequence[IntVec]) -> list[int]:
    n = len(points[0])
    return [i for i in range(n) if len({p[i] for p in points}) == 1]


def _hypersimplex_W(n: int, fixed: Sequence[int]) -> Subspace:
    """``{beta : sum beta = 0, beta_i = 0 for i in fixed}``."""
    rows = [[1] * n] + [[int(j == i) for j in range(n)] for i in fixed]
    return Subspace.span(la.nullspace(rows, n), n)


def hypersimplex_polytope(r: int, n: int) -> DecoratedPolytope:
    """``Δ(r, n)`` with ``W_F`` = sum-zero vectors vanishing on the coordinates fixed by F."""
    if not 0 <= r <= n:
        raise QGrError("need 0 <= r <= n")
    verts = [tuple(int(i in B) for i in range(n)) for B in itertools.combinations(range(n), r)]
    faces: dict[tuple[int, ...], PolytopeFace] = {}
    for ones_size in range(n + 1):
        for ones in itertools.combinations(range(n), ones_size):
            rest = [i for i in range(n) if i not in ones]
            for zeros_size in range(len(rest) + 1):
                for zeros in itertools.combinations(rest, zeros_size):
                    ids = tuple(
                        k for k, v in enumerate(verts)
                        if all(v[i] == 1 for i in ones) and all(v[i] == 0 for i in zeros)
                    )
                    if not ids or ids in faces:
                        continue
                    fixed = _constant_coordinates([verts[k] for k in ids])
                    faces[ids] = PolytopeFace(ids, _hypersimplex_W(n, fixed))
    # a point (r in {0, n}) is fixed by the whole torus
    stab = Subspace.span([[1] * n], n) if 0 < r < n else Subspace.full(n)
    lattice = quotient_torus(n, stab, stab)
    return DecoratedPolytope(tuple(verts), tuple(sorted(faces.values(), key=lambda f: (len(f.vertex_ids), f.vertex_ids))), lattice)


# ------------------------------------------------------------ normal fans


def normal_fan(coords: Sequence[IntVec], p: int) -> tuple[Fan, list[tuple[int, ...]]]:
    """Inner normal fan of a full-dimensional lattice polytope.

    Returns the fan and, per maximal cone, the index of its vertex.
    """
    if p == 0:
        return Fan.build(0, [], [()]), [0]
    cones = []
    for v in coords:
        tangent = [tuple(a - b for a, b in zip(w, v)) for w in coords if w != v]
        cones.append(dual_cone(Cone.from_generators(tangent, p)).rays)
    fan = fan_from_cones(p, cones)
    return fan, list(range(len(coords)))


def face_of_cone(fan: Fan, idx: Sequence[int], coords: Sequence[IntVec]) -> tuple[int, ...]:
    """Vertices minimizing every ray of the cone: the face dual to it."""
    if not coords:
        return ()
    best = list(range(len(coords)))
    for r in idx:
        u = fan.rays[r]
        vals = [pairing(u, coords[k]) for k in best]
        lo = min(vals)
        best = [k for k, v in zip(best, vals) if v == lo]
    return tuple(best)


def _check_dim(dp: DecoratedPolytope) -> None:
    if dp.dim != dp.lattice.p:
        raise QGrError(f"polytope of dimension {dp.dim} is not full-dimensional in M_P (rank {dp.lattice.p})")


def polytope_fan_roundtrip(dp: DecoratedPolytope) -> DecoratedFan:
    """Normal fan with ``V_rho = ann(W_F)`` on facets and ``h = ann(W_P)``."""
    _check_dim(dp)
    coords = dp.coordinates()
    p = dp.lattice.p
    fan, _ = normal_fan(coords, p)
    n = dp.lattice.n
    h = dp.lattice.h
    whole = dp.face(range(len(dp.vertices)))
    if whole.W.annihilator() != h:
        raise QGrError("the open-orbit decoration does not match h")
    decs = {}
    for i in range(len(fan.rays)):
        facet = face_of_cone(fan, (i,), coords)
        V = dp.face(facet).W.annihilator()
        decs[i] = [V, h] if V != h else [h]
    return DecoratedFan.build(dp.lattice.torus(), fan, h, decs)


def polytope_from_fan(df: DecoratedFan, dp: DecoratedPolytope) -> DecoratedPolytope:
    """Re-decorate the faces of ``dp`` by ``W_F = ann(V_{sigma_F, 0})``."""
    coords = dp.coordinates()
    faces = []
    for f in dp.faces:
        sigma = tuple(i for i in range(len(df.fan.rays)) if set(f.vertex_ids) <= set(face_of_cone(df.fan, (i,), coords)))
        faces.append(PolytopeFace(f.vertex_ids, df.V_sigma0(sigma).annihilator()))
    return DecoratedPolytope(dp.vertices, tuple(faces), dp.lattice)


def fan_faces(df: DecoratedFan, dp: DecoratedPolytope) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Map each cone of the normal fan to the vertex ids of its face."""
    coords = dp.coordinates()
    return {idx: face_of_cone(df.fan, idx, coords) for idx in df.fan.all_cones}


# ------------------------------------------------------------ orbit closures


def orbit_polytope(sp: SupportPattern) -> DecoratedPolytope:
    """Matroid polytope of the pattern, decorated from the orbit-closure fan."""
    stab = stabilizer_from_pattern(sp)
    lattice = quotient_torus(sp.n, stab.even, stab.odd)
    bases = matroid_bases(sp)
    verts = tuple(tuple(int(i in B) for i in range(sp.n)) for B in bases)
    dp = DecoratedPolytope(verts, (), lattice)
    if dp.dim != lattice.p:
        raise QGrError("matroid polytope dimension differs from the quotient torus rank")
    return dp


def orbit_closure_fan(sp: SupportPattern) -> DecoratedFan:
    """Decorated fan of the orbit closure: ``V_{rho,0} = h + C·Π(u)``, ``V_{rho,1} = h``."""
    dp = orbit_polytope(sp)
    coords = dp.coordinates()
    lat = dp.lattice
    fan, _ = normal_fan(coords, lat.p)
    h = lat.h
    decs = {}
    for i, u in enumerate(fan.rays):
        lift = lat.lift(u)
        V = h + Subspace.span([lat.odd_image(lift)], sp.n)
        decs[i] = [V, h]
    return DecoratedFan.build(lat.torus(), fan, h, decs)


def orbit_closure_polytope(sp: SupportPattern) -> DecoratedPolytope:
    """Orbit polytope with faces from the normal fan and ``W_F = ann(V_{sigma_F,0})``."""
    df = orbit_closure_fan(sp)
    dp = orbit_polytope(sp)
    seen = {}
    for idx, ids in fan_faces(df, dp).items():
        seen.setdefault(ids, idx)
    faces = tuple(
        PolytopeFace(ids, df.V_sigma0(idx).annihilator())
        for ids, idx in sorted(seen.items(), key=lambda kv: (len(kv[0]), kv[0]))
    )
    return DecoratedPolytope(dp.vertices, faces, dp.lattice)


# ------------------------------------------------------------ comparison


def decorated_fans_equal(a: DecoratedFan, b: DecoratedFan) -> bool:
    """Equal up to reordering of rays."""
    if a.torus != b.torus or a.h != b.h or set(a.fan.rays) != set(b.fan.rays):
        return False
    ca = {frozenset(a.fan.rays[i] for i in c) for c in a.fan.all_cones}
    cb = {frozenset(b.fan.rays[i] for i in c) for c in b.fan.all_cones}
    if ca != cb:
        return False
    for i, u in enumerate(a.fan.rays):
        j = b.fan.index_of(u)
        if a.chains[i].normalized() != b.chains[j].normalized():
            return False
    return True


def plot_data(dp: DecoratedPolytope) -> dict:
    """Vertices in ``M_P`` coordinates with face decoration dimensions."""
    return {
        "dim": dp.dim,
        "vertices": [list(c) for c in dp.coordinates()],
        "faces": [{"vertex_ids": list(f.vertex_ids), "W_dim": f.W.dim, "W": f.W.to_json()} for f in dp.faces],
    }
