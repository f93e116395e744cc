"""Quasiabelian Lie superalgebras and rational subspace lattices.

A supertorus Lie superalgebra is stored through structure constants
``x[i][j]`` in Q^p with ``[theta_i, theta_j] = x[i][j] + x[j][i]``.  Odd
subspaces are :class:`Subspace` objects in canonical reduced row echelon form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg as la

Vec = tuple[Fraction, ...]


class UndecidedAtBound(RuntimeError):
    """The subspace-lattice closure grew beyond the configured bound."""


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^n in canonical RREF (rows are the basis)."""

    n: int
    rows: tuple[Vec, ...]

    @classmethod
    def span(cls, vectors: Iterable[Sequence], n: int) -> "Subspace":
        vecs = [la.frac_vec(v) for v in vectors]
        for v in vecs:
            if len(v) != n:
                raise ValueError(f"vector of length {len(v)} in ambient dimension {n}")
        red, _ = la.rref(vecs, n)
        return cls(n, tuple(red))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls.span([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def coordinate(cls, n: int, idx: Iterable[int]) -> "Subspace":
        return cls.span([[int(i == j) for j in range(n)] for i in idx], n)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __repr__(self) -> str:
        if not self.rows:
            return f"Subspace(0 in Q^{self.n})"
        body = ", ".join("(" + ",".join(_fmt(x) for x in r) + ")" for r in self.rows)
        return f"Subspace<{body}>"

    def __add__(self, other: "Subspace") -> "Subspace":
        self._same(other)
        return Subspace.span(self.rows + other.rows, self.n)

    def __and__(self, other: "Subspace") -> "Subspace":
        self._same(other)
        return (self.annihilator() + other.annihilator()).annihilator()

    def __le__(self, other: "Subspace") -> bool:
        self._same(other)
        return all(other.contains(r) for r in self.rows)

    def __lt__(self, other: "Subspace") -> bool:
        return self <= other and self.dim < other.dim

    def _same(self, other: "Subspace") -> None:
        if self.n != other.n:
            raise ValueError(f"ambient dimension mismatch: {self.n} vs {other.n}")

    def contains(self, v: Sequence) -> bool:
        v = la.frac_vec(v)
        if len(v) != self.n:
            raise ValueError("length mismatch")
        return la.rank(self.rows + (v,), self.n) == self.dim

    def annihilator(self) -> "Subspace":
        """The annihilator in the dual space (same coordinates)."""
        if not self.rows:
            return Subspace.full(self.n)
        return Subspace.span(la.nullspace(self.rows, self.n), self.n)

    def codim_in(self, other: "Subspace") -> int:
        return other.dim - self.dim

    def complement_in(self, other: "Subspace") -> list[Vec]:
        """Rows of ``other`` extending a basis of ``self`` (self <= other)."""
        basis = list(self.rows)
        out = []
        for r in other.rows:
            if la.rank(basis + [r], self.n) > len(basis):
                basis.append(r)
                out.append(r)
        return out

    def to_json(self) -> list[list[str]]:
        return [[_fmt(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, rows, n: int) -> "Subspace":
        return cls.span([[la.to_frac(x) for x in r] for r in rows], n)


# ---------------------------------------------------------------- supertori


@dataclass(frozen=True)
class SupertorusData:
    """Even rank p, odd rank q, bracket constants ``x[i][j]`` in Q^p."""

    p: int
    q: int
    x: tuple[tuple[Vec, ...], ...]

    def __post_init__(self):
        if len(self.x) != self.q or any(len(row) != self.q for row in self.x):
            raise ValueError("bracket array must be q x q")
        for row in self.x:
            for v in row:
                if len(v) != self.p:
                    raise ValueError("bracket entries must lie in Q^p")

    @classmethod
    def build(cls, p: int, q: int, x: Sequence[Sequence[Sequence]] | None = None) -> "SupertorusData":
        if x is None:
            zero = tuple(Fraction(0) for _ in range(p))
            return cls(p, q, tuple(tuple(zero for _ in range(q)) for _ in range(q)))
        return cls(p, q, tuple(tuple(la.frac_vec(v) for v in row) for row in x))

    @classmethod
    def abelian(cls, p: int, q: int) -> "SupertorusData":
        return cls.build(p, q)

    @classmethod
    def q1n(cls, n: int) -> "SupertorusData":
        """Q(1)^n in the symmetric gauge: ``x_ii = e_i``, so ``[theta_i, theta_i] = 2 x_i``."""
        x = [[[int(i == j == k) for k in range(n)] for j in range(n)] for i in range(n)]
        return cls.build(n, n, x)

    @classmethod
    def from_brackets(cls, p: int, q: int, brackets: Sequence[Sequence[Sequence]]) -> "SupertorusData":
        """Symmetric gauge ``x_ij = [theta_i, theta_j] / 2`` from a symmetric bracket table."""
        x = []
        for i in range(q):
            row = []
            for j in range(q):
                b = la.frac_vec(brackets[i][j])
                if la.frac_vec(brackets[j][i]) != b:
                    raise ValueError("bracket table must be symmetric")
                row.append(tuple(c / 2 for c in b))
            x.append(row)
        return cls.build(p, q, x)

    def bracket_basis(self, i: int, j: int) -> Vec:
        return tuple(a + b for a, b in zip(self.x[i][j], self.x[j][i]))

    @cached_property
    def is_abelian(self) -> bool:
        return all(la.is_zero(self.bracket_basis(i, j)) for i in range(self.q) for j in range(self.q))

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "x": [[[_fmt(c) for c in v] for v in row] for row in self.x]}

    @classmethod
    def from_json(cls, data: dict) -> "SupertorusData":
        try:
            p, q = int(data["p"]), int(data["q"])
            x = data.get("x")
            if x is None:
                return cls.abelian(p, q)
            return cls.build(p, q, [[[la.to_frac(c) for c in v] for v in row] for row in x])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed torus JSON: {exc}") from exc

    def odd_zero(self) -> Subspace:
        return Subspace.zero(self.q)

    def odd_full(self) -> Subspace:
        return Subspace.full(self.q)


def bracket_eval(t: SupertorusData, u: Sequence, v: Sequence) -> Vec:
    """``[u, v] = sum_ij u_i v_j (x_ij + x_ji)``."""
    u, v = la.frac_vec(u), la.frac_vec(v)
    if len(u) != t.q or len(v) != t.q:
        raise ValueError(f"odd vectors must have length {t.q}")
    out = [Fraction(0)] * t.p
    for i, ui in enumerate(u):
        if ui == 0:
            continue
        for j, vj in enumerate(v):
            if vj == 0:
                continue
            c = ui * vj
            for k, (a, b) in enumerate(zip(t.x[i][j], t.x[j][i])):
                out[k] += c * (a + b)
    return tuple(out)


def bracket_subspaces(t: SupertorusData, U: Subspace, V: Subspace) -> Subspace:
    """Span of ``[u, v]`` over bases of U and V, as a subspace of Q^p."""
    vals = [bracket_eval(t, u, v) for u in U.rows for v in V.rows]
    return Subspace.span(vals, t.p)


def is_isotropic(t: SupertorusData, W: Subspace, m: Sequence) -> bool:
    """``<m, [W, W]> = 0``."""
    for a, b in itertools.combinations_with_replacement(W.rows, 2):
        if la.dot(m, bracket_eval(t, a, b)) != 0:
            return False
    return True


# --------------------------------------------------------------- chains


@dataclass(frozen=True)
class DecorationChain:
    """Descending chain ``V_0 >= V_1 >= ... >= V_k``; the last space repeats."""

    spaces: tuple[Subspace, ...]

    def __post_init__(self):
        if not self.spaces:
            raise ValueError("empty decoration chain")
        for a, b in zip(self.spaces, self.spaces[1:]):
            if not b <= a:
                raise ValueError("decoration chain is not descending")

    @classmethod
    def of(cls, *spaces: Subspace) -> "DecorationChain":
        return cls(tuple(spaces)).normalized()

    @classmethod
    def constant(cls, h: Subspace) -> "DecorationChain":
        return cls((h,))

    def level(self, i: int) -> Subspace:
        if i < 0:
            raise ValueError("negative chain index")
        return self.spaces[min(i, len(self.spaces) - 1)]

    @property
    def terminal(self) -> Subspace:
        return self.spaces[-1]

    def normalized(self) -> "DecorationChain":
        """Drop repeated copies of the terminal space."""
        sp = list(self.spaces)
        while len(sp) > 1 and sp[-1] == sp[-2]:
            sp.pop()
        return DecorationChain(tuple(sp))

    @property
    def jump_indices(self) -> list[int]:
        return [i for i in range(1, len(self.spaces)) if self.spaces[i] != self.spaces[i - 1]]

    def distinct(self) -> list[Subspace]:
        out = []
        for s in self.spaces:
            if s not in out:
                out.append(s)
        return out


# ----------------------------------------------------- adapted bases


@dataclass(frozen=True)
class AdaptedBasisResult:
    exists: bool
    basis: tuple[Vec, ...] | None = None
    witness: tuple[Subspace, Subspace, Subspace] | None = None
    closure_size: int = 0


def _distributive_failure(a: Subspace, b: Subspace, c: Subspace) -> bool:
    return (a & (b + c)).dim != ((a & b) + (a & c)).dim


def adapted_basis_exists(spaces: Iterable[Subspace], bound: int = 64) -> AdaptedBasisResult:
    """Decide whether one basis is adapted to every subspace in ``spaces``.

    Such a basis exists iff the sum/intersection closure is distributive.  A
    candidate basis is built from the join-irreducibles of the closure and
    verified; only on failure is a non-distributive triple searched for, and
    triples of the original family come first so witnesses stay readable.
    """
    family: list[Subspace] = []
    for s in spaces:
        if s not in family:
            family.append(s)
    if not family:
        return AdaptedBasisResult(True, (), None, 0)
    n = family[0].n
    closure = list(family)
    for s in (Subspace.zero(n), Subspace.full(n)):
        if s not in closure:
            closure.append(s)
    known = set(closure)
    frontier = list(closure)
    while frontier:
        new = []
        for a in frontier:
            for b in list(known):
                for s in (a + b, a & b):
                    if s not in known:
                        known.add(s)
                        closure.append(s)
                        new.append(s)
                        if len(closure) > bound:
                            raise UndecidedAtBound(f"subspace lattice closure exceeds {bound} elements")
        frontier = new
    basis = _basis_from_distributive(closure, n)
    if len(basis) == n and la.rank(basis, n) == n and all(_spanned_by_subset(s, basis) for s in closure):
        return AdaptedBasisResult(True, tuple(basis), None, len(closure))
    for pool in (family, closure):
        for a, b, c in itertools.permutations(pool, 3):
            if _distributive_failure(a, b, c):
                return AdaptedBasisResult(False, None, (a, b, c), len(closure))
    raise AssertionError("no adapted basis but the closure looks distributive")


def _basis_from_distributive(lattice: list[Subspace], n: int) -> list[Vec]:
    basis: list[Vec] = []
    for j in sorted(lattice, key=lambda s: (s.dim, s.rows)):
        below = [s for s in lattice if s < j]
        if not below:
            continue
        covers = [s for s in below if not any(s < t for t in below)]
        if len(covers) != 1:
            continue
        basis.extend(covers[0].complement_in(j))
    return basis


def _spanned_by_subset(s: Subspace, basis: Sequence[Vec]) -> bool:
    inside = [b for b in basis if s.contains(b)]
    return la.rank(inside, s.n) == s.dim if inside else s.dim == 0


def is_adapted(basis: Sequence[Vec], spaces: Iterable[Subspace]) -> bool:
    if not basis:
        return all(s.dim == 0 for s in spaces)
    n = len(basis[0])
    if la.rank(basis, n) != n or len(basis) != n:
        return False
    return all(_spanned_by_subset(s, basis) for s in spaces)
