"""Exterior algebra on the odd coordinates and weight spaces ``t^m * Lambda``.

Monomials ``xi_I`` are bitmasks (bit k <-> xi_{k+1}) with factors in
increasing order.  Weight spaces are subspaces of Q^(2^q) whose columns are
ordered by (degree, mask), so RREF bases prefer low-degree pivots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import linalg as la
from .superlie import Subspace, SupertorusData

MAX_ODD = 62


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _sign_before(mask: int, k: int) -> int:
    """(-1)^(number of set bits below k)."""
    return -1 if _popcount(mask & ((1 << k) - 1)) % 2 else 1


def _wedge_sign(a: int, b: int) -> int:
    """Sign of xi_A * xi_B = sign * xi_(A|B) for disjoint A, B."""
    inv = 0
    bb = b
    while bb:
        low = bb & -bb
        inv += _popcount(a & ~((low << 1) - 1))
        bb ^= low
    return -1 if inv % 2 else 1


@dataclass(frozen=True)
class ExteriorElement:
    q: int
    terms: tuple[tuple[int, Fraction], ...]  # sorted (mask, coeff), no zeros

    @classmethod
    def from_dict(cls, q: int, d: Mapping[int, object]) -> "ExteriorElement":
        if q > MAX_ODD:
            raise ValueError(f"odd rank {q} exceeds {MAX_ODD}")
        items = []
        for mask, c in d.items():
            c = la.to_frac(c)
            if c != 0:
                if mask >> q:
                    raise ValueError("monomial outside the odd rank")
                items.append((mask, c))
        return cls(q, tuple(sorted(items)))

    @classmethod
    def zero(cls, q: int) -> "ExteriorElement":
        return cls(q, ())

    @classmethod
    def one(cls, q: int) -> "ExteriorElement":
        return cls.from_dict(q, {0: 1})

    @classmethod
    def monomial(cls, q: int, indices: Iterable[int], coeff=1) -> "ExteriorElement":
        """``coeff * xi_{i1} ... xi_{ik}`` (0-based indices, any order)."""
        e = cls.from_dict(q, {0: coeff})
        for i in reversed(list(indices)):
            e = e.left_mul_xi(i)
        return e

    @classmethod
    def linear(cls, coeffs: Sequence) -> "ExteriorElement":
        q = len(coeffs)
        return cls.from_dict(q, {1 << i: c for i, c in enumerate(coeffs)})

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ExteriorElement") -> "ExteriorElement":
        d = self.as_dict()
        for m, c in other.terms:
            d[m] = d.get(m, 0) + c
        return ExteriorElement.from_dict(self.q, d)

    def __neg__(self) -> "ExteriorElement":
        return ExteriorElement(self.q, tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "ExteriorElement") -> "ExteriorElement":
        return self + (-other)

    def scale(self, c) -> "ExteriorElement":
        return ExteriorElement.from_dict(self.q, {m: a * la.to_frac(c) for m, a in self.terms})

    def __mul__(self, other: "ExteriorElement") -> "ExteriorElement":
        if self.q != other.q:
            raise ValueError("odd rank mismatch")
        d: dict[int, Fraction] = {}
        for a, ca in self.terms:
            for b, cb in other.terms:
                if a & b:
                    continue
                m = a | b
                d[m] = d.get(m, 0) + _wedge_sign(a, b) * ca * cb
        return ExteriorElement.from_dict(self.q, d)

    def left_mul_xi(self, k: int) -> "ExteriorElement":
        d = {}
        for m, c in self.terms:
            if m >> k & 1:
                continue
            d[m | (1 << k)] = _sign_before(m, k) * c
        return ExteriorElement.from_dict(self.q, d)

    def derivative(self, k: int) -> "ExteriorElement":
        """Left derivative ``d/d xi_k``."""
        d = {}
        for m, c in self.terms:
            if m >> k & 1:
                d[m & ~(1 << k)] = _sign_before(m, k) * c
        return ExteriorElement.from_dict(self.q, d)

    def contract(self, theta: Sequence) -> "ExteriorElement":
        """``sum_k theta_k d/d xi_k``."""
        out = ExteriorElement.zero(self.q)
        for k, c in enumerate(la.frac_vec(theta)):
            if c:
                out = out + self.derivative(k).scale(c)
        return out

    def parity_parts(self) -> tuple["ExteriorElement", "ExteriorElement"]:
        even = {m: c for m, c in self.terms if _popcount(m) % 2 == 0}
        odd = {m: c for m, c in self.terms if _popcount(m) % 2 == 1}
        return ExteriorElement.from_dict(self.q, even), ExteriorElement.from_dict(self.q, odd)

    def substitute(self, images: Sequence["ExteriorElement"]) -> "ExteriorElement":
        """Algebra map sending ``xi_k`` to ``images[k]`` (odd linear forms)."""
        if len(images) != self.q:
            raise ValueError("need one image per odd coordinate")
        q2 = images[0].q if images else 0
        out = ExteriorElement.zero(q2)
        for m, c in self.terms:
            term = ExteriorElement.from_dict(q2, {0: c})
            for k in range(self.q):
                if m >> k & 1:
                    term = term * images[k]
            out = out + term
        return out

    def render(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"xi{k + 1}" for k in range(self.q)]
        parts = []
        for m, c in sorted(self.terms, key=lambda t: (_popcount(t[0]), t[0])):
            mono = "*".join(names[k] for k in range(self.q) if m >> k & 1)
            if not mono:
                s = _fmt(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{_fmt(c)}*{mono}"
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += s if s.startswith("-") else "+" + s
        return out

    def __repr__(self) -> str:
        return self.render()


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_element(q: int, data: Mapping[str, object]) -> ExteriorElement:
    """Parse ``{"1": c, "xi1*xi3": c, ...}`` (1-based names)."""
    out = ExteriorElement.zero(q)
    for key, c in data.items():
        key = key.strip()
        if key in ("1", ""):
            idx: list[int] = []
        else:
            idx = []
            for tok in key.split("*"):
                tok = tok.strip()
                if not tok.startswith("xi"):
                    raise ValueError(f"bad monomial {key!r}")
                k = int(tok[2:]) - 1
                if not 0 <= k < q:
                    raise ValueError(f"odd index out of range in {key!r}")
                idx.append(k)
        out = out + ExteriorElement.monomial(q, idx, la.to_frac(c))
    return out


def element_to_json(e: ExteriorElement) -> dict[str, str]:
    out = {}
    for m, c in e.terms:
        key = "*".join(f"xi{k + 1}" for k in range(e.q) if m >> k & 1) or "1"
        out[key] = _fmt(c)
    return out


# --------------------------------------------------------------- derivations


def _pairing(m: Sequence, x: Sequence) -> Fraction:
    return sum((la.to_frac(a) * b for a, b in zip(m, x)), Fraction(0))


@lru_cache(maxsize=4096)
def _pairing_table(t: SupertorusData, m: tuple) -> tuple[tuple[Fraction, ...], ...]:
    """``table[k][j] = <m, x_kj>``."""
    return tuple(tuple(_pairing(m, t.x[k][j]) for j in range(t.q)) for k in range(t.q))


def right_derivation(t: SupertorusData, theta: Sequence, m: Sequence, e: ExteriorElement) -> ExteriorElement:
    """Exterior part of ``theta^r (t^m e) / t^m``.

    ``theta_j^r = sum_k xi_k <m, x_kj> + d/d xi_j``.
    """
    theta = la.frac_vec(theta)
    if len(theta) != t.q or len(m) != t.p or e.q != t.q:
        raise ValueError("dimension mismatch")
    out = ExteriorElement.zero(t.q)
    table = _pairing_table(t, tuple(m))
    for j, c in enumerate(theta):
        if c == 0:
            continue
        acc = e.derivative(j)
        for k in range(t.q):
            a = table[k][j]
            if a:
                acc = acc + e.left_mul_xi(k).scale(a)
        out = out + acc.scale(c)
    return out


def left_derivation(t: SupertorusData, theta: Sequence, m: Sequence, e: ExteriorElement) -> ExteriorElement:
    """Exterior part of the left regular action ``theta (t^m e) / t^m``.

    ``theta_i = sum_a xi_a <m, x_ia> - d/d xi_i``.
    """
    theta = la.frac_vec(theta)
    if len(theta) != t.q or len(m) != t.p or e.q != t.q:
        raise ValueError("dimension mismatch")
    out = ExteriorElement.zero(t.q)
    for i, c in enumerate(theta):
        if c == 0:
            continue
        acc = -e.derivative(i)
        for a in range(t.q):
            s = _pairing(m, t.x[i][a])
            if s:
                acc = acc + e.left_mul_xi(a).scale(s)
        out = out + acc.scale(c)
    return out


# --------------------------------------------------------------- weight spaces


@lru_cache(maxsize=None)
def monomial_order(q: int) -> tuple[int, ...]:
    return tuple(sorted(range(1 << q), key=lambda m: (_popcount(m), m)))


@lru_cache(maxsize=None)
def _position(q: int) -> dict[int, int]:
    return {m: i for i, m in enumerate(monomial_order(q))}


def to_vector(e: ExteriorElement) -> tuple[Fraction, ...]:
    pos = _position(e.q)
    v = [Fraction(0)] * (1 << e.q)
    for m, c in e.terms:
        v[pos[m]] = c
    return tuple(v)


def from_vector(q: int, v: Sequence) -> ExteriorElement:
    order = monomial_order(q)
    return ExteriorElement.from_dict(q, {order[i]: c for i, c in enumerate(v) if c})


@dataclass(frozen=True)
class WeightSpace:
    """Subspace of ``t^m * Lambda(t1*)`` for a fixed character ``m``."""

    weight: tuple[int, ...]
    q: int
    space: Subspace

    @classmethod
    def from_elements(cls, m: Sequence[int], q: int, elems: Iterable[ExteriorElement]) -> "WeightSpace":
        return cls(tuple(int(x) for x in m), q, Subspace.span([to_vector(e) for e in elems], 1 << q))

    @classmethod
    def full(cls, m: Sequence[int], q: int) -> "WeightSpace":
        return cls(tuple(int(x) for x in m), q, Subspace.full(1 << q))

    @classmethod
    def zero(cls, m: Sequence[int], q: int) -> "WeightSpace":
        return cls(tuple(int(x) for x in m), q, Subspace.zero(1 << q))

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> list[ExteriorElement]:
        return [from_vector(self.q, r) for r in self.space.rows]

    def contains(self, e: ExteriorElement) -> bool:
        return self.space.contains(to_vector(e))

    def __le__(self, other: "WeightSpace") -> bool:
        _check_same(self, other)
        return self.space <= other.space

    def __add__(self, other: "WeightSpace") -> "WeightSpace":
        _check_same(self, other)
        return WeightSpace(self.weight, self.q, self.space + other.space)

    def render(self, names: Sequence[str] | None = None) -> list[str]:
        return [e.render(names) for e in self.basis]

    def to_json(self) -> dict:
        return {"weight": list(self.weight), "dim": self.dim, "basis": [element_to_json(e) for e in self.basis]}


def _check_same(a: WeightSpace, b: WeightSpace) -> None:
    if a.weight != b.weight:
        raise ValueError(f"weight mismatch: {a.weight} vs {b.weight}")
    if a.q != b.q:
        raise ValueError("odd rank mismatch")


def derivation_matrix(t: SupertorusData, theta: Sequence, m: Sequence) -> list[list[Fraction]]:
    """Matrix of the right derivation on Lambda in monomial-order coordinates (rows = outputs)."""
    return [list(r) for r in _derivation_matrix(t, la.frac_vec(theta), tuple(m))]


@lru_cache(maxsize=8192)
def _derivation_matrix(t: SupertorusData, theta: tuple, m: tuple) -> tuple[tuple[Fraction, ...], ...]:
    order = monomial_order(t.q)
    cols = [to_vector(right_derivation(t, theta, m, ExteriorElement.from_dict(t.q, {mask: 1}))) for mask in order]
    return tuple(tuple(r) for r in la.transpose(cols))


def induced_weight_space(t: SupertorusData, W: Subspace, m: Sequence[int]) -> WeightSpace:
    """``L_{C[T]^W}(m)``: elements killed by the right derivations of W."""
    if W.n != t.q:
        raise ValueError("W must be a subspace of the odd part")
    return _induced(t, W, tuple(int(x) for x in m))


@lru_cache(maxsize=16384)
def _induced(t: SupertorusData, W: Subspace, m: tuple[int, ...]) -> WeightSpace:
    rows: list[list[Fraction]] = []
    for theta in W.rows:
        rows.extend(derivation_matrix(t, theta, m))
    n = 1 << t.q
    ker = la.nullspace(rows, n) if rows else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return WeightSpace(tuple(int(x) for x in m), t.q, Subspace.span(ker, n))


def intersect_weight_spaces(spaces: Sequence[WeightSpace]) -> WeightSpace:
    if not spaces:
        raise ValueError("nothing to intersect")
    out = spaces[0]
    for s in spaces[1:]:
        _check_same(out, s)
        out = WeightSpace(out.weight, out.q, out.space & s.space)
    return out


def sum_weight_spaces(spaces: Sequence[WeightSpace], m: Sequence[int], q: int) -> WeightSpace:
    out = WeightSpace.zero(m, q)
    for s in spaces:
        out = out + s
    return out


def is_decomposably_generated(ws: WeightSpace, generators: Sequence[WeightSpace]) -> bool:
    """``ws`` lies in the span of the generator spaces."""
    if ws.dim == 0:
        return True
    if not generators:
        return False
    total = sum_weight_spaces(generators, ws.weight, ws.q)
    return ws <= total
