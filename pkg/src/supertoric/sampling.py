"""Seeded random decorated fans for cross-checks and experiments.

Large-orbit samples are valid by construction: every ray with a non-zero
bracket gets its own odd direction ``v`` with ``[v, v]`` along the ray and
the chain ``h + C v ⊇ h``; the remaining rays use bracket-free directions.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from . import linalg as la
from .catalog import projective_fan
from .decofan import DecoratedFan, validate
from .lattice import Fan
from .superlie import Subspace, SupertorusData


@dataclass(frozen=True)
class SampleConfig:
    max_p: int = 4
    max_q: int = 4
    large_orbit: bool = True
    nonabelian: bool = True
    max_chain: int = 3


def random_unimodular(rng: random.Random, n: int, steps: int = 4) -> list[list[int]]:
    """Product of a few elementary matrices with entries in {-1, 1} and a permutation."""
    g = [[int(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return [[rng.choice((1, -1))]] if n else g
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((1, -1))
        g = [row[:] for row in g]
        for k in range(n):
            g[i][k] += c * g[j][k]
    perm = list(range(n))
    rng.shuffle(perm)
    return [g[k] for k in perm]


def random_fan(rng: random.Random, p: int) -> Fan:
    """A small fan in rank ``p`` moved by a random unimodular map."""
    e = [tuple(int(i == j) for j in range(p)) for i in range(p)]
    kind = rng.choice(("projective", "orthant", "singular", "ray"))
    if kind == "projective":
        fan = projective_fan(p)
        keep = rng.sample(fan.maximal_cones, rng.randint(1, len(fan.maximal_cones)))
        fan = _restrict(fan, keep)
    elif kind == "orthant":
        fan = Fan.build(p, e, [tuple(range(p))])
    elif kind == "singular" and p >= 2:
        second = tuple([1, 2] + [0] * (p - 2))
        fan = Fan.build(p, [e[0], second] + e[2:], [tuple(range(p))])
    else:
        fan = Fan.build(p, [e[0]], [(0,)])
    g = random_unimodular(rng, p)
    rays = [tuple(int(x) for x in la.matvec(g, r)) for r in fan.rays]
    return Fan.build(p, rays, fan.cones)


def _restrict(fan: Fan, cones) -> Fan:
    used = sorted({i for c in cones for i in c})
    pos = {r: k for k, r in enumerate(used)}
    return Fan.build(fan.rank, [fan.rays[i] for i in used], [tuple(pos[i] for i in c) for c in cones])


def _random_vector(rng: random.Random, basis: list[tuple[int, ...]], q: int) -> tuple[int, ...]:
    while True:
        coeffs = [rng.randint(-2, 2) for _ in basis]
        if any(coeffs):
            return tuple(sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(q))


def random_large_orbit(rng: random.Random, cfg: SampleConfig = SampleConfig()) -> DecoratedFan:
    """Valid large-orbit decorated fan with ``p <= max_p`` and ``q <= max_q``."""
    p = rng.randint(1, cfg.max_p)
    q = rng.randint(1, cfg.max_q)
    fan = random_fan(rng, p)
    g = random_unimodular(rng, q)
    odd = [tuple(row) for row in la.transpose(g)]  # columns of g
    h_dim = rng.randint(0, q - 1)
    h_basis, pool = odd[:h_dim], odd[h_dim:]
    h = Subspace.span(h_basis, q)
    rays = list(range(len(fan.rays)))
    rng.shuffle(rays)
    special: dict[int, tuple[int, ...]] = {}
    if cfg.nonabelian:
        n_special = rng.randint(0, min(len(rays), len(pool)))
        for r in rays[:n_special]:
            special[r] = pool.pop(rng.randrange(len(pool)))
    # brackets in the basis ``odd``; transported to coordinates by g^{-1}
    coeff = {r: rng.choice((1, 2)) for r in special}
    ginv = la.inverse(g)
    brackets = [[[0] * p for _ in range(q)] for _ in range(q)]
    for r, v in special.items():
        k = odd.index(v)
        u = fan.rays[r]
        for i, j in itertools.product(range(q), repeat=2):
            c = ginv[k][i] * ginv[k][j] * coeff[r]
            brackets[i][j] = [a + c * b for a, b in zip(brackets[i][j], u)]
    torus = SupertorusData.from_brackets(p, q, brackets) if special else SupertorusData.abelian(p, q)
    decorations = {}
    for r in range(len(fan.rays)):
        if r in special:
            decorations[r] = [h + Subspace.span([special[r]], q), h]
        elif pool and rng.random() < 0.75:
            v = _random_vector(rng, pool, q)
            length = rng.randint(1, cfg.max_chain)
            decorations[r] = [h + Subspace.span([v], q)] * length + [h]
    return DecoratedFan.build(torus, fan, h, decorations)


def random_abelian_general(rng: random.Random, cfg: SampleConfig = SampleConfig()) -> DecoratedFan:
    """Abelian decorated fan with arbitrary nested chains (not large-orbit in general)."""
    p = rng.randint(1, cfg.max_p)
    q = rng.randint(1, cfg.max_q)
    fan = random_fan(rng, p)
    h_dim = rng.randint(0, q - 1)
    g = random_unimodular(rng, q)
    odd = [tuple(row) for row in la.transpose(g)]
    h = Subspace.span(odd[:h_dim], q)
    decorations = {}
    for r in range(len(fan.rays)):
        vecs = [_random_vector(rng, odd, q) for _ in range(q - h_dim)]
        top = rng.randint(0, len(vecs))
        dims = sorted((rng.randint(0, top) for _ in range(rng.randint(0, cfg.max_chain))), reverse=True)
        chain = [h + Subspace.span(vecs[:top], q)] + [h + Subspace.span(vecs[:d], q) for d in dims] + [h]
        decorations[r] = chain
    return DecoratedFan.build(SupertorusData.abelian(p, q), fan, h, decorations)


def sample_valid(rng: random.Random, cfg: SampleConfig = SampleConfig(), tries: int = 20) -> DecoratedFan:
    """Draw until ``validate`` accepts; raises if ``tries`` draws all fail."""
    mode = "large_orbit" if cfg.large_orbit else "general"
    for _ in range(tries):
        df = random_large_orbit(rng, cfg) if cfg.large_orbit else random_abelian_general(rng, cfg)
        if validate(df, mode).valid:
            return df
    raise RuntimeError("no valid sample found")
